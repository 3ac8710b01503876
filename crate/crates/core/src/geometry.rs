//! Pointwise differential geometry of a two-dimensional immersion in R^n.
//!
//! Everything here is a pure function of a [`SurfaceJet`] (position plus first
//! and second parameter derivatives at one point) and, where needed, an
//! orthonormal [`NormalFrame`]. Index conventions: parameters `u^1 = u`,
//! `u^2 = v` map to indices `0` and `1`; normal directions are zero based.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{axpy, dot, norm, norm_sq, Sym2};
use crate::scalar::{tolerance, Real};

/// Default absolute threshold on the area element below which the
/// parametrization is treated as rank deficient.
pub const EPS_RANK: f64 = 1e-12;
/// Default bound on [`conformality_defect`] for routines that need conformal parameters.
pub const EPS_CONFORMAL: f64 = 1e-6;
/// Frame vectors must be normal to the tangent plane within this multiple of `sqrt(W)`.
pub const FRAME_NORMALITY: f64 = 1e-8;
/// Frame vectors must be orthonormal within this tolerance.
pub const FRAME_ORTHONORMALITY: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ambient dimension must be at least 3, got {0}")]
    DimensionTooLow(usize),
    #[error("vector length mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate metric: h11*h22 - h12^2 = {det:e} is below the rank threshold")]
    DegenerateMetric { det: f64 },
    #[error("normal frame vector {index} has tangential component {defect:e}")]
    FrameMismatch { index: usize, defect: f64 },
    #[error("normal frame is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("expected {expected} normal vectors, found {found}")]
    FrameSize { expected: usize, found: usize },
    #[error("normal frame carries no parameter derivatives")]
    MissingDerivatives,
    #[error("parameters are not conformal at this point (defect {defect:e})")]
    NotConformal { defect: f64 },
}

/// Position and first/second parameter derivatives of `X` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceJet<T> {
    pub x: Vec<T>,
    pub xu: Vec<T>,
    pub xv: Vec<T>,
    pub xuu: Vec<T>,
    pub xuv: Vec<T>,
    pub xvv: Vec<T>,
}

impl<T: Real> SurfaceJet<T> {
    pub fn new(
        x: Vec<T>,
        xu: Vec<T>,
        xv: Vec<T>,
        xuu: Vec<T>,
        xuv: Vec<T>,
        xvv: Vec<T>,
    ) -> Result<Self, GeometryError> {
        let n = x.len();
        if n < 3 {
            return Err(GeometryError::DimensionTooLow(n));
        }
        for v in [&xu, &xv, &xuu, &xuv, &xvv] {
            if v.len() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        Ok(Self { x, xu, xv, xuu, xuv, xvv })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `X_{u^i}`
    pub fn first(&self, i: usize) -> &[T] {
        if i == 0 {
            &self.xu
        } else {
            &self.xv
        }
    }

    /// `X_{u^i u^j}`
    pub fn second(&self, i: usize, j: usize) -> &[T] {
        match (i, j) {
            (0, 0) => &self.xuu,
            (1, 1) => &self.xvv,
            _ => &self.xuv,
        }
    }

    /// `X_uu + X_vv`
    pub fn laplacian(&self) -> Vec<T> {
        self.xuu.iter().zip(&self.xvv).map(|(&a, &b)| a + b).collect()
    }

    /// `|X_u|^2 + |X_v|^2`
    pub fn grad_norm_sq(&self) -> T {
        norm_sq(&self.xu) + norm_sq(&self.xv)
    }
}

/// First fundamental form `h_ij = X_{u^i}·X_{u^j}`, its inverse and the area element.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FirstForm<T> {
    pub h11: T,
    pub h12: T,
    pub h22: T,
    pub w: T,
    pub hinv11: T,
    pub hinv12: T,
    pub hinv22: T,
}

impl<T: Real> FirstForm<T> {
    pub fn metric(&self) -> Sym2<T> {
        Sym2::new(self.h11, self.h12, self.h22)
    }

    pub fn inverse(&self) -> Sym2<T> {
        Sym2::new(self.hinv11, self.hinv12, self.hinv22)
    }

    pub fn det(&self) -> T {
        self.h11 * self.h22 - self.h12 * self.h12
    }

    /// `h_ij` with zero based indices.
    pub fn h(&self, i: usize, j: usize) -> T {
        match (i, j) {
            (0, 0) => self.h11,
            (1, 1) => self.h22,
            _ => self.h12,
        }
    }

    /// `h^ij` with zero based indices.
    pub fn hinv(&self, i: usize, j: usize) -> T {
        match (i, j) {
            (0, 0) => self.hinv11,
            (1, 1) => self.hinv22,
            _ => self.hinv12,
        }
    }
}

pub fn first_fundamental_form<T: Real>(jet: &SurfaceJet<T>) -> Result<FirstForm<T>, GeometryError> {
    first_fundamental_form_with(jet, T::lit(EPS_RANK))
}

/// As [`first_fundamental_form`] with an explicit rank threshold on `W`.
pub fn first_fundamental_form_with<T: Real>(
    jet: &SurfaceJet<T>,
    eps_rank: T,
) -> Result<FirstForm<T>, GeometryError> {
    let h11 = norm_sq(&jet.xu);
    let h12 = dot(&jet.xu, &jet.xv);
    let h22 = norm_sq(&jet.xv);
    let det = h11 * h22 - h12 * h12;
    if !(det > eps_rank * eps_rank) {
        return Err(GeometryError::DegenerateMetric { det: det.to_f64_lossy() });
    }
    Ok(FirstForm {
        h11,
        h12,
        h22,
        w: det.sqrt(),
        hinv11: h22 / det,
        hinv12: -h12 / det,
        hinv22: h11 / det,
    })
}

/// `(|h11 - h22| / W, |h12| / W)`; both vanish exactly in conformal parameters.
pub fn conformality_defect<T: Real>(form: &FirstForm<T>) -> (T, T) {
    ((form.h11 - form.h22).abs() / form.w, form.h12.abs() / form.w)
}

fn conformal_check<T: Real>(form: &FirstForm<T>, eps_conf: T) -> Result<(), GeometryError> {
    let (a, b) = conformality_defect(form);
    let defect = a.max(b);
    if defect > eps_conf || defect.is_nan() {
        return Err(GeometryError::NotConformal { defect: defect.to_f64_lossy() });
    }
    Ok(())
}

/// `n - 2` orthonormal vectors spanning the normal space at one point, with
/// optional `u`- and `v`-derivatives of each vector.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFrame<T> {
    vectors: Vec<Vec<T>>,
    derivs: Option<Vec<[Vec<T>; 2]>>,
}

impl<T: Real> NormalFrame<T> {
    /// Checks pairwise orthonormality.
    pub fn new(vectors: Vec<Vec<T>>) -> Result<Self, GeometryError> {
        let n = vectors.first().map_or(0, Vec::len);
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(GeometryError::DimensionMismatch { expected: n, found: v.len() });
        }
        let mut defect = T::zero();
        for s in 0..vectors.len() {
            for t in s..vectors.len() {
                let target = if s == t { T::one() } else { T::zero() };
                defect = defect.max((dot(&vectors[s], &vectors[t]) - target).abs());
            }
        }
        if !(defect <= tolerance::<T>(FRAME_ORTHONORMALITY)) {
            return Err(GeometryError::NotOrthonormal { defect: defect.to_f64_lossy() });
        }
        Ok(Self { vectors, derivs: None })
    }

    /// Attaches `[d/du, d/dv]` for every frame vector.
    pub fn with_derivatives(mut self, derivs: Vec<[Vec<T>; 2]>) -> Result<Self, GeometryError> {
        if derivs.len() != self.vectors.len() {
            return Err(GeometryError::FrameSize { expected: self.vectors.len(), found: derivs.len() });
        }
        let n = self.dim();
        for d in derivs.iter().flatten() {
            if d.len() != n {
                return Err(GeometryError::DimensionMismatch { expected: n, found: d.len() });
            }
        }
        self.derivs = Some(derivs);
        Ok(self)
    }

    pub fn vectors(&self) -> &[Vec<T>] {
        &self.vectors
    }

    pub fn vector(&self, s: usize) -> &[T] {
        &self.vectors[s]
    }

    pub fn derivatives(&self) -> Option<&[[Vec<T>; 2]]> {
        self.derivs.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Verifies that the frame has `n - 2` vectors, each normal to the tangent plane.
    pub fn check_against(&self, jet: &SurfaceJet<T>, w: T) -> Result<(), GeometryError> {
        let n = jet.dim();
        if self.len() != n - 2 {
            return Err(GeometryError::FrameSize { expected: n - 2, found: self.len() });
        }
        if self.dim() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, found: self.dim() });
        }
        let bound = tolerance::<T>(FRAME_NORMALITY) * w.sqrt();
        for (index, nv) in self.vectors.iter().enumerate() {
            let defect = dot(nv, &jet.xu).abs().max(dot(nv, &jet.xv).abs());
            if !(defect <= bound) {
                return Err(GeometryError::FrameMismatch { index, defect: defect.to_f64_lossy() });
            }
        }
        Ok(())
    }
}

/// Second fundamental forms `L_{Σ,ij} = X_{u^i u^j}·N_Σ`, one symmetric matrix per normal.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondForm<T> {
    pub per_normal: Vec<Sym2<T>>,
}

impl<T: Real> SecondForm<T> {
    pub fn l(&self, s: usize, i: usize, j: usize) -> T {
        let m = &self.per_normal[s];
        match (i, j) {
            (0, 0) => m.a,
            (1, 1) => m.c,
            _ => m.b,
        }
    }
}

pub fn second_fundamental_form<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
) -> Result<SecondForm<T>, GeometryError> {
    let form = first_fundamental_form(jet)?;
    frame.check_against(jet, form.w)?;
    let per_normal = frame
        .vectors()
        .iter()
        .map(|nv| Sym2::new(dot(&jet.xuu, nv), dot(&jet.xuv, nv), dot(&jet.xvv, nv)))
        .collect();
    Ok(SecondForm { per_normal })
}

/// Half the trace of the shape operator `L_{Σ,ij} h^{jk}`:
/// `(L11 h22 - 2 L12 h12 + L22 h11) / (2 det h)`.
pub fn mean_curvature<T: Real>(l: &SecondForm<T>, form: &FirstForm<T>) -> Vec<T> {
    let two = T::lit(2.0);
    let det = form.det();
    l.per_normal
        .iter()
        .map(|m| (m.a * form.h22 - two * m.b * form.h12 + m.c * form.h11) / (two * det))
        .collect()
}

/// `det(L_Σ) / det(h)`.
pub fn gauss_curvature<T: Real>(l: &SecondForm<T>, form: &FirstForm<T>) -> Vec<T> {
    let det = form.det();
    l.per_normal.iter().map(|m| m.det() / det).collect()
}

/// Eigenvalues of the shape operator, descending, computed from the symmetric
/// congruence `h^{-1/2} L h^{-1/2}` so they are always real.
pub fn principal_curvatures<T: Real>(l: &SecondForm<T>, form: &FirstForm<T>) -> Vec<(T, T)> {
    let root_inv = form.metric().sqrt_spd().inverse();
    l.per_normal.iter().map(|m| root_inv.congruence(m).eigenvalues()).collect()
}

/// Curvatures with respect to a single normal direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Curvature<T> {
    pub h: T,
    pub k: T,
    pub kappa1: T,
    pub kappa2: T,
}

pub fn curvature_data<T: Real>(l: &SecondForm<T>, form: &FirstForm<T>) -> Vec<Curvature<T>> {
    let h = mean_curvature(l, form);
    let k = gauss_curvature(l, form);
    let kappa = principal_curvatures(l, form);
    h.into_iter()
        .zip(k)
        .zip(kappa)
        .map(|((h, k), (kappa1, kappa2))| Curvature { h, k, kappa1, kappa2 })
        .collect()
}

/// `gamma[k][i][j] = Γ^k_{ij}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel<T> {
    pub gamma: [[[T; 2]; 2]; 2],
}

/// Christoffel symbols of the second kind from exact metric derivatives
/// `h_{ij,k} = X_{u^i u^k}·X_{u^j} + X_{u^i}·X_{u^j u^k}`.
pub fn christoffel<T: Real>(jet: &SurfaceJet<T>) -> Result<Christoffel<T>, GeometryError> {
    let form = first_fundamental_form(jet)?;
    let mut dh = [[[T::zero(); 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                dh[i][j][k] = dot(jet.second(i, k), jet.first(j)) + dot(jet.first(i), jet.second(j, k));
            }
        }
    }
    let half = T::lit(0.5);
    let mut gamma = [[[T::zero(); 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = T::zero();
                for l in 0..2 {
                    acc = acc + form.hinv(k, l) * (dh[j][l][i] + dh[l][i][j] - dh[i][j][l]);
                }
                gamma[k][i][j] = half * acc;
            }
        }
    }
    Ok(Christoffel { gamma })
}

/// `sigma[s][t][i] = N_{s,u^i}·N_t` for `s != t`, zero on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Torsion<T> {
    pub sigma: Vec<Vec<[T; 2]>>,
}

pub fn torsion_coefficients<T: Real>(frame: &NormalFrame<T>) -> Result<Torsion<T>, GeometryError> {
    let derivs = frame.derivatives().ok_or(GeometryError::MissingDerivatives)?;
    let m = frame.len();
    let mut sigma = vec![vec![[T::zero(); 2]; m]; m];
    for s in 0..m {
        for t in 0..m {
            if s != t {
                for i in 0..2 {
                    sigma[s][t][i] = dot(&derivs[s][i], frame.vector(t));
                }
            }
        }
    }
    Ok(Torsion { sigma })
}

/// `max_{Σ,i} |N_{Σ,u^i} + L_{Σ,ij} h^{jk} X_{u^k} - σ^Θ_{Σ,i} N_Θ| / sqrt(W)`.
pub fn weingarten_residual<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
    l: &SecondForm<T>,
    torsion: &Torsion<T>,
) -> Result<T, GeometryError> {
    let form = first_fundamental_form(jet)?;
    let derivs = frame.derivatives().ok_or(GeometryError::MissingDerivatives)?;
    let mut worst = T::zero();
    for s in 0..frame.len() {
        for i in 0..2 {
            let mut r = derivs[s][i].clone();
            for k in 0..2 {
                let mut c = T::zero();
                for j in 0..2 {
                    c = c + l.l(s, i, j) * form.hinv(j, k);
                }
                axpy(c, jet.first(k), &mut r);
            }
            for t in 0..frame.len() {
                axpy(-torsion.sigma[s][t][i], frame.vector(t), &mut r);
            }
            worst = worst.max(norm(&r));
        }
    }
    Ok(worst / form.w.sqrt())
}

/// `max_{i,j} |X_{u^i u^j} - Γ^k_{ij} X_{u^k} - Σ L_{Σ,ij} N_Σ| / sqrt(W)`.
pub fn gauss_equation_residual<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
    l: &SecondForm<T>,
    gamma: &Christoffel<T>,
) -> Result<T, GeometryError> {
    let form = first_fundamental_form(jet)?;
    let mut worst = T::zero();
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let mut r = jet.second(i, j).to_vec();
        for k in 0..2 {
            axpy(-gamma.gamma[k][i][j], jet.first(k), &mut r);
        }
        for s in 0..frame.len() {
            axpy(-l.l(s, i, j), frame.vector(s), &mut r);
        }
        worst = worst.max(norm(&r));
    }
    Ok(worst / form.w.sqrt())
}

/// `|ΔX - 2 Σ H_Σ W N_Σ| / W`, defined only in conformal parameters.
pub fn mean_curvature_system_residual<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
    h: &[T],
) -> Result<T, GeometryError> {
    mean_curvature_system_residual_with(jet, frame, h, T::lit(EPS_CONFORMAL))
}

pub fn mean_curvature_system_residual_with<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
    h: &[T],
    eps_conf: T,
) -> Result<T, GeometryError> {
    let form = first_fundamental_form(jet)?;
    conformal_check(&form, eps_conf)?;
    let mut r = jet.laplacian();
    let two_w = T::lit(2.0) * form.w;
    for (s, &hs) in h.iter().enumerate() {
        axpy(-two_w * hs, frame.vector(s), &mut r);
    }
    Ok(norm(&r) / form.w)
}

/// `ΔX·N_Σ / (2W)`, the mean curvature read off the Laplacian in conformal parameters.
pub fn mean_curvature_from_laplacian<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
    eps_conf: T,
) -> Result<Vec<T>, GeometryError> {
    let form = first_fundamental_form(jet)?;
    conformal_check(&form, eps_conf)?;
    let lap = jet.laplacian();
    let two_w = T::lit(2.0) * form.w;
    Ok(frame.vectors().iter().map(|nv| dot(&lap, nv) / two_w).collect())
}

/// `((X_uu·N)(X_vv·N) - (X_uv·N)^2) / W^2`, which equals `K_Σ` in conformal parameters.
pub fn gauss_curvature_conformal<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
    eps_conf: T,
) -> Result<Vec<T>, GeometryError> {
    let form = first_fundamental_form(jet)?;
    conformal_check(&form, eps_conf)?;
    let w2 = form.w * form.w;
    Ok(frame
        .vectors()
        .iter()
        .map(|nv| {
            let a = dot(&jet.xuu, nv);
            let b = dot(&jet.xuv, nv);
            let c = dot(&jet.xvv, nv);
            (a * c - b * b) / w2
        })
        .collect())
}

/// `|ΔX| / |∇X|^2` together with the bound `Σ|H_Σ|` it is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureRatio<T> {
    pub ratio: T,
    pub bound: T,
}

pub fn structure_condition_ratio<T: Real>(
    jet: &SurfaceJet<T>,
    h: &[T],
) -> Result<StructureRatio<T>, GeometryError> {
    let form = first_fundamental_form(jet)?;
    conformal_check(&form, T::lit(EPS_CONFORMAL))?;
    let ratio = norm(&jet.laplacian()) / jet.grad_norm_sq();
    let bound = h.iter().fold(T::zero(), |acc, &x| acc + x.abs());
    Ok(StructureRatio { ratio, bound })
}

/// Everything computable at one point from a jet and a frame.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport<T> {
    pub first: FirstForm<T>,
    pub second: SecondForm<T>,
    pub curvature: Vec<Curvature<T>>,
    pub conformality: (T, T),
    pub gauss_residual: T,
    /// Present when the frame carries derivatives.
    pub weingarten_residual: Option<T>,
    /// Present at conformal points.
    pub mcs_residual: Option<T>,
}

pub fn analyze_point<T: Real>(
    jet: &SurfaceJet<T>,
    frame: &NormalFrame<T>,
) -> Result<CurvatureReport<T>, GeometryError> {
    let first = first_fundamental_form(jet)?;
    let second = second_fundamental_form(jet, frame)?;
    let curvature = curvature_data(&second, &first);
    let gamma = christoffel(jet)?;
    let gauss_residual = gauss_equation_residual(jet, frame, &second, &gamma)?;
    let weingarten_residual = match torsion_coefficients(frame) {
        Ok(sigma) => Some(weingarten_residual(jet, frame, &second, &sigma)?),
        Err(GeometryError::MissingDerivatives) => None,
        Err(e) => return Err(e),
    };
    let h: Vec<T> = curvature.iter().map(|c| c.h).collect();
    let mcs_residual = match mean_curvature_system_residual(jet, frame, &h) {
        Ok(r) => Some(r),
        Err(GeometryError::NotConformal { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(CurvatureReport {
        first,
        conformality: conformality_defect(&first),
        second,
        curvature,
        gauss_residual,
        weingarten_residual,
        mcs_residual,
    })
}
