//! Normal frames: graph normals, projection of fixed anchor vectors onto the
//! normal space, and a Gram–Schmidt step that refuses to work outside its
//! norm and angle thresholds. Frame fields are differentiated either by
//! central differences or exactly, by re-running the construction on duals.

use thiserror::Error;

use crate::dual::Dual;
use crate::geometry::{conformality_defect, first_fundamental_form, GeometryError, NormalFrame, SurfaceJet, EPS_CONFORMAL};
use crate::jet::ScalarJet2;
use crate::linalg::{axpy, basis, dot, norm_sq, scale, sub};
use crate::scalar::{tolerance, Real};
use crate::surface::{AnalyticSurface, SurfaceError};

pub const DEFAULT_NORM_THRESHOLD: f64 = 0.5;
pub const DEFAULT_ANGLE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("raw normal {index} has squared norm {norm_sq} below the threshold {threshold}")]
    NormBelowThreshold { index: usize, norm_sq: f64, threshold: f64 },
    #[error("normalized raw normals {first} and {second} have |cosine| {cosine} above the threshold {threshold}")]
    AngleThreshold { first: usize, second: usize, cosine: f64, threshold: f64 },
    #[error("raw normal {index} is linearly dependent on the previous ones")]
    DependentVectors { index: usize },
    #[error("expected {expected} anchor vectors of length {dim}, got {found}")]
    AnchorCount { expected: usize, dim: usize, found: usize },
    #[error("anchor vectors are linearly dependent")]
    DependentAnchors,
    #[error("threshold {0} is outside (0, 1)")]
    BadThreshold(f64),
    #[error("graph normals need a graph parametrization (x, y, φ, ψ) in R^4")]
    NotAGraph,
    #[error("surface '{0}' has no closed-form frame")]
    NoCanonicalFrame(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// Normals of the graph `(x, y, φ, ψ)`, then plain Gram–Schmidt.
    GraphNormals,
    /// Anchors projected onto the normal space, then plain Gram–Schmidt.
    Projection,
    /// Anchors projected onto the normal space, then the thresholded
    /// Gram–Schmidt of [`orthonormalize`].
    ProjectionOrthonormalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameRecipe {
    pub kind: FrameKind,
    /// `n - 2` anchor vectors; `None` means `e_3, ..., e_n`.
    pub anchors: Option<Vec<Vec<f64>>>,
    pub tnorm: f64,
    pub tangle: f64,
    /// Use the orthogonal-tangent projection formula and reject non-conformal jets.
    pub strict: bool,
}

impl FrameRecipe {
    pub fn new(kind: FrameKind) -> Self {
        Self { kind, anchors: None, tnorm: DEFAULT_NORM_THRESHOLD, tangle: DEFAULT_ANGLE_THRESHOLD, strict: false }
    }

    pub fn with_anchors(mut self, anchors: Vec<Vec<f64>>) -> Result<Self, FrameError> {
        let n = anchors.first().map_or(0, Vec::len);
        if n < 3 || anchors.len() != n - 2 || anchors.iter().any(|a| a.len() != n) {
            return Err(FrameError::AnchorCount { expected: n.saturating_sub(2), dim: n, found: anchors.len() });
        }
        // Independence through Gram–Schmidt on the anchors themselves.
        let mut basis_vecs: Vec<Vec<f64>> = Vec::new();
        for a in &anchors {
            let mut v = a.clone();
            for b in &basis_vecs {
                let c = dot(b, &v);
                axpy(-c, b, &mut v);
            }
            let len = norm_sq(&v).sqrt();
            if !(len > 1e-10 * norm_sq(a).sqrt().max(1e-300)) {
                return Err(FrameError::DependentAnchors);
            }
            basis_vecs.push(scale(1.0 / len, &v));
        }
        self.anchors = Some(anchors);
        Ok(self)
    }

    /// Anchors `e_a, e_b, ...` from 1-based axis indices.
    pub fn with_axis_anchors(self, n: usize, axes: &[usize]) -> Result<Self, FrameError> {
        if axes.iter().any(|&a| a == 0 || a > n) {
            return Err(FrameError::AnchorCount { expected: n.saturating_sub(2), dim: n, found: axes.len() });
        }
        self.with_anchors(axes.iter().map(|&a| basis(n, a - 1)).collect())
    }

    pub fn with_thresholds(mut self, tnorm: f64, tangle: f64) -> Result<Self, FrameError> {
        for t in [tnorm, tangle] {
            if !(t > 0.0 && t < 1.0) {
                return Err(FrameError::BadThreshold(t));
            }
        }
        self.tnorm = tnorm;
        self.tangle = tangle;
        Ok(self)
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    fn anchors_for<T: Real>(&self, n: usize) -> Result<Vec<Vec<T>>, FrameError> {
        match &self.anchors {
            None => Ok((2..n).map(|k| basis(n, k)).collect()),
            Some(a) if a.len() == n - 2 && a.iter().all(|v| v.len() == n) => {
                Ok(a.iter().map(|v| v.iter().map(|&x| T::lit(x)).collect()).collect())
            }
            Some(a) => Err(FrameError::AnchorCount { expected: n - 2, dim: n, found: a.len() }),
        }
    }

    /// Builds the frame at one jet. The result is orthonormal and normal to the jet.
    pub fn build<T: Real>(&self, jet: &SurfaceJet<T>) -> Result<NormalFrame<T>, FrameError> {
        let form = first_fundamental_form(jet)?;
        let frame = match self.kind {
            FrameKind::GraphNormals => {
                let [n1, n2] = graph_normals_from_jet(jet)?;
                gram_schmidt(&[n1, n2])?
            }
            FrameKind::Projection => gram_schmidt(&projection_frame(jet, &self.anchors_for(jet.dim())?, self.strict)?)?,
            FrameKind::ProjectionOrthonormalized => orthonormalize(
                &projection_frame(jet, &self.anchors_for(jet.dim())?, self.strict)?,
                T::lit(self.tnorm),
                T::lit(self.tangle),
            )?,
        };
        frame.check_against(jet, form.w)?;
        Ok(frame)
    }
}

/// `N_1 = (-φ_x, -φ_y, 1, 0) / sqrt(1 + |∇φ|^2)` and
/// `N_2 = (-ψ_x, -ψ_y, 0, 1) / sqrt(1 + |∇ψ|^2)`. Each is a unit normal of the
/// graph; the two are orthogonal to each other only in special cases.
pub fn graph_normals<T: Real>(phi: &ScalarJet2<T>, psi: &ScalarJet2<T>) -> [Vec<T>; 2] {
    let (z, o) = (T::zero(), T::one());
    let s1 = (o + phi.dx * phi.dx + phi.dy * phi.dy).sqrt();
    let s2 = (o + psi.dx * psi.dx + psi.dy * psi.dy).sqrt();
    [vec![-phi.dx / s1, -phi.dy / s1, o / s1, z], vec![-psi.dx / s2, -psi.dy / s2, z, o / s2]]
}

fn graph_normals_from_jet<T: Real>(jet: &SurfaceJet<T>) -> Result<[Vec<T>; 2], FrameError> {
    let tol = tolerance::<T>(1e-8);
    let is_graph = jet.dim() == 4
        && (jet.xu[0] - T::one()).abs() <= tol
        && jet.xu[1].abs() <= tol
        && jet.xv[0].abs() <= tol
        && (jet.xv[1] - T::one()).abs() <= tol;
    if !is_graph {
        return Err(FrameError::NotAGraph);
    }
    let c = T::zero();
    let phi = ScalarJet2 { value: jet.x[2], dx: jet.xu[2], dy: jet.xv[2], dxx: c, dxy: c, dyy: c };
    let psi = ScalarJet2 { value: jet.x[3], dx: jet.xu[3], dy: jet.xv[3], dxx: c, dxy: c, dyy: c };
    Ok(graph_normals(&phi, &psi))
}

/// Projects each anchor onto the normal space of the jet.
///
/// In strict mode the tangents are assumed orthogonal and each tangential
/// component is removed separately, `a - (a·X_u/|X_u|^2) X_u - (a·X_v/|X_v|^2) X_v`;
/// the jet must then be conformal. Otherwise the tangential part is removed by
/// solving with the Gram matrix, which is exact for any immersion.
pub fn projection_frame<T: Real>(
    jet: &SurfaceJet<T>,
    anchors: &[Vec<T>],
    strict: bool,
) -> Result<Vec<Vec<T>>, FrameError> {
    let n = jet.dim();
    if anchors.len() != n - 2 || anchors.iter().any(|a| a.len() != n) {
        return Err(FrameError::AnchorCount { expected: n - 2, dim: n, found: anchors.len() });
    }
    let form = first_fundamental_form(jet)?;
    if strict {
        let (a, b) = conformality_defect(&form);
        let defect = a.max(b);
        if !(defect <= T::lit(EPS_CONFORMAL)) {
            return Err(GeometryError::NotConformal { defect: defect.to_f64_lossy() }.into());
        }
    }
    Ok(anchors
        .iter()
        .map(|a| {
            let pu = dot(a, &jet.xu);
            let pv = dot(a, &jet.xv);
            let (cu, cv) = if strict {
                (pu / form.h11, pv / form.h22)
            } else {
                (form.hinv11 * pu + form.hinv12 * pv, form.hinv12 * pu + form.hinv22 * pv)
            };
            let mut out = a.clone();
            axpy(-cu, &jet.xu, &mut out);
            axpy(-cv, &jet.xv, &mut out);
            out
        })
        .collect())
}

/// Thresholded Gram–Schmidt. Every raw vector must satisfy `|N*_k|^2 >= tnorm`
/// and every pair of normalized raw vectors `|Ñ_j·Ñ_k| <= tangle`; otherwise
/// an error names the violated threshold. For two vectors this is
/// `N_1 = Ñ_1`, `N_2 = (Ñ_2 - (N_1·Ñ_2) N_1) / sqrt(1 - (N_1·Ñ_2)^2)`.
pub fn orthonormalize<T: Real>(raw: &[Vec<T>], tnorm: T, tangle: T) -> Result<NormalFrame<T>, FrameError> {
    for t in [tnorm, tangle] {
        if !(t > T::zero() && t < T::one()) {
            return Err(FrameError::BadThreshold(t.to_f64_lossy()));
        }
    }
    let mut unit = Vec::with_capacity(raw.len());
    for (index, v) in raw.iter().enumerate() {
        let ns = norm_sq(v);
        if ns < tnorm || ns.is_nan() {
            return Err(FrameError::NormBelowThreshold {
                index,
                norm_sq: ns.to_f64_lossy(),
                threshold: tnorm.to_f64_lossy(),
            });
        }
        unit.push(scale(T::one() / ns.sqrt(), v));
    }
    for j in 0..unit.len() {
        for k in j + 1..unit.len() {
            let c = dot(&unit[j], &unit[k]);
            if c.abs() > tangle {
                return Err(FrameError::AngleThreshold {
                    first: j,
                    second: k,
                    cosine: c.to_f64_lossy(),
                    threshold: tangle.to_f64_lossy(),
                });
            }
        }
    }
    if unit.len() == 2 {
        let c = dot(&unit[0], &unit[1]);
        let mut n2 = unit[1].clone();
        axpy(-c, &unit[0], &mut n2);
        let n2 = scale(T::one() / (T::one() - c * c).sqrt(), &n2);
        let n1 = unit.swap_remove(0);
        return Ok(NormalFrame::new(vec![n1, n2])?);
    }
    gram_schmidt(&unit)
}

/// Modified Gram–Schmidt without thresholds; fails only on (numerically)
/// dependent input.
pub fn gram_schmidt<T: Real>(raw: &[Vec<T>]) -> Result<NormalFrame<T>, FrameError> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(raw.len());
    for (index, v) in raw.iter().enumerate() {
        let mut w = v.clone();
        for _pass in 0..2 {
            for b in &out {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let len = norm_sq(&w).sqrt();
        if !(len > tolerance::<T>(1e-8) * norm_sq(v).sqrt()) || len == T::zero() {
            return Err(FrameError::DependentVectors { index });
        }
        out.push(scale(T::one() / len, &w));
    }
    Ok(NormalFrame::new(out)?)
}

/// Central-difference derivatives of a recipe's frame field. `neighbors` are
/// the jets at `(u+h, v)`, `(u-h, v)`, `(u, v+h)`, `(u, v-h)`.
pub fn frame_field_derivatives<T: Real>(
    center: &SurfaceJet<T>,
    neighbors: [&SurfaceJet<T>; 4],
    recipe: &FrameRecipe,
    step: T,
) -> Result<NormalFrame<T>, FrameError> {
    let frame = recipe.build(center)?;
    let others = neighbors.iter().map(|j| recipe.build(j)).collect::<Result<Vec<_>, _>>()?;
    let vecs: Vec<&[Vec<T>]> = others.iter().map(|f| f.vectors()).collect();
    Ok(frame.with_derivatives(central_derivatives(&vecs, step))?)
}

fn central_derivatives<T: Real>(at: &[&[Vec<T>]], step: T) -> Vec<[Vec<T>; 2]> {
    let two_h = T::lit(2.0) * step;
    (0..at[0].len())
        .map(|s| {
            [scale(T::one() / two_h, &sub(&at[0][s], &at[1][s])), scale(T::one() / two_h, &sub(&at[2][s], &at[3][s]))]
        })
        .collect()
}

/// Where frames on a catalogue surface come from.
#[derive(Clone, Debug, PartialEq)]
pub enum FrameSource {
    /// The closed-form frame the surface's curvature oracle refers to.
    Canonical,
    Recipe(FrameRecipe),
}

/// How frame derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameDerivatives {
    None,
    /// Forward-mode differentiation of the whole construction.
    Exact,
    /// Central differences with the given parameter step.
    FiniteDifference(f64),
}

/// Frame of `surface` at `(u, v)` with the requested derivatives.
pub fn surface_frame<T: Real>(
    surface: &AnalyticSurface,
    source: &FrameSource,
    u: T,
    v: T,
    derivatives: FrameDerivatives,
) -> Result<NormalFrame<T>, FrameError> {
    let vectors_at = |a: T, b: T| -> Result<Vec<Vec<T>>, FrameError> {
        match source {
            FrameSource::Canonical => surface
                .canonical_frame_vectors(a, b)
                .ok_or_else(|| FrameError::NoCanonicalFrame(surface.name().to_string())),
            FrameSource::Recipe(r) => Ok(r.build(&surface.jet(a, b)?)?.vectors().to_vec()),
        }
    };
    let frame = match source {
        FrameSource::Canonical => NormalFrame::new(vectors_at(u, v)?)?,
        FrameSource::Recipe(r) => r.build(&surface.jet(u, v)?)?,
    };
    let derivs = match derivatives {
        FrameDerivatives::None => return Ok(frame),
        FrameDerivatives::FiniteDifference(step) => {
            let h = T::lit(step);
            let at = [vectors_at(u + h, v)?, vectors_at(u - h, v)?, vectors_at(u, v + h)?, vectors_at(u, v - h)?];
            let refs: Vec<&[Vec<T>]> = at.iter().map(|x| x.as_slice()).collect();
            central_derivatives(&refs, h)
        }
        FrameDerivatives::Exact => {
            let lifted = |du: T, dv: T| -> Result<Vec<Vec<T>>, FrameError> {
                let (a, b) = (Dual::new(u, du), Dual::new(v, dv));
                let vecs: Vec<Vec<Dual<T>>> = match source {
                    FrameSource::Canonical => surface
                        .canonical_frame_vectors(a, b)
                        .ok_or_else(|| FrameError::NoCanonicalFrame(surface.name().to_string()))?,
                    FrameSource::Recipe(r) => r.build(&surface.jet(a, b)?)?.vectors().to_vec(),
                };
                Ok(vecs.iter().map(|x| x.iter().map(|d| d.eps).collect()).collect())
            };
            let (du, dv) = (lifted(T::one(), T::zero())?, lifted(T::zero(), T::one())?);
            du.into_iter().zip(dv).map(|(a, b)| [a, b]).collect()
        }
    };
    Ok(frame.with_derivatives(derivs)?)
}
