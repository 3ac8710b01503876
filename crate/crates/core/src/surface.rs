//! Catalogue of surfaces with exact second-order jets.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dual::Dual;
use crate::expr::{parse_expression, Expr, ExprError};
use crate::geometry::{GeometryError, NormalFrame, SurfaceJet};
use crate::jet::{eval_jet, eval_value, ScalarJet2};
use crate::linalg::sub;
use crate::scalar::Real;

/// Default finite-difference step in parameter units.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("unknown surface '{0}'")]
    UnknownSurface(String),
    #[error("bad parameter '{name}': {reason}")]
    BadParameter { name: String, reason: String },
    #[error("finite-difference stencil point ({u}, {v}) lies outside the surface domain")]
    StencilOutOfDomain { u: f64, v: f64 },
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Parameter domain of a catalogue surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Closed disc `u^2 + v^2 <= radius^2`.
    Disc { radius: f64 },
    /// `[0, 2π)^2`, extended periodically.
    Periodic,
}

impl Domain {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        match *self {
            Domain::Disc { radius } => u * u + v * v <= radius * radius * (1.0 + 1e-12),
            Domain::Periodic => u.is_finite() && v.is_finite(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceKind {
    /// `(u, v, 0, 0)`
    Plane,
    /// Inverse stereographic projection onto the sphere of radius `r` in the
    /// `x1 x2 x3` slice: `r (2u, 2v, u^2 + v^2 - 1, 0) / (1 + u^2 + v^2)`.
    StereographicSphere { r: f64 },
    /// `(cos u, sin u, cos v, sin v) / sqrt 2`
    CliffordTorus,
    /// `(x, y, (x^2 - y^2) / 2, xy)`, the graph of `w^2 / 2` over `C`.
    HolomorphicGraph,
    /// `(x, y, φ(x, y), ψ(x, y))` from user expressions.
    CustomGraph { phi: Expr, psi: Expr },
}

/// Expected `(H_Σ, K_Σ)` with respect to the surface's canonical frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleCurvature {
    pub h: f64,
    pub k: f64,
}

/// Name, parameters, domain and curvature-oracle availability of a built-in.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub parameters: &'static [&'static str],
    pub domain: &'static str,
    pub oracle: bool,
}

pub fn catalogue() -> Vec<CatalogueEntry> {
    vec![
        CatalogueEntry { name: "plane", parameters: &["radius"], domain: "closed disc of radius `radius` (default 1)", oracle: true },
        CatalogueEntry {
            name: "stereographic_sphere",
            parameters: &["R", "radius"],
            domain: "closed disc of radius `radius` (default 1)",
            oracle: true,
        },
        CatalogueEntry { name: "clifford_torus", parameters: &[], domain: "[0, 2pi)^2, periodic", oracle: true },
        CatalogueEntry {
            name: "holomorphic_graph",
            parameters: &["radius"],
            domain: "closed disc of radius `radius` (default 1)",
            oracle: true,
        },
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticSurface {
    pub kind: SurfaceKind,
    pub domain: Domain,
}

fn number(params: &BTreeMap<String, String>, key: &str, default: f64) -> Result<f64, SurfaceError> {
    match params.get(key) {
        None => Ok(default),
        Some(s) => s.trim().parse::<f64>().map_err(|_| SurfaceError::BadParameter {
            name: key.to_string(),
            reason: format!("'{s}' is not a number"),
        }),
    }
}

fn positive(name: &str, value: f64) -> Result<f64, SurfaceError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(SurfaceError::BadParameter { name: name.to_string(), reason: format!("must be positive, got {value}") })
    }
}

/// Looks up a catalogue surface by name. Recognized keys: `R` (sphere radius),
/// `radius` (parameter disc radius), `phi` and `psi` (expressions, `custom_graph` only).
pub fn builtin_surface(name: &str, params: &BTreeMap<String, String>) -> Result<AnalyticSurface, SurfaceError> {
    let allowed: &[&str] = match name {
        "plane" | "holomorphic_graph" => &["radius"],
        "stereographic_sphere" => &["R", "radius"],
        "clifford_torus" => &[],
        "custom_graph" => &["phi", "psi", "radius"],
        _ => return Err(SurfaceError::UnknownSurface(name.to_string())),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(SurfaceError::BadParameter { name: k.clone(), reason: format!("not a parameter of {name}") });
    }
    let disc = || -> Result<Domain, SurfaceError> {
        Ok(Domain::Disc { radius: positive("radius", number(params, "radius", 1.0)?)? })
    };
    let (kind, domain) = match name {
        "plane" => (SurfaceKind::Plane, disc()?),
        "stereographic_sphere" => (SurfaceKind::StereographicSphere { r: positive("R", number(params, "R", 1.0)?)? }, disc()?),
        "clifford_torus" => (SurfaceKind::CliffordTorus, Domain::Periodic),
        "holomorphic_graph" => (SurfaceKind::HolomorphicGraph, disc()?),
        _ => {
            let expr = |key: &str| -> Result<Expr, SurfaceError> {
                let src = params.get(key).ok_or_else(|| SurfaceError::BadParameter {
                    name: key.to_string(),
                    reason: "custom_graph needs both phi and psi".into(),
                })?;
                Ok(parse_expression(src)?)
            };
            (SurfaceKind::CustomGraph { phi: expr("phi")?, psi: expr("psi")? }, disc()?)
        }
    };
    Ok(AnalyticSurface { kind, domain })
}

/// Jet of the graph `(x, y, φ, ψ)` given the scalar jets of `φ` and `ψ`.
pub fn graph_jet_from<T: Real>(x: T, y: T, phi: &ScalarJet2<T>, psi: &ScalarJet2<T>) -> SurfaceJet<T> {
    let (z, o) = (T::zero(), T::one());
    SurfaceJet {
        x: vec![x, y, phi.value, psi.value],
        xu: vec![o, z, phi.dx, psi.dx],
        xv: vec![z, o, phi.dy, psi.dy],
        xuu: vec![z, z, phi.dxx, psi.dxx],
        xuv: vec![z, z, phi.dxy, psi.dxy],
        xvv: vec![z, z, phi.dyy, psi.dyy],
    }
}

/// Jet of `(x, y, φ(x, y), ψ(x, y))` by second-order automatic differentiation.
pub fn graph_jet<T: Real>(phi: &Expr, psi: &Expr, x: T, y: T) -> Result<SurfaceJet<T>, ExprError> {
    let p = eval_jet(phi, x, y)?;
    let q = eval_jet(psi, x, y)?;
    Ok(graph_jet_from(x, y, &p, &q))
}

fn jet_from_components<T: Real>(c: &[ScalarJet2<T>]) -> SurfaceJet<T> {
    let pick = |f: fn(&ScalarJet2<T>) -> T| c.iter().map(f).collect::<Vec<T>>();
    SurfaceJet {
        x: pick(|j| j.value),
        xu: pick(|j| j.dx),
        xv: pick(|j| j.dy),
        xuu: pick(|j| j.dxx),
        xuv: pick(|j| j.dxy),
        xvv: pick(|j| j.dyy),
    }
}

impl AnalyticSurface {
    pub fn name(&self) -> &'static str {
        match self.kind {
            SurfaceKind::Plane => "plane",
            SurfaceKind::StereographicSphere { .. } => "stereographic_sphere",
            SurfaceKind::CliffordTorus => "clifford_torus",
            SurfaceKind::HolomorphicGraph => "holomorphic_graph",
            SurfaceKind::CustomGraph { .. } => "custom_graph",
        }
    }

    pub fn dim(&self) -> usize {
        4
    }

    pub fn is_graph(&self) -> bool {
        matches!(self.kind, SurfaceKind::Plane | SurfaceKind::HolomorphicGraph | SurfaceKind::CustomGraph { .. })
    }

    pub fn has_oracle(&self) -> bool {
        !matches!(self.kind, SurfaceKind::CustomGraph { .. })
    }

    /// Exact jet at `(u, v)`. Closed-form surfaces are evaluated anywhere their
    /// formula is defined; the domain only restricts finite-difference stencils.
    pub fn jet<T: Real>(&self, u: T, v: T) -> Result<SurfaceJet<T>, SurfaceError> {
        let ju = ScalarJet2::var_x(u);
        let jv = ScalarJet2::var_y(v);
        let c = |x: f64| ScalarJet2::constant(T::lit(x));
        let comps = match &self.kind {
            SurfaceKind::Plane => vec![ju, jv, c(0.0), c(0.0)],
            SurfaceKind::StereographicSphere { r } => {
                let rho2 = ju * ju + jv * jv;
                let scale = c(*r) / (c(1.0) + rho2);
                vec![scale * c(2.0) * ju, scale * c(2.0) * jv, scale * (rho2 - c(1.0)), c(0.0)]
            }
            SurfaceKind::CliffordTorus => {
                let s = c(std::f64::consts::FRAC_1_SQRT_2);
                vec![s * ju.cos(), s * ju.sin(), s * jv.cos(), s * jv.sin()]
            }
            SurfaceKind::HolomorphicGraph => vec![ju, jv, (ju * ju - jv * jv) * c(0.5), ju * jv],
            SurfaceKind::CustomGraph { phi, psi } => return Ok(graph_jet(phi, psi, u, v)?),
        };
        Ok(jet_from_components(&comps))
    }

    /// Position `X(u, v)` without derivatives.
    pub fn position<T: Real>(&self, u: T, v: T) -> Result<Vec<T>, SurfaceError> {
        match &self.kind {
            SurfaceKind::CustomGraph { phi, psi } => Ok(vec![u, v, eval_value(phi, u, v)?, eval_value(psi, u, v)?]),
            _ => Ok(self.jet(u, v)?.x),
        }
    }

    /// Position restricted to the parameter domain; `None` outside it or where
    /// the expression is undefined.
    pub fn position_in_domain(&self, u: f64, v: f64) -> Option<Vec<f64>> {
        if !self.domain.contains(u, v) {
            return None;
        }
        self.position(u, v).ok()
    }

    /// Closed-form orthonormal normal frame used by the curvature oracle.
    pub fn canonical_frame_vectors<S: Real>(&self, u: S, v: S) -> Option<Vec<Vec<S>>> {
        let (z, o) = (S::zero(), S::one());
        match self.kind {
            SurfaceKind::Plane => Some(vec![vec![z, z, o, z], vec![z, z, z, o]]),
            SurfaceKind::StereographicSphere { .. } => {
                // -X / r
                let d = o + u * u + v * v;
                let two = S::lit(2.0);
                Some(vec![vec![-two * u / d, -two * v / d, (o - u * u - v * v) / d, z], vec![z, z, z, o]])
            }
            SurfaceKind::CliffordTorus => {
                let s = S::FRAC_1_SQRT_2();
                let (cu, su, cv, sv) = (u.cos(), u.sin(), v.cos(), v.sin());
                Some(vec![vec![s * cu, s * su, s * cv, s * sv], vec![-s * cu, -s * su, s * cv, s * sv]])
            }
            SurfaceKind::HolomorphicGraph => {
                let s = (o + u * u + v * v).sqrt();
                Some(vec![vec![-u / s, v / s, o / s, z], vec![-v / s, -u / s, z, o / s]])
            }
            SurfaceKind::CustomGraph { .. } => None,
        }
    }

    /// Canonical frame with exact parameter derivatives (forward-mode duals).
    pub fn canonical_frame<T: Real>(&self, u: T, v: T) -> Option<Result<NormalFrame<T>, GeometryError>> {
        let vectors = self.canonical_frame_vectors(u, v)?;
        let du = self.canonical_frame_vectors(Dual::new(u, T::one()), Dual::constant(v))?;
        let dv = self.canonical_frame_vectors(Dual::constant(u), Dual::new(v, T::one()))?;
        let derivs = du
            .iter()
            .zip(&dv)
            .map(|(a, b)| [a.iter().map(|d| d.eps).collect(), b.iter().map(|d| d.eps).collect()])
            .collect();
        Some(NormalFrame::new(vectors).and_then(|f| f.with_derivatives(derivs)))
    }

    /// Expected `(H_Σ, K_Σ)` in the canonical frame.
    pub fn oracle(&self, u: f64, v: f64) -> Option<Vec<OracleCurvature>> {
        let oc = |h, k| OracleCurvature { h, k };
        match self.kind {
            SurfaceKind::Plane => Some(vec![oc(0.0, 0.0), oc(0.0, 0.0)]),
            SurfaceKind::StereographicSphere { r } => Some(vec![oc(1.0 / r, 1.0 / (r * r)), oc(0.0, 0.0)]),
            SurfaceKind::CliffordTorus => Some(vec![oc(-1.0, 1.0), oc(0.0, -1.0)]),
            SurfaceKind::HolomorphicGraph => {
                // Complex curve w -> (w, w^2/2): minimal, and every unit normal
                // sees K = -|f''|^2 / (1 + |f'|^2)^3.
                let k = -1.0 / (1.0 + u * u + v * v).powi(3);
                Some(vec![oc(0.0, k), oc(0.0, k)])
            }
            SurfaceKind::CustomGraph { .. } => None,
        }
    }

    /// Finite-difference jet from positions restricted to the domain.
    pub fn finite_difference_jet(&self, u: f64, v: f64, step: f64, richardson: bool) -> Result<SurfaceJet<f64>, SurfaceError> {
        finite_difference_jet(|a, b| self.position_in_domain(a, b), u, v, step, richardson)
    }
}

struct Stencil<F> {
    eval: F,
    u: f64,
    v: f64,
}

impl<F: Fn(f64, f64) -> Option<Vec<f64>>> Stencil<F> {
    fn at(&self, du: f64, dv: f64) -> Result<Vec<f64>, SurfaceError> {
        let (u, v) = (self.u + du, self.v + dv);
        (self.eval)(u, v).ok_or(SurfaceError::StencilOutOfDomain { u, v })
    }

    /// Central differences with step `h`: `[xu, xv, xuu, xuv, xvv]`.
    fn central(&self, x0: &[f64], h: f64) -> Result<[Vec<f64>; 5], SurfaceError> {
        let (e, w, n, s) = (self.at(h, 0.0)?, self.at(-h, 0.0)?, self.at(0.0, h)?, self.at(0.0, -h)?);
        let (ne, nw, se, sw) = (self.at(h, h)?, self.at(-h, h)?, self.at(h, -h)?, self.at(-h, -h)?);
        let m = x0.len();
        let mut out: [Vec<f64>; 5] = Default::default();
        for o in out.iter_mut() {
            o.resize(m, 0.0);
        }
        for k in 0..m {
            out[0][k] = (e[k] - w[k]) / (2.0 * h);
            out[1][k] = (n[k] - s[k]) / (2.0 * h);
            out[2][k] = (e[k] - 2.0 * x0[k] + w[k]) / (h * h);
            out[3][k] = (ne[k] - nw[k] - se[k] + sw[k]) / (4.0 * h * h);
            out[4][k] = (n[k] - 2.0 * x0[k] + s[k]) / (h * h);
        }
        Ok(out)
    }
}

/// Second-order jet of a black-box evaluator by central differences with
/// spacing `step` (`O(step^2)`), optionally Richardson-extrapolated against
/// spacing `2 step` (`O(step^4)`, 5x5 stencil). The evaluator returns `None`
/// outside its domain.
pub fn finite_difference_jet<F>(eval: F, u: f64, v: f64, step: f64, richardson: bool) -> Result<SurfaceJet<f64>, SurfaceError>
where
    F: Fn(f64, f64) -> Option<Vec<f64>>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(SurfaceError::BadStep(step));
    }
    let st = Stencil { eval, u, v };
    let x0 = st.at(0.0, 0.0)?;
    let fine = st.central(&x0, step)?;
    let d = if richardson {
        let coarse = st.central(&x0, 2.0 * step)?;
        let mut out = fine.clone();
        for (o, c) in out.iter_mut().zip(&coarse) {
            let diff = sub(o, c);
            for (oi, di) in o.iter_mut().zip(diff) {
                *oi += di / 3.0;
            }
        }
        out
    } else {
        fine
    };
    let [xu, xv, xuu, xuv, xvv] = d;
    Ok(SurfaceJet::new(x0, xu, xv, xuu, xuv, xvv)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        curvature_data, first_fundamental_form, gauss_curvature, mean_curvature, second_fundamental_form,
    };
    use approx::assert_abs_diff_eq;

    fn params(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn builtin(name: &str) -> AnalyticSurface {
        builtin_surface(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn graph_jet_examples() {
        let zero = parse_expression("0").unwrap();
        let j: SurfaceJet<f64> = graph_jet(&zero, &zero, 0.3, 0.7).unwrap();
        assert_eq!(first_fundamental_form(&j).unwrap().w, 1.0);

        let phi = parse_expression("(x^2-y^2)/2").unwrap();
        let psi = parse_expression("x*y").unwrap();
        let j: SurfaceJet<f64> = graph_jet(&phi, &psi, 0.0, 0.0).unwrap();
        assert_eq!(j.xu, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(j.xv, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(j.xuu, vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(j.xvv, vec![0.0, 0.0, -1.0, 0.0]);
        assert_eq!(j.xuv, vec![0.0, 0.0, 0.0, 1.0]);
        let f = first_fundamental_form(&graph_jet(&phi, &psi, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((f.h11, f.h12, f.h22), (3.0, 0.0, 3.0));
    }

    #[test]
    fn custom_graph_matches_builtin_holomorphic_graph() {
        let custom = builtin_surface("custom_graph", &params(&[("phi", "(x^2-y^2)/2"), ("psi", "x*y")])).unwrap();
        let builtin = builtin("holomorphic_graph");
        for (u, v) in [(0.1, -0.4), (0.9, 0.2), (-0.5, -0.5)] {
            assert_eq!(custom.jet(u, v).unwrap(), builtin.jet(u, v).unwrap());
        }
    }

    #[test]
    fn builtin_oracles() {
        let plane = builtin("plane");
        assert!(plane.oracle(0.2, 0.1).unwrap().iter().all(|o| o.h == 0.0 && o.k == 0.0));
        let torus = builtin("clifford_torus").oracle(0.0, 0.0).unwrap();
        assert_eq!((torus[0].h, torus[1].h, torus[0].k, torus[1].k), (-1.0, 0.0, 1.0, -1.0));
        let sphere = builtin_surface("stereographic_sphere", &params(&[("R", "2")])).unwrap().oracle(0.3, 0.3).unwrap();
        assert_eq!((sphere[0].h, sphere[0].k, sphere[1].h, sphere[1].k), (0.5, 0.25, 0.0, 0.0));
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(builtin_surface("torus", &BTreeMap::new()), Err(SurfaceError::UnknownSurface(_))));
        assert!(matches!(
            builtin_surface("stereographic_sphere", &params(&[("R", "0")])),
            Err(SurfaceError::BadParameter { .. })
        ));
        assert!(matches!(
            builtin_surface("stereographic_sphere", &params(&[("R", "-1")])),
            Err(SurfaceError::BadParameter { .. })
        ));
        assert!(matches!(builtin_surface("plane", &params(&[("R", "2")])), Err(SurfaceError::BadParameter { .. })));
        assert!(matches!(
            builtin_surface("custom_graph", &params(&[("phi", "x")])),
            Err(SurfaceError::BadParameter { .. })
        ));
        assert!(matches!(
            builtin_surface("custom_graph", &params(&[("phi", "x +"), ("psi", "y")])),
            Err(SurfaceError::Expr(_))
        ));
    }

    #[test]
    fn oracles_are_reproduced_from_the_surfaces_own_jets() {
        let surfaces = [
            builtin("plane"),
            builtin_surface("stereographic_sphere", &params(&[("R", "2")])).unwrap(),
            builtin("clifford_torus"),
            builtin("holomorphic_graph"),
        ];
        for s in &surfaces {
            for (u, v) in [(0.0, 0.0), (0.31, -0.52), (-0.7, 0.6), (0.05, 0.9)] {
                let jet = s.jet(u, v).unwrap();
                let frame = s.canonical_frame(u, v).unwrap().unwrap();
                let form = first_fundamental_form(&jet).unwrap();
                let l = second_fundamental_form(&jet, &frame).unwrap();
                let h = mean_curvature(&l, &form);
                let k = gauss_curvature(&l, &form);
                for (sigma, o) in s.oracle(u, v).unwrap().iter().enumerate() {
                    assert_abs_diff_eq!(h[sigma], o.h, epsilon = 1e-10);
                    assert_abs_diff_eq!(k[sigma], o.k, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn holomorphic_graph_at_origin() {
        let s = builtin("holomorphic_graph");
        let jet = s.jet(0.0, 0.0).unwrap();
        let frame = s.canonical_frame(0.0, 0.0).unwrap().unwrap();
        let c = curvature_data(&second_fundamental_form(&jet, &frame).unwrap(), &first_fundamental_form(&jet).unwrap());
        assert_eq!((c[0].h, c[1].h, c[0].k, c[1].k), (0.0, 0.0, -1.0, -1.0));
    }

    #[test]
    fn canonical_frame_derivatives_match_central_differences() {
        for s in [builtin("clifford_torus"), builtin("holomorphic_graph"), builtin("stereographic_sphere")] {
            let (u, v, h) = (0.3, -0.2, 1e-6);
            let frame = s.canonical_frame(u, v).unwrap().unwrap();
            let plus_u = s.canonical_frame_vectors(u + h, v).unwrap();
            let minus_u = s.canonical_frame_vectors(u - h, v).unwrap();
            let plus_v = s.canonical_frame_vectors(u, v + h).unwrap();
            let minus_v = s.canonical_frame_vectors(u, v - h).unwrap();
            for sigma in 0..2 {
                for k in 0..4 {
                    let du = (plus_u[sigma][k] - minus_u[sigma][k]) / (2.0 * h);
                    let dv = (plus_v[sigma][k] - minus_v[sigma][k]) / (2.0 * h);
                    assert_abs_diff_eq!(frame.derivatives().unwrap()[sigma][0][k], du, epsilon = 1e-8);
                    assert_abs_diff_eq!(frame.derivatives().unwrap()[sigma][1][k], dv, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn finite_difference_jet_of_plane_is_exact() {
        let plane = builtin("plane");
        for richardson in [false, true] {
            let j = plane.finite_difference_jet(0.25, -0.5, 0.125, richardson).unwrap();
            assert_eq!(j, plane.jet(0.25, -0.5).unwrap());
        }
    }

    #[test]
    fn finite_difference_jet_of_clifford_torus() {
        let torus = builtin("clifford_torus");
        let fd = torus.finite_difference_jet(0.2, 0.3, 1e-3, true).unwrap();
        let exact = torus.jet(0.2, 0.3).unwrap();
        let worst = [
            (&fd.xu, &exact.xu),
            (&fd.xv, &exact.xv),
            (&fd.xuu, &exact.xuu),
            (&fd.xuv, &exact.xuv),
            (&fd.xvv, &exact.xvv),
        ]
        .iter()
        .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);
        assert!(worst <= 1e-10, "max jet error {worst:e}");
    }

    #[test]
    fn finite_difference_jet_respects_the_domain() {
        let sphere = builtin("stereographic_sphere");
        assert!(matches!(
            sphere.finite_difference_jet(0.99, 0.0, 0.05, true),
            Err(SurfaceError::StencilOutOfDomain { .. })
        ));
        assert!(sphere.finite_difference_jet(0.5, 0.0, 0.05, true).is_ok());
        assert!(matches!(sphere.finite_difference_jet(0.0, 0.0, 0.0, true), Err(SurfaceError::BadStep(_))));
    }
}
