mod common;

use common::surface;
use immersion::frames::{orthonormalize, projection_frame, surface_frame, FrameDerivatives, FrameSource};
use immersion::{torsion_coefficients, FrameError, FrameKind, FrameRecipe};
use proptest::prelude::*;

/// `(a1 sin x + b1 cos y, a2 cos x + b2 sin y)` with `a_k^2 + b_k^2 <= 1`, so
/// both gradients are bounded by one everywhere.
fn bounded_graph() -> impl Strategy<Value = (String, String)> {
    let coeffs = (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| (r * t.cos(), r * t.sin()));
    (coeffs.clone(), coeffs).prop_map(|((a1, b1), (a2, b2))| {
        (format!("{a1}*sin(x) + {b1}*cos(y)"), format!("{a2}*cos(x) + {b2}*sin(y)"))
    })
}

fn disc_point() -> impl Strategy<Value = (f64, f64)> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| (r.sqrt() * t.cos(), r.sqrt() * t.sin()))
}

fn projector(vectors: &[Vec<f64>]) -> Vec<f64> {
    // A (A^T A)^{-1} A^T for a pair of columns.
    let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (a, b) = (&vectors[0], &vectors[1]);
    let (g11, g12, g22) = (d(a, a), d(a, b), d(b, b));
    let det = g11 * g22 - g12 * g12;
    let (i11, i12, i22) = (g22 / det, -g12 / det, g11 / det);
    let n = a.len();
    let mut p = vec![0.0; n * n];
    for r in 0..n {
        for c in 0..n {
            p[r * n + c] = a[r] * (i11 * a[c] + i12 * b[c]) + b[r] * (i12 * a[c] + i22 * b[c]);
        }
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gentle_graphs_never_trip_the_norm_threshold((phi, psi) in bounded_graph(), (u, v) in disc_point()) {
        let s = surface("custom_graph", &[("phi", &phi), ("psi", &psi)]);
        let jet = s.jet(u, v).unwrap();
        let recipe = FrameRecipe::new(FrameKind::ProjectionOrthonormalized);
        match recipe.build(&jet) {
            Err(FrameError::NormBelowThreshold { .. }) => prop_assert!(false, "norm threshold at ({u}, {v})"),
            _ => {}
        }
        let raw = projection_frame(&jet, &[vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]], false).unwrap();
        for n in &raw {
            prop_assert!(n.iter().map(|x| x * x).sum::<f64>() >= 0.5 - 1e-15);
        }
    }

    #[test]
    fn orthonormalization_keeps_the_plane((phi, psi) in bounded_graph(), (u, v) in disc_point()) {
        let s = surface("custom_graph", &[("phi", &phi), ("psi", &psi)]);
        let jet = s.jet(u, v).unwrap();
        let raw = projection_frame(&jet, &[vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]], false).unwrap();
        if let Ok(frame) = orthonormalize(&raw, 0.5, 0.5) {
            let (p, q) = (projector(&raw), projector(frame.vectors()));
            let frob = p.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(frob <= 1e-8);
        }
    }

    #[test]
    fn finite_difference_torsion_is_antisymmetric((phi, psi) in bounded_graph(), (u, v) in disc_point()) {
        let s = surface("custom_graph", &[("phi", &phi), ("psi", &psi)]);
        for kind in [FrameKind::GraphNormals, FrameKind::Projection] {
            let source = FrameSource::Recipe(FrameRecipe::new(kind));
            let frame = surface_frame(&s, &source, u, v, FrameDerivatives::FiniteDifference(1e-4)).unwrap();
            let t = torsion_coefficients(&frame).unwrap();
            for i in 0..2 {
                prop_assert!((t.sigma[0][1][i] + t.sigma[1][0][i]).abs() <= 1e-7);
            }
        }
    }
}

#[test]
fn torus_needs_non_default_anchors() {
    let s = surface("clifford_torus", &[]);
    let jet = s.jet(0.4f64, 1.3).unwrap();
    let default = FrameRecipe::new(FrameKind::ProjectionOrthonormalized);
    // e3 loses all but cos^2(v) of its length to the tangent plane.
    match default.build(&jet) {
        Err(FrameError::NormBelowThreshold { index: 0, norm_sq, .. }) => assert!((norm_sq - 1.3f64.cos().powi(2)).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    let recipe = FrameRecipe::new(FrameKind::Projection).with_axis_anchors(4, &[1, 3]).unwrap();
    let frame = recipe.build(&jet).unwrap();
    assert_eq!(frame.len(), 2);
}
