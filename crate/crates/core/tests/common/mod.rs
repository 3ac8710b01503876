#![allow(dead_code)]

use std::collections::BTreeMap;

use immersion::{builtin_surface, AnalyticSurface};
use rand::Rng;

pub fn surface(name: &str, params: &[(&str, &str)]) -> AnalyticSurface {
    let map: BTreeMap<String, String> = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    builtin_surface(name, &map).unwrap()
}

/// The four closed-form catalogue entries, the sphere with radius 2.
pub fn catalogue() -> Vec<AnalyticSurface> {
    vec![
        surface("plane", &[]),
        surface("stereographic_sphere", &[("R", "2")]),
        surface("clifford_torus", &[]),
        surface("holomorphic_graph", &[]),
    ]
}

/// A point of the surface's natural sampling region: the unit disc, the
/// radius-2 parameter disc for the sphere, the square `[0, 2π)^2` for the torus.
pub fn random_point(s: &AnalyticSurface, rng: &mut impl Rng) -> (f64, f64) {
    match s.name() {
        "clifford_torus" => (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::TAU)),
        name => {
            let r = if name == "stereographic_sphere" { 2.0 } else { 1.0 };
            loop {
                let (u, v) = (rng.gen_range(-r..r), rng.gen_range(-r..r));
                if u * u + v * v <= r * r {
                    return (u, v);
                }
            }
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

/// Rotates an orthonormal pair by `angle` inside its plane.
pub fn rotate(vectors: &[Vec<f64>], angle: f64) -> Vec<Vec<f64>> {
    let (c, s) = (angle.cos(), angle.sin());
    let (a, b) = (&vectors[0], &vectors[1]);
    vec![
        a.iter().zip(b).map(|(x, y)| c * x + s * y).collect(),
        a.iter().zip(b).map(|(x, y)| -s * x + c * y).collect(),
    ]
}
