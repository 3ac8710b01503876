//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use immersion::estimates::{estimate_report, osserman_angle, osserman_inequality_margin, EstimateOptions, SampleOptions};
use immersion::expr::{BinaryOp, UnaryOp, Var};
use immersion::frames::{orthonormalize, surface_frame, FrameDerivatives, FrameSource};
use immersion::geometry::mean_curvature_from_laplacian;
use immersion::solver::{mean_curvature_iterate, BoundaryData};
use immersion::{
    builtin_surface, christoffel, conformality_defect, curvature_data, eval_jet, eval_value, finite_difference_jet,
    first_fundamental_form, gauss_equation_residual, second_fundamental_form, torsion_coefficients,
    weingarten_residual, AnalyticSurface, DiscGrid, Expr, FrameError, GridSample, Prescription, SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn surface(name: &str, params: &[(&str, &str)]) -> AnalyticSurface {
    let map: BTreeMap<String, String> = params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    builtin_surface(name, &map).unwrap()
}

fn catalogue() -> Vec<AnalyticSurface> {
    vec![
        surface("plane", &[]),
        surface("stereographic_sphere", &[("R", "2")]),
        surface("clifford_torus", &[]),
        surface("holomorphic_graph", &[]),
    ]
}

fn random_point(s: &AnalyticSurface, rng: &mut ChaCha8Rng) -> (f64, f64) {
    if s.name() == "clifford_torus" {
        return (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
    }
    let r = if s.name() == "stereographic_sphere" { 2.0 } else { 1.0 };
    let (rad, t) = (r * rng.gen_range(0.0f64..1.0).sqrt(), rng.gen_range(0.0..TAU));
    (rad * t.cos(), rad * t.sin())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn grid(s: &AnalyticSurface, resolution: usize) -> GridSample<f64> {
    let opts = SampleOptions { resolution, radius: 1.0, frame: FrameSource::Canonical, derivatives: FrameDerivatives::None };
    GridSample::from_surface(s, &opts).unwrap()
}

fn identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for s in catalogue() {
        for _ in 0..100 {
            let (u, v) = random_point(&s, &mut rng);
            let jet = s.jet(u, v).unwrap();
            let frame = s.canonical_frame::<f64>(u, v).unwrap().unwrap();
            let form = first_fundamental_form(&jet).unwrap();
            for c in curvature_data(&second_fundamental_form(&jet, &frame).unwrap(), &form) {
                worst = worst
                    .max(rel(c.kappa1 * c.kappa1 + c.kappa2 * c.kappa2, 4.0 * c.h * c.h - 2.0 * c.k))
                    .max(rel(0.5 * (c.kappa1 + c.kappa2), c.h))
                    .max(rel(c.kappa1 * c.kappa2, c.k));
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-10 && elapsed < Duration::from_secs(1),
        detail: format!("max relative defect {worst:.2e}, {elapsed:.2?}"),
    }
}

fn structure_equations() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut gauss, mut weingarten) = (0.0f64, 0.0f64);
    for s in catalogue() {
        for _ in 0..100 {
            let (u, v) = random_point(&s, &mut rng);
            let jet = s.jet(u, v).unwrap();
            let frame = surface_frame(&s, &FrameSource::Canonical, u, v, FrameDerivatives::FiniteDifference(1e-4)).unwrap();
            let l = second_fundamental_form(&jet, &frame).unwrap();
            gauss = gauss.max(gauss_equation_residual(&jet, &frame, &l, &christoffel(&jet).unwrap()).unwrap());
            let torsion = torsion_coefficients(&frame).unwrap();
            weingarten = weingarten.max(weingarten_residual(&jet, &frame, &l, &torsion).unwrap());
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: gauss <= 1e-10 && weingarten <= 1e-6 && elapsed < Duration::from_secs(5),
        detail: format!("gauss {gauss:.2e}, weingarten {weingarten:.2e}, {elapsed:.2?}"),
    }
}

fn oracles() -> Outcome {
    let cases: [(&str, &[(&str, &str)], (f64, f64), [f64; 4]); 5] = [
        ("clifford_torus", &[], (0.3, 2.1), [-1.0, 0.0, 1.0, -1.0]),
        ("clifford_torus", &[], (4.0, 5.5), [-1.0, 0.0, 1.0, -1.0]),
        ("stereographic_sphere", &[("R", "2")], (0.0, 0.0), [0.5, 0.0, 0.25, 0.0]),
        ("stereographic_sphere", &[("R", "2")], (0.7, -1.2), [0.5, 0.0, 0.25, 0.0]),
        ("holomorphic_graph", &[], (0.0, 0.0), [0.0, 0.0, -1.0, -1.0]),
    ];
    let mut worst = 0.0f64;
    for (name, params, (u, v), want) in cases {
        let s = surface(name, params);
        let jet = s.jet(u, v).unwrap();
        let frame = s.canonical_frame::<f64>(u, v).unwrap().unwrap();
        let c = curvature_data(&second_fundamental_form(&jet, &frame).unwrap(), &first_fundamental_form(&jet).unwrap());
        let got = [c[0].h, c[1].h, c[0].k, c[1].k];
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((g - w).abs());
        }
    }
    Outcome { pass: worst <= 1e-10, detail: format!("max deviation {worst:.2e}") }
}

fn laplacian_reading() -> Outcome {
    let (mut worst, mut points) = (0.0f64, 0);
    for s in catalogue() {
        for p in grid(&s, 33).nodes {
            let (a, b) = conformality_defect(&p.report.first);
            if a.max(b) > 1e-8 {
                continue;
            }
            points += 1;
            let lap = mean_curvature_from_laplacian(&p.jet, &p.frame, 1e-8).unwrap();
            for (c, l) in p.report.curvature.iter().zip(lap) {
                worst = worst.max(rel(c.h, l));
            }
        }
    }
    Outcome { pass: worst <= 1e-8 && points > 0, detail: format!("{points} conformal points, max relative gap {worst:.2e}") }
}

fn osserman() -> Outcome {
    let axes = [[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.5, 0.5, 0.5, 0.5]];
    let (mut worst, mut points) = (f64::INFINITY, 0);
    for s in catalogue() {
        let g = grid(&s, 33);
        for axis in &axes {
            let omega = osserman_angle(&g, axis).unwrap();
            let m = osserman_inequality_margin(&g, axis, omega).unwrap();
            points += m.conformal_points;
            worst = worst.min(m.margin.unwrap_or(f64::INFINITY));
        }
    }
    Outcome { pass: worst >= -1e-10 && points > 0, detail: format!("min margin {worst:.2e} over {points} point checks") }
}

fn estimates() -> Outcome {
    let opts = EstimateOptions::default();
    let plane = estimate_report(&grid(&surface("plane", &[]), 129), &opts).unwrap();
    let holo = estimate_report(&grid(&surface("holomorphic_graph", &[]), 129), &opts).unwrap();
    let checks = [
        (plane.dirichlet_energy - 2.0 * PI).abs() <= 0.01 * 2.0 * PI,
        (plane.geodesic_radius - 1.0).abs() <= 0.02,
        plane.omega == FRAC_PI_2,
        plane.theta_emp.iter().all(|&t| t == 0.0),
        (holo.dirichlet_energy - 3.0 * PI).abs() <= 0.01 * 3.0 * PI,
    ];
    Outcome {
        pass: checks.iter().all(|&c| c),
        detail: format!(
            "plane D/2pi {:.6}, r {:.6}, omega-pi/2 {:.1e}, theta {:?}; holomorphic D/3pi {:.6}",
            plane.dirichlet_energy / (2.0 * PI),
            plane.geodesic_radius,
            plane.omega - FRAC_PI_2,
            plane.theta_emp,
            holo.dirichlet_energy / (3.0 * PI)
        ),
    }
}

fn pde_solver() -> Outcome {
    let start = Instant::now();
    let cfg = SolverConfig::default();
    let zero = Prescription::zero();
    // Graph of w^4: harmonic in every component, not reproduced exactly by the stencil.
    let quartic = |t: f64| [t.cos(), t.sin(), (4.0 * t).cos(), (4.0 * t).sin()];
    let error = |h: f64| {
        let g = DiscGrid::new(h).unwrap();
        let out = mean_curvature_iterate::<f64>(&g, &zero, &quartic, &cfg).unwrap();
        g.nodes
            .iter()
            .zip(&out.field)
            .map(|(p, x)| {
                let (r2, t) = (p.u * p.u + p.v * p.v, p.v.atan2(p.u));
                let (re, im) = (r2 * r2 * (4.0 * t).cos(), r2 * r2 * (4.0 * t).sin());
                (x[2] - re).abs().max((x[3] - im).abs())
            })
            .fold(0.0f64, f64::max)
    };
    let (coarse, fine) = (error(1.0 / 32.0), error(1.0 / 64.0));
    let ratio = coarse / fine;

    let g = DiscGrid::new(1.0 / 64.0).unwrap();
    let holo = |t: f64| BoundaryData::HolomorphicGraph.eval(t);
    let minimal = mean_curvature_iterate::<f64>(&g, &zero, &holo, &cfg).unwrap().report;
    let k_err = minimal.center.k.iter().map(|k| (k + 1.0).abs()).fold(0.0f64, f64::max);

    let g = DiscGrid::new(1.0 / 32.0).unwrap();
    let plane = BoundaryData::Affine([0.4, -0.3, 0.2, 0.1, 0.5, -0.6]);
    let flat = mean_curvature_iterate::<f64>(&g, &zero, &|t| plane.eval(t), &cfg).unwrap().report;
    let c = &flat.center;
    let flat_max = c.h.iter().chain(&c.k).chain(&c.kappa1).chain(&c.kappa2).fold(0.0f64, |m, x| m.max(x.abs()));
    let elapsed = start.elapsed();
    Outcome {
        pass: (3.5..=4.5).contains(&ratio)
            && minimal.converged
            && k_err <= 2e-2
            && flat.converged
            && flat_max <= 1e-8
            && elapsed < Duration::from_secs(60),
        detail: format!(
            "refinement ratio {ratio:.3} ({coarse:.2e} -> {fine:.2e}), center K error {k_err:.2e}, affine curvature {flat_max:.1e}, {elapsed:.2?}"
        ),
    }
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Expr::Var(Var::X),
            1 => Expr::Var(Var::Y),
            _ => Expr::Const((rng.gen_range(-2.0f64..2.0) * 100.0).round() / 100.0),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, depth - 1);
    let positive = |e: Expr| Expr::binary(BinaryOp::Add, Expr::Const(1.5), Expr::binary(BinaryOp::Mul, e.clone(), e));
    match rng.gen_range(0..12) {
        0 => Expr::binary(BinaryOp::Add, sub(rng), sub(rng)),
        1 => Expr::binary(BinaryOp::Sub, sub(rng), sub(rng)),
        2 => Expr::binary(BinaryOp::Mul, sub(rng), sub(rng)),
        3 => Expr::binary(BinaryOp::Div, sub(rng), positive(sub(rng))),
        4 => Expr::binary(BinaryOp::Pow, sub(rng), Expr::Const(3.0)),
        5 => Expr::unary(UnaryOp::Sin, sub(rng)),
        6 => Expr::unary(UnaryOp::Cos, sub(rng)),
        7 => Expr::unary(UnaryOp::Atan, sub(rng)),
        8 => Expr::unary(UnaryOp::Exp, Expr::unary(UnaryOp::Tanh, sub(rng))),
        9 => Expr::unary(UnaryOp::Log, positive(sub(rng))),
        10 => Expr::unary(UnaryOp::Sqrt, positive(sub(rng))),
        _ => Expr::unary(UnaryOp::Cosh, Expr::unary(UnaryOp::Sin, sub(rng))),
    }
}

fn ad_versus_fd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let e = random_expr(&mut rng, 4);
        let (x, y) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let ad = eval_jet(&e, x, y).unwrap();
        let fd = finite_difference_jet(|u, v| eval_value(&e, u, v).ok().map(|f| vec![f, 0.0, 0.0]), x, y, 1e-4, false).unwrap();
        let pairs = [(ad.dx, fd.xu[0]), (ad.dy, fd.xv[0]), (ad.dxx, fd.xuu[0]), (ad.dxy, fd.xuv[0]), (ad.dyy, fd.xvv[0])];
        for (a, f) in pairs {
            worst = worst.max((a - f).abs() / (1.0 + a.abs()));
        }
    }
    Outcome { pass: worst <= 1e-6, detail: format!("max scaled gap {worst:.2e}") }
}

fn frame_thresholds() -> Outcome {
    let nudge = 2f64.powi(-30);
    let e3 = vec![0.0, 0.0, 1.0, 0.0];
    // |N*_1|^2 = 1/2 exactly, then just below.
    let at_norm = orthonormalize(&[vec![0.5, 0.5, 0.0, 0.0], e3.clone()], 0.5, 0.5);
    let below_norm = orthonormalize(&[vec![0.5, 0.5 - nudge, 0.0, 0.0], e3], 0.5, 0.5);
    // Normalized cosine 1/2 exactly, then just above and just below.
    let e1 = vec![1.0, 0.0, 0.0, 0.0];
    let at_angle = orthonormalize(&[e1.clone(), vec![1.0, 1.0, 1.0, 1.0]], 0.5, 0.5);
    let above_angle = orthonormalize(&[e1.clone(), vec![1.0 + 1e-6, 1.0, 1.0, 1.0]], 0.5, 0.5);
    let under_angle = orthonormalize(&[e1, vec![1.0 - 1e-6, 1.0, 1.0, 1.0]], 0.5, 0.5);
    let checks = [
        at_norm.is_ok(),
        matches!(below_norm, Err(FrameError::NormBelowThreshold { index: 0, .. })),
        at_angle.is_ok(),
        matches!(above_angle, Err(FrameError::AngleThreshold { first: 0, second: 1, .. })),
        under_angle.is_ok(),
    ];
    Outcome {
        pass: checks.iter().all(|&c| c),
        detail: format!("boundary cases {:?}", checks.map(|c| if c { "ok" } else { "wrong" })),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("curvature identities", identities),
        ("structure equations", structure_equations),
        ("oracle equivalence", oracles),
        ("laplacian mean curvature", laplacian_reading),
        ("osserman monitor", osserman),
        ("estimate quantities", estimates),
        ("pde solver", pde_solver),
        ("ad versus fd", ad_versus_fd),
        ("frame thresholds", frame_thresholds),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        failed += usize::from(!out.pass);
        println!("criterion {} {name}: {} ({})", k + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
