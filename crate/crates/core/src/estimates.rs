//! Grid-sampled monitors for the hypotheses of the curvature estimate:
//! Osserman angle and interpolation margin, Dirichlet energy, geodesic
//! radius, area-element extrema, a Harnack-type ratio and the empirical
//! curvature constant.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::frames::{surface_frame, FrameDerivatives, FrameError, FrameSource};
use crate::geometry::{analyze_point, CurvatureReport, NormalFrame, SurfaceJet, EPS_CONFORMAL};
use crate::linalg::{dot, norm_sq};
use crate::scalar::Real;
use crate::surface::AnalyticSurface;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("the grid has no valid points")]
    EmptyGrid,
    #[error("grid resolution must be odd and at least 9, got {0}")]
    BadResolution(usize),
    #[error("domain radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("{name} must lie in {range}, got {value}")]
    BadArgument { name: &'static str, range: &'static str, value: f64 },
    #[error("the center (0, 0) is not a valid grid point")]
    CenterMissing,
    #[error("the boundary circle is not reachable from the center")]
    DisconnectedMask,
    #[error("at (u, v) = ({u}, {v}): {source}")]
    Point {
        u: f64,
        v: f64,
        #[source]
        source: FrameError,
    },
}

/// One valid grid node with its jet, frame and curvature report.
#[derive(Clone, Debug)]
pub struct GridNode<T> {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub jet: SurfaceJet<T>,
    pub frame: NormalFrame<T>,
    pub report: CurvatureReport<T>,
}

/// Square lattice of spacing `2 radius / (resolution - 1)` centred at the
/// origin; nodes in the closed disc of the given radius are sampled.
#[derive(Clone, Debug)]
pub struct GridSample<T> {
    pub resolution: usize,
    pub radius: f64,
    pub spacing: f64,
    pub nodes: Vec<GridNode<T>>,
    lookup: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleOptions {
    pub resolution: usize,
    pub radius: f64,
    pub frame: FrameSource,
    pub derivatives: FrameDerivatives,
}

fn check_layout(resolution: usize, radius: f64) -> Result<f64, EstimateError> {
    if resolution < 9 || resolution.is_multiple_of(2) {
        return Err(EstimateError::BadResolution(resolution));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(EstimateError::BadRadius(radius));
    }
    Ok(2.0 * radius / (resolution - 1) as f64)
}

impl<T: Real> GridSample<T> {
    /// Parameter coordinates of lattice node `(i, j)`.
    pub fn coords(resolution: usize, spacing: f64, i: usize, j: usize) -> (f64, f64) {
        let c = ((resolution - 1) / 2) as f64;
        ((i as f64 - c) * spacing, (j as f64 - c) * spacing)
    }

    fn inside(radius: f64, u: f64, v: f64) -> bool {
        u * u + v * v <= radius * radius * (1.0 + 1e-12)
    }

    /// Samples a catalogue surface. Any failure at a node is returned with
    /// its coordinates; nothing is skipped silently.
    pub fn from_surface(surface: &AnalyticSurface, opts: &SampleOptions) -> Result<Self, EstimateError> {
        let spacing = check_layout(opts.resolution, opts.radius)?;
        let n = opts.resolution;
        let mut nodes = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let (u, v) = Self::coords(n, spacing, i, j);
                if !Self::inside(opts.radius, u, v) {
                    continue;
                }
                let at = |source: FrameError| EstimateError::Point { u, v, source };
                let (tu, tv) = (T::lit(u), T::lit(v));
                let jet = surface.jet(tu, tv).map_err(|e| at(e.into()))?;
                let frame = surface_frame(surface, &opts.frame, tu, tv, opts.derivatives).map_err(at)?;
                let report = analyze_point(&jet, &frame).map_err(|e| at(e.into()))?;
                nodes.push(GridNode { i, j, u, v, jet, frame, report });
            }
        }
        Self::from_nodes(n, opts.radius, nodes)
    }

    /// Assembles a sample from precomputed nodes (positions must match the lattice).
    pub fn from_nodes(resolution: usize, radius: f64, nodes: Vec<GridNode<T>>) -> Result<Self, EstimateError> {
        let spacing = check_layout(resolution, radius)?;
        let mut lookup = vec![None; resolution * resolution];
        for (k, node) in nodes.iter().enumerate() {
            lookup[node.j * resolution + node.i] = Some(k);
        }
        Ok(Self { resolution, radius, spacing, nodes, lookup })
    }

    pub fn node(&self, i: isize, j: isize) -> Option<&GridNode<T>> {
        let n = self.resolution as isize;
        if i < 0 || j < 0 || i >= n || j >= n {
            return None;
        }
        self.lookup[(j * n + i) as usize].map(|k| &self.nodes[k])
    }

    pub fn center(&self) -> Option<&GridNode<T>> {
        let c = ((self.resolution - 1) / 2) as isize;
        self.node(c, c)
    }

    fn nonempty(&self) -> Result<(), EstimateError> {
        if self.nodes.is_empty() {
            Err(EstimateError::EmptyGrid)
        } else {
            Ok(())
        }
    }
}

fn is_conformal<T: Real>(report: &CurvatureReport<T>) -> bool {
    let (a, b) = report.conformality;
    a.max(b) <= T::lit(EPS_CONFORMAL)
}

/// Smallest angle between `axis` and any unit normal at one point:
/// `arccos |P_N axis|` with `P_N` the projector onto the normal plane.
pub fn osserman_angle_at<T: Real>(frame: &NormalFrame<T>, axis: &[T]) -> T {
    let proj = frame.vectors().iter().fold(T::zero(), |acc, n| {
        let c = dot(axis, n);
        acc + c * c
    });
    proj.sqrt().min(T::one()).acos()
}

/// Minimum of [`osserman_angle_at`] over the grid.
pub fn osserman_angle<T: Real>(grid: &GridSample<T>, axis: &[T]) -> Result<T, EstimateError> {
    grid.nonempty()?;
    let len = norm_sq(axis).sqrt();
    if !((len - T::one()).abs() <= T::lit(1e-12)) {
        return Err(EstimateError::BadArgument { name: "axis length", range: "{1}", value: len.to_f64_lossy() });
    }
    Ok(grid.nodes.iter().map(|p| osserman_angle_at(&p.frame, axis)).fold(T::infinity(), T::min))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OssermanMargin<T> {
    /// `min (|∇x¹|^2 - W sin^2 ω)` over conformal points; `None` if there are none.
    pub margin: Option<T>,
    pub conformal_points: usize,
    pub excluded_points: usize,
}

/// Checks `|∇(axis·X)|^2 >= W sin^2 ω` at every conformal point.
pub fn osserman_inequality_margin<T: Real>(
    grid: &GridSample<T>,
    axis: &[T],
    omega: T,
) -> Result<OssermanMargin<T>, EstimateError> {
    grid.nonempty()?;
    let s2 = omega.sin().powi(2);
    let mut margin: Option<T> = None;
    let mut conformal_points = 0;
    for p in &grid.nodes {
        if !is_conformal(&p.report) {
            continue;
        }
        conformal_points += 1;
        let gu = dot(axis, &p.jet.xu);
        let gv = dot(axis, &p.jet.xv);
        let m = gu * gu + gv * gv - p.report.first.w * s2;
        margin = Some(margin.map_or(m, |x| x.min(m)));
    }
    Ok(OssermanMargin { margin, conformal_points, excluded_points: grid.nodes.len() - conformal_points })
}

/// Area and first moments `(∫1, ∫x, ∫y)` of the intersection of the square
/// `[cx ± h/2] × [cy ± h/2]` with the disc of radius `r` about the origin,
/// by Green's theorem along the straight and circular parts of its boundary.
pub fn cell_disc_moments(cx: f64, cy: f64, h: f64, r: f64) -> (f64, f64, f64) {
    let (x0, x1, y0, y1) = (cx - h / 2.0, cx + h / 2.0, cy - h / 2.0, cy + h / 2.0);
    let r2 = r * r;
    let far = |a: f64, b: f64| if a.abs() > b.abs() { a } else { b };
    if far(x0, x1).powi(2) + far(y0, y1).powi(2) <= r2 {
        return (h * h, cx * h * h, cy * h * h);
    }
    let near = |a: f64, b: f64| if a <= 0.0 && b >= 0.0 { 0.0 } else if a.abs() < b.abs() { a } else { b };
    if near(x0, x1).powi(2) + near(y0, y1).powi(2) >= r2 {
        return (0.0, 0.0, 0.0);
    }
    let (mut area, mut mx, mut my) = (0.0, 0.0, 0.0);
    let corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
    for k in 0..4 {
        let (ax, ay) = corners[k];
        let (bx, by) = corners[(k + 1) % 4];
        let (dx, dy) = (bx - ax, by - ay);
        let a = dx * dx + dy * dy;
        let b = 2.0 * (ax * dx + ay * dy);
        let c = ax * ax + ay * ay - r2;
        let disc = b * b - 4.0 * a * c;
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let (t_lo, t_hi) = (((-b - sq) / (2.0 * a)).max(0.0), ((-b + sq) / (2.0 * a)).min(1.0));
        if t_lo >= t_hi {
            continue;
        }
        let (px, py) = (ax + t_lo * dx, ay + t_lo * dy);
        let (qx, qy) = (ax + t_hi * dx, ay + t_hi * dy);
        area += 0.5 * (px * qy - qx * py);
        mx += (qy - py) * (px * px + px * qx + qx * qx) / 6.0;
        my -= (qx - px) * (py * py + py * qy + qy * qy) / 6.0;
    }
    let mut angles = Vec::with_capacity(8);
    for x in [x0, x1] {
        if x.abs() < r {
            let y = (r2 - x * x).sqrt();
            angles.extend([y, -y].iter().filter(|&&y| y >= y0 && y <= y1).map(|&y| y.atan2(x)));
        }
    }
    for y in [y0, y1] {
        if y.abs() < r {
            let x = (r2 - y * y).sqrt();
            angles.extend([x, -x].iter().filter(|&&x| x >= x0 && x <= x1).map(|&x| y.atan2(x)));
        }
    }
    angles.sort_by(f64::total_cmp);
    let inside_square = |t: f64| {
        let (x, y) = (r * t.cos(), r * t.sin());
        x > x0 && x < x1 && y > y0 && y < y1
    };
    let mut arcs = Vec::new();
    if angles.is_empty() {
        if inside_square(0.0) {
            arcs.push((0.0, std::f64::consts::TAU));
        }
    } else {
        for k in 0..angles.len() {
            let a = angles[k];
            let b = if k + 1 < angles.len() { angles[k + 1] } else { angles[0] + std::f64::consts::TAU };
            if b > a && inside_square(0.5 * (a + b)) {
                arcs.push((a, b));
            }
        }
    }
    let prim_x = |t: f64| t.sin() - t.sin().powi(3) / 3.0;
    let prim_y = |t: f64| -t.cos() + t.cos().powi(3) / 3.0;
    for (a, b) in arcs {
        area += 0.5 * r2 * (b - a);
        mx += 0.5 * r2 * r * (prim_x(b) - prim_x(a));
        my += 0.5 * r2 * r * (prim_y(b) - prim_y(a));
    }
    (area, mx, my)
}

/// `D[X] = ∬ |X_u|^2 + |X_v|^2` over the disc. Each lattice cell clipped to the
/// disc is integrated exactly against the first-order Taylor expansion of the
/// integrand at its node; cells of nodes outside the disc borrow the nearest
/// valid node. The error is `O(spacing^2)`.
pub fn dirichlet_energy<T: Real>(grid: &GridSample<T>) -> Result<T, EstimateError> {
    grid.nonempty()?;
    let n = grid.resolution as isize;
    let h = grid.spacing;
    let two = T::lit(2.0);
    let mut total = T::zero();
    for j in 0..n {
        for i in 0..n {
            let (cx, cy) = GridSample::<T>::coords(grid.resolution, h, i as usize, j as usize);
            let (area, mx, my) = cell_disc_moments(cx, cy, h, grid.radius);
            if area == 0.0 {
                continue;
            }
            let owner = match grid.node(i, j) {
                Some(p) => p,
                None => nearest_node(grid, i, j).ok_or(EstimateError::EmptyGrid)?,
            };
            let jet = &owner.jet;
            let f = jet.grad_norm_sq();
            let fu = two * (dot(&jet.xu, &jet.xuu) + dot(&jet.xv, &jet.xuv));
            let fv = two * (dot(&jet.xu, &jet.xuv) + dot(&jet.xv, &jet.xvv));
            total = total
                + f * T::lit(area)
                + fu * T::lit(mx - owner.u * area)
                + fv * T::lit(my - owner.v * area);
        }
    }
    Ok(total)
}

fn nearest_node<T: Real>(grid: &GridSample<T>, i: isize, j: isize) -> Option<&GridNode<T>> {
    let mut best: Option<(isize, &GridNode<T>)> = None;
    for dj in -3..=3isize {
        for di in -3..=3isize {
            if let Some(p) = grid.node(i + di, j + dj) {
                let d = di * di + dj * dj;
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, p));
                }
            }
        }
    }
    best.map(|(_, p)| p)
}

/// Lattice neighbourhood used by [`geodesic_radius`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Connectivity {
    Eight,
    Sixteen,
}

impl Connectivity {
    fn offsets(self) -> Vec<(isize, isize)> {
        let mut out = vec![(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
        if self == Connectivity::Sixteen {
            out.extend([(1, 2), (2, 1), (-1, 2), (-2, 1), (1, -2), (2, -1), (-1, -2), (-2, -1)]);
        }
        out
    }
}

#[derive(PartialEq)]
struct Entry<T>(T, usize);

impl<T: Real> Eq for Entry<T> {}

impl<T: Real> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then_with(|| other.1.cmp(&self.1))
    }
}

fn metric_length<T: Real>(jets: &[&SurfaceJet<T>], du: f64, dv: f64) -> T {
    let (du, dv) = (T::lit(du), T::lit(dv));
    let k = T::lit(jets.len() as f64);
    let q = jets.iter().fold(T::zero(), |acc, j| {
        acc + du * du * norm_sq(&j.xu) + T::lit(2.0) * du * dv * dot(&j.xu, &j.xv) + dv * dv * norm_sq(&j.xv)
    });
    (q / k).sqrt()
}

/// Shortest pull-back length from the center to the boundary circle over the
/// lattice graph. Interior edges use the mean of the endpoint metrics; edges
/// leaving the disc are cut at the circle. An upper bound for the intrinsic
/// distance that tightens as the connectivity grows.
pub fn geodesic_radius<T: Real>(grid: &GridSample<T>, connectivity: Connectivity) -> Result<T, EstimateError> {
    grid.nonempty()?;
    let center = grid.center().ok_or(EstimateError::CenterMissing)?;
    let h = grid.spacing;
    let r2 = grid.radius * grid.radius;
    let sink = grid.nodes.len();
    let mut dist = vec![T::infinity(); sink + 1];
    let start = grid.lookup[center.j * grid.resolution + center.i].expect("center is indexed");
    dist[start] = T::zero();
    let mut heap = BinaryHeap::new();
    heap.push(Entry(T::zero(), start));
    let offsets = connectivity.offsets();
    while let Some(Entry(d, k)) = heap.pop() {
        if k == sink {
            return Ok(d);
        }
        if d > dist[k] {
            continue;
        }
        let p = &grid.nodes[k];
        for &(di, dj) in &offsets {
            let (du, dv) = (di as f64 * h, dj as f64 * h);
            let (target, w) = match grid.node(p.i as isize + di, p.j as isize + dj) {
                Some(q) => {
                    let idx = grid.lookup[q.j * grid.resolution + q.i].expect("node is indexed");
                    (idx, metric_length(&[&p.jet, &q.jet], du, dv))
                }
                None => {
                    // |p + t d| = radius for the exit parameter t in (0, 1].
                    let a = du * du + dv * dv;
                    let b = 2.0 * (p.u * du + p.v * dv);
                    let c = p.u * p.u + p.v * p.v - r2;
                    let t = ((-b + (b * b - 4.0 * a * c).max(0.0).sqrt()) / (2.0 * a)).clamp(0.0, 1.0);
                    (sink, T::lit(t) * metric_length(&[&p.jet], du, dv))
                }
            };
            let nd = d + w;
            if nd < dist[target] {
                dist[target] = nd;
                heap.push(Entry(nd, target));
            }
        }
    }
    Err(EstimateError::DisconnectedMask)
}

/// `(min, max)` of `W / r^2` over nodes with `|w| <= radius / 2`.
pub fn area_ratio_extrema<T: Real>(grid: &GridSample<T>, r: T) -> Result<(T, T), EstimateError> {
    if !(r > T::zero()) {
        return Err(EstimateError::BadArgument { name: "r", range: "(0, inf)", value: r.to_f64_lossy() });
    }
    let r2 = r * r;
    let inner: Vec<T> = half_disc(grid).map(|p| p.report.first.w / r2).collect();
    if inner.is_empty() {
        return Err(EstimateError::EmptyGrid);
    }
    Ok(inner.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &q| (lo.min(q), hi.max(q))))
}

fn half_disc<T: Real>(grid: &GridSample<T>) -> impl Iterator<Item = &GridNode<T>> {
    let limit = 0.25 * grid.radius * grid.radius * (1.0 + 1e-12);
    grid.nodes.iter().filter(move |p| p.u * p.u + p.v * p.v <= limit)
}

/// `min [W(w0)/r^2] / [W(w)/r^2]^5` over node pairs in the half-radius disc
/// with `|w - w0| <= nu · radius`.
pub fn harnack_ratio_probe<T: Real>(grid: &GridSample<T>, r: T, nu: f64) -> Result<T, EstimateError> {
    if !(nu > 0.0 && nu <= 0.25) {
        return Err(EstimateError::BadArgument { name: "nu", range: "(0, 1/4]", value: nu });
    }
    if !(r > T::zero()) {
        return Err(EstimateError::BadArgument { name: "r", range: "(0, inf)", value: r.to_f64_lossy() });
    }
    let r2 = r * r;
    let inner: Vec<(f64, f64, T)> = half_disc(grid).map(|p| (p.u, p.v, p.report.first.w / r2)).collect();
    if inner.is_empty() {
        return Err(EstimateError::EmptyGrid);
    }
    let reach = nu * grid.radius * (1.0 + 1e-12);
    let mut best = T::infinity();
    for &(u0, v0, q0) in &inner {
        let qmax = inner
            .iter()
            .filter(|(u, v, _)| (u - u0).hypot(v - v0) <= reach)
            .fold(T::neg_infinity(), |m, &(_, _, q)| m.max(q));
        best = best.min(q0 / qmax.powi(5));
    }
    Ok(best)
}

/// `2 max |H_Σ|` over the grid and the frame directions.
pub fn sup_mean_curvature<T: Real>(grid: &GridSample<T>) -> Result<T, EstimateError> {
    grid.nonempty()?;
    let m = grid
        .nodes
        .iter()
        .flat_map(|p| p.report.curvature.iter().map(|c| c.h.abs()))
        .fold(T::zero(), T::max);
    Ok(T::lit(2.0) * m)
}

/// `r^2 (κ_{Σ,1}^2 + κ_{Σ,2}^2) - (h0 r)^2` at the center, per normal direction.
pub fn curvature_bound_report<T: Real>(grid: &GridSample<T>, r: T, h0: T) -> Result<Vec<T>, EstimateError> {
    let center = grid.center().ok_or(EstimateError::CenterMissing)?;
    let hr = h0 * r;
    Ok(center
        .report
        .curvature
        .iter()
        .map(|c| r * r * (c.kappa1 * c.kappa1 + c.kappa2 * c.kappa2) - hr * hr)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport<T> {
    pub omega: T,
    pub osserman_margin: Option<T>,
    pub conformal_points: usize,
    pub non_conformal_points: usize,
    pub dirichlet_energy: T,
    pub geodesic_radius: T,
    pub h0: T,
    pub d0: T,
    #[serde(rename = "W_min_over_r2")]
    pub w_min_over_r2: T,
    #[serde(rename = "W_max_over_r2")]
    pub w_max_over_r2: T,
    pub harnack_c4_emp: T,
    pub theta_emp: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateOptions {
    /// Unit axis for the Osserman angle; defaults to `e_1`.
    pub axis: Option<Vec<f64>>,
    pub nu: f64,
    pub connectivity: Connectivity,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { axis: None, nu: 0.25, connectivity: Connectivity::Sixteen }
    }
}

/// Runs every monitor with `r` taken from [`geodesic_radius`].
pub fn estimate_report<T: Real>(grid: &GridSample<T>, opts: &EstimateOptions) -> Result<EstimateReport<T>, EstimateError> {
    grid.nonempty()?;
    let dim = grid.nodes[0].jet.dim();
    let axis: Vec<T> = match &opts.axis {
        Some(a) if a.len() == dim => a.iter().map(|&x| T::lit(x)).collect(),
        Some(a) => {
            return Err(EstimateError::BadArgument { name: "axis dimension", range: "ambient dimension", value: a.len() as f64 })
        }
        None => crate::linalg::basis(dim, 0),
    };
    let omega = osserman_angle(grid, &axis)?;
    let margin = osserman_inequality_margin(grid, &axis, omega)?;
    let dirichlet = dirichlet_energy(grid)?;
    let r = geodesic_radius(grid, opts.connectivity)?;
    let h0 = sup_mean_curvature(grid)?;
    let (w_min, w_max) = area_ratio_extrema(grid, r)?;
    Ok(EstimateReport {
        omega,
        osserman_margin: margin.margin,
        conformal_points: margin.conformal_points,
        non_conformal_points: margin.excluded_points,
        dirichlet_energy: dirichlet,
        geodesic_radius: r,
        h0,
        d0: dirichlet / (r * r),
        w_min_over_r2: w_min,
        w_max_over_r2: w_max,
        harnack_c4_emp: harnack_ratio_probe(grid, r, opts.nu)?,
        theta_emp: curvature_bound_report(grid, r, h0)?,
    })
}
