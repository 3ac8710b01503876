//! Lattice discretization of the closed unit disc with Shortley–Weller arms.

use super::SolverError;

/// Nodes closer than `MASK_MARGIN · h` to the circle are treated as boundary,
/// which keeps every Shortley–Weller arm away from zero length.
pub const MASK_MARGIN: f64 = 1e-3;

/// Where one of the four arms of an interior node ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arm {
    /// Full-length arm to another interior node.
    Node(usize),
    /// Arm of `fraction · h` ending on the circle at angle `theta`.
    Boundary { fraction: f64, theta: f64 },
}

impl Arm {
    pub fn fraction(&self) -> f64 {
        match *self {
            Arm::Node(_) => 1.0,
            Arm::Boundary { fraction, .. } => fraction,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscNode {
    pub i: isize,
    pub j: isize,
    pub u: f64,
    pub v: f64,
    /// East, west, north, south.
    pub arms: [Arm; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscGrid {
    pub h: f64,
    half: isize,
    pub nodes: Vec<DiscNode>,
    lookup: Vec<Option<usize>>,
}

pub const EAST: usize = 0;
pub const WEST: usize = 1;
pub const NORTH: usize = 2;
pub const SOUTH: usize = 3;

fn is_interior(h: f64, i: isize, j: isize) -> bool {
    let (u, v) = (i as f64 * h, j as f64 * h);
    (u * u + v * v).sqrt() <= 1.0 - MASK_MARGIN * h
}

impl DiscGrid {
    /// Lattice `h Z^2` restricted to the disc, `0 < h <= 1/8`.
    pub fn new(h: f64) -> Result<Self, SolverError> {
        if !(h > 0.0 && h <= 0.125) {
            return Err(SolverError::BadSpacing(h));
        }
        let half = (1.0 / h).floor() as isize + 1;
        let side = (2 * half + 1) as usize;
        let mut lookup = vec![None; side * side];
        let mut coords = Vec::new();
        for j in -half..=half {
            for i in -half..=half {
                if is_interior(h, i, j) {
                    lookup[((j + half) as usize) * side + (i + half) as usize] = Some(coords.len());
                    coords.push((i, j));
                }
            }
        }
        let mut grid = Self { h, half, nodes: Vec::with_capacity(coords.len()), lookup };
        for (i, j) in coords {
            let (u, v) = (i as f64 * h, j as f64 * h);
            let arm = |di: isize, dj: isize| -> Arm {
                if let Some(k) = grid.index(i + di, j + dj) {
                    return Arm::Node(k);
                }
                // Exit point of the axis ray through (u, v) on the unit circle.
                let (along, across) = if di != 0 { (u * di as f64, v) } else { (v * dj as f64, u) };
                let reach = (1.0 - across * across).max(0.0).sqrt() - along;
                let fraction = (reach / h).clamp(f64::MIN_POSITIVE, 1.0);
                let (bu, bv) = (u + di as f64 * fraction * h, v + dj as f64 * fraction * h);
                Arm::Boundary { fraction, theta: bv.atan2(bu) }
            };
            let arms = [arm(1, 0), arm(-1, 0), arm(0, 1), arm(0, -1)];
            grid.nodes.push(DiscNode { i, j, u, v, arms });
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the interior node at lattice position `(i, j)`.
    pub fn index(&self, i: isize, j: isize) -> Option<usize> {
        if i.abs() > self.half || j.abs() > self.half {
            return None;
        }
        let side = 2 * self.half + 1;
        self.lookup[((j + self.half) * side + i + self.half) as usize]
    }

    pub fn center(&self) -> usize {
        self.index(0, 0).expect("the origin is always interior")
    }

    /// Shortley–Weller weights `[c_E, c_W, c_N, c_S]` and the diagonal `Σ c`.
    pub fn weights(&self, k: usize) -> ([f64; 4], f64) {
        let a = self.nodes[k].arms.map(|arm| arm.fraction());
        let h2 = self.h * self.h;
        let cx = |p: f64, q: f64| 2.0 / (h2 * p * (p + q));
        let c = [cx(a[EAST], a[WEST]), cx(a[WEST], a[EAST]), cx(a[NORTH], a[SOUTH]), cx(a[SOUTH], a[NORTH])];
        (c, c.iter().sum())
    }
}
