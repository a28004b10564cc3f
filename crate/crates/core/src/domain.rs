//! Domains, axis-aligned cube unions, and uniform grids.

use serde::{Deserialize, Serialize};

use crate::error::{PxError, Result};

/// Axis-aligned cube (interval in 1D, square in 2D).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub dim: usize,
    pub corner: [f64; 2],
    pub side: f64,
}

impl Cube {
    pub fn new_1d(a: f64, side: f64) -> Self {
        Cube {
            dim: 1,
            corner: [a, 0.0],
            side,
        }
    }

    pub fn new_2d(corner: [f64; 2], side: f64) -> Self {
        Cube {
            dim: 2,
            corner,
            side,
        }
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Open-interior overlap test against another cube of the same dimension.
    fn interiors_overlap(&self, other: &Cube) -> bool {
        for k in 0..self.dim {
            let (a0, a1) = (self.corner[k], self.corner[k] + self.side);
            let (b0, b1) = (other.corner[k], other.corner[k] + other.side);
            if a1 <= b0 + 1e-14 || b1 <= a0 + 1e-14 {
                return false;
            }
        }
        true
    }
}

/// Computational domain: an interval, a 2D box, or a union of cubes with
/// pairwise disjoint interiors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Box2 { x: (f64, f64), y: (f64, f64) },
    CubeUnion(Vec<Cube>),
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(PxError::InvalidDomain(format!(
                "interval needs a < b, got ({a}, {b})"
            )));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn box2(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        if !(x.1 > x.0 && y.1 > y.0) || ![x.0, x.1, y.0, y.1].iter().all(|v| v.is_finite()) {
            return Err(PxError::InvalidDomain(format!(
                "box needs positive side lengths, got x={x:?} y={y:?}"
            )));
        }
        Ok(Domain::Box2 { x, y })
    }

    pub fn unit_interval() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }

    pub fn unit_square() -> Self {
        Domain::Box2 {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        }
    }

    pub fn cube_union(cubes: Vec<Cube>) -> Result<Self> {
        if cubes.is_empty() {
            return Err(PxError::InvalidDomain("empty cube union".into()));
        }
        let dim = cubes[0].dim;
        if cubes.iter().any(|c| c.dim != dim || c.side <= 0.0) {
            return Err(PxError::InvalidDomain(
                "cube union mixes dimensions or has degenerate cubes".into(),
            ));
        }
        for (i, c) in cubes.iter().enumerate() {
            for d in cubes.iter().skip(i + 1) {
                if c.interiors_overlap(d) {
                    return Err(PxError::InvalidDomain(format!(
                        "cubes {c:?} and {d:?} have overlapping interiors"
                    )));
                }
            }
        }
        Ok(Domain::CubeUnion(cubes))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Box2 { .. } => 2,
            Domain::CubeUnion(cubes) => cubes[0].dim,
        }
    }

    /// Lebesgue measure |Omega|.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Box2 { x, y } => (x.1 - x.0) * (y.1 - y.0),
            Domain::CubeUnion(cubes) => cubes.iter().map(Cube::volume).sum(),
        }
    }

    /// Translate all coordinates by `shift` (same shift on every axis).
    pub fn translated(&self, shift: f64) -> Domain {
        match self {
            Domain::Interval { a, b } => Domain::Interval {
                a: a + shift,
                b: b + shift,
            },
            Domain::Box2 { x, y } => Domain::Box2 {
                x: (x.0 + shift, x.1 + shift),
                y: (y.0 + shift, y.1 + shift),
            },
            Domain::CubeUnion(cubes) => Domain::CubeUnion(
                cubes
                    .iter()
                    .map(|c| Cube {
                        dim: c.dim,
                        corner: [c.corner[0] + shift, c.corner[1] + shift],
                        side: c.side,
                    })
                    .collect(),
            ),
        }
    }
}

/// Classification of a probe cube against a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inside,
    Outside,
    Straddle,
}

/// Inner/outer covers of a domain by dyadic cubes of equal side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeCover {
    pub inner: Vec<Cube>,
    pub outer: Vec<Cube>,
    /// Dyadic level: cube side is `2^-level`.
    pub level: u32,
}

impl CubeCover {
    pub fn inner_measure(&self) -> f64 {
        self.inner.iter().map(Cube::volume).sum()
    }

    pub fn outer_measure(&self) -> f64 {
        self.outer.iter().map(Cube::volume).sum()
    }

    pub fn gap(&self) -> f64 {
        self.outer_measure() - self.inner_measure()
    }
}

/// Sweep the dyadic lattice of side `2^-level` over `bbox` and classify each
/// cell. Cells fully inside go to both covers; straddling cells only to the
/// outer one.
pub fn dyadic_cover_by<F>(bbox: &Domain, level: u32, classify: F) -> CubeCover
where
    F: Fn(&Cube) -> Region,
{
    let side = 0.5f64.powi(level as i32);
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    let push = |cube: Cube, inner: &mut Vec<Cube>, outer: &mut Vec<Cube>| match classify(&cube) {
        Region::Inside => {
            inner.push(cube);
            outer.push(cube);
        }
        Region::Straddle => outer.push(cube),
        Region::Outside => {}
    };
    match bbox {
        Domain::Interval { a, b } => {
            let k0 = (a / side).floor() as i64;
            let k1 = (b / side).ceil() as i64;
            for k in k0..k1 {
                push(
                    Cube::new_1d(k as f64 * side, side),
                    &mut inner,
                    &mut outer,
                );
            }
        }
        Domain::Box2 { x, y } => {
            let kx0 = (x.0 / side).floor() as i64;
            let kx1 = (x.1 / side).ceil() as i64;
            let ky0 = (y.0 / side).floor() as i64;
            let ky1 = (y.1 / side).ceil() as i64;
            for ky in ky0..ky1 {
                for kx in kx0..kx1 {
                    push(
                        Cube::new_2d([kx as f64 * side, ky as f64 * side], side),
                        &mut inner,
                        &mut outer,
                    );
                }
            }
        }
        Domain::CubeUnion(_) => unreachable!("cube unions are their own covers"),
    }
    CubeCover {
        inner,
        outer,
        level,
    }
}

fn classify_against_interval(cube: &Cube, a: f64, b: f64) -> Region {
    let (c0, c1) = (cube.corner[0], cube.corner[0] + cube.side);
    if c0 >= a - 1e-14 && c1 <= b + 1e-14 {
        Region::Inside
    } else if c1 <= a + 1e-14 || c0 >= b - 1e-14 {
        Region::Outside
    } else {
        Region::Straddle
    }
}

fn classify_against_box(cube: &Cube, x: (f64, f64), y: (f64, f64)) -> Region {
    let rx = classify_against_interval(&Cube::new_1d(cube.corner[0], cube.side), x.0, x.1);
    let ry = classify_against_interval(&Cube::new_1d(cube.corner[1], cube.side), y.0, y.1);
    match (rx, ry) {
        (Region::Outside, _) | (_, Region::Outside) => Region::Outside,
        (Region::Inside, Region::Inside) => Region::Inside,
        _ => Region::Straddle,
    }
}

/// Inner and outer cube covers `Omega_eps subset Omega subset Omega^eps` with
/// `|outer| - |inner| < eps`, built from dyadic cubes of side `2^-m`.
///
/// `m` is the smallest level with both the measured gap below `eps` and the
/// cube side at most `eps`. A cube union is returned unchanged as both covers.
pub fn cube_cover(domain: &Domain, epsilon: f64) -> Result<CubeCover> {
    if epsilon <= 0.0 {
        return Err(PxError::NonPositiveEpsilon(epsilon));
    }
    if let Domain::CubeUnion(cubes) = domain {
        return Ok(CubeCover {
            inner: cubes.clone(),
            outer: cubes.clone(),
            level: 0,
        });
    }
    for level in 0..52 {
        let side = 0.5f64.powi(level as i32);
        if side > epsilon {
            continue;
        }
        let cover = dyadic_cover_by(domain, level, |cube| match domain {
            Domain::Interval { a, b } => classify_against_interval(cube, *a, *b),
            Domain::Box2 { x, y } => classify_against_box(cube, *x, *y),
            Domain::CubeUnion(_) => unreachable!(),
        });
        if cover.gap() < epsilon {
            return Ok(cover);
        }
    }
    Err(PxError::InvalidDomain(format!(
        "no dyadic cover of {domain:?} meets epsilon = {epsilon}"
    )))
}

/// Uniform tensor grid over an interval or box. `shape` counts nodes per axis
/// (the y entries are 1 in 1D).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub shape: [usize; 2],
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
}

impl Grid {
    pub fn from_domain(domain: &Domain, nodes_per_axis: usize) -> Result<Grid> {
        if nodes_per_axis < 3 {
            return Err(PxError::InvalidGrid(format!(
                "need at least 3 nodes per axis, got {nodes_per_axis}"
            )));
        }
        match domain {
            Domain::Interval { a, b } => Ok(Grid {
                dim: 1,
                shape: [nodes_per_axis, 1],
                origin: [*a, 0.0],
                spacing: [(b - a) / (nodes_per_axis - 1) as f64, 1.0],
            }),
            Domain::Box2 { x, y } => Ok(Grid {
                dim: 2,
                shape: [nodes_per_axis, nodes_per_axis],
                origin: [x.0, y.0],
                spacing: [
                    (x.1 - x.0) / (nodes_per_axis - 1) as f64,
                    (y.1 - y.0) / (nodes_per_axis - 1) as f64,
                ],
            }),
            Domain::CubeUnion(_) => Err(PxError::InvalidGrid(
                "cube unions carry no tensor grid".into(),
            )),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn num_cells(&self) -> usize {
        match self.dim {
            1 => self.shape[0] - 1,
            _ => (self.shape[0] - 1) * (self.shape[1] - 1),
        }
    }

    /// Per-axis cell counts.
    pub fn cell_shape(&self) -> [usize; 2] {
        match self.dim {
            1 => [self.shape[0] - 1, 1],
            _ => [self.shape[0] - 1, self.shape[1] - 1],
        }
    }

    /// Quadrature weight of one cell (cell volume; all cells are congruent).
    pub fn cell_weight(&self) -> f64 {
        match self.dim {
            1 => self.spacing[0],
            _ => self.spacing[0] * self.spacing[1],
        }
    }

    pub fn node_coord(&self, idx: usize) -> [f64; 2] {
        let ix = idx % self.shape[0];
        let iy = idx / self.shape[0];
        [
            self.origin[0] + ix as f64 * self.spacing[0],
            self.origin[1] + iy as f64 * self.spacing[1],
        ]
    }

    pub fn cell_center(&self, cell: usize) -> [f64; 2] {
        let cs = self.cell_shape();
        let cx = cell % cs[0];
        let cy = cell / cs[0];
        [
            self.origin[0] + (cx as f64 + 0.5) * self.spacing[0],
            self.origin[1] + (cy as f64 + 0.5) * self.spacing[1],
        ]
    }

    pub fn is_boundary_node(&self, idx: usize) -> bool {
        let ix = idx % self.shape[0];
        let iy = idx / self.shape[0];
        match self.dim {
            1 => ix == 0 || ix == self.shape[0] - 1,
            _ => ix == 0 || ix == self.shape[0] - 1 || iy == 0 || iy == self.shape[1] - 1,
        }
    }

    /// Total length/area spanned by the grid.
    pub fn measure(&self) -> f64 {
        self.cell_weight() * self.num_cells() as f64
    }
}
