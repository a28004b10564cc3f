//! Nodal grid functions and their per-cell gradients.

use serde::{Deserialize, Serialize};

use crate::domain::Grid;
use crate::error::{PxError, Result};
use crate::exponent::cell_averages;

/// Boundary behaviour of a grid function: zero trace or unconstrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    DirichletZero,
    Free,
}

/// Piecewise-(multi)linear function given by nodal values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub boundary: BoundaryCondition,
}

impl GridFunction {
    /// Dirichlet function; boundary nodes are forced to zero exactly.
    pub fn dirichlet(grid: &Grid, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(PxError::InvalidGrid(format!(
                "expected {} nodal values, got {}",
                grid.num_nodes(),
                values.len()
            )));
        }
        for i in 0..values.len() {
            if grid.is_boundary_node(i) {
                values[i] = 0.0;
            }
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values,
            boundary: BoundaryCondition::DirichletZero,
        })
    }

    pub fn free(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(PxError::InvalidGrid(format!(
                "expected {} nodal values, got {}",
                grid.num_nodes(),
                values.len()
            )));
        }
        Ok(GridFunction {
            grid: grid.clone(),
            values,
            boundary: BoundaryCondition::Free,
        })
    }

    pub fn zeros(grid: &Grid, boundary: BoundaryCondition) -> Self {
        GridFunction {
            grid: grid.clone(),
            values: vec![0.0; grid.num_nodes()],
            boundary,
        }
    }

    /// Sample a closure at grid nodes (boundary values zeroed for Dirichlet).
    pub fn sample<F: Fn(f64, f64) -> f64>(
        grid: &Grid,
        boundary: BoundaryCondition,
        f: F,
    ) -> Self {
        let values = (0..grid.num_nodes())
            .map(|i| {
                let c = grid.node_coord(i);
                f(c[0], c[1])
            })
            .collect();
        match boundary {
            BoundaryCondition::DirichletZero => Self::dirichlet(grid, values).unwrap(),
            BoundaryCondition::Free => Self::free(grid, values).unwrap(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Cell-center values of the interpolant (midpoint quadrature samples).
    pub fn cell_averages(&self) -> Vec<f64> {
        cell_averages(&self.grid, &self.values)
    }

    /// Per-cell gradients: forward differences in 1D, cell averages of the
    /// bilinear-element gradient in 2D.
    pub fn gradient(&self) -> GradientField {
        let g = &self.grid;
        let nx = g.shape[0];
        let cs = g.cell_shape();
        let mut vectors = Vec::with_capacity(g.num_cells());
        match g.dim {
            1 => {
                let h = g.spacing[0];
                for cx in 0..cs[0] {
                    vectors.push([(self.values[cx + 1] - self.values[cx]) / h, 0.0]);
                }
            }
            _ => {
                let (hx, hy) = (g.spacing[0], g.spacing[1]);
                for cy in 0..cs[1] {
                    for cx in 0..cs[0] {
                        let i = cy * nx + cx;
                        let (v00, v10, v01, v11) = (
                            self.values[i],
                            self.values[i + 1],
                            self.values[i + nx],
                            self.values[i + nx + 1],
                        );
                        vectors.push([
                            (v10 + v11 - v00 - v01) / (2.0 * hx),
                            (v01 + v11 - v00 - v10) / (2.0 * hy),
                        ]);
                    }
                }
            }
        }
        GradientField {
            grid: g.clone(),
            vectors,
        }
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            boundary: self.boundary,
        }
    }

    pub fn axpy(&self, alpha: f64, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(PxError::GridMismatch);
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + alpha * b)
                .collect(),
            boundary: if self.boundary == other.boundary {
                self.boundary
            } else {
                BoundaryCondition::Free
            },
        })
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.axpy(1.0, other)
    }

    /// Shift all nodal values by a constant (free boundary only).
    pub fn shifted(&self, s: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v - s).collect(),
            boundary: BoundaryCondition::Free,
        }
    }

    /// True if no grid cell has strictly opposite-signed corner values.
    pub fn single_signed(&self) -> bool {
        let nx = self.grid.shape[0];
        let cs = self.grid.cell_shape();
        let sign_span = |vals: &[f64]| {
            let mut pos = false;
            let mut neg = false;
            for &v in vals {
                if v > 0.0 {
                    pos = true;
                }
                if v < 0.0 {
                    neg = true;
                }
            }
            !(pos && neg)
        };
        match self.grid.dim {
            1 => (0..cs[0]).all(|cx| sign_span(&[self.values[cx], self.values[cx + 1]])),
            _ => (0..cs[1]).all(|cy| {
                (0..cs[0]).all(|cx| {
                    let i = cy * nx + cx;
                    sign_span(&[
                        self.values[i],
                        self.values[i + 1],
                        self.values[i + nx],
                        self.values[i + nx + 1],
                    ])
                })
            }),
        }
    }
}

/// Per-cell gradient vectors of a grid function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientField {
    pub grid: Grid,
    pub vectors: Vec<[f64; 2]>,
}

impl GradientField {
    pub fn magnitudes(&self) -> Vec<f64> {
        match self.grid.dim {
            1 => self.vectors.iter().map(|v| v[0].abs()).collect(),
            _ => self.vectors.iter().map(|v| v[0].hypot(v[1])).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vectors.iter().all(|v| v[0] == 0.0 && v[1] == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;

    #[test]
    fn dirichlet_zeroes_boundary() {
        let g = Grid::from_domain(&Domain::unit_interval(), 5).unwrap();
        let u = GridFunction::dirichlet(&g, vec![9.0, 1.0, 2.0, 3.0, 9.0]).unwrap();
        assert_eq!(u.values[0], 0.0);
        assert_eq!(u.values[4], 0.0);
        assert_eq!(u.values[2], 2.0);
    }

    #[test]
    fn gradient_1d_forward_difference() {
        let g = Grid::from_domain(&Domain::unit_interval(), 5).unwrap();
        let u = GridFunction::sample(&g, BoundaryCondition::Free, |x, _| x * x);
        let grad = u.gradient();
        // (x+h)^2 - x^2 over h = 2x + h = derivative at the cell center
        for (c, v) in grad.vectors.iter().enumerate() {
            let xc = g.cell_center(c)[0];
            assert!((v[0] - 2.0 * xc).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_2d_bilinear_average() {
        let g = Grid::from_domain(&Domain::unit_square(), 5).unwrap();
        let u = GridFunction::sample(&g, BoundaryCondition::Free, |x, y| 3.0 * x - 2.0 * y);
        let grad = u.gradient();
        for v in &grad.vectors {
            assert!((v[0] - 3.0).abs() < 1e-12);
            assert!((v[1] + 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_detection() {
        let g = Grid::from_domain(&Domain::unit_interval(), 9).unwrap();
        let pos = GridFunction::sample(&g, BoundaryCondition::DirichletZero, |x, _| {
            (std::f64::consts::PI * x).sin()
        });
        assert!(pos.single_signed());
        let mix = GridFunction::sample(&g, BoundaryCondition::DirichletZero, |x, _| {
            (2.0 * std::f64::consts::PI * x).sin()
        });
        assert!(!mix.single_signed());
    }
}
