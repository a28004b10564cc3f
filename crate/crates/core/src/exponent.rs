//! Variable exponent fields p(x) and the spread constants sigma, tau, kappa.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Grid};
use crate::error::{PxError, Result};
use crate::expr::Expr;

/// Sampled exponent function on a grid, with nodal values interpolated
/// piecewise-(multi)linearly. Cell-center values are cached since every
/// quadrature pass needs them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentField {
    pub grid: Grid,
    pub node_values: Vec<f64>,
    cell_values: Vec<f64>,
    pub p_minus: f64,
    pub p_plus: f64,
}

/// How the exponent is specified.
pub enum ExponentSpec<'a> {
    /// Closed-form expression over `x` (and `y` in 2D).
    Expression(&'a str),
    /// Explicit per-node samples (same ordering as grid nodes).
    Samples(Vec<f64>),
    /// Constant exponent.
    Constant(f64),
}

/// Build an exponent field, validating `1 < p(x) < inf` at every node.
pub fn build_exponent_field(grid: &Grid, spec: ExponentSpec<'_>) -> Result<ExponentField> {
    let node_values = match spec {
        ExponentSpec::Expression(src) => {
            let expr = Expr::parse(src)?;
            (0..grid.num_nodes())
                .map(|i| {
                    let c = grid.node_coord(i);
                    expr.eval(c[0], c[1])
                })
                .collect::<Vec<f64>>()
        }
        ExponentSpec::Samples(v) => {
            if v.len() != grid.num_nodes() {
                return Err(PxError::InvalidGrid(format!(
                    "exponent samples: expected {} values, got {}",
                    grid.num_nodes(),
                    v.len()
                )));
            }
            v
        }
        ExponentSpec::Constant(p) => vec![p; grid.num_nodes()],
    };
    for (i, &p) in node_values.iter().enumerate() {
        if !(p > 1.0) || !p.is_finite() {
            let c = grid.node_coord(i);
            let location = if grid.dim == 1 {
                format!("x = {}", c[0])
            } else {
                format!("(x, y) = ({}, {})", c[0], c[1])
            };
            return Err(PxError::ExponentOutOfRange { value: p, location });
        }
    }
    let p_minus = node_values.iter().copied().fold(f64::INFINITY, f64::min);
    let p_plus = node_values.iter().copied().fold(0.0f64, f64::max);
    let cell_values = cell_averages(grid, &node_values);
    Ok(ExponentField {
        grid: grid.clone(),
        node_values,
        cell_values,
        p_minus,
        p_plus,
    })
}

/// Average the nodal values of each cell (the cell-center value of the
/// piecewise-(multi)linear interpolant).
pub(crate) fn cell_averages(grid: &Grid, nodes: &[f64]) -> Vec<f64> {
    let nx = grid.shape[0];
    let cs = grid.cell_shape();
    let mut out = Vec::with_capacity(grid.num_cells());
    match grid.dim {
        1 => {
            for cx in 0..cs[0] {
                out.push(0.5 * (nodes[cx] + nodes[cx + 1]));
            }
        }
        _ => {
            for cy in 0..cs[1] {
                for cx in 0..cs[0] {
                    let i = cy * nx + cx;
                    out.push(0.25 * (nodes[i] + nodes[i + 1] + nodes[i + nx] + nodes[i + nx + 1]));
                }
            }
        }
    }
    out
}

impl ExponentField {
    pub fn constant(grid: &Grid, p: f64) -> Result<Self> {
        build_exponent_field(grid, ExponentSpec::Constant(p))
    }

    pub fn from_expression(grid: &Grid, src: &str) -> Result<Self> {
        build_exponent_field(grid, ExponentSpec::Expression(src))
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.cell_values
    }

    pub fn is_constant(&self) -> bool {
        self.p_plus - self.p_minus < 1e-14
    }
}

/// Exponent-spread constants of the counting bounds:
/// sigma = n (1/p- - 1/p+), tau = (1/p- - 1/p+) |Omega|,
/// kappa = (1 + tau)^(1/p-) / (1 - tau)^(1/p+).
///
/// kappa is `None` when tau >= 1 (the bound degenerates); `theorem_applicable`
/// is false when sigma >= 1 or tau >= 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentStats {
    pub p_minus: f64,
    pub p_plus: f64,
    pub dim: usize,
    pub measure: f64,
    pub sigma: f64,
    pub tau: f64,
    pub kappa: Option<f64>,
    pub theorem_applicable: bool,
}

/// Compute sigma, tau, kappa for a field over a domain. Never fails; when
/// sigma >= 1 or tau >= 1 the result is flagged non-applicable instead.
pub fn exponent_stats(field: &ExponentField, domain: &Domain) -> ExponentStats {
    ExponentStats::from_parts(field.p_minus, field.p_plus, domain.dim(), domain.measure())
}

impl ExponentStats {
    pub fn from_parts(p_minus: f64, p_plus: f64, dim: usize, measure: f64) -> Self {
        let spread = 1.0 / p_minus - 1.0 / p_plus;
        let sigma = dim as f64 * spread;
        let tau = spread * measure;
        let kappa = if tau < 1.0 {
            Some((1.0 + tau).powf(1.0 / p_minus) / (1.0 - tau).powf(1.0 / p_plus))
        } else {
            None
        };
        ExponentStats {
            p_minus,
            p_plus,
            dim,
            measure,
            sigma,
            tau,
            kappa,
            theorem_applicable: sigma < 1.0 && tau < 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_1d(n: usize) -> Grid {
        Grid::from_domain(&Domain::unit_interval(), n).unwrap()
    }

    #[test]
    fn constant_field_extracts_bounds() {
        let f = ExponentField::constant(&grid_1d(101), 2.0).unwrap();
        assert_eq!(f.p_minus, 2.0);
        assert_eq!(f.p_plus, 2.0);
        assert!(f.is_constant());
    }

    #[test]
    fn linear_field_extremes_at_endpoints() {
        let f = ExponentField::from_expression(&grid_1d(101), "1.5 + x").unwrap();
        assert!((f.p_minus - 1.5).abs() < 1e-12);
        assert!((f.p_plus - 2.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_exponent_rejected_with_location() {
        let err = ExponentField::constant(&grid_1d(11), 0.9).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("exponent out of range"), "{msg}");
        assert!(ExponentField::from_expression(&grid_1d(11), "2 - 2*x").is_err());
        assert!(ExponentField::from_expression(&grid_1d(11), "1/(x - 0.5)").is_err());
    }

    #[test]
    fn stats_constant_exponent_degenerate_exactly() {
        let f = ExponentField::constant(&grid_1d(33), 2.0).unwrap();
        let s = exponent_stats(&f, &Domain::unit_interval());
        assert_eq!(s.sigma, 0.0);
        assert_eq!(s.tau, 0.0);
        assert_eq!(s.kappa, Some(1.0));
        assert!(s.theorem_applicable);
    }

    #[test]
    fn stats_spread_field_matches_arithmetic() {
        // p- = 1.5, p+ = 2.5, n = 1, |Omega| = 1
        let f = ExponentField::from_expression(&grid_1d(101), "1.5 + x").unwrap();
        let s = exponent_stats(&f, &Domain::unit_interval());
        assert!((s.sigma - 4.0 / 15.0).abs() < 1e-12);
        assert!((s.tau - 4.0 / 15.0).abs() < 1e-12);
        let kappa_expected =
            (1.0 + 4.0 / 15.0_f64).powf(1.0 / 1.5) / (1.0 - 4.0 / 15.0_f64).powf(1.0 / 2.5);
        assert!((s.kappa.unwrap() - kappa_expected).abs() < 1e-12);
        assert!((s.kappa.unwrap() - 1.32531).abs() < 1e-4);
    }

    #[test]
    fn stats_2d_doubles_sigma_only() {
        let s1 = ExponentStats::from_parts(1.5, 2.5, 1, 1.0);
        let s2 = ExponentStats::from_parts(1.5, 2.5, 2, 1.0);
        assert!((s2.sigma - 2.0 * s1.sigma).abs() < 1e-15);
        assert!((s2.sigma - 8.0 / 15.0).abs() < 1e-12);
        assert!((s2.tau - s1.tau).abs() < 1e-15);
    }

    #[test]
    fn stats_translation_invariant() {
        let d = Domain::interval(0.0, 2.0).unwrap();
        let g = Grid::from_domain(&d, 65).unwrap();
        let f = ExponentField::from_expression(&g, "2 + 0.3*sin(x)").unwrap();
        let s = exponent_stats(&f, &d);
        let dt = d.translated(7.25);
        let gt = Grid::from_domain(&dt, 65).unwrap();
        let ft = ExponentField::from_expression(&gt, "2 + 0.3*sin(x - 7.25)").unwrap();
        let st = exponent_stats(&ft, &dt);
        assert!((s.sigma - st.sigma).abs() < 1e-12);
        assert!((s.tau - st.tau).abs() < 1e-12);
    }

    #[test]
    fn tau_at_least_one_flags_not_applicable() {
        // p- = 1.05, p+ = 50 gives spread ~ 0.932; |Omega| = 2 pushes tau > 1
        let d = Domain::interval(0.0, 2.0).unwrap();
        let g = Grid::from_domain(&d, 33).unwrap();
        let f = ExponentField::from_expression(&g, "1.05 + 24.475*x").unwrap();
        let s = exponent_stats(&f, &d);
        assert!(s.tau >= 1.0);
        assert!(s.kappa.is_none());
        assert!(!s.theorem_applicable);
    }

    #[test]
    fn kappa_exceeds_one_iff_spread() {
        for (pm, pp) in [(1.5, 1.5), (1.5, 2.5), (2.0, 3.0), (1.2, 4.0)] {
            let s = ExponentStats::from_parts(pm, pp, 1, 1.0);
            let k = s.kappa.unwrap();
            if pm == pp {
                assert_eq!(k, 1.0);
            } else {
                assert!(k > 1.0);
            }
        }
    }
}
