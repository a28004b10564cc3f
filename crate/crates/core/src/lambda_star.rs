//! The modular-ratio first eigenvalue: the infimum of
//! int |grad u|^p(x) dx / int |u|^p(x) dx (no Luxemburg norm, no 1/p weight).
//!
//! This quotient is not scale-invariant for variable exponents; when p has a
//! strict interior minimum it decays to zero along vanishing-amplitude
//! plateau bumps, while for constant p it is amplitude-independent. The
//! explorer reports that decay evidence, never a limit value.

use serde::{Deserialize, Serialize};

use crate::error::{PxError, Result};
use crate::exponent::ExponentField;
use crate::gridfn::{BoundaryCondition, GridFunction};
use crate::modular::modular_unweighted;

/// Ratio of the unweighted modulars of the gradient and the function.
pub fn modular_quotient(u: &GridFunction, field: &ExponentField) -> Result<f64> {
    if u.is_zero() {
        return Err(PxError::ZeroFunction);
    }
    let num = modular_unweighted(&u.gradient(), 1.0, field)?;
    let den = modular_unweighted(u, 1.0, field)?;
    if den == 0.0 {
        return Err(PxError::DegenerateSamples(
            "function modular underflowed to zero".into(),
        ));
    }
    Ok(num / den)
}

/// Plateau bump: 1 on [center - plateau_radius, center + plateau_radius],
/// linear ramps of width `ramp_width` down to 0, 0 outside.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlateauBump {
    pub center: f64,
    pub plateau_radius: f64,
    pub ramp_width: f64,
}

impl PlateauBump {
    pub fn profile(&self, x: f64) -> f64 {
        let d = (x - self.center).abs();
        if d <= self.plateau_radius {
            1.0
        } else if d < self.plateau_radius + self.ramp_width {
            1.0 - (d - self.plateau_radius) / self.ramp_width
        } else {
            0.0
        }
    }

    pub fn sample(&self, grid: &crate::domain::Grid) -> GridFunction {
        GridFunction::sample(grid, BoundaryCondition::DirichletZero, |x, _| {
            self.profile(x)
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuotientSample {
    pub t: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BumpExplorerReport {
    pub bump: PlateauBump,
    pub samples: Vec<QuotientSample>,
    /// Strictly decreasing across the sampled amplitudes below 0.1.
    pub strictly_decreasing_small_t: bool,
    pub final_over_initial: f64,
}

/// Evaluate the modular quotient of t * bump over the amplitude grid.
///
/// Preconditions: 1D field, bump supported inside the domain, the grid
/// minimizer of p inside the plateau (so the ramps avoid it).
pub fn bump_family_explorer(
    field: &ExponentField,
    bump: &PlateauBump,
    t_grid: &[f64],
) -> Result<BumpExplorerReport> {
    let grid = &field.grid;
    if grid.dim != 1 {
        return Err(PxError::Precondition(
            "bump explorer is one-dimensional".into(),
        ));
    }
    if bump.plateau_radius <= 0.0 || bump.ramp_width <= 0.0 {
        return Err(PxError::Precondition(
            "bump needs positive plateau radius and ramp width".into(),
        ));
    }
    let lo = grid.origin[0];
    let hi = grid.origin[0] + grid.spacing[0] * (grid.shape[0] - 1) as f64;
    let support = bump.plateau_radius + bump.ramp_width;
    if bump.center - support < lo || bump.center + support > hi {
        return Err(PxError::Precondition(format!(
            "bump support [{}, {}] leaves the domain [{lo}, {hi}]",
            bump.center - support,
            bump.center + support
        )));
    }
    // an interior minimizer of p must sit inside the plateau so the ramps
    // avoid it (boundary minimizers, e.g. for monotone p, carry no such
    // requirement: the decay mechanism does not apply to them)
    let (mut argmin, mut min_p) = (0usize, f64::INFINITY);
    for (i, &p) in field.node_values.iter().enumerate() {
        if p < min_p {
            min_p = p;
            argmin = i;
        }
    }
    let interior_min = !grid.is_boundary_node(argmin) && !field.is_constant();
    if interior_min {
        let xmin = grid.node_coord(argmin)[0];
        if (xmin - bump.center).abs() > bump.plateau_radius + 1e-12 {
            return Err(PxError::Precondition(format!(
                "plateau [{}, {}] misses the exponent minimizer at x = {xmin}",
                bump.center - bump.plateau_radius,
                bump.center + bump.plateau_radius
            )));
        }
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(PxError::Precondition(
            "amplitudes must be positive".into(),
        ));
    }

    let phi = bump.sample(grid);
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let quotient = modular_quotient(&phi.scaled(t), field)?;
        samples.push(QuotientSample { t, quotient });
    }
    let mut strictly = true;
    for w in samples.windows(2) {
        // the grid is read in decreasing-t order in reports; check pairs with
        // both amplitudes below 0.1 regardless of ordering
        let (big, small) = if w[0].t >= w[1].t {
            (&w[0], &w[1])
        } else {
            (&w[1], &w[0])
        };
        if big.t < 0.1 + 1e-12 && small.quotient >= big.quotient {
            strictly = false;
        }
    }
    let final_over_initial = samples.last().unwrap().quotient / samples[0].quotient;
    Ok(BumpExplorerReport {
        bump: *bump,
        samples,
        strictly_decreasing_small_t: strictly,
        final_over_initial,
    })
}

/// The standard amplitude grid 10^-1, ..., 10^-6.
pub fn decade_grid() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}
