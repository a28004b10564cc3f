//! The weighted modular, the implicit Luxemburg norm, constant-exponent
//! norms, and the two-sided norm sandwich between them.
//!
//! All grid integrals use the midpoint rule per cell, with the function and
//! the exponent interpolated to cell centers.

use serde::{Deserialize, Serialize};

use crate::domain::Grid;
use crate::error::{PxError, Result};
use crate::exponent::{ExponentField, ExponentStats};
use crate::gridfn::{GradientField, GridFunction};

/// Ignore magnitudes below this when evaluating |u|^(p-2) u kernels; removes
/// the p < 2 singularity at u = 0.
pub const NEAR_ZERO: f64 = 1e-300;

/// Anything sampled per grid cell whose modular we can take.
pub trait SampledOnCells {
    fn grid(&self) -> &Grid;
    fn cell_magnitudes(&self) -> Vec<f64>;
}

impl SampledOnCells for GridFunction {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn cell_magnitudes(&self) -> Vec<f64> {
        self.cell_averages().iter().map(|v| v.abs()).collect()
    }
}

impl SampledOnCells for GradientField {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn cell_magnitudes(&self) -> Vec<f64> {
        self.magnitudes()
    }
}

/// Weighted modular of per-cell magnitudes at scale `nu`:
/// sum of w * (|m_c| / nu)^(p_c) / p_c.
pub(crate) fn modular_cells(mags: &[f64], p_cells: &[f64], weight: f64, nu: f64) -> f64 {
    let mut acc = 0.0;
    for (m, p) in mags.iter().zip(p_cells) {
        if *m < NEAR_ZERO {
            continue;
        }
        acc += (m / nu).powf(*p) / p;
    }
    weight * acc
}

/// Unweighted modular (no 1/p factor).
pub(crate) fn modular_cells_unweighted(mags: &[f64], p_cells: &[f64], weight: f64, nu: f64) -> f64 {
    let mut acc = 0.0;
    for (m, p) in mags.iter().zip(p_cells) {
        if *m < NEAR_ZERO {
            continue;
        }
        acc += (m / nu).powf(*p);
    }
    weight * acc
}

/// Constant-exponent norm of per-cell magnitudes:
/// (sum w |m|^p [/ p])^(1/p).
pub(crate) fn lp_cells(mags: &[f64], p: f64, weight: f64, weighted: bool) -> f64 {
    let mut acc = 0.0;
    for m in mags {
        if *m < NEAR_ZERO {
            continue;
        }
        acc += m.powf(p);
    }
    if weighted {
        acc /= p;
    }
    (weight * acc).powf(1.0 / p)
}

/// Solve the Luxemburg equation modular(m, nu) = 1 for nu by bracketing plus
/// safeguarded Newton. Returns 0 for identically zero input.
pub(crate) fn luxemburg_cells(mags: &[f64], p_cells: &[f64], weight: f64) -> f64 {
    let max = mags.iter().fold(0.0f64, |m, &v| m.max(v));
    if max < NEAR_ZERO {
        return 0.0;
    }
    let p_min = p_cells.iter().copied().fold(f64::INFINITY, f64::min);
    let p_max = p_cells.iter().copied().fold(0.0f64, f64::max);

    // evaluates the modular and the unweighted modular in one pass; the
    // latter is -nu * d(modular)/d(nu), which drives the Newton step
    let both = |nu: f64| -> (f64, f64) {
        let mut acc_w = 0.0;
        let mut acc_u = 0.0;
        for (m, p) in mags.iter().zip(p_cells) {
            if *m < NEAR_ZERO {
                continue;
            }
            let t = (m / nu).powf(*p);
            acc_u += t;
            acc_w += t / p;
        }
        (weight * acc_w, weight * acc_u)
    };

    let guess = lp_cells(mags, p_max, weight, true) + lp_cells(mags, p_min, weight, true);
    let mut nu = guess.max(NEAR_ZERO);
    let (mut lo, mut hi);
    let (m0, _) = both(nu);
    if m0 >= 1.0 {
        lo = nu;
        hi = nu;
        for _ in 0..2000 {
            hi *= 2.0;
            if both(hi).0 <= 1.0 {
                break;
            }
            lo = hi;
        }
    } else {
        hi = nu;
        lo = nu;
        for _ in 0..2000 {
            lo *= 0.5;
            if both(lo).0 >= 1.0 {
                break;
            }
            hi = lo;
        }
    }

    nu = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (mw, mu) = both(nu);
        if mw >= 1.0 {
            lo = nu;
        } else {
            hi = nu;
        }
        if hi - lo <= 1e-15 * nu {
            break;
        }
        // Newton on F(nu) = modular(nu) - 1, F'(nu) = -mu/nu
        let step = (mw - 1.0) * nu / mu.max(1e-300);
        let candidate = nu + step;
        nu = if candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
    }
    nu
}

fn check_grid<T: SampledOnCells>(u: &T, field: &ExponentField) -> Result<()> {
    if *u.grid() != field.grid {
        return Err(PxError::GridMismatch);
    }
    Ok(())
}

/// Weighted modular of `u` at scale `nu`.
pub fn modular<T: SampledOnCells>(u: &T, nu: f64, field: &ExponentField) -> Result<f64> {
    if nu <= 0.0 {
        return Err(PxError::NonPositiveScale(nu));
    }
    check_grid(u, field)?;
    Ok(modular_cells(
        &u.cell_magnitudes(),
        field.cell_values(),
        field.grid.cell_weight(),
        nu,
    ))
}

/// Unweighted modular of `u` at scale `nu` (no 1/p(x) factor).
pub fn modular_unweighted<T: SampledOnCells>(u: &T, nu: f64, field: &ExponentField) -> Result<f64> {
    if nu <= 0.0 {
        return Err(PxError::NonPositiveScale(nu));
    }
    check_grid(u, field)?;
    Ok(modular_cells_unweighted(
        &u.cell_magnitudes(),
        field.cell_values(),
        field.grid.cell_weight(),
        nu,
    ))
}

/// Luxemburg norm: the unique nu > 0 with modular(u, nu) = 1, or 0 for the
/// zero function. Absolutely homogeneous.
pub fn luxemburg_norm<T: SampledOnCells>(u: &T, field: &ExponentField) -> Result<f64> {
    check_grid(u, field)?;
    Ok(luxemburg_cells(
        &u.cell_magnitudes(),
        field.cell_values(),
        field.grid.cell_weight(),
    ))
}

/// Constant-exponent norm (int |u|^p dx / p)^(1/p), or the classical
/// unweighted L^p norm when `weighted` is false.
pub fn lp_norm<T: SampledOnCells>(u: &T, p: f64, weighted: bool) -> Result<f64> {
    if p <= 1.0 {
        return Err(PxError::ExponentTooSmall(p));
    }
    Ok(lp_cells(
        &u.cell_magnitudes(),
        p,
        u.grid().cell_weight(),
        weighted,
    ))
}

/// Two-sided comparison of the Luxemburg norm against the weighted
/// constant-exponent norms at the exponent bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichReport {
    pub lower: f64,
    pub mid: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Check |u|_{p-} / (1+tau)^{1/p-} <= |u|_{p(x)} <= |u|_{p+} / (1-tau)^{1/p+}
/// with slack 1e-9 for quadrature roundoff. Requires tau < 1.
pub fn check_norm_sandwich<T: SampledOnCells>(
    u: &T,
    field: &ExponentField,
    stats: &ExponentStats,
) -> Result<SandwichReport> {
    if stats.tau >= 1.0 {
        return Err(PxError::BoundsUnavailable("tau >= 1".into()));
    }
    let lower = lp_norm(u, stats.p_minus, true)? / (1.0 + stats.tau).powf(1.0 / stats.p_minus);
    let mid = luxemburg_norm(u, field)?;
    let upper = lp_norm(u, stats.p_plus, true)? / (1.0 - stats.tau).powf(1.0 / stats.p_plus);
    let holds = lower <= mid + 1e-9 && mid <= upper + 1e-9;
    Ok(SandwichReport {
        lower,
        mid,
        upper,
        holds,
    })
}
