//! The Rayleigh quotient |grad u|_{p(x)} / |u|_{p(x)}, the derivative
//! pairings of the two norm functionals, and the Euler-Lagrange defect.

use serde::{Deserialize, Serialize};

use crate::error::{PxError, Result};
use crate::exponent::ExponentField;
use crate::gridfn::{BoundaryCondition, GridFunction};
use crate::modular::{luxemburg_cells, luxemburg_norm, NEAR_ZERO};

/// sign(w) |w|^(p-1), the p-power kernel, with the near-zero safeguard.
#[inline]
pub(crate) fn power_kernel(w: f64, p: f64) -> f64 {
    if w.abs() < NEAR_ZERO {
        0.0
    } else {
        w.signum() * w.abs().powf(p - 1.0)
    }
}

/// Norm values and the nonlocal factor of the normalized eigenproblem at `u`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RayleighState {
    /// |grad u|_{p(x)} (the functional whose critical values are eigenvalues).
    pub grad_norm: f64,
    /// |u|_{p(x)}.
    pub norm: f64,
    /// Ratio of the normalized unweighted modulars; identically 1 for
    /// constant exponents. Set to 1 when grad u = 0.
    pub nonlocal_factor: f64,
    /// grad_norm / norm.
    pub quotient: f64,
}

/// Shared quadrature pass behind the pairings: normalized power kernels per
/// cell plus the normalizing denominators (the unweighted modulars of
/// grad u / K and u / k).
pub(crate) struct PairingKernels {
    pub norm: f64,
    pub grad_norm: f64,
    /// w * |u_c/k|^(p-2) (u_c/k) per cell.
    pub fn_kernel: Vec<f64>,
    /// sum of w * |u_c/k|^p.
    pub fn_denom: f64,
    /// w * |g_c/K|^(p-2) (g_c/K) per cell (vector-valued).
    pub grad_kernel: Vec<[f64; 2]>,
    /// sum of w * |g_c/K|^p.
    pub grad_denom: f64,
}

impl PairingKernels {
    pub fn compute(u: &GridFunction, field: &ExponentField) -> Result<Self> {
        if u.grid != field.grid {
            return Err(PxError::GridMismatch);
        }
        if u.is_zero() {
            return Err(PxError::ZeroFunction);
        }
        let w = u.grid.cell_weight();
        let p_cells = field.cell_values();
        let averages = u.cell_averages();
        let grads = u.gradient();
        let mags: Vec<f64> = averages.iter().map(|v| v.abs()).collect();
        let gmags = grads.magnitudes();
        let norm = luxemburg_cells(&mags, p_cells, w);
        let grad_norm = luxemburg_cells(&gmags, p_cells, w);

        let mut fn_kernel = vec![0.0; mags.len()];
        let mut fn_denom = 0.0;
        for c in 0..mags.len() {
            let z = averages[c] / norm;
            fn_kernel[c] = w * power_kernel(z, p_cells[c]);
            let zm = mags[c] / norm;
            if zm >= NEAR_ZERO {
                fn_denom += w * zm.powf(p_cells[c]);
            }
        }

        let mut grad_kernel = vec![[0.0, 0.0]; gmags.len()];
        let mut grad_denom = 0.0;
        if grad_norm > 0.0 {
            for c in 0..gmags.len() {
                let zm = gmags[c] / grad_norm;
                if zm < NEAR_ZERO {
                    continue;
                }
                // |z|^(p-2) z = |z|^(p-1) * (z/|z|), applied componentwise to the vector
                let scale = zm.powf(p_cells[c] - 1.0) / zm;
                grad_kernel[c] = [
                    w * scale * grads.vectors[c][0] / grad_norm,
                    w * scale * grads.vectors[c][1] / grad_norm,
                ];
                grad_denom += w * zm.powf(p_cells[c]);
            }
        }
        Ok(PairingKernels {
            norm,
            grad_norm,
            fn_kernel,
            fn_denom,
            grad_kernel,
            grad_denom,
        })
    }
}

/// Evaluate norms, quotient, and the nonlocal factor at `u`.
pub fn rayleigh(u: &GridFunction, field: &ExponentField) -> Result<RayleighState> {
    let kern = PairingKernels::compute(u, field)?;
    let nonlocal_factor = if kern.grad_norm > 0.0 {
        kern.grad_denom / kern.fn_denom
    } else {
        1.0
    };
    Ok(RayleighState {
        grad_norm: kern.grad_norm,
        norm: kern.norm,
        nonlocal_factor,
        quotient: kern.grad_norm / kern.norm,
    })
}

/// Derivative pairing of the function-norm functional:
/// <k'(u), v> as a ratio of the two quadrature integrals.
pub fn d_function_norm(u: &GridFunction, v: &GridFunction, field: &ExponentField) -> Result<f64> {
    let kern = PairingKernels::compute(u, field)?;
    d_function_norm_with(&kern, v)
}

pub(crate) fn d_function_norm_with(kern: &PairingKernels, v: &GridFunction) -> Result<f64> {
    let vavg = v.cell_averages();
    let mut num = 0.0;
    for c in 0..vavg.len() {
        num += kern.fn_kernel[c] * vavg[c];
    }
    Ok(num / kern.fn_denom)
}

/// Derivative pairing of the gradient-norm functional: <K'(u), v>.
pub fn d_gradient_norm(u: &GridFunction, v: &GridFunction, field: &ExponentField) -> Result<f64> {
    let kern = PairingKernels::compute(u, field)?;
    if kern.grad_norm == 0.0 {
        return Err(PxError::ZeroGradient);
    }
    d_gradient_norm_with(&kern, v)
}

pub(crate) fn d_gradient_norm_with(kern: &PairingKernels, v: &GridFunction) -> Result<f64> {
    let vg = v.gradient();
    let mut num = 0.0;
    for c in 0..vg.vectors.len() {
        num += kern.grad_kernel[c][0] * vg.vectors[c][0] + kern.grad_kernel[c][1] * vg.vectors[c][1];
    }
    Ok(num / kern.grad_denom)
}

/// Nodal vector of the Euler-Lagrange defect functional
/// v -> <K'(u), v> - lambda <k'(u), v> against the hat basis, assembled in
/// one quadrature pass. Boundary entries are zeroed for Dirichlet functions.
pub(crate) fn assembled_defect(
    kern: &PairingKernels,
    grid: &crate::domain::Grid,
    boundary: BoundaryCondition,
    lambda: f64,
) -> Vec<f64> {
    let nx = grid.shape[0];
    let cs = grid.cell_shape();
    let mut r = vec![0.0; grid.num_nodes()];
    match grid.dim {
        1 => {
            let h = grid.spacing[0];
            for c in 0..cs[0] {
                let gk = kern.grad_kernel[c][0] / kern.grad_denom;
                let fk = lambda * kern.fn_kernel[c] / kern.fn_denom;
                r[c] += -gk / h - 0.5 * fk;
                r[c + 1] += gk / h - 0.5 * fk;
            }
        }
        _ => {
            let (hx, hy) = (grid.spacing[0], grid.spacing[1]);
            for cy in 0..cs[1] {
                for cx in 0..cs[0] {
                    let c = cy * cs[0] + cx;
                    let i = cy * nx + cx;
                    let gx = kern.grad_kernel[c][0] / kern.grad_denom / (2.0 * hx);
                    let gy = kern.grad_kernel[c][1] / kern.grad_denom / (2.0 * hy);
                    let fk = 0.25 * lambda * kern.fn_kernel[c] / kern.fn_denom;
                    r[i] += -gx - gy - fk;
                    r[i + 1] += gx - gy - fk;
                    r[i + nx] += -gx + gy - fk;
                    r[i + nx + 1] += gx + gy - fk;
                }
            }
        }
    }
    if boundary == BoundaryCondition::DirichletZero {
        for i in 0..r.len() {
            if grid.is_boundary_node(i) {
                r[i] = 0.0;
            }
        }
    }
    r
}

/// Luxemburg norms of the hat-function gradients, one per node. Each hat's
/// gradient has constant magnitude on its adjacent cells, so the norm is a
/// local root-find over at most four cells.
pub(crate) fn hat_grad_norms(grid: &crate::domain::Grid, field: &ExponentField) -> Vec<f64> {
    let w = grid.cell_weight();
    let p_cells = field.cell_values();
    let nx = grid.shape[0];
    let cs = grid.cell_shape();
    let mut out = vec![0.0; grid.num_nodes()];
    match grid.dim {
        1 => {
            let mag = 1.0 / grid.spacing[0];
            for i in 0..grid.num_nodes() {
                let mut mags = Vec::with_capacity(2);
                let mut ps = Vec::with_capacity(2);
                if i > 0 {
                    mags.push(mag);
                    ps.push(p_cells[i - 1]);
                }
                if i < cs[0] {
                    mags.push(mag);
                    ps.push(p_cells[i]);
                }
                out[i] = luxemburg_cells(&mags, &ps, w);
            }
        }
        _ => {
            let mag = (0.5 / grid.spacing[0]).hypot(0.5 / grid.spacing[1]);
            for iy in 0..grid.shape[1] {
                for ix in 0..nx {
                    let mut mags = Vec::with_capacity(4);
                    let mut ps = Vec::with_capacity(4);
                    for (dx, dy) in [(0i64, 0i64), (-1, 0), (0, -1), (-1, -1)] {
                        let cx = ix as i64 + dx;
                        let cy = iy as i64 + dy;
                        if cx >= 0 && (cx as usize) < cs[0] && cy >= 0 && (cy as usize) < cs[1] {
                            mags.push(mag);
                            ps.push(p_cells[cy as usize * cs[0] + cx as usize]);
                        }
                    }
                    out[iy * nx + ix] = luxemburg_cells(&mags, &ps, w);
                }
            }
        }
    }
    out
}

/// Worst normalized defect over a list of test functions:
/// max_i |<K'(u), v_i> - lambda <k'(u), v_i>| / |grad v_i|_{p(x)}.
///
/// Test functions with vanishing gradient (constants) are normalized by
/// |v|_{p(x)} instead.
pub fn euler_lagrange_residual(
    u: &GridFunction,
    lambda: f64,
    field: &ExponentField,
    basis: &[GridFunction],
) -> Result<f64> {
    if basis.is_empty() {
        return Err(PxError::EmptyBasis);
    }
    let kern = PairingKernels::compute(u, field)?;
    if kern.grad_norm == 0.0 {
        return Err(PxError::ZeroGradient);
    }
    let mut worst = 0.0f64;
    for v in basis {
        let defect =
            d_gradient_norm_with(&kern, v)? - lambda * d_function_norm_with(&kern, v)?;
        let scale = {
            let gn = luxemburg_norm(&v.gradient(), field)?;
            if gn > 0.0 {
                gn
            } else {
                luxemburg_norm(v, field)?
            }
        };
        if scale > 0.0 {
            worst = worst.max(defect.abs() / scale);
        }
    }
    Ok(worst)
}

/// Residual against the full hat basis, computed by assembly (used by the
/// solvers; equivalent to `euler_lagrange_residual` with every hat function).
pub fn euler_lagrange_residual_hats(
    u: &GridFunction,
    lambda: f64,
    field: &ExponentField,
) -> Result<f64> {
    let kern = PairingKernels::compute(u, field)?;
    if kern.grad_norm == 0.0 {
        return Err(PxError::ZeroGradient);
    }
    let r = assembled_defect(&kern, &u.grid, u.boundary, lambda);
    let norms = hat_grad_norms(&u.grid, field);
    let mut worst = 0.0f64;
    for i in 0..r.len() {
        if u.boundary == BoundaryCondition::DirichletZero && u.grid.is_boundary_node(i) {
            continue;
        }
        worst = worst.max(r[i].abs() / norms[i]);
    }
    Ok(worst)
}
