//! Counting-function machinery: theorem bound curves, cube-decomposition
//! estimates, homothety transport, the normalized join of disjoint pieces,
//! and growth-exponent fitting.

use serde::{Deserialize, Serialize};

use crate::domain::{Cube, Domain, Grid};
use crate::error::{PxError, Result};
use crate::exponent::ExponentStats;
use crate::gridfn::GridFunction;
use crate::modular::lp_norm;
use crate::spectrum::Spectrum;

/// N(lambda) samples against the calibrated two-sided bound curves
/// C1 |Omega| (lambda/kappa)^(n/(1+sigma)) and C2 |Omega| (kappa lambda)^(n/(1-sigma)).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountingReport {
    pub lambda: Vec<f64>,
    pub count: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Sample indices at or above the anchor where a curve is breached.
    pub violations: Vec<usize>,
    pub fitted_exponent: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub anchor_lambda: f64,
    pub stats: ExponentStats,
}

/// Calibrate the theorem curves at `anchor_lambda` and tabulate them against
/// the spectrum's counting function over `lambda_grid`.
///
/// The step function has two values at a jump; the lower curve is pinned to
/// the strict count and the upper curve to the non-strict count, so both
/// touch the graph at the anchor.
pub fn theorem_bounds(
    spectrum: &Spectrum,
    stats: &ExponentStats,
    domain: &Domain,
    lambda_grid: &[f64],
    anchor_lambda: f64,
) -> Result<CountingReport> {
    if stats.tau >= 1.0 {
        return Err(PxError::BoundsUnavailable("tau >= 1".into()));
    }
    if stats.sigma >= 1.0 {
        return Err(PxError::BoundsUnavailable("sigma >= 1".into()));
    }
    let kappa = stats.kappa.expect("tau < 1 implies kappa exists");
    let n = stats.dim as f64;
    let measure = domain.measure();
    let exp_lower = n / (1.0 + stats.sigma);
    let exp_upper = n / (1.0 - stats.sigma);

    let anchor_strict = spectrum.counting(anchor_lambda) as f64;
    let anchor_closed = spectrum
        .entries
        .iter()
        .filter(|e| e.value <= anchor_lambda)
        .count() as f64;
    let c1 = anchor_strict / (measure * (anchor_lambda / kappa).powf(exp_lower));
    let c2 = anchor_closed / (measure * (kappa * anchor_lambda).powf(exp_upper));

    let mut count = Vec::with_capacity(lambda_grid.len());
    let mut lower = Vec::with_capacity(lambda_grid.len());
    let mut upper = Vec::with_capacity(lambda_grid.len());
    let mut violations = Vec::new();
    for (i, &lam) in lambda_grid.iter().enumerate() {
        let nv = spectrum.counting(lam);
        let lo = c1 * measure * (lam / kappa).powf(exp_lower);
        let up = c2 * measure * (kappa * lam).powf(exp_upper);
        if lam >= anchor_lambda - 1e-12 && ((nv as f64) < lo - 1e-9 || (nv as f64) > up + 1e-9) {
            violations.push(i);
        }
        count.push(nv);
        lower.push(lo);
        upper.push(up);
    }
    let mut report = CountingReport {
        lambda: lambda_grid.to_vec(),
        count,
        lower,
        upper,
        violations,
        fitted_exponent: None,
        c1,
        c2,
        anchor_lambda,
        stats: stats.clone(),
    };
    report.fitted_exponent = fit_growth_exponent(&report).ok();
    Ok(report)
}

/// Least-squares slope of log N against log lambda over the samples with
/// N >= 1. Needs at least five usable samples.
pub fn fit_growth_exponent(report: &CountingReport) -> Result<f64> {
    let pts: Vec<(f64, f64)> = report
        .lambda
        .iter()
        .zip(&report.count)
        .filter(|(l, &n)| n >= 1 && **l > 0.0)
        .map(|(l, &n)| (l.ln(), (n as f64).ln()))
        .collect();
    if pts.len() < 5 {
        return Err(PxError::DegenerateSamples(format!(
            "need >= 5 samples with N >= 1, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(PxError::DegenerateSamples(
            "lambda samples are collinear in log space".into(),
        ));
    }
    Ok((n * sxy - sx * sy) / denom)
}

/// Cube-decomposition counts of the proof: seeds r, s per reference cube,
/// transported cube sides a = (lambda0/lambda)^(1/(1+sigma)) and
/// b = (lambda0/lambda')^(1/(1-sigma)), floor arithmetic over a cover.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubeEstimate {
    pub lambda0: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub r: u64,
    pub s: u64,
    pub a_side: f64,
    pub b_side: f64,
    pub lower_count: u64,
    pub upper_count: u64,
}

/// lower = sum over cover cubes of r floor(a_i/a)^n,
/// upper = sum of s (floor(a_i/b) + 1)^n, for lambda0 < lambda < lambda'.
pub fn cube_count_bounds(
    stats: &ExponentStats,
    cover: &[Cube],
    lambda: f64,
    lambda_prime: f64,
    lambda0: f64,
    r: u64,
    s: u64,
) -> Result<CubeEstimate> {
    if !(lambda > lambda0) {
        return Err(PxError::Precondition(format!(
            "need lambda > lambda0, got {lambda} <= {lambda0}"
        )));
    }
    if !(lambda_prime > lambda) {
        return Err(PxError::Precondition(format!(
            "need lambda' > lambda, got {lambda_prime} <= {lambda}"
        )));
    }
    if stats.sigma >= 1.0 {
        return Err(PxError::BoundsUnavailable("sigma >= 1".into()));
    }
    let n = stats.dim as u32;
    let a_side = (lambda0 / lambda).powf(1.0 / (1.0 + stats.sigma));
    let b_side = (lambda0 / lambda_prime).powf(1.0 / (1.0 - stats.sigma));
    let mut lower = 0u64;
    let mut upper = 0u64;
    for cube in cover {
        let fits_a = ((cube.side / a_side) + 1e-9).floor() as u64;
        let fits_b = ((cube.side / b_side) + 1e-9).floor() as u64;
        lower += r * fits_a.pow(n);
        upper += s * (fits_b + 1).pow(n);
    }
    Ok(CubeEstimate {
        lambda0,
        lambda,
        lambda_prime,
        r,
        s,
        a_side,
        b_side,
        lower_count: lower,
        upper_count: upper,
    })
}

/// One mixed-norm ratio before/after a homothety, with the predicted power
/// of delta.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioCheck {
    pub before: f64,
    pub after: f64,
    pub predicted_factor: f64,
    pub observed_factor: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomothetyReport {
    /// |grad .|_{p+} / |.|_{p-} picks up delta^(-sigma-1).
    pub plus_minus: RatioCheck,
    /// |grad .|_{p-} / |.|_{p+} picks up delta^(sigma-1).
    pub minus_plus: RatioCheck,
    pub holds: bool,
}

/// Shrink the domain by `delta` via x -> delta x, transport u(x) = v(y), and
/// verify both mixed-ratio identities on quadrature-matched grids.
pub fn homothety_transport(
    u: &GridFunction,
    delta: f64,
    p_minus: f64,
    p_plus: f64,
) -> Result<HomothetyReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PxError::Precondition(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    if u.is_zero() {
        return Err(PxError::ZeroFunction);
    }
    let g = &u.grid;
    let shrunk = Grid {
        dim: g.dim,
        shape: g.shape,
        origin: [g.origin[0] * delta, g.origin[1] * delta],
        spacing: [g.spacing[0] * delta, g.spacing[1] * delta],
    };
    let v = GridFunction {
        grid: shrunk,
        values: u.values.clone(),
        boundary: u.boundary,
    };
    let sigma = g.dim as f64 * (1.0 / p_minus - 1.0 / p_plus);

    let ratio = |f: &GridFunction, grad_p: f64, fn_p: f64| -> Result<f64> {
        Ok(lp_norm(&f.gradient(), grad_p, true)? / lp_norm(f, fn_p, true)?)
    };
    let pm_before = ratio(u, p_plus, p_minus)?;
    let pm_after = ratio(&v, p_plus, p_minus)?;
    let mp_before = ratio(u, p_minus, p_plus)?;
    let mp_after = ratio(&v, p_minus, p_plus)?;

    let make = |before: f64, after: f64, predicted: f64| -> RatioCheck {
        let observed = after / before;
        RatioCheck {
            before,
            after,
            predicted_factor: predicted,
            observed_factor: observed,
            rel_error: (observed - predicted).abs() / predicted,
        }
    };
    let plus_minus = make(pm_before, pm_after, delta.powf(-sigma - 1.0));
    let minus_plus = make(mp_before, mp_after, delta.powf(sigma - 1.0));
    let holds = plus_minus.rel_error <= 1e-8 && minus_plus.rel_error <= 1e-8;
    Ok(HomothetyReport {
        plus_minus,
        minus_plus,
        holds,
    })
}

/// ((1-t)^p + t^p)^(1/p); nonincreasing in p on (1, inf) for fixed t in (0,1).
pub fn mix_norm(t: f64, p: f64) -> f64 {
    ((1.0 - t).powf(p) + t.powf(p)).powf(1.0 / p)
}

/// The join construction's loss factor mix_norm(t, p+) / mix_norm(t, p-),
/// always <= 1 for p+ >= p-.
pub fn mix_factor(t: f64, p_minus: f64, p_plus: f64) -> f64 {
    mix_norm(t, p_plus) / mix_norm(t, p_minus)
}

/// Verify p -> mix_norm(t, p) is nonincreasing across `p_grid`.
pub fn mix_factor_monotonicity(t: f64, p_grid: &[f64]) -> Result<bool> {
    if !(t > 0.0 && t < 1.0) {
        return Err(PxError::Precondition(format!(
            "t must lie in (0,1), got {t}"
        )));
    }
    let mut sorted = p_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in sorted.windows(2) {
        if mix_norm(t, w[1]) > mix_norm(t, w[0]) + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JoinReport {
    pub glued: GridFunction,
    pub mix_factor: f64,
    /// |grad .|_{p+} of the glued, |.|_{p-}-normalized function.
    pub khat_glued: f64,
    pub khat_pieces: [f64; 2],
    pub bound_holds: bool,
}

/// Normalized mix ((1-t) u1 (+) t u2) / |.|_{p-} of two Dirichlet pieces on
/// adjacent intervals sharing an endpoint. Inputs must satisfy
/// |u_i|_{p-,weighted} = 1. The glued K-hat value obeys
/// khat <= max(khat_1, khat_2) * mix_factor(t) and the factor is <= 1.
pub fn join_normalized(
    u1: &GridFunction,
    u2: &GridFunction,
    t: f64,
    p_plus: f64,
    p_minus: f64,
) -> Result<JoinReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(PxError::Precondition(format!(
            "t must lie in [0,1], got {t}"
        )));
    }
    let (g1, g2) = (&u1.grid, &u2.grid);
    if g1.dim != 1 || g2.dim != 1 {
        return Err(PxError::Precondition("join is one-dimensional".into()));
    }
    if (g1.spacing[0] - g2.spacing[0]).abs() > 1e-12 * g1.spacing[0] {
        return Err(PxError::Precondition(
            "pieces must share the grid spacing".into(),
        ));
    }
    let end1 = g1.origin[0] + g1.spacing[0] * (g1.shape[0] - 1) as f64;
    if (end1 - g2.origin[0]).abs() > 1e-10 * g1.spacing[0].max(1.0) {
        if g2.origin[0] < end1 {
            return Err(PxError::Precondition(
                "pieces overlap; domains must be disjoint".into(),
            ));
        }
        return Err(PxError::Precondition(
            "pieces must be adjacent (shared endpoint)".into(),
        ));
    }
    for (i, u) in [u1, u2].iter().enumerate() {
        let norm = lp_norm(*u, p_minus, true)?;
        if (norm - 1.0).abs() > 1e-9 {
            return Err(PxError::Precondition(format!(
                "piece {} is not normalized: |u|_{{p-}} = {norm}",
                i + 1
            )));
        }
    }

    let n1 = g1.shape[0];
    let n2 = g2.shape[0];
    let joined_grid = Grid {
        dim: 1,
        shape: [n1 + n2 - 1, 1],
        origin: g1.origin,
        spacing: g1.spacing,
    };
    let mut values = vec![0.0; n1 + n2 - 1];
    for i in 0..n1 {
        values[i] = (1.0 - t) * u1.values[i];
    }
    for i in 1..n2 {
        values[n1 - 1 + i] = t * u2.values[i];
    }
    let raw = GridFunction::dirichlet(&joined_grid, values)?;
    let norm = lp_norm(&raw, p_minus, true)?;
    if norm == 0.0 {
        return Err(PxError::ZeroFunction);
    }
    let glued = raw.scaled(1.0 / norm);

    let khat = |u: &GridFunction| -> Result<f64> { lp_norm(&u.gradient(), p_plus, true) };
    let khat_glued = khat(&glued)?;
    let khat_pieces = [khat(u1)?, khat(u2)?];
    let factor = mix_factor(t, p_minus, p_plus);
    let bound = match t {
        t if t == 0.0 => khat_pieces[0],
        t if t == 1.0 => khat_pieces[1],
        _ => khat_pieces[0].max(khat_pieces[1]) * factor,
    };
    let bound_holds = khat_glued <= bound + 1e-9;
    Ok(JoinReport {
        glued,
        mix_factor: factor,
        khat_glued,
        khat_pieces,
        bound_holds,
    })
}
