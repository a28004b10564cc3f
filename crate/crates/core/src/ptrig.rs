//! Generalized trigonometric functions and exact constant-exponent spectra.
//!
//! `pi_p` is the generalized half-period 2 int_0^1 (1 - t^p)^(-1/p) dt and
//! `sin_p` the inverse of s -> int_0^s (1 - tau^p)^(-1/p) d tau on
//! [0, pi_p/2], extended by odd reflection and 2 pi_p antiperiodicity.
//!
//! For the normalized quotient |u'|_p / |u|_p the j-th Dirichlet mode
//! sin_p(j pi_p x / L) attains the value (p-1)^(1/p) j pi_p / L: the
//! quarter-period identity int |sin_p'|^p = (p-1) int |sin_p|^p puts the
//! factor (p-1)^(1/p) in front of the half-period count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{PxError, Result};
use crate::gridfn::BoundaryCondition;
use crate::quadrature::tanh_sinh;
use crate::spectrum::{EigenvalueKind, Spectrum, SpectrumEntry};

/// (1 - t^p)^(-1/p), evaluated without cancellation near t = 1 via the
/// distance `db` = 1 - t.
fn half_period_integrand(t: f64, db: f64, p: f64) -> f64 {
    let one_minus_tp = if t <= 0.5 {
        1.0 - t.powf(p)
    } else {
        -(p * (-db).ln_1p()).exp_m1()
    };
    one_minus_tp.powf(-1.0 / p)
}

/// Generalized half-period pi_p, by double-exponential quadrature of the
/// defining integral. Agrees with 2 pi / (p sin(pi/p)) to ~1e-10.
pub fn pi_p(p: f64) -> Result<f64> {
    if p <= 1.0 {
        return Err(PxError::ExponentTooSmall(p));
    }
    let r = tanh_sinh(|t, _, db| half_period_integrand(t, db, p), 0.0, 1.0, 1e-13);
    Ok(2.0 * r.value)
}

/// Closed form 2 pi / (p sin(pi/p)) for cross-checking the quadrature.
pub fn pi_p_closed_form(p: f64) -> Result<f64> {
    if p <= 1.0 {
        return Err(PxError::ExponentTooSmall(p));
    }
    Ok(2.0 * std::f64::consts::PI / (p * (std::f64::consts::PI / p).sin()))
}

/// (p - 1)^(1/p): ratio between the value of the normalized quotient at the
/// j-th constant-p mode and j pi_p / L.
pub fn quotient_scale(p: f64) -> f64 {
    (p - 1.0).powf(1.0 / p)
}

// ---------------------------------------------------------------------------
// Gauss-Legendre panels (used to accumulate the incomplete integral when
// building sin_p tables).

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 1..n {
            let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

// ---------------------------------------------------------------------------
// sin_p tables

const TABLE_SIZE: usize = 4096;

/// Monotone cubic (Fritsch-Carlson) table of sin_p on [0, pi_p/2].
struct SinPTable {
    half: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl SinPTable {
    fn build(p: f64) -> Result<SinPTable> {
        let half = pi_p(p)? / 2.0;
        let step = half / TABLE_SIZE as f64;
        let (gl_x, gl_w) = gauss_legendre(15);
        let panel = |a: f64, b: f64| -> f64 {
            let mid = 0.5 * (a + b);
            let rad = 0.5 * (b - a);
            let mut acc = 0.0;
            for (x, w) in gl_x.iter().zip(&gl_w) {
                let tau = mid + rad * x;
                let db = 1.0 - tau;
                acc += w * half_period_integrand(tau, db, p);
            }
            rad * acc
        };

        let mut values = vec![0.0; TABLE_SIZE + 1];
        let mut acc = 0.0; // arc length integral up to values[j-1]
        for j in 1..TABLE_SIZE {
            let target = j as f64 * step;
            let prev: f64 = values[j - 1];
            // predictor along the ODE ds/dt = (1 - s^p)^(1/p)
            let mut s = prev + step * (1.0 - prev.powf(p)).max(0.0).powf(1.0 / p);
            s = s.clamp(prev, 1.0 - 1e-16);
            for _ in 0..60 {
                let f = acc + panel(prev, s) - target;
                let deriv = half_period_integrand(s, 1.0 - s, p);
                let ds = f / deriv;
                let next = (s - ds).clamp(prev, 1.0 - 1e-16);
                let moved = (next - s).abs();
                s = next;
                if f.abs() < 1e-14 && moved < 1e-15 {
                    break;
                }
            }
            acc += panel(prev, s);
            values[j] = s;
        }
        values[TABLE_SIZE] = 1.0;

        // Fritsch-Carlson slopes; analytic endpoint derivatives are known
        let mut slopes = vec![0.0; TABLE_SIZE + 1];
        slopes[0] = 1.0;
        slopes[TABLE_SIZE] = 0.0;
        for i in 1..TABLE_SIZE {
            let d0 = (values[i] - values[i - 1]) / step;
            let d1 = (values[i + 1] - values[i]) / step;
            slopes[i] = if d0 <= 0.0 || d1 <= 0.0 {
                0.0
            } else {
                2.0 * d0 * d1 / (d0 + d1)
            };
        }
        Ok(SinPTable {
            half,
            step,
            values,
            slopes,
        })
    }

    /// Hermite evaluation on [0, half].
    fn eval_quarter(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.half {
            return 1.0;
        }
        let i = ((t / self.step) as usize).min(TABLE_SIZE - 1);
        let xi = (t - i as f64 * self.step) / self.step;
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let xi2 = xi * xi;
        let xi3 = xi2 * xi;
        v0 * (2.0 * xi3 - 3.0 * xi2 + 1.0)
            + m0 * (xi3 - 2.0 * xi2 + xi)
            + v1 * (-2.0 * xi3 + 3.0 * xi2)
            + m1 * (xi3 - xi2)
    }
}

fn table_for(p: f64) -> Result<Arc<SinPTable>> {
    static TABLES: OnceLock<Mutex<HashMap<u64, Arc<SinPTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().expect("sin_p table lock poisoned");
    if let Some(t) = guard.get(&p.to_bits()) {
        return Ok(t.clone());
    }
    let table = Arc::new(SinPTable::build(p)?);
    guard.insert(p.to_bits(), table.clone());
    Ok(table)
}

/// sin_p(t) for any real t (odd, 2 pi_p-antiperiodic). |sin_p| <= 1,
/// sin_p(0) = 0, sin_p(pi_p / 2) = 1.
pub fn sin_p(p: f64, t: f64) -> Result<f64> {
    if p <= 1.0 {
        return Err(PxError::ExponentTooSmall(p));
    }
    let table = table_for(p)?;
    let period = 4.0 * table.half;
    let mut r = t % period;
    if r < 0.0 {
        r += period;
    }
    // reduce to [0, pi_p] with sign
    let (r, sign) = if r > 2.0 * table.half {
        (r - 2.0 * table.half, -1.0)
    } else {
        (r, 1.0)
    };
    let r = if r > table.half { 2.0 * table.half - r } else { r };
    Ok(sign * table.eval_quarter(r))
}

// ---------------------------------------------------------------------------
// Exact constant-exponent spectra

/// Exact normalized 1D spectrum for constant exponent p on an interval of the
/// given length. Dirichlet: (p-1)^(1/p) j pi_p / L. Free boundary: mu_1 = 0
/// and mu_j = (p-1)^(1/p) (j-1) pi_p / L.
pub fn exact_spectrum_constant_p(
    p: f64,
    length: f64,
    boundary: BoundaryCondition,
    j_max: usize,
) -> Result<Spectrum> {
    if length <= 0.0 {
        return Err(PxError::Precondition(format!(
            "length must be positive, got {length}"
        )));
    }
    if j_max < 1 {
        return Err(PxError::Precondition("j_max must be >= 1".into()));
    }
    let unit = quotient_scale(p) * pi_p(p)? / length;
    let entries = (1..=j_max)
        .map(|j| {
            let halves = match boundary {
                BoundaryCondition::DirichletZero => j as f64,
                BoundaryCondition::Free => (j - 1) as f64,
            };
            SpectrumEntry {
                index: j,
                value: halves * unit,
                kind: EigenvalueKind::Exact,
            }
        })
        .collect();
    Spectrum::new(boundary, entries)
}

// ---------------------------------------------------------------------------
// Shooting oracle

/// One RK4 step of the first-order system u' = |v|^(p'-2) v,
/// v' = -lambda |u|^(p-2) u equivalent to the classical Dirichlet problem.
fn rk4_step(u: f64, v: f64, h: f64, p: f64, lambda: f64) -> (f64, f64) {
    let pc = p / (p - 1.0); // conjugate exponent
    let fu = |v: f64| crate::rayleigh::power_kernel(v, pc);
    let fv = |u: f64| -lambda * crate::rayleigh::power_kernel(u, p);
    let (k1u, k1v) = (fu(v), fv(u));
    let (k2u, k2v) = (fu(v + 0.5 * h * k1v), fv(u + 0.5 * h * k1u));
    let (k3u, k3v) = (fu(v + 0.5 * h * k2v), fv(u + 0.5 * h * k2u));
    let (k4u, k4v) = (fu(v + h * k3v), fv(u + h * k3u));
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Number of strict sign changes of u(.; lambda) on (0, length].
fn sign_changes(p: f64, lambda: f64, length: f64, steps: usize) -> usize {
    let h = length / steps as f64;
    let (mut u, mut v) = (0.0f64, 1.0f64);
    let mut last_sign = 0i8;
    let mut changes = 0;
    for _ in 0..steps {
        let (nu, nv) = rk4_step(u, v, h, p, lambda);
        u = nu;
        v = nv;
        let s = if u > 0.0 {
            1i8
        } else if u < 0.0 {
            -1i8
        } else {
            0i8
        };
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                changes += 1;
            }
            last_sign = s;
        }
    }
    changes
}

/// Independent oracle for the j-th normalized Dirichlet eigenvalue: shooting
/// on the nodal count of the classical problem, returning
/// lambda_classical^(1/p). Matches `exact_spectrum_constant_p` to ~1e-6.
pub fn shooting_eigenvalue(p: f64, length: f64, j: usize) -> Result<f64> {
    if p <= 1.0 {
        return Err(PxError::ExponentTooSmall(p));
    }
    if j < 1 {
        return Err(PxError::Precondition("mode index must be >= 1".into()));
    }
    let steps = (3000 * j).clamp(12000, 40000);
    // bracket the classical eigenvalue by doubling
    let mut hi = 1.0;
    let mut lo = 0.0;
    let mut grew = 0;
    while sign_changes(p, hi, length, steps) < j {
        lo = hi;
        hi *= 2.0;
        grew += 1;
        if grew > 200 {
            return Err(PxError::ShootingBracket { j });
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if sign_changes(p, mid, length, steps) >= j {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-11 * hi {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_p_classical_case() {
        assert!((pi_p(2.0).unwrap() - PI).abs() < 1e-10);
    }

    #[test]
    fn pi_p_cubic_case() {
        // 4 pi / (3 sqrt 3)
        let expected = 4.0 * PI / (3.0 * 3.0f64.sqrt());
        assert!((pi_p(3.0).unwrap() - expected).abs() < 1e-10);
        assert!((expected - 2.418400).abs() < 1e-6);
    }

    #[test]
    fn pi_p_large_p_limit() {
        let v = pi_p(50.0).unwrap();
        assert!((v - pi_p_closed_form(50.0).unwrap()).abs() < 1e-10);
        assert!((v - 2.0).abs() < 0.01, "pi_50 = {v}");
    }

    #[test]
    fn pi_p_rejects_bad_exponent() {
        assert!(pi_p(1.0).is_err());
        assert!(pi_p(0.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn pi_p_matches_closed_form(p in 1.05f64..50.0) {
            let quad = pi_p(p).unwrap();
            let closed = pi_p_closed_form(p).unwrap();
            prop_assert!((quad - closed).abs() <= 1e-8, "p={p}: {quad} vs {closed}");
        }
    }

    #[test]
    fn sin_p_classical_matches_sine() {
        for k in 0..200 {
            let t = -7.0 + 14.0 * k as f64 / 199.0;
            let v = sin_p(2.0, t).unwrap();
            assert!((v - t.sin()).abs() < 1e-8, "t={t}: {v} vs {}", t.sin());
        }
    }

    #[test]
    fn sin_p_structure() {
        for &p in &[1.5, 2.0, 3.0, 7.0] {
            let half = pi_p(p).unwrap() / 2.0;
            assert_eq!(sin_p(p, 0.0).unwrap(), 0.0);
            assert!((sin_p(p, half).unwrap() - 1.0).abs() < 1e-14);
            // odd and antiperiodic
            for &t in &[0.3, 0.9, 1.7] {
                let v = sin_p(p, t).unwrap();
                assert!((sin_p(p, -t).unwrap() + v).abs() < 1e-12);
                assert!((sin_p(p, t + 2.0 * half).unwrap() + v).abs() < 1e-10);
                assert!(v.abs() <= 1.0);
            }
        }
    }

    #[test]
    fn sin_p_monotone_on_quarter_period() {
        for &p in &[1.5, 3.0] {
            let half = pi_p(p).unwrap() / 2.0;
            let mut prev = -1.0;
            for k in 0..=500 {
                let v = sin_p(p, half * k as f64 / 500.0).unwrap();
                assert!(v >= prev - 1e-13);
                prev = v;
            }
        }
    }

    #[test]
    fn sin_p_matches_ode_shooting() {
        // integrate the defining IVP for p = 3 and compare mid-arc
        let p = 3.0;
        let target = pi_p(p).unwrap() / 4.0;
        let steps = 200000;
        let h = target / steps as f64;
        let (mut u, mut v) = (0.0f64, 1.0f64);
        let lambda = p - 1.0; // classical normalization of the sin_p equation
        for _ in 0..steps {
            let (nu, nv) = rk4_step(u, v, h, p, lambda);
            u = nu;
            v = nv;
        }
        let table = sin_p(p, target).unwrap();
        assert!(u > 0.0 && u < 1.0);
        assert!((table - u).abs() < 1e-8, "table {table} vs ode {u}");
    }

    #[test]
    fn exact_spectrum_classical_values() {
        let s = exact_spectrum_constant_p(2.0, 1.0, BoundaryCondition::DirichletZero, 3).unwrap();
        let v = s.values();
        assert!((v[0] - PI).abs() < 1e-10);
        assert!((v[1] - 2.0 * PI).abs() < 1e-10);
        assert!((v[2] - 3.0 * PI).abs() < 1e-10);
        let f = exact_spectrum_constant_p(2.0, 1.0, BoundaryCondition::Free, 3).unwrap();
        let fv = f.values();
        assert_eq!(fv[0], 0.0);
        assert!((fv[1] - PI).abs() < 1e-10);
        assert!((fv[2] - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn spectrum_scales_inversely_with_length() {
        for &p in &[1.5, 2.0, 3.0] {
            let s1 = exact_spectrum_constant_p(p, 1.0, BoundaryCondition::DirichletZero, 4).unwrap();
            let s2 = exact_spectrum_constant_p(p, 2.0, BoundaryCondition::DirichletZero, 4).unwrap();
            for (a, b) in s1.values().iter().zip(s2.values()) {
                assert!((a - 2.0 * b).abs() < 1e-10 * a);
            }
        }
    }

    #[test]
    fn free_below_dirichlet_pairwise() {
        for &p in &[1.5, 2.0, 3.0] {
            let d = exact_spectrum_constant_p(p, 1.0, BoundaryCondition::DirichletZero, 6).unwrap();
            let f = exact_spectrum_constant_p(p, 1.0, BoundaryCondition::Free, 6).unwrap();
            for (mu, lam) in f.values().iter().zip(d.values()) {
                assert!(mu <= &(lam + 1e-12));
            }
        }
    }

    #[test]
    fn shooting_classical_first_mode() {
        let v = shooting_eigenvalue(2.0, 1.0, 1).unwrap();
        assert!((v - PI).abs() < 1e-6, "got {v}");
    }

    #[test]
    fn shooting_agrees_with_exact_spectrum() {
        for &p in &[1.5, 2.0, 3.0] {
            let exact = exact_spectrum_constant_p(p, 1.0, BoundaryCondition::DirichletZero, 5).unwrap();
            for (j, expected) in exact.values().iter().enumerate() {
                let shot = shooting_eigenvalue(p, 1.0, j + 1).unwrap();
                assert!(
                    (shot - expected).abs() <= 1e-6 * expected,
                    "p={p} j={}: {shot} vs {expected}",
                    j + 1
                );
            }
        }
    }

    #[test]
    fn shooting_scaled_interval() {
        // p = 1.5, length 2, mode 4
        let p = 1.5;
        let expected = quotient_scale(p) * 4.0 * pi_p(p).unwrap() / 2.0;
        let shot = shooting_eigenvalue(p, 2.0, 4).unwrap();
        assert!(
            (shot - expected).abs() <= 1e-6 * expected,
            "{shot} vs {expected}"
        );
    }

    #[test]
    fn counting_of_exact_spectrum_is_linear() {
        for &p in &[1.5, 2.0, 3.0] {
            let unit = quotient_scale(p) * pi_p(p).unwrap();
            let s =
                exact_spectrum_constant_p(p, 1.0, BoundaryCondition::DirichletZero, 2000).unwrap();
            for k in 0..200 {
                let lambda = unit * (1.0 + 9.87 * k as f64); // never hits a multiple exactly
                let n = s.counting(lambda);
                let expected = (lambda / unit).ceil() as usize - 1;
                assert_eq!(n, expected.min(2000), "p={p} lambda={lambda}");
            }
        }
    }
}
