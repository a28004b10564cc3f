//! Ordered eigenvalue lists with provenance.

use serde::{Deserialize, Serialize};

use crate::error::{PxError, Result};
use crate::gridfn::BoundaryCondition;

/// Where an eigenvalue estimate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenvalueKind {
    /// Closed-form constant-exponent value.
    Exact,
    /// Converged descent iterate.
    Descent,
    /// Certified upper estimate from nodal gluing.
    NodalUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub value: f64,
    pub kind: EigenvalueKind,
}

/// Nondecreasing eigenvalue list for one boundary condition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub boundary: BoundaryCondition,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn new(boundary: BoundaryCondition, entries: Vec<SpectrumEntry>) -> Result<Self> {
        for w in entries.windows(2) {
            if w[1].value < w[0].value - 1e-12 {
                return Err(PxError::Precondition(format!(
                    "spectrum not nondecreasing: {} after {}",
                    w[1].value, w[0].value
                )));
            }
        }
        Ok(Spectrum { boundary, entries })
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Strict counting function N(lambda) = #{j : lambda_j < lambda}.
    pub fn counting(&self, lambda: f64) -> usize {
        self.entries.iter().filter(|e| e.value < lambda).count()
    }
}

/// Strict count of spectrum values below `lambda`.
pub fn counting_function(spectrum: &Spectrum, lambda: f64) -> usize {
    spectrum.counting(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dirichlet_pi_spectrum(j_max: usize) -> Spectrum {
        Spectrum::new(
            BoundaryCondition::DirichletZero,
            (1..=j_max)
                .map(|j| SpectrumEntry {
                    index: j,
                    value: j as f64 * PI,
                    kind: EigenvalueKind::Exact,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn strict_counting() {
        let s = dirichlet_pi_spectrum(10);
        assert_eq!(counting_function(&s, 10.0), 3); // pi, 2pi, 3pi < 10 < 4pi
        assert_eq!(counting_function(&s, PI), 0); // strict at an eigenvalue
        assert_eq!(counting_function(&s, 0.5), 0);
        assert_eq!(counting_function(&s, 1e9), 10);
    }

    #[test]
    fn counting_monotone() {
        let s = dirichlet_pi_spectrum(30);
        let mut prev = 0;
        for k in 0..200 {
            let n = counting_function(&s, 0.5 * k as f64);
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn disorder_rejected() {
        let r = Spectrum::new(
            BoundaryCondition::Free,
            vec![
                SpectrumEntry {
                    index: 1,
                    value: 2.0,
                    kind: EigenvalueKind::Exact,
                },
                SpectrumEntry {
                    index: 2,
                    value: 1.0,
                    kind: EigenvalueKind::Exact,
                },
            ],
        );
        assert!(r.is_err());
    }
}
