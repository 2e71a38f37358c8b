//! Finite probability distributions and the classical distance measures.

use crate::error::{Error, Result};

pub const NEGATIVE_CLAMP_TOL: f64 = 1e-12;
pub const SUM_TOL: f64 = 1e-9;
const RENORMALIZE_DRIFT: f64 = 1e-12;
/// Outcome probabilities computed from quadratic forms carry rounding
/// noise of order `1e-16`; entries below this are taken as exact zeros so
/// the square roots in the fidelity do not amplify them.
pub const STATISTICS_NOISE_FLOOR: f64 = 1e-14;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    probs: Vec<f64>,
}

impl ProbDist {
    /// Entries down to `-1e-12` are clamped to zero; the total must be one
    /// within `1e-9` and is renormalized if it drifts past `1e-12`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_clamp(probs, NEGATIVE_CLAMP_TOL)
    }

    /// Same policy with a wider clamp window, for outcome statistics whose
    /// effects are only positive to within the POVM tolerance.
    pub(crate) fn from_statistics(mut probs: Vec<f64>) -> Result<Self> {
        for p in probs.iter_mut() {
            if p.abs() < STATISTICS_NOISE_FLOOR {
                *p = 0.0;
            }
        }
        Self::with_clamp(probs, crate::measurement::POVM_EIGEN_TOL)
    }

    fn with_clamp(mut probs: Vec<f64>, clamp: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite entry {p}")));
            }
            if *p < -clamp {
                return Err(Error::InvalidDistribution(format!("negative entry {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}"
            )));
        }
        if (total - 1.0).abs() > RENORMALIZE_DRIFT {
            for p in probs.iter_mut() {
                *p /= total;
            }
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn delta(n: usize, k: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[k] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn check_len(p: &ProbDist, q: &ProbDist) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

/// Variational distance.
pub fn d1(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_len(p, q)?;
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Bhattacharyya coefficient.
pub fn classical_fidelity(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_len(p, q)?;
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| a.sqrt() * b.sqrt())
        .sum())
}

/// `1 - F(P, Q)^2`
pub fn d_f(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    let f = classical_fidelity(p, q)?;
    Ok(1.0 - f * f)
}

/// Chebyshev distance.
pub fn d_inf(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_len(p, q)?;
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .fold(0.0, |acc, (a, b)| acc.max((a - b).abs())))
}

/// Collision entropy in bits, `-log2 sum p_i^2`.
pub fn renyi2(p: &ProbDist) -> f64 {
    let collision: f64 = p.probs.iter().map(|x| x * x).sum();
    -collision.log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(v: &[f64]) -> ProbDist {
        ProbDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn d1_examples() {
        let p = pd(&[0.2, 0.8]);
        assert_eq!(d1(&p, &p).unwrap(), 0.0);
        assert_eq!(d1(&pd(&[1.0, 0.0]), &pd(&[0.0, 1.0])).unwrap(), 1.0);
        assert!((d1(&pd(&[1.0, 0.0]), &pd(&[0.5, 0.5])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let p = pd(&[0.3, 0.7]);
        assert!((classical_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            classical_fidelity(&pd(&[1.0, 0.0]), &pd(&[0.0, 1.0])).unwrap(),
            0.0
        );
        let f = classical_fidelity(&pd(&[1.0, 0.0]), &pd(&[0.5, 0.5])).unwrap();
        assert!((f - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn d_f_examples() {
        let p = pd(&[0.3, 0.7]);
        assert!(d_f(&p, &p).unwrap().abs() < 1e-15);
        assert!((d_f(&pd(&[1.0, 0.0]), &pd(&[0.5, 0.5])).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(d_f(&pd(&[1.0, 0.0]), &pd(&[0.0, 1.0])).unwrap(), 1.0);
    }

    #[test]
    fn d_inf_examples() {
        let p = pd(&[0.3, 0.7]);
        assert_eq!(d_inf(&p, &p).unwrap(), 0.0);
        assert_eq!(d_inf(&pd(&[1.0, 0.0]), &pd(&[0.0, 1.0])).unwrap(), 1.0);
        assert!((d_inf(&pd(&[0.7, 0.3]), &pd(&[0.4, 0.6])).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn renyi2_examples() {
        assert_eq!(renyi2(&ProbDist::delta(4, 2)), 0.0);
        assert!((renyi2(&ProbDist::uniform(8)) - 3.0).abs() < 1e-14);
        assert!((renyi2(&pd(&[0.5, 0.5, 0.0])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        let err = d1(&pd(&[1.0]), &pd(&[0.5, 0.5])).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { left: 1, right: 2 });
    }

    #[test]
    fn clamps_and_renormalizes() {
        let p = ProbDist::new(vec![-1e-13, 1.0 + 5e-10]).unwrap();
        assert_eq!(p.probs()[0], 0.0);
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ProbDist::new(vec![-1e-6, 1.0 + 1e-6]).is_err());
        assert!(ProbDist::new(vec![0.5, 0.4]).is_err());
        assert!(ProbDist::new(vec![]).is_err());
    }
}
