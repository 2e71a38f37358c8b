//! Accessible-fidelity comparison measure evaluated on fixed rank-one POVMs.
//!
//! The measure is `1 - sup (1/(N d)) sum_m lambda_max[sum_i E_i(|xi_m><xi_m|)]`
//! where `E_i` dephases in the eigenbasis of the `i`-th observable. Only
//! fixed candidate POVMs are evaluated, so every output is an upper bound.

use rayon::prelude::*;

use crate::construct::{fourier_basis, haar_unitary, seeded_rng};
use crate::error::{Error, Result};
use crate::linalg::{check_square_finite, identity, lambda_max, max_abs, outer, ComplexMatrix, ComplexVector};
use crate::observable::HermitianObservable;

pub const RANK_ONE_COMPLETENESS_TOL: f64 = 1e-9;
/// Number of seeded Haar-random bases among the default candidates.
pub const DEFAULT_HAAR_CANDIDATES: usize = 16;

/// `{|xi_m><xi_m|}` with `sum_m |xi_m><xi_m| = I`; vectors need not be unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOnePovm {
    dim: usize,
    vectors: Vec<ComplexVector>,
}

impl RankOnePovm {
    pub fn new(vectors: Vec<ComplexVector>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Invalid("rank-one POVM needs at least one vector".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Invalid("zero-dimensional vector".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Invalid("non-finite POVM vector entry".into()));
            }
            sum += outer(v);
        }
        let deviation = max_abs(&(sum - identity(dim)));
        if deviation > RANK_ONE_COMPLETENESS_TOL {
            return Err(Error::NotComplete {
                what: "rank-one POVM",
                deviation,
            });
        }
        Ok(Self { dim, vectors })
    }

    /// Orthonormal basis as a rank-one POVM.
    pub fn from_basis(basis: Vec<ComplexVector>) -> Result<Self> {
        Self::new(basis)
    }

    /// Columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        check_square_finite(u)?;
        Self::new((0..u.ncols()).map(|k| u.column(k).into_owned()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }
}

fn check_observables(observables: &[HermitianObservable]) -> Result<usize> {
    let Some(first) = observables.first() else {
        return Err(Error::Invalid("need at least one observable".into()));
    };
    let dim = first.dim();
    for obs in observables {
        if obs.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: obs.dim(),
            });
        }
        if !obs.is_nondegenerate() {
            return Err(Error::DegenerateObservable);
        }
    }
    Ok(dim)
}

/// `(1/(N d)) sum_m lambda_max[sum_i E_i(|xi_m><xi_m|)]`; lies in `[1/d, 1]`.
pub fn acc_fid_objective(povm: &RankOnePovm, observables: &[HermitianObservable]) -> Result<f64> {
    let dim = check_observables(observables)?;
    if povm.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: povm.dim(),
        });
    }
    let bases: Vec<Vec<ComplexVector>> = observables.iter().map(|o| o.eigenbasis()).collect();
    let mut total = 0.0;
    for xi in povm.vectors() {
        let mut op = ComplexMatrix::zeros(dim, dim);
        for basis in &bases {
            for a in basis {
                let w = a.dotc(xi).norm_sqr();
                op += outer(a).scale(w);
            }
        }
        total += lambda_max(&op)?;
    }
    Ok(total / (observables.len() * dim) as f64)
}

/// Eigenbases of both observables, each eigenbasis rotated by the Fourier
/// transform, and `DEFAULT_HAAR_CANDIDATES` Haar bases seeded from `seed`.
pub fn default_candidates(a: &HermitianObservable, b: &HermitianObservable, seed: u64) -> Result<Vec<RankOnePovm>> {
    let dim = a.dim();
    let fourier = fourier_basis(dim);
    let mut out = Vec::new();
    for obs in [a, b] {
        let basis = obs.eigenbasis();
        let rotated = fourier
            .iter()
            .map(|f| {
                basis
                    .iter()
                    .zip(f.iter())
                    .fold(ComplexVector::zeros(dim), |acc, (v, &c)| acc + v * c)
            })
            .collect();
        out.push(RankOnePovm::from_basis(basis)?);
        out.push(RankOnePovm::from_basis(rotated)?);
    }
    out.push(RankOnePovm::from_basis(fourier)?);
    let mut rng = seeded_rng(seed);
    for _ in 0..DEFAULT_HAAR_CANDIDATES {
        out.push(RankOnePovm::from_unitary(&haar_unitary(dim, &mut rng))?);
    }
    Ok(out)
}

/// `min` over candidates of `1 - acc_fid_objective`, an upper bound on the
/// accessible-fidelity measure of the pair.
pub fn q_acc_upper_bound(
    a: &HermitianObservable,
    b: &HermitianObservable,
    candidates: &[RankOnePovm],
) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::Invalid("need at least one candidate POVM".into()));
    }
    let pair = [a.clone(), b.clone()];
    let values = candidates
        .par_iter()
        .map(|p| acc_fid_objective(p, &pair).map(|v| 1.0 - v))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// [`q_acc_upper_bound`] over [`default_candidates`].
pub fn q_acc_upper_bound_default(a: &HermitianObservable, b: &HermitianObservable, seed: u64) -> Result<f64> {
    check_observables(&[a.clone(), b.clone()])?;
    q_acc_upper_bound(a, b, &default_candidates(a, b, seed)?)
}
