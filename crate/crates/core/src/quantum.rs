//! Measurement statistics, channels, and state distances.

use crate::error::{Error, Result};
use crate::linalg::{
    apply, c64, expectation, outer, psd_sqrt, trace_norm, trace_norm_hermitian,
    trace_product_re, ComplexMatrix, ComplexVector,
};
use crate::measurement::{Instrument, Outcomes};
use crate::prob::ProbDist;
use crate::state::{DensityMatrix, PureState};

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Outcome distribution `tr[M_j rho]`.
pub fn measure_dist<M: Outcomes + ?Sized>(meas: &M, rho: &DensityMatrix) -> Result<ProbDist> {
    check_dim(meas.outcome_dim(), rho.dim())?;
    let probs = meas
        .outcome_effects()
        .into_iter()
        .map(|e| trace_product_re(e, rho.matrix()))
        .collect();
    ProbDist::from_statistics(probs)
}

/// `sum_ik K_ik rho K_ik^dagger`
pub fn apply_channel(inst: &Instrument, rho: &DensityMatrix) -> Result<DensityMatrix> {
    check_dim(inst.dim(), rho.dim())?;
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in inst.kraus_operators() {
        out += k * rho.matrix() * k.adjoint();
    }
    Ok(DensityMatrix::from_channel_output(out))
}

/// Statistics of `second` after the state has passed through `first`.
pub fn sequential_dist<M: Outcomes + ?Sized>(
    first: &Instrument,
    second: &M,
    rho: &DensityMatrix,
) -> Result<ProbDist> {
    check_dim(second.outcome_dim(), first.dim())?;
    measure_dist(second, &apply_channel(first, rho)?)
}

/// `tr[M_j |psi><psi|]` evaluated as quadratic forms.
pub fn measure_dist_pure<M: Outcomes + ?Sized>(meas: &M, psi: &PureState) -> Result<ProbDist> {
    check_dim(meas.outcome_dim(), psi.dim())?;
    let probs = meas
        .outcome_effects()
        .into_iter()
        .map(|e| expectation(e, psi.as_slice()))
        .collect();
    ProbDist::from_statistics(probs)
}

/// Pure-state form of [`sequential_dist`]: `sum_k <K_k psi| M_j |K_k psi>`.
pub fn sequential_dist_pure<M: Outcomes + ?Sized>(
    first: &Instrument,
    second: &M,
    psi: &PureState,
) -> Result<ProbDist> {
    check_dim(first.dim(), psi.dim())?;
    check_dim(second.outcome_dim(), psi.dim())?;
    let branches: Vec<Vec<c64>> = first
        .kraus_operators()
        .map(|k| apply(k, psi.as_slice()))
        .collect();
    let probs = second
        .outcome_effects()
        .into_iter()
        .map(|e| branches.iter().map(|phi| expectation(e, phi)).sum())
        .collect();
    ProbDist::from_statistics(probs)
}

/// `1/2 tr|rho - sigma|`
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let diff = rho.matrix() - sigma.matrix();
    Ok((0.5 * trace_norm_hermitian(&diff)?).clamp(0.0, 1.0))
}

/// Uhlmann fidelity `tr sqrt(rho^{1/2} sigma rho^{1/2})`, evaluated as the
/// trace norm of `rho^{1/2} sigma^{1/2}`.
pub fn quantum_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dim(rho.dim(), sigma.dim())?;
    let f = trace_norm(&(psd_sqrt(rho.matrix())? * psd_sqrt(sigma.matrix())?));
    if !f.is_finite() {
        return Err(Error::NumericalFailure("fidelity square root broke down".into()));
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `F(Phi(|psi><psi|), |psi><psi|) = sqrt(sum_k |<psi|K_k|psi>|^2)`.
pub fn pure_channel_fidelity(inst: &Instrument, psi: &PureState) -> Result<f64> {
    Ok(pure_channel_overlap(inst, psi)?.sqrt())
}

/// `<psi| Phi(|psi><psi|) |psi>`, the squared fidelity with the input.
pub fn pure_channel_overlap(inst: &Instrument, psi: &PureState) -> Result<f64> {
    check_dim(inst.dim(), psi.dim())?;
    let v = psi.as_slice();
    let total: f64 = inst
        .kraus_operators()
        .map(|k| {
            let kv = apply(k, v);
            let amp: c64 = v.iter().zip(&kv).map(|(a, b)| a.conj() * b).sum();
            amp.norm_sqr()
        })
        .sum();
    Ok(total.clamp(0.0, 1.0))
}

/// `1/2 tr|Phi(|psi><psi|) - |psi><psi||`
pub fn pure_channel_trace_distance(inst: &Instrument, psi: &PureState) -> Result<f64> {
    check_dim(inst.dim(), psi.dim())?;
    let v = psi.as_slice();
    let proj = outer(psi.amplitudes());
    let mut diff = -proj;
    for k in inst.kraus_operators() {
        let kv = ComplexVector::from_vec(apply(k, v));
        diff += outer(&kv);
    }
    Ok((0.5 * trace_norm_hermitian(&diff)?).clamp(0.0, 1.0))
}
