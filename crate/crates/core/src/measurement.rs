//! POVMs, instruments, and the measurement devices built from them.

use crate::error::{Error, Result};
use crate::linalg::{
    check_square_finite, eigh, hermitian_deviation, hermitian_part, identity, max_abs, psd_sqrt,
    ComplexMatrix, ComplexVector,
};
use crate::observable::HermitianObservable;
use crate::state::PureState;

pub const POVM_EIGEN_TOL: f64 = 1e-10;
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = common_dim(&elements)?;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        let mut cleaned = Vec::with_capacity(elements.len());
        for e in &elements {
            let deviation = hermitian_deviation(e);
            if deviation > POVM_EIGEN_TOL {
                return Err(Error::NotHermitian { deviation });
            }
            let (values, _) = eigh(e)?;
            if values[0] < -POVM_EIGEN_TOL {
                return Err(Error::NotPositive {
                    min_eigenvalue: values[0],
                });
            }
            let top = values[values.len() - 1];
            if top > 1.0 + POVM_EIGEN_TOL {
                return Err(Error::ExceedsIdentity { max_eigenvalue: top });
            }
            let h = hermitian_part(e);
            sum += &h;
            cleaned.push(h);
        }
        let deviation = max_abs(&(sum - identity(dim)));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::NotComplete {
                what: "POVM",
                deviation,
            });
        }
        Ok(Self {
            dim,
            elements: cleaned,
        })
    }

    pub(crate) fn from_parts_unchecked(dim: usize, elements: Vec<ComplexMatrix>) -> Self {
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn n_outcomes(&self) -> usize {
        self.elements.len()
    }
}

/// Outcome-indexed Kraus decompositions `Phi_i(rho) = sum_k K_ik rho K_ik^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    dim: usize,
    outcomes: Vec<Vec<ComplexMatrix>>,
}

impl Instrument {
    pub fn new(outcomes: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if outcomes.iter().any(|o| o.is_empty()) {
            return Err(Error::Invalid("instrument outcome without Kraus operators".into()));
        }
        let all: Vec<ComplexMatrix> = outcomes.iter().flatten().cloned().collect();
        let dim = common_dim(&all)?;
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in &all {
            sum += k.adjoint() * k;
        }
        let deviation = max_abs(&(sum - identity(dim)));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::NotComplete {
                what: "instrument (sum of K^dagger K)",
                deviation,
            });
        }
        Ok(Self { dim, outcomes })
    }

    /// Identity channel as a one-outcome instrument.
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            outcomes: vec![vec![identity(dim)]],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Vec<ComplexMatrix>] {
        &self.outcomes
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn kraus_operators(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.outcomes.iter().flatten()
    }

    /// Effect of each outcome, `sum_k K_ik^dagger K_ik`.
    pub fn effects(&self) -> Vec<ComplexMatrix> {
        self.outcomes
            .iter()
            .map(|ks| {
                let mut e = ComplexMatrix::zeros(self.dim, self.dim);
                for k in ks {
                    e += k.adjoint() * k;
                }
                hermitian_part(&e)
            })
            .collect()
    }

    /// The POVM this instrument implements.
    pub fn povm(&self) -> Result<Povm> {
        Povm::new(self.effects())
    }
}

fn common_dim(ms: &[ComplexMatrix]) -> Result<usize> {
    let first = ms
        .first()
        .ok_or_else(|| Error::Invalid("empty operator list".into()))?;
    let dim = check_square_finite(first)?;
    for m in &ms[1..] {
        let d = check_square_finite(m)?;
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d,
            });
        }
    }
    Ok(dim)
}

/// Lüders instrument: outcome `i` has the single Kraus operator `A_i^{1/2}`.
pub fn luders_from_povm(povm: &Povm) -> Result<Instrument> {
    let mut outcomes = Vec::with_capacity(povm.n_outcomes());
    for e in povm.elements() {
        let (values, _) = eigh(e)?;
        if values[0] < -POVM_EIGEN_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: values[0],
            });
        }
        outcomes.push(vec![psd_sqrt(e)?]);
    }
    Ok(Instrument {
        dim: povm.dim(),
        outcomes,
    })
}

/// Von Neumann-Lüders instrument of an observable: one outcome per distinct
/// eigenvalue with the eigenprojector as Kraus operator.
pub fn projective_instrument(obs: &HermitianObservable) -> Instrument {
    Instrument {
        dim: obs.dim(),
        outcomes: obs
            .spectrum()
            .iter()
            .map(|s| vec![s.projector.clone()])
            .collect(),
    }
}

/// Seed states derived from a list of effects: every eigenvector of every
/// effect, the uniform superposition of each effect's eigenbasis, and the
/// normalized sum of each effect's top eigenvector. For orthogonal
/// projectors the last one weights every outcome equally.
pub fn effect_seeds(effects: &[&ComplexMatrix]) -> Vec<PureState> {
    let mut seeds = Vec::new();
    let Some(first) = effects.first() else {
        return seeds;
    };
    let dim = first.nrows();
    let mut balanced = ComplexVector::zeros(dim);
    for e in effects {
        let Ok((_, vectors)) = eigh(e) else { continue };
        let mut sum = ComplexVector::zeros(dim);
        for k in 0..vectors.ncols() {
            let v = vectors.column(k).into_owned();
            sum += &v;
            if let Ok(s) = PureState::normalized(v) {
                seeds.push(s);
            }
        }
        balanced += vectors.column(vectors.ncols() - 1);
        if let Ok(s) = PureState::normalized(sum) {
            seeds.push(s);
        }
    }
    if let Ok(s) = PureState::normalized(balanced) {
        seeds.push(s);
    }
    seeds
}

/// Anything with outcome effects whose expectations give a distribution.
pub trait Outcomes {
    fn outcome_dim(&self) -> usize;
    fn outcome_effects(&self) -> Vec<&ComplexMatrix>;
}

impl Outcomes for Povm {
    fn outcome_dim(&self) -> usize {
        self.dim
    }
    fn outcome_effects(&self) -> Vec<&ComplexMatrix> {
        self.elements.iter().collect()
    }
}

impl Outcomes for HermitianObservable {
    fn outcome_dim(&self) -> usize {
        self.dim()
    }
    fn outcome_effects(&self) -> Vec<&ComplexMatrix> {
        self.spectrum().iter().map(|s| &s.projector).collect()
    }
}

impl Outcomes for Measurement {
    fn outcome_dim(&self) -> usize {
        self.povm.dim
    }
    fn outcome_effects(&self) -> Vec<&ComplexMatrix> {
        self.povm.elements.iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    Projective,
    Luders,
    General,
}

/// A POVM together with the instrument that implements it.
#[derive(Debug, Clone)]
pub struct Measurement {
    kind: MeasurementKind,
    povm: Povm,
    instrument: Instrument,
    observable: Option<HermitianObservable>,
}

impl Measurement {
    pub fn projective(obs: &HermitianObservable) -> Self {
        Self {
            kind: MeasurementKind::Projective,
            povm: obs.povm(),
            instrument: projective_instrument(obs),
            observable: Some(obs.clone()),
        }
    }

    pub fn luders(povm: Povm) -> Result<Self> {
        let instrument = luders_from_povm(&povm)?;
        Ok(Self {
            kind: MeasurementKind::Luders,
            povm,
            instrument,
            observable: None,
        })
    }

    /// An arbitrary instrument, measuring the POVM of its effects.
    pub fn from_instrument(instrument: Instrument) -> Result<Self> {
        Ok(Self {
            kind: MeasurementKind::General,
            povm: instrument.povm()?,
            instrument,
            observable: None,
        })
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.povm.dim()
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn instrument(&self) -> &Instrument {
        &self.instrument
    }

    pub fn observable(&self) -> Option<&HermitianObservable> {
        self.observable.as_ref()
    }

    pub fn n_outcomes(&self) -> usize {
        self.povm.n_outcomes()
    }

    /// Candidate extremal states for suprema involving this measurement:
    /// eigenvectors, the uniform superposition of each eigenbasis, and a
    /// state spreading weight evenly over the outcomes.
    pub fn seed_states(&self) -> Vec<PureState> {
        match &self.observable {
            Some(obs) => obs
                .eigenbasis()
                .into_iter()
                .chain([obs.uniform_superposition(), obs.balanced_superposition()])
                .filter_map(|v| PureState::normalized(v).ok())
                .collect(),
            None => effect_seeds(&self.povm.outcome_effects()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn diag(entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            entries.len(),
            entries.iter().map(|&x| c64::new(x, 0.0)),
        ))
    }

    #[test]
    fn luders_of_projective_povm_is_projectors() {
        let p = diag(&[1.0, 0.0]);
        let q = diag(&[0.0, 1.0]);
        let povm = Povm::new(vec![p.clone(), q.clone()]).unwrap();
        let inst = luders_from_povm(&povm).unwrap();
        assert!(max_abs(&(&inst.outcomes()[0][0] - p)) < 1e-12);
        assert!(max_abs(&(&inst.outcomes()[1][0] - q)) < 1e-12);
    }

    #[test]
    fn luders_of_half_identity() {
        let half = identity(2).scale(0.5);
        let povm = Povm::new(vec![half.clone(), half]).unwrap();
        let inst = luders_from_povm(&povm).unwrap();
        let r = identity(2).scale(0.5_f64.sqrt());
        for o in inst.outcomes() {
            assert!(max_abs(&(&o[0] - &r)) < 1e-12);
        }
    }

    #[test]
    fn trine_luders_is_trace_preserving() {
        let mut elements = Vec::new();
        for k in 0..3 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let v = ComplexVector::from_vec(vec![
                c64::new((theta / 2.0).cos(), 0.0),
                c64::new((theta / 2.0).sin(), 0.0),
            ]);
            elements.push((&v * v.adjoint()).scale(2.0 / 3.0));
        }
        let povm = Povm::new(elements).unwrap();
        let inst = luders_from_povm(&povm).unwrap();
        let mut sum = ComplexMatrix::zeros(2, 2);
        for k in inst.kraus_operators() {
            sum += k.adjoint() * k;
        }
        assert!(max_abs(&(sum - identity(2))) < 1e-12);
        for (o, e) in inst.outcomes().iter().zip(povm.elements()) {
            // sqrt((2/3) |phi><phi|) = sqrt(2/3) |phi><phi|
            assert!(max_abs(&(&o[0] - e.scale((1.5_f64).sqrt()))) < 1e-12);
        }
    }

    #[test]
    fn povm_validation_errors() {
        assert!(matches!(
            Povm::new(vec![diag(&[1.0, 0.5])]),
            Err(Error::NotComplete { .. })
        ));
        assert!(matches!(
            Povm::new(vec![diag(&[-0.2, 0.0]), diag(&[1.2, 1.0])]),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            Povm::new(vec![diag(&[1.0, 1.0]), ComplexMatrix::zeros(3, 3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn instrument_requires_trace_preservation() {
        let bad = Instrument::new(vec![vec![diag(&[1.0, 0.9])]]);
        assert!(matches!(bad, Err(Error::NotComplete { .. })));
        let inst = Instrument::new(vec![vec![diag(&[1.0, 0.0])], vec![diag(&[0.0, 1.0])]]).unwrap();
        assert_eq!(inst.n_outcomes(), 2);
        assert!(inst.povm().is_ok());
    }

    #[test]
    fn projective_instrument_counts_distinct_eigenvalues() {
        let obs = HermitianObservable::new(diag(&[1.0, 1.0, 2.0])).unwrap();
        let inst = projective_instrument(&obs);
        assert_eq!(inst.n_outcomes(), 2);
        let ranks: Vec<usize> = obs.spectrum().iter().map(|s| s.rank).collect();
        assert_eq!(ranks, vec![2, 1]);
    }
}
