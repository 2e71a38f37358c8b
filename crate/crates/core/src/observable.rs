//! Self-adjoint observables and their grouped spectral decomposition.

use crate::error::{Error, Result};
use crate::linalg::{
    c64, check_square_finite, eigh, hermitian_deviation, hermitian_part, identity, max_abs,
    ComplexMatrix, ComplexVector,
};
use crate::measurement::Povm;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const PROJECTOR_TOL: f64 = 1e-9;
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
const ORTHONORMAL_TOL: f64 = 1e-10;

/// Relative grouping tolerance applied to `max |A_ij|`.
pub const DEFAULT_RELATIVE_GROUP_TOL: f64 = 1e-8;

/// One distinct eigenvalue with its eigenprojector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProjector {
    pub eigenvalue: f64,
    pub projector: ComplexMatrix,
    pub rank: usize,
    basis: Vec<ComplexVector>,
}

impl SpectralProjector {
    /// Orthonormal vectors spanning the eigenspace.
    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: ComplexMatrix,
    spectrum: Vec<SpectralProjector>,
}

impl HermitianObservable {
    /// Decompose `matrix` with the default relative grouping tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let tol = (DEFAULT_RELATIVE_GROUP_TOL * max_abs(&matrix)).max(f64::MIN_POSITIVE);
        spectral_decompose(&matrix, tol)
    }

    /// Build `sum_k eigenvalues[k] |v_k><v_k|` from an orthonormal basis.
    ///
    /// Projectors are assembled from the given vectors directly, so no
    /// eigensolver noise enters. Equal eigenvalues (within the default
    /// relative tolerance) are grouped into one projector.
    pub fn from_eigenbasis(vectors: Vec<ComplexVector>, eigenvalues: Vec<f64>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::ParamOutOfRange("empty eigenbasis".into()));
        }
        if eigenvalues.len() != dim {
            return Err(Error::LengthMismatch {
                left: dim,
                right: eigenvalues.len(),
            });
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        if eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::Invalid("non-finite eigenvalue".into()));
        }
        for i in 0..dim {
            for j in i..dim {
                let ip = vectors[i].dotc(&vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (ip - c64::new(target, 0.0)).norm() > ORTHONORMAL_TOL {
                    return Err(Error::Invalid(format!(
                        "eigenbasis is not orthonormal at ({i}, {j})"
                    )));
                }
            }
        }
        let scale = eigenvalues.iter().fold(0.0_f64, |a, e| a.max(e.abs()));
        let tol = (DEFAULT_RELATIVE_GROUP_TOL * scale).max(f64::MIN_POSITIVE);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let sorted: Vec<(f64, ComplexVector)> = order
            .into_iter()
            .map(|k| (eigenvalues[k], vectors[k].clone()))
            .collect();
        let spectrum = group_spectrum(sorted, tol);
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for sp in &spectrum {
            matrix += sp.projector.scale(sp.eigenvalue);
        }
        Ok(Self { matrix, spectrum })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &[SpectralProjector] {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum.iter().map(|s| s.eigenvalue).collect()
    }

    /// Number of distinct eigenvalues.
    pub fn n_outcomes(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.spectrum.len() == self.dim()
    }

    /// All eigenvectors, ordered by eigenvalue.
    pub fn eigenbasis(&self) -> Vec<ComplexVector> {
        self.spectrum
            .iter()
            .flat_map(|s| s.basis.iter().cloned())
            .collect()
    }

    /// A state giving every eigenprojector weight `1/r`: the normalized sum
    /// of the first basis vector of each eigenspace.
    pub fn balanced_superposition(&self) -> ComplexVector {
        let r = self.spectrum.len();
        let mut v = ComplexVector::zeros(self.dim());
        for s in &self.spectrum {
            v += &s.basis[0];
        }
        v.scale(1.0 / (r as f64).sqrt())
    }

    /// Normalized sum of all eigenvectors.
    pub fn uniform_superposition(&self) -> ComplexVector {
        let mut v = ComplexVector::zeros(self.dim());
        for b in self.eigenbasis() {
            v += b;
        }
        v.scale(1.0 / (self.dim() as f64).sqrt())
    }

    /// The projection-valued measure as a POVM, one element per eigenvalue.
    pub fn povm(&self) -> Povm {
        Povm::from_parts_unchecked(
            self.dim(),
            self.spectrum.iter().map(|s| s.projector.clone()).collect(),
        )
    }

    /// Worst deviation across the decomposition invariants:
    /// idempotence, orthogonality, completeness and reconstruction.
    pub fn invariant_residuals(&self) -> SpectralResiduals {
        let d = self.dim();
        let mut idempotence = 0.0_f64;
        let mut orthogonality = 0.0_f64;
        let mut sum = ComplexMatrix::zeros(d, d);
        let mut recon = ComplexMatrix::zeros(d, d);
        for (i, si) in self.spectrum.iter().enumerate() {
            let p = &si.projector;
            idempotence = idempotence.max(max_abs(&(p * p - p)));
            for sj in &self.spectrum[i + 1..] {
                orthogonality = orthogonality.max(max_abs(&(p * &sj.projector)));
            }
            sum += p;
            recon += p.scale(si.eigenvalue);
        }
        SpectralResiduals {
            idempotence,
            orthogonality,
            completeness: max_abs(&(sum - identity(d))),
            reconstruction: max_abs(&(recon - &self.matrix)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResiduals {
    pub idempotence: f64,
    pub orthogonality: f64,
    pub completeness: f64,
    pub reconstruction: f64,
}

impl SpectralResiduals {
    pub fn within_tolerance(&self) -> bool {
        self.idempotence <= PROJECTOR_TOL
            && self.orthogonality <= PROJECTOR_TOL
            && self.completeness <= PROJECTOR_TOL
            && self.reconstruction <= RECONSTRUCTION_TOL
    }
}

fn group_spectrum(sorted: Vec<(f64, ComplexVector)>, tol: f64) -> Vec<SpectralProjector> {
    let mut groups: Vec<(Vec<f64>, Vec<ComplexVector>)> = Vec::new();
    let mut last: Option<f64> = None;
    for (value, vector) in sorted {
        match (last, groups.last_mut()) {
            (Some(prev), Some(group)) if value - prev <= tol => {
                group.0.push(value);
                group.1.push(vector);
            }
            _ => groups.push((vec![value], vec![vector])),
        }
        last = Some(value);
    }
    groups
        .into_iter()
        .map(|(values, basis)| {
            let dim = basis[0].len();
            let mut p = ComplexMatrix::zeros(dim, dim);
            for v in &basis {
                p += v * v.adjoint();
            }
            SpectralProjector {
                eigenvalue: values.iter().sum::<f64>() / values.len() as f64,
                projector: hermitian_part(&p),
                rank: basis.len(),
                basis,
            }
        })
        .collect()
}

/// Spectral decomposition with eigenvalues closer than `group_tol` (as a
/// chain of adjacent gaps) merged into a single eigenprojector.
pub fn spectral_decompose(matrix: &ComplexMatrix, group_tol: f64) -> Result<HermitianObservable> {
    check_square_finite(matrix)?;
    if group_tol.is_nan() || group_tol <= 0.0 {
        return Err(Error::ParamOutOfRange(format!(
            "group_tol must be positive, got {group_tol}"
        )));
    }
    let deviation = hermitian_deviation(matrix);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let (values, vectors) = eigh(matrix)?;
    let sorted = values
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, vectors.column(k).into_owned()))
        .collect();
    let spectrum = group_spectrum(sorted, group_tol);
    // Merged eigenvalues move by at most the width of their group, so the
    // matrix is replaced by its grouped reconstruction.
    let spread = spectrum
        .iter()
        .map(|s| s.rank as f64 * group_tol)
        .fold(0.0, f64::max);
    let d = matrix.nrows();
    let mut grouped = ComplexMatrix::zeros(d, d);
    for s in &spectrum {
        grouped += s.projector.scale(s.eigenvalue);
    }
    let drift = max_abs(&(&grouped - matrix));
    let scale = max_abs(matrix).max(1.0);
    let obs = HermitianObservable {
        matrix: hermitian_part(&grouped),
        spectrum,
    };
    let residuals = obs.invariant_residuals();
    if !residuals.within_tolerance() || drift > RECONSTRUCTION_TOL * scale + spread {
        return Err(Error::NumericalFailure(format!(
            "spectral decomposition residuals too large: {residuals:?}, drift {drift:e}"
        )));
    }
    Ok(obs)
}

/// `max |(AB - BA)_ij|`
pub fn commutator_maxnorm(a: &HermitianObservable, b: &HermitianObservable) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (ma, mb) = (a.matrix(), b.matrix());
    Ok(max_abs(&(ma * mb - mb * ma)))
}
