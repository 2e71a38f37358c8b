use crate::error::{Error, Result};
use crate::linalg::{
    c64, check_square_finite, eigh, hermitian_deviation, hermitian_part, identity, outer,
    ComplexMatrix, ComplexVector,
};

pub const PURE_NORM_TOL: f64 = 1e-12;
pub const DENSITY_TOL: f64 = 1e-10;

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ParamOutOfRange("pure state of dimension 0".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("non-finite amplitude".into()));
        }
        let deviation = (amplitudes.norm_squared() - 1.0).abs();
        if deviation > PURE_NORM_TOL {
            return Err(Error::NotNormalized {
                what: "pure state",
                deviation,
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescale an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Invalid(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        Self::new(amplitudes.unscale(norm))
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::ParamOutOfRange(format!("basis index {k} >= {dim}")));
        }
        let mut v = ComplexVector::zeros(dim);
        v[k] = c64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn as_slice(&self) -> &[c64] {
        self.amplitudes.as_slice()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> c64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|psi><psi|`
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: outer(&self.amplitudes),
        }
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let deviation = hermitian_deviation(&matrix);
        if deviation > DENSITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = matrix.trace();
        let deviation = (tr - c64::new(1.0, 0.0)).norm();
        if deviation > DENSITY_TOL {
            return Err(Error::NotNormalized {
                what: "density matrix trace",
                deviation,
            });
        }
        let (values, _) = eigh(&matrix)?;
        if values[0] < -DENSITY_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: values[0],
            });
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Wrap the output of a trace-preserving completely positive map. Only
    /// the Hermitian part is kept.
    pub(crate) fn from_channel_output(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Spectral decomposition `rho = sum_k w_k |psi_k><psi_k|`, dropping
    /// weights that are zero to machine precision.
    pub fn pure_components(&self) -> Result<Vec<(f64, PureState)>> {
        let (values, vectors) = eigh(&self.matrix)?;
        let mut out = Vec::new();
        for (k, w) in values.into_iter().enumerate() {
            if w > 1e-14 {
                out.push((w, PureState::normalized(vectors.column(k).into_owned())?));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_norm_is_checked() {
        let v = ComplexVector::from_vec(vec![c64::new(1.0, 0.0), c64::new(1.0, 0.0)]);
        assert!(matches!(
            PureState::new(v.clone()),
            Err(Error::NotNormalized { .. })
        ));
        let psi = PureState::normalized(v).unwrap();
        assert!((psi.amplitudes().norm_squared() - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(ComplexVector::zeros(2)).is_err());
    }

    #[test]
    fn density_matrix_checks() {
        let m = identity(2).scale(0.5);
        assert!(DensityMatrix::new(m).is_ok());
        assert!(matches!(
            DensityMatrix::new(identity(2)),
            Err(Error::NotNormalized { .. })
        ));
        let neg = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![
            c64::new(1.5, 0.0),
            c64::new(-0.5, 0.0),
        ]));
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn pure_components_reassemble() {
        let psi = PureState::normalized(ComplexVector::from_vec(vec![
            c64::new(1.0, 0.0),
            c64::new(0.0, 2.0),
        ]))
        .unwrap();
        let m = psi.density().matrix().scale(0.7) + identity(2).scale(0.15);
        let rho = DensityMatrix::new(m.clone()).unwrap();
        let mut back = ComplexMatrix::zeros(2, 2);
        for (w, phi) in rho.pure_components().unwrap() {
            back += phi.density().matrix().scale(w);
        }
        assert!(crate::linalg::max_abs(&(back - m)) < 1e-13);
    }
}
