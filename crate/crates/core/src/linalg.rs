//! Dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

#[allow(non_camel_case_types)]
pub type c64 = Complex<f64>;

/// Square complex matrix. Shape and finiteness are checked where the
/// matrix enters a validated type.
pub type ComplexMatrix = DMatrix<c64>;

pub type ComplexVector = DVector<c64>;

const EIGEN_MAX_SWEEPS: usize = 10_000;

/// Relative size below which an eigenvalue of a positive semidefinite
/// matrix is rounding noise. Square roots would lift such noise from
/// `1e-16` to `1e-8`, so it is treated as zero.
pub const EIGEN_NOISE_FLOOR: f64 = 1e-14;

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Check that `m` is square with finite entries and return its dimension.
pub fn check_square_finite(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            let z = m[(row, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(m.nrows())
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(M + M^dagger) / 2`
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending with
/// eigenvectors as the matching columns.
pub fn eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.nrows();
    let sym = hermitian_part(m);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Positive square root of a positive semidefinite matrix; eigenvalues
/// below `EIGEN_NOISE_FLOOR` relative to the largest are set to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = eigh(m)?;
    let floor = EIGEN_NOISE_FLOOR * values.last().map_or(1.0, |v| v.abs().max(1.0));
    let roots: Vec<c64> = values
        .iter()
        .map(|&v| c64::new(if v > floor { v.sqrt() } else { 0.0 }, 0.0))
        .collect();
    let scaled = &vectors * ComplexMatrix::from_diagonal(&DVector::from_vec(roots));
    Ok(hermitian_part(&(scaled * vectors.adjoint())))
}

/// `|v><v|`
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// `Re <v|M|v>`
pub fn expectation(m: &ComplexMatrix, v: &[c64]) -> f64 {
    let n = v.len();
    let mut acc = c64::new(0.0, 0.0);
    for j in 0..n {
        let mut row = c64::new(0.0, 0.0);
        for i in 0..n {
            row += v[i].conj() * m[(i, j)];
        }
        acc += row * v[j];
    }
    acc.re
}

/// `M v` into a fresh vector.
pub fn apply(m: &ComplexMatrix, v: &[c64]) -> Vec<c64> {
    let n = v.len();
    let mut out = vec![c64::new(0.0, 0.0); n];
    for j in 0..n {
        let vj = v[j];
        for i in 0..n {
            out[i] += m[(i, j)] * vj;
        }
    }
    out
}

/// `Re tr(A B)` without forming the product.
pub fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Sum of moduli of eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let (values, _) = eigh(m)?;
    Ok(values.iter().map(|v| v.abs()).sum())
}

/// Sum of singular values of an arbitrary square matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    m.singular_values().iter().sum()
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(m: &ComplexMatrix) -> Result<f64> {
    let (values, _) = eigh(m)?;
    Ok(*values.last().expect("non-empty spectrum"))
}
