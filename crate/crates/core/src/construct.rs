//! Observable families, channels, and seeded random instances.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, hermitian_part, identity, ComplexMatrix, ComplexVector};
use crate::measurement::{Instrument, Povm};
use crate::observable::HermitianObservable;
use crate::state::{DensityMatrix, PureState};

/// RNG used for every seeded construction in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn computational_basis(dim: usize) -> Vec<ComplexVector> {
    (0..dim)
        .map(|k| {
            let mut v = ComplexVector::zeros(dim);
            v[k] = c64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Discrete Fourier basis, `b_j[k] = exp(2 pi i j k / n) / sqrt(n)`.
pub fn fourier_basis(n: usize) -> Vec<ComplexVector> {
    let norm = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            ComplexVector::from_iterator(
                n,
                (0..n).map(|k| {
                    let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    c64::from_polar(norm, phase)
                }),
            )
        })
        .collect()
}

fn ladder(dim: usize) -> Vec<f64> {
    (1..=dim).map(|k| k as f64).collect()
}

/// Computational-basis observable and its Fourier-basis partner, both with
/// eigenvalues `1..d`.
pub fn fourier_mub_pair(d: usize) -> Result<(HermitianObservable, HermitianObservable)> {
    if d < 2 {
        return Err(Error::ParamOutOfRange(format!("MUB pair needs d >= 2, got {d}")));
    }
    let a = HermitianObservable::from_eigenbasis(computational_basis(d), ladder(d))?;
    let b = HermitianObservable::from_eigenbasis(fourier_basis(d), ladder(d))?;
    Ok((a, b))
}

/// Z-, X- and Y-type qubit observables, pairwise mutually unbiased.
pub fn mub_triple_qubit() -> [HermitianObservable; 3] {
    let s = 0.5_f64.sqrt();
    let vec2 = |a: c64, b: c64| ComplexVector::from_vec(vec![a, b]);
    let z = computational_basis(2);
    let x = vec![
        vec2(c64::new(s, 0.0), c64::new(s, 0.0)),
        vec2(c64::new(s, 0.0), c64::new(-s, 0.0)),
    ];
    let y = vec![
        vec2(c64::new(s, 0.0), c64::new(0.0, s)),
        vec2(c64::new(s, 0.0), c64::new(0.0, -s)),
    ];
    let build = |basis| {
        HermitianObservable::from_eigenbasis(basis, vec![1.0, -1.0]).expect("qubit basis is orthonormal")
    };
    [build(z), build(x), build(y)]
}

/// Nondegenerate pair sharing the first `d_c` eigenvectors and mutually
/// unbiased (Fourier) on the remaining `d - d_c` dimensions.
pub fn commuting_subspace_pair(
    d: usize,
    d_c: usize,
) -> Result<(HermitianObservable, HermitianObservable)> {
    if d < 2 || d_c >= d {
        return Err(Error::ParamOutOfRange(format!(
            "commuting subspace needs d >= 2 and 0 <= d_c <= d - 1, got d = {d}, d_c = {d_c}"
        )));
    }
    let n = d - d_c;
    let mut b_basis = computational_basis(d)[..d_c].to_vec();
    for f in fourier_basis(n) {
        let mut v = ComplexVector::zeros(d);
        v.rows_mut(d_c, n).copy_from(&f);
        b_basis.push(v);
    }
    let a = HermitianObservable::from_eigenbasis(computational_basis(d), ladder(d))?;
    let b = HermitianObservable::from_eigenbasis(b_basis, ladder(d))?;
    Ok((a, b))
}

/// Nondegenerate computational-basis `A` and a two-valued `B = P_1 + 2 P_2`
/// whose first projector spans `m` Fourier vectors.
pub fn degenerate_pair(d: usize, m: usize) -> Result<(HermitianObservable, HermitianObservable)> {
    if d < 3 || m < 1 || 2 * m >= d {
        return Err(Error::ParamOutOfRange(format!(
            "degenerate pair needs d >= 3 and 1 <= m < d/2, got d = {d}, m = {m}"
        )));
    }
    let a = HermitianObservable::from_eigenbasis(computational_basis(d), ladder(d))?;
    let values = (0..d).map(|j| if j < m { 1.0 } else { 2.0 }).collect();
    let b = HermitianObservable::from_eigenbasis(fourier_basis(d), values)?;
    Ok((a, b))
}

/// Qubit trine POVM `(2/3)|phi_k><phi_k|` with real unit vectors at
/// angles `0, 2pi/3, 4pi/3`.
pub fn trine_povm() -> Povm {
    let elements = (0..3)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 3.0;
            let v = ComplexVector::from_vec(vec![c64::new(t.cos(), 0.0), c64::new(t.sin(), 0.0)]);
            (&v * v.adjoint()).scale(2.0 / 3.0)
        })
        .collect();
    Povm::new(elements).expect("trine elements sum to identity")
}

/// Qubit channel `p Z rho Z + (1 - p) rho` as a two-outcome instrument.
pub fn z_channel(p: f64) -> Result<Instrument> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamOutOfRange(format!("Z-channel needs 0 <= p <= 1, got {p}")));
    }
    let mut z = identity(2);
    z[(1, 1)] = c64::new(-1.0, 0.0);
    Instrument::new(vec![
        vec![z.scale(p.sqrt())],
        vec![identity(2).scale((1.0 - p).sqrt())],
    ])
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> c64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re, im).scale(0.5_f64.sqrt())
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_c64(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..dim {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { c64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v = ComplexVector::from_fn(dim, |_, _| gaussian_c64(rng));
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Nondegenerate observable with a Haar-random eigenbasis and eigenvalues `1..d`.
pub fn random_observable<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianObservable {
    let multiplicities = vec![1; dim];
    random_observable_with_multiplicities(&multiplicities, rng)
        .expect("unit multiplicities are valid")
}

/// Observable with a Haar-random eigenbasis whose `i`-th distinct eigenvalue
/// `i + 1` has the given multiplicity.
pub fn random_observable_with_multiplicities<R: Rng + ?Sized>(
    multiplicities: &[usize],
    rng: &mut R,
) -> Result<HermitianObservable> {
    if multiplicities.is_empty() || multiplicities.contains(&0) {
        return Err(Error::ParamOutOfRange("multiplicities must be positive".into()));
    }
    let dim: usize = multiplicities.iter().sum();
    let u = haar_unitary(dim, rng);
    let basis = (0..dim).map(|k| u.column(k).into_owned()).collect();
    let values = multiplicities
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| std::iter::repeat_n((i + 1) as f64, m))
        .collect();
    HermitianObservable::from_eigenbasis(basis, values)
}

/// POVM from Ginibre positives `G_i`, normalized as `S^{-1/2} G_i S^{-1/2}`
/// with `S = sum_i G_i`.
pub fn random_povm<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> Result<Povm> {
    if dim < 1 || n < 1 {
        return Err(Error::ParamOutOfRange(format!("povm needs dim, n >= 1, got {dim}, {n}")));
    }
    let positives: Vec<ComplexMatrix> = (0..n)
        .map(|_| {
            let x = ginibre(dim, dim, rng);
            &x * x.adjoint()
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim, dim);
    for g in &positives {
        total += g;
    }
    let (values, vectors) = eigh(&total)?;
    if values[0] <= 0.0 {
        return Err(Error::NumericalFailure("singular POVM normalizer".into()));
    }
    let inv_sqrt = ComplexVector::from_iterator(dim, values.iter().map(|&v| c64::new(1.0 / v.sqrt(), 0.0)));
    let s = &vectors * ComplexMatrix::from_diagonal(&inv_sqrt) * vectors.adjoint();
    Povm::new(
        positives
            .iter()
            .map(|g| hermitian_part(&(&s * g * &s)))
            .collect(),
    )
}

/// Full-rank density matrix `X X^dagger / tr(X X^dagger)` from a Ginibre `X`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let x = ginibre(dim, dim, rng);
    let g = &x * x.adjoint();
    let tr = g.trace().re;
    DensityMatrix::new(hermitian_part(&g.unscale(tr))).expect("Ginibre state is valid")
}

/// Projector onto the span of `rank` Haar-random orthonormal vectors.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let u = haar_unitary(dim, rng);
    let mut p = ComplexMatrix::zeros(dim, dim);
    for k in 0..rank.min(dim) {
        let c = u.column(k);
        p += c * c.adjoint();
    }
    hermitian_part(&p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    Observable,
    Povm { outcomes: usize },
    PureState,
    Unitary,
}

#[derive(Debug, Clone)]
pub enum RandomInstance {
    Observable(HermitianObservable),
    Povm(Povm),
    PureState(PureState),
    Unitary(ComplexMatrix),
}

/// Deterministic random fixture of the requested kind.
pub fn random_instance(dim: usize, kind: RandomKind, seed: u64) -> Result<RandomInstance> {
    if dim < 2 {
        return Err(Error::ParamOutOfRange(format!("random instances need dim >= 2, got {dim}")));
    }
    let mut rng = seeded_rng(seed);
    Ok(match kind {
        RandomKind::Observable => RandomInstance::Observable(random_observable(dim, &mut rng)),
        RandomKind::Povm { outcomes } => RandomInstance::Povm(random_povm(dim, outcomes, &mut rng)?),
        RandomKind::PureState => RandomInstance::PureState(random_pure_state(dim, &mut rng)),
        RandomKind::Unitary => RandomInstance::Unitary(haar_unitary(dim, &mut rng)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::measurement::Outcomes;

    fn overlap_sq(a: &ComplexVector, b: &ComplexVector) -> f64 {
        a.dotc(b).norm_sqr()
    }

    #[test]
    fn qubit_mub_is_hadamard() {
        let (a, b) = fourier_mub_pair(2).unwrap();
        for x in a.eigenbasis() {
            for y in b.eigenbasis() {
                assert!((overlap_sq(&x, &y) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fourier_pairs_are_unbiased() {
        for d in 2..=9 {
            let (a, b) = fourier_mub_pair(d).unwrap();
            assert!(a.invariant_residuals().within_tolerance());
            assert!(b.invariant_residuals().within_tolerance());
            for x in a.eigenbasis() {
                for y in b.eigenbasis() {
                    assert!((overlap_sq(&x, &y) - 1.0 / d as f64).abs() < 1e-12);
                }
            }
        }
        assert!(fourier_mub_pair(1).is_err());
    }

    #[test]
    fn qubit_triple_is_pairwise_unbiased() {
        let triple = mub_triple_qubit();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                for x in triple[i].eigenbasis() {
                    for y in triple[j].eigenbasis() {
                        assert!((overlap_sq(&x, &y) - 0.5).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn commuting_subspace_overlap_pattern() {
        for &(d, dc) in &[(4, 2), (6, 3), (4, 1), (8, 5), (3, 2), (5, 0)] {
            let (a, b) = commuting_subspace_pair(d, dc).unwrap();
            let (av, bv) = (a.eigenbasis(), b.eigenbasis());
            for i in 0..d {
                for j in 0..d {
                    let o = av[i].dotc(&bv[j]).norm();
                    let expected = if i < dc || j < dc {
                        if i == j { 1.0 } else { 0.0 }
                    } else {
                        1.0 / ((d - dc) as f64).sqrt()
                    };
                    assert!((o - expected).abs() < 1e-12, "d={d} dc={dc} i={i} j={j}");
                }
            }
        }
        assert!(commuting_subspace_pair(4, 4).is_err());
    }

    #[test]
    fn commuting_subspace_with_no_shared_vectors_is_fourier() {
        let (a, b) = commuting_subspace_pair(5, 0).unwrap();
        let (fa, fb) = fourier_mub_pair(5).unwrap();
        assert!(max_abs(&(a.matrix() - fa.matrix())) < 1e-15);
        assert!(max_abs(&(b.matrix() - fb.matrix())) < 1e-15);
    }

    #[test]
    fn degenerate_pair_projector_weights() {
        for &(d, m) in &[(4, 1), (5, 2), (7, 3)] {
            let (a, b) = degenerate_pair(d, m).unwrap();
            assert_eq!(b.n_outcomes(), 2);
            assert_eq!(b.spectrum()[0].rank, m);
            assert_eq!(b.spectrum()[1].rank, d - m);
            let p1 = &b.spectrum()[0].projector;
            for v in a.eigenbasis() {
                let w = crate::linalg::expectation(p1, v.as_slice());
                assert!((w - m as f64 / d as f64).abs() < 1e-12);
            }
        }
        assert!(degenerate_pair(4, 2).is_err());
        assert!(degenerate_pair(2, 1).is_err());
    }

    #[test]
    fn z_channel_endpoints() {
        assert!(z_channel(0.0).is_ok());
        assert!(z_channel(1.0).is_ok());
        assert!(z_channel(1.5).is_err());
        assert!(z_channel(-0.1).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        for d in 2..=6 {
            let u = haar_unitary(d, &mut rng);
            assert!(max_abs(&(u.adjoint() * &u - identity(d))) < 1e-12);
        }
    }

    #[test]
    fn random_povm_sums_to_identity() {
        let povm = match random_instance(2, RandomKind::Povm { outcomes: 3 }, 11).unwrap() {
            RandomInstance::Povm(p) => p,
            _ => unreachable!(),
        };
        let mut sum = ComplexMatrix::zeros(2, 2);
        for e in povm.outcome_effects() {
            sum += e;
        }
        assert!(max_abs(&(sum - identity(2))) < 1e-10);
    }

    #[test]
    fn random_instances_are_deterministic() {
        let a = random_instance(3, RandomKind::PureState, 5).unwrap();
        let b = random_instance(3, RandomKind::PureState, 5).unwrap();
        match (a, b) {
            (RandomInstance::PureState(x), RandomInstance::PureState(y)) => {
                assert!((x.amplitudes().norm() - 1.0).abs() < 1e-12);
                for (p, q) in x.as_slice().iter().zip(y.as_slice()) {
                    assert_eq!(p.re.to_bits(), q.re.to_bits());
                    assert_eq!(p.im.to_bits(), q.im.to_bits());
                }
            }
            _ => unreachable!(),
        }
        assert!(random_instance(1, RandomKind::Unitary, 0).is_err());
    }
}
