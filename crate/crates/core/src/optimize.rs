//! Suprema of scalar objectives over pure states.
//!
//! A pure state in `C^d` is searched as `2d` real coordinates; every probe is
//! normalized before the objective sees it. The search evaluates every
//! analytic seed exactly, then runs a multi-start Nelder-Mead from Haar-random
//! starting points. The reported value is always an attained objective value,
//! hence a lower bound on the supremum.
//!
//! Restricting to pure states loses nothing for the objectives in this crate:
//! both outcome distributions are affine in the state, `D_1` and `D_inf` are
//! jointly convex and the classical fidelity is jointly concave, so the
//! supremum over the convex state space sits at an extreme point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construct::random_pure_state;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexVector};
use crate::state::PureState;

/// Tolerance within which an analytic seed counts as attaining a known bound.
pub const GAP_CERTIFY_TOL: f64 = 1e-8;

const INITIAL_STEP: f64 = 0.25;
const MAX_RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub n_random_starts: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub rng_seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_random_starts: 32,
            max_iterations: 2000,
            convergence_tol: 1e-10,
            rng_seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::ParamOutOfRange("max_iterations must be positive".into()));
        }
        if self.convergence_tol.is_nan() || self.convergence_tol <= 0.0 {
            return Err(Error::ParamOutOfRange("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    AnalyticSeed,
    RandomStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapStatus {
    /// An analytic seed reaches the known upper bound.
    Certified,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub value: f64,
    pub argmax: PureState,
    pub provenance: Provenance,
    pub starts_used: usize,
    pub seeds_used: usize,
    /// Best value over the analytic seeds alone.
    pub best_seed_value: Option<f64>,
}

impl OptResult {
    pub fn gap_status(&self, known_upper_bound: f64) -> GapStatus {
        match self.best_seed_value {
            Some(v) if v >= known_upper_bound - GAP_CERTIFY_TOL => GapStatus::Certified,
            _ => GapStatus::Unknown,
        }
    }
}

fn checked<F>(objective: &F, psi: &PureState) -> Result<f64>
where
    F: Fn(&PureState) -> f64,
{
    let value = objective(psi);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::ObjectiveNaN { value })
    }
}

fn to_state(x: &[f64]) -> Option<PureState> {
    let d = x.len() / 2;
    let v = ComplexVector::from_iterator(d, (0..d).map(|k| c64::new(x[2 * k], x[2 * k + 1])));
    PureState::normalized(v).ok()
}

fn to_coords(psi: &PureState) -> Vec<f64> {
    psi.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

struct LocalBest {
    value: f64,
    state: PureState,
}

/// Adaptive-coefficient Nelder-Mead maximizing `objective(normalize(x))`,
/// restarted around the incumbent until it stops improving.
fn nelder_mead<F>(
    objective: &F,
    start: &PureState,
    max_iterations: usize,
    tol: f64,
) -> Result<LocalBest>
where
    F: Fn(&PureState) -> f64,
{
    let n = 2 * start.dim();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    // Minimizes the negated objective; unnormalizable probes are rejected.
    let eval = |x: &[f64]| -> Result<(f64, Option<PureState>)> {
        match to_state(x) {
            Some(s) => Ok((-checked(objective, &s)?, Some(s))),
            None => Ok((f64::INFINITY, None)),
        }
    };

    let mut best = LocalBest {
        value: checked(objective, start)?,
        state: start.clone(),
    };
    let mut iterations = 0;
    for _ in 0..=MAX_RESTARTS {
        let origin = to_coords(&best.state);
        let mut simplex: Vec<(Vec<f64>, f64, Option<PureState>)> = Vec::with_capacity(n + 1);
        simplex.push((origin.clone(), -best.value, Some(best.state.clone())));
        for i in 0..n {
            let mut x = origin.clone();
            x[i] += INITIAL_STEP;
            let (f, s) = eval(&x)?;
            simplex.push((x, f, s));
        }
        while iterations < max_iterations {
            iterations += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[n].1 - simplex[0].1 <= tol {
                break;
            }
            let mut centroid = vec![0.0; n];
            for (x, _, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let worst = simplex[n].0.clone();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(alpha);
            let (fr, sr) = eval(&xr)?;
            if fr < simplex[0].1 {
                let xe = along(alpha * gamma);
                let (fe, se) = eval(&xe)?;
                simplex[n] = if fe < fr { (xe, fe, se) } else { (xr, fr, sr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr, sr);
            } else {
                let outside = fr < simplex[n].1;
                let xc = if outside { along(alpha * rho) } else { along(-rho) };
                let (fc, sc) = eval(&xc)?;
                if fc < fr.min(simplex[n].1) {
                    simplex[n] = (xc, fc, sc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = x0
                            .iter()
                            .zip(&vertex.0)
                            .map(|(a, b)| a + sigma * (b - a))
                            .collect();
                        let (f, s) = eval(&x)?;
                        *vertex = (x, f, s);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = -simplex[0].1 - best.value;
        if improved > 0.0 {
            if let Some(s) = simplex[0].2.take() {
                best = LocalBest {
                    value: -simplex[0].1,
                    state: s,
                };
            }
        }
        if improved <= tol || iterations >= max_iterations {
            break;
        }
    }
    Ok(best)
}

/// Best objective value over `seeds` and `config.n_random_starts` local
/// searches. Start `k` draws its initial state from the ChaCha stream `k`
/// of `config.rng_seed`, so results are reproducible and independent of
/// thread scheduling. Ties keep the earliest candidate, seeds first.
pub fn maximize_over_pure_states<F>(
    objective: F,
    dim: usize,
    seeds: &[PureState],
    config: &OptimizerConfig,
) -> Result<OptResult>
where
    F: Fn(&PureState) -> f64 + Sync,
{
    config.validate()?;
    if dim < 2 {
        return Err(Error::ParamOutOfRange(format!("dim must be >= 2, got {dim}")));
    }
    if let Some(s) = seeds.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }

    let mut best: Option<(f64, PureState, Provenance)> = None;
    let mut best_seed_value: Option<f64> = None;
    for s in seeds {
        let v = checked(&objective, s)?;
        if best_seed_value.is_none_or(|b| v > b) {
            best_seed_value = Some(v);
        }
        if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
            best = Some((v, s.clone(), Provenance::AnalyticSeed));
        }
    }

    let local: Vec<Result<LocalBest>> = (0..config.n_random_starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            rng.set_stream(k as u64);
            let start = random_pure_state(dim, &mut rng);
            nelder_mead(&objective, &start, config.max_iterations, config.convergence_tol)
        })
        .collect();
    for r in local {
        let r = r?;
        if best.as_ref().is_none_or(|(b, _, _)| r.value > *b) {
            best = Some((r.value, r.state, Provenance::RandomStart));
        }
    }

    let (value, argmax, provenance) = best.ok_or_else(|| {
        Error::ParamOutOfRange("no seeds and no random starts to evaluate".into())
    })?;
    Ok(OptResult {
        value,
        argmax,
        provenance,
        starts_used: config.n_random_starts,
        seeds_used: seeds.len(),
        best_seed_value,
    })
}
