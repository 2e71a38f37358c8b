//! Incompatibility measures, maximal disturbances, closed-form values and
//! bound checks.
//!
//! `Q_alpha(A -> B)` is the supremum over states of the `alpha`-distance
//! between the statistics of `B` measured after `A` and of `B` alone. The
//! symmetric value divides the sum of both directions by four, so it is
//! capped at one half rather than one; that normalization is kept as-is.

use rayon::prelude::*;

use crate::construct::{random_observable, seeded_rng};
use crate::error::{Error, Result};
use crate::measurement::{effect_seeds, Instrument, Measurement, MeasurementKind, Outcomes};
use crate::optimize::{maximize_over_pure_states, OptResult, OptimizerConfig};
use crate::prob::{classical_fidelity, d1, d_inf, ProbDist};
use crate::quantum::{
    measure_dist, measure_dist_pure, pure_channel_overlap, pure_channel_trace_distance,
    sequential_dist, sequential_dist_pure,
};
use crate::state::{DensityMatrix, PureState};

/// Slack allowed when comparing a measured value with a proven bound.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    L1,
    Fidelity,
    LInf,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [MeasureKind::L1, MeasureKind::Fidelity, MeasureKind::LInf];

    /// `D_1`, `1 - F^2` or `D_inf` between two distributions.
    pub fn distance(self, p: &ProbDist, q: &ProbDist) -> Result<f64> {
        match self {
            MeasureKind::L1 => d1(p, q),
            MeasureKind::Fidelity => {
                let f = classical_fidelity(p, q)?;
                Ok(1.0 - f * f)
            }
            MeasureKind::LInf => d_inf(p, q),
        }
    }

    /// Disturbance measure that upper-bounds this incompatibility measure.
    pub fn disturbance(self) -> DisturbanceKind {
        match self {
            MeasureKind::L1 | MeasureKind::LInf => DisturbanceKind::L1,
            MeasureKind::Fidelity => DisturbanceKind::Fidelity,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MeasureKind::L1 => "1",
            MeasureKind::Fidelity => "F",
            MeasureKind::LInf => "inf",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "L1" | "l1" => Ok(MeasureKind::L1),
            "F" | "f" | "fidelity" => Ok(MeasureKind::Fidelity),
            "inf" | "Inf" | "LInf" | "linf" => Ok(MeasureKind::LInf),
            other => Err(Error::ParamOutOfRange(format!("unknown measure '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisturbanceKind {
    /// `sup 1/2 tr|Phi(rho) - rho|`
    L1,
    /// `1 - (inf F(Phi(rho), rho))^2`
    Fidelity,
}

/// `rho -> D_kind(Pr^{first -> second}_rho, Pr^{second}_rho)`.
pub struct IncompatibilityObjective<'a, M: Outcomes + ?Sized> {
    kind: MeasureKind,
    first: &'a Instrument,
    second: &'a M,
}

impl<'a, M: Outcomes + ?Sized> IncompatibilityObjective<'a, M> {
    pub fn new(kind: MeasureKind, first: &'a Instrument, second: &'a M) -> Result<Self> {
        if first.dim() != second.outcome_dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: second.outcome_dim(),
            });
        }
        Ok(Self {
            kind,
            first,
            second,
        })
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    /// Quadratic-form evaluation on a pure state.
    pub fn eval_pure(&self, psi: &PureState) -> Result<f64> {
        let after = sequential_dist_pure(self.first, self.second, psi)?;
        let alone = measure_dist_pure(self.second, psi)?;
        self.kind.distance(&after, &alone)
    }

    /// Evaluation through the channel on an arbitrary state.
    pub fn eval_mixed(&self, rho: &DensityMatrix) -> Result<f64> {
        let after = sequential_dist(self.first, self.second, rho)?;
        let alone = measure_dist(self.second, rho)?;
        self.kind.distance(&after, &alone)
    }
}

fn maximize_incompatibility<M: Outcomes + Sync + ?Sized>(
    objective: &IncompatibilityObjective<'_, M>,
    seeds: &[PureState],
    config: &OptimizerConfig,
) -> Result<OptResult> {
    let f = |s: &PureState| objective.eval_pure(s).unwrap_or(f64::NAN);
    maximize_over_pure_states(f, objective.dim(), seeds, config)
}

/// Directional incompatibility `Q_kind(first -> second)`, seeded with the
/// eigenvectors of every effect of both measurements.
pub fn q_directional<M: Outcomes + Sync + ?Sized>(
    kind: MeasureKind,
    first: &Instrument,
    second: &M,
    config: &OptimizerConfig,
) -> Result<OptResult> {
    let mut seeds = effect_seeds(&first.effects().iter().collect::<Vec<_>>());
    seeds.extend(effect_seeds(&second.outcome_effects()));
    q_directional_with_seeds(kind, first, second, &seeds, config)
}

pub fn q_directional_with_seeds<M: Outcomes + Sync + ?Sized>(
    kind: MeasureKind,
    first: &Instrument,
    second: &M,
    seeds: &[PureState],
    config: &OptimizerConfig,
) -> Result<OptResult> {
    let objective = IncompatibilityObjective::new(kind, first, second)?;
    maximize_incompatibility(&objective, seeds, config)
}

fn pair_seeds(a: &Measurement, b: &Measurement) -> Vec<PureState> {
    let mut seeds = a.seed_states();
    seeds.extend(b.seed_states());
    seeds
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    fn new(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Self {
            name: name.into(),
            bound,
            measured,
            satisfied: measured <= bound + BOUND_SLACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncompatReport {
    pub kind: MeasureKind,
    pub directional_ab: OptResult,
    pub directional_ba: OptResult,
    /// `(Q(A -> B) + Q(B -> A)) / 4`
    pub symmetric: f64,
    pub upper_bounds: Vec<BoundCheck>,
    pub bound_violations: Vec<BoundCheck>,
}

/// Both directions for a pair, without bound checks.
pub fn q_pair_values(
    kind: MeasureKind,
    a: &Measurement,
    b: &Measurement,
    config: &OptimizerConfig,
) -> Result<(OptResult, OptResult)> {
    let seeds = pair_seeds(a, b);
    let ab = q_directional_with_seeds(kind, a.instrument(), b, &seeds, config)?;
    let ba = q_directional_with_seeds(kind, b.instrument(), a, &seeds, config)?;
    Ok((ab, ba))
}

/// Symmetric incompatibility of a pair, with every applicable upper bound
/// evaluated and violations collected.
pub fn q_pair(
    kind: MeasureKind,
    a: &Measurement,
    b: &Measurement,
    config: &OptimizerConfig,
) -> Result<IncompatReport> {
    let (ab, ba) = q_pair_values(kind, a, b, config)?;
    let symmetric = (ab.value + ba.value) / 4.0;
    let mut report = IncompatReport {
        kind,
        directional_ab: ab,
        directional_ba: ba,
        symmetric,
        upper_bounds: Vec::new(),
        bound_violations: Vec::new(),
    };
    let checks = check_bounds(&report, &BoundContext { a, b, config })?;
    report.bound_violations = checks.iter().filter(|c| !c.satisfied).cloned().collect();
    report.upper_bounds = checks;
    Ok(report)
}

/// `(1/N^2) sum_{i != j} Q(A_i -> A_j)`
pub fn q_set(kind: MeasureKind, measurements: &[Measurement], config: &OptimizerConfig) -> Result<f64> {
    let matrix = q_set_matrix(kind, measurements, config)?;
    let n = measurements.len() as f64;
    Ok(matrix.iter().flatten().sum::<f64>() / (n * n))
}

/// Matrix of directional values `Q(A_i -> A_j)` with a zero diagonal.
pub fn q_set_matrix(
    kind: MeasureKind,
    measurements: &[Measurement],
    config: &OptimizerConfig,
) -> Result<Vec<Vec<f64>>> {
    let n = measurements.len();
    if n < 2 {
        return Err(Error::ParamOutOfRange(format!("need at least two observables, got {n}")));
    }
    let dim = measurements[0].dim();
    if let Some(m) = measurements.iter().find(|m| m.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    let seeds: Vec<PureState> = measurements.iter().flat_map(|m| m.seed_states()).collect();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i][j] = q_directional_with_seeds(
                    kind,
                    measurements[i].instrument(),
                    &measurements[j],
                    &seeds,
                    config,
                )?
                .value;
            }
        }
    }
    Ok(out)
}

/// Maximal disturbance of an instrument over pure states.
pub fn disturbance_max(
    kind: DisturbanceKind,
    inst: &Instrument,
    config: &OptimizerConfig,
) -> Result<OptResult> {
    let seeds = effect_seeds(&inst.effects().iter().collect::<Vec<_>>());
    disturbance_max_with_seeds(kind, inst, &seeds, config)
}

pub fn disturbance_max_with_seeds(
    kind: DisturbanceKind,
    inst: &Instrument,
    seeds: &[PureState],
    config: &OptimizerConfig,
) -> Result<OptResult> {
    match kind {
        DisturbanceKind::L1 => maximize_over_pure_states(
            |s| pure_channel_trace_distance(inst, s).unwrap_or(f64::NAN),
            inst.dim(),
            seeds,
            config,
        ),
        DisturbanceKind::Fidelity => maximize_over_pure_states(
            |s| pure_channel_overlap(inst, s).map_or(f64::NAN, |f2| 1.0 - f2),
            inst.dim(),
            seeds,
            config,
        ),
    }
}

/// Maximal disturbance of a measurement, seeded with its own seed states
/// plus `extra_seeds`.
pub fn measurement_disturbance(
    kind: DisturbanceKind,
    meas: &Measurement,
    extra_seeds: &[PureState],
    config: &OptimizerConfig,
) -> Result<OptResult> {
    let mut seeds = meas.seed_states();
    seeds.extend(effect_seeds(&meas.instrument().effects().iter().collect::<Vec<_>>()));
    seeds.extend_from_slice(extra_seeds);
    disturbance_max_with_seeds(kind, meas.instrument(), &seeds, config)
}

/// Exact values and bounds with a known closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `1 - 1/d`, the ceiling on `Q_F(A -> B)` in dimension `d`.
    DirectionalFidelityBound { d: usize },
    /// `(1 - 1/d) / 2` for a mutually unbiased pair.
    MubSymmetric { d: usize },
    /// `1 - 1/(d - d_c)`
    CommutingSubspaceDirectional { d: usize, d_c: usize },
    /// `(1 - 1/(d - d_c)) / 2`
    CommutingSubspaceSymmetric { d: usize, d_c: usize },
    /// `(1 - (d_c + 1)/d) / 2`, the accessible-fidelity bound.
    AccessibleFidelityBound { d: usize, d_c: usize },
    /// `1 - 1/N_A` for a Lüders instrument with `N_A` outcomes.
    LudersBound { n_outcomes: usize },
    /// `1 - 1/r` for a projective measurement with `r` distinct outcomes.
    DegenerateDisturbance { r: usize },
    /// `(1 - 1/N)(1 - 1/d)` for `N` observables.
    SetFidelityBound { n: usize, d: usize },
    /// `p` for the Z-channel.
    ZChannelDisturbance { p: f64 },
}

impl ClosedForm {
    pub fn value(self) -> Result<f64> {
        let out_of_range = |msg: String| Err(Error::ParamOutOfRange(msg));
        match self {
            ClosedForm::DirectionalFidelityBound { d } | ClosedForm::MubSymmetric { d } if d < 2 => {
                out_of_range(format!("d must be >= 2, got {d}"))
            }
            ClosedForm::DirectionalFidelityBound { d } => Ok(1.0 - 1.0 / d as f64),
            ClosedForm::MubSymmetric { d } => Ok(0.5 * (1.0 - 1.0 / d as f64)),
            ClosedForm::CommutingSubspaceDirectional { d, d_c }
            | ClosedForm::CommutingSubspaceSymmetric { d, d_c }
            | ClosedForm::AccessibleFidelityBound { d, d_c }
                if d < 2 || d_c >= d =>
            {
                out_of_range(format!("need d >= 2 and 0 <= d_c <= d - 1, got d = {d}, d_c = {d_c}"))
            }
            ClosedForm::CommutingSubspaceDirectional { d, d_c } => Ok(1.0 - 1.0 / (d - d_c) as f64),
            ClosedForm::CommutingSubspaceSymmetric { d, d_c } => {
                Ok(0.5 * (1.0 - 1.0 / (d - d_c) as f64))
            }
            ClosedForm::AccessibleFidelityBound { d, d_c } => {
                Ok(0.5 * (1.0 - (d_c + 1) as f64 / d as f64))
            }
            ClosedForm::LudersBound { n_outcomes: 0 } | ClosedForm::DegenerateDisturbance { r: 0 } => {
                out_of_range("outcome count must be >= 1".into())
            }
            ClosedForm::LudersBound { n_outcomes } => Ok(1.0 - 1.0 / n_outcomes as f64),
            ClosedForm::DegenerateDisturbance { r } => Ok(1.0 - 1.0 / r as f64),
            ClosedForm::SetFidelityBound { n, d } if n < 1 || d < 2 => {
                out_of_range(format!("need n >= 1 and d >= 2, got n = {n}, d = {d}"))
            }
            ClosedForm::SetFidelityBound { n, d } => Ok((1.0 - 1.0 / n as f64) * (1.0 - 1.0 / d as f64)),
            ClosedForm::ZChannelDisturbance { p } if !(0.0..=1.0).contains(&p) => {
                out_of_range(format!("need 0 <= p <= 1, got {p}"))
            }
            ClosedForm::ZChannelDisturbance { p } => Ok(p),
        }
    }
}

pub fn closed_form(form: ClosedForm) -> Result<f64> {
    form.value()
}

/// The measurements behind a report, needed to evaluate disturbances.
pub struct BoundContext<'a> {
    pub a: &'a Measurement,
    pub b: &'a Measurement,
    pub config: &'a OptimizerConfig,
}

/// Evaluate every upper bound that applies to the report:
///
/// * disturbance domination for both directions (all measures, all
///   instruments), with each direction's maximizer added as a disturbance
///   seed;
/// * `Q_F(A -> B) <= 1 - 1/d` when `A` is projective;
/// * `Q_F(A -> B) <= 1 - 1/N_A` when `A` is projective or Lüders;
/// * `Q_F(A, B) <= (1 - 1/d)/2` when both are projective.
pub fn check_bounds(report: &IncompatReport, ctx: &BoundContext<'_>) -> Result<Vec<BoundCheck>> {
    let d = ctx.a.dim();
    let mut checks = Vec::new();
    let directions = [
        ("ab", ctx.a, &report.directional_ab),
        ("ba", ctx.b, &report.directional_ba),
    ];
    for (label, first, result) in directions {
        let disturbance = measurement_disturbance(
            report.kind.disturbance(),
            first,
            std::slice::from_ref(&result.argmax),
            ctx.config,
        )?;
        checks.push(BoundCheck::new(
            format!("disturbance_{label}"),
            disturbance.value,
            result.value,
        ));
        checks.push(BoundCheck::new(format!("unit_range_{label}"), 1.0, result.value));
        if report.kind == MeasureKind::Fidelity {
            if first.kind() == MeasurementKind::Projective {
                checks.push(BoundCheck::new(
                    format!("dimension_{label}"),
                    ClosedForm::DirectionalFidelityBound { d }.value()?,
                    result.value,
                ));
            }
            if matches!(first.kind(), MeasurementKind::Projective | MeasurementKind::Luders) {
                checks.push(BoundCheck::new(
                    format!("luders_outcomes_{label}"),
                    ClosedForm::LudersBound {
                        n_outcomes: first.n_outcomes(),
                    }
                    .value()?,
                    result.value,
                ));
            }
        }
    }
    if report.kind == MeasureKind::Fidelity
        && ctx.a.kind() == MeasurementKind::Projective
        && ctx.b.kind() == MeasurementKind::Projective
    {
        checks.push(BoundCheck::new(
            "dimension_symmetric",
            ClosedForm::MubSymmetric { d }.value()?,
            report.symmetric,
        ));
    }
    Ok(checks)
}

/// Tolerance above `(1 - 1/d)/2` before a scan row counts as a counterexample.
pub const CONJECTURE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub trial: usize,
    pub seed: u64,
    pub label: String,
    pub value: f64,
    pub argmax: PureState,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub kind: MeasureKind,
    pub dim: usize,
    pub conjectured_bound: f64,
    pub rows: Vec<ScanRow>,
    pub max_value: f64,
    /// Indices into `rows` exceeding the conjectured bound.
    pub counterexamples: Vec<usize>,
}

fn scan_row(
    kind: MeasureKind,
    trial: usize,
    seed: u64,
    label: String,
    a: &Measurement,
    b: &Measurement,
    config: &OptimizerConfig,
) -> Result<ScanRow> {
    let (ab, ba) = q_pair_values(kind, a, b, &config.with_seed(seed))?;
    let argmax = if ab.value >= ba.value { ab.argmax } else { ba.argmax };
    Ok(ScanRow {
        trial,
        seed,
        label,
        value: (ab.value + ba.value) / 4.0,
        argmax,
    })
}

/// Symmetric `Q_1` or `Q_inf` over random nondegenerate pairs, compared
/// with the conjectured ceiling `(1 - 1/d)/2`. Trial `t` uses seed
/// `config.rng_seed + t` for both the pair and the optimizer. `fixtures`
/// are appended after the random trials and use `config.rng_seed`.
pub fn conjecture_scan(
    kind: MeasureKind,
    dim: usize,
    n_trials: usize,
    config: &OptimizerConfig,
    fixtures: &[(String, Measurement, Measurement)],
) -> Result<ScanReport> {
    if kind == MeasureKind::Fidelity {
        return Err(Error::ParamOutOfRange(
            "conjecture scan applies to the L1 and LInf measures".into(),
        ));
    }
    if n_trials == 0 && fixtures.is_empty() {
        return Err(Error::ParamOutOfRange("n_trials must be >= 1".into()));
    }
    let bound = ClosedForm::MubSymmetric { d: dim }.value()?;
    let mut rows: Vec<ScanRow> = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let seed = config.rng_seed.wrapping_add(t as u64);
            let mut rng = seeded_rng(seed);
            let a = Measurement::projective(&random_observable(dim, &mut rng));
            let b = Measurement::projective(&random_observable(dim, &mut rng));
            scan_row(kind, t, seed, "random".into(), &a, &b, config)
        })
        .collect::<Result<_>>()?;
    for (k, (label, a, b)) in fixtures.iter().enumerate() {
        if a.dim() != dim || b.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if a.dim() != dim { a.dim() } else { b.dim() },
            });
        }
        rows.push(scan_row(kind, n_trials + k, config.rng_seed, label.clone(), a, b, config)?);
    }
    let max_value = rows.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let counterexamples = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value > bound + CONJECTURE_SLACK)
        .map(|(i, _)| i)
        .collect();
    Ok(ScanReport {
        kind,
        dim,
        conjectured_bound: bound,
        rows,
        max_value,
        counterexamples,
    })
}
