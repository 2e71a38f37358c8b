//! `qincompat`: compute incompatibility measures from observable files,
//! check the library's closed-form claims, export constructions and scan
//! random pairs.
//!
//! Exit codes: 0 success, 2 invalid input, 3 a bound or claim failed,
//! 1 any other error.

mod files;
mod report;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qincompat::construct::{degenerate_pair, commuting_subspace_pair, fourier_mub_pair, mub_triple_qubit, z_channel};
use qincompat::incompat::{
    conjecture_scan, measurement_disturbance, q_pair, q_set_matrix, BoundCheck, DisturbanceKind, MeasureKind,
};
use qincompat::measurement::{Measurement, MeasurementKind};
use qincompat::observable::HermitianObservable;
use qincompat::optimize::OptimizerConfig;

use files::{payload_of, ObservableFile, Payload};
use report::{round_sig, BoundRow, InputSummary, OptimizerMeta, OptimizerRun, Report, REPORT_SCHEMA};

#[derive(Debug)]
pub enum CliError {
    /// Input failed to parse or validate.
    Validation(String),
    /// A computed value broke a bound or claim.
    Violation(String),
    Other(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Violation(m) => write!(f, "bound violation: {m}"),
            CliError::Other(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Violation(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl From<qincompat::Error> for CliError {
    fn from(e: qincompat::Error) -> Self {
        match e {
            qincompat::Error::ParamOutOfRange(_) | qincompat::Error::DimensionMismatch { .. } => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Other(other.into()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qincompat", version, about = "Distance-based incompatibility of quantum measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    #[value(name = "1")]
    L1,
    #[value(name = "F")]
    Fidelity,
    #[value(name = "inf")]
    Inf,
}

impl From<Measure> for MeasureKind {
    fn from(m: Measure) -> Self {
        match m {
            Measure::L1 => MeasureKind::L1,
            Measure::Fidelity => MeasureKind::Fidelity,
            Measure::Inf => MeasureKind::LInf,
        }
    }
}

#[derive(Args, Clone)]
struct OptimizerArgs {
    /// Random starts per maximization, on top of the analytic seeds.
    #[arg(long, default_value_t = 32)]
    starts: usize,
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nelder-Mead iteration cap per start.
    #[arg(long = "max-iter", default_value_t = 2000)]
    max_iter: usize,
}

impl OptimizerArgs {
    fn config(&self, convergence_tol: Option<f64>) -> Result<OptimizerConfig, CliError> {
        let config = OptimizerConfig {
            n_random_starts: self.starts,
            max_iterations: self.max_iter,
            convergence_tol: convergence_tol.unwrap_or(OptimizerConfig::default().convergence_tol),
            rng_seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute a measure for observables, POVMs or instruments read from files.
    Compute(ComputeArgs),
    /// Check the closed-form claims numerically.
    Verify(VerifyArgs),
    /// Write the standard constructions as observable files.
    Construct(ConstructArgs),
    /// Sample random nondegenerate pairs and compare Q_1 or Q_inf with (1 - 1/d)/2.
    Scan(ScanArgs),
}

#[derive(Args)]
#[group(id = "mode", required = true, multiple = false)]
struct ModeArgs {
    /// Pair of projective measurements or instruments: two files, or one set file.
    #[arg(long, num_args = 1..=2, value_name = "FILE")]
    pair: Option<Vec<PathBuf>>,
    /// Pair measured through Lüders instruments: two files, or one set file.
    #[arg(long, num_args = 1..=2, value_name = "FILE")]
    luders: Option<Vec<PathBuf>>,
    /// Average over all ordered pairs of a set of observables.
    #[arg(long, num_args = 1.., value_name = "FILE")]
    set: Option<Vec<PathBuf>>,
    /// Maximal disturbance of a single measurement or instrument.
    #[arg(long, value_name = "FILE")]
    disturbance: Option<PathBuf>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long, value_enum, default_value = "F")]
    measure: Measure,
    #[command(flatten)]
    opt: OptimizerArgs,
    /// Optimizer convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or one suite name.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    opt: OptimizerArgs,
    /// Replace every claim tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Fourier mutually unbiased pair.
    Mub,
    /// Pair sharing `dc` eigenvectors with a Fourier block on the rest.
    CommutingSubspace,
    /// Nondegenerate A and two-valued B with an m-dimensional first eigenspace.
    DegeneratePair,
    /// Qubit Z-channel instrument.
    Zchannel,
    /// Qubit Z, X, Y observables.
    Triple,
    /// Qubit trine POVM.
    Trine,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Shared eigenvectors for commuting-subspace.
    #[arg(long, default_value_t = 0)]
    dc: usize,
    /// Dimension of the first eigenspace of B for degenerate-pair.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Z-channel flip probability.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fixture {
    Mub,
    Commuting,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value = "1")]
    measure: Measure,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Fixed pairs appended after the random trials.
    #[arg(long, value_enum)]
    inject: Vec<Fixture>,
    #[command(flatten)]
    opt: OptimizerArgs,
    #[arg(long)]
    tol: Option<f64>,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn kind_name(kind: MeasurementKind) -> &'static str {
    match kind {
        MeasurementKind::Projective => "projective",
        MeasurementKind::Luders => "luders",
        MeasurementKind::General => "instrument",
    }
}

fn load(paths: &[PathBuf]) -> Result<(Vec<Measurement>, Vec<InputSummary>), CliError> {
    let mut ms = Vec::new();
    let mut inputs = Vec::new();
    for p in paths {
        let source = p.display().to_string();
        let file = ObservableFile::read(p)?;
        for m in file.measurements(&source)? {
            inputs.push(InputSummary {
                source: source.clone(),
                kind: kind_name(m.kind()).to_string(),
                dim: m.dim(),
                n_outcomes: m.n_outcomes(),
                payload: payload_of(&m),
            });
            ms.push(m);
        }
    }
    Ok((ms, inputs))
}

fn exactly_two(ms: Vec<Measurement>) -> Result<[Measurement; 2], CliError> {
    let n = ms.len();
    ms.try_into()
        .map_err(|_| CliError::Validation(format!("a pair needs exactly two measurements, got {n}")))
}

fn common_dim(ms: &[Measurement]) -> Result<(), CliError> {
    if let Some(first) = ms.first() {
        if let Some(m) = ms.iter().find(|m| m.dim() != first.dim()) {
            return Err(CliError::Validation(format!(
                "dimension mismatch: {} vs {}",
                first.dim(),
                m.dim()
            )));
        }
    }
    Ok(())
}

/// A projective input measured through its Lüders instrument becomes a
/// Lüders measurement; the channel is identical, only the label changes.
fn as_luders(m: Measurement) -> Result<Measurement, CliError> {
    match m.kind() {
        MeasurementKind::Projective => Ok(Measurement::luders(m.povm().clone())?),
        MeasurementKind::Luders => Ok(m),
        MeasurementKind::General => Err(CliError::Validation(
            "--luders takes observables or POVMs, not instruments".into(),
        )),
    }
}

#[derive(Serialize)]
struct PairValues {
    directional_ab: f64,
    directional_ba: f64,
    symmetric: f64,
}

#[derive(Serialize)]
struct SetValues {
    n: usize,
    value: f64,
    directional: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct DisturbanceValues {
    d1_max: f64,
    df_max: f64,
}

#[allow(clippy::too_many_arguments)]
fn finish<V: Serialize>(
    mode: &str,
    measure: &str,
    inputs: Vec<InputSummary>,
    values: V,
    checks: &[BoundCheck],
    optimizer: OptimizerMeta,
    summary: String,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let violations: Vec<&BoundCheck> = checks.iter().filter(|c| !c.satisfied).collect();
    let report = Report {
        schema: REPORT_SCHEMA,
        command: "compute",
        mode: mode.to_string(),
        measure: measure.to_string(),
        inputs,
        values,
        bounds: checks.iter().map(BoundRow::from).collect(),
        optimizer,
        status: if violations.is_empty() { "ok" } else { "bound_violation" },
    };
    report::emit(out, &report::to_json(&report)?)?;
    if out.is_some() {
        println!("{summary}");
    }
    if violations.is_empty() {
        Ok(())
    } else {
        let names: Vec<&str> = violations.iter().map(|c| c.name.as_str()).collect();
        Err(CliError::Violation(names.join(", ")))
    }
}

fn cmd_compute(args: ComputeArgs) -> Result<(), CliError> {
    let config = args.opt.config(args.tol)?;
    let kind = MeasureKind::from(args.measure);
    let out = args.out.as_deref();
    let m = &args.mode;
    if let Some(paths) = m.pair.as_ref().or(m.luders.as_ref()) {
        let luders = m.luders.is_some();
        let (ms, inputs) = load(paths)?;
        common_dim(&ms)?;
        let [a, b] = exactly_two(ms)?;
        let (a, b) = if luders { (as_luders(a)?, as_luders(b)?) } else { (a, b) };
        let r = q_pair(kind, &a, &b, &config)?;
        let values = PairValues {
            directional_ab: round_sig(r.directional_ab.value),
            directional_ba: round_sig(r.directional_ba.value),
            symmetric: round_sig(r.symmetric),
        };
        let summary = format!(
            "Q_{}(A,B) = {} (A->B {}, B->A {})",
            kind.label(),
            values.symmetric,
            values.directional_ab,
            values.directional_ba
        );
        let meta = OptimizerMeta::new(
            &config,
            vec![OptimizerRun::new("ab", &r.directional_ab), OptimizerRun::new("ba", &r.directional_ba)],
        );
        let mode = if luders { "luders" } else { "pair" };
        return finish(mode, kind.label(), inputs, values, &r.upper_bounds, meta, summary, out);
    }
    if let Some(paths) = &m.set {
        let (ms, inputs) = load(paths)?;
        common_dim(&ms)?;
        if ms.len() < 2 {
            return Err(CliError::Validation(format!("a set needs at least two measurements, got {}", ms.len())));
        }
        let matrix = q_set_matrix(kind, &ms, &config)?;
        let n = ms.len();
        let value = matrix.iter().flatten().sum::<f64>() / (n * n) as f64;
        let values = SetValues {
            n,
            value: round_sig(value),
            directional: matrix.iter().map(|r| r.iter().map(|&x| round_sig(x)).collect()).collect(),
        };
        let mut checks = vec![BoundCheck {
            name: "unit_range".into(),
            bound: 1.0,
            measured: value,
            satisfied: value <= 1.0 + qincompat::incompat::BOUND_SLACK,
        }];
        if kind == MeasureKind::Fidelity && ms.iter().all(|m| m.kind() == MeasurementKind::Projective) {
            let bound = qincompat::incompat::ClosedForm::SetFidelityBound { n, d: ms[0].dim() }.value()?;
            checks.push(BoundCheck {
                name: "set_dimension".into(),
                bound,
                measured: value,
                satisfied: value <= bound + qincompat::incompat::BOUND_SLACK,
            });
        }
        let summary = format!("Q_{}(A_1..A_{n}) = {}", kind.label(), values.value);
        let meta = OptimizerMeta::new(&config, Vec::new());
        return finish("set", kind.label(), inputs, values, &checks, meta, summary, out);
    }
    if let Some(path) = &m.disturbance {
        let (ms, inputs) = load(std::slice::from_ref(path))?;
        let [meas] = <[Measurement; 1]>::try_from(ms)
            .map_err(|_| CliError::Validation("--disturbance takes a file with one measurement".into()))?;
        let r1 = measurement_disturbance(DisturbanceKind::L1, &meas, &[], &config)?;
        let rf = measurement_disturbance(DisturbanceKind::Fidelity, &meas, &[], &config)?;
        let values = DisturbanceValues {
            d1_max: round_sig(r1.value),
            df_max: round_sig(rf.value),
        };
        let checks = vec![
            BoundCheck {
                name: "d1_unit_range".into(),
                bound: 1.0,
                measured: r1.value,
                satisfied: r1.value <= 1.0 + qincompat::incompat::BOUND_SLACK,
            },
            BoundCheck {
                name: "df_unit_range".into(),
                bound: 1.0,
                measured: rf.value,
                satisfied: rf.value <= 1.0 + qincompat::incompat::BOUND_SLACK,
            },
        ];
        let summary = format!("D_1^max = {}, D_F^max = {}", values.d1_max, values.df_max);
        let meta = OptimizerMeta::new(&config, vec![OptimizerRun::new("d1", &r1), OptimizerRun::new("df", &rf)]);
        return finish("disturbance", "1,F", inputs, values, &checks, meta, summary, out);
    }
    unreachable!("clap requires exactly one mode")
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema: &'static str,
    command: &'static str,
    suite: &'a str,
    rng_seed: u64,
    n_claims: usize,
    n_failed: usize,
    claims: &'a [verify::Claim],
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let opts = verify::VerifyOptions {
        config: args.opt.config(None)?,
        tol_override: args.tol,
    };
    let claims = verify::run(&args.suite, &opts).map_err(CliError::Validation)?;
    for c in &claims {
        println!(
            "{} [{}] {}: measured {} vs {} ({:?}, tol {:e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.measured,
            c.reference,
            c.relation,
            c.tolerance
        );
    }
    let failed = claims.iter().filter(|c| !c.passed).count();
    println!("{} claims checked, {failed} failed", claims.len());
    if let Some(out) = &args.out {
        let report = VerifyReport {
            schema: REPORT_SCHEMA,
            command: "verify",
            suite: &args.suite,
            rng_seed: opts.config.rng_seed,
            n_claims: claims.len(),
            n_failed: failed,
            claims: &claims,
        };
        report::write_atomic(out, report::to_json(&report)?.as_bytes())?;
    }
    if failed > 0 {
        return Err(CliError::Violation(format!("{failed} claims failed")));
    }
    Ok(())
}

fn write_observable(dir: &Path, name: &str, label: &str, obs: &HermitianObservable) -> Result<PathBuf, CliError> {
    let file = ObservableFile::new(obs.dim(), Some(label.to_string()), Payload::from_observable(obs));
    let path = dir.join(name);
    report::write_atomic(&path, file.to_json().as_bytes())?;
    Ok(path)
}

fn cmd_construct(args: ConstructArgs) -> Result<(), CliError> {
    let dir = args.out.as_path();
    let mut written = Vec::new();
    match args.family {
        Family::Mub => {
            let (a, b) = fourier_mub_pair(args.dim)?;
            written.push(write_observable(dir, &format!("mub{}_a.json", args.dim), "computational basis", &a)?);
            written.push(write_observable(dir, &format!("mub{}_b.json", args.dim), "Fourier basis", &b)?);
        }
        Family::CommutingSubspace => {
            let (a, b) = commuting_subspace_pair(args.dim, args.dc)?;
            let stem = format!("commuting{}_{}", args.dim, args.dc);
            written.push(write_observable(dir, &format!("{stem}_a.json"), "A", &a)?);
            written.push(write_observable(dir, &format!("{stem}_b.json"), "B", &b)?);
        }
        Family::DegeneratePair => {
            let (a, b) = degenerate_pair(args.dim, args.m)?;
            let stem = format!("degenerate{}_{}", args.dim, args.m);
            written.push(write_observable(dir, &format!("{stem}_a.json"), "nondegenerate A", &a)?);
            written.push(write_observable(dir, &format!("{stem}_b.json"), "two-valued B", &b)?);
        }
        Family::Zchannel => {
            let inst = z_channel(args.p)?;
            let file = ObservableFile::new(2, Some(format!("Z-channel p = {}", args.p)), Payload::from_instrument(&inst));
            let path = dir.join("zchannel.json");
            report::write_atomic(&path, file.to_json().as_bytes())?;
            written.push(path);
        }
        Family::Trine => {
            let povm = qincompat::construct::trine_povm();
            let file = ObservableFile::new(2, Some("trine".into()), Payload::from_povm(&povm));
            let path = dir.join("trine.json");
            report::write_atomic(&path, file.to_json().as_bytes())?;
            written.push(path);
        }
        Family::Triple => {
            for (obs, name) in mub_triple_qubit().iter().zip(["z", "x", "y"]) {
                written.push(write_observable(dir, &format!("triple_{name}.json"), name, obs)?);
            }
        }
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn state_field(psi: &qincompat::state::PureState) -> String {
    psi.as_slice()
        .iter()
        .map(|z| format!("{}{:+}i", round_sig(z.re), round_sig(z.im)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_scan(args: ScanArgs) -> Result<(), CliError> {
    let kind = MeasureKind::from(args.measure);
    if kind == MeasureKind::Fidelity {
        return Err(CliError::Validation("scan takes --measure 1 or inf".into()));
    }
    if args.trials == 0 {
        return Err(CliError::Validation("--trials must be >= 1".into()));
    }
    let config = args.opt.config(args.tol)?;
    let mut fixtures = Vec::new();
    for f in &args.inject {
        match f {
            Fixture::Mub => {
                let (a, b) = fourier_mub_pair(args.dim)?;
                fixtures.push(("mub".to_string(), Measurement::projective(&a), Measurement::projective(&b)));
            }
            Fixture::Commuting => {
                let basis = qincompat::construct::computational_basis(args.dim);
                let up = (1..=args.dim).map(|k| k as f64).collect();
                let down = (1..=args.dim).rev().map(|k| k as f64).collect();
                let a = HermitianObservable::from_eigenbasis(basis.clone(), up)?;
                let b = HermitianObservable::from_eigenbasis(basis, down)?;
                fixtures.push(("commuting".to_string(), Measurement::projective(&a), Measurement::projective(&b)));
            }
        }
    }
    let scan = conjecture_scan(kind, args.dim, args.trials, &config, &fixtures)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trial", "seed", "value", "argmax_state"]).map_err(|e| CliError::Other(e.into()))?;
    for row in &scan.rows {
        w.write_record([
            row.trial.to_string(),
            row.seed.to_string(),
            round_sig(row.value).to_string(),
            state_field(&row.argmax),
        ])
        .map_err(|e| CliError::Other(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Other(anyhow::anyhow!("{e}")))?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Other(e.into()))?;
    match &args.out {
        Some(p) => report::write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    let summary = format!(
        "scan Q_{} d = {}: {} rows, max {} vs conjectured bound {}, counterexample: {}",
        kind.label(),
        args.dim,
        scan.rows.len(),
        round_sig(scan.max_value),
        round_sig(scan.conjectured_bound),
        if scan.counterexamples.is_empty() { "no" } else { "YES" }
    );
    eprintln!("{summary}");
    for &i in &scan.counterexamples {
        let r = &scan.rows[i];
        eprintln!("COUNTEREXAMPLE trial {} ({}) seed {} value {}", r.trial, r.label, r.seed, r.value);
    }
    for r in &scan.rows[args.trials..] {
        eprintln!("fixture {} (trial {}): {}", r.label, r.trial, round_sig(r.value));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
