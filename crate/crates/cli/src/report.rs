//! Schema-versioned JSON reports and atomic output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use qincompat::incompat::BoundCheck;
use qincompat::optimize::{OptResult, OptimizerConfig, Provenance};

use crate::CliError;

pub const REPORT_SCHEMA: &str = "qincompat-report/1";
pub const SIGNIFICANT_DIGITS: usize = 10;

/// Round to `SIGNIFICANT_DIGITS` significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub source: String,
    pub kind: String,
    pub dim: usize,
    pub n_outcomes: usize,
    pub payload: crate::files::Payload,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub name: String,
    pub bound: f64,
    pub measured: f64,
    pub satisfied: bool,
}

impl From<&BoundCheck> for BoundRow {
    fn from(c: &BoundCheck) -> Self {
        Self {
            name: c.name.clone(),
            bound: round_sig(c.bound),
            measured: round_sig(c.measured),
            satisfied: c.satisfied,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerRun {
    pub label: String,
    pub value: f64,
    pub provenance: &'static str,
    pub seeds_used: usize,
    pub starts_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_seed_value: Option<f64>,
}

impl OptimizerRun {
    pub fn new(label: impl Into<String>, r: &OptResult) -> Self {
        Self {
            label: label.into(),
            value: round_sig(r.value),
            provenance: match r.provenance {
                Provenance::AnalyticSeed => "analytic_seed",
                Provenance::RandomStart => "random_start",
            },
            seeds_used: r.seeds_used,
            starts_used: r.starts_used,
            best_seed_value: r.best_seed_value.map(round_sig),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerMeta {
    pub n_random_starts: usize,
    pub max_iterations: usize,
    pub convergence_tol: f64,
    pub rng_seed: u64,
    pub runs: Vec<OptimizerRun>,
}

impl OptimizerMeta {
    pub fn new(config: &OptimizerConfig, runs: Vec<OptimizerRun>) -> Self {
        Self {
            n_random_starts: config.n_random_starts,
            max_iterations: config.max_iterations,
            convergence_tol: config.convergence_tol,
            rng_seed: config.rng_seed,
            runs,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<V: Serialize> {
    pub schema: &'static str,
    pub command: &'static str,
    pub mode: String,
    pub measure: String,
    pub inputs: Vec<InputSummary>,
    pub values: V,
    pub bounds: Vec<BoundRow>,
    pub optimizer: OptimizerMeta,
    pub status: &'static str,
}

/// `serde_json` writes NaN and infinities as `null`; optional fields are
/// skipped when empty, so any `null` marks a non-finite number.
fn contains_null(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Array(xs) => xs.iter().any(contains_null),
        serde_json::Value::Object(m) => m.values().any(contains_null),
        _ => false,
    }
}

/// Pretty JSON, refusing anything that is not finite.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Other(e.into()))?;
    if contains_null(&v) {
        return Err(CliError::Other(anyhow::anyhow!("report contains a non-finite number")));
    }
    serde_json::to_string_pretty(&v).map_err(|e| CliError::Other(e.into()))
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Other(e.into()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Other(e.into()))?;
    tmp.write_all(contents).map_err(|e| CliError::Other(e.into()))?;
    tmp.as_file().sync_all().map_err(|e| CliError::Other(e.into()))?;
    tmp.persist(path).map_err(|e| CliError::Other(e.error.into()))?;
    Ok(())
}

/// Write to `out` if given, else to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.25), 0.25);
        assert_eq!(round_sig(1.0 / 3.0), 0.3333333333);
        assert_eq!(round_sig(-2.0 / 3.0 * 1e-5), -6.666666667e-6);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn non_finite_is_rejected() {
        #[derive(Serialize)]
        struct X {
            v: f64,
        }
        assert!(to_json(&X { v: f64::NAN }).is_err());
        assert!(to_json(&X { v: 1.0 }).is_ok());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
    }
}
