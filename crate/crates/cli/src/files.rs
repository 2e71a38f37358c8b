//! Versioned JSON files for observables, POVMs and instruments.
//!
//! Complex entries are `[re, im]` pairs. `serde_json` is built with
//! `float_roundtrip`, so every `f64` survives a write/read cycle bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use qincompat::linalg::{c64, ComplexMatrix, ComplexVector};
use qincompat::measurement::{Instrument, Measurement, MeasurementKind, Povm};
use qincompat::observable::HermitianObservable;

use crate::CliError;

pub const FORMAT_VERSION: &str = "1";

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableFile {
    pub format_version: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    Hermitian(MatrixRows),
    Basis { vectors: Vec<Vec<Entry>>, eigenvalues: Vec<f64> },
    Povm(Vec<MatrixRows>),
    Instrument(Vec<Vec<MatrixRows>>),
    /// Several payloads sharing `dim`, e.g. a pair for `compute --pair`.
    Set(Vec<Payload>),
}

fn entry(z: c64) -> Entry {
    [z.re, z.im]
}

pub fn matrix_rows(m: &ComplexMatrix) -> MatrixRows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| entry(m[(i, j)])).collect()).collect()
}

fn vector_entries(v: &ComplexVector) -> Vec<Entry> {
    v.iter().map(|&z| entry(z)).collect()
}

fn to_matrix(rows: &MatrixRows, dim: usize, field: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Validation(format!("{field}: expected a {dim}x{dim} matrix")));
    }
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| c64::new(rows[i][j][0], rows[i][j][1])))
}

fn to_vector(entries: &[Entry], dim: usize, field: &str) -> Result<ComplexVector, CliError> {
    if entries.len() != dim {
        return Err(CliError::Validation(format!(
            "{field}: expected {dim} entries, found {}",
            entries.len()
        )));
    }
    Ok(ComplexVector::from_iterator(dim, entries.iter().map(|e| c64::new(e[0], e[1]))))
}

fn validation(field: &str) -> impl Fn(qincompat::Error) -> CliError + '_ {
    move |e| CliError::Validation(format!("{field}: {e}"))
}

impl Payload {
    pub fn from_observable(obs: &HermitianObservable) -> Self {
        let mut vectors = Vec::new();
        let mut eigenvalues = Vec::new();
        for s in obs.spectrum() {
            for v in s.basis() {
                vectors.push(vector_entries(v));
                eigenvalues.push(s.eigenvalue);
            }
        }
        Payload::Basis { vectors, eigenvalues }
    }

    pub fn from_povm(povm: &Povm) -> Self {
        Payload::Povm(povm.elements().iter().map(matrix_rows).collect())
    }

    pub fn from_instrument(inst: &Instrument) -> Self {
        Payload::Instrument(
            inst.outcomes()
                .iter()
                .map(|ks| ks.iter().map(matrix_rows).collect())
                .collect(),
        )
    }

    /// Observables and bases become projective measurements, POVMs their
    /// Lüders instruments, instruments are taken as given.
    pub fn to_measurements(&self, dim: usize, field: &str) -> Result<Vec<Measurement>, CliError> {
        match self {
            Payload::Hermitian(rows) => {
                let m = to_matrix(rows, dim, field)?;
                let obs = HermitianObservable::new(m).map_err(validation(field))?;
                Ok(vec![Measurement::projective(&obs)])
            }
            Payload::Basis { vectors, eigenvalues } => {
                let vs = vectors
                    .iter()
                    .enumerate()
                    .map(|(k, v)| to_vector(v, dim, &format!("{field}.vectors[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let obs = HermitianObservable::from_eigenbasis(vs, eigenvalues.clone()).map_err(validation(field))?;
                Ok(vec![Measurement::projective(&obs)])
            }
            Payload::Povm(elements) => {
                let es = elements
                    .iter()
                    .enumerate()
                    .map(|(k, e)| to_matrix(e, dim, &format!("{field}.povm[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let povm = Povm::new(es).map_err(validation(field))?;
                Ok(vec![Measurement::luders(povm).map_err(validation(field))?])
            }
            Payload::Instrument(outcomes) => {
                let mut parsed = Vec::with_capacity(outcomes.len());
                for (k, ks) in outcomes.iter().enumerate() {
                    parsed.push(
                        ks.iter()
                            .enumerate()
                            .map(|(j, m)| to_matrix(m, dim, &format!("{field}.instrument[{k}][{j}]")))
                            .collect::<Result<Vec<_>, _>>()?,
                    );
                }
                let inst = Instrument::new(parsed).map_err(validation(field))?;
                Ok(vec![Measurement::from_instrument(inst).map_err(validation(field))?])
            }
            Payload::Set(items) => {
                let mut out = Vec::new();
                for (k, p) in items.iter().enumerate() {
                    if matches!(p, Payload::Set(_)) {
                        return Err(CliError::Validation(format!("{field}.set[{k}]: sets cannot nest")));
                    }
                    out.extend(p.to_measurements(dim, &format!("{field}.set[{k}]"))?);
                }
                Ok(out)
            }
        }
    }
}

/// Serialize a measurement back to the most specific payload.
pub fn payload_of(m: &Measurement) -> Payload {
    match (m.kind(), m.observable()) {
        (MeasurementKind::Projective, Some(obs)) => Payload::from_observable(obs),
        (MeasurementKind::Luders, _) => Payload::from_povm(m.povm()),
        _ => Payload::from_instrument(m.instrument()),
    }
}

impl ObservableFile {
    pub fn new(dim: usize, label: Option<String>, payload: Payload) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            dim,
            label,
            payload,
        }
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let file: ObservableFile = serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!(
                "{source}: parse error at line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        if file.format_version != FORMAT_VERSION {
            return Err(CliError::Validation(format!(
                "{source}: unsupported format_version '{}' (expected '{FORMAT_VERSION}')",
                file.format_version
            )));
        }
        if file.dim < 2 {
            return Err(CliError::Validation(format!("{source}: dim must be >= 2, got {}", file.dim)));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: cannot read: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn measurements(&self, source: &str) -> Result<Vec<Measurement>, CliError> {
        self.payload.to_measurements(self.dim, &format!("{source}: payload"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("observable files always serialize")
    }
}
