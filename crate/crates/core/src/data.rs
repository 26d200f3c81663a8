//! Canonical in-memory representation of an observational dataset and
//! CSV ingestion/validation.

use std::fmt;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An observational dataset: binary treatments, outcomes, and raw covariates
/// (no intercept column; model-fitting code adds the intercept itself).
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct ObservedSample {
    /// Treatment indicator per unit, 1 = treated.
    pub z: Vec<u8>,
    /// Observed outcome per unit.
    pub y: Vec<f64>,
    /// Covariate matrix, n rows by d columns.
    pub x: DMatrix<f64>,
    /// Covariate names, in column order.
    pub labels: Vec<String>,
}

/// A violated dataset invariant. Violations are values, not errors: `validate`
/// reports all of them at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoTreatedUnits,
    NoControlUnits,
    NonBinaryTreatment { unit: usize },
    NonFiniteOutcome { unit: usize },
    NonFiniteCovariate { unit: usize, column: usize },
    LengthMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoTreatedUnits => write!(f, "no treated units"),
            Violation::NoControlUnits => write!(f, "no control units"),
            Violation::NonBinaryTreatment { unit } => {
                write!(f, "non-binary treatment for unit {unit}")
            }
            Violation::NonFiniteOutcome { unit } => {
                write!(f, "non-finite outcome for unit {unit}")
            }
            Violation::NonFiniteCovariate { unit, column } => {
                write!(f, "non-finite covariate for unit {unit}, column {column}")
            }
            Violation::LengthMismatch => {
                write!(f, "treatment, outcome, and covariate row counts differ")
            }
        }
    }
}

impl ObservedSample {
    /// Number of units.
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Number of covariates.
    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// Checks every dataset invariant, returning one entry per violation.
    /// Pure: same input, same output.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.y.len() != self.z.len() || self.x.nrows() != self.z.len() {
            out.push(Violation::LengthMismatch);
            return out;
        }
        for (i, &zi) in self.z.iter().enumerate() {
            if zi > 1 {
                out.push(Violation::NonBinaryTreatment { unit: i });
            }
        }
        if !self.z.iter().any(|&z| z == 1) {
            out.push(Violation::NoTreatedUnits);
        }
        if !self.z.iter().any(|&z| z == 0) {
            out.push(Violation::NoControlUnits);
        }
        for (i, &yi) in self.y.iter().enumerate() {
            if !yi.is_finite() {
                out.push(Violation::NonFiniteOutcome { unit: i });
            }
        }
        for i in 0..self.x.nrows() {
            for j in 0..self.x.ncols() {
                if !self.x[(i, j)].is_finite() {
                    out.push(Violation::NonFiniteCovariate { unit: i, column: j });
                }
            }
        }
        out
    }

    /// Loads a sample from a CSV file. The header must contain a `z` column
    /// (integers 0/1 exactly) and a `y` column; every remaining column is a
    /// covariate, kept in header order.
    pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let header = reader.headers()?.clone();
        let z_col = header
            .iter()
            .position(|h| h == "z")
            .ok_or(Error::MissingColumn("z"))?;
        let y_col = header
            .iter()
            .position(|h| h == "y")
            .ok_or(Error::MissingColumn("y"))?;
        let cov_cols: Vec<usize> = (0..header.len())
            .filter(|&j| j != z_col && j != y_col)
            .collect();
        let labels: Vec<String> = cov_cols.iter().map(|&j| header[j].to_string()).collect();

        let mut z = Vec::new();
        let mut y = Vec::new();
        let mut rows: Vec<f64> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = i + 1; // 1-based data row, matching user expectations
            let z_raw = record.get(z_col).unwrap_or("").trim();
            match z_raw.parse::<i64>() {
                Ok(0) => z.push(0),
                Ok(1) => z.push(1),
                _ => {
                    return Err(Error::NonBinaryTreatment {
                        row,
                        value: z_raw.to_string(),
                    })
                }
            }
            y.push(parse_cell(&record, y_col, row, "y")?);
            for (&j, label) in cov_cols.iter().zip(&labels) {
                rows.push(parse_cell(&record, j, row, label)?);
            }
        }
        let n = z.len();
        let d = cov_cols.len();
        let x = DMatrix::from_row_slice(n, d, &rows);
        let sample = ObservedSample { z, y, x, labels };
        let violations = sample.validate();
        // Arm emptiness is an estimation-time concern, not an ingestion error.
        let fatal: Vec<&Violation> = violations
            .iter()
            .filter(|v| {
                !matches!(v, Violation::NoTreatedUnits | Violation::NoControlUnits)
            })
            .collect();
        if let Some(v) = fatal.first() {
            return Err(Error::InvalidSample(v.to_string()));
        }
        Ok(sample)
    }

    /// Writes the sample back as CSV. Numbers use the shortest representation
    /// that round-trips exactly, so `load_csv(write_csv(s))` reproduces the
    /// numeric content bit for bit.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "z,y")?;
        for label in &self.labels {
            write!(out, ",{label}")?;
        }
        writeln!(out)?;
        for i in 0..self.n() {
            write!(out, "{},{}", self.z[i], self.y[i])?;
            for j in 0..self.d() {
                write!(out, ",{}", self.x[(i, j)])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn parse_cell(record: &csv::StringRecord, col: usize, row: usize, name: &str) -> Result<f64> {
    let raw = record.get(col).unwrap_or("").trim();
    raw.parse::<f64>().map_err(|_| Error::ParseCell {
        row,
        column: name.to_string(),
        value: raw.to_string(),
    })
}

/// Selection of analysis-model columns. `W` columns refer to the latent
/// generator variables of a simulated sample (used by the misspecified model
/// scenarios); plain observational data has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Columns {
    /// All observed covariate columns.
    AllX,
    /// A subset of the observed covariate columns, by index.
    X(Vec<usize>),
    /// A subset of the generator-variable columns, by index.
    W(Vec<usize>),
    /// No covariates at all (intercept-only model).
    None,
}

/// Anything the p-value engine can analyze: treatments, outcomes, and a way
/// to materialize the covariate matrix for a column selection.
pub trait DataSource: Sync {
    fn treatments(&self) -> &[u8];
    fn outcomes(&self) -> &[f64];
    fn columns(&self, selection: &Columns) -> Result<DMatrix<f64>>;

    fn n_units(&self) -> usize {
        self.treatments().len()
    }
}

pub(crate) fn select_columns(x: &DMatrix<f64>, idx: &[usize]) -> Result<DMatrix<f64>> {
    for &j in idx {
        if j >= x.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "column index {j} out of range for {} columns",
                x.ncols()
            )));
        }
    }
    let cols: Vec<_> = idx.iter().map(|&j| x.column(j)).collect();
    Ok(DMatrix::from_columns(&cols))
}

impl DataSource for ObservedSample {
    fn treatments(&self) -> &[u8] {
        &self.z
    }

    fn outcomes(&self) -> &[f64] {
        &self.y
    }

    fn columns(&self, selection: &Columns) -> Result<DMatrix<f64>> {
        match selection {
            Columns::AllX => Ok(self.x.clone()),
            Columns::X(idx) => select_columns(&self.x, idx),
            Columns::W(_) => Err(Error::NoGeneratorColumns),
            Columns::None => Ok(DMatrix::zeros(self.n(), 0)),
        }
    }
}
