//! Append-only run ledger: one JSON record per line.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use bmdist::bounds::best_upper_bound;
use bmdist::certify::{
    certified_objective, CertificationReport, ExactExponent, ExactMatrix, Round, REPORT_DIGITS,
};
use bmdist::gauge::objective;
use bmdist::{BoundResult, Exponent, MatrixText, SquareMatrix};
use serde::{Deserialize, Serialize};

/// Largest tolerated gap between a table row and the published value.
pub const TABLE_TOLERANCE: f64 = 5e-3;
/// Relative tolerance when a stored value is recomputed from its witness.
const REPLAY_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub bound: BoundResult,
    pub paper_value: Option<f64>,
    pub gap: Option<f64>,
    pub pass: bool,
}

impl TableRow {
    pub fn new(bound: BoundResult, paper_value: Option<f64>) -> Self {
        let gap = paper_value.map(|v| bound.value - v);
        let pass = gap.is_none_or(|g| g <= TABLE_TOLERANCE);
        Self {
            bound,
            paper_value,
            gap,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Eval {
        matrix: SquareMatrix,
        p: Exponent,
        value: f64,
        gamma1: f64,
        gamma2: f64,
        det: f64,
    },
    Bound {
        bound: BoundResult,
    },
    Borsuk {
        bound: BoundResult,
        piece_diameter: f64,
    },
    Table {
        rows: Vec<TableRow>,
    },
    Sweep {
        rows: Vec<BoundResult>,
    },
    Certify {
        report: CertificationReport,
    },
    CertifyMatrix {
        matrix: MatrixText,
        p: String,
        precision: u32,
        lower: String,
        upper: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at_most: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub timestamp: String,
    pub command: String,
    pub params: Params,
    pub result: Outcome,
    pub pass: bool,
    pub version: String,
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REPLAY_RTOL * a.abs().max(b.abs())
}

/// Recomputes a bound from its witness, or from the formulas when it has none.
fn replay_bound(b: &BoundResult) -> Result<(), String> {
    let again = match &b.witness {
        Some(w) => objective(w, b.p).map_err(|e| e.to_string())?,
        None => best_upper_bound(b.p).value,
    };
    if close(again, b.value) {
        Ok(())
    } else {
        Err(format!(
            "p={}: stored {} but recomputed {again}",
            b.p, b.value
        ))
    }
}

fn certified_upper(
    matrix: &MatrixText,
    p: &str,
    precision: u32,
) -> Result<(String, String), String> {
    let a = ExactMatrix::from_text(matrix).map_err(|e| e.to_string())?;
    let pe: ExactExponent = p.parse().map_err(|e: bmdist::Error| e.to_string())?;
    let c = certified_objective(&a, &pe, precision).map_err(|e| e.to_string())?;
    Ok((
        c.lo.to_decimal(REPORT_DIGITS, Round::Down),
        c.hi.to_decimal(REPORT_DIGITS, Round::Up),
    ))
}

pub fn at_most(upper: &str, threshold: &str) -> Result<bool, String> {
    let u = bmdist::certify::parse_decimal(upper).map_err(|e| e.to_string())?;
    let t = bmdist::certify::parse_decimal(threshold).map_err(|e| e.to_string())?;
    Ok(u <= t)
}

impl Outcome {
    /// Whether the outcome meets its own acceptance rule.
    pub fn passes(&self) -> Result<bool, String> {
        Ok(match self {
            Outcome::Table { rows } => rows.iter().all(|r| r.pass),
            Outcome::Certify { report } => report.all_pass,
            Outcome::CertifyMatrix {
                upper,
                at_most: Some(t),
                ..
            } => at_most(upper, t)?,
            _ => true,
        })
    }
}

impl RunRecord {
    /// Re-derives the result from the embedded evidence and returns the
    /// resulting pass/fail. Errors when the evidence does not reproduce.
    pub fn verify(&self) -> Result<bool, String> {
        match &self.result {
            Outcome::Eval {
                matrix, p, value, ..
            } => {
                let again = objective(matrix, *p).map_err(|e| e.to_string())?;
                if !close(again, *value) {
                    return Err(format!("stored {value} but recomputed {again}"));
                }
            }
            Outcome::Bound { bound } => replay_bound(bound)?,
            Outcome::Borsuk {
                bound,
                piece_diameter,
            } => {
                replay_bound(bound)?;
                if !close(bound.value / 2.0, *piece_diameter) {
                    return Err("piece diameter is not half the bound".into());
                }
            }
            Outcome::Sweep { rows } => rows.iter().try_for_each(replay_bound)?,
            Outcome::Table { rows } => {
                for row in rows {
                    replay_bound(&row.bound)?;
                    if *row != TableRow::new(row.bound.clone(), row.paper_value) {
                        return Err(format!(
                            "row p={} has inconsistent gap or pass",
                            row.bound.p
                        ));
                    }
                }
            }
            Outcome::Certify { report } => {
                if !report.recheck() {
                    return Err("certificate links do not recheck".into());
                }
            }
            Outcome::CertifyMatrix {
                matrix,
                p,
                precision,
                lower,
                upper,
                ..
            } => {
                let (lo, hi) = certified_upper(matrix, p, *precision)?;
                if (&lo, &hi) != (lower, upper) {
                    return Err("certified enclosure does not reproduce".into());
                }
            }
        }
        self.result.passes()
    }
}

pub fn append(path: &Path, record: &RunRecord) -> std::io::Result<()> {
    let mut line = serde_json::to_string(record).map_err(std::io::Error::other)?;
    line.push('\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(line.as_bytes())
}

pub fn read(path: &Path) -> std::io::Result<Vec<RunRecord>> {
    let f = std::fs::File::open(path)?;
    BufReader::new(f)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?).map_err(std::io::Error::other))
        .collect()
}
