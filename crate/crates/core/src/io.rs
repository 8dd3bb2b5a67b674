//! File formats: algebra documents, structured reports, and trajectory CSV.
//!
//! An algebra document is JSON:
//!
//! ```json
//! {
//!   "dim": 3,
//!   "labels": ["X", "Y", "Z"],
//!   "brackets": [{ "i": 1, "j": 2, "k": 3, "value": 1.0 }],
//!   "rep": [[0,1,0, 0,0,0, 0,0,0], [0,0,0, 0,0,1, 0,0,0], [0,0,1, 0,0,0, 0,0,0]]
//! }
//! ```
//!
//! `brackets` lists `c[i][j][k]` with 1-based indices; only `i < j` is needed
//! and the mirrored entry is implied. `rep`, when present, holds one row-major
//! flattened `m × m` matrix per basis element. Reports are JSON objects, CSV
//! numbers are written with 17 significant digits.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogeneous::{GoMetrizabilityReport, GoState};
use crate::lie_algebra::LieAlgebra;
use crate::metrizability::{FeasibilityReport, FeasibilityStatus};
use crate::spray::GeodesicTrajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub labels: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<Vec<Vec<f64>>>,
}

fn field_error(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

pub fn parse_algebra(text: &str) -> Result<LieAlgebra> {
    let doc: AlgebraDocument = serde_json::from_str(text).map_err(|e| {
        field_error(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    doc.into_algebra()
}

impl AlgebraDocument {
    pub fn into_algebra(self) -> Result<LieAlgebra> {
        let n = self.dim;
        if n == 0 {
            return Err(field_error("dim", "must be a positive integer"));
        }
        if self.labels.len() != n {
            return Err(field_error(
                "labels",
                format!("expected {n} labels, found {}", self.labels.len()),
            ));
        }
        let mut entries = Vec::with_capacity(self.brackets.len());
        for (idx, b) in self.brackets.iter().enumerate() {
            for (name, v) in [("i", b.i), ("j", b.j), ("k", b.k)] {
                if v == 0 || v > n {
                    return Err(field_error(
                        format!("brackets[{idx}].{name}"),
                        format!("index {v} outside 1..={n}"),
                    ));
                }
            }
            if !b.value.is_finite() {
                return Err(field_error(format!("brackets[{idx}].value"), "must be finite"));
            }
            entries.push((b.i - 1, b.j - 1, b.k - 1, b.value));
        }
        let algebra = LieAlgebra::from_brackets(n, self.labels, &entries)
            .map_err(|e| field_error("brackets", e.to_string()))?;
        match self.rep {
            None => Ok(algebra),
            Some(flat) => {
                if flat.len() != n {
                    return Err(field_error(
                        "rep",
                        format!("expected {n} matrices, found {}", flat.len()),
                    ));
                }
                let m = (flat[0].len() as f64).sqrt().round() as usize;
                let mut mats = Vec::with_capacity(n);
                for (idx, entries) in flat.iter().enumerate() {
                    if m == 0 || entries.len() != m * m {
                        return Err(field_error(
                            format!("rep[{idx}]"),
                            format!("expected {} entries of a square matrix, found {}", m * m, entries.len()),
                        ));
                    }
                    mats.push(DMatrix::from_row_slice(m, m, entries));
                }
                algebra.with_rep(mats).map_err(|e| field_error("rep", e.to_string()))
            }
        }
    }

    pub fn from_algebra(algebra: &LieAlgebra) -> Self {
        let n = algebra.dim();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let value = algebra.constant(i, j, k);
                    if value != 0.0 {
                        brackets.push(BracketEntry {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            value,
                        });
                    }
                }
            }
        }
        Self {
            dim: n,
            labels: algebra.labels().to_vec(),
            brackets,
            rep: algebra.rep().map(|r| r.basis_matrices().iter().map(row_major).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra document serializes")
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityDocument {
    pub kind: String,
    pub algebra: String,
    pub status: FeasibilityStatus,
    /// Row-major flattening of the `n × n` witness.
    pub witness: Option<Vec<f64>>,
    pub witness_eigenvalues: Option<Vec<f64>>,
    pub certificate: Option<Vec<f64>>,
    pub lambda_min_achieved: f64,
    pub subspace_dim: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl FeasibilityDocument {
    pub fn new(algebra: &str, report: &FeasibilityReport) -> Self {
        Self {
            kind: "feasibility".into(),
            algebra: algebra.into(),
            status: report.status,
            witness: report.witness.as_ref().map(|w| row_major(&w.g)),
            witness_eigenvalues: report.witness.as_ref().map(|w| w.eigenvalues.clone()),
            certificate: report.certificate.as_ref().map(|c| c.coords().to_vec()),
            lambda_min_achieved: report.lambda_min_achieved,
            subspace_dim: report.subspace_dim,
            iterations: report.iterations,
            seed: report.seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            field_error(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoVerdictDocument {
    pub kind: String,
    pub kappa: f64,
    pub verdict: String,
    pub max_residual: f64,
    pub samples: usize,
}

impl GoVerdictDocument {
    pub fn new(report: &GoMetrizabilityReport) -> Self {
        Self {
            kind: "go_metrizability".into(),
            kappa: report.kappa,
            verdict: report.verdict.to_string(),
            max_residual: report.max_residual,
            samples: report.samples,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(traj: &GeodesicTrajectory) -> String {
    let m = traj.points.first().map_or(0, |p| p.nrows());
    let name = |prefix: &str, i: usize, j: usize| {
        if m < 10 {
            format!("{prefix}_{}{}", i + 1, j + 1)
        } else {
            format!("{prefix}_{}_{}", i + 1, j + 1)
        }
    };
    let mut header = vec!["t".to_string()];
    for prefix in ["x", "v"] {
        for i in 0..m {
            for j in 0..m {
                header.push(name(prefix, i, j));
            }
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for ((t, x), v) in traj.times.iter().zip(&traj.points).zip(&traj.velocities) {
        let row: Vec<String> = std::iter::once(*t)
            .chain(row_major(x))
            .chain(row_major(v))
            .map(fmt_num)
            .collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn go_trajectory_csv(times: &[f64], states: &[GoState]) -> String {
    let mut out = String::from("t,x1,x2,v1,v2,speed\n");
    for (t, s) in times.iter().zip(states) {
        let row = [
            *t,
            s.position.x,
            s.position.y,
            s.velocity.x,
            s.velocity.y,
            s.speed(),
        ]
        .map(fmt_num);
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
