//! JSON encoding of channels and check reports.
//!
//! A complex number is the pair `[re, im]`; a matrix is an array of rows. A
//! channel file carries `dim_in`, `dim_out` and exactly one of `kraus` (list
//! of `dim_out x dim_in` matrices) or `choi` (one `dim_in·dim_out` square
//! matrix, row/column index `a·dim_out + b` for input `a`, output `b`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{Channel, KrausSet};
use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityStatus, SolverConfig};
use crate::matrix::{ComplexMatrix, C64};

pub type EncodedMatrix = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &ComplexMatrix) -> EncodedMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn decode_matrix(rows: &EncodedMatrix, nrows: usize, ncols: usize, what: &str) -> Result<ComplexMatrix> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format(format!("{what} must be {nrows}x{ncols}")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Format(format!("{what} has non-finite entries")));
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<EncodedMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<EncodedMatrix>,
}

/// A validated channel file, keeping the Kraus form when one was given.
#[derive(Debug, Clone)]
pub enum LoadedChannel {
    Kraus(KrausSet),
    Choi(Channel),
}

impl LoadedChannel {
    pub fn channel(&self) -> Channel {
        match self {
            LoadedChannel::Kraus(k) => k.to_channel(),
            LoadedChannel::Choi(c) => c.clone(),
        }
    }

    pub fn kraus(&self) -> Option<&KrausSet> {
        match self {
            LoadedChannel::Kraus(k) => Some(k),
            LoadedChannel::Choi(_) => None,
        }
    }
}

impl ChannelFile {
    pub fn from_kraus(k: &KrausSet, label: Option<String>) -> Self {
        Self {
            dim_in: k.dim_in(),
            dim_out: k.dim_out(),
            label,
            kraus: Some(k.operators().iter().map(encode_matrix).collect()),
            choi: None,
        }
    }

    pub fn from_channel(c: &Channel, label: Option<String>) -> Self {
        Self {
            dim_in: c.dim_in(),
            dim_out: c.dim_out(),
            label,
            kraus: None,
            choi: Some(encode_matrix(c.choi())),
        }
    }

    /// Decodes and validates (completeness or CPTP at default tolerances).
    pub fn decode(&self) -> Result<LoadedChannel> {
        if self.dim_in == 0 || self.dim_out == 0 {
            return Err(Error::Format("dim_in and dim_out must be >= 1".into()));
        }
        match (&self.kraus, &self.choi) {
            (Some(ops), None) => {
                if ops.is_empty() {
                    return Err(Error::Format("kraus must contain at least one operator".into()));
                }
                let ops = ops
                    .iter()
                    .enumerate()
                    .map(|(i, m)| decode_matrix(m, self.dim_out, self.dim_in, &format!("kraus[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(LoadedChannel::Kraus(KrausSet::new(ops)?))
            }
            (None, Some(choi)) => {
                let n = self.dim_in * self.dim_out;
                let j = decode_matrix(choi, n, n, "choi")?;
                Ok(LoadedChannel::Choi(Channel::from_choi(self.dim_in, self.dim_out, j)?))
            }
            _ => Err(Error::Format("exactly one of `kraus` and `choi` must be present".into())),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel files serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    Feasible,
    NotFeasibleAtTolerance,
    Inconclusive,
}

impl ReportStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            ReportStatus::Feasible => 0,
            ReportStatus::NotFeasibleAtTolerance => 1,
            ReportStatus::Inconclusive => 2,
        }
    }

    /// Least favourable of two verdicts: any inconclusive step makes the
    /// whole inconclusive, otherwise any negative step makes it negative.
    pub fn combine(self, other: ReportStatus) -> ReportStatus {
        use ReportStatus::*;
        match (self, other) {
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            (NotFeasibleAtTolerance, _) | (_, NotFeasibleAtTolerance) => NotFeasibleAtTolerance,
            _ => Feasible,
        }
    }
}

impl From<FeasibilityStatus> for ReportStatus {
    fn from(s: FeasibilityStatus) -> Self {
        match s {
            FeasibilityStatus::Feasible => ReportStatus::Feasible,
            FeasibilityStatus::NotFeasibleAtTolerance => ReportStatus::NotFeasibleAtTolerance,
            FeasibilityStatus::IterationLimit => ReportStatus::Inconclusive,
        }
    }
}

/// Non-finite values are dropped, since JSON has no encoding for them.
fn finite(x: Option<f64>) -> Option<f64> {
    x.filter(|v| v.is_finite())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub affine: Option<f64>,
    pub psd: Option<f64>,
    pub verification: Option<f64>,
}

impl Residuals {
    pub fn new(affine: Option<f64>, psd: Option<f64>, verification: Option<f64>) -> Self {
        Self {
            affine: finite(affine),
            psd: finite(psd),
            verification: finite(verification),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub name: String,
    pub status: ReportStatus,
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl Step {
    pub fn new(name: impl Into<String>, status: ReportStatus, residual: Option<f64>, iterations: Option<usize>) -> Self {
        Self {
            name: name.into(),
            status,
            residual: finite(residual),
            iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: ReportStatus,
    pub residuals: Residuals,
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ChannelFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<Step>,
    pub config: ConfigEcho,
    pub warnings: Vec<String>,
}

/// Caveat attached to every negative verdict of the projection method.
pub const HEURISTIC_INFEASIBILITY: &str = "not-feasible-at-tolerance is heuristic: the residual stalled above \
     10*eps_feas, no dual certificate was computed";

impl Report {
    pub fn new(command: impl Into<String>, status: ReportStatus, config: ConfigEcho) -> Self {
        let mut report = Self {
            command: command.into(),
            status,
            residuals: Residuals::default(),
            iterations: None,
            witness: None,
            steps: Vec::new(),
            config,
            warnings: Vec::new(),
        };
        report.refresh_warnings();
        report
    }

    /// Sets the overall status, adding the infeasibility caveat if needed.
    pub fn set_status(&mut self, status: ReportStatus) {
        self.status = status;
        self.refresh_warnings();
    }

    fn refresh_warnings(&mut self) {
        let negative = self.status == ReportStatus::NotFeasibleAtTolerance
            || self.steps.iter().any(|s| s.status == ReportStatus::NotFeasibleAtTolerance);
        let present = self.warnings.iter().any(|w| w == HEURISTIC_INFEASIBILITY);
        if negative && !present {
            self.warnings.push(HEURISTIC_INFEASIBILITY.to_string());
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
