//! Experiment drivers. Every driver returns a serializable report with a
//! verdict; reports contain no timestamps or host details, so identical
//! inputs give byte-identical JSON.

mod certify;
mod fuzz;
mod necessity;
mod report;
mod sufficiency;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::ConstructionError;
use crate::graph::GraphError;
use crate::mpnn::MpnnError;
use crate::oracles::OracleError;
use crate::refine::RefineError;
use crate::separation::SeparationError;

pub use certify::{run_certificates, Certificate, CertificateReport, Expectation};
pub use fuzz::{run_fuzz, CheckSummary, Counterexample, FuzzBounds, FuzzOptions, FuzzReport};
pub use necessity::{run_necessity, NecessityBundle, NecessityOptions, NecessityTrialReport, TrialRecord};
pub use report::{render_reports, reports_verdict};
pub use sufficiency::{run_sufficiency, table5_rows, SufficiencyBundle, SufficiencyReport, SufficiencyRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Mpnn(#[from] MpnnError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    pub fn all(verdicts: impl IntoIterator<Item = Verdict>) -> Self {
        Self::from_bool(verdicts.into_iter().all(Verdict::passed))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// The four separation experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Row {
    Thm1,
    Thm2,
    Thm3,
    Thm4,
}

impl Row {
    pub const ALL: [Row; 4] = [Row::Thm1, Row::Thm2, Row::Thm3, Row::Thm4];

    pub fn name(self) -> &'static str {
        match self {
            Row::Thm1 => "thm1",
            Row::Thm2 => "thm2",
            Row::Thm3 => "thm3",
            Row::Thm4 => "thm4",
        }
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Row {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Row::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| HarnessError::InvalidParameter(format!("unknown row {s:?}; expected thm1..thm4")))
    }
}
