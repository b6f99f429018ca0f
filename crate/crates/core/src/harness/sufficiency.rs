use serde::{Deserialize, Serialize};

use super::{HarnessError, Verdict};
use crate::constructions::{cyc_ego, dup1_multigraph, dup1_simple, dupr_ego};
use crate::separation::{gen_cycle_pair, gen_k2r_pair, gen_thm1_pair, gen_thm2_pair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "lowercase")]
pub enum SufficiencyRow {
    Thm1,
    Thm2,
    Thm3 { r: usize },
    Thm4 { ell: usize },
}

/// The eight parameterized rows.
pub fn table5_rows() -> Vec<SufficiencyRow> {
    let mut rows = vec![SufficiencyRow::Thm1, SufficiencyRow::Thm2];
    rows.extend([2, 3, 4].map(|r| SufficiencyRow::Thm3 { r }));
    rows.extend([3, 5, 7].map(|ell| SufficiencyRow::Thm4 { ell }));
    rows
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyReport {
    pub theorem: String,
    pub parameter: Option<usize>,
    pub construction: String,
    pub y1: u8,
    pub y2: u8,
    pub expected: [u8; 2],
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficiencyBundle {
    pub kind: String,
    pub rows: Vec<SufficiencyReport>,
    pub verdict: Verdict,
}

impl SufficiencyBundle {
    pub fn new(rows: Vec<SufficiencyReport>) -> Self {
        let verdict = Verdict::all(rows.iter().map(|r| r.verdict));
        Self { kind: "sufficiency".into(), rows, verdict }
    }
}

/// Run the row's exact construction on both graphs of its pair.
pub fn run_sufficiency(row: SufficiencyRow) -> Result<SufficiencyReport, HarnessError> {
    let (theorem, parameter, construction, (y1, y2), labels) = match row {
        SufficiencyRow::Thm1 => {
            let p = gen_thm1_pair();
            let y = (dup1_simple(&p.g1.view())?[&p.target1], dup1_simple(&p.g2.view())?[&p.target2]);
            ("thm1", None, "dup1_simple", y, p.labels)
        }
        SufficiencyRow::Thm2 => {
            let p = gen_thm2_pair();
            let ports = |q: &Option<_>| q.clone().expect("thm2 pair carries ports");
            let y = (
                dup1_multigraph(&p.g1.view(), &ports(&p.ports1))?[&p.target1],
                dup1_multigraph(&p.g2.view(), &ports(&p.ports2))?[&p.target2],
            );
            ("thm2", None, "dup1_multigraph", y, p.labels)
        }
        SufficiencyRow::Thm3 { r } => {
            if r < 2 {
                return Err(HarnessError::InvalidParameter(format!("thm3 needs r >= 2, got {r}")));
            }
            let p = gen_k2r_pair(r, None)?;
            let y = (
                dupr_ego(&p.g1.view(), p.target1, r)?.output,
                dupr_ego(&p.g2.view(), p.target2, r)?.output,
            );
            ("thm3", Some(r), "dupr_ego", y, p.labels)
        }
        SufficiencyRow::Thm4 { ell } => {
            if ell < 3 {
                return Err(HarnessError::InvalidParameter(format!("thm4 needs ell >= 3, got {ell}")));
            }
            let p = gen_cycle_pair(ell)?;
            let y = (cyc_ego(&p.g1, p.target1, ell)?.output, cyc_ego(&p.g2, p.target2, ell)?.output);
            ("thm4", Some(ell), "cyc_ego", y, p.labels)
        }
    };
    let expected = [labels.0 as u8, labels.1 as u8];
    Ok(SufficiencyReport {
        theorem: theorem.into(),
        parameter,
        construction: construction.into(),
        y1: y1 as u8,
        y2: y2 as u8,
        expected,
        verdict: Verdict::from_bool([y1 as u8, y2 as u8] == expected),
    })
}
