use serde::{Deserialize, Serialize};

use super::{HarnessError, Verdict};
use crate::refine::{compare, Probe};
use crate::separation::{gen_cycle_pair, gen_k22_example, gen_k2r_pair, gen_thm1_pair, gen_thm2_pair, SeparationPair};
use crate::AdaptationSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// Targets share a color at every tested depth.
    Indistinguishable,
    /// Targets have different colors at the tested depth.
    Distinguishable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub id: String,
    pub pair: String,
    pub adaptations: String,
    pub expected: Expectation,
    pub depths: Vec<usize>,
    /// First depth at which the targets separated, if any within the run.
    pub first_separation: Option<usize>,
    pub partition_sizes: [Vec<usize>; 2],
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub kind: String,
    pub depth_bound: usize,
    pub note: String,
    pub certificates: Vec<Certificate>,
    pub verdict: Verdict,
}

struct Plan {
    id: String,
    pair: SeparationPair,
    config: AdaptationSet,
    expected: Expectation,
    depths: Vec<usize>,
}

fn check(plan: Plan) -> Result<Certificate, HarnessError> {
    let p = &plan.pair;
    let a = Probe { graph: &p.g1, ports: p.ports1.as_ref(), node: p.target1 };
    let b = Probe { graph: &p.g2, ports: p.ports2.as_ref(), node: p.target2 };
    let max = *plan.depths.iter().max().expect("at least one depth");
    let cmp = compare(a, b, plan.config, max)?;
    let holds = match plan.expected {
        Expectation::Indistinguishable => plan.depths.iter().all(|&k| cmp.indistinguishable_at(k)),
        Expectation::Distinguishable => plan.depths.iter().all(|&k| !cmp.indistinguishable_at(k)),
    };
    Ok(Certificate {
        id: plan.id,
        pair: p.name.clone(),
        adaptations: plan.config.to_string(),
        expected: plan.expected,
        depths: plan.depths,
        first_separation: cmp.first_separation(),
        partition_sizes: cmp.partition_sizes,
        verdict: Verdict::from_bool(holds),
    })
}

/// Refinement certificates: indistinguishability under each pair's
/// insufficient architecture for every depth up to `depth_bound`, depth
/// minimality, and separation under the sufficient architecture at its
/// optimal depth.
pub fn run_certificates(depth_bound: usize) -> Result<CertificateReport, HarnessError> {
    use Expectation::*;
    let all: Vec<usize> = (0..=depth_bound).collect();
    let rev = AdaptationSet::reverse();
    let mut plans = Vec::new();
    let mut push = |id: String, pair: SeparationPair, config, expected, depths: Vec<usize>| {
        plans.push(Plan { id, pair, config, expected, depths })
    };

    push("thm1/forward/all".into(), gen_thm1_pair(), AdaptationSet::NONE, Indistinguishable, all.clone());
    push("thm2/reverse/all".into(), gen_thm2_pair(), rev, Indistinguishable, all.clone());
    push("k22/reverse+ports/all".into(), gen_k22_example(), rev.with_ports(), Indistinguishable, all.clone());
    for r in [2, 3, 4] {
        push(format!("thm3_r{r}/reverse+ports/all"), gen_k2r_pair(r, None)?, rev.with_ports(), Indistinguishable, all.clone());
    }
    for ell in [3, 5, 7] {
        push(format!("thm4_l{ell}/reverse+ports/all"), gen_cycle_pair(ell)?, rev.with_ports(), Indistinguishable, all.clone());
    }

    push("thm1/reverse/depth1".into(), gen_thm1_pair(), rev, Indistinguishable, vec![1]);
    push("thm2/reverse+in-ports/depth1".into(), gen_thm2_pair(), rev.with_in_ports(), Indistinguishable, vec![1]);
    for r in [2, 3, 4] {
        push(format!("thm3_r{r}/reverse+ego/depth3"), gen_k2r_pair(r, None)?, rev.with_ego(), Indistinguishable, vec![3]);
    }
    for ell in [3, 5, 7] {
        let pair = gen_cycle_pair(ell)?;
        push(format!("thm4_l{ell}/ego/depth{}", ell - 1), pair, AdaptationSet::NONE.with_ego(), Indistinguishable, vec![ell - 1]);
    }

    push("thm1/reverse/depth2".into(), gen_thm1_pair(), rev, Distinguishable, vec![2]);
    push("thm2/reverse+in-ports/depth2".into(), gen_thm2_pair(), rev.with_in_ports(), Distinguishable, vec![2]);
    for r in [2, 3, 4] {
        push(format!("thm3_r{r}/reverse+ego/depth4"), gen_k2r_pair(r, None)?, rev.with_ego(), Distinguishable, vec![4]);
    }
    for ell in [3, 5, 7] {
        push(format!("thm4_l{ell}/ego/depth{ell}"), gen_cycle_pair(ell)?, AdaptationSet::NONE.with_ego(), Distinguishable, vec![ell]);
    }

    let certificates = plans.into_iter().map(check).collect::<Result<Vec<_>, _>>()?;
    let verdict = Verdict::all(certificates.iter().map(|c| c.verdict));
    Ok(CertificateReport {
        kind: "certificates".into(),
        depth_bound,
        note: format!(
            "indistinguishability is checked for depths 0..={depth_bound} only; larger depths are not covered by this run"
        ),
        certificates,
        verdict,
    })
}
