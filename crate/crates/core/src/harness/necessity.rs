use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HarnessError, Row, Verdict};
use crate::mpnn::{embedding_distance, forward, init_weights, EngineConfig, FeatureSpace};
use crate::separation::{gen_cycle_pair, gen_k2r_pair, gen_thm1_pair, gen_thm2_pair, SeparationPair};
use crate::AdaptationSet;

impl Row {
    /// The pair each necessity row runs on.
    pub fn necessity_pair(self) -> SeparationPair {
        match self {
            Row::Thm1 => gen_thm1_pair(),
            Row::Thm2 => gen_thm2_pair(),
            Row::Thm3 => gen_k2r_pair(2, None).expect("r = 2 is valid"),
            Row::Thm4 => gen_cycle_pair(3).expect("3 is a valid length"),
        }
    }

    /// The strongest architecture that still cannot separate the row's pair.
    pub fn insufficient_adaptations(self) -> AdaptationSet {
        match self {
            Row::Thm1 => AdaptationSet::NONE,
            Row::Thm2 => AdaptationSet::reverse(),
            Row::Thm3 | Row::Thm4 => AdaptationSet::reverse().with_ports(),
        }
    }

    pub fn default_depths(self) -> Vec<usize> {
        match self {
            Row::Thm1 | Row::Thm2 => vec![2, 4],
            Row::Thm3 => vec![2, 4, 6],
            Row::Thm4 => vec![3, 6],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityOptions {
    pub seeds: usize,
    pub hidden_dim: usize,
    /// Overrides each row's default depth grid.
    pub depths: Option<Vec<usize>>,
    pub tolerance: f64,
    /// Trial `i` uses weight seed `master_seed + i` (wrapping).
    pub master_seed: u64,
}

impl Default for NecessityOptions {
    fn default() -> Self {
        Self { seeds: 100, hidden_dim: 32, depths: None, tolerance: 0.0, master_seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub depth: usize,
    /// Target distance at the final layer.
    pub distance: f64,
    /// Target distance after each layer `0..=depth`.
    pub layer_distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityTrialReport {
    pub row: Row,
    pub pair: String,
    pub adaptations: String,
    pub depths: Vec<usize>,
    pub seeds: usize,
    pub hidden_dim: usize,
    pub master_seed: u64,
    pub tolerance: f64,
    pub max_distance: f64,
    pub verdict: Verdict,
    pub trials: Vec<TrialRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NecessityBundle {
    pub kind: String,
    pub rows: Vec<NecessityTrialReport>,
    pub verdict: Verdict,
}

impl NecessityBundle {
    pub fn new(rows: Vec<NecessityTrialReport>) -> Self {
        let verdict = Verdict::all(rows.iter().map(|r| r.verdict));
        Self { kind: "necessity".into(), rows, verdict }
    }
}

/// Run the row's pair through randomly initialized networks and record the
/// distance between the two target embeddings.
pub fn run_necessity(row: Row, opts: &NecessityOptions) -> Result<NecessityTrialReport, HarnessError> {
    let depths = opts.depths.clone().unwrap_or_else(|| row.default_depths());
    if depths.contains(&0) || opts.hidden_dim == 0 {
        return Err(HarnessError::InvalidParameter("depths and hidden_dim must be positive".into()));
    }
    if !(opts.tolerance >= 0.0) {
        return Err(HarnessError::InvalidParameter("tolerance must be non-negative".into()));
    }
    let pair = row.necessity_pair();
    let adaptations = row.insufficient_adaptations();
    let features = FeatureSpace::joint(&[&pair.g1, &pair.g2]);

    let jobs: Vec<(usize, usize)> =
        (0..opts.seeds).flat_map(|i| depths.iter().map(move |&d| (i, d))).collect();
    let trials = jobs
        .par_iter()
        .map(|&(trial, depth)| {
            let seed = opts.master_seed.wrapping_add(trial as u64);
            let config = EngineConfig { hidden_dim: opts.hidden_dim, depth, adaptations, seed };
            let weights = init_weights(&config, &features)?;
            let t1 = forward(&pair.g1, pair.ports1.as_ref(), &weights, None)?;
            let t2 = forward(&pair.g2, pair.ports2.as_ref(), &weights, None)?;
            let layer_distances = (0..=depth)
                .map(|k| embedding_distance(t1.at(k, pair.target1), t2.at(k, pair.target2)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(TrialRecord { trial, seed, depth, distance: layer_distances[depth], layer_distances })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let max_distance = trials.iter().map(|t| t.distance).fold(0.0, f64::max);
    Ok(NecessityTrialReport {
        row,
        pair: pair.name,
        adaptations: adaptations.to_string(),
        depths,
        seeds: opts.seeds,
        hidden_dim: opts.hidden_dim,
        master_seed: opts.master_seed,
        tolerance: opts.tolerance,
        max_distance,
        verdict: Verdict::from_bool(max_distance <= opts.tolerance),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_single_seed() {
        let opts = NecessityOptions { seeds: 1, ..Default::default() };
        let r = run_necessity(Row::Thm1, &opts).unwrap();
        assert_eq!(r.trials.len(), 2);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.trials[0].layer_distances.len(), 3);
    }

    #[test]
    fn rejects_zero_depth() {
        let opts = NecessityOptions { seeds: 1, depths: Some(vec![0]), ..Default::default() };
        assert!(run_necessity(Row::Thm2, &opts).is_err());
    }
}
