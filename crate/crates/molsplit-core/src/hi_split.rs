//! Dissimilarity-constrained splitting: neighborhood graph, coarsening,
//! balanced k-cut, expansion back to molecules, fold rotation. Also the
//! seeded-random greedy baseline used for removal-count comparisons.

use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coarsen::coarse_graph;
use crate::kcut::{
    solve_balanced_kcut, verify_kcut, KCutProblem, KCutSolution, SolveError, WeightedGraph,
};
use crate::manifest::{Fold, SplitManifest, SplitParameters};
use crate::molio::Dataset;
use crate::simgraph::{build_neighborhood_graph, tanimoto_unchecked, SimGraph};

#[derive(Debug, Clone)]
pub struct HiParams {
    pub threshold: f64,
    pub k: usize,
    pub bounds: Vec<u64>,
    pub time_budget: Option<Duration>,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum HiSplitError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(
        "{0}; the similarity structure cannot support these partition sizes — \
         lower the bounds (or fractions/slack) or raise the similarity threshold"
    )]
    Infeasible(String),
    #[error("time budget exceeded before a feasible split was found")]
    TimeBudgetExceeded,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Lower bounds for the k partitions: `floor(fraction_i * n * slack)`.
/// Slack below 1 leaves room for the removed set.
pub fn default_bounds(n: usize, fractions: &[f64], slack: f64) -> Vec<u64> {
    fractions
        .iter()
        .map(|f| (f * slack * n as f64).floor() as u64)
        .collect()
}

/// Split the dataset into k mutually dissimilar subsets and rotate them
/// into k train/test folds. Every cross-fold molecule pair ends up with
/// similarity strictly below the threshold.
pub fn hi_split(ds: &Dataset, params: &HiParams) -> Result<SplitManifest, HiSplitError> {
    if ds.is_empty() {
        return Err(HiSplitError::EmptyDataset);
    }
    assert!(params.k >= 2, "k must be >= 2");
    let graph = build_neighborhood_graph(ds, params.threshold);
    let coarse = coarse_graph(&graph, params.threshold);
    let problem = KCutProblem::new(
        WeightedGraph::from(&coarse),
        params.k,
        params.bounds.clone(),
        params.time_budget,
    )
    .map_err(|e| HiSplitError::Infeasible(e.to_string()))?;
    let solution = solve_balanced_kcut(&problem).map_err(|e| match e {
        SolveError::Infeasible(msg) => HiSplitError::Infeasible(msg),
        SolveError::TimeBudgetExceeded => HiSplitError::TimeBudgetExceeded,
        other => HiSplitError::Internal(other.to_string()),
    })?;

    // Expand cluster assignments to molecules and re-verify down there;
    // coarsening must never be trusted for validity.
    let mut molecule_assignment = vec![0u32; ds.len()];
    for (cluster, members) in coarse.member_map().iter().enumerate() {
        for &m in members {
            molecule_assignment[m] = solution.assignment[cluster];
        }
    }
    verify_expansion(&graph, ds, &molecule_assignment, &params.bounds, &solution)?;

    // Partitions relabeled by descending kept weight so bounds-heavy
    // subsets come first.
    let mut part_weight = vec![0u64; params.k];
    for &a in &molecule_assignment {
        if a != 0 {
            part_weight[(a - 1) as usize] += 1;
        }
    }
    let mut by_weight: Vec<usize> = (0..params.k).collect();
    by_weight.sort_by(|&a, &b| part_weight[b].cmp(&part_weight[a]).then(a.cmp(&b)));

    let mut subsets: Vec<Vec<usize>> = vec![Vec::new(); params.k];
    let mut removed = Vec::new();
    for (m, &a) in molecule_assignment.iter().enumerate() {
        if a == 0 {
            removed.push(m);
        } else {
            let rank = by_weight
                .iter()
                .position(|&p| p == (a - 1) as usize)
                .expect("partition is ranked");
            subsets[rank].push(m);
        }
    }

    let folds = make_folds(&subsets);
    let mut params_out = SplitParameters::new(params.threshold, params.seed, ds.fp_source);
    params_out.k = Some(params.k);
    params_out.bounds = Some(params.bounds.clone());
    params_out.time_budget_secs = params.time_budget.map(|d| d.as_secs_f64());
    let mut manifest = SplitManifest::new("hi-split", params_out);
    manifest.folds = folds
        .iter()
        .map(|(train, test)| Fold {
            train: ids(ds, train),
            test: ids(ds, test),
            clusters: None,
        })
        .collect();
    manifest.removed = ids(ds, &removed);
    Ok(manifest)
}

/// Rotate k subsets into k folds: fold i tests subset i and trains on the
/// union of the others.
pub fn make_folds(subsets: &[Vec<usize>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    assert!(subsets.len() >= 2, "need at least two subsets to rotate");
    (0..subsets.len())
        .map(|i| {
            let mut train: Vec<usize> = subsets
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, s)| s.iter().copied())
                .collect();
            train.sort_unstable();
            (train, subsets[i].clone())
        })
        .collect()
}

/// Greedy baseline: a seeded random partition at the requested test
/// fraction, then every test molecule similar to any training molecule is
/// discarded. Removal counts are what the exact splitter is judged against.
pub fn greedy_split(
    ds: &Dataset,
    threshold: f64,
    test_fraction: f64,
    seed: u64,
) -> SplitManifest {
    assert!(!ds.is_empty(), "dataset is empty");
    assert!(
        test_fraction > 0.0 && test_fraction < 1.0,
        "test fraction must be in (0, 1)"
    );
    let n = ds.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut test: Vec<usize> = order[..n_test].to_vec();
    let mut train: Vec<usize> = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();

    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for &t in &test {
        let leaky = train.iter().any(|&s| {
            tanimoto_unchecked(&ds.records[t].fingerprint, &ds.records[s].fingerprint)
                >= threshold
        });
        if leaky {
            removed.push(t);
        } else {
            kept.push(t);
        }
    }

    let mut params = SplitParameters::new(threshold, seed, ds.fp_source);
    params.test_fraction = Some(test_fraction);
    params.initial_partition = Some("seeded-random".to_string());
    let mut manifest = SplitManifest::new("greedy-split", params);
    manifest.folds = vec![Fold {
        train: ids(ds, &train),
        test: ids(ds, &kept),
        clusters: None,
    }];
    manifest.removed = ids(ds, &removed);
    manifest
}

fn ids(ds: &Dataset, indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&i| ds.records[i].id.clone()).collect()
}

fn verify_expansion(
    graph: &SimGraph,
    ds: &Dataset,
    molecule_assignment: &[u32],
    bounds: &[u64],
    coarse_solution: &KCutSolution,
) -> Result<(), HiSplitError> {
    let edges: Vec<(usize, usize)> = graph.edges().map(|(u, v, _)| (u, v)).collect();
    let mol_graph = WeightedGraph::new(vec![1; ds.len()], &edges)
        .map_err(|e| HiSplitError::Internal(e.to_string()))?;
    let mol_problem = KCutProblem::new(mol_graph, bounds.len(), bounds.to_vec(), None)
        .map_err(|e| HiSplitError::Infeasible(e.to_string()))?;
    let expanded = KCutSolution {
        assignment: molecule_assignment.to_vec(),
        kept_weight: coarse_solution.kept_weight,
        optimal: coarse_solution.optimal,
        gap: coarse_solution.gap,
    };
    let report = verify_kcut(&mol_problem, &expanded);
    if !report.ok {
        return Err(HiSplitError::Internal(format!(
            "expanded solution fails molecule-level verification: {}",
            report.violations.join("; ")
        )));
    }
    Ok(())
}
