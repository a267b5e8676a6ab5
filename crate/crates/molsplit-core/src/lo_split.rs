//! Similar-molecule cluster extraction for ranking-style evaluation.
//!
//! The pool starts as the whole dataset. Each round recomputes, over the
//! current pool, every molecule's would-be cluster (itself plus its
//! neighbors at similarity >= t) and the value spread across it; the
//! qualifying molecule with the fewest neighbors is extracted with its
//! neighborhood as a test cluster. The central molecule goes back to the
//! training side as the cluster's anchor, mirroring the situation where one
//! hit of a series is already known.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::manifest::{ClusterInfo, Fold, SplitManifest, SplitParameters};
use crate::molio::Dataset;
use crate::simgraph::tanimoto_unchecked;

/// Default value-spread floors justified by assay reproducibility studies.
pub const STD_THRESHOLD_PKI: f64 = 0.60;
pub const STD_THRESHOLD_PIC50: f64 = 0.70;

#[derive(Debug, Clone)]
pub struct LoParams {
    /// Similarity for cluster membership (and the anchor criterion).
    pub threshold: f64,
    /// A cluster qualifies only when its size (center included) exceeds
    /// this; the default of 5 therefore yields clusters of at least 6.
    pub min_cluster_size: usize,
    /// Stop after this many clusters; `usize::MAX` exhausts the pool.
    pub max_clusters: usize,
    /// Population standard deviation the cluster values must exceed.
    pub std_threshold: f64,
    /// Perturbs the candidate scan order, so tie-breaks differ per fold.
    pub seed: u64,
}

impl Default for LoParams {
    fn default() -> Self {
        LoParams {
            threshold: 0.4,
            min_cluster_size: 5,
            max_clusters: usize::MAX,
            std_threshold: STD_THRESHOLD_PKI,
            seed: 0,
        }
    }
}

/// An extracted cluster: `members` includes the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoCluster {
    pub center: usize,
    pub members: Vec<usize>,
}

/// Extract qualifying clusters from the dataset; returns the clusters and
/// the remaining training pool. Zero clusters is a valid outcome.
pub fn select_distinct_clusters(ds: &Dataset, params: &LoParams) -> (Vec<LoCluster>, Vec<usize>) {
    assert!(
        ds.records.iter().all(|r| r.value.is_some()),
        "cluster extraction needs continuous values on every record"
    );
    assert!(params.threshold > 0.0 && params.threshold <= 1.0);
    let n = ds.len();

    // Pairwise neighbor lists once; pool shrinkage only filters them.
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = tanimoto_unchecked(&ds.records[i].fingerprint, &ds.records[j].fingerprint);
            if s >= params.threshold {
                neighbors[i].push(j);
                neighbors[j].push(i);
            }
        }
    }

    let mut scan_order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    scan_order.shuffle(&mut rng);

    let mut in_pool = vec![true; n];
    let mut clusters = Vec::new();
    while clusters.len() < params.max_clusters {
        let mut best: Option<(usize, usize)> = None; // (cluster size, center)
        for &i in &scan_order {
            if !in_pool[i] {
                continue;
            }
            let size = 1 + neighbors[i].iter().filter(|&&j| in_pool[j]).count();
            if size <= params.min_cluster_size {
                continue;
            }
            if let Some((best_size, _)) = best {
                if size >= best_size {
                    continue; // strict improvement keeps the first-seen tie
                }
            }
            if cluster_value_std(ds, i, &neighbors[i], &in_pool) > params.std_threshold {
                best = Some((size, i));
            }
        }
        let Some((_, center)) = best else {
            break; // no molecule qualifies anymore
        };
        let mut members: Vec<usize> = vec![center];
        members.extend(neighbors[center].iter().filter(|&&j| in_pool[j]));
        members.sort_unstable();
        for &m in &members {
            in_pool[m] = false;
        }
        clusters.push(LoCluster { center, members });
    }

    let pool: Vec<usize> = (0..n).filter(|&i| in_pool[i]).collect();
    (clusters, pool)
}

/// Population standard deviation of the values over the center plus its
/// pool neighbors.
fn cluster_value_std(ds: &Dataset, center: usize, neighbors: &[usize], in_pool: &[bool]) -> f64 {
    let values: Vec<f64> = std::iter::once(center)
        .chain(neighbors.iter().copied().filter(|&j| in_pool[j]))
        .map(|i| ds.records[i].value.expect("values are present"))
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}

/// Single-fold split: cluster members (minus the retained anchor) form the
/// test side, everything else trains.
pub fn get_lo_split(ds: &Dataset, params: &LoParams) -> SplitManifest {
    lo_split_folds(ds, params, 1)
}

/// Multi-fold variant: fold f reruns the extraction with seed `seed + f`,
/// so candidate tie-breaking differs between folds.
pub fn lo_split_folds(ds: &Dataset, params: &LoParams, n_folds: usize) -> SplitManifest {
    assert!(n_folds >= 1);
    let mut manifest_params = SplitParameters::new(params.threshold, params.seed, ds.fp_source);
    manifest_params.min_cluster_size = Some(params.min_cluster_size);
    manifest_params.max_clusters = if params.max_clusters == usize::MAX {
        None
    } else {
        Some(params.max_clusters)
    };
    manifest_params.std_threshold = Some(params.std_threshold);
    manifest_params.std_includes_center = Some(true);
    let mut manifest = SplitManifest::new("lo-split", manifest_params);

    for fold_idx in 0..n_folds {
        let fold_params = LoParams {
            seed: params.seed + fold_idx as u64,
            ..params.clone()
        };
        let (clusters, pool) = select_distinct_clusters(ds, &fold_params);

        let mut train: Vec<usize> = pool;
        let mut test: Vec<usize> = Vec::new();
        let mut infos = Vec::new();
        for (cluster_idx, cluster) in clusters.iter().enumerate() {
            train.push(cluster.center);
            for &m in &cluster.members {
                if m != cluster.center {
                    test.push(m);
                }
            }
            infos.push(ClusterInfo {
                cluster: cluster_idx,
                center: ds.records[cluster.center].id.clone(),
                anchor: ds.records[cluster.center].id.clone(),
                members: cluster.members.iter().map(|&m| ds.records[m].id.clone()).collect(),
            });
        }
        train.sort_unstable();
        test.sort_unstable();
        manifest.folds.push(Fold {
            train: train.iter().map(|&i| ds.records[i].id.clone()).collect(),
            test: test.iter().map(|&i| ds.records[i].id.clone()).collect(),
            clusters: Some(infos),
        });
    }
    manifest
}

/// Cluster id per test molecule index for one extraction, used when
/// writing test CSVs with a `cluster` column.
pub fn cluster_assignment(ds: &Dataset, clusters: &[LoCluster]) -> Vec<Option<usize>> {
    let mut out = vec![None; ds.len()];
    for (idx, cluster) in clusters.iter().enumerate() {
        for &m in &cluster.members {
            if m != cluster.center {
                out[m] = Some(idx);
            }
        }
    }
    out
}
