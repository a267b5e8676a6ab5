//! Tanimoto similarity and the molecule-level neighborhood graph.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::molio::{Dataset, Fingerprint};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("fingerprint width mismatch: {a} bits vs {b} bits")]
    WidthMismatch { a: u32, b: u32 },
}

/// Tanimoto similarity `|a AND b| / |a OR b|`; defined as 0 when both
/// fingerprints are all-zero.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, SimError> {
    if a.nbits() != b.nbits() {
        return Err(SimError::WidthMismatch {
            a: a.nbits(),
            b: b.nbits(),
        });
    }
    Ok(tanimoto_unchecked(a, b))
}

/// Tanimoto over equal-width fingerprints; callers guarantee the widths.
pub(crate) fn tanimoto_unchecked(a: &Fingerprint, b: &Fingerprint) -> f64 {
    let mut inter = 0u32;
    let mut union = 0u32;
    for (x, y) in a.words().iter().zip(b.words()) {
        inter += (x & y).count_ones();
        union += (x | y).count_ones();
    }
    if union == 0 {
        0.0
    } else {
        f64::from(inter) / f64::from(union)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEdge {
    pub to: usize,
    pub similarity: f64,
}

/// Undirected similarity graph over dataset indices. An edge is stored for
/// every pair at or above the threshold; adjacency lists are sorted.
#[derive(Debug, Clone)]
pub struct SimGraph {
    threshold: f64,
    adj: Vec<Vec<SimEdge>>,
}

impl SimGraph {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn neighbors(&self, v: usize) -> &[SimEdge] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Every edge once, as `(u, v, similarity)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |e| u < e.to)
                .map(move |e| (u, e.to, e.similarity))
        })
    }

    /// Debug export: `u,v,similarity` per edge.
    pub fn write_edge_list(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "u,v,similarity")?;
        for (u, v, s) in self.edges() {
            writeln!(w, "{u},{v},{}", crate::molio::format_float(s))?;
        }
        Ok(())
    }
}

/// Build the neighborhood graph: an edge joins `u` and `v` iff their
/// Tanimoto similarity is at least `threshold`.
///
/// All pairs are examined; a popcount bound (`min/max` popcount already
/// below threshold) skips the word-level work without changing the result.
/// Rows are processed in parallel on the ambient rayon pool and merged in
/// index order, so the output does not depend on thread count.
pub fn build_neighborhood_graph(ds: &Dataset, threshold: f64) -> SimGraph {
    assert!(
        threshold > 0.0 && threshold <= 1.0,
        "threshold must be in (0, 1], got {threshold}"
    );
    let fps: Vec<&Fingerprint> = ds.records.iter().map(|r| &r.fingerprint).collect();
    let n = fps.len();

    // Upper-triangle rows, computed independently and mirrored afterwards.
    let rows: Vec<Vec<SimEdge>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = Vec::new();
            let pu = fps[u].popcount();
            for v in (u + 1)..n {
                let pv = fps[v].popcount();
                let (lo, hi) = if pu < pv { (pu, pv) } else { (pv, pu) };
                if hi == 0 || f64::from(lo) < threshold * f64::from(hi) {
                    continue; // similarity provably below threshold
                }
                let s = tanimoto_unchecked(fps[u], fps[v]);
                if s >= threshold {
                    row.push(SimEdge {
                        to: v,
                        similarity: s,
                    });
                }
            }
            row
        })
        .collect();

    let mut adj: Vec<Vec<SimEdge>> = vec![Vec::new(); n];
    for (u, row) in rows.into_iter().enumerate() {
        for e in row {
            adj[e.to].push(SimEdge {
                to: u,
                similarity: e.similarity,
            });
            adj[u].push(e);
        }
    }
    for list in &mut adj {
        list.sort_by_key(|e| e.to);
    }
    SimGraph { threshold, adj }
}

/// Component label per vertex; labels are 0-based in order of each
/// component's smallest member index.
pub fn connected_components(g: &SimGraph) -> Vec<usize> {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for e in g.neighbors(v) {
                if label[e.to] == usize::MAX {
                    label[e.to] = next;
                    stack.push(e.to);
                }
            }
        }
        next += 1;
    }
    label
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::molio::{DatasetFormat, DatasetSchema, FpSource, Record};

    pub(crate) fn dataset_from_fps(fps: Vec<Fingerprint>) -> Dataset {
        let nbits = fps.first().map(|f| f.nbits()).unwrap_or(64);
        Dataset {
            records: fps
                .into_iter()
                .enumerate()
                .map(|(i, fingerprint)| Record {
                    id: format!("m{i}"),
                    smiles: None,
                    fingerprint,
                    value: None,
                    label: None,
                })
                .collect(),
            schema: DatasetSchema {
                format: DatasetFormat::FingerprintCsv,
                has_value: false,
                has_label: false,
            },
            fp_source: FpSource::Precomputed { nbits },
        }
    }

    fn fp(indices: &[u32]) -> Fingerprint {
        Fingerprint::from_indices(64, indices.iter().copied())
    }

    #[test]
    fn tanimoto_identity_and_disjoint() {
        let a = fp(&[1, 2, 3]);
        assert_eq!(tanimoto(&a, &a).unwrap(), 1.0);
        let b = fp(&[10, 11]);
        assert_eq!(tanimoto(&a, &b).unwrap(), 0.0);
        let z = Fingerprint::zeros(64);
        assert_eq!(tanimoto(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn tanimoto_counts_intersection_over_union() {
        let a = fp(&[1, 2, 3]);
        let b = fp(&[2, 3, 4]);
        assert_eq!(tanimoto(&a, &b).unwrap(), 0.5);
    }

    #[test]
    fn tanimoto_width_mismatch() {
        let a = Fingerprint::zeros(64);
        let b = Fingerprint::zeros(128);
        assert_eq!(
            tanimoto(&a, &b),
            Err(SimError::WidthMismatch { a: 64, b: 128 })
        );
    }

    #[test]
    fn identical_molecules_give_a_complete_graph() {
        let ds = dataset_from_fps(vec![fp(&[1, 2, 3]); 4]);
        let g = build_neighborhood_graph(&ds, 0.4);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn disjoint_fingerprints_give_an_empty_graph() {
        let ds = dataset_from_fps(vec![fp(&[1]), fp(&[2]), fp(&[3])]);
        let g = build_neighborhood_graph(&ds, 0.4);
        assert_eq!(g.edge_count(), 0);
    }

    /// Venn construction with pairwise similarities 0.5, 0.3 and 0.45:
    /// shared bits abc={0..3}, ab={4..6}, ac={7,8}, bc={9..13}, c-only={14..19}.
    pub(crate) fn three_fp_fixture() -> Vec<Fingerprint> {
        let a: Vec<u32> = (0..9).collect(); // abc + ab + ac
        let b: Vec<u32> = (0..7).chain(9..14).collect(); // abc + ab + bc
        let c: Vec<u32> = (0..4).chain(7..20).collect(); // abc + ac + bc + own
        vec![
            Fingerprint::from_indices(64, a),
            Fingerprint::from_indices(64, b),
            Fingerprint::from_indices(64, c),
        ]
    }

    #[test]
    fn threshold_cuts_between_point_three_and_point_five() {
        let fps = three_fp_fixture();
        assert_eq!(tanimoto(&fps[0], &fps[1]).unwrap(), 0.5);
        assert_eq!(tanimoto(&fps[0], &fps[2]).unwrap(), 0.3);
        assert_eq!(tanimoto(&fps[1], &fps[2]).unwrap(), 0.45);
        let g = build_neighborhood_graph(&dataset_from_fps(fps), 0.4);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(2), 1);
    }

    #[test]
    fn popcount_bound_matches_naive_all_pairs() {
        // Deterministic pseudo-random fingerprints, then cross-check the
        // pruned builder against direct all-pairs recomputation.
        let mut state = 0x1234_5678_9abc_def0u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let fps: Vec<Fingerprint> = (0..60)
            .map(|_| {
                let bits: Vec<u32> = (0..128).filter(|_| next() % 11 < 2).collect();
                Fingerprint::from_indices(128, bits)
            })
            .collect();
        let ds = dataset_from_fps(fps.clone());
        for threshold in [0.2, 0.4, 0.7] {
            let g = build_neighborhood_graph(&ds, threshold);
            let mut expected = Vec::new();
            for u in 0..fps.len() {
                for v in (u + 1)..fps.len() {
                    let s = tanimoto(&fps[u], &fps[v]).unwrap();
                    if s >= threshold {
                        expected.push((u, v, s));
                    }
                }
            }
            let got: Vec<_> = g.edges().collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn stored_edges_meet_threshold_and_non_edges_do_not() {
        let fps = three_fp_fixture();
        let ds = dataset_from_fps(fps.clone());
        let g = build_neighborhood_graph(&ds, 0.4);
        for (u, v, s) in g.edges() {
            assert!(tanimoto(&fps[u], &fps[v]).unwrap() >= g.threshold());
            assert_eq!(s, tanimoto(&fps[u], &fps[v]).unwrap());
        }
        // Symmetry of adjacency.
        for u in 0..g.n() {
            for e in g.neighbors(u) {
                assert!(g.neighbors(e.to).iter().any(|x| x.to == u));
            }
        }
    }

    #[test]
    fn components_of_empty_and_path_and_triangles() {
        let ds = dataset_from_fps(vec![fp(&[1]), fp(&[2]), fp(&[3]), fp(&[4]), fp(&[5])]);
        let g = build_neighborhood_graph(&ds, 0.4);
        assert_eq!(connected_components(&g), vec![0, 1, 2, 3, 4]);

        // Path: consecutive fingerprints overlap enough, distant ones do not.
        let path = vec![
            fp(&[0, 1, 2, 3]),
            fp(&[2, 3, 4, 5]),
            fp(&[4, 5, 6, 7]),
            fp(&[6, 7, 8, 9]),
        ];
        let g = build_neighborhood_graph(&dataset_from_fps(path), 0.3);
        assert_eq!(connected_components(&g), vec![0, 0, 0, 0]);

        // Two triangles of identical fingerprints, no cross edges.
        let tri = vec![
            fp(&[1, 2]),
            fp(&[1, 2]),
            fp(&[1, 2]),
            fp(&[40, 41]),
            fp(&[40, 41]),
            fp(&[40, 41]),
        ];
        let g = build_neighborhood_graph(&dataset_from_fps(tri), 0.9);
        assert_eq!(connected_components(&g), vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn edge_list_export_format() {
        let fps = three_fp_fixture();
        let g = build_neighborhood_graph(&dataset_from_fps(fps), 0.4);
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "u,v,similarity\n0,1,0.5\n1,2,0.45\n");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_fp() -> impl Strategy<Value = Fingerprint> {
            proptest::collection::vec(any::<u32>(), 0..20).prop_map(|bits| {
                Fingerprint::from_indices(128, bits.into_iter().map(|b| b % 128))
            })
        }

        proptest! {
            #[test]
            fn tanimoto_is_symmetric_and_bounded(a in arb_fp(), b in arb_fp()) {
                let ab = tanimoto(&a, &b).unwrap();
                let ba = tanimoto(&b, &a).unwrap();
                prop_assert_eq!(ab, ba);
                prop_assert!((0.0..=1.0).contains(&ab));
            }

            #[test]
            fn tanimoto_self_similarity(a in arb_fp()) {
                let expected = if a.popcount() == 0 { 0.0 } else { 1.0 };
                prop_assert_eq!(tanimoto(&a, &a).unwrap(), expected);
            }

            #[test]
            fn component_labels_partition_the_vertices(
                fps in proptest::collection::vec(arb_fp(), 1..30),
                threshold in 0.05f64..1.0,
            ) {
                let g = build_neighborhood_graph(&dataset_from_fps(fps), threshold);
                let labels = connected_components(&g);
                prop_assert_eq!(labels.len(), g.n());
                // Labels are dense and start at 0.
                let max = labels.iter().copied().max().unwrap();
                for l in 0..=max {
                    prop_assert!(labels.contains(&l));
                }
                // Neighbors always share a label.
                for v in 0..g.n() {
                    for e in g.neighbors(v) {
                        prop_assert_eq!(labels[v], labels[e.to]);
                    }
                }
            }
        }
    }
}
