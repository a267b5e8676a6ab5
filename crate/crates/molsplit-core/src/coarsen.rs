//! Sphere-exclusion graph coarsening: collapse the molecule-level
//! similarity graph into a weighted cluster-level graph before cut solving.
//!
//! The sweep founds a cluster at each still-unassigned vertex in descending
//! neighbor-count order and captures its unassigned neighbors. Captured
//! members are not revisited, so a cluster's members need not be mutually
//! similar, only similar to the founder; validity of any downstream cut is
//! enforced at the molecule level regardless.

use crate::simgraph::SimGraph;

/// Weighted cluster-level graph. Node weights are cluster cardinalities;
/// an edge joins two clusters iff some molecule-level edge crosses them.
#[derive(Debug, Clone)]
pub struct CoarseGraph {
    node_weight: Vec<u64>,
    adj: Vec<Vec<usize>>,
    member_map: Vec<Vec<usize>>,
}

impl CoarseGraph {
    pub fn m(&self) -> usize {
        self.node_weight.len()
    }

    pub fn node_weight(&self, cluster: usize) -> u64 {
        self.node_weight[cluster]
    }

    pub fn node_weights(&self) -> &[u64] {
        &self.node_weight
    }

    pub fn neighbors(&self, cluster: usize) -> &[usize] {
        &self.adj[cluster]
    }

    /// Molecule indices of a cluster, ascending.
    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.member_map[cluster]
    }

    pub fn member_map(&self) -> &[Vec<usize>] {
        &self.member_map
    }

    /// Every cluster-level edge once, with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

/// Per-vertex count of incident edges with similarity strictly above
/// `theta`, paired with the vertex index.
pub fn calculate_neighbors(g: &SimGraph, theta: f64) -> Vec<(usize, usize)> {
    assert!(
        theta >= g.threshold(),
        "theta {theta} below graph threshold {}",
        g.threshold()
    );
    (0..g.n())
        .map(|v| {
            let count = g
                .neighbors(v)
                .iter()
                .filter(|e| e.similarity > theta)
                .count();
            (count, v)
        })
        .collect()
}

/// Greedy sweep over `sorted_counts` (descending count, ties by ascending
/// vertex index): each unassigned vertex founds a cluster and captures its
/// unassigned neighbors above `theta`. Returns the 1-based assignment per
/// vertex and the number of clusters.
pub fn cluster_nodes(
    sorted_counts: &[(usize, usize)],
    g: &SimGraph,
    theta: f64,
) -> (Vec<usize>, usize) {
    let mut assignment = vec![0usize; g.n()];
    let mut total = 0usize;
    for &(_, v) in sorted_counts {
        if assignment[v] != 0 {
            continue;
        }
        total += 1;
        assignment[v] = total;
        for e in g.neighbors(v) {
            if e.similarity > theta && assignment[e.to] == 0 {
                assignment[e.to] = total;
            }
        }
    }
    (assignment, total)
}

/// Contract the assignment into the cluster-level graph. Edges come from
/// all molecule-level edges crossing distinct clusters; self-edges are
/// dropped. Cluster ids are normalized to 0-based here.
pub fn build_coarse_graph(
    assignment: &[usize],
    total_clusters: usize,
    g: &SimGraph,
) -> CoarseGraph {
    assert_eq!(assignment.len(), g.n(), "assignment must cover all vertices");
    let mut member_map = vec![Vec::new(); total_clusters];
    for (v, &c) in assignment.iter().enumerate() {
        assert!(c >= 1 && c <= total_clusters, "vertex {v} unassigned");
        member_map[c - 1].push(v);
    }
    let node_weight: Vec<u64> = member_map.iter().map(|m| m.len() as u64).collect();

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total_clusters];
    for (u, v, _) in g.edges() {
        let (a, b) = (assignment[u] - 1, assignment[v] - 1);
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    CoarseGraph {
        node_weight,
        adj,
        member_map,
    }
}

/// Full coarsening pass: neighbor counts, descending sort (ties by
/// ascending index for determinism), sweep, contraction.
pub fn coarse_graph(g: &SimGraph, theta: f64) -> CoarseGraph {
    let mut counts = calculate_neighbors(g, theta);
    counts.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let (assignment, total) = cluster_nodes(&counts, g, theta);
    build_coarse_graph(&assignment, total, g)
}
