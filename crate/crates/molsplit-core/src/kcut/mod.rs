//! Balanced vertex minimum k-cut: remove a minimum-weight vertex set so the
//! graph separates into k parts, each meeting a weight lower bound.
//!
//! Stated as a maximization: assign each vertex to one of k partitions or to
//! the removed set, maximize the kept weight, subject to (a) no edge joining
//! two distinct partitions and (b) partition `i` holding at least `bounds[i]`
//! total weight. The exact engine is an in-repo branch-and-bound
//! ([`solve_balanced_kcut`]); [`brute_force_kcut`] is the independent
//! enumeration oracle, [`greedy_kcut`] the incumbent-seeding heuristic.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod solver;

pub use solver::solve_balanced_kcut;

/// Undirected graph with positive integer vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weights: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex weight must be >= 1 (vertex {0})")]
    ZeroWeight(usize),
    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),
}

impl WeightedGraph {
    pub fn new(weights: Vec<u64>, edges: &[(usize, usize)]) -> Result<WeightedGraph, GraphError> {
        let n = weights.len();
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(GraphError::ZeroWeight(v));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(GraphError::BadEdge(u, v));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(WeightedGraph { weights, adj })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Every edge once, with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}

impl From<&crate::coarsen::CoarseGraph> for WeightedGraph {
    fn from(cg: &crate::coarsen::CoarseGraph) -> WeightedGraph {
        WeightedGraph {
            weights: cg.node_weights().to_vec(),
            adj: (0..cg.m()).map(|c| cg.neighbors(c).to_vec()).collect(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProblemError {
    #[error("k must be >= 2, got {0}")]
    BadK(usize),
    #[error("expected {k} bounds, got {got}")]
    BadBounds { k: usize, got: usize },
    #[error("bounds sum {bounds} exceeds total weight {total}")]
    BoundsExceedWeight { bounds: u64, total: u64 },
}

#[derive(Debug, Clone)]
pub struct KCutProblem {
    pub graph: WeightedGraph,
    pub k: usize,
    pub bounds: Vec<u64>,
    pub time_budget: Option<Duration>,
}

impl KCutProblem {
    pub fn new(
        graph: WeightedGraph,
        k: usize,
        bounds: Vec<u64>,
        time_budget: Option<Duration>,
    ) -> Result<KCutProblem, ProblemError> {
        if k < 2 {
            return Err(ProblemError::BadK(k));
        }
        if bounds.len() != k {
            return Err(ProblemError::BadBounds {
                k,
                got: bounds.len(),
            });
        }
        let total = graph.total_weight();
        let sum: u64 = bounds.iter().sum();
        if sum > total {
            return Err(ProblemError::BoundsExceedWeight { bounds: sum, total });
        }
        Ok(KCutProblem {
            graph,
            k,
            bounds,
            time_budget,
        })
    }
}

/// Assignment of each vertex to a partition `1..=k` or to the removed set
/// (`0`), with the kept-weight objective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KCutSolution {
    pub assignment: Vec<u32>,
    pub kept_weight: u64,
    pub optimal: bool,
    /// Upper bound minus `kept_weight` when optimality was not proven.
    pub gap: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("problem is infeasible: {0}")]
    Infeasible(String),
    #[error("time budget exceeded before a feasible solution was found")]
    TimeBudgetExceeded,
    #[error("instance too large for exhaustive search: {assignments:e} assignments exceed cap {cap}")]
    TooLarge { assignments: f64, cap: u64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Outcome of checking a solution against the constraint families:
/// partition separation, weight bounds, objective consistency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Check a solution; never fails, every violated constraint is listed.
pub fn verify_kcut(problem: &KCutProblem, solution: &KCutSolution) -> VerifyReport {
    let mut violations = Vec::new();
    let n = problem.graph.n();
    if solution.assignment.len() != n {
        violations.push(format!(
            "assignment length {} does not match vertex count {n}",
            solution.assignment.len()
        ));
        return VerifyReport {
            ok: false,
            violations,
        };
    }
    for (v, &a) in solution.assignment.iter().enumerate() {
        if a as usize > problem.k {
            violations.push(format!("vertex {v} assigned to nonexistent partition {a}"));
        }
    }
    for (u, v) in problem.graph.edges() {
        let (au, av) = (solution.assignment[u], solution.assignment[v]);
        if au != 0 && av != 0 && au != av {
            violations.push(format!(
                "edge ({u}, {v}) joins distinct partitions {au} and {av}"
            ));
        }
    }
    let mut part_weight = vec![0u64; problem.k + 1];
    for (v, &a) in solution.assignment.iter().enumerate() {
        if (a as usize) <= problem.k {
            part_weight[a as usize] += problem.graph.weight(v);
        }
    }
    for (i, &bound) in problem.bounds.iter().enumerate() {
        if part_weight[i + 1] < bound {
            violations.push(format!(
                "partition {} weight {} below bound {bound}",
                i + 1,
                part_weight[i + 1]
            ));
        }
    }
    let kept: u64 = part_weight[1..].iter().sum();
    if kept != solution.kept_weight {
        violations.push(format!(
            "stated kept weight {} differs from recomputed {kept}",
            solution.kept_weight
        ));
    }
    VerifyReport {
        ok: violations.is_empty(),
        violations,
    }
}

pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Exhaustive enumeration oracle: tries all `(k+1)^n` assignments in
/// lexicographic order (vertex 0 most significant, values `0..=k`
/// ascending) and keeps the first maximum-kept-weight feasible one.
pub fn brute_force_kcut(problem: &KCutProblem) -> Result<KCutSolution, SolveError> {
    brute_force_kcut_with_cap(problem, DEFAULT_ENUM_CAP)
}

pub fn brute_force_kcut_with_cap(
    problem: &KCutProblem,
    cap: u64,
) -> Result<KCutSolution, SolveError> {
    let n = problem.graph.n();
    let base = problem.k as u64 + 1;
    let count = (base as f64).powi(n as i32);
    if count > cap as f64 {
        return Err(SolveError::TooLarge {
            assignments: count,
            cap,
        });
    }

    let mut assignment = vec![0u32; n];
    let mut best: Option<(u64, Vec<u32>)> = None;
    loop {
        if let Some(kept) = feasible_kept_weight(problem, &assignment) {
            if best.as_ref().is_none_or(|(bw, _)| kept > *bw) {
                best = Some((kept, assignment.clone()));
            }
        }
        // Odometer increment, least significant digit last.
        let mut pos = n;
        loop {
            if pos == 0 {
                match best {
                    Some((kept_weight, assignment)) => {
                        return Ok(KCutSolution {
                            assignment,
                            kept_weight,
                            optimal: true,
                            gap: 0,
                        })
                    }
                    None => {
                        return Err(SolveError::Infeasible(
                            "exhaustive enumeration found no feasible assignment".into(),
                        ))
                    }
                }
            }
            pos -= 1;
            if u64::from(assignment[pos]) + 1 < base {
                assignment[pos] += 1;
                for digit in &mut assignment[pos + 1..] {
                    *digit = 0;
                }
                break;
            }
        }
    }
}

fn feasible_kept_weight(problem: &KCutProblem, assignment: &[u32]) -> Option<u64> {
    for (u, v) in problem.graph.edges() {
        let (au, av) = (assignment[u], assignment[v]);
        if au != 0 && av != 0 && au != av {
            return None;
        }
    }
    let mut part_weight = vec![0u64; problem.k + 1];
    for (v, &a) in assignment.iter().enumerate() {
        part_weight[a as usize] += problem.graph.weight(v);
    }
    for (i, &bound) in problem.bounds.iter().enumerate() {
        if part_weight[i + 1] < bound {
            return None;
        }
    }
    Some(part_weight[1..].iter().sum())
}

/// Component-packing heuristic: assign whole connected components to the
/// partition furthest below its bound, heaviest component first. While some
/// bound is unmet, fracture the heaviest multi-vertex component by removing
/// its highest-degree vertices, then repack. Feasible but not necessarily
/// optimal; used to seed the exact solver.
pub fn greedy_kcut(problem: &KCutProblem) -> Result<KCutSolution, SolveError> {
    let n = problem.graph.n();
    let total = problem.graph.total_weight();
    let mut removed = vec![false; n];
    let mut removed_weight = 0u64;

    loop {
        let comps = kept_components(&problem.graph, &removed);
        if let Some(assignment) = pack_components(problem, &comps) {
            return Ok(KCutSolution {
                assignment,
                kept_weight: total - removed_weight,
                optimal: false,
                gap: removed_weight,
            });
        }
        // Fracture the heaviest remaining component with at least 2 vertices.
        let target = comps
            .iter()
            .filter(|c| c.len() >= 2)
            .max_by(|a, b| {
                let wa: u64 = a.iter().map(|&v| problem.graph.weight(v)).sum();
                let wb: u64 = b.iter().map(|&v| problem.graph.weight(v)).sum();
                wa.cmp(&wb).then(b[0].cmp(&a[0]))
            })
            .cloned();
        let Some(mut comp) = target else {
            return Err(SolveError::Infeasible(
                "greedy packing cannot meet the partition bounds".into(),
            ));
        };
        // Remove highest-degree vertices until the component falls apart.
        let pieces_before = 1;
        loop {
            let v = *comp
                .iter()
                .max_by(|&&a, &&b| {
                    let da = live_degree(&problem.graph, a, &removed);
                    let db = live_degree(&problem.graph, b, &removed);
                    da.cmp(&db).then(b.cmp(&a))
                })
                .expect("component is nonempty");
            removed[v] = true;
            removed_weight += problem.graph.weight(v);
            comp.retain(|&u| u != v);
            if comp.len() <= 1 {
                break;
            }
            let pieces = count_components_within(&problem.graph, &comp, &removed);
            if pieces > pieces_before {
                break;
            }
        }
    }
}

fn live_degree(graph: &WeightedGraph, v: usize, removed: &[bool]) -> usize {
    graph.neighbors(v).iter().filter(|&&u| !removed[u]).count()
}

/// Connected components over non-removed vertices, members ascending.
fn kept_components(graph: &WeightedGraph, removed: &[bool]) -> Vec<Vec<usize>> {
    let n = graph.n();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if removed[start] || seen[start] {
            continue;
        }
        let mut comp = vec![start];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &u in graph.neighbors(v) {
                if !removed[u] && !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

fn count_components_within(graph: &WeightedGraph, members: &[usize], removed: &[bool]) -> usize {
    let set: std::collections::HashSet<usize> = members.iter().copied().collect();
    let mut seen = std::collections::HashSet::new();
    let mut pieces = 0;
    for &start in members {
        if seen.contains(&start) {
            continue;
        }
        pieces += 1;
        let mut stack = vec![start];
        seen.insert(start);
        while let Some(v) = stack.pop() {
            for &u in graph.neighbors(v) {
                if set.contains(&u) && !removed[u] && !seen.contains(&u) {
                    seen.insert(u);
                    stack.push(u);
                }
            }
        }
    }
    pieces
}

/// First-fit packing: components in descending weight order (ties by
/// smallest member) each go to the partition with the largest remaining
/// deficit (ties by lowest index). Returns the assignment when all bounds
/// end up met.
fn pack_components(problem: &KCutProblem, comps: &[Vec<usize>]) -> Option<Vec<u32>> {
    let mut order: Vec<usize> = (0..comps.len()).collect();
    let weight_of = |c: &Vec<usize>| -> u64 { c.iter().map(|&v| problem.graph.weight(v)).sum() };
    order.sort_by(|&a, &b| {
        weight_of(&comps[b])
            .cmp(&weight_of(&comps[a]))
            .then(comps[a][0].cmp(&comps[b][0]))
    });

    let mut part_weight = vec![0u64; problem.k];
    let mut assignment = vec![0u32; problem.graph.n()];
    for &c in &order {
        let target = (0..problem.k)
            .max_by_key(|&i| {
                (
                    problem.bounds[i].saturating_sub(part_weight[i]),
                    std::cmp::Reverse(i),
                )
            })
            .expect("k >= 2");
        part_weight[target] += weight_of(&comps[c]);
        for &v in &comps[c] {
            assignment[v] = (target + 1) as u32;
        }
    }
    if (0..problem.k).all(|i| part_weight[i] >= problem.bounds[i]) {
        Some(assignment)
    } else {
        None
    }
}

/// On-disk problem description for offline debugging.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub weights: Vec<u64>,
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
    pub bounds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_secs: Option<f64>,
}

impl ProblemSpec {
    pub fn into_problem(self) -> Result<KCutProblem, SolveError> {
        let graph = WeightedGraph::new(self.weights, &self.edges)
            .map_err(|e| SolveError::Infeasible(e.to_string()))?;
        let time_budget = self.time_budget_secs.map(Duration::from_secs_f64);
        Ok(KCutProblem::new(graph, self.k, self.bounds, time_budget)?)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn problem(
        weights: Vec<u64>,
        edges: &[(usize, usize)],
        k: usize,
        bounds: Vec<u64>,
    ) -> KCutProblem {
        KCutProblem::new(WeightedGraph::new(weights, edges).unwrap(), k, bounds, None).unwrap()
    }

    /// Path on three vertices: the canonical small instance where removing
    /// the middle vertex yields two unit partitions.
    pub(crate) fn path3() -> KCutProblem {
        problem(vec![1, 1, 1], &[(0, 1), (1, 2)], 2, vec![1, 1])
    }

    /// Star with four unit leaves.
    pub(crate) fn star4() -> KCutProblem {
        problem(
            vec![1, 1, 1, 1, 1],
            &[(0, 1), (0, 2), (0, 3), (0, 4)],
            2,
            vec![2, 2],
        )
    }

    pub(crate) fn edgeless6() -> KCutProblem {
        problem(vec![1; 6], &[], 3, vec![2, 2, 2])
    }

    pub(crate) fn triangle() -> KCutProblem {
        problem(vec![1, 1, 1], &[(0, 1), (0, 2), (1, 2)], 2, vec![1, 1])
    }

    #[test]
    fn oracle_path3_keeps_two() {
        let sol = brute_force_kcut(&path3()).unwrap();
        assert_eq!(sol.kept_weight, 2);
        assert!(sol.optimal);
        assert_eq!(sol.assignment.iter().filter(|&&a| a == 0).count(), 1);
        assert!(verify_kcut(&path3(), &sol).ok);
    }

    #[test]
    fn oracle_star4_removes_the_center() {
        let sol = brute_force_kcut(&star4()).unwrap();
        assert_eq!(sol.kept_weight, 4);
        assert_eq!(sol.assignment[0], 0);
        assert!(verify_kcut(&star4(), &sol).ok);
    }

    #[test]
    fn oracle_edgeless_keeps_everything() {
        let sol = brute_force_kcut(&edgeless6()).unwrap();
        assert_eq!(sol.kept_weight, 6);
        assert!(verify_kcut(&edgeless6(), &sol).ok);
    }

    #[test]
    fn oracle_triangle_with_unit_bounds_is_infeasible() {
        // Any two kept vertices of a triangle are adjacent, so two nonempty
        // partitions cannot coexist no matter what is removed.
        match brute_force_kcut(&triangle()) {
            Err(SolveError::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn oracle_k4_with_bounds_two_two_is_infeasible() {
        let p = problem(
            vec![1; 4],
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            2,
            vec![2, 2],
        );
        match brute_force_kcut(&p) {
            Err(SolveError::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn oracle_degenerate_single_vertex() {
        let p = problem(vec![1], &[], 2, vec![0, 0]);
        let sol = brute_force_kcut(&p).unwrap();
        assert_eq!(sol.kept_weight, 1);
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let p = problem(vec![1; 30], &[], 2, vec![1, 1]);
        match brute_force_kcut(&p) {
            Err(SolveError::TooLarge { .. }) => {}
            other => panic!("expected too-large error, got {other:?}"),
        }
    }

    #[test]
    fn verify_flags_cross_partition_edges() {
        let p = triangle();
        let bad = KCutSolution {
            assignment: vec![1, 1, 2],
            kept_weight: 3,
            optimal: false,
            gap: 0,
        };
        let report = verify_kcut(&p, &bad);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("joins distinct partitions")));
    }

    #[test]
    fn verify_flags_unmet_bounds() {
        let p = edgeless6();
        let bad = KCutSolution {
            assignment: vec![1, 1, 1, 1, 1, 2],
            kept_weight: 6,
            optimal: false,
            gap: 0,
        };
        let report = verify_kcut(&p, &bad);
        assert!(!report.ok);
        assert!(report.violations.iter().any(|v| v.contains("below bound")));
    }

    #[test]
    fn verify_flags_objective_mismatch() {
        let p = edgeless6();
        let bad = KCutSolution {
            assignment: vec![1, 1, 2, 2, 3, 3],
            kept_weight: 5,
            optimal: false,
            gap: 0,
        };
        let report = verify_kcut(&p, &bad);
        assert!(!report.ok);
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("differs from recomputed")));
    }

    #[test]
    fn greedy_packs_two_components_without_removal() {
        // Two 5-cliques of weight 5 each.
        let mut edges = Vec::new();
        for base in [0, 5] {
            for i in 0..5 {
                for j in (i + 1)..5 {
                    edges.push((base + i, base + j));
                }
            }
        }
        let p = problem(vec![1; 10], &edges, 2, vec![4, 4]);
        let sol = greedy_kcut(&p).unwrap();
        assert_eq!(sol.kept_weight, 10);
        assert!(verify_kcut(&p, &sol).ok);
    }

    #[test]
    fn greedy_edgeless_keeps_everything() {
        let sol = greedy_kcut(&edgeless6()).unwrap();
        assert_eq!(sol.kept_weight, 6);
        assert!(verify_kcut(&edgeless6(), &sol).ok);
    }

    #[test]
    fn greedy_path3_is_bounded_by_the_oracle() {
        let p = path3();
        let greedy = greedy_kcut(&p).unwrap();
        assert!(verify_kcut(&p, &greedy).ok);
        let oracle = brute_force_kcut(&p).unwrap();
        assert!(greedy.kept_weight <= oracle.kept_weight);
        assert_eq!(greedy.kept_weight, 2);
    }

    #[test]
    fn greedy_triangle_signals_infeasibility() {
        match greedy_kcut(&triangle()) {
            Err(SolveError::Infeasible(_)) => {}
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn problem_spec_round_trips() {
        let spec = ProblemSpec {
            weights: vec![1, 1, 1],
            edges: vec![(0, 1), (1, 2)],
            k: 2,
            bounds: vec![1, 1],
            time_budget_secs: None,
        };
        let json = serde_json::to_string(&spec).unwrap();
        let back: ProblemSpec = serde_json::from_str(&json).unwrap();
        let p = back.into_problem().unwrap();
        assert_eq!(p.graph.n(), 3);
        assert_eq!(p.bounds, vec![1, 1]);
    }
}
