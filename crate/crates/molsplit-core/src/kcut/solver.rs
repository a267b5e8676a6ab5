//! Exact branch-and-bound engine for the balanced vertex minimum k-cut.
//!
//! Search space: one decision per vertex, values `0` (remove) or `1..=k`.
//! Vertices are branched in descending weight, then descending degree, then
//! ascending index; heavy, highly connected vertices settle first so the
//! kept-weight bound tightens early. Pruning:
//!
//! * bound: current kept weight plus all unassigned weight must beat the
//!   incumbent strictly;
//! * deficit: the summed unmet bounds must fit into the unassigned weight;
//! * propagation: a vertex adjacent to two distinct partitions is forced to
//!   the removed set, one adjacent to a single partition may only join it or
//!   be removed;
//! * symmetry: among empty partitions with equal bounds only the
//!   lowest-indexed one may be opened.
//!
//! The incumbent is seeded from [`greedy_kcut`], and equal-objective
//! solutions never replace it, so the result is deterministic.
//!
//! The solver abstraction seam is this function's signature: problem in,
//! solution with optimality flag and gap out. A MILP backend could be
//! swapped in behind it without touching callers.

use std::time::Instant;

use super::{greedy_kcut, KCutProblem, KCutSolution, SolveError};

/// How many search nodes pass between deadline checks.
const TIME_CHECK_MASK: u64 = 0x3ff;

const UNASSIGNED: u32 = u32::MAX;

struct Search<'p> {
    problem: &'p KCutProblem,
    order: Vec<usize>,
    assignment: Vec<u32>,
    part_weight: Vec<u64>,
    kept: u64,
    remaining: u64,
    best: Option<(u64, Vec<u32>)>,
    deadline: Option<Instant>,
    node_count: u64,
    aborted: bool,
}

/// Exact solve within the problem's optional wall-clock budget. Returns the
/// best incumbent with `optimal = false` and a valid gap when the budget
/// runs out mid-search; completes with `optimal = true, gap = 0` otherwise.
pub fn solve_balanced_kcut(problem: &KCutProblem) -> Result<KCutSolution, SolveError> {
    let n = problem.graph.n();
    let total = problem.graph.total_weight();
    let bound_sum: u64 = problem.bounds.iter().sum();
    if bound_sum > total {
        return Err(SolveError::Infeasible(format!(
            "bounds sum {bound_sum} exceeds total weight {total}"
        )));
    }

    let incumbent = match greedy_kcut(problem) {
        Ok(sol) => Some((sol.kept_weight, sol.assignment)),
        Err(SolveError::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        problem
            .graph
            .weight(b)
            .cmp(&problem.graph.weight(a))
            .then(problem.graph.degree(b).cmp(&problem.graph.degree(a)))
            .then(a.cmp(&b))
    });

    let mut search = Search {
        problem,
        order,
        assignment: vec![UNASSIGNED; n],
        part_weight: vec![0; problem.k],
        kept: 0,
        remaining: total,
        best: incumbent,
        deadline: problem.time_budget.map(|b| Instant::now() + b),
        node_count: 0,
        aborted: false,
    };
    search.dfs(0);

    match (search.best, search.aborted) {
        (Some((kept_weight, assignment)), aborted) => Ok(KCutSolution {
            assignment,
            kept_weight,
            optimal: !aborted,
            gap: if aborted { total - kept_weight } else { 0 },
        }),
        (None, false) => Err(SolveError::Infeasible(
            "no assignment satisfies the partition bounds".into(),
        )),
        (None, true) => Err(SolveError::TimeBudgetExceeded),
    }
}

impl<'p> Search<'p> {
    fn dfs(&mut self, depth: usize) {
        if self.aborted {
            return;
        }
        self.node_count += 1;
        // Checked on the first node and then every 1024 nodes.
        if self.node_count & TIME_CHECK_MASK == 1 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                    return;
                }
            }
        }

        if depth == self.order.len() {
            if (0..self.problem.k).all(|i| self.part_weight[i] >= self.problem.bounds[i]) {
                let better = self.best.as_ref().is_none_or(|(bw, _)| self.kept > *bw);
                if better {
                    self.best = Some((self.kept, self.assignment.clone()));
                }
            }
            return;
        }

        // Optimistic completion: everything unassigned kept.
        if let Some((best_kept, _)) = &self.best {
            if self.kept + self.remaining <= *best_kept {
                return;
            }
        }
        // The unmet bounds must fit into the weight still to be assigned.
        let deficit: u64 = (0..self.problem.k)
            .map(|i| self.problem.bounds[i].saturating_sub(self.part_weight[i]))
            .sum();
        if deficit > self.remaining {
            return;
        }

        let v = self.order[depth];
        let w = self.problem.graph.weight(v);

        // Partitions already pinned by assigned neighbors.
        let mut seen_partition = 0u32;
        let mut distinct = 0;
        for &u in self.problem.graph.neighbors(v) {
            let a = self.assignment[u];
            if a != UNASSIGNED && a != 0 && seen_partition != a {
                if seen_partition == 0 {
                    seen_partition = a;
                    distinct = 1;
                } else {
                    distinct = 2;
                    break;
                }
            }
        }

        let candidates: Vec<u32> = match distinct {
            2 => Vec::new(),
            1 => vec![seen_partition],
            _ => {
                let mut open: Vec<u32> = (1..=self.problem.k as u32)
                    .filter(|&p| self.symmetry_allows(p))
                    .collect();
                // Fill the largest remaining deficit first.
                open.sort_by_key(|&p| {
                    let i = (p - 1) as usize;
                    (
                        std::cmp::Reverse(
                            self.problem.bounds[i].saturating_sub(self.part_weight[i]),
                        ),
                        p,
                    )
                });
                open
            }
        };

        for p in candidates {
            let i = (p - 1) as usize;
            self.assignment[v] = p;
            self.part_weight[i] += w;
            self.kept += w;
            self.remaining -= w;
            self.dfs(depth + 1);
            self.assignment[v] = UNASSIGNED;
            self.part_weight[i] -= w;
            self.kept -= w;
            self.remaining += w;
            if self.aborted {
                return;
            }
        }

        // Removal branch last: keeping vertices is tried first.
        self.assignment[v] = 0;
        self.remaining -= w;
        self.dfs(depth + 1);
        self.assignment[v] = UNASSIGNED;
        self.remaining += w;
    }

    /// Among still-empty partitions with the same bound, only the first may
    /// be opened; occupied partitions are always allowed.
    fn symmetry_allows(&self, p: u32) -> bool {
        let i = (p - 1) as usize;
        if self.part_weight[i] > 0 {
            return true;
        }
        for j in 0..i {
            if self.problem.bounds[j] == self.problem.bounds[i] && self.part_weight[j] == 0 {
                return false;
            }
        }
        true
    }
}
