//! Bundled MILP solver: best-bound branch-and-bound over the binary
//! variables with a bounded-simplex relaxation, plus a row-by-row solution
//! checker and LP-file export for external solvers.

mod lp_export;
mod simplex;

pub use lp_export::{export_lp, write_lp_string};

use std::collections::{BinaryHeap, BTreeMap};
use std::cmp::Reverse;
use std::time::Instant;

use thiserror::Error;

use crate::graph::Topology;
use crate::model::{MilpModel, RowSense, VarKind};
use simplex::{solve_lp, LpOutcome, LpProblem, LpRow};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solution is missing variable `{0}`")]
    MissingVariable(String),
    #[error("invalid solver options: {0}")]
    BadOptions(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// A node, time, or iteration cap fired; incumbent (if any) is carried.
    CapHit,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::Unbounded => "Unbounded",
            SolveStatus::CapHit => "CapHit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRule {
    MostFractional,
    LowestIndex,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub int_tol: f64,
    pub rel_gap: f64,
    pub node_cap: usize,
    /// Wall-clock cap in seconds; `None` means unlimited.
    pub time_cap: Option<f64>,
    pub branch_rule: BranchRule,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-6,
            int_tol: 1e-6,
            rel_gap: 1e-6,
            node_cap: 1_000_000,
            time_cap: None,
            branch_rule: BranchRule::MostFractional,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<(), SolverError> {
        if !(self.feas_tol > 0.0 && self.int_tol > 0.0 && self.rel_gap >= 0.0) {
            return Err(SolverError::BadOptions("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    /// Objective of the incumbent; +inf when infeasible, -inf when unbounded.
    pub objective: f64,
    pub values: BTreeMap<String, f64>,
    /// Branch statuses extracted from the `z_*` variables and rounded.
    pub z: Topology,
    pub stats: SolveStats,
}

/// Ordered f64 for the best-bound heap.
#[derive(PartialEq)]
struct Bound(f64);

impl Eq for Bound {}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Bounds for each binary variable, parallel to the binary id list; the
/// node's bound rides in the heap key.
type NodeBounds = Vec<(f64, f64)>;

fn to_lp(model: &MilpModel, binary_ids: &[usize], binary_bounds: &[(f64, f64)]) -> LpProblem {
    let mut lower: Vec<f64> = model.vars().iter().map(|v| v.lower).collect();
    let mut upper: Vec<f64> = model.vars().iter().map(|v| v.upper).collect();
    for (pos, &id) in binary_ids.iter().enumerate() {
        lower[id] = binary_bounds[pos].0;
        upper[id] = binary_bounds[pos].1;
    }
    let mut cost = vec![0.0; model.var_count()];
    for &(id, coef) in &model.objective {
        cost[id] += coef;
    }
    let rows = model
        .rows()
        .iter()
        .map(|r| LpRow { terms: r.terms.clone(), sense: r.sense, rhs: r.rhs })
        .collect();
    LpProblem { cost, lower, upper, rows }
}

/// Best-bound branch-and-bound. Deterministic for fixed options: ties in the
/// queue break on insertion order, fractional ties on lowest variable index,
/// and the down branch is enqueued first.
pub fn solve(model: &MilpModel, opts: &SolverOptions) -> Result<Solution, SolverError> {
    opts.validate()?;
    let start = Instant::now();
    let binary_ids: Vec<usize> = model
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(i, _)| i)
        .collect();
    let root_bounds: Vec<(f64, f64)> = binary_ids
        .iter()
        .map(|&id| (model.vars()[id].lower, model.vars()[id].upper))
        .collect();

    let mut stats = SolveStats::default();
    let mut heap: BinaryHeap<Reverse<(Bound, usize)>> = BinaryHeap::new();
    let mut nodes: Vec<NodeBounds> = Vec::new();
    let push = |heap: &mut BinaryHeap<Reverse<(Bound, usize)>>,
                nodes: &mut Vec<NodeBounds>,
                bound: f64,
                binary_bounds: NodeBounds| {
        heap.push(Reverse((Bound(bound), nodes.len())));
        nodes.push(binary_bounds);
    };
    push(&mut heap, &mut nodes, f64::NEG_INFINITY, root_bounds);

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut cap_hit = false;
    let mut unbounded = false;

    while let Some(Reverse((Bound(bound), id))) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            let gap_abs = opts.rel_gap * best.abs().max(1.0);
            if bound >= best - gap_abs {
                break; // best-bound queue is exhausted of improving nodes
            }
        }
        if stats.nodes >= opts.node_cap {
            cap_hit = true;
            break;
        }
        if let Some(cap) = opts.time_cap {
            if start.elapsed().as_secs_f64() > cap {
                cap_hit = true;
                break;
            }
        }
        stats.nodes += 1;
        let node_bounds = std::mem::take(&mut nodes[id]);
        let lp = to_lp(model, &binary_ids, &node_bounds);
        let result = solve_lp(&lp);
        stats.lp_iterations += result.iterations;
        match result.outcome {
            LpOutcome::Infeasible => continue,
            LpOutcome::Unbounded => {
                unbounded = true;
                break;
            }
            LpOutcome::IterLimit => {
                cap_hit = true;
                break;
            }
            LpOutcome::Optimal => {}
        }
        if let Some((best, _)) = &incumbent {
            let gap_abs = opts.rel_gap * best.abs().max(1.0);
            if result.objective >= best - gap_abs {
                continue;
            }
        }

        // Fractionality of the binaries at this relaxation.
        let fractional: Vec<(usize, f64)> = binary_ids
            .iter()
            .enumerate()
            .filter_map(|(pos, &vid)| {
                let x = result.x[vid];
                let dist = (x - x.round()).abs();
                (dist > opts.int_tol).then_some((pos, x))
            })
            .collect();

        if fractional.is_empty() {
            incumbent = Some((result.objective, result.x));
            continue;
        }

        let pos = match opts.branch_rule {
            BranchRule::LowestIndex => fractional[0].0,
            BranchRule::MostFractional => {
                fractional
                    .iter()
                    .min_by(|a, b| {
                        let fa = (a.1 - 0.5).abs();
                        let fb = (b.1 - 0.5).abs();
                        fa.total_cmp(&fb).then(a.0.cmp(&b.0))
                    })
                    .expect("nonempty")
                    .0
            }
        };
        let mut down = node_bounds.clone();
        down[pos] = (0.0, 0.0);
        push(&mut heap, &mut nodes, result.objective, down);
        let mut up = node_bounds;
        up[pos] = (1.0, 1.0);
        push(&mut heap, &mut nodes, result.objective, up);
    }

    stats.wall_seconds = start.elapsed().as_secs_f64();
    let (status, objective, x) = if unbounded {
        (SolveStatus::Unbounded, f64::NEG_INFINITY, None)
    } else {
        match (&incumbent, cap_hit) {
            (Some((obj, x)), false) => (SolveStatus::Optimal, *obj, Some(x.clone())),
            (Some((obj, x)), true) => (SolveStatus::CapHit, *obj, Some(x.clone())),
            (None, true) => (SolveStatus::CapHit, f64::NAN, None),
            (None, false) => (SolveStatus::Infeasible, f64::INFINITY, None),
        }
    };

    let mut values = BTreeMap::new();
    if let Some(x) = &x {
        for (i, v) in model.vars().iter().enumerate() {
            values.insert(v.name.clone(), x[i]);
        }
    }
    let z_bits: Vec<bool> = match &x {
        Some(x) => model.topology_var_ids().iter().map(|&id| x[id] >= 0.5).collect(),
        None => Vec::new(),
    };
    Ok(Solution {
        status,
        objective: objective + model.objective_constant,
        values,
        z: Topology::new(z_bits),
        stats,
    })
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub row_index: usize,
    pub tag: String,
    pub amount: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub row_violations: Vec<Violation>,
    /// (variable name, amount outside its bounds)
    pub bound_violations: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.row_violations.is_empty() && self.bound_violations.is_empty()
    }
}

/// Re-evaluates every row and variable bound at `values`, reporting
/// violations above `feas_tol` with their provenance tags.
pub fn check_solution(
    model: &MilpModel,
    values: &BTreeMap<String, f64>,
    feas_tol: f64,
) -> Result<CheckReport, SolverError> {
    let mut x = Vec::with_capacity(model.var_count());
    for v in model.vars() {
        let value = values
            .get(&v.name)
            .copied()
            .ok_or_else(|| SolverError::MissingVariable(v.name.clone()))?;
        x.push(value);
    }
    let mut report = CheckReport::default();
    for (i, v) in model.vars().iter().enumerate() {
        let below = v.lower - x[i];
        let above = x[i] - v.upper;
        let amount = below.max(above);
        if amount > feas_tol {
            report.bound_violations.push((v.name.clone(), amount));
        }
    }
    for (row_index, row) in model.rows().iter().enumerate() {
        let activity: f64 = row.terms.iter().map(|&(j, c)| c * x[j]).sum();
        let amount = match row.sense {
            RowSense::Le => activity - row.rhs,
            RowSense::Ge => row.rhs - activity,
            RowSense::Eq => (activity - row.rhs).abs(),
        };
        if amount > feas_tol {
            report.row_violations.push(Violation { row_index, tag: row.tag.clone(), amount });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MilpModel, VarKind};

    fn knapsack() -> MilpModel {
        // min -(7a + 3b + 2c + 2d)  s.t. 4a + 2b + 2c + 3d <= 7
        let mut m = MilpModel::new("knapsack");
        let weights = [4.0, 2.0, 2.0, 3.0];
        let profits = [7.0, 3.0, 2.0, 2.0];
        let mut terms = Vec::new();
        for (i, (&w, &p)) in weights.iter().zip(profits.iter()).enumerate() {
            let id = m.add_var(format!("x{i}"), VarKind::Binary, 0.0, 1.0).unwrap();
            m.add_objective_term(id, -p);
            terms.push((id, w));
        }
        m.add_row("capacity", terms, RowSense::Le, 7.0).unwrap();
        m
    }

    #[test]
    fn pure_lp_solves_at_root() {
        let mut m = MilpModel::new("lp");
        let x = m.add_var("x", VarKind::Continuous, 1.0, f64::INFINITY).unwrap();
        m.add_objective_term(x, 1.0);
        let s = solve(&m, &SolverOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert_eq!(s.stats.nodes, 1);
        assert!((s.objective - 1.0).abs() < 1e-9);
    }

    #[test]
    fn knapsack_optimum() {
        let s = solve(&knapsack(), &SolverOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.objective - -10.0).abs() < 1e-9, "{}", s.objective);
        assert_eq!(s.values["x0"].round(), 1.0);
        assert_eq!(s.values["x1"].round(), 1.0);
    }

    #[test]
    fn infeasible_model() {
        let mut m = MilpModel::new("inf");
        let x = m.add_var("x", VarKind::Binary, 0.0, 1.0).unwrap();
        m.add_row("lo", vec![(x, 1.0)], RowSense::Ge, 0.4).unwrap();
        m.add_row("hi", vec![(x, 1.0)], RowSense::Le, 0.6).unwrap();
        let s = solve(&m, &SolverOptions::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn node_cap_reports_cap_hit() {
        let opts = SolverOptions { node_cap: 1, ..Default::default() };
        let s = solve(&knapsack(), &opts).unwrap();
        assert_eq!(s.status, SolveStatus::CapHit);
    }

    #[test]
    fn determinism() {
        let a = solve(&knapsack(), &SolverOptions::default()).unwrap();
        let b = solve(&knapsack(), &SolverOptions::default()).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn checker_flags_perturbed_rows() {
        let m = knapsack();
        let s = solve(&m, &SolverOptions::default()).unwrap();
        let clean = check_solution(&m, &s.values, 1e-6).unwrap();
        assert!(clean.is_clean());
        let mut bad = s.values.clone();
        *bad.get_mut("x3").unwrap() = 1.0;
        let report = check_solution(&m, &bad, 1e-6).unwrap();
        assert_eq!(report.row_violations.len(), 1);
        assert_eq!(report.row_violations[0].tag, "capacity");
    }

    #[test]
    fn checker_requires_all_variables() {
        let m = knapsack();
        let values = BTreeMap::new();
        assert!(matches!(
            check_solution(&m, &values, 1e-6),
            Err(SolverError::MissingVariable(_))
        ));
    }
}
