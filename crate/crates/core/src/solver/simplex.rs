//! Dense-tableau simplex over bounded variables, two phases with explicit
//! artificials. Dantzig pricing with a Bland fallback once pivots stall, so
//! the iteration cannot cycle.

use crate::model::RowSense;

const PIVOT_TOL: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-9;
const PHASE1_FEAS_TOL: f64 = 1e-7;
const DEGENERATE_STEP: f64 = 1e-10;

#[derive(Debug, Clone)]
pub(crate) struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct LpProblem {
    /// Structural costs, minimized.
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct LpResult {
    pub outcome: LpOutcome,
    pub objective: f64,
    /// Structural variable values (meaningful when Optimal).
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ColState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free column parked at zero.
    Free,
}

struct Tableau {
    m: usize,
    cols: usize,
    /// Row-major dense working matrix, `m x cols`.
    a: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    state: Vec<ColState>,
    basis: Vec<usize>,
    /// Value of the basic variable of each row.
    xb: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn value_of(&self, col: usize) -> f64 {
        match self.state[col] {
            ColState::Basic(r) => self.xb[r],
            ColState::AtLower => self.lower[col],
            ColState::AtUpper => self.upper[col],
            ColState::Free => 0.0,
        }
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.cols + c]
    }

    /// Minimizes `self.cost` from the current basis. Returns the outcome;
    /// bound flips and pivots mutate the tableau in place.
    fn run(&mut self, iter_cap: usize) -> LpOutcome {
        let mut stalled = 0usize;
        loop {
            if self.iterations >= iter_cap {
                return LpOutcome::IterLimit;
            }
            self.iterations += 1;
            let bland = stalled > 20 + 2 * self.m;

            // Price every nonbasic column against the current basis costs.
            let mut entering: Option<(usize, f64, f64)> = None; // (col, |d|, dir)
            for j in 0..self.cols {
                let state = self.state[j];
                if matches!(state, ColState::Basic(_)) {
                    continue;
                }
                if self.upper[j] - self.lower[j] <= 0.0 {
                    continue; // fixed, no room to move
                }
                let mut d = self.cost[j];
                for r in 0..self.m {
                    let cb = self.cost[self.basis[r]];
                    if cb != 0.0 {
                        d -= cb * self.at(r, j);
                    }
                }
                let dir = match state {
                    ColState::AtLower if d < -REDUCED_COST_TOL => 1.0,
                    ColState::AtUpper if d > REDUCED_COST_TOL => -1.0,
                    ColState::Free if d < -REDUCED_COST_TOL => 1.0,
                    ColState::Free if d > REDUCED_COST_TOL => -1.0,
                    _ => continue,
                };
                if bland {
                    entering = Some((j, d.abs(), dir));
                    break;
                }
                match entering {
                    Some((_, best, _)) if d.abs() <= best => {}
                    _ => entering = Some((j, d.abs(), dir)),
                }
            }
            let Some((j, _, dir)) = entering else {
                return LpOutcome::Optimal;
            };

            // Ratio test: how far can the entering column move.
            let mut t_max = f64::INFINITY;
            let mut leaving: Option<(usize, bool)> = None; // (row, exits at upper)
            for r in 0..self.m {
                let w = self.at(r, j);
                let delta = -dir * w; // change of basic r per unit step
                let b = self.basis[r];
                let limit = if delta < -PIVOT_TOL {
                    if self.lower[b].is_finite() {
                        (self.xb[r] - self.lower[b]) / -delta
                    } else {
                        continue;
                    }
                } else if delta > PIVOT_TOL {
                    if self.upper[b].is_finite() {
                        (self.upper[b] - self.xb[r]) / delta
                    } else {
                        continue;
                    }
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let exits_upper = delta > 0.0;
                let replace = match leaving {
                    None => limit < t_max,
                    Some((cur, _)) => {
                        if limit < t_max - 1e-12 {
                            true
                        } else if limit <= t_max + 1e-12 {
                            if bland {
                                self.basis[r] < self.basis[cur]
                            } else {
                                self.at(r, j).abs() > self.at(cur, j).abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if replace {
                    t_max = t_max.min(limit);
                    leaving = Some((r, exits_upper));
                }
            }
            let span = self.upper[j] - self.lower[j];
            let t_bound = if span.is_finite() { span } else { f64::INFINITY };

            if t_max.is_infinite() && t_bound.is_infinite() {
                return LpOutcome::Unbounded;
            }

            if t_bound <= t_max {
                // Bound flip, no basis change.
                for r in 0..self.m {
                    self.xb[r] -= dir * self.at(r, j) * t_bound;
                }
                self.state[j] = match self.state[j] {
                    ColState::AtLower => ColState::AtUpper,
                    ColState::AtUpper => ColState::AtLower,
                    other => other,
                };
                stalled = if t_bound > DEGENERATE_STEP { 0 } else { stalled + 1 };
                continue;
            }

            let (r, exits_upper) = leaving.expect("finite ratio requires a leaving row");
            let t = t_max;
            let entering_value = self.value_of(j) + dir * t;
            for i in 0..self.m {
                if i != r {
                    self.xb[i] -= dir * self.at(i, j) * t;
                }
            }
            let old_basic = self.basis[r];
            self.state[old_basic] = if exits_upper { ColState::AtUpper } else { ColState::AtLower };

            // Gauss-Jordan pivot on (r, j).
            let pivot = self.at(r, j);
            let inv = 1.0 / pivot;
            for c in 0..self.cols {
                self.a[r * self.cols + c] *= inv;
            }
            for i in 0..self.m {
                if i == r {
                    continue;
                }
                let factor = self.at(i, j);
                if factor != 0.0 {
                    for c in 0..self.cols {
                        let v = self.a[r * self.cols + c];
                        if v != 0.0 {
                            self.a[i * self.cols + c] -= factor * v;
                        }
                    }
                }
            }
            self.basis[r] = j;
            self.state[j] = ColState::Basic(r);
            self.xb[r] = entering_value;
            stalled = if t > DEGENERATE_STEP { 0 } else { stalled + 1 };
        }
    }
}

/// Solves the LP by two-phase bounded simplex.
pub(crate) fn solve_lp(problem: &LpProblem) -> LpResult {
    let n = problem.cost.len();
    let m = problem.rows.len();
    let n_slack = m;

    // Column layout: structural | slacks | artificials (appended on demand).
    let mut lower = problem.lower.clone();
    let mut upper = problem.upper.clone();
    for row in &problem.rows {
        let (lo, hi) = match row.sense {
            RowSense::Le => (0.0, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, 0.0),
            RowSense::Eq => (0.0, 0.0),
        };
        lower.push(lo);
        upper.push(hi);
    }

    let mut state: Vec<ColState> = (0..n)
        .map(|j| {
            if lower[j].is_finite() {
                ColState::AtLower
            } else if upper[j].is_finite() {
                ColState::AtUpper
            } else {
                ColState::Free
            }
        })
        .collect();

    // Residual each row must absorb once structurals sit at their bounds.
    let struct_value = |j: usize, state: &ColState| -> f64 {
        match state {
            ColState::AtLower => lower[j],
            ColState::AtUpper => upper[j],
            _ => 0.0,
        }
    };
    let mut residual = vec![0.0; m];
    for (i, row) in problem.rows.iter().enumerate() {
        let mut v = row.rhs;
        for &(j, coef) in &row.terms {
            v -= coef * struct_value(j, &state[j]);
        }
        residual[i] = v;
    }

    let mut basis = Vec::with_capacity(m);
    let mut xb = Vec::with_capacity(m);
    let mut artificials: Vec<(usize, f64)> = Vec::new(); // (row, sign)
    for (i, &value) in residual.iter().enumerate() {
        let s = n + i;
        if value >= lower[s] - 1e-12 && value <= upper[s] + 1e-12 {
            basis.push(s);
            xb.push(value);
            state.push(ColState::Basic(i));
        } else {
            // Slack clamps to its nearest bound; an artificial absorbs the rest.
            let clamped = value.clamp(
                if lower[s].is_finite() { lower[s] } else { f64::NEG_INFINITY },
                if upper[s].is_finite() { upper[s] } else { f64::INFINITY },
            );
            let slack_state = if (clamped - lower[s]).abs() <= 1e-12 && lower[s].is_finite() {
                ColState::AtLower
            } else {
                ColState::AtUpper
            };
            state.push(slack_state);
            let rest = value - clamped;
            artificials.push((i, rest.signum()));
            basis.push(usize::MAX); // patched below
            xb.push(rest.abs());
        }
    }

    let n_art = artificials.len();
    let cols = n + n_slack + n_art;
    let mut a = vec![0.0; m * cols];
    for (i, row) in problem.rows.iter().enumerate() {
        for &(j, coef) in &row.terms {
            a[i * cols + j] += coef;
        }
        a[i * cols + n + i] = 1.0;
    }
    for (k, &(i, sign)) in artificials.iter().enumerate() {
        // Keep the starting basis an identity: rows whose artificial would
        // carry -1 are negated wholesale.
        if sign < 0.0 {
            for c in 0..cols {
                a[i * cols + c] = -a[i * cols + c];
            }
        }
        let col = n + n_slack + k;
        a[i * cols + col] = 1.0;
        lower.push(0.0);
        upper.push(f64::INFINITY);
        state.push(ColState::Basic(i));
        basis[i] = col;
    }

    let mut tab = Tableau {
        m,
        cols,
        a,
        lower,
        upper,
        cost: vec![0.0; cols],
        state,
        basis,
        xb,
        iterations: 0,
    };
    let iter_cap = 20_000 + 60 * (m + cols);

    // Phase 1: drive the artificial total to zero.
    if n_art > 0 {
        for k in 0..n_art {
            tab.cost[n + n_slack + k] = 1.0;
        }
        match tab.run(iter_cap) {
            LpOutcome::Optimal => {}
            LpOutcome::IterLimit => {
                return LpResult { outcome: LpOutcome::IterLimit, objective: f64::NAN, x: vec![], iterations: tab.iterations }
            }
            // Phase 1 is bounded below by zero, so Unbounded cannot happen.
            LpOutcome::Unbounded | LpOutcome::Infeasible => unreachable!("phase 1 is bounded"),
        }
        let infeasibility: f64 = (0..n_art).map(|k| tab.value_of(n + n_slack + k)).sum();
        if infeasibility > PHASE1_FEAS_TOL {
            return LpResult {
                outcome: LpOutcome::Infeasible,
                objective: f64::INFINITY,
                x: vec![],
                iterations: tab.iterations,
            };
        }
        // Pin artificials; any still basic sit at zero.
        for k in 0..n_art {
            tab.upper[n + n_slack + k] = 0.0;
        }
    }

    // Phase 2: the real objective.
    for c in tab.cost.iter_mut() {
        *c = 0.0;
    }
    tab.cost[..n].copy_from_slice(&problem.cost);
    let outcome = tab.run(iter_cap);
    match outcome {
        LpOutcome::Optimal => {
            let x: Vec<f64> = (0..n).map(|j| tab.value_of(j)).collect();
            let objective = problem.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
            LpResult { outcome, objective, x, iterations: tab.iterations }
        }
        LpOutcome::Unbounded => LpResult {
            outcome,
            objective: f64::NEG_INFINITY,
            x: vec![],
            iterations: tab.iterations,
        },
        LpOutcome::IterLimit => {
            LpResult { outcome, objective: f64::NAN, x: vec![], iterations: tab.iterations }
        }
        LpOutcome::Infeasible => unreachable!("phase 2 starts feasible"),
    }
}
