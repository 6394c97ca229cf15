//! Spatio-temporal task costs and the exact multi-task assignment.
//!
//! Each task must be reached either directly by a defender (a first edge) or
//! by a defender coming from an earlier task (a successor edge). Every defender
//! starts at most one chain and every task has at most one successor, so the
//! integer program is a bipartite matching of tasks onto
//! `N defenders + (M − 1) predecessor slots`, solved with the Hungarian method.

use std::cmp::Ordering;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignmentError {
    #[error("tasks must be sorted by (arrival_time, id); violated at index {0}")]
    Unsorted(usize),
    #[error("task {0} has no admissible incoming edge")]
    StructurallyInfeasible(usize),
    #[error("instance with {defenders} defenders and {tasks} tasks exceeds the brute-force guard")]
    TooLarge { defenders: usize, tasks: usize },
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(String),
}

/// An intruder-induced requirement: be at `arrival_point` within `arrival_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u64,
    pub arrival_point: Point2,
    /// Seconds from now.
    pub arrival_time: f64,
    pub prioritized: bool,
    pub source_intruder: u64,
}

/// One entry of the cost matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Cost {
    /// α times the travel distance.
    Finite(f64),
    /// Selectable but infeasible (too late, or a prioritized task as successor).
    Kappa,
    /// Temporally impossible; never selected.
    Forbidden,
}

impl Cost {
    pub fn value(self, kappa: f64) -> Option<f64> {
        match self {
            Cost::Finite(c) => Some(c),
            Cost::Kappa => Some(kappa),
            Cost::Forbidden => None,
        }
    }

    fn lex(self) -> Option<Lex> {
        match self {
            Cost::Finite(c) => Some(Lex { kappas: 0, rest: c }),
            Cost::Kappa => Some(Lex { kappas: 1, rest: 0.0 }),
            Cost::Forbidden => None,
        }
    }
}

/// Cost parameters. `kappa` must dominate any sum of feasible legs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    pub alpha: f64,
    pub kappa: f64,
}

impl CostConfig {
    /// κ = 10⁶·α·diameter.
    pub fn auto(alpha: f64, diameter: f64) -> Self {
        Self {
            alpha,
            kappa: 1e6 * alpha * diameter,
        }
    }

    /// Checks that κ exceeds the cost of `max_tasks` legs of length `diameter`.
    pub fn validate(&self, diameter: f64, max_tasks: usize) -> Result<(), AssignmentError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(AssignmentError::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        let bound = self.alpha * max_tasks.max(1) as f64 * diameter;
        if !(self.kappa > bound) {
            return Err(AssignmentError::InvalidParameter(format!(
                "kappa {} does not dominate alpha·M·diameter = {bound}",
                self.kappa
            )));
        }
        Ok(())
    }
}

/// Cost of sending a defender straight to a task.
pub fn first_cost(defender_pos: Point2, v_max: f64, task: &Task, alpha: f64) -> Cost {
    let d = defender_pos.dist(task.arrival_point);
    if d / v_max <= task.arrival_time {
        Cost::Finite(alpha * d)
    } else {
        Cost::Kappa
    }
}

/// Cost of serving `next` right after `prev` with the same defender.
pub fn subsequent_cost(prev: &Task, next: &Task, v_max: f64, alpha: f64) -> Cost {
    let d = prev.arrival_point.dist(next.arrival_point);
    if next.arrival_time <= prev.arrival_time {
        Cost::Forbidden
    } else if next.prioritized || d / v_max > next.arrival_time - prev.arrival_time {
        // a prioritized task never waits behind another one
        Cost::Kappa
    } else {
        Cost::Finite(alpha * d)
    }
}

/// A defender as seen by the cost builder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefenderSpec {
    pub pos: Point2,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    /// One row per defender, one column per task.
    pub first: Vec<Vec<Cost>>,
    /// One row per task except the latest, one column per task.
    pub subsequent: Vec<Vec<Cost>>,
    pub alpha: f64,
    pub kappa: f64,
    /// Task ids in column order (ascending arrival time).
    pub task_ids: Vec<u64>,
}

impl CostMatrix {
    pub fn n_defenders(&self) -> usize {
        self.first.len()
    }

    pub fn n_tasks(&self) -> usize {
        self.task_ids.len()
    }

    /// Entry for in-edge `slot → task`; slots `0..N` are defenders, the rest
    /// predecessor tasks.
    fn slot_cost(&self, slot: usize, task: usize) -> Cost {
        let n = self.n_defenders();
        if slot < n {
            self.first[slot][task]
        } else {
            self.subsequent[slot - n][task]
        }
    }
}

/// Assembles first and subsequent cost matrices. Tasks must already be sorted
/// by arrival time with ties broken by id.
pub fn build_cost_matrix(
    defenders: &[DefenderSpec],
    tasks: &[Task],
    cfg: CostConfig,
) -> Result<CostMatrix, AssignmentError> {
    for (i, w) in tasks.windows(2).enumerate() {
        let ord = w[0]
            .arrival_time
            .total_cmp(&w[1].arrival_time)
            .then(w[0].id.cmp(&w[1].id));
        if ord != Ordering::Less {
            return Err(AssignmentError::Unsorted(i + 1));
        }
    }
    let first = defenders
        .iter()
        .map(|d| tasks.iter().map(|t| first_cost(d.pos, d.v_max, t, cfg.alpha)).collect())
        .collect();
    // successor legs are flown at the slowest defender's speed, since the
    // chain's owner is not known before solving
    let v_chain = defenders
        .iter()
        .map(|d| d.v_max)
        .fold(f64::INFINITY, f64::min);
    let subsequent = tasks
        .iter()
        .take(tasks.len().saturating_sub(1))
        .map(|k| {
            tasks
                .iter()
                .map(|j| subsequent_cost(k, j, v_chain, cfg.alpha))
                .collect()
        })
        .collect();
    Ok(CostMatrix {
        first,
        subsequent,
        alpha: cfg.alpha,
        kappa: cfg.kappa,
        task_ids: tasks.iter().map(|t| t.id).collect(),
    })
}

/// Optimal edge set and its per-defender chains. Task and defender references
/// are column/row indices of the cost matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSolution {
    /// (defender, task), sorted.
    pub first_edges: Vec<(usize, usize)>,
    /// (predecessor task, task), sorted.
    pub successor_edges: Vec<(usize, usize)>,
    pub total_cost: f64,
    /// Per defender, its tasks in execution order (empty if unassigned).
    pub chains: Vec<Vec<usize>>,
    /// Number of selected κ edges.
    pub infeasible_count: usize,
    /// Tasks reached through a κ edge, ascending.
    pub kappa_tasks: Vec<usize>,
}

impl AssignmentSolution {
    pub fn empty(n_defenders: usize) -> Self {
        Self {
            first_edges: Vec::new(),
            successor_edges: Vec::new(),
            total_cost: 0.0,
            chains: vec![Vec::new(); n_defenders],
            infeasible_count: 0,
            kappa_tasks: Vec::new(),
        }
    }

    /// Defender whose chain contains `task`, with the task's position in it.
    pub fn owner(&self, task: usize) -> Option<(usize, usize)> {
        self.chains
            .iter()
            .enumerate()
            .find_map(|(d, c)| c.iter().position(|&t| t == task).map(|pos| (d, pos)))
    }

    pub fn is_assigned(&self, defender: usize) -> bool {
        self.chains.get(defender).is_some_and(|c| !c.is_empty())
    }

    /// Assembles a solution from the chosen in-edge slot of every task.
    fn from_slots(cm: &CostMatrix, slot_of_task: &[usize]) -> Self {
        let n = cm.n_defenders();
        let mut sol = Self::empty(n);
        let mut successor = vec![None; cm.n_tasks()];
        for (task, &slot) in slot_of_task.iter().enumerate() {
            let cost = cm.slot_cost(slot, task);
            if cost == Cost::Kappa {
                sol.infeasible_count += 1;
                sol.kappa_tasks.push(task);
            }
            sol.total_cost += cost.value(cm.kappa).unwrap_or(f64::INFINITY);
            if slot < n {
                sol.first_edges.push((slot, task));
            } else {
                sol.successor_edges.push((slot - n, task));
                successor[slot - n] = Some(task);
            }
        }
        sol.first_edges.sort_unstable();
        sol.successor_edges.sort_unstable();
        for &(d, t) in &sol.first_edges {
            let mut cur = Some(t);
            while let Some(c) = cur {
                sol.chains[d].push(c);
                cur = successor[c];
            }
        }
        sol
    }
}

/// (κ-edge count, remaining cost): compares like `count·κ + rest` for any
/// κ large enough, without the precision loss of adding κ.
#[derive(Debug, Clone, Copy)]
struct Lex {
    kappas: i64,
    rest: f64,
}

impl Lex {
    const ZERO: Lex = Lex { kappas: 0, rest: 0.0 };
    const INF: Lex = Lex {
        kappas: i64::MAX / 4,
        rest: 0.0,
    };

    fn is_inf(self) -> bool {
        self.kappas >= i64::MAX / 8
    }
}

impl Add for Lex {
    type Output = Lex;
    fn add(self, o: Lex) -> Lex {
        Lex {
            kappas: self.kappas + o.kappas,
            rest: self.rest + o.rest,
        }
    }
}

impl Sub for Lex {
    type Output = Lex;
    fn sub(self, o: Lex) -> Lex {
        Lex {
            kappas: self.kappas - o.kappas,
            rest: self.rest - o.rest,
        }
    }
}

impl PartialEq for Lex {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Lex {}
impl PartialOrd for Lex {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Lex {
    fn cmp(&self, o: &Self) -> Ordering {
        self.kappas.cmp(&o.kappas).then(self.rest.total_cmp(&o.rest))
    }
}

/// Exact optimum of the assignment program.
///
/// Ties are broken by perturbing every admissible entry by `1e-9·α` times its
/// row-major index in the stacked `[first; subsequent]` matrix, which favours
/// first edges and lower-indexed defenders.
pub fn solve_assignment(cm: &CostMatrix) -> Result<AssignmentSolution, AssignmentError> {
    let n_def = cm.n_defenders();
    let m = cm.n_tasks();
    if m == 0 {
        return Ok(AssignmentSolution::empty(n_def));
    }
    if n_def == 0 {
        return Err(AssignmentError::StructurallyInfeasible(0));
    }
    let slots = n_def + m - 1;
    let eps = 1e-9 * cm.alpha;
    let entry = |task: usize, slot: usize| -> Option<Lex> {
        cm.slot_cost(slot, task).lex().map(|mut c| {
            c.rest += eps * (slot * m + task) as f64;
            c
        })
    };

    // Rows are tasks (1..=m), columns are slots (1..=slots); index 0 is the
    // virtual start of each augmenting search.
    let mut u = vec![Lex::ZERO; m + 1];
    let mut v = vec![Lex::ZERO; slots + 1];
    let mut row_of = vec![0usize; slots + 1];
    let mut way = vec![0usize; slots + 1];
    for row in 1..=m {
        row_of[0] = row;
        let mut j0 = 0;
        let mut minv = vec![Lex::INF; slots + 1];
        let mut used = vec![false; slots + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = Lex::INF;
            let mut j1 = 0;
            for j in 1..=slots {
                if used[j] {
                    continue;
                }
                if let Some(c) = entry(i0 - 1, j - 1) {
                    let cur = c - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if !minv[j].is_inf() && (delta.is_inf() || minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if delta.is_inf() {
                return Err(AssignmentError::StructurallyInfeasible(row - 1));
            }
            for j in 0..=slots {
                if used[j] {
                    u[row_of[j]] = u[row_of[j]] + delta;
                    v[j] = v[j] - delta;
                } else if !minv[j].is_inf() {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut slot_of_task = vec![usize::MAX; m];
    for j in 1..=slots {
        if row_of[j] != 0 {
            slot_of_task[row_of[j] - 1] = j - 1;
        }
    }
    Ok(AssignmentSolution::from_slots(cm, &slot_of_task))
}

/// Size guard for [`brute_force_assignment`].
pub const BRUTE_FORCE_MAX: usize = 9;

/// Exhaustive enumeration of every admissible edge set. Test oracle.
pub fn brute_force_assignment(cm: &CostMatrix) -> Result<AssignmentSolution, AssignmentError> {
    let n_def = cm.n_defenders();
    let m = cm.n_tasks();
    if n_def + m > BRUTE_FORCE_MAX {
        return Err(AssignmentError::TooLarge {
            defenders: n_def,
            tasks: m,
        });
    }
    if m == 0 {
        return Ok(AssignmentSolution::empty(n_def));
    }

    struct Search<'a> {
        cm: &'a CostMatrix,
        slot_used: Vec<bool>,
        current: Vec<usize>,
        best: Option<(Lex, Vec<usize>)>,
    }
    impl Search<'_> {
        fn go(&mut self, task: usize, acc: Lex) {
            if task == self.cm.n_tasks() {
                if self.best.as_ref().is_none_or(|(b, _)| acc < *b) {
                    self.best = Some((acc, self.current.clone()));
                }
                return;
            }
            for slot in 0..self.slot_used.len() {
                if self.slot_used[slot] {
                    continue;
                }
                let Some(c) = self.cm.slot_cost(slot, task).lex() else {
                    continue;
                };
                self.slot_used[slot] = true;
                self.current.push(slot);
                self.go(task + 1, acc + c);
                self.current.pop();
                self.slot_used[slot] = false;
            }
        }
    }

    let mut search = Search {
        cm,
        slot_used: vec![false; n_def + m - 1],
        current: Vec::with_capacity(m),
        best: None,
    };
    search.go(0, Lex::ZERO);
    match search.best {
        Some((_, slots)) => Ok(AssignmentSolution::from_slots(cm, &slots)),
        None => Err(AssignmentError::StructurallyInfeasible(0)),
    }
}

/// Checks the structural constraints of a solution against its matrix and
/// task times. Returns a description of the first violation.
pub fn check_solution(cm: &CostMatrix, sol: &AssignmentSolution, times: &[f64]) -> Result<(), String> {
    let m = cm.n_tasks();
    let mut hits = vec![0usize; m];
    let mut def_used = vec![false; cm.n_defenders()];
    let mut pred_used = vec![false; m];
    for &(d, t) in &sol.first_edges {
        if std::mem::replace(&mut def_used[d], true) {
            return Err(format!("defender {d} starts two chains"));
        }
        hits[t] += 1;
    }
    for &(k, t) in &sol.successor_edges {
        if std::mem::replace(&mut pred_used[k], true) {
            return Err(format!("task {k} has two successors"));
        }
        if cm.subsequent[k][t] == Cost::Forbidden {
            return Err(format!("forbidden edge {k} -> {t} selected"));
        }
        hits[t] += 1;
    }
    if let Some(t) = hits.iter().position(|&h| h != 1) {
        return Err(format!("task {t} covered {} times", hits[t]));
    }
    let mut seen = vec![false; m];
    for chain in &sol.chains {
        for w in chain.windows(2) {
            if times[w[1]] <= times[w[0]] {
                return Err(format!("chain times do not increase at {} -> {}", w[0], w[1]));
            }
        }
        for &t in chain {
            if std::mem::replace(&mut seen[t], true) {
                return Err(format!("task {t} in two chains"));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err("chains do not cover every task".into());
    }
    Ok(())
}
