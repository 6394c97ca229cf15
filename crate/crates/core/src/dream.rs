//! Dynamic resource allocation: grow the team from reserve stations when tasks
//! are infeasible or the monitoring boundary is not sensed, shrink it when an
//! unassigned defender is redundant, and plan monitoring motion.

use serde::{Deserialize, Serialize};

use crate::assignment::{
    build_cost_matrix, first_cost, solve_assignment, AssignmentError, AssignmentSolution, Cost,
    CostConfig, DefenderSpec, Task,
};
use crate::geometry::{ConvexPolygon, Point2};
use crate::static_design::{MonitorLayout, ReserveLayout, StaticDesign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Tasked,
    Monitoring,
    Idle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenderRecord {
    pub id: u64,
    pub pos: Point2,
    pub v_max: f64,
    pub sensor_range: f64,
    pub role: Role,
}

/// Active defenders plus what is needed to deploy new ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamState {
    pub active: Vec<DefenderRecord>,
    pub reserve_stations: ReserveLayout,
    /// Defenders deployed from stations so far.
    pub spawn_count: usize,
    pub next_id: u64,
    /// Speed and sensor range given to newly deployed defenders.
    pub v_max: f64,
    pub sensor_range: f64,
}

impl TeamState {
    /// Team with one monitoring defender at each of `positions`.
    pub fn new(
        positions: &[Point2],
        reserve_stations: ReserveLayout,
        v_max: f64,
        sensor_range: f64,
    ) -> Self {
        let active = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| DefenderRecord {
                id: i as u64,
                pos,
                v_max,
                sensor_range,
                role: Role::Monitoring,
            })
            .collect();
        Self {
            active,
            reserve_stations,
            spawn_count: 0,
            next_id: positions.len() as u64,
            v_max,
            sensor_range,
        }
    }

    /// Deploys a defender at `station`, returning its id.
    pub fn spawn_at(&mut self, station: Point2, role: Role) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        self.spawn_count += 1;
        self.active.push(DefenderRecord {
            id,
            pos: station,
            v_max: self.v_max,
            sensor_range: self.sensor_range,
            role,
        });
        id
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.active.iter().map(|d| d.pos).collect()
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.active.iter().position(|d| d.id == id)
    }

    fn specs(&self) -> Vec<DefenderSpec> {
        self.active
            .iter()
            .map(|d| DefenderSpec {
                pos: d.pos,
                v_max: d.v_max,
            })
            .collect()
    }
}

/// Critical points farther than `sensor_range` from every position.
pub fn coverage_check(positions: &[Point2], critical: &[Point2], sensor_range: f64) -> Vec<Point2> {
    critical
        .iter()
        .copied()
        .filter(|c| !positions.iter().any(|p| p.dist(*c) <= sensor_range))
        .collect()
}

/// Deploys one defender per task at the reserve station nearest its arrival
/// point. Returns the new ids.
pub fn spawn_for_tasks(team: &mut TeamState, tasks: &[Task]) -> Vec<u64> {
    tasks
        .iter()
        .filter_map(|t| team.reserve_stations.nearest(t.arrival_point))
        .map(|(_, station)| station)
        .collect::<Vec<_>>()
        .into_iter()
        .map(|station| team.spawn_at(station, Role::Idle))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationConfig {
    pub cost: CostConfig,
    /// When off, sensing is unlimited and no defender is added for coverage.
    pub monitoring_enabled: bool,
    /// Team size below which no defender is retired (raised to the design's
    /// monitor count if smaller).
    pub min_team: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub team: TeamState,
    /// Defender indices refer to `team.active`.
    pub solution: AssignmentSolution,
    pub added: Vec<u64>,
    pub removed: Vec<u64>,
    pub uncovered_critical: Vec<Point2>,
    /// Set when spawning stopped because the infeasible count stalled.
    pub guard_triggered: bool,
}

/// Effective sensing radius under the given monitoring mode.
pub fn effective_range(team: &TeamState, monitoring_enabled: bool) -> f64 {
    if monitoring_enabled {
        team.sensor_range
    } else {
        f64::INFINITY
    }
}

/// One allocation round: solve, spawn while spawning lowers the infeasible
/// count, fill monitoring gaps, then retire redundant unassigned defenders,
/// re-solving whenever the last two steps change the team.
///
/// Deployments go first to κ tasks a fresh defender can serve directly: ones
/// reachable in time from their nearest station, and prioritized tasks that
/// would otherwise sit behind another task in a chain. Failing that, one
/// defender per κ task is tried and kept only if the re-solve lowers the
/// infeasible count. Coverage
/// deployments stop once `n_monitors` defenders are unassigned. Removal never
/// shrinks the team below `n_monitors` (or `cfg.min_team` if larger).
pub fn allocate(
    team: &TeamState,
    tasks: &[Task],
    design: &StaticDesign,
    cfg: &AllocationConfig,
) -> Result<AllocationResult, AssignmentError> {
    let floor = design.n_monitors.max(cfg.min_team);
    let mut team = team.clone();
    let mut added = Vec::new();
    let mut guard_triggered = false;
    let mut last_q: Option<usize> = None;

    let solution = loop {
        let cm = build_cost_matrix(&team.specs(), tasks, cfg.cost)?;
        let sol = solve_assignment(&cm)?;
        let q = sol.infeasible_count;
        if q == 0 {
            break sol;
        }
        if last_q.is_some_and(|prev| q >= prev) {
            guard_triggered = true;
            break sol;
        }
        let helpable: Vec<Task> = sol
            .kappa_tasks
            .iter()
            .filter(|&&j| {
                let t = &tasks[j];
                let reachable = team
                    .reserve_stations
                    .nearest(t.arrival_point)
                    .is_some_and(|(_, s)| matches!(first_cost(s, team.v_max, t, cfg.cost.alpha), Cost::Finite(_)));
                let buried = t.prioritized && sol.owner(j).is_some_and(|(_, pos)| pos > 0);
                reachable || buried
            })
            .map(|&j| tasks[j])
            .collect();
        if !helpable.is_empty() {
            added.extend(spawn_for_tasks(&mut team, &helpable));
            last_q = Some(q);
            continue;
        }
        // a fresh defender can still help indirectly by taking over a task
        // whose current server is then free for the κ one; keep the trial
        // only if it pays off
        let kappa: Vec<Task> = sol.kappa_tasks.iter().map(|&j| tasks[j]).collect();
        let mut trial = team.clone();
        let ids = spawn_for_tasks(&mut trial, &kappa);
        let trial_sol = solve_assignment(&build_cost_matrix(&trial.specs(), tasks, cfg.cost)?)?;
        if trial_sol.infeasible_count >= q {
            guard_triggered = true;
            break sol;
        }
        team = trial;
        added.extend(ids);
        last_q = Some(q);
    };
    let mut solution = solution;
    solution.chains.resize(team.active.len(), Vec::new());

    let range = effective_range(&team, cfg.monitoring_enabled);
    let critical = &design.critical_points;
    // retiring a defender can reopen a coverage gap, and a new monitor can be
    // a better server for some task, so re-solve and repeat until a pass
    // changes nothing
    let mut removed = Vec::new();
    let max_passes = team.active.len() + tasks.len() + floor + 2;
    let mut uncovered;
    let mut pass = 0;
    loop {
        let (spawned, retired) = (added.len(), removed.len());
        uncovered = if cfg.monitoring_enabled {
            fill_coverage(&mut team, &mut solution, critical, range, floor, &mut added)
        } else {
            coverage_check(&team.positions(), critical, range)
        };
        retire_redundant(&mut team, &mut solution, critical, range, floor, cfg.monitoring_enabled, &mut removed);
        pass += 1;
        if (added.len() == spawned && removed.len() == retired) || pass >= max_passes {
            break;
        }
        solution = solve_assignment(&build_cost_matrix(&team.specs(), tasks, cfg.cost)?)?;
    }
    // a defender deployed and retired within the round never existed
    let transient: Vec<u64> = added.iter().copied().filter(|id| removed.contains(id)).collect();
    added.retain(|id| !transient.contains(id));
    removed.retain(|id| !transient.contains(id));
    removed.sort_unstable();

    Ok(AllocationResult {
        team,
        solution,
        added,
        removed,
        uncovered_critical: uncovered,
        guard_triggered,
    })
}

/// Deploys monitors from the station covering the most open critical points
/// until none is open, `floor` defenders are unassigned, or no station helps.
/// Returns the critical points still open.
fn fill_coverage(
    team: &mut TeamState,
    solution: &mut AssignmentSolution,
    critical: &[Point2],
    range: f64,
    floor: usize,
    added: &mut Vec<u64>,
) -> Vec<Point2> {
    let mut uncovered = coverage_check(&team.positions(), critical, range);
    loop {
        let unassigned = (0..team.active.len())
            .filter(|&i| !solution.is_assigned(i))
            .count();
        if uncovered.is_empty() || unassigned >= floor {
            return uncovered;
        }
        // the station covering most gaps, nearest to the first gap on ties
        let pick = team
            .reserve_stations
            .stations
            .iter()
            .map(|&s| {
                let gain = uncovered.iter().filter(|c| c.dist(s) <= range).count();
                (s, gain, s.dist(uncovered[0]))
            })
            .filter(|&(_, gain, _)| gain > 0)
            .min_by(|a, b| b.1.cmp(&a.1).then(a.2.total_cmp(&b.2)));
        let Some((station, _, _)) = pick else {
            return uncovered;
        };
        added.push(team.spawn_at(station, Role::Monitoring));
        solution.chains.push(Vec::new());
        uncovered = coverage_check(&team.positions(), critical, range);
    }
}

/// Removes unassigned defenders that are not the only sensor of some
/// critical point, latest first, never going below `floor`. Sets the role of
/// everyone kept.
fn retire_redundant(
    team: &mut TeamState,
    solution: &mut AssignmentSolution,
    critical: &[Point2],
    range: f64,
    floor: usize,
    monitoring_enabled: bool,
    removed: &mut Vec<u64>,
) {
    let mut i = team.active.len();
    while i > 0 {
        i -= 1;
        if solution.is_assigned(i) {
            team.active[i].role = Role::Tasked;
            continue;
        }
        let me = team.active[i].pos;
        let sole = critical.iter().any(|c| {
            c.dist(me) <= range
                && !team
                    .active
                    .iter()
                    .enumerate()
                    .any(|(k, d)| k != i && d.pos.dist(*c) <= range)
        });
        if !sole && team.active.len() > floor {
            removed.push(team.active[i].id);
            team.active.remove(i);
            remove_defender_row(solution, i);
        } else {
            team.active[i].role = if monitoring_enabled {
                Role::Monitoring
            } else {
                Role::Idle
            };
        }
    }
}

/// Drops an unassigned defender from a solution, shifting later indices.
fn remove_defender_row(sol: &mut AssignmentSolution, index: usize) {
    sol.chains.remove(index);
    for e in &mut sol.first_edges {
        debug_assert_ne!(e.0, index);
        if e.0 > index {
            e.0 -= 1;
        }
    }
}

/// Goal for each monitoring defender (same order as `monitors`).
///
/// Monitors hold position while every critical point is sensed. Otherwise
/// goals are chosen greedily by marginal coverage among the optimal layout for
/// the current team size, the critical points themselves (clamped into the
/// territory) and the monitors' own positions; the greedy plan is used only if
/// it senses more points than staying put.
pub fn monitor_goals(
    poly: &ConvexPolygon,
    monitors: &[Point2],
    others: &[Point2],
    critical: &[Point2],
    sensor_range: f64,
    layouts: &[MonitorLayout],
) -> Vec<Point2> {
    if monitors.is_empty() {
        return Vec::new();
    }
    let covered_by = |sites: &[Point2]| -> Vec<bool> {
        critical
            .iter()
            .map(|c| sites.iter().any(|s| s.dist(*c) <= sensor_range))
            .collect()
    };
    let count = |mask: &[bool]| mask.iter().filter(|&&b| b).count();

    let base = covered_by(others);
    let mut all_now: Vec<Point2> = others.to_vec();
    all_now.extend_from_slice(monitors);
    let now = covered_by(&all_now);
    if count(&now) == critical.len() {
        return monitors.to_vec();
    }

    let mut candidates: Vec<Point2> = Vec::new();
    if let Some(layout) = layouts.get(monitors.len().min(layouts.len()).saturating_sub(1)) {
        candidates.extend_from_slice(&layout.positions);
    }
    candidates.extend(critical.iter().map(|&c| poly.clamp_inside(c)));
    candidates.extend_from_slice(monitors);

    let mut mask = base;
    let mut picks = Vec::with_capacity(monitors.len());
    let mut taken = vec![false; candidates.len()];
    for _ in 0..monitors.len() {
        let best = candidates
            .iter()
            .enumerate()
            .filter(|(k, _)| !taken[*k])
            .map(|(k, &c)| {
                let gain = critical
                    .iter()
                    .zip(&mask)
                    .filter(|(p, &m)| !m && p.dist(c) <= sensor_range)
                    .count();
                (k, gain)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((k, _)) = best else { break };
        taken[k] = true;
        let c = candidates[k];
        for (m, p) in mask.iter_mut().zip(critical) {
            *m |= p.dist(c) <= sensor_range;
        }
        picks.push(c);
    }
    if count(&mask) <= count(&now) {
        return monitors.to_vec();
    }

    // nearest-first matching of monitors to picked goals
    let mut goals = monitors.to_vec();
    let mut free: Vec<bool> = vec![true; monitors.len()];
    for g in picks {
        let m = (0..monitors.len())
            .filter(|&i| free[i])
            .min_by(|&a, &b| monitors[a].dist(g).total_cmp(&monitors[b].dist(g)));
        if let Some(m) = m {
            free[m] = false;
            goals[m] = g;
        }
    }
    goals
}
