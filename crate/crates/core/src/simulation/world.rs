//! World state and the per-step sense, allocate, move, resolve cycle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::agents::{step_defender, step_intruder, DefenderState, IntruderState, IntruderView};
use super::trace::{DefenderSnapshot, IntruderSnapshot, TraceEvent, TraceSink};
use super::{Baseline, Scenario, SimConfig, SimError, SimResult};
use crate::assignment::{build_cost_matrix, CostConfig, DefenderSpec, Task};
use crate::dream::{allocate, effective_range, monitor_goals, AllocationConfig, Role, TeamState};
use crate::geometry::{arrival_point, ConvexPolygon, Point2};
use crate::static_design::{sub_seed, FactorField};

/// Substeps used when an intruder is close to the boundary.
const SUBSTEPS: usize = 10;

/// Outcome of one neutralization check.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Neutralization {
    /// (defender id, intruder id)
    pub captures: Vec<(u64, u64)>,
    pub intrusions: Vec<u64>,
}

/// Resolves captures and intrusions for the current positions, marking the
/// affected intruders dead. An intruder inside the territory cannot be
/// captured.
pub fn neutralization_check(
    poly: &ConvexPolygon,
    defenders: &[DefenderState],
    intruders: &mut [IntruderState],
    epsilon: f64,
) -> Neutralization {
    let mut out = Neutralization::default();
    for i in intruders.iter_mut().filter(|i| i.alive) {
        if poly.contains(i.pos) {
            i.alive = false;
            out.intrusions.push(i.id);
        } else if let Some(d) = defenders.iter().find(|d| d.pos.dist(i.pos) <= epsilon) {
            i.alive = false;
            out.captures.push((d.id, i.id));
        }
    }
    out
}

/// A running episode.
pub struct World<'a> {
    scenario: &'a Scenario,
    cfg: &'a SimConfig,
    field: FactorField,
    alloc: AllocationConfig,
    cost: CostConfig,
    spawn_radius: f64,
    spawn_rng: ChaCha8Rng,
    spawned: usize,
    peak_team: usize,
    guard_flags: usize,
    priority_violations: usize,
    pub time: f64,
    pub step_index: u64,
    pub team: TeamState,
    pub defenders: Vec<DefenderState>,
    pub intruders: Vec<IntruderState>,
    pub captures: usize,
    pub intrusions: usize,
    /// Prioritized flag per alive intruder id from the latest step.
    prioritized: Vec<(u64, bool)>,
}

impl<'a> World<'a> {
    pub fn new(scenario: &'a Scenario, cfg: &'a SimConfig) -> Self {
        let design = &scenario.design;
        let poly = &design.territory;
        let team = TeamState::new(
            &scenario.initial_positions,
            design.layout.clone(),
            cfg.v_d_max,
            design.sensor_range,
        );
        let defenders = team
            .active
            .iter()
            .map(|r| DefenderState::new(r.id, r.pos, r.v_max, r.sensor_range))
            .collect();
        let cost = cfg.cost_config(poly.diameter());
        let mut world = Self {
            scenario,
            cfg,
            field: design.factor_field(),
            alloc: AllocationConfig {
                cost,
                monitoring_enabled: cfg.monitoring_enabled,
                min_team: cfg.initial_defenders,
            },
            cost,
            spawn_radius: 1.2 * design.monitoring_region.max_radius(poly.centroid()),
            spawn_rng: ChaCha8Rng::seed_from_u64(sub_seed(cfg.seed, 0)),
            spawned: 0,
            peak_team: team.active.len(),
            guard_flags: 0,
            priority_violations: 0,
            time: 0.0,
            step_index: 0,
            team,
            defenders,
            intruders: Vec::new(),
            captures: 0,
            intrusions: 0,
            prioritized: Vec::new(),
        };
        let initial = cfg.concurrent_intruders.min(cfg.episode_intruder_total);
        for _ in 0..initial {
            world.spawn_intruder(&mut super::NullTrace);
        }
        world
    }

    fn poly(&self) -> &'a ConvexPolygon {
        &self.scenario.design.territory
    }

    fn spawn_intruder(&mut self, sink: &mut dyn TraceSink) {
        let poly = self.poly();
        let angle = self.spawn_rng.gen_range(0.0..std::f64::consts::TAU);
        let pos = poly.centroid() + Point2::from_polar(self.spawn_radius, angle);
        let aim = poly.point_at(self.spawn_rng.gen_range(0.0..poly.perimeter()));
        let seed: u64 = self.spawn_rng.gen();
        let id = self.spawned as u64;
        self.spawned += 1;
        self.intruders.push(IntruderState {
            id,
            pos,
            heading: (aim - pos).heading(),
            speed: self.cfg.v_i_max,
            omega_max: self.cfg.omega_max(),
            policy: self.cfg.policy,
            alive: true,
            aim,
            next_replan: self.time,
            rng: Some(ChaCha8Rng::seed_from_u64(seed)),
        });
        sink.record(TraceEvent::IntruderSpawn {
            time: self.time,
            intruder: id,
            pos,
        });
    }

    /// Whether the episode is over: an intrusion, every intruder resolved, or
    /// the time cap.
    pub fn finished(&self) -> bool {
        self.intrusions > 0
            || (self.spawned >= self.cfg.episode_intruder_total && self.intruders.is_empty())
            || self.time >= self.cfg.max_time
    }

    fn sensed(&self, p: Point2) -> bool {
        !self.cfg.monitoring_enabled || self.defenders.iter().any(|d| d.pos.dist(p) <= d.sensor_range)
    }

    /// Tasks for every sensed intruder, sorted by arrival time then id.
    fn build_tasks(&mut self) -> Vec<Task> {
        let poly = self.poly();
        let design = &self.scenario.design;
        let mut tasks = Vec::new();
        self.prioritized.clear();
        for i in &self.intruders {
            if !i.alive || poly.contains(i.pos) || !self.sensed(i.pos) {
                continue;
            }
            let Ok(arr) = arrival_point(poly, i.pos, i.velocity(), self.cfg.v_i_max, self.cfg.predictor) else {
                continue;
            };
            let prioritized = self.cfg.baseline == Baseline::Pdream && design.is_prioritized(&self.field, i.pos);
            self.prioritized.push((i.id, prioritized));
            tasks.push(Task {
                id: i.id,
                arrival_point: arr.point.point,
                arrival_time: arr.time,
                prioritized,
                source_intruder: i.id,
            });
        }
        tasks.sort_by(|a, b| a.arrival_time.total_cmp(&b.arrival_time).then(a.id.cmp(&b.id)));
        tasks
    }

    /// Advances the world by one `dt`.
    pub fn step(&mut self, sink: &mut dyn TraceSink) -> Result<(), SimError> {
        let cfg = self.cfg;
        let design = &self.scenario.design;
        let poly = self.poly();
        let dt = cfg.dt;

        let tasks = self.build_tasks();
        let result = allocate(&self.team, &tasks, design, &self.alloc)?;
        for &id in &result.added {
            if let Some(r) = result.team.active.iter().find(|r| r.id == id) {
                sink.record(TraceEvent::Spawn {
                    time: self.time,
                    defender: id,
                    pos: r.pos,
                });
            }
        }
        for &id in &result.removed {
            sink.record(TraceEvent::Remove {
                time: self.time,
                defender: id,
            });
        }
        if result.guard_triggered {
            self.guard_flags += 1;
            sink.record(TraceEvent::Guard {
                time: self.time,
                infeasible: result.solution.infeasible_count,
            });
        }
        for (j, t) in tasks.iter().enumerate() {
            if t.prioritized && result.solution.owner(j).map(|(_, pos)| pos) != Some(0) {
                self.priority_violations += 1;
                sink.record(TraceEvent::PriorityViolation {
                    time: self.time,
                    intruder: t.source_intruder,
                });
            }
        }
        self.team = result.team;
        self.peak_team = self.peak_team.max(self.team.active.len());

        // keep kinematic state of surviving defenders, add fresh ones
        let old = std::mem::take(&mut self.defenders);
        self.defenders = self
            .team
            .active
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let mut d = old
                    .iter()
                    .find(|d| d.id == r.id)
                    .cloned()
                    .unwrap_or_else(|| DefenderState::new(r.id, r.pos, r.v_max, r.sensor_range));
                d.chain = result.solution.chains[k].iter().map(|&j| tasks[j].source_intruder).collect();
                d
            })
            .collect();

        if cfg.dump_assignments && sink.wants_detail() {
            let specs: Vec<DefenderSpec> = self
                .team
                .active
                .iter()
                .map(|r| DefenderSpec { pos: r.pos, v_max: r.v_max })
                .collect();
            let costs = build_cost_matrix(&specs, &tasks, self.cost)?;
            sink.record(TraceEvent::Assignment {
                time: self.time,
                defenders: self.team.active.iter().map(|r| r.id).collect(),
                costs,
            });
        }

        // goals: tasked defenders go for their first task, monitors spread out
        let range = effective_range(&self.team, cfg.monitoring_enabled);
        let monitors: Vec<usize> = (0..self.defenders.len())
            .filter(|&k| self.team.active[k].role == Role::Monitoring)
            .collect();
        let mut goals: Vec<Option<Point2>> = vec![None; self.defenders.len()];
        if cfg.monitoring_enabled && !monitors.is_empty() {
            let mon_pos: Vec<Point2> = monitors.iter().map(|&k| self.defenders[k].pos).collect();
            let others: Vec<Point2> = (0..self.defenders.len())
                .filter(|&k| self.team.active[k].role == Role::Tasked)
                .map(|k| self.defenders[k].pos)
                .collect();
            let g = monitor_goals(
                poly,
                &mon_pos,
                &others,
                &design.critical_points,
                range,
                &design.monitor_layouts,
            );
            for (&k, goal) in monitors.iter().zip(g) {
                goals[k] = Some(goal);
            }
        }
        let pursuit = cfg.pursuit();
        let task_point = |id: u64| tasks.iter().find(|t| t.source_intruder == id).map(|t| t.arrival_point);

        let near_boundary = self
            .intruders
            .iter()
            .any(|i| poly.distance_to(i.pos) <= 2.0 * cfg.epsilon + cfg.v_i_max * dt);
        let substeps = if near_boundary { SUBSTEPS } else { 1 };
        let h = dt / substeps as f64;

        for s in 0..substeps {
            let now = self.time + s as f64 * h;
            for k in 0..self.defenders.len() {
                let d = &self.defenders[k];
                let goal = match d.chain.first() {
                    Some(&target) => {
                        let intruder = self.intruders.iter().find(|i| i.id == target && i.alive);
                        match intruder {
                            // direct pursuit, restricted to the territory
                            Some(i) if i.pos.dist(d.pos) <= pursuit => poly.clamp_inside(i.pos),
                            Some(_) => task_point(target).unwrap_or(d.pos),
                            None => d.pos,
                        }
                    }
                    None => goals[k].unwrap_or(d.pos),
                };
                self.defenders[k] = step_defender(d, goal, h, poly);
            }
            let positions: Vec<Point2> = self.defenders.iter().map(|d| d.pos).collect();
            let view = IntruderView {
                poly,
                defenders: &positions,
                defender_speed: cfg.v_d_max,
                time: now,
                maneuver_period: cfg.maneuver_period,
            };
            for i in self.intruders.iter_mut().filter(|i| i.alive) {
                *i = step_intruder(i, &view, h);
            }
            let events = neutralization_check(poly, &self.defenders, &mut self.intruders, cfg.epsilon);
            let at = now + h;
            for &(defender, intruder) in &events.captures {
                let pos = self.intruders.iter().find(|i| i.id == intruder).map(|i| i.pos).unwrap_or_default();
                let defender_pos =
                    self.defenders.iter().find(|d| d.id == defender).map(|d| d.pos).unwrap_or_default();
                sink.record(TraceEvent::Capture {
                    time: at,
                    defender,
                    intruder,
                    pos,
                    defender_pos,
                });
            }
            for &intruder in &events.intrusions {
                let pos = self.intruders.iter().find(|i| i.id == intruder).map(|i| i.pos).unwrap_or_default();
                sink.record(TraceEvent::Intrusion { time: at, intruder, pos });
            }
            self.captures += events.captures.len();
            self.intrusions += events.intrusions.len();
        }

        for (k, d) in self.defenders.iter().enumerate() {
            self.team.active[k].pos = d.pos;
        }
        let captured_now = self.intruders.iter().filter(|i| !i.alive).count();
        self.intruders.retain(|i| i.alive);
        self.time = (self.step_index + 1) as f64 * dt;
        self.step_index += 1;

        if self.intrusions == 0 {
            for _ in 0..captured_now {
                if self.spawned < cfg.episode_intruder_total {
                    self.spawn_intruder(sink);
                }
            }
        }

        if sink.wants_detail() {
            sink.record(TraceEvent::Step {
                step: self.step_index,
                time: self.time,
                defenders: self
                    .defenders
                    .iter()
                    .zip(&self.team.active)
                    .map(|(d, r)| DefenderSnapshot {
                        id: d.id,
                        pos: d.pos,
                        role: r.role,
                        chain: d.chain.clone(),
                    })
                    .collect(),
                intruders: self
                    .intruders
                    .iter()
                    .map(|i| IntruderSnapshot {
                        id: i.id,
                        pos: i.pos,
                        heading: i.heading,
                        prioritized: self.prioritized.iter().any(|&(id, p)| id == i.id && p),
                        sensed: self.sensed(i.pos),
                    })
                    .collect(),
            });
        }
        Ok(())
    }

    pub fn result(&self) -> SimResult {
        SimResult {
            success: self.intrusions == 0 && self.captures == self.cfg.episode_intruder_total,
            captures: self.captures,
            intrusions: self.intrusions,
            peak_team_size: self.peak_team,
            spawn_count: self.team.spawn_count,
            guard_flags: self.guard_flags,
            priority_violations: self.priority_violations,
            steps: self.step_index,
            end_time: self.time,
            mean_step_ms: 0.0,
        }
    }
}
