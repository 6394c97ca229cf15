//! Discrete-time episodes and Monte-Carlo batches.

mod agents;
mod montecarlo;
mod trace;
mod world;

pub use agents::{step_defender, step_intruder, DefenderState, IntruderPolicy, IntruderState, IntruderView};
pub use montecarlo::{monte_carlo, wilson_interval, MonteCarloSummary};
pub use trace::{DefenderSnapshot, IntruderSnapshot, NullTrace, TraceEvent, TraceSink};
pub use world::{neutralization_check, Neutralization, World};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{AssignmentError, CostConfig};
use crate::geometry::{Point2, Predictor};
use crate::static_design::{place_monitors, DesignError, StaticDesign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Assignment(#[from] AssignmentError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// Which cost rule the online assignment uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// Prioritized intruders must be first tasks.
    #[default]
    Pdream,
    /// No priority flags.
    Dream,
}

impl std::str::FromStr for Baseline {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pdream" => Ok(Self::Pdream),
            "dream" => Ok(Self::Dream),
            other => Err(format!("unknown baseline `{other}` (expected pdream or dream)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Seconds.
    pub dt: f64,
    pub episode_intruder_total: usize,
    /// Intruders alive at once.
    pub concurrent_intruders: usize,
    pub v_i_max: f64,
    pub v_d_max: f64,
    /// Capture radius, meters.
    pub epsilon: f64,
    /// Distance at which a tasked defender pursues its intruder directly.
    /// Defaults to three capture radii.
    pub pursuit_radius: Option<f64>,
    /// Intruder turn-rate limit, deg/s.
    pub omega_max_deg: f64,
    pub policy: IntruderPolicy,
    /// Mean seconds between random aim changes.
    pub maneuver_period: f64,
    pub seed: u64,
    pub monitoring_enabled: bool,
    pub baseline: Baseline,
    pub predictor: Predictor,
    pub initial_defenders: usize,
    /// Simulated-time cap, seconds.
    pub max_time: f64,
    pub alpha: f64,
    /// Defaults to 10⁶·α·diameter.
    pub kappa: Option<f64>,
    /// Emit the cost matrix of every step to the trace.
    pub dump_assignments: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            episode_intruder_total: 15,
            concurrent_intruders: 6,
            v_i_max: 3.0,
            v_d_max: 3.0,
            epsilon: 0.5,
            pursuit_radius: None,
            omega_max_deg: 45.0,
            policy: IntruderPolicy::RandomManeuver,
            maneuver_period: 2.0,
            seed: 0,
            monitoring_enabled: true,
            baseline: Baseline::Pdream,
            predictor: Predictor::Eq2,
            initial_defenders: 3,
            max_time: 600.0,
            alpha: 1.0,
            kappa: None,
            dump_assignments: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidParameter(m));
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.v_i_max > 0.0) || !(self.v_d_max > 0.0) {
            return bad("speeds must be positive".into());
        }
        if !(self.omega_max_deg >= 0.0) {
            return bad(format!("omega_max_deg must be nonnegative, got {}", self.omega_max_deg));
        }
        if self.concurrent_intruders == 0 && self.episode_intruder_total > 0 {
            return bad("concurrent_intruders must be at least 1".into());
        }
        if !(self.maneuver_period > 0.0) {
            return bad("maneuver_period must be positive".into());
        }
        if !(self.max_time > 0.0) {
            return bad("max_time must be positive".into());
        }
        if let Some(r) = self.pursuit_radius {
            if !(r >= 0.0) {
                return bad("pursuit_radius must be nonnegative".into());
            }
        }
        Ok(())
    }

    pub fn pursuit(&self) -> f64 {
        self.pursuit_radius.unwrap_or(3.0 * self.epsilon)
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max_deg.to_radians()
    }

    pub fn cost_config(&self, diameter: f64) -> CostConfig {
        let auto = CostConfig::auto(self.alpha, diameter);
        CostConfig {
            alpha: self.alpha,
            kappa: self.kappa.unwrap_or(auto.kappa),
        }
    }
}

/// A design plus the initial defender positions derived from it, prepared
/// once and shared by every episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub design: StaticDesign,
    pub initial_positions: Vec<Point2>,
}

impl Scenario {
    /// Starts `n` defenders at the optimal monitoring placement for `n`.
    pub fn new(design: StaticDesign, n: usize, restarts: usize, seed: u64) -> Result<Self, SimError> {
        let initial_positions = if n == 0 {
            Vec::new()
        } else if let Some(layout) = design.monitor_layouts.get(n - 1) {
            layout.positions.clone()
        } else {
            place_monitors(&design.territory, &design.monitoring_region, n, restarts.max(1), seed)?.0
        };
        Ok(Self {
            design,
            initial_positions,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Every intruder captured and none got in.
    pub success: bool,
    pub captures: usize,
    pub intrusions: usize,
    pub peak_team_size: usize,
    pub spawn_count: usize,
    /// Steps where spawning stalled with infeasible edges left.
    pub guard_flags: usize,
    /// Prioritized tasks that were not first in their chain after allocation.
    pub priority_violations: usize,
    pub steps: u64,
    pub end_time: f64,
    /// Wall-clock cost per step; excluded from serialized summaries so they
    /// stay reproducible.
    #[serde(skip)]
    pub mean_step_ms: f64,
}

/// Runs one seeded episode to completion.
pub fn run_episode(scenario: &Scenario, cfg: &SimConfig, sink: &mut dyn TraceSink) -> Result<SimResult, SimError> {
    cfg.validate()?;
    let mut world = World::new(scenario, cfg);
    let started = std::time::Instant::now();
    while !world.finished() {
        world.step(sink)?;
    }
    let mut result = world.result();
    if result.steps > 0 {
        result.mean_step_ms = started.elapsed().as_secs_f64() * 1e3 / result.steps as f64;
    }
    Ok(result)
}
