//! Episode event log.

use serde::{Deserialize, Serialize};

use crate::assignment::CostMatrix;
use crate::dream::Role;
use crate::geometry::Point2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenderSnapshot {
    pub id: u64,
    pub pos: Point2,
    pub role: Role,
    /// Intruder ids in execution order.
    pub chain: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntruderSnapshot {
    pub id: u64,
    pub pos: Point2,
    pub heading: f64,
    pub prioritized: bool,
    pub sensed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Step {
        step: u64,
        time: f64,
        defenders: Vec<DefenderSnapshot>,
        intruders: Vec<IntruderSnapshot>,
    },
    Spawn {
        time: f64,
        defender: u64,
        pos: Point2,
    },
    Remove {
        time: f64,
        defender: u64,
    },
    IntruderSpawn {
        time: f64,
        intruder: u64,
        pos: Point2,
    },
    Capture {
        time: f64,
        defender: u64,
        intruder: u64,
        /// Intruder position.
        pos: Point2,
        defender_pos: Point2,
    },
    Intrusion {
        time: f64,
        intruder: u64,
        pos: Point2,
    },
    /// Spawning stalled without removing every infeasible edge.
    Guard {
        time: f64,
        infeasible: usize,
    },
    /// A prioritized task ended up behind another task.
    PriorityViolation {
        time: f64,
        intruder: u64,
    },
    Assignment {
        time: f64,
        defenders: Vec<u64>,
        costs: CostMatrix,
    },
}

/// Receiver of trace events.
pub trait TraceSink {
    fn record(&mut self, event: TraceEvent);

    /// Whether step snapshots and cost matrices are wanted at all.
    fn wants_detail(&self) -> bool {
        true
    }
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullTrace;

impl TraceSink for NullTrace {
    fn record(&mut self, _event: TraceEvent) {}

    fn wants_detail(&self) -> bool {
        false
    }
}

impl TraceSink for Vec<TraceEvent> {
    fn record(&mut self, event: TraceEvent) {
        self.push(event);
    }
}
