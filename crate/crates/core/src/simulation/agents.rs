//! Unicycle kinematics for defenders and intruders.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{angle_diff, wrap_angle, ConvexPolygon, Point2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenderState {
    pub id: u64,
    pub pos: Point2,
    /// Radians in `[0, 2π)`.
    pub heading: f64,
    pub speed: f64,
    pub v_max: f64,
    pub sensor_range: f64,
    /// Intruder ids in execution order.
    pub chain: Vec<u64>,
}

impl DefenderState {
    pub fn new(id: u64, pos: Point2, v_max: f64, sensor_range: f64) -> Self {
        Self {
            id,
            pos,
            heading: 0.0,
            speed: 0.0,
            v_max,
            sensor_range,
            chain: Vec::new(),
        }
    }
}

/// Moves toward `goal` at up to `v_max` without overshooting, staying in the
/// territory.
pub fn step_defender(d: &DefenderState, goal: Point2, dt: f64, poly: &ConvexPolygon) -> DefenderState {
    let mut next = d.clone();
    let delta = goal - d.pos;
    let dist = delta.norm();
    if dist == 0.0 {
        next.speed = 0.0;
        return next;
    }
    next.heading = wrap_angle(delta.heading());
    next.speed = d.v_max.min(dist / dt);
    let moved = if next.speed * dt >= dist {
        goal
    } else {
        d.pos + Point2::from_polar(next.speed * dt, next.heading)
    };
    next.pos = poly.clamp_inside(moved);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntruderPolicy {
    /// Fly at a fixed perimeter aim point.
    Direct,
    /// Re-draw the aim point at random times and add heading noise.
    #[default]
    RandomManeuver,
    /// Head for the perimeter point with the best margin over the defenders.
    Evasive,
}

impl std::str::FromStr for IntruderPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Self::Direct),
            "random_maneuver" => Ok(Self::RandomManeuver),
            "evasive" => Ok(Self::Evasive),
            other => Err(format!(
                "unknown policy `{other}` (expected direct, random_maneuver or evasive)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntruderState {
    pub id: u64,
    pub pos: Point2,
    pub heading: f64,
    pub speed: f64,
    /// Turn-rate limit, rad/s.
    pub omega_max: f64,
    pub policy: IntruderPolicy,
    pub alive: bool,
    /// Perimeter point currently steered toward.
    pub aim: Point2,
    /// Simulation time of the next aim re-draw or re-evaluation.
    pub next_replan: f64,
    #[serde(skip)]
    pub rng: Option<ChaCha8Rng>,
}

impl IntruderState {
    pub fn velocity(&self) -> Point2 {
        Point2::from_polar(self.speed, self.heading)
    }
}

/// What an intruder can see of the world when choosing its heading.
#[derive(Debug, Clone, Copy)]
pub struct IntruderView<'a> {
    pub poly: &'a ConvexPolygon,
    pub defenders: &'a [Point2],
    pub defender_speed: f64,
    pub time: f64,
    /// Mean seconds between random aim changes.
    pub maneuver_period: f64,
}

const EVASIVE_SAMPLES: usize = 120;
const EVASIVE_PERIOD: f64 = 1.0;

fn evasive_aim(i: &IntruderState, view: &IntruderView) -> Point2 {
    let l = view.poly.perimeter();
    (0..EVASIVE_SAMPLES)
        .map(|k| view.poly.point_at(l * k as f64 / EVASIVE_SAMPLES as f64))
        .map(|s| {
            let defender_time = view
                .defenders
                .iter()
                .map(|d| d.dist(s) / view.defender_speed)
                .fold(f64::INFINITY, f64::min);
            (s, defender_time - i.pos.dist(s) / i.speed.max(1e-9))
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(s, _)| s)
        .unwrap_or(i.aim)
}

/// Advances an intruder one step under its policy. Heading changes are
/// clamped to `omega_max·dt`.
pub fn step_intruder(i: &IntruderState, view: &IntruderView, dt: f64) -> IntruderState {
    let mut next = i.clone();
    let limit = i.omega_max * dt;
    let mut noise = 0.0;
    match i.policy {
        IntruderPolicy::Direct => {}
        IntruderPolicy::RandomManeuver => {
            if let Some(rng) = next.rng.as_mut() {
                if view.time >= i.next_replan {
                    let s = rng.gen_range(0.0..view.poly.perimeter());
                    next.aim = view.poly.point_at(s);
                    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
                    next.next_replan = view.time - view.maneuver_period * u.ln();
                }
                if limit > 0.0 {
                    noise = rng.gen_range(-limit..=limit);
                }
            }
        }
        IntruderPolicy::Evasive => {
            if view.time >= i.next_replan {
                next.aim = evasive_aim(i, view);
                next.next_replan = view.time + EVASIVE_PERIOD;
            }
        }
    }
    let desired = (next.aim - i.pos).heading();
    let turn = (angle_diff(i.heading, desired) + noise).clamp(-limit, limit);
    next.heading = wrap_angle(i.heading + turn);
    next.pos = i.pos + Point2::from_polar(i.speed * dt, next.heading);
    next
}
