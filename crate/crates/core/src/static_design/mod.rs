//! Offline layout design: reserve stations, priority and monitoring regions,
//! critical points and the smallest monitoring team for a sensor range.

mod factor;
mod placement;
mod region;

pub use factor::{monitoring_factor, priority_factor, FactorField, DEFAULT_FACTOR_SAMPLES};
pub use placement::{
    min_monitor_team, minimax_sites, monitor_sweep, nelder_mead, place_monitors,
    place_reserve_stations, polyline_max_min_distance, random_interior_point, station_objective,
    MinimaxSolution, MonitorLayout, MonitorTeam, NelderMeadOptions, ReserveLayout,
};
pub use region::{critical_points, region_area, region_boundary, RegionApprox, RegionKind, MIN_RAYS};

pub(crate) use placement::sub_seed;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolygon, Point2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("invalid design parameter: {0}")]
    InvalidParameter(String),
    #[error("`{0}` must be at least 1")]
    ZeroCount(&'static str),
    #[error("ray_count must be at least {min}, got {0}", min = MIN_RAYS)]
    RayCountTooSmall(usize),
    #[error("factor did not change sign along ray {ray} within 10 territory diameters")]
    NoSignChange { ray: usize },
    #[error("factor is negative on the territory boundary along ray {ray}")]
    NotStarShaped { ray: usize },
    #[error("region boundary is empty")]
    EmptyRegion,
    #[error("no team of up to {cap} monitors fits sensor range {sensor_range} m (best {best:.4} m)")]
    Unreachable { cap: usize, sensor_range: f64, best: f64 },
    #[error("no layout with at most {max_stations} stations admits a monitoring team (best {best:.4} m)")]
    Exhausted { max_stations: usize, best: f64 },
}

/// Inputs of the design loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignConfig {
    pub initial_n_stations: usize,
    /// Defender to intruder top-speed ratio.
    pub gamma: f64,
    /// Safety factor inflating the monitoring region.
    pub beta: f64,
    pub sensor_range: f64,
    pub max_stations: usize,
    pub station_restarts: usize,
    pub monitor_restarts: usize,
    pub seed: u64,
    pub ray_count: usize,
    /// Radians.
    pub kink_threshold: f64,
    /// Defaults to half the sensor range.
    pub max_spacing: Option<f64>,
    pub monitor_cap: usize,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self {
            initial_n_stations: 3,
            gamma: 1.0,
            beta: 1.33,
            sensor_range: 50.0,
            max_stations: 6,
            station_restarts: 1000,
            monitor_restarts: 64,
            seed: 0,
            ray_count: 360,
            kink_threshold: 10f64.to_radians(),
            max_spacing: None,
            monitor_cap: 32,
        }
    }
}

impl DesignConfig {
    pub fn validate(&self) -> Result<(), DesignError> {
        let bad = |msg: String| Err(DesignError::InvalidParameter(msg));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.beta >= 1.0 && self.beta.is_finite()) {
            return bad(format!("beta must be at least 1, got {}", self.beta));
        }
        if !(self.sensor_range > 0.0) {
            return bad(format!("sensor_range must be positive, got {}", self.sensor_range));
        }
        if self.initial_n_stations == 0 {
            return Err(DesignError::ZeroCount("initial_n_stations"));
        }
        if self.max_stations < self.initial_n_stations {
            return bad(format!(
                "max_stations ({}) is below initial_n_stations ({})",
                self.max_stations, self.initial_n_stations
            ));
        }
        if self.station_restarts == 0 {
            return Err(DesignError::ZeroCount("station_restarts"));
        }
        if self.monitor_restarts == 0 {
            return Err(DesignError::ZeroCount("monitor_restarts"));
        }
        if self.monitor_cap == 0 {
            return Err(DesignError::ZeroCount("monitor_cap"));
        }
        if self.ray_count < MIN_RAYS {
            return Err(DesignError::RayCountTooSmall(self.ray_count));
        }
        if let Some(s) = self.max_spacing {
            if !(s > 0.0) {
                return bad(format!("max_spacing must be positive, got {s}"));
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.max_spacing.unwrap_or(self.sensor_range / 2.0)
    }
}

/// Everything the online phase needs from the offline design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticDesign {
    pub territory: ConvexPolygon,
    pub layout: ReserveLayout,
    /// Mini-max perimeter distance of the layout.
    pub station_objective: f64,
    pub gamma: f64,
    pub beta: f64,
    pub sensor_range: f64,
    pub priority_region: RegionApprox,
    pub monitoring_region: RegionApprox,
    pub critical_points: Vec<Point2>,
    pub n_monitors: usize,
    pub monitor_positions: Vec<Point2>,
    pub rs_min: f64,
    /// Optimal monitor placements for team sizes 1, 2, ... up to `n_monitors`.
    pub monitor_layouts: Vec<MonitorLayout>,
}

impl StaticDesign {
    pub fn factor_field(&self) -> FactorField {
        FactorField::new(&self.territory, &self.layout)
    }

    /// Whether `p` lies in the closed priority region (and outside the territory).
    pub fn is_prioritized(&self, field: &FactorField, p: Point2) -> bool {
        !self.territory.contains(p) && field.priority(p, self.gamma) >= 0.0
    }
}

/// Both regions and the critical points for a fixed station layout.
pub fn build_regions(
    poly: &ConvexPolygon,
    layout: &ReserveLayout,
    gamma: f64,
    beta: f64,
    ray_count: usize,
) -> Result<(RegionApprox, RegionApprox), DesignError> {
    let field = FactorField::new(poly, layout);
    let priority = region_boundary(&field, gamma, ray_count, RegionKind::Priority)?;
    let monitoring = region_boundary(&field, gamma / beta, ray_count, RegionKind::Monitoring)?;
    Ok((priority, monitoring))
}

/// Runs the design loop, adding reserve stations until a monitoring team fits
/// the sensor range or `max_stations` is exhausted.
pub fn design_layout(poly: &ConvexPolygon, cfg: &DesignConfig) -> Result<StaticDesign, DesignError> {
    cfg.validate()?;
    let mut best = f64::INFINITY;
    for n in cfg.initial_n_stations..=cfg.max_stations {
        let (layout, station_objective) =
            place_reserve_stations(poly, n, cfg.station_restarts, cfg.seed)?;
        let (priority_region, monitoring_region) =
            build_regions(poly, &layout, cfg.gamma, cfg.beta, cfg.ray_count)?;
        let critical = critical_points(&monitoring_region, cfg.kink_threshold, cfg.spacing());
        let sweep = monitor_sweep(
            poly,
            &monitoring_region,
            cfg.sensor_range,
            cfg.monitor_restarts,
            cfg.seed,
            cfg.monitor_cap,
        )?;
        let last = sweep.last().expect("sweep evaluates at least one team size");
        best = best.min(last.rs_min);
        if last.rs_min > cfg.sensor_range {
            continue;
        }
        return Ok(StaticDesign {
            territory: poly.clone(),
            layout,
            station_objective,
            gamma: cfg.gamma,
            beta: cfg.beta,
            sensor_range: cfg.sensor_range,
            priority_region,
            monitoring_region,
            critical_points: critical,
            n_monitors: sweep.len(),
            monitor_positions: last.positions.clone(),
            rs_min: last.rs_min,
            monitor_layouts: sweep,
        });
    }
    Err(DesignError::Exhausted {
        max_stations: cfg.max_stations,
        best,
    })
}
