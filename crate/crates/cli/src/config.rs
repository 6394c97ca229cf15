//! TOML run configuration.
//!
//! Units are meters, seconds and degrees (deg/s for turn rates).

use std::path::{Path, PathBuf};

use perimeter_defense::geometry::{ConvexPolygon, Point2};
use perimeter_defense::simulation::{Baseline, SimConfig};
use perimeter_defense::static_design::DesignConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Fixed station count or the design loop's search from one station upward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StationCount {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for StationCount {
    fn default() -> Self {
        Self::Fixed(3)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSection {
    pub gamma: f64,
    pub beta: f64,
    pub sensor_range: f64,
    pub n_stations: StationCount,
    pub max_stations: usize,
    pub station_restarts: usize,
    pub monitor_restarts: usize,
    pub seed: u64,
    pub ray_count: usize,
    pub kink_threshold_deg: f64,
    pub max_spacing: Option<f64>,
    pub monitor_cap: usize,
}

impl Default for DesignSection {
    fn default() -> Self {
        let d = DesignConfig::default();
        Self {
            gamma: d.gamma,
            beta: d.beta,
            sensor_range: d.sensor_range,
            n_stations: StationCount::default(),
            max_stations: d.max_stations,
            station_restarts: d.station_restarts,
            monitor_restarts: d.monitor_restarts,
            seed: d.seed,
            ray_count: d.ray_count,
            kink_threshold_deg: d.kink_threshold.to_degrees(),
            max_spacing: d.max_spacing,
            monitor_cap: d.monitor_cap,
        }
    }
}

impl DesignSection {
    pub fn to_design_config(&self) -> DesignConfig {
        let (initial, max) = match self.n_stations {
            StationCount::Fixed(n) => (n, n),
            StationCount::Auto(_) => (1, self.max_stations),
        };
        DesignConfig {
            initial_n_stations: initial,
            gamma: self.gamma,
            beta: self.beta,
            sensor_range: self.sensor_range,
            max_stations: max,
            station_restarts: self.station_restarts,
            monitor_restarts: self.monitor_restarts,
            seed: self.seed,
            ray_count: self.ray_count,
            kink_threshold: self.kink_threshold_deg.to_radians(),
            max_spacing: self.max_spacing,
            monitor_cap: self.monitor_cap,
        }
    }
}

/// Axes of the Monte-Carlo sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub runs: usize,
    pub baselines: Vec<Baseline>,
    /// deg/s.
    pub omegas: Vec<f64>,
    pub concurrent: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            runs: 100,
            baselines: vec![Baseline::Pdream, Baseline::Dream],
            omegas: vec![0.0, 15.0, 30.0, 45.0],
            concurrent: vec![6, 8, 10],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerritorySection {
    pub vertices: Vec<[f64; 2]>,
}

impl Default for TerritorySection {
    fn default() -> Self {
        let poly = perimeter_defense::geometry::reference_territory();
        Self {
            vertices: poly.vertices().iter().map(|p| [p.x, p.y]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub territory: TerritorySection,
    pub design: DesignSection,
    pub simulation: SimConfig,
    pub montecarlo: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            territory: TerritorySection::default(),
            design: DesignSection::default(),
            simulation: SimConfig::default(),
            montecarlo: SweepSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Parse(path.to_path_buf(), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn polygon(&self) -> Result<ConvexPolygon, CliError> {
        let pts = self.territory.vertices.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        ConvexPolygon::new(pts).map_err(|e| CliError::Invalid {
            field: "territory.vertices",
            message: e.to_string(),
        })
    }

    /// Checks every precondition the library would otherwise reject later.
    pub fn validate(&self) -> Result<(), CliError> {
        let poly = self.polygon()?;
        if let StationCount::Fixed(0) = self.design.n_stations {
            return Err(CliError::Invalid {
                field: "design.n_stations",
                message: "must be at least 1 or \"auto\"".into(),
            });
        }
        self.design.to_design_config().validate().map_err(|e| CliError::Invalid {
            field: "design",
            message: e.to_string(),
        })?;
        self.simulation.validate().map_err(|e| CliError::Invalid {
            field: "simulation",
            message: e.to_string(),
        })?;
        let max_tasks = self.simulation.concurrent_intruders.max(self.montecarlo.concurrent.iter().copied().max().unwrap_or(0));
        self.simulation
            .cost_config(poly.diameter())
            .validate(poly.diameter(), max_tasks.max(1))
            .map_err(|e| CliError::Invalid {
                field: "simulation.alpha/kappa",
                message: e.to_string(),
            })?;
        if self.montecarlo.runs == 0 {
            return Err(CliError::Invalid {
                field: "montecarlo.runs",
                message: "must be at least 1".into(),
            });
        }
        if self.montecarlo.omegas.iter().any(|w| !(*w >= 0.0)) {
            return Err(CliError::Invalid {
                field: "montecarlo.omegas",
                message: "turn rates must be nonnegative".into(),
            });
        }
        if self.montecarlo.concurrent.contains(&0) {
            return Err(CliError::Invalid {
                field: "montecarlo.concurrent",
                message: "intruder counts must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_reference_setup() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
        assert!((cfg.polygon().unwrap().area() - 1600.0).abs() < 1e-9);
    }

    #[test]
    fn station_count_accepts_auto() {
        let cfg: RunConfig = toml::from_str("[design]\nn_stations = \"auto\"\nmax_stations = 4").unwrap();
        let d = cfg.design.to_design_config();
        assert_eq!((d.initial_n_stations, d.max_stations), (1, 4));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.simulation.seed = 9;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn malformed_vertices_name_the_field() {
        let cfg: RunConfig = toml::from_str("[territory]\nvertices = [[0,0],[1,0]]").unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("territory.vertices"), "{err}");
    }

    #[test]
    fn shipped_config_is_the_default_setup() {
        let cfg: RunConfig = toml::from_str(include_str!("../../../configs/reference.toml")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.polygon().unwrap(), RunConfig::default().polygon().unwrap());
        assert_eq!(cfg.simulation, SimConfig::default());
    }
}
