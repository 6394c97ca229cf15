use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use perimeter_defense::geometry::Point2;
use perimeter_defense::simulation::{
    monte_carlo, run_episode, Baseline, Scenario, SimConfig, SimResult, TraceEvent, TraceSink,
};
use perimeter_defense::static_design::{design_layout, StaticDesign};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
pub struct DesignFile {
    pub config_hash: String,
    #[serde(flatten)]
    pub design: StaticDesign,
}

#[derive(Debug, Serialize)]
pub struct SummaryFile<'a> {
    pub config_hash: &'a str,
    pub seed: u64,
    pub baseline: Baseline,
    #[serde(flatten)]
    pub result: &'a SimResult,
}

#[derive(Debug, Serialize)]
struct RegionRow<'a> {
    config_hash: &'a str,
    kind: &'static str,
    index: usize,
    x: f64,
    y: f64,
}

#[derive(Debug, Serialize)]
struct SweepRow<'a> {
    config_hash: &'a str,
    baseline: Baseline,
    omega_deg: f64,
    m: usize,
    runs: usize,
    successes: usize,
    success_rate: f64,
    ci_low: f64,
    ci_high: f64,
    mean_peak_team: f64,
    mean_spawns: f64,
}

#[derive(Debug, Serialize)]
struct EpisodeRow<'a> {
    config_hash: &'a str,
    baseline: Baseline,
    omega_deg: f64,
    m: usize,
    seed: u64,
    success: bool,
    captures: usize,
    intrusions: usize,
    peak_team: usize,
    spawns: usize,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| CliError::Io(path, e))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Io(dir.join(name), e))
}

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    Ok(csv::Writer::from_writer(create(dir, name)?))
}

pub fn build_design(cfg: &RunConfig) -> Result<StaticDesign, CliError> {
    let poly = cfg.polygon()?;
    Ok(design_layout(&poly, &cfg.design.to_design_config())?)
}

pub fn cmd_design(cfg: &RunConfig, out: &Path) -> Result<StaticDesign, CliError> {
    let hash = cfg.hash();
    let design = build_design(cfg)?;
    write_json(
        out,
        "design.json",
        &DesignFile {
            config_hash: hash.clone(),
            design: design.clone(),
        },
    )?;

    let mut w = csv_writer(out, "regions.csv")?;
    let groups: [(&'static str, &[Point2]); 6] = [
        ("territory", design.territory.vertices()),
        ("priority", &design.priority_region.boundary),
        ("monitoring", &design.monitoring_region.boundary),
        ("critical", &design.critical_points),
        ("station", &design.layout.stations),
        ("monitor", &design.monitor_positions),
    ];
    for (kind, points) in groups {
        for (index, p) in points.iter().enumerate() {
            w.serialize(RegionRow {
                config_hash: &hash,
                kind,
                index,
                x: p.x,
                y: p.y,
            })?;
        }
    }
    w.flush().map_err(|e| CliError::Io(out.join("regions.csv"), e))?;
    Ok(design)
}

/// Loads a design written by `cmd_design`, or runs the design loop.
pub fn obtain_design(cfg: &RunConfig, path: Option<&Path>) -> Result<StaticDesign, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(p.to_path_buf(), e))?;
            let file: DesignFile = serde_json::from_str(&text)?;
            Ok(file.design)
        }
        None => build_design(cfg),
    }
}

fn scenario(cfg: &RunConfig, design: StaticDesign) -> Result<Scenario, CliError> {
    let d = &cfg.design;
    Ok(Scenario::new(
        design,
        cfg.simulation.initial_defenders,
        d.monitor_restarts,
        d.seed,
    )?)
}

/// Streams trace events as JSON lines, keeping the first write error.
struct JsonlSink {
    out: BufWriter<File>,
    error: Option<std::io::Error>,
}

impl JsonlSink {
    fn line<T: Serialize>(&mut self, value: &T) {
        if self.error.is_some() {
            return;
        }
        let res = serde_json::to_writer(&mut self.out, value)
            .map_err(std::io::Error::from)
            .and_then(|_| self.out.write_all(b"\n"));
        if let Err(e) = res {
            self.error = Some(e);
        }
    }
}

impl TraceSink for JsonlSink {
    fn record(&mut self, event: TraceEvent) {
        self.line(&event);
    }
}

#[derive(Serialize)]
struct TraceHeader<'a> {
    event: &'static str,
    config_hash: &'a str,
    seed: u64,
    baseline: Baseline,
}

pub struct SimulateOutcome {
    pub result: SimResult,
    /// Guard or priority violations were recorded.
    pub violated: bool,
}

pub fn cmd_simulate(cfg: &RunConfig, out: &Path, design: Option<&Path>) -> Result<SimulateOutcome, CliError> {
    let hash = cfg.hash();
    let scenario = scenario(cfg, obtain_design(cfg, design)?)?;
    let sim = &cfg.simulation;

    let mut sink = JsonlSink {
        out: create(out, "trace.jsonl")?,
        error: None,
    };
    sink.line(&TraceHeader {
        event: "header",
        config_hash: &hash,
        seed: sim.seed,
        baseline: sim.baseline,
    });
    let result = run_episode(&scenario, sim, &mut sink)?;
    if let Some(e) = sink.error.take() {
        return Err(CliError::Io(out.join("trace.jsonl"), e));
    }
    sink.out.flush().map_err(|e| CliError::Io(out.join("trace.jsonl"), e))?;

    write_json(
        out,
        "summary.json",
        &SummaryFile {
            config_hash: &hash,
            seed: sim.seed,
            baseline: sim.baseline,
            result: &result,
        },
    )?;
    let violated = result.guard_flags > 0 || result.priority_violations > 0;
    Ok(SimulateOutcome { result, violated })
}

/// Returns the number of sweep points written.
pub fn cmd_montecarlo(cfg: &RunConfig, out: &Path, design: Option<&Path>) -> Result<usize, CliError> {
    let hash = cfg.hash();
    let scenario = scenario(cfg, obtain_design(cfg, design)?)?;
    let sweep = &cfg.montecarlo;

    let mut rows = csv_writer(out, "sweep.csv")?;
    let mut episodes = csv_writer(out, "episodes.csv")?;
    let mut points = 0;
    for &baseline in &sweep.baselines {
        for &omega_deg in &sweep.omegas {
            for &m in &sweep.concurrent {
                let sim = SimConfig {
                    baseline,
                    omega_max_deg: omega_deg,
                    concurrent_intruders: m,
                    ..cfg.simulation.clone()
                };
                let summary = monte_carlo(&scenario, &sim, sweep.runs)?;
                eprintln!(
                    "{baseline:?} omega={omega_deg} M={m}: {:.1}% [{:.1}, {:.1}]",
                    summary.success_rate, summary.ci95.0, summary.ci95.1
                );
                rows.serialize(SweepRow {
                    config_hash: &hash,
                    baseline,
                    omega_deg,
                    m,
                    runs: summary.runs,
                    successes: summary.successes,
                    success_rate: summary.success_rate,
                    ci_low: summary.ci95.0,
                    ci_high: summary.ci95.1,
                    mean_peak_team: summary.mean_peak_team,
                    mean_spawns: summary.mean_spawns,
                })?;
                for (seed, r) in &summary.episodes {
                    episodes.serialize(EpisodeRow {
                        config_hash: &hash,
                        baseline,
                        omega_deg,
                        m,
                        seed: *seed,
                        success: r.success,
                        captures: r.captures,
                        intrusions: r.intrusions,
                        peak_team: r.peak_team_size,
                        spawns: r.spawn_count,
                    })?;
                }
                points += 1;
            }
        }
    }
    rows.flush().map_err(|e| CliError::Io(out.join("sweep.csv"), e))?;
    episodes.flush().map_err(|e| CliError::Io(out.join("episodes.csv"), e))?;
    Ok(points)
}

/// Output directory: the flag wins over the config entry.
pub fn output_dir(cfg: &RunConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| cfg.output_dir.clone())
}
