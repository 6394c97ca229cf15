//! Seeded batches of independent episodes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_episode, NullTrace, Scenario, SimConfig, SimError, SimResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub runs: usize,
    pub successes: usize,
    /// Percent.
    pub success_rate: f64,
    /// Wilson 95% interval, percent.
    pub ci95: (f64, f64),
    pub mean_peak_team: f64,
    pub mean_spawns: f64,
    /// Per-episode results keyed by seed, ascending.
    pub episodes: Vec<(u64, SimResult)>,
}

/// Wilson score interval for `successes` out of `n` at z = 1.96, as fractions.
pub fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Runs seeds `cfg.seed .. cfg.seed + runs` in parallel and aggregates them
/// in seed order.
pub fn monte_carlo(scenario: &Scenario, cfg: &SimConfig, runs: usize) -> Result<MonteCarloSummary, SimError> {
    if runs == 0 {
        return Err(SimError::InvalidParameter("runs must be at least 1".into()));
    }
    let episodes: Vec<(u64, SimResult)> = (0..runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k);
            let episode_cfg = SimConfig { seed, ..cfg.clone() };
            run_episode(scenario, &episode_cfg, &mut NullTrace).map(|r| (seed, r))
        })
        .collect::<Result<_, _>>()?;
    let successes = episodes.iter().filter(|(_, r)| r.success).count();
    let (lo, hi) = wilson_interval(successes, runs);
    let n = runs as f64;
    Ok(MonteCarloSummary {
        runs,
        successes,
        success_rate: 100.0 * successes as f64 / n,
        ci95: (100.0 * lo, 100.0 * hi),
        mean_peak_team: episodes.iter().map(|(_, r)| r.peak_team_size as f64).sum::<f64>() / n,
        mean_spawns: episodes.iter().map(|(_, r)| r.spawn_count as f64).sum::<f64>() / n,
        episodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-4);
    }
}
