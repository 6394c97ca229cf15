//! Mini-max facility placement inside the territory.
//!
//! Reserve stations and monitoring defenders are both placed by minimizing the
//! largest distance from a closed polyline (the perimeter, or a region
//! boundary) to the nearest site, with every site constrained to the territory.
//! The landscape has many local optima, so each solve is a multi-start
//! Nelder-Mead run whose restarts are independent and seeded individually.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::RegionApprox;
use super::DesignError;
use crate::geometry::{ConvexPolygon, Point2};

/// Tunables for a single simplex descent.
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    pub xtol: f64,
    pub ftol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 4000,
            xtol: 1e-7,
            ftol: 1e-10,
        }
    }
}

/// Minimizes `f` with the Nelder-Mead simplex method starting from `start`,
/// using an axis-aligned initial simplex of edge `step`.
pub fn nelder_mead<F>(start: &[f64], step: f64, opts: NelderMeadOptions, f: F) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evals = dim + 1;

    let mut order: Vec<usize> = (0..=dim).collect();
    let mut centroid = vec![0.0; dim];
    let at = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1.min(dim)];

        let fspread = values[worst] - values[best];
        let xspread = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if evals >= opts.max_evals || (fspread <= opts.ftol && xspread <= opts.xtol) {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &i in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x / dim as f64;
            }
        }

        let reflected = at(&centroid, &simplex[worst], -1.0);
        let fr = f(&reflected);
        evals += 1;

        if fr < values[best] {
            let expanded = at(&centroid, &simplex[worst], -2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }

        let (contracted, fc) = if fr < values[worst] {
            let c = at(&centroid, &reflected, 0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = at(&centroid, &simplex[worst], 0.5);
            let fc = f(&c);
            (c, fc)
        };
        evals += 1;
        if fc < values[worst].min(fr) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }

        let anchor = simplex[best].clone();
        for &i in &order[1..] {
            simplex[i] = at(&anchor, &simplex[i], 0.5);
            values[i] = f(&simplex[i]);
            evals += 1;
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    (simplex[best].clone(), values[best])
}

/// Largest distance from any point of the closed polyline to its nearest site.
///
/// Exact: along a segment whose endpoints share a nearest site the maximum is
/// at an endpoint; otherwise it is at an endpoint or where two sites are
/// equidistant.
pub fn polyline_max_min_distance(polyline: &[Point2], sites: &[Point2]) -> f64 {
    if sites.is_empty() {
        return f64::INFINITY;
    }
    let nearest = |p: Point2| -> (usize, f64) {
        sites
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.dist(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    };
    let min_dist = |p: Point2| -> f64 { sites.iter().map(|s| s.dist(p)).fold(f64::INFINITY, f64::min) };

    let n = polyline.len();
    let mut worst: f64 = 0.0;
    let mut ends: Vec<(usize, f64)> = polyline.iter().map(|&p| nearest(p)).collect();
    if n == 1 {
        return ends[0].1;
    }
    for i in 0..n {
        let (ia, da) = ends[i];
        let (ib, db) = ends[(i + 1) % n];
        worst = worst.max(da).max(db);
        if ia == ib {
            continue;
        }
        let a = polyline[i];
        let b = polyline[(i + 1) % n];
        let e = b - a;
        for (j, sj) in sites.iter().enumerate() {
            for sk in &sites[j + 1..] {
                // |a + t e - sj|^2 = |a + t e - sk|^2 is linear in t
                let denom = 2.0 * e.dot(*sk - *sj);
                if denom.abs() < 1e-15 {
                    continue;
                }
                let t = (sk.dot(*sk) - sj.dot(*sj) - 2.0 * a.dot(*sk - *sj)) / denom;
                if t > 0.0 && t < 1.0 {
                    worst = worst.max(min_dist(a + e * t));
                }
            }
        }
    }
    ends.clear();
    worst
}

/// Deterministic per-restart seed derived from the run seed.
pub(crate) fn sub_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random point inside the territory (rejection sampling on the bounds).
pub fn random_interior_point<R: Rng>(poly: &ConvexPolygon, rng: &mut R) -> Point2 {
    let (lo, hi) = poly.bounds();
    loop {
        let p = Point2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if poly.contains(p) {
            return p;
        }
    }
}

/// Result of a multi-start mini-max solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxSolution {
    pub sites: Vec<Point2>,
    pub objective: f64,
}

fn decode(poly: &ConvexPolygon, x: &[f64]) -> (Vec<Point2>, f64) {
    let mut outside = 0.0;
    let sites = x
        .chunks_exact(2)
        .map(|c| {
            let p = Point2::new(c[0], c[1]);
            let q = poly.clamp_inside(p);
            outside += p.dist(q);
            q
        })
        .collect();
    (sites, outside)
}

/// Places `n` sites inside `poly` minimizing the worst polyline-to-nearest-site
/// distance. Best of `restarts` seeded Nelder-Mead descents.
pub fn minimax_sites(
    poly: &ConvexPolygon,
    targets: &[Point2],
    n: usize,
    restarts: usize,
    seed: u64,
) -> MinimaxSolution {
    let step = 0.1 * poly.diameter();
    let opts = NelderMeadOptions::default();
    let objective = |x: &[f64]| -> f64 {
        let (sites, outside) = decode(poly, x);
        polyline_max_min_distance(targets, &sites) + 1e-3 * outside
    };

    let runs: Vec<(usize, MinimaxSolution)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, r as u64));
            let mut x: Vec<f64> = (0..n)
                .flat_map(|_| {
                    let p = random_interior_point(poly, &mut rng);
                    [p.x, p.y]
                })
                .collect();
            let (mut best_x, mut best_f) = nelder_mead(&x, step, opts, objective);
            // re-seeding the simplex at the incumbent escapes early collapse
            for polish in 0..4 {
                x = best_x.clone();
                let (xp, fp) = nelder_mead(&x, step * 0.25_f64.powi(polish + 1), opts, objective);
                if fp < best_f - 1e-12 {
                    best_x = xp;
                    best_f = fp;
                } else if polish > 0 {
                    break;
                }
            }
            let (sites, _) = decode(poly, &best_x);
            let objective = polyline_max_min_distance(targets, &sites);
            (r, MinimaxSolution { sites, objective })
        })
        .collect();

    runs.into_iter()
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective).then(a.0.cmp(&b.0)))
        .map(|(_, s)| s)
        .unwrap_or(MinimaxSolution {
            sites: Vec::new(),
            objective: f64::INFINITY,
        })
}

/// Interior points from which additional defenders are deployed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveLayout {
    pub stations: Vec<Point2>,
}

impl ReserveLayout {
    pub fn new(stations: Vec<Point2>) -> Self {
        Self { stations }
    }

    pub fn n(&self) -> usize {
        self.stations.len()
    }

    /// Index and position of the station closest to `p`.
    pub fn nearest(&self, p: Point2) -> Option<(usize, Point2)> {
        self.stations
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.dist(p).total_cmp(&b.1.dist(p)))
    }
}

/// Reserve stations minimizing the worst distance from the perimeter to the
/// nearest station. Returns the layout and that mini-max distance.
pub fn place_reserve_stations(
    poly: &ConvexPolygon,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Result<(ReserveLayout, f64), DesignError> {
    if n == 0 {
        return Err(DesignError::ZeroCount("n_stations"));
    }
    if restarts == 0 {
        return Err(DesignError::ZeroCount("restarts"));
    }
    let sol = minimax_sites(poly, poly.vertices(), n, restarts, seed);
    Ok((ReserveLayout::new(sol.sites), sol.objective))
}

/// Mini-max distance from the perimeter to the nearest of the given stations.
pub fn station_objective(poly: &ConvexPolygon, stations: &[Point2]) -> f64 {
    polyline_max_min_distance(poly.vertices(), stations)
}

/// `n` monitoring positions inside the territory minimizing the sensing radius
/// needed to see the whole region boundary. Returns positions and that radius.
pub fn place_monitors(
    poly: &ConvexPolygon,
    region: &RegionApprox,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Result<(Vec<Point2>, f64), DesignError> {
    if region.boundary.is_empty() {
        return Err(DesignError::EmptyRegion);
    }
    if n == 0 {
        return Err(DesignError::ZeroCount("n_monitors"));
    }
    if restarts == 0 {
        return Err(DesignError::ZeroCount("restarts"));
    }
    let sol = minimax_sites(poly, &region.boundary, n, restarts, seed);
    Ok((sol.sites, sol.objective))
}

/// Optimal monitor placement for one team size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorLayout {
    pub positions: Vec<Point2>,
    pub rs_min: f64,
}

/// Smallest monitoring team whose required sensing radius fits `sensor_range`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorTeam {
    pub n_min: usize,
    pub positions: Vec<Point2>,
    pub rs_min: f64,
}

/// Places teams of 1, 2, ... monitors until one fits `sensor_range`, the cap
/// is hit, or the range is provably too short. Always evaluates at least one
/// team size; the last entry fits iff its `rs_min <= sensor_range`.
pub fn monitor_sweep(
    poly: &ConvexPolygon,
    region: &RegionApprox,
    sensor_range: f64,
    restarts: usize,
    seed: u64,
    cap: usize,
) -> Result<Vec<MonitorLayout>, DesignError> {
    if !(sensor_range > 0.0) {
        return Err(DesignError::InvalidParameter("sensor_range must be positive".into()));
    }
    // Monitors live inside the territory, so no team beats the farthest
    // boundary point's distance to it.
    let floor = region
        .boundary
        .iter()
        .map(|&p| poly.distance_to(p))
        .fold(0.0, f64::max);
    let mut out = Vec::new();
    for n in 1..=cap.max(1) {
        let (positions, rs_min) = place_monitors(poly, region, n, restarts, seed)?;
        out.push(MonitorLayout { positions, rs_min });
        if rs_min <= sensor_range || sensor_range < floor - 1e-9 {
            break;
        }
    }
    Ok(out)
}

/// Smallest team whose placed monitors need no more than `sensor_range`;
/// gives up past `cap`.
pub fn min_monitor_team(
    poly: &ConvexPolygon,
    region: &RegionApprox,
    sensor_range: f64,
    restarts: usize,
    seed: u64,
    cap: usize,
) -> Result<MonitorTeam, DesignError> {
    let sweep = monitor_sweep(poly, region, sensor_range, restarts, seed, cap)?;
    let best = sweep.iter().map(|l| l.rs_min).fold(f64::INFINITY, f64::min);
    match sweep.last() {
        Some(last) if last.rs_min <= sensor_range => Ok(MonitorTeam {
            n_min: sweep.len(),
            positions: last.positions.clone(),
            rs_min: last.rs_min,
        }),
        _ => Err(DesignError::Unreachable {
            cap,
            sensor_range,
            best,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::reference_territory;

    fn square(half: f64) -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(-half, -half),
            Point2::new(half, -half),
            Point2::new(half, half),
            Point2::new(-half, half),
        ])
        .unwrap()
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, f) = nelder_mead(&[3.0, -2.0], 0.5, NelderMeadOptions::default(), |v| {
            (v[0] - 1.0).powi(2) + 4.0 * (v[1] + 0.5).powi(2)
        });
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4);
        assert!(f < 1e-8);
    }

    #[test]
    fn max_min_distance_matches_dense_sampling() {
        let line = reference_territory().vertices().to_vec();
        let sites = [Point2::new(3.0, 10.0), Point2::new(-10.0, -2.0), Point2::new(5.0, -8.0)];
        let exact = polyline_max_min_distance(&line, &sites);
        let mut sampled: f64 = 0.0;
        for i in 0..line.len() {
            let a = line[i];
            let b = line[(i + 1) % line.len()];
            for k in 0..=20_000 {
                let p = a.lerp(b, k as f64 / 20_000.0);
                let d = sites.iter().map(|s| s.dist(p)).fold(f64::INFINITY, f64::min);
                sampled = sampled.max(d);
            }
        }
        assert!(exact >= sampled - 1e-12);
        assert!(exact - sampled < 1e-2);
    }

    #[test]
    fn empty_sites_are_infinitely_far() {
        assert!(polyline_max_min_distance(&[Point2::default()], &[]).is_infinite());
    }

    #[test]
    fn square_single_station_is_centered() {
        let (layout, obj) = place_reserve_stations(&square(1.0), 1, 20, 7).unwrap();
        assert!(layout.stations[0].norm() < 1e-3, "{}", layout.stations[0]);
        assert!((obj - 2f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn rejects_zero_counts() {
        assert_eq!(
            place_reserve_stations(&square(1.0), 0, 10, 0),
            Err(DesignError::ZeroCount("n_stations"))
        );
        assert!(place_reserve_stations(&square(1.0), 1, 0, 0).is_err());
    }

    #[test]
    fn placement_is_seed_deterministic() {
        let t = reference_territory();
        let a = place_reserve_stations(&t, 2, 16, 99).unwrap();
        let b = place_reserve_stations(&t, 2, 16, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, 0), sub_seed(1, 1));
        assert_ne!(sub_seed(1, 0), sub_seed(2, 0));
    }
}
