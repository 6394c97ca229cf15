//! Priority and monitoring factor fields.
//!
//! For an exterior point `p` and speed ratio `r` the factor is
//! `max over s on the perimeter of (distance from s to its nearest reserve
//! station) − r·‖p − s‖`. Nonnegative means some perimeter point is reached by
//! an intruder starting at `p` before any freshly deployed reserve defender.

use super::placement::ReserveLayout;
use crate::geometry::{ConvexPolygon, Point2};

/// Default number of perimeter samples used before local refinement.
pub const DEFAULT_FACTOR_SAMPLES: usize = 2000;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const REFINE_ITERS: usize = 48;

/// Precomputed perimeter samples and their reserve distances for one
/// territory/layout pair. Evaluation is cheap enough to call per ray step.
#[derive(Debug, Clone)]
pub struct FactorField {
    poly: ConvexPolygon,
    stations: Vec<Point2>,
    arclens: Vec<f64>,
    samples: Vec<Point2>,
    reserve_dist: Vec<f64>,
    spacing: f64,
}

impl FactorField {
    pub fn new(poly: &ConvexPolygon, layout: &ReserveLayout) -> Self {
        Self::with_samples(poly, layout, DEFAULT_FACTOR_SAMPLES)
    }

    pub fn with_samples(poly: &ConvexPolygon, layout: &ReserveLayout, n_samples: usize) -> Self {
        let n_samples = n_samples.max(poly.len());
        let spacing = poly.perimeter() / n_samples as f64;
        let mut arclens: Vec<f64> = (0..n_samples).map(|k| k as f64 * spacing).collect();
        // vertices are where the reserve distance usually peaks
        let mut s = 0.0;
        for i in 0..poly.len() {
            arclens.push(s);
            let (a, b) = poly.edge(i);
            s += a.dist(b);
        }
        arclens.sort_by(f64::total_cmp);
        arclens.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let samples: Vec<Point2> = arclens.iter().map(|&s| poly.point_at(s)).collect();
        let stations = layout.stations.clone();
        let reserve_dist = samples.iter().map(|&q| nearest_distance(&stations, q)).collect();
        Self {
            poly: poly.clone(),
            stations,
            arclens,
            samples,
            reserve_dist,
            spacing,
        }
    }

    pub fn territory(&self) -> &ConvexPolygon {
        &self.poly
    }

    pub fn stations(&self) -> &[Point2] {
        &self.stations
    }

    /// Distance from `q` to the nearest reserve station.
    pub fn reserve_distance(&self, q: Point2) -> f64 {
        nearest_distance(&self.stations, q)
    }

    /// Factor value at `p` for effective speed ratio `ratio`.
    pub fn evaluate(&self, p: Point2, ratio: f64) -> f64 {
        let mut best_k = 0;
        let mut best = f64::NEG_INFINITY;
        for (k, (&q, &d)) in self.samples.iter().zip(&self.reserve_dist).enumerate() {
            let v = d - ratio * p.dist(q);
            if v > best {
                best = v;
                best_k = k;
            }
        }
        let g = |s: f64| {
            let q = self.poly.point_at(s);
            self.reserve_distance(q) - ratio * p.dist(q)
        };
        let center = self.arclens[best_k];
        let (mut lo, mut hi) = (center - self.spacing, center + self.spacing);
        let mut x1 = hi - GOLDEN * (hi - lo);
        let mut x2 = lo + GOLDEN * (hi - lo);
        let (mut f1, mut f2) = (g(x1), g(x2));
        for _ in 0..REFINE_ITERS {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + GOLDEN * (hi - lo);
                f2 = g(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - GOLDEN * (hi - lo);
                f1 = g(x1);
            }
        }
        best.max(f1).max(f2)
    }

    /// Priority factor at speed ratio `gamma`.
    pub fn priority(&self, p: Point2, gamma: f64) -> f64 {
        self.evaluate(p, gamma)
    }

    /// Monitoring factor: the priority factor at the reduced ratio `gamma / beta`.
    pub fn monitoring(&self, p: Point2, gamma: f64, beta: f64) -> f64 {
        self.priority(p, gamma / beta)
    }
}

fn nearest_distance(stations: &[Point2], q: Point2) -> f64 {
    stations
        .iter()
        .map(|s| s.dist(q))
        .fold(f64::INFINITY, f64::min)
}

/// One-off priority factor evaluation. Build a [`FactorField`] when evaluating
/// many points.
pub fn priority_factor(poly: &ConvexPolygon, layout: &ReserveLayout, gamma: f64, p: Point2) -> f64 {
    FactorField::new(poly, layout).priority(p, gamma)
}

/// One-off monitoring factor evaluation.
pub fn monitoring_factor(
    poly: &ConvexPolygon,
    layout: &ReserveLayout,
    gamma: f64,
    beta: f64,
    p: Point2,
) -> f64 {
    FactorField::new(poly, layout).monitoring(p, gamma, beta)
}
