//! Zero level sets of the factor fields, traced by bisection along rays.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::factor::FactorField;
use super::DesignError;
use crate::geometry::{angle_diff, signed_area, ConvexPolygon, Point2};

/// Minimum number of rays accepted by [`region_boundary`].
pub const MIN_RAYS: usize = 64;

const BISECT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Priority,
    Monitoring,
}

/// Polygonal approximation of a region's outer boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionApprox {
    /// Closed, counter-clockwise; the last vertex connects back to the first.
    pub boundary: Vec<Point2>,
    /// Angular spacing of the rays, radians.
    pub resolution: f64,
    pub kind: RegionKind,
}

impl RegionApprox {
    /// Boundary length of the closed polyline.
    pub fn length(&self) -> f64 {
        polyline_length(&self.boundary)
    }

    /// Largest distance of a boundary vertex from `center`.
    pub fn max_radius(&self, center: Point2) -> f64 {
        self.boundary
            .iter()
            .map(|p| p.dist(center))
            .fold(0.0, f64::max)
    }

    /// Point-in-polygon test (the boundary is star-shaped, not necessarily convex).
    pub fn contains(&self, p: Point2) -> bool {
        let n = self.boundary.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.boundary[i];
            let b = self.boundary[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Traces `{factor ≥ 0}` along `ray_count` equally spaced rays from the
/// territory centroid, starting at the ray's exit point from the territory.
pub fn region_boundary(
    field: &FactorField,
    ratio: f64,
    ray_count: usize,
    kind: RegionKind,
) -> Result<RegionApprox, DesignError> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(DesignError::InvalidParameter(format!(
            "factor ratio must be positive and finite, got {ratio}"
        )));
    }
    if ray_count < MIN_RAYS {
        return Err(DesignError::RayCountTooSmall(ray_count));
    }
    let poly = field.territory();
    let center = poly.centroid();
    let diameter = poly.diameter();
    let step = diameter / 20.0;
    let reach = 10.0 * diameter;
    let resolution = std::f64::consts::TAU / ray_count as f64;

    let boundary = (0..ray_count)
        .into_par_iter()
        .map(|k| {
            let heading = k as f64 * resolution;
            let dir = Point2::from_polar(1.0, heading);
            let exit = poly
                .exit_point(center, heading)
                .ok_or(DesignError::NotStarShaped { ray: k })?
                .point;
            let f = |t: f64| field.evaluate(exit + dir * t, ratio);
            if f(0.0) < -1e-9 {
                return Err(DesignError::NotStarShaped { ray: k });
            }
            let mut lo = 0.0;
            let mut hi = step;
            while f(hi) >= 0.0 {
                lo = hi;
                hi += step;
                if hi > reach {
                    return Err(DesignError::NoSignChange { ray: k });
                }
            }
            while hi - lo > BISECT_TOL {
                let mid = 0.5 * (lo + hi);
                if f(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(exit + dir * lo)
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(RegionApprox {
        boundary,
        resolution,
        kind,
    })
}

/// Area between the region boundary and the territory.
pub fn region_area(region: &RegionApprox, poly: &ConvexPolygon) -> f64 {
    signed_area(&region.boundary) - poly.area()
}

fn polyline_length(points: &[Point2]) -> f64 {
    let n = points.len();
    (0..n).map(|i| points[i].dist(points[(i + 1) % n])).sum()
}

/// Point at arc length `s` along the closed polyline starting at vertex `start`.
fn walk(points: &[Point2], start: usize, mut s: f64) -> Point2 {
    let n = points.len();
    let mut i = start;
    loop {
        let a = points[i % n];
        let b = points[(i + 1) % n];
        let len = a.dist(b);
        if s <= len || i >= start + n {
            return if len > 0.0 { a.lerp(b, (s / len).min(1.0)) } else { a };
        }
        s -= len;
        i += 1;
    }
}

/// Kink vertices of the boundary plus evenly spaced fill-ins so that
/// consecutive critical points are at most `max_spacing` apart along it.
pub fn critical_points(region: &RegionApprox, kink_threshold: f64, max_spacing: f64) -> Vec<Point2> {
    let pts = &region.boundary;
    let n = pts.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![pts[0]];
    }
    let kinks: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = pts[(i + n - 1) % n];
            let next = pts[(i + 1) % n];
            let (d_in, d_out) = (pts[i] - prev, next - pts[i]);
            d_in.norm() > 0.0
                && d_out.norm() > 0.0
                && angle_diff(d_in.heading(), d_out.heading()).abs() > kink_threshold
        })
        .collect();

    let total = polyline_length(pts);
    let fill = |span: f64| -> usize {
        if max_spacing > 0.0 && span > 0.0 {
            ((span / max_spacing - 1e-9).ceil() as usize).saturating_sub(1)
        } else {
            0
        }
    };

    if kinks.is_empty() {
        let count = if max_spacing > 0.0 {
            ((total / max_spacing - 1e-9).ceil() as usize).max(1)
        } else {
            1
        };
        return (0..count)
            .map(|k| walk(pts, 0, total * k as f64 / count as f64))
            .collect();
    }

    let mut out = Vec::new();
    for (idx, &k) in kinks.iter().enumerate() {
        let next = kinks[(idx + 1) % kinks.len()];
        let span: f64 = if kinks.len() == 1 {
            total
        } else {
            let mut len = 0.0;
            let mut i = k;
            while i != next {
                len += pts[i].dist(pts[(i + 1) % n]);
                i = (i + 1) % n;
            }
            len
        };
        out.push(pts[k]);
        let extra = fill(span);
        for j in 1..=extra {
            out.push(walk(pts, k, span * j as f64 / (extra + 1) as f64));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::reference_territory;
    use crate::static_design::placement::ReserveLayout;

    fn circle(n: usize, r: f64) -> RegionApprox {
        RegionApprox {
            boundary: (0..n)
                .map(|k| Point2::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64))
                .collect(),
            resolution: std::f64::consts::TAU / n as f64,
            kind: RegionKind::Monitoring,
        }
    }

    #[test]
    fn kink_free_boundary_is_spaced_only() {
        let c = circle(720, 10.0);
        let quarter = std::f64::consts::TAU * 10.0 / 4.0;
        assert_eq!(critical_points(&c, 10f64.to_radians(), quarter).len(), 4);
    }

    #[test]
    fn sharp_pentagon_yields_its_vertices() {
        let t = reference_territory();
        let region = RegionApprox {
            boundary: t.vertices().to_vec(),
            resolution: 0.1,
            kind: RegionKind::Priority,
        };
        let pts = critical_points(&region, 10f64.to_radians(), 1e6);
        assert_eq!(pts, t.vertices().to_vec());
    }

    #[test]
    fn spacing_fill_between_kinks() {
        let t = reference_territory();
        let region = RegionApprox {
            boundary: t.vertices().to_vec(),
            resolution: 0.1,
            kind: RegionKind::Priority,
        };
        let pts = critical_points(&region, 10f64.to_radians(), 5.0);
        let n = pts.len();
        for i in 0..n {
            assert!(pts[i].dist(pts[(i + 1) % n]) <= 5.0 + 1e-9);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let t = reference_territory();
        let field = FactorField::new(&t, &ReserveLayout::new(vec![Point2::new(-7.5, 7.5)]));
        assert_eq!(
            region_boundary(&field, 1.0, 16, RegionKind::Priority),
            Err(DesignError::RayCountTooSmall(16))
        );
        assert!(region_boundary(&field, 0.0, 64, RegionKind::Priority).is_err());
    }

    #[test]
    fn fast_defenders_hug_the_territory() {
        let t = reference_territory();
        let field = FactorField::new(&t, &ReserveLayout::new(vec![Point2::new(-7.5, 7.5)]));
        let region = region_boundary(&field, 1e4, 128, RegionKind::Priority).unwrap();
        for p in &region.boundary {
            assert!(t.distance_to(*p) < 1e-2);
        }
        assert!(region_area(&region, &t) < 5.0);
    }

    #[test]
    fn contains_matches_region_shape() {
        let c = circle(256, 10.0);
        assert!(c.contains(Point2::new(9.0, 0.0)));
        assert!(!c.contains(Point2::new(0.0, 10.5)));
    }
}
