//! Convex territory primitives.
//!
//! The territory is a strictly convex polygon stored counter-clockwise. Points
//! on its boundary are addressed by arc length measured from vertex 0, which is
//! what the perimeter arithmetic (`arc_distance`, arrival-point interpolation)
//! works in.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance (meters) for "on the perimeter".
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("polygon is not strictly convex at vertex {0}")]
    NotConvex(usize),
    #[error("point ({x}, {y}) lies inside the territory")]
    InsideTerritory { x: f64, y: f64 },
    #[error("intruder has no usable speed for arrival-time estimation")]
    NoSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Self::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Heading of this vector in `[0, 2π)`.
    pub fn heading(self) -> f64 {
        wrap_angle(self.y.atan2(self.x))
    }

    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Signed smallest difference `to - from` in `(-π, π]`.
pub fn angle_diff(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

/// Shoelace signed area of a closed polyline (positive when counter-clockwise).
pub fn signed_area(points: &[Point2]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| points[i].cross(points[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// A point on the territory boundary together with its arc-length coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterPoint {
    pub point: Point2,
    pub arclen: f64,
}

/// A strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    /// `cumulative[i]` is the arc length at vertex `i`; one extra entry holds the perimeter.
    cumulative: Vec<f64>,
    area: f64,
    centroid: Point2,
}

impl TryFrom<Vec<Point2>> for ConvexPolygon {
    type Error = GeometryError;
    fn try_from(v: Vec<Point2>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ConvexPolygon> for Vec<Point2> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

impl ConvexPolygon {
    /// Builds the polygon, reorienting clockwise input to counter-clockwise.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(GeometryError::NotConvex(i));
            }
        }

        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..n {
            acc += vertices[i].dist(vertices[(i + 1) % n]);
            cumulative.push(acc);
        }
        let area = signed_area(&vertices);
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        let centroid = Point2::new(cx / (6.0 * area), cy / (6.0 * area));

        Ok(Self {
            vertices,
            cumulative,
            area,
            centroid,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.cumulative[self.vertices.len()]
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        self.centroid
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Axis-aligned bounds as `(min, max)`.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    /// Signed distance of `p` to the supporting line of the nearest-violated
    /// edge: positive outside, negative inside (the depth of the shallowest edge).
    fn max_edge_offset(&self, p: Point2) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                let e = b - a;
                -e.cross(p - a) / e.norm()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True iff `p` is inside or on the boundary (within [`BOUNDARY_TOL`]).
    pub fn contains(&self, p: Point2) -> bool {
        self.max_edge_offset(p) <= BOUNDARY_TOL
    }

    /// True iff `p` is strictly inside, farther than the tolerance from the boundary.
    pub fn strictly_contains(&self, p: Point2) -> bool {
        self.max_edge_offset(p) < -BOUNDARY_TOL
    }

    /// Point at arc length `s` (wrapped into `[0, perimeter)`).
    pub fn point_at(&self, s: f64) -> Point2 {
        let s = self.wrap_arclen(s);
        let i = self.edge_index(s);
        let (a, b) = self.edge(i);
        let len = self.cumulative[i + 1] - self.cumulative[i];
        a.lerp(b, (s - self.cumulative[i]) / len)
    }

    pub fn perimeter_point(&self, s: f64) -> PerimeterPoint {
        let s = self.wrap_arclen(s);
        PerimeterPoint {
            point: self.point_at(s),
            arclen: s,
        }
    }

    pub fn wrap_arclen(&self, s: f64) -> f64 {
        let l = self.perimeter();
        let w = s.rem_euclid(l);
        if w >= l {
            0.0
        } else {
            w
        }
    }

    fn edge_index(&self, s: f64) -> usize {
        let n = self.len();
        match self.cumulative[..n].binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Closest boundary point to any `p` (inside or outside).
    pub fn closest_boundary_point(&self, p: Point2) -> PerimeterPoint {
        let mut best = (f64::INFINITY, Point2::default(), 0.0);
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let e = b - a;
            let len2 = e.dot(e);
            let t = ((p - a).dot(e) / len2).clamp(0.0, 1.0);
            let q = a + e * t;
            let d = p.dist(q);
            if d < best.0 {
                best = (d, q, self.cumulative[i] + t * len2.sqrt());
            }
        }
        PerimeterPoint {
            point: best.1,
            arclen: self.wrap_arclen(best.2),
        }
    }

    /// Euclidean projection of an exterior point onto the boundary.
    pub fn project_to_perimeter(&self, p: Point2) -> Result<PerimeterPoint, GeometryError> {
        if self.strictly_contains(p) {
            return Err(GeometryError::InsideTerritory { x: p.x, y: p.y });
        }
        Ok(self.closest_boundary_point(p))
    }

    /// Distance from `p` to the territory (zero inside).
    pub fn distance_to(&self, p: Point2) -> f64 {
        if self.contains(p) {
            0.0
        } else {
            p.dist(self.closest_boundary_point(p).point)
        }
    }

    /// `p` itself when inside, otherwise its closest boundary point.
    pub fn clamp_inside(&self, p: Point2) -> Point2 {
        if self.contains(p) {
            p
        } else {
            self.closest_boundary_point(p).point
        }
    }

    /// All parameters `t >= 0` where the ray `origin + t·dir` meets the boundary,
    /// sorted ascending and paired with the hit's arc length.
    fn ray_hits(&self, origin: Point2, dir: Point2) -> Vec<(f64, f64)> {
        let mut hits = Vec::new();
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let e = b - a;
            let denom = dir.cross(e);
            if denom.abs() < 1e-15 {
                continue;
            }
            let w = a - origin;
            let t = w.cross(e) / denom;
            let u = w.cross(dir) / denom;
            if t >= 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                let u = u.clamp(0.0, 1.0);
                hits.push((t, self.cumulative[i] + u * e.norm()));
            }
        }
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        hits
    }

    /// First boundary point hit by the ray from an exterior `origin`.
    pub fn ray_perimeter_intersection(&self, origin: Point2, heading: f64) -> Option<PerimeterPoint> {
        let dir = Point2::from_polar(1.0, heading);
        self.ray_hits(origin, dir)
            .first()
            .map(|&(_, s)| self.perimeter_point(s))
    }

    /// Boundary point where a ray from an interior `origin` leaves the polygon.
    pub fn exit_point(&self, origin: Point2, heading: f64) -> Option<PerimeterPoint> {
        let dir = Point2::from_polar(1.0, heading);
        self.ray_hits(origin, dir)
            .last()
            .map(|&(_, s)| self.perimeter_point(s))
    }

    /// Length of the shorter perimeter arc between two arc-length coordinates.
    pub fn arc_distance(&self, a: f64, b: f64) -> f64 {
        let l = self.perimeter();
        let d = (self.wrap_arclen(a) - self.wrap_arclen(b)).abs();
        d.min(l - d)
    }
}

/// How a task's arrival point is predicted from an intruder's state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Predictor {
    /// Blend of velocity-ray crossing and projection, split by the distance ratio.
    #[default]
    Eq2,
    /// Pure velocity extrapolation, falling back to projection.
    Velocity,
}

impl std::str::FromStr for Predictor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eq2" => Ok(Self::Eq2),
            "velocity" => Ok(Self::Velocity),
            other => Err(format!("unknown predictor `{other}` (expected eq2 or velocity)")),
        }
    }
}

/// Predicted boundary crossing of an intruder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub point: PerimeterPoint,
    /// Seconds from now.
    pub time: f64,
    /// Where the velocity ray meets the boundary, if it does.
    pub velocity_hit: Option<PerimeterPoint>,
    pub projection: PerimeterPoint,
}

/// Predicts where and when an exterior intruder reaches the boundary.
///
/// The velocity-ray crossing `p1` and the projection `p2` bound the prediction;
/// the returned point sits on the shorter arc between them, dividing it in the
/// ratio `‖p1 − p‖ : ‖p2 − p‖`. Time is straight-line distance over current
/// speed, or over `v_max` when the intruder is slower than `0.1·v_max`.
pub fn arrival_point(
    poly: &ConvexPolygon,
    pos: Point2,
    vel: Point2,
    v_max: f64,
    predictor: Predictor,
) -> Result<Arrival, GeometryError> {
    let projection = poly.project_to_perimeter(pos)?;
    let speed = vel.norm();
    let divisor = if speed >= 0.1 * v_max && speed > 0.0 {
        speed
    } else if v_max > 0.0 {
        v_max
    } else {
        return Err(GeometryError::NoSpeed);
    };
    let velocity_hit = if speed > 0.0 {
        poly.ray_perimeter_intersection(pos, vel.heading())
    } else {
        None
    };

    let point = match (velocity_hit, predictor) {
        (None, _) => projection,
        (Some(hit), Predictor::Velocity) => hit,
        (Some(hit), Predictor::Eq2) => {
            let d1 = hit.point.dist(pos);
            let d2 = projection.point.dist(pos);
            let l = poly.perimeter();
            let fwd = (projection.arclen - hit.arclen).rem_euclid(l);
            let frac = if d1 + d2 > 0.0 { d1 / (d1 + d2) } else { 0.0 };
            if fwd <= l - fwd {
                poly.perimeter_point(hit.arclen + fwd * frac)
            } else {
                poly.perimeter_point(hit.arclen - (l - fwd) * frac)
            }
        }
    };

    Ok(Arrival {
        point,
        time: point.point.dist(pos) / divisor,
        velocity_hit,
        projection,
    })
}

/// The territory used throughout the reference scenario (area 1600 m²).
pub fn reference_territory() -> ConvexPolygon {
    ConvexPolygon::new(vec![
        Point2::new(20.0, 0.0),
        Point2::new(10.0, 30.0),
        Point2::new(-20.0, 20.0),
        Point2::new(-30.0, -10.0),
        Point2::new(0.0, -20.0),
    ])
    .expect("reference territory is convex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn centered_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(-0.5, -0.5),
            Point2::new(0.5, -0.5),
            Point2::new(0.5, 0.5),
            Point2::new(-0.5, 0.5),
        ])
        .unwrap()
    }

    #[test]
    fn contains_square_and_reference() {
        let sq = unit_square();
        assert!(sq.contains(Point2::new(0.5, 0.5)));
        assert!(!sq.contains(Point2::new(2.0, 0.0)));
        assert!(sq.contains(Point2::new(1.0, 0.3)));
        assert!(reference_territory().contains(Point2::new(-7.5, 7.5)));
    }

    #[test]
    fn cached_measures() {
        let t = reference_territory();
        assert!((t.area() - 1600.0).abs() < 1e-9);
        let direct: f64 = (0..t.len()).map(|i| {
            let (a, b) = t.edge(i);
            a.dist(b)
        }).sum();
        assert!((t.perimeter() - direct).abs() < 1e-12);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let cw = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(cw.area() > 0.0);
        assert!((cw.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_polygons() {
        assert_eq!(
            ConvexPolygon::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]),
            Err(GeometryError::TooFewVertices(2))
        );
        let dart = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.2),
            Point2::new(1.0, 2.0),
        ]);
        assert!(matches!(dart, Err(GeometryError::NotConvex(_))));
        let collinear = ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 1.0),
        ]);
        assert!(matches!(collinear, Err(GeometryError::NotConvex(_))));
        let nan = ConvexPolygon::new(vec![
            Point2::new(0.0, f64::NAN),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
        ]);
        assert_eq!(nan, Err(GeometryError::NonFinite(0)));
    }

    #[test]
    fn projection_examples() {
        let sq = centered_square();
        let p = sq.project_to_perimeter(Point2::new(2.0, 0.0)).unwrap();
        assert!(p.point.dist(Point2::new(0.5, 0.0)) < 1e-12);

        let on = Point2::new(0.5, 0.2);
        let q = sq.project_to_perimeter(on).unwrap();
        assert!(q.point.dist(on) < 1e-12);

        assert!(matches!(
            sq.project_to_perimeter(Point2::new(0.0, 0.0)),
            Err(GeometryError::InsideTerritory { .. })
        ));
    }

    #[test]
    fn perimeter_point_round_trip() {
        let t = reference_territory();
        for k in 0..50 {
            let s = t.perimeter() * k as f64 / 50.0;
            let p = t.point_at(s);
            let back = t.closest_boundary_point(p);
            assert!(back.point.dist(p) < 1e-9);
            assert!(t.arc_distance(back.arclen, s) < 1e-9);
        }
    }

    #[test]
    fn ray_examples() {
        let sq = centered_square();
        let hit = sq.ray_perimeter_intersection(Point2::new(2.0, 0.0), PI).unwrap();
        assert!(hit.point.dist(Point2::new(0.5, 0.0)) < 1e-12);
        assert!(sq.ray_perimeter_intersection(Point2::new(2.0, 0.0), 0.0).is_none());
        assert!(sq
            .ray_perimeter_intersection(Point2::new(2.0, 0.0), FRAC_PI_2)
            .is_none());
    }

    #[test]
    fn arc_distance_examples() {
        let sq = unit_square();
        assert_eq!(sq.arc_distance(0.7, 0.7), 0.0);
        // midpoints of the bottom and right edges
        assert!((sq.arc_distance(0.5, 1.5) - 1.0).abs() < 1e-12);
        assert!((sq.arc_distance(0.0, 2.0) - 2.0).abs() < 1e-12);
        assert!((sq.arc_distance(3.5, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn arrival_aimed_at_projection() {
        let sq = centered_square();
        let a = arrival_point(&sq, Point2::new(2.0, 0.0), Point2::new(-3.0, 0.0), 3.0, Predictor::Eq2)
            .unwrap();
        assert!(a.point.point.dist(Point2::new(0.5, 0.0)) < 1e-12);
        assert!((a.time - 0.5).abs() < 1e-12);
    }

    #[test]
    fn arrival_splits_arc_by_distance_ratio() {
        let sq = centered_square();
        let pos = Point2::new(2.0, 0.0);
        // aimed at (0.5, 0.3): p1 = (0.5, 0.3), p2 = (0.5, 0)
        let vel = (Point2::new(0.5, 0.3) - pos) * 2.0;
        let a = arrival_point(&sq, pos, vel, 3.0, Predictor::Eq2).unwrap();
        let d1 = pos.dist(Point2::new(0.5, 0.3));
        let d2 = 1.5;
        let y = 0.3 * d2 / (d1 + d2);
        assert!(a.point.point.dist(Point2::new(0.5, y)) < 1e-12);
        let l1 = 0.3 - y;
        let l2 = y;
        assert!((l1 / l2 - d1 / d2).abs() < 1e-9);
    }

    #[test]
    fn arrival_heading_away_falls_back_to_projection() {
        let sq = centered_square();
        let a = arrival_point(&sq, Point2::new(2.0, 0.0), Point2::new(3.0, 0.0), 3.0, Predictor::Eq2)
            .unwrap();
        assert!(a.velocity_hit.is_none());
        assert!(a.point.point.dist(Point2::new(0.5, 0.0)) < 1e-12);
        assert!((a.time - 0.5).abs() < 1e-12);
    }

    #[test]
    fn slow_intruder_uses_max_speed() {
        let sq = centered_square();
        let a = arrival_point(&sq, Point2::new(2.0, 0.0), Point2::new(-0.1, 0.0), 3.0, Predictor::Eq2)
            .unwrap();
        assert!((a.time - 0.5).abs() < 1e-12);
        assert_eq!(
            arrival_point(&sq, Point2::new(2.0, 0.0), Point2::default(), 0.0, Predictor::Eq2),
            Err(GeometryError::NoSpeed)
        );
        assert!(arrival_point(&sq, Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 3.0, Predictor::Eq2)
            .is_err());
    }

    #[test]
    fn velocity_predictor_uses_ray_hit() {
        let sq = centered_square();
        let pos = Point2::new(2.0, 0.0);
        let vel = Point2::new(-1.5, 0.3) * 2.0;
        let a = arrival_point(&sq, pos, vel, 3.0, Predictor::Velocity).unwrap();
        assert_eq!(a.point, a.velocity_hit.unwrap());
    }

    #[test]
    fn angle_helpers() {
        assert!((angle_diff(0.1, 2.0 * PI - 0.1) + 0.2).abs() < 1e-12);
        assert!((wrap_angle(-FRAC_PI_2) - 1.5 * PI).abs() < 1e-12);
        assert!(wrap_angle(2.0 * PI) < 2.0 * PI);
    }
}
