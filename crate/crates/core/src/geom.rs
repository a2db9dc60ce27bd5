//! Planar geometry kernel: poses, reference-line primitives, sampling and
//! clearance queries.
//!
//! Angles are radians, counterclockwise positive, heading 0 along +x, and
//! normalized to the half-open interval (-pi, pi]. All values are meters.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default arc-length sampling step for overlap checks and analysis.
pub const DEFAULT_SAMPLE_STEP: f64 = 0.5;

/// Normalize an angle into (-pi, pi].
///
/// Panics on non-finite input; angles are internal quantities and a NaN here
/// is always a caller bug.
pub fn normalize_angle(a: f64) -> f64 {
    assert!(a.is_finite(), "angle must be finite, got {a}");
    let mut r = a.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

/// A point in the local Cartesian plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        assert!(
            x.is_finite() && y.is_finite(),
            "point coordinates must be finite, got ({x}, {y})"
        );
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Bearing of `other` as seen from `self`. Zero for coincident points.
    pub fn bearing_to(self, other: Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }

    /// The point `distance` away along `heading`.
    pub fn offset(self, distance: f64, heading: f64) -> Point {
        Point::new(
            self.x + distance * heading.cos(),
            self.y + distance * heading.sin(),
        )
    }
}

/// Rotate `p` counterclockwise by `phi` about `pivot`.
pub fn rotate_about(p: Point, pivot: Point, phi: f64) -> Point {
    let (s, c) = phi.sin_cos();
    let dx = p.x - pivot.x;
    let dy = p.y - pivot.y;
    Point::new(pivot.x + c * dx - s * dy, pivot.y + s * dx + c * dy)
}

/// A position plus a travel direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Point,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose {
            position: Point::new(x, y),
            heading: normalize_angle(heading),
        }
    }

    pub fn from_point(position: Point, heading: f64) -> Self {
        Pose {
            position,
            heading: normalize_angle(heading),
        }
    }

    pub fn rotated_about(&self, pivot: Point, phi: f64) -> Pose {
        Pose {
            position: rotate_about(self.position, pivot, phi),
            heading: normalize_angle(self.heading + phi),
        }
    }
}

// 16-node Gauss-Legendre rule on [-1, 1], used for parametric-cubic arc length.
const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

fn cubic_speed(u: &[f64; 4], v: &[f64; 4], t: f64) -> f64 {
    let du = (3.0 * u[3] * t + 2.0 * u[2]) * t + u[1];
    let dv = (3.0 * v[3] * t + 2.0 * v[2]) * t + v[1];
    du.hypot(dv)
}

fn cubic_arc_length(u: &[f64; 4], v: &[f64; 4]) -> f64 {
    // Integrate |P'(t)| over [0, 1].
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL16_W[i]
            * (cubic_speed(u, v, 0.5 * (1.0 - GL16_X[i])) + cubic_speed(u, v, 0.5 * (1.0 + GL16_X[i])));
    }
    0.5 * acc
}

/// One reference-line primitive of a road.
///
/// `ParamCubic` coefficients describe local-frame curves u(t), v(t) for
/// t in [0, 1], anchored at the start pose.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Line {
        start: Pose,
        length: f64,
    },
    Arc {
        start: Pose,
        length: f64,
        curvature: f64,
    },
    ParamCubic {
        start: Pose,
        length: f64,
        u: [f64; 4],
        v: [f64; 4],
    },
}

impl Geometry {
    pub fn line(start: Pose, length: f64) -> Self {
        assert!(length > 0.0, "geometry length must be positive, got {length}");
        Geometry::Line { start, length }
    }

    pub fn arc(start: Pose, length: f64, curvature: f64) -> Self {
        assert!(length > 0.0, "geometry length must be positive, got {length}");
        assert!(curvature != 0.0, "arc curvature must be nonzero");
        Geometry::Arc {
            start,
            length,
            curvature,
        }
    }

    /// Build a parametric cubic from local-frame coefficients; the length is
    /// computed by quadrature.
    pub fn param_cubic(start: Pose, u: [f64; 4], v: [f64; 4]) -> Self {
        let length = cubic_arc_length(&u, &v);
        assert!(length > 0.0, "parametric cubic has zero length");
        Geometry::ParamCubic {
            start,
            length,
            u,
            v,
        }
    }

    /// Rebuild a parsed parametric cubic, keeping the document's length field.
    pub fn param_cubic_with_length(start: Pose, length: f64, u: [f64; 4], v: [f64; 4]) -> Self {
        assert!(length > 0.0, "geometry length must be positive, got {length}");
        Geometry::ParamCubic {
            start,
            length,
            u,
            v,
        }
    }

    pub fn start(&self) -> Pose {
        match *self {
            Geometry::Line { start, .. }
            | Geometry::Arc { start, .. }
            | Geometry::ParamCubic { start, .. } => start,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Geometry::Line { length, .. }
            | Geometry::Arc { length, .. }
            | Geometry::ParamCubic { length, .. } => length,
        }
    }

    pub fn end(&self) -> Pose {
        self.pose_at(1.0)
    }

    /// Pose at normalized parameter `t` in [0, 1]. For lines and arcs the
    /// parameter is proportional to arc length.
    pub fn pose_at(&self, t: f64) -> Pose {
        debug_assert!((-1e-9..=1.0 + 1e-9).contains(&t), "parameter out of range: {t}");
        match *self {
            Geometry::Line { start, length } => Pose {
                position: start.position.offset(t * length, start.heading),
                heading: start.heading,
            },
            Geometry::Arc {
                start,
                length,
                curvature,
            } => {
                let theta0 = start.heading;
                let theta1 = theta0 + curvature * t * length;
                Pose {
                    position: Point::new(
                        start.position.x + (theta1.sin() - theta0.sin()) / curvature,
                        start.position.y - (theta1.cos() - theta0.cos()) / curvature,
                    ),
                    heading: normalize_angle(theta1),
                }
            }
            Geometry::ParamCubic { start, u, v, .. } => {
                let lu = ((u[3] * t + u[2]) * t + u[1]) * t + u[0];
                let lv = ((v[3] * t + v[2]) * t + v[1]) * t + v[0];
                let du = (3.0 * u[3] * t + 2.0 * u[2]) * t + u[1];
                let dv = (3.0 * v[3] * t + 2.0 * v[2]) * t + v[1];
                let (s0, c0) = start.heading.sin_cos();
                Pose {
                    position: Point::new(
                        start.position.x + c0 * lu - s0 * lv,
                        start.position.y + s0 * lu + c0 * lv,
                    ),
                    heading: normalize_angle(start.heading + dv.atan2(du)),
                }
            }
        }
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.pose_at(t).position
    }

    /// Sample the primitive with parameter spacing no coarser than `step`
    /// meters. The first point is the start position, the last the analytic
    /// endpoint.
    pub fn sample(&self, step: f64) -> Polyline {
        Polyline::new(self.sample_poses(step).into_iter().map(|p| p.position).collect())
    }

    pub fn sample_poses(&self, step: f64) -> Vec<Pose> {
        assert!(step > 0.0, "sampling step must be positive, got {step}");
        let n = (self.length() / step).ceil().max(1.0) as usize;
        (0..=n).map(|i| self.pose_at(i as f64 / n as f64)).collect()
    }

    /// The same primitive rotated rigidly about `pivot`. Local-frame cubic
    /// coefficients ride along with the start pose.
    pub fn rotated_about(&self, pivot: Point, phi: f64) -> Geometry {
        match self {
            Geometry::Line { start, length } => Geometry::Line {
                start: start.rotated_about(pivot, phi),
                length: *length,
            },
            Geometry::Arc {
                start,
                length,
                curvature,
            } => Geometry::Arc {
                start: start.rotated_about(pivot, phi),
                length: *length,
                curvature: *curvature,
            },
            Geometry::ParamCubic { start, length, u, v } => Geometry::ParamCubic {
                start: start.rotated_about(pivot, phi),
                length: *length,
                u: *u,
                v: *v,
            },
        }
    }
}

// Tangent magnitude per unit chord that makes the Hermite reproduce a
// circular arc through the two poses: 1 in the straight limit, 2 at a
// half-turn.
fn tangent_scale(turn: f64) -> f64 {
    let a = turn.abs();
    if a < 1e-6 {
        1.0
    } else {
        2.0 * (a / 4.0).tan() / (a / 2.0).sin()
    }
}

/// Fit a parametric cubic joining two poses with G1 end conditions (cubic
/// Hermite in the start pose's local frame).
pub fn fit_param_cubic(start: Pose, end: Pose) -> Result<Geometry> {
    let dx = end.position.x - start.position.x;
    let dy = end.position.y - start.position.y;
    let chord = dx.hypot(dy);
    if chord < 1e-12 {
        return Err(Error::DegenerateInput(
            "cannot fit a cubic between coincident endpoints".into(),
        ));
    }
    let (s0, c0) = start.heading.sin_cos();
    let ex = c0 * dx + s0 * dy;
    let ey = -s0 * dx + c0 * dy;
    let psi = normalize_angle(end.heading - start.heading);
    let m = chord * tangent_scale(psi);
    let (t1y, t1x) = {
        let (s, c) = psi.sin_cos();
        (m * s, m * c)
    };
    // Hermite basis rewritten as polynomial coefficients, with P0 = (0, 0),
    // T0 = (m, 0), P1 = (ex, ey), T1 = (t1x, t1y).
    let u = [0.0, m, 3.0 * ex - 2.0 * m - t1x, -2.0 * ex + m + t1x];
    let v = [0.0, 0.0, 3.0 * ey - t1y, -2.0 * ey + t1y];
    Ok(Geometry::param_cubic(start, u, v))
}

/// An ordered chain of distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
}

impl Polyline {
    /// Build a polyline, dropping exactly-coincident consecutive points so
    /// every segment has positive length.
    pub fn new(points: Vec<Point>) -> Self {
        let mut pts: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        assert!(!pts.is_empty(), "polyline needs at least one point");
        Polyline { points: pts }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn first(&self) -> Point {
        self.points[0]
    }

    pub fn last(&self) -> Point {
        *self.points.last().unwrap()
    }

    /// Cumulative arc length.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    fn segments(&self) -> Vec<(Point, Point)> {
        if self.points.len() == 1 {
            vec![(self.points[0], self.points[0])]
        } else {
            self.points.windows(2).map(|w| (w[0], w[1])).collect()
        }
    }
}

/// Minimum Euclidean distance between two polylines (symmetric; zero when
/// they touch or cross).
pub fn min_clearance(a: &Polyline, b: &Polyline) -> f64 {
    min_clearance_impl(a, b, None)
}

/// Early-exit check that two polylines stay at least `threshold` apart.
pub fn clearance_at_least(a: &Polyline, b: &Polyline, threshold: f64) -> bool {
    min_clearance_impl(a, b, Some(threshold)) >= threshold
}

fn min_clearance_impl(a: &Polyline, b: &Polyline, cutoff: Option<f64>) -> f64 {
    let seg_a = a.segments();
    let seg_b = b.segments();
    let b_bounds = b.bounds();
    let mut best = f64::INFINITY;
    for &(a1, a2) in &seg_a {
        let abox = seg_bounds(a1, a2);
        if bounds_distance(abox, b_bounds) >= best {
            continue;
        }
        for &(b1, b2) in &seg_b {
            if bounds_distance(abox, seg_bounds(b1, b2)) >= best {
                continue;
            }
            let d = segment_distance(a1, a2, b1, b2);
            if d < best {
                best = d;
                if let Some(c) = cutoff {
                    if best < c {
                        return best;
                    }
                }
            }
        }
    }
    best
}

fn seg_bounds(a: Point, b: Point) -> (Point, Point) {
    (
        Point::new(a.x.min(b.x), a.y.min(b.y)),
        Point::new(a.x.max(b.x), a.y.max(b.y)),
    )
}

fn bounds_distance(a: (Point, Point), b: (Point, Point)) -> f64 {
    let dx = (a.0.x - b.1.x).max(b.0.x - a.1.x).max(0.0);
    let dy = (a.0.y - b.1.y).max(b.0.y - a.1.y).max(0.0);
    dx.hypot(dy)
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    // Proper crossings only; touching configurations fall out of the
    // point-to-segment distances as zeros.
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let vx = b.x - a.x;
    let vy = b.y - a.y;
    let len2 = vx * vx + vy * vy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * vx, a.y + t * vy))
}

fn segment_distance(a1: Point, a2: Point, b1: Point, b2: Point) -> f64 {
    if segments_cross(a1, a2, b1, b2) {
        return 0.0;
    }
    point_segment_distance(a1, b1, b2)
        .min(point_segment_distance(a2, b1, b2))
        .min(point_segment_distance(b1, a1, a2))
        .min(point_segment_distance(b2, a1, a2))
}

/// True when the polylines properly cross (transversal interior
/// intersection); touching at endpoints does not count.
pub fn polylines_properly_cross(a: &Polyline, b: &Polyline) -> bool {
    for &(a1, a2) in &a.segments() {
        for &(b1, b2) in &b.segments() {
            if segments_cross(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

/// Heading of the tangent of a counterclockwise circle at polar angle `theta`.
pub fn ccw_tangent_heading(theta: f64) -> f64 {
    normalize_angle(theta + FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_identity_and_reduction() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(PI) - PI).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn normalize_rejects_non_finite() {
        normalize_angle(f64::NAN);
    }

    #[test]
    fn line_sampling_is_collinear() {
        let g = Geometry::line(Pose::new(0.0, 0.0, 0.0), 10.0);
        let pl = g.sample(1.0);
        assert_eq!(pl.points().len(), 11);
        for p in pl.points() {
            assert!(p.y.abs() < 1e-12);
        }
        assert!((pl.last().x - 10.0).abs() < 1e-12);
    }

    #[test]
    fn full_circle_arc_closes() {
        let r = 10.0;
        let g = Geometry::arc(Pose::new(0.0, 0.0, 0.0), TAU * r, 1.0 / r);
        let pl = g.sample(0.5);
        assert!(pl.last().distance(pl.first()) < 1e-6);
    }

    #[test]
    fn arc_endpoint_matches_closed_form() {
        // quarter arc, radius 10, starting east: ends at (10, 10) heading north
        let g = Geometry::arc(Pose::new(0.0, 0.0, 0.0), FRAC_PI_2 * 10.0, 0.1);
        let end = g.end();
        assert!(end.position.distance(Point::new(10.0, 10.0)) < 1e-9);
        assert!((end.heading - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "positive")]
    fn sampling_rejects_nonpositive_step() {
        Geometry::line(Pose::new(0.0, 0.0, 0.0), 1.0).sample(0.0);
    }

    #[test]
    fn hermite_collinear_degenerates_to_line() {
        let g = fit_param_cubic(Pose::new(0.0, 0.0, 0.0), Pose::new(10.0, 0.0, 0.0)).unwrap();
        for p in g.sample(0.1).points() {
            assert!(p.y.abs() < 1e-9);
        }
        assert!((g.length() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn hermite_hits_end_pose() {
        let start = Pose::new(0.0, 0.0, 0.0);
        let end = Pose::new(10.0, 10.0, FRAC_PI_2);
        let g = fit_param_cubic(start, end).unwrap();
        let got = g.end();
        assert!(got.position.distance(end.position) < 1e-6);
        assert!(normalize_angle(got.heading - end.heading).abs() < 1e-4);
        let s = g.start();
        assert!(s.position.distance(start.position) < 1e-9);
    }

    #[test]
    fn hermite_rejects_coincident_endpoints() {
        let e = fit_param_cubic(Pose::new(1.0, 2.0, 0.0), Pose::new(1.0, 2.0, 1.0));
        assert!(matches!(e, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn hermite_tracks_quarter_arc() {
        // poses taken from a true quarter-arc of radius 20; the fitted cubic
        // must stay within 1% of the radius of the analytic arc
        let r = 20.0;
        let center = Point::new(3.0, -2.0);
        let start = Pose::from_point(center.offset(r, 0.0), ccw_tangent_heading(0.0));
        let end = Pose::from_point(center.offset(r, FRAC_PI_2), ccw_tangent_heading(FRAC_PI_2));
        let g = fit_param_cubic(start, end).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=2000 {
            let p = g.point_at(i as f64 / 2000.0);
            worst = worst.max((p.distance(center) - r).abs());
        }
        assert!(worst < 0.2, "deviation from arc too large: {worst}");
    }

    #[test]
    fn clearance_parallel_segments() {
        let a = Polyline::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]);
        let b = Polyline::new(vec![Point::new(0.0, 3.0), Point::new(1.0, 3.0)]);
        assert!((min_clearance(&a, &b) - 3.0).abs() < 1e-12);
        assert!((min_clearance(&b, &a) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn clearance_crossing_segments_is_zero() {
        let a = Polyline::new(vec![Point::new(-1.0, -1.0), Point::new(1.0, 1.0)]);
        let b = Polyline::new(vec![Point::new(-1.0, 1.0), Point::new(1.0, -1.0)]);
        assert_eq!(min_clearance(&a, &b), 0.0);
    }

    #[test]
    #[should_panic(expected = "at least one point")]
    fn polyline_rejects_empty() {
        Polyline::new(vec![]);
    }

    #[test]
    fn rotate_quarter_turn() {
        let p = rotate_about(Point::new(1.0, 0.0), Point::new(0.0, 0.0), FRAC_PI_2);
        assert!(p.distance(Point::new(0.0, 1.0)) < 1e-12);
    }

    #[test]
    fn rotate_by_zero_is_identity() {
        let p = Point::new(3.7, -1.2);
        assert!(rotate_about(p, Point::new(1.0, 1.0), 0.0).distance(p) < 1e-12);
    }

    // Independent brute-force clearance oracle: every segment pair, exact
    // distances, no pruning; cross-checked by dense point sampling.
    fn oracle_min_clearance(a: &Polyline, b: &Polyline) -> f64 {
        let mut best = f64::INFINITY;
        for sa in a.segments() {
            for sb in b.segments() {
                best = best.min(segment_distance(sa.0, sa.1, sb.0, sb.1));
            }
        }
        best
    }

    fn sampled_min_distance(a: &Polyline, b: &Polyline, step: f64) -> f64 {
        let dense = |pl: &Polyline| -> Vec<Point> {
            let mut out = Vec::new();
            for w in pl.points().windows(2) {
                let n = (w[0].distance(w[1]) / step).ceil().max(1.0) as usize;
                for i in 0..n {
                    let t = i as f64 / n as f64;
                    out.push(Point::new(
                        w[0].x + t * (w[1].x - w[0].x),
                        w[0].y + t * (w[1].y - w[0].y),
                    ));
                }
            }
            out.push(pl.last());
            out
        };
        let pa = dense(a);
        let pb = dense(b);
        let mut best = f64::INFINITY;
        for p in &pa {
            for q in &pb {
                best = best.min(p.distance(*q));
            }
        }
        best
    }

    fn arb_polyline() -> impl Strategy<Value = Polyline> {
        proptest::collection::vec((-20.0..20.0f64, -20.0..20.0f64), 2..6)
            .prop_map(|pts| Polyline::new(pts.into_iter().map(|(x, y)| Point::new(x, y)).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn normalize_is_idempotent(a in -1e6..1e6f64) {
            let once = normalize_angle(a);
            prop_assert_eq!(normalize_angle(once), once);
            prop_assert!(once > -PI && once <= PI);
            // congruence modulo 2*pi
            prop_assert!(((a - once).rem_euclid(TAU)).min(TAU - (a - once).rem_euclid(TAU)) < 1e-6);
        }

        #[test]
        fn rotation_preserves_distances(
            (px, py, qx, qy, cx, cy) in (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64,
                                         -50.0..50.0f64, -10.0..10.0f64, -10.0..10.0f64),
            phi in -10.0..10.0f64,
        ) {
            let p = Point::new(px, py);
            let q = Point::new(qx, qy);
            let pivot = Point::new(cx, cy);
            let rp = rotate_about(p, pivot, phi);
            let rq = rotate_about(q, pivot, phi);
            prop_assert!((rp.distance(rq) - p.distance(q)).abs() < 1e-9);
            prop_assert!((rp.distance(pivot) - p.distance(pivot)).abs() < 1e-9);
            // inverse pair returns the original point
            let back = rotate_about(rp, pivot, -phi);
            prop_assert!(back.distance(p) < 1e-9);
        }

        #[test]
        fn hermite_boundary_conditions_hold(
            (x0, y0, h0) in (-50.0..50.0f64, -50.0..50.0f64, -PI..PI),
            (x1, y1, h1) in (-50.0..50.0f64, -50.0..50.0f64, -PI..PI),
        ) {
            prop_assume!((x1 - x0).hypot(y1 - y0) > 1e-3);
            let start = Pose::new(x0, y0, h0);
            let end = Pose::new(x1, y1, h1);
            let g = fit_param_cubic(start, end).unwrap();
            prop_assert!(g.pose_at(0.0).position.distance(start.position) < 1e-9);
            prop_assert!(normalize_angle(g.pose_at(0.0).heading - h0).abs() < 1e-6);
            prop_assert!(g.end().position.distance(end.position) < 1e-6);
            prop_assert!(normalize_angle(g.end().heading - end.heading).abs() < 1e-4);
        }

        #[test]
        fn clearance_matches_oracles(a in arb_polyline(), b in arb_polyline()) {
            let fast = min_clearance(&a, &b);
            let brute = oracle_min_clearance(&a, &b);
            prop_assert!((fast - brute).abs() < 1e-6, "fast={fast} brute={brute}");
            // dense point sampling brackets the true minimum from above
            let sampled = sampled_min_distance(&a, &b, 0.01);
            prop_assert!(fast <= sampled + 1e-9);
            prop_assert!(sampled - fast < 0.02);
        }

        #[test]
        fn sampling_spacing_respects_step(len in 0.5..40.0f64, step in 0.1..2.0f64) {
            let g = Geometry::line(Pose::new(0.0, 0.0, 0.3), len);
            let pl = g.sample(step);
            for w in pl.points().windows(2) {
                prop_assert!(w[0].distance(w[1]) <= step + 1e-9);
            }
        }
    }
}
