//! Base-circle fitting: algebraic least-squares center plus the radius rule
//! that keeps every incident point outside the ring.

use nalgebra::{Matrix3, Vector3};

use crate::defs::IncidentRoadDefinition;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Scale applied to the minimum center-to-incident distance when sizing the
/// ring radius. Every incident point ends up at least 1/factor radii out.
pub const DEFAULT_RADIUS_FACTOR: f64 = 0.4;

// Condition-number threshold on the 3x3 normal matrix beyond which the
// layout is treated as collinear.
const NORMAL_CONDITION_LIMIT: f64 = 1e10;

/// A circle in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

/// Center of the algebraic least-squares circle through `points`, i.e. the
/// minimizer of the sum of squared differences of squared radii.
///
/// Exact on noiseless circular data. Collinear or near-collinear inputs are
/// rejected as degenerate.
pub fn fit_center_least_squares(points: &[Point]) -> Result<Point> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "circle fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    // Shift to the centroid for conditioning, then solve the normal
    // equations of [x y 1] w = -(x^2 + y^2).
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;

    let mut m = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for p in points {
        let x = p.x - cx;
        let y = p.y - cy;
        let z = x * x + y * y;
        m[(0, 0)] += x * x;
        m[(0, 1)] += x * y;
        m[(0, 2)] += x;
        m[(1, 1)] += y * y;
        m[(1, 2)] += y;
        m[(2, 2)] += 1.0;
        rhs[0] -= x * z;
        rhs[1] -= y * z;
        rhs[2] -= z;
    }
    m[(1, 0)] = m[(0, 1)];
    m[(2, 0)] = m[(0, 2)];
    m[(2, 1)] = m[(1, 2)];

    let svd = m.svd(true, true);
    let s_max = svd.singular_values[0];
    let s_min = svd.singular_values[2];
    if !(s_min > 0.0) || s_max / s_min > NORMAL_CONDITION_LIMIT {
        return Err(Error::DegenerateInput(
            "circle fit is singular: points are collinear or nearly so".into(),
        ));
    }
    let w = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::DegenerateInput(format!("circle fit solve failed: {e}")))?;
    Ok(Point::new(cx - 0.5 * w[0], cy - 0.5 * w[1]))
}

/// The algebraic fit objective at a candidate center, with the radius profiled
/// out: sum over points of (|p - c|^2 - mean |p - c|^2)^2.
pub fn kasa_objective(points: &[Point], center: Point) -> f64 {
    let n = points.len() as f64;
    let sq: Vec<f64> = points
        .iter()
        .map(|p| {
            let dx = p.x - center.x;
            let dy = p.y - center.y;
            dx * dx + dy * dy
        })
        .collect();
    let mean = sq.iter().sum::<f64>() / n;
    sq.iter().map(|d| (d - mean) * (d - mean)).sum()
}

/// Ring radius from the fitted center: `factor` times the minimum distance to
/// the incident points.
pub fn roundabout_radius(center: Point, incident_points: &[Point]) -> Result<f64> {
    roundabout_radius_with_factor(center, incident_points, DEFAULT_RADIUS_FACTOR)
}

pub fn roundabout_radius_with_factor(
    center: Point,
    incident_points: &[Point],
    factor: f64,
) -> Result<f64> {
    if incident_points.is_empty() {
        return Err(Error::DegenerateInput(
            "radius rule needs at least one incident point".into(),
        ));
    }
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::InvalidParams(format!(
            "radius factor must be in (0, 1), got {factor}"
        )));
    }
    let d_min = incident_points
        .iter()
        .map(|p| p.distance(center))
        .fold(f64::INFINITY, f64::min);
    if d_min < 1e-9 {
        return Err(Error::DegenerateInput(
            "an incident point coincides with the fitted center".into(),
        ));
    }
    Ok(factor * d_min)
}

/// Fit the base circle for a set of incident road definitions: least-squares
/// center plus the scaled minimum-distance radius. No incident point lies
/// inside the resulting circle.
pub fn find_maximal_circle(defs: &[IncidentRoadDefinition]) -> Result<Circle> {
    find_maximal_circle_with_factor(defs, DEFAULT_RADIUS_FACTOR)
}

pub fn find_maximal_circle_with_factor(
    defs: &[IncidentRoadDefinition],
    factor: f64,
) -> Result<Circle> {
    let points: Vec<Point> = defs.iter().map(|d| d.position).collect();
    let center = fit_center_least_squares(&points)?;
    let radius = roundabout_radius_with_factor(center, &points, factor)?;
    Ok(Circle { center, radius })
}
