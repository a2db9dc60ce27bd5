//! Classic roundabout generation: segmented circular ring, straight incident
//! roads sized against the ring, and parametric-cubic connection roads chosen
//! through the incident roads' angular offsets.

use std::f64::consts::TAU;

use crate::defs::{validate_defs, GenerationParams, IncidentRoadDefinition};
use crate::error::{Error, Result};
use crate::fit::{find_maximal_circle_with_factor, Circle};
use crate::geom::{
    ccw_tangent_heading, clearance_at_least, fit_param_cubic, normalize_angle, Geometry, Point,
    Polyline, Pose, DEFAULT_SAMPLE_STEP,
};
use crate::noise::{distort_ring_points, NoiseParams};
use crate::odr::validate::{roads_adjacent, share_endpoint, RoadKind, RoadShape};
use crate::odr::{
    validate_links_with, ContactPoint, Junction, JunctionConnection, LaneLink, LaneSection, Link,
    Road, RoadNetwork,
};

/// One ring segment: a piece of the circular chain between two boundary
/// poses. The chain of all segments closes into a G1-continuous loop.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularSegment {
    pub index: usize,
    pub start: Pose,
    pub end: Pose,
    pub geometry: Geometry,
}

/// Boundary poses of `n` equal ring segments: positions on the circle at
/// equal angular spacing, headings tangent for counterclockwise travel.
pub fn segment_circle(circle: &Circle, n: usize) -> Result<Vec<Pose>> {
    if n < 4 {
        return Err(Error::InvalidParams(format!(
            "the ring needs at least 4 segments, got {n}"
        )));
    }
    Ok((0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64;
            Pose::from_point(
                circle.center.offset(circle.radius, theta),
                ccw_tangent_heading(theta),
            )
        })
        .collect())
}

/// Build the circular chain. Without distortion each segment is an arc of
/// the base circle; with distortion the boundary poses are displaced radially
/// by the noise field, headings are recomputed as central-difference tangents
/// of the displaced points, and segments become parametric cubics.
pub fn build_circular_roads(
    circle: &Circle,
    n: usize,
    distortion: Option<&NoiseParams>,
) -> Result<Vec<CircularSegment>> {
    let boundary = segment_circle(circle, n)?;
    match distortion {
        None => {
            let seg_len = TAU * circle.radius / n as f64;
            Ok(boundary
                .iter()
                .enumerate()
                .map(|(k, &start)| {
                    let geometry = Geometry::arc(start, seg_len, 1.0 / circle.radius);
                    CircularSegment {
                        index: k,
                        start,
                        end: geometry.end(),
                        geometry,
                    }
                })
                .collect())
        }
        Some(params) => {
            let positions: Vec<Point> = boundary.iter().map(|p| p.position).collect();
            let displaced = distort_ring_points(&positions, circle, params)?;
            let poses: Vec<Pose> = (0..n)
                .map(|k| {
                    let prev = displaced[(k + n - 1) % n];
                    let next = displaced[(k + 1) % n];
                    Pose::from_point(displaced[k], prev.bearing_to(next))
                })
                .collect();
            (0..n)
                .map(|k| {
                    let start = poses[k];
                    let end = poses[(k + 1) % n];
                    let geometry = fit_param_cubic(start, end)?;
                    Ok(CircularSegment {
                        index: k,
                        start,
                        end: geometry.end(),
                        geometry,
                    })
                })
                .collect()
        }
    }
}

/// Angular difference between an incident pose's heading and the outward
/// bearing from the ring center to that pose.
pub fn center_offset(center: Point, incident: Pose) -> Result<f64> {
    if center.distance(incident.position) < 1e-9 {
        return Err(Error::DegenerateInput(
            "incident point coincides with the roundabout center".into(),
        ));
    }
    Ok(normalize_angle(
        incident.heading - center.bearing_to(incident.position),
    ))
}

/// Length of the straight incident road: the smallest length at which the
/// endpoint-to-center distance reaches its one-dimensional minimum over the
/// range that keeps `clearance` to every ring segment, floored at `min_len`.
pub fn incident_road_length(
    incident: Pose,
    circle: &Circle,
    ring: &[CircularSegment],
    clearance: f64,
    min_len: f64,
) -> Result<f64> {
    let ring_polylines: Vec<Polyline> = ring
        .iter()
        .map(|s| s.geometry.sample(DEFAULT_SAMPLE_STEP))
        .collect();
    incident_road_length_impl(incident, circle, &ring_polylines, clearance, min_len)
}

pub(crate) fn incident_road_length_impl(
    incident: Pose,
    circle: &Circle,
    ring_polylines: &[Polyline],
    clearance: f64,
    min_len: f64,
) -> Result<f64> {
    assert!(clearance > 0.0 && min_len > 0.0);
    let d = incident.position.distance(circle.center);
    if d < 1e-9 {
        return Err(Error::DegenerateInput(
            "incident point coincides with the roundabout center".into(),
        ));
    }

    let feasible = |len: f64| -> bool {
        let road = Geometry::line(incident, len).sample(DEFAULT_SAMPLE_STEP);
        // the road must stay outside the base circle with margin and keep
        // clearance to the (possibly distorted) ring chain
        let min_center_dist = road
            .points()
            .iter()
            .map(|p| p.distance(circle.center))
            .fold(f64::INFINITY, f64::min);
        min_center_dist >= circle.radius + clearance
            && ring_polylines
                .iter()
                .all(|pl| clearance_at_least(&road, pl, clearance))
    };

    if !feasible(min_len) {
        return Err(Error::Infeasible(format!(
            "incident road at ({:.2}, {:.2}) cannot keep {clearance} m clearance even at its \
             minimum length {min_len}",
            incident.position.x, incident.position.y
        )));
    }

    // angle between the heading and the direction to the center gives the
    // unconstrained minimizer of the endpoint-to-center distance
    let psi = normalize_angle(incident.heading - incident.position.bearing_to(circle.center));
    let unconstrained = d * psi.cos();
    if unconstrained <= min_len {
        return Ok(min_len);
    }
    if feasible(unconstrained) {
        return Ok(unconstrained);
    }
    // largest feasible length below the unconstrained optimum
    let mut lo = min_len;
    let mut hi = unconstrained;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    Ok(lo)
}

// Bearing (about the ring center) of the point where the incident road's
// forward ray meets the base circle. Rays that miss the circle fall back to
// the closest-approach bearing, receding rays to the endpoint bearing.
fn attach_bearing(endpoint: Point, offset: f64, circle: &Circle) -> f64 {
    let theta = circle.center.bearing_to(endpoint);
    let heading = normalize_angle(theta + offset);
    let ex = endpoint.x - circle.center.x;
    let ey = endpoint.y - circle.center.y;
    let (hs, hc) = heading.sin_cos();
    let b = ex * hc + ey * hs;
    let c = ex * ex + ey * ey - circle.radius * circle.radius;
    let disc = b * b - c;
    if disc >= 0.0 {
        let t = -b - disc.sqrt();
        if t > 0.0 {
            return (ey + t * hs).atan2(ex + t * hc);
        }
    }
    if b < 0.0 {
        // approaches but misses: use the closest point of the ray
        let px = ex - b * hc;
        let py = ey - b * hs;
        if px.hypot(py) > 1e-9 {
            return py.atan2(px);
        }
    }
    theta
}

fn nearest_boundary(ring: &[CircularSegment], center: Point, target: f64) -> usize {
    let mut best = 0;
    let mut best_err = f64::INFINITY;
    for (k, seg) in ring.iter().enumerate() {
        let phi = center.bearing_to(seg.start.position);
        let err = normalize_angle(phi - target).abs();
        if err < best_err {
            best_err = err;
            best = k;
        }
    }
    best
}

/// Pick the ring boundary poses for an incident road's entry and exit
/// connections.
///
/// The endpoint's forward ray is projected onto the ring to get an attach
/// bearing; the entry boundary is the one nearest to that bearing advanced by
/// one segment span in travel direction, the exit boundary the one nearest to
/// the bearing retarded by one span.
pub fn select_connection_segments(
    incident_end: Pose,
    offset: f64,
    circle: &Circle,
    ring: &[CircularSegment],
) -> (usize, usize) {
    let n = ring.len();
    let span = TAU / n as f64;
    let theta = circle.center.bearing_to(incident_end.position);
    // the projection steers the choice toward where the road aims, but the
    // attach region must stay local to the endpoint: a connection cannot
    // wrap far around the ring without cutting through it
    let aim = normalize_angle(attach_bearing(incident_end.position, offset, circle) - theta);
    let tau = theta + aim.clamp(-2.0 * span, 2.0 * span);
    let entry = nearest_boundary(ring, circle.center, tau + span);
    let mut exit = nearest_boundary(ring, circle.center, tau - span);
    if exit == entry {
        exit = (exit + n - 1) % n;
    }
    (entry, exit)
}

/// Generate a classic roundabout network from incident road definitions.
pub fn generate_classic(
    defs: &[IncidentRoadDefinition],
    params: &GenerationParams,
) -> Result<RoadNetwork> {
    validate_defs(defs)?;
    params.validate(defs.len())?;
    let circle = find_maximal_circle_with_factor(defs, params.radius_factor)?;
    let n = params.ring_segments(defs.len());
    let noise = params.resolved_noise(circle.radius);
    let ring = build_circular_roads(&circle, n, noise.as_ref())?;
    assemble_network("classic roundabout", &circle, &ring, defs, params)
}

// Candidate boundary shifts tried when the default connection placement
// conflicts with already-built roads, ordered by total displacement so the
// default placement always wins when it is clean. Both directions matter:
// crowded layouts sometimes need the entry pulled back toward the endpoint
// rather than pushed further downstream.
fn connection_shifts() -> Vec<(i64, i64)> {
    let mut shifts: Vec<(i64, i64)> = Vec::with_capacity(49);
    for de in -3i64..=3 {
        for dx in -3i64..=3 {
            shifts.push((de, dx));
        }
    }
    shifts.sort_by_key(|&(de, dx)| (de.abs() + dx.abs(), de.abs(), de, dx));
    shifts
}

// A connection candidate may not cross any reference line it does not meet
// at an endpoint, and must keep the clearance to every road it is not
// adjacent to; these are the same rules the validator applies afterwards.
fn connection_fits(candidate: &RoadShape, existing: &[RoadShape], clearance: f64) -> bool {
    for s in existing {
        if share_endpoint(candidate, s) {
            continue;
        }
        if crate::geom::polylines_properly_cross(&candidate.polyline, &s.polyline) {
            return false;
        }
        if roads_adjacent(candidate, s, existing) {
            continue;
        }
        if !clearance_at_least(&candidate.polyline, &s.polyline, clearance) {
            return false;
        }
    }
    true
}

fn shape_of(id: u32, geometry: &Geometry, kind: RoadKind) -> RoadShape {
    let pl = geometry.sample(DEFAULT_SAMPLE_STEP);
    RoadShape {
        id,
        ends: [pl.first(), pl.last()],
        kind,
        polyline: pl,
    }
}

/// Assemble ring segments, incident roads, connection roads and junctions
/// into a validated network. Shared by both generators.
pub(crate) fn assemble_network(
    name: &str,
    circle: &Circle,
    ring: &[CircularSegment],
    defs: &[IncidentRoadDefinition],
    params: &GenerationParams,
) -> Result<RoadNetwork> {
    let n = ring.len();
    let m = defs.len();
    let ring_id = |k: usize| -> u32 { (k % n) as u32 + 1 };
    let incident_id = |i: usize| -> u32 { (n + 1 + i) as u32 };
    let entry_id = |i: usize| -> u32 { (n + m + 1 + 2 * i) as u32 };
    let exit_id = |i: usize| -> u32 { (n + m + 2 + 2 * i) as u32 };
    let junction_id = |i: usize| -> u32 { (n + 3 * m + 1 + i) as u32 };

    let ring_polylines: Vec<Polyline> = ring
        .iter()
        .map(|s| s.geometry.sample(DEFAULT_SAMPLE_STEP))
        .collect();

    let mut roads: Vec<Road> = Vec::with_capacity(n + 3 * m);
    let mut shapes: Vec<RoadShape> = Vec::with_capacity(n + 3 * m);
    for seg in ring {
        roads.push(Road {
            id: ring_id(seg.index),
            name: format!("ring-{}", seg.index),
            geometry: vec![seg.geometry.clone()],
            lanes: LaneSection::one_sided(params.circulating_lanes, params.lane_width, false),
            predecessor: Some(Link::road(ring_id(seg.index + n - 1), ContactPoint::End)),
            successor: Some(Link::road(ring_id(seg.index + 1), ContactPoint::Start)),
            junction: None,
        });
        shapes.push(shape_of(ring_id(seg.index), &seg.geometry, RoadKind::Ring));
    }

    // first place every incident road, so connection candidates can be
    // checked against all of them regardless of definition order
    let mut endpoints: Vec<Pose> = Vec::with_capacity(m);
    for (i, def) in defs.iter().enumerate() {
        let anchor = Pose::from_point(def.position, def.heading);
        let length = incident_road_length_impl(
            anchor,
            circle,
            &ring_polylines,
            params.clearance,
            params.min_incident_length,
        )?;
        let end_pose = Pose::from_point(def.position.offset(length, def.heading), def.heading);
        endpoints.push(end_pose);

        let incident_geometry = Geometry::line(anchor, length);
        shapes.push(shape_of(incident_id(i), &incident_geometry, RoadKind::Plain));
        roads.push(Road {
            id: incident_id(i),
            name: format!("incident-{i}"),
            geometry: vec![incident_geometry],
            lanes: LaneSection::two_sided(def.num_left_lanes, def.num_right_lanes, params.lane_width),
            predecessor: None,
            successor: Some(Link::junction(junction_id(i))),
            junction: None,
        });
    }

    // Pick connection boundaries per definition, greedily against everything
    // placed so far. Crowded layouts can make a greedy order paint itself
    // into a corner, so rotated processing orders are tried until one places
    // every connection cleanly.
    struct ConnectionPlan {
        entry_idx: usize,
        exit_idx: usize,
        entry_geometry: Geometry,
        exit_geometry: Geometry,
    }
    let defaults: Vec<(usize, usize, Pose, Pose)> = (0..m)
        .map(|i| -> Result<(usize, usize, Pose, Pose)> {
            let end_pose = endpoints[i];
            let offset = center_offset(circle.center, end_pose)?;
            let (e, x) = select_connection_segments(end_pose, offset, circle, ring);
            let out_pose =
                Pose::from_point(end_pose.position, defs[i].heading + std::f64::consts::PI);
            Ok((e, x, end_pose, out_pose))
        })
        .collect::<Result<_>>()?;

    let shifts = connection_shifts();
    let mut plans: Option<Vec<ConnectionPlan>> = None;
    let mut fallback_plans: Option<Vec<ConnectionPlan>> = None;
    for rotation in 0..m {
        let mut attempt: Vec<Option<ConnectionPlan>> = (0..m).map(|_| None).collect();
        let mut attempt_shapes = shapes.clone();
        let mut clean = true;
        for step in 0..m {
            let i = (step + rotation) % m;
            let (entry_default, exit_default, end_pose, out_pose) = defaults[i];
            let mut chosen: Option<ConnectionPlan> = None;
            for &(de, dx) in &shifts {
                let e = (entry_default as i64 + de).rem_euclid(n as i64) as usize;
                let x = (exit_default as i64 + dx).rem_euclid(n as i64) as usize;
                if e == x {
                    continue;
                }
                let entry_geometry = fit_param_cubic(end_pose, ring[e].start)?;
                let exit_geometry = fit_param_cubic(ring[x].start, out_pose)?;
                let entry_shape = shape_of(entry_id(i), &entry_geometry, RoadKind::Connecting);
                let exit_shape = shape_of(exit_id(i), &exit_geometry, RoadKind::Connecting);
                if connection_fits(&entry_shape, &attempt_shapes, params.clearance)
                    && connection_fits(&exit_shape, &attempt_shapes, params.clearance)
                {
                    attempt_shapes.push(entry_shape);
                    attempt_shapes.push(exit_shape);
                    chosen = Some(ConnectionPlan {
                        entry_idx: e,
                        exit_idx: x,
                        entry_geometry,
                        exit_geometry,
                    });
                    break;
                }
            }
            match chosen {
                Some(plan) => attempt[i] = Some(plan),
                None => {
                    // keep the default; validation will report the conflict
                    clean = false;
                    let entry_geometry = fit_param_cubic(end_pose, ring[entry_default].start)?;
                    let exit_geometry = fit_param_cubic(ring[exit_default].start, out_pose)?;
                    attempt_shapes.push(shape_of(
                        entry_id(i),
                        &entry_geometry,
                        RoadKind::Connecting,
                    ));
                    attempt_shapes.push(shape_of(exit_id(i), &exit_geometry, RoadKind::Connecting));
                    attempt[i] = Some(ConnectionPlan {
                        entry_idx: entry_default,
                        exit_idx: exit_default,
                        entry_geometry,
                        exit_geometry,
                    });
                }
            }
        }
        let attempt: Vec<ConnectionPlan> = attempt.into_iter().map(Option::unwrap).collect();
        if clean {
            plans = Some(attempt);
            break;
        }
        if fallback_plans.is_none() {
            fallback_plans = Some(attempt);
        }
    }
    let plans = plans
        .or(fallback_plans)
        .expect("at least one connection attempt runs");

    let mut junctions: Vec<Junction> = Vec::with_capacity(m);
    for (i, def) in defs.iter().enumerate() {
        let ConnectionPlan {
            entry_idx,
            exit_idx,
            ref entry_geometry,
            ref exit_geometry,
        } = plans[i];
        let entry_geometry = entry_geometry.clone();
        let exit_geometry = exit_geometry.clone();

        // entry: incident endpoint merging onto the ring, downstream
        roads.push(Road {
            id: entry_id(i),
            name: format!("entry-{i}"),
            geometry: vec![entry_geometry],
            lanes: LaneSection::one_sided(def.num_right_lanes, params.lane_width, false),
            predecessor: Some(Link::road(incident_id(i), ContactPoint::End)),
            successor: Some(Link::road(ring_id(entry_idx), ContactPoint::Start)),
            junction: Some(junction_id(i)),
        });

        // exit: leaving the ring upstream, arriving at the incident endpoint
        // pointed away from the ring
        let exit_feed = ring_id(exit_idx + n - 1); // segment ending at the exit boundary
        roads.push(Road {
            id: exit_id(i),
            name: format!("exit-{i}"),
            geometry: vec![exit_geometry],
            lanes: LaneSection::one_sided(def.num_left_lanes, params.lane_width, false),
            predecessor: Some(Link::road(exit_feed, ContactPoint::End)),
            successor: Some(Link::road(incident_id(i), ContactPoint::End)),
            junction: Some(junction_id(i)),
        });

        let entry_links = (1..=def.num_right_lanes as i32)
            .map(|k| LaneLink { from: -k, to: -k })
            .collect();
        let exit_links = (1..=(def.num_left_lanes.min(params.circulating_lanes) as i32))
            .map(|k| LaneLink { from: -k, to: -k })
            .collect();
        junctions.push(Junction {
            id: junction_id(i),
            name: format!("junction-{i}"),
            connections: vec![
                JunctionConnection {
                    id: 0,
                    incoming_road: incident_id(i),
                    connecting_road: entry_id(i),
                    contact_point: ContactPoint::Start,
                    lane_links: entry_links,
                },
                JunctionConnection {
                    id: 1,
                    incoming_road: exit_feed,
                    connecting_road: exit_id(i),
                    contact_point: ContactPoint::Start,
                    lane_links: exit_links,
                },
            ],
        });
    }

    let net = RoadNetwork {
        name: name.to_string(),
        roads,
        junctions,
    };
    let violations = validate_links_with(&net, params.clearance);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(net)
}
