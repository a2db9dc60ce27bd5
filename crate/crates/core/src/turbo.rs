//! Turbo roundabout generation: two translated half-circle chains joined by
//! straight spike segments, rotated onto the axis characterized by the most
//! nearly antipodal pair of incident points.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::classic::{assemble_network, CircularSegment};
use crate::defs::{validate_defs, IncidentRoadDefinition, TurboParams};
use crate::error::{Error, Result};
use crate::fit::{find_maximal_circle_with_factor, Circle};
use crate::geom::{ccw_tangent_heading, normalize_angle, Geometry, Point, Pose};
use crate::odr::RoadNetwork;

/// The two incident definitions whose angular separation about the center is
/// closest to a half turn, plus the bearing of the line through them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatiblePair {
    pub index_a: usize,
    pub index_b: usize,
    pub axis_angle: f64,
}

/// Pick the most nearly antipodal pair of incident points. Ties resolve to
/// the lexicographically smallest index pair.
pub fn find_compatible_pair(
    defs: &[IncidentRoadDefinition],
    circle: &Circle,
) -> Result<CompatiblePair> {
    if defs.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "a compatible pair needs at least 2 incident roads, got {}",
            defs.len()
        )));
    }
    let bearings: Vec<f64> = defs
        .iter()
        .map(|d| circle.center.bearing_to(d.position))
        .collect();
    let mut best = (0usize, 1usize);
    let mut best_sep = -1.0f64;
    for a in 0..defs.len() {
        for b in (a + 1)..defs.len() {
            let sep = normalize_angle(bearings[b] - bearings[a]).abs();
            if sep > best_sep {
                best_sep = sep;
                best = (a, b);
            }
        }
    }
    Ok(CompatiblePair {
        index_a: best.0,
        index_b: best.1,
        axis_angle: normalize_angle(defs[best.0].position.bearing_to(defs[best.1].position)),
    })
}

/// Build the spiral ring: two half-circle chains whose centers sit
/// `translation_distance` apart along the axis, joined by two straight spikes
/// of that length running parallel to the axis. The assembly is constructed
/// on a canonical axis and rotated about the center by `pair.axis_angle`.
pub fn build_turbo_ring(
    circle: &Circle,
    pair: &CompatiblePair,
    params: &TurboParams,
) -> Result<Vec<CircularSegment>> {
    let d = params.resolved_translation();
    if !(d > 0.0) {
        return Err(Error::InvalidParams(format!(
            "translation distance must be positive, got {d}"
        )));
    }
    if d >= circle.radius {
        return Err(Error::InvalidParams(format!(
            "translation distance {d} must be smaller than the ring radius {}",
            circle.radius
        )));
    }
    let n = {
        let raw = params.base.ring_segments(0).max(4);
        raw + raw % 2 // half circles need an even split
    };
    let n_half = n / 2;
    let r = circle.radius;
    let c = circle.center;
    let right_center = Point::new(c.x + 0.5 * d, c.y);
    let left_center = Point::new(c.x - 0.5 * d, c.y);
    let arc_span = PI / n_half as f64;
    let arc_len = r * arc_span;

    // canonical chain: right half rising from its bottom, spike westwards
    // across the top, left half descending, spike eastwards across the bottom
    let mut geometries: Vec<Geometry> = Vec::with_capacity(n + 2);
    for j in 0..n_half {
        let theta = -FRAC_PI_2 + j as f64 * arc_span;
        let start = Pose::from_point(right_center.offset(r, theta), ccw_tangent_heading(theta));
        geometries.push(Geometry::arc(start, arc_len, 1.0 / r));
    }
    geometries.push(Geometry::line(
        Pose::new(c.x + 0.5 * d, c.y + r, PI),
        d,
    ));
    for j in 0..n_half {
        let theta = FRAC_PI_2 + j as f64 * arc_span;
        let start = Pose::from_point(left_center.offset(r, theta), ccw_tangent_heading(theta));
        geometries.push(Geometry::arc(start, arc_len, 1.0 / r));
    }
    geometries.push(Geometry::line(
        Pose::new(c.x - 0.5 * d, c.y - r, 0.0),
        d,
    ));

    Ok(geometries
        .into_iter()
        .enumerate()
        .map(|(index, g)| {
            let geometry = g.rotated_about(c, pair.axis_angle);
            CircularSegment {
                index,
                start: geometry.start(),
                end: geometry.end(),
                geometry,
            }
        })
        .collect())
}

/// Generate a turbo roundabout network.
///
/// Incident roads attach through the same offset-projected boundary selection
/// as the classic generator; with the ring rotated onto the compatible axis,
/// the approaches crossing the spikes pick up boundary poses on the two
/// different half circles.
pub fn generate_turbo(defs: &[IncidentRoadDefinition], params: &TurboParams) -> Result<RoadNetwork> {
    validate_defs(defs)?;
    params.validate(defs.len())?;
    let circle = find_maximal_circle_with_factor(defs, params.base.radius_factor)?;
    let pair = find_compatible_pair(defs, &circle)?;
    let resolved = TurboParams {
        base: crate::defs::GenerationParams {
            segments_per_ring: Some(params.base.ring_segments(defs.len())),
            ..params.base
        },
        ..*params
    };
    let ring = build_turbo_ring(&circle, &pair, &resolved)?;
    assemble_network("turbo roundabout", &circle, &ring, defs, &params.base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::generate_classic;
    use crate::defs::{Distortion, GenerationParams};
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn defs_at_bearings(bearings_deg: &[f64]) -> Vec<IncidentRoadDefinition> {
        bearings_deg
            .iter()
            .map(|&b| {
                let th = b.to_radians();
                IncidentRoadDefinition::new(
                    Point::new(40.0 * th.cos(), 40.0 * th.sin()),
                    normalize_angle(th + PI),
                    2,
                    2,
                )
            })
            .collect()
    }

    fn unit_circle_at(r: f64) -> Circle {
        Circle {
            center: Point::new(0.0, 0.0),
            radius: r,
        }
    }

    #[test]
    fn antipodal_pair_with_lexicographic_tie_break() {
        let defs = defs_at_bearings(&[0.0, 90.0, 180.0, 270.0]);
        let pair = find_compatible_pair(&defs, &unit_circle_at(16.0)).unwrap();
        assert_eq!((pair.index_a, pair.index_b), (0, 2));
        assert!(normalize_angle(pair.axis_angle - PI).abs() < 1e-9);
    }

    #[test]
    fn pair_closest_to_half_turn_wins() {
        let defs = defs_at_bearings(&[0.0, 90.0, 200.0]);
        let pair = find_compatible_pair(&defs, &unit_circle_at(16.0)).unwrap();
        // separations: (0,90)=90, (0,200)=160, (90,200)=110
        assert_eq!((pair.index_a, pair.index_b), (0, 2));
    }

    #[test]
    fn pair_matches_exhaustive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let angles: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..TAU)).collect();
            let defs: Vec<IncidentRoadDefinition> = angles
                .iter()
                .map(|&th| {
                    IncidentRoadDefinition::new(
                        Point::new(40.0 * th.cos(), 40.0 * th.sin()),
                        normalize_angle(th + PI),
                        2,
                        2,
                    )
                })
                .collect();
            let circle = unit_circle_at(16.0);
            let pair = find_compatible_pair(&defs, &circle).unwrap();
            // brute force over all index pairs
            let mut best = (0, 1);
            let mut best_sep = -1.0;
            for a in 0..defs.len() {
                for b in (a + 1)..defs.len() {
                    let sep = normalize_angle(
                        circle.center.bearing_to(defs[b].position)
                            - circle.center.bearing_to(defs[a].position),
                    )
                    .abs();
                    if sep > best_sep {
                        best_sep = sep;
                        best = (a, b);
                    }
                }
            }
            assert_eq!((pair.index_a, pair.index_b), best);
        }
    }

    #[test]
    fn spikes_have_translation_length_and_axis_heading() {
        let circle = unit_circle_at(16.0);
        let pair = CompatiblePair {
            index_a: 0,
            index_b: 1,
            axis_angle: 0.7,
        };
        let params = TurboParams {
            translation_distance: Some(4.0),
            ..Default::default()
        };
        let ring = build_turbo_ring(&circle, &pair, &params).unwrap();
        let spikes: Vec<&CircularSegment> = ring
            .iter()
            .filter(|s| matches!(s.geometry, Geometry::Line { .. }))
            .collect();
        assert_eq!(spikes.len(), 2);
        for s in &spikes {
            assert!((s.geometry.length() - 4.0).abs() < 1e-9);
            let h = normalize_angle(s.start.heading - pair.axis_angle).abs();
            assert!(h < 1e-9 || (h - PI).abs() < 1e-9, "spike not on axis: {h}");
        }
        // the two spikes point in opposite directions
        let dh = normalize_angle(spikes[0].start.heading - spikes[1].start.heading).abs();
        assert!((dh - PI).abs() < 1e-9);
    }

    #[test]
    fn ring_is_closed_and_g1() {
        let circle = unit_circle_at(16.0);
        let pair = CompatiblePair {
            index_a: 0,
            index_b: 1,
            axis_angle: -1.3,
        };
        let params = TurboParams {
            translation_distance: Some(7.0),
            ..Default::default()
        };
        let ring = build_turbo_ring(&circle, &pair, &params).unwrap();
        for k in 0..ring.len() {
            let next = &ring[(k + 1) % ring.len()];
            assert!(ring[k].end.position.distance(next.start.position) < 1e-6);
            assert!(normalize_angle(ring[k].end.heading - next.start.heading).abs() < 1e-4);
        }
    }

    #[test]
    fn half_circle_chains_are_exact_translates() {
        let circle = unit_circle_at(16.0);
        let pair = CompatiblePair {
            index_a: 0,
            index_b: 1,
            axis_angle: 0.4,
        };
        let d = 6.0;
        let params = TurboParams {
            translation_distance: Some(d),
            ..Default::default()
        };
        let ring = build_turbo_ring(&circle, &pair, &params).unwrap();
        let arcs: Vec<&CircularSegment> = ring
            .iter()
            .filter(|s| matches!(s.geometry, Geometry::Arc { .. }))
            .collect();
        let half = arcs.len() / 2;
        // every sampled point of each half sits at radius r from its own
        // center; the two centers differ by the translation along the axis
        let shift = Point::new(d * pair.axis_angle.cos(), d * pair.axis_angle.sin());
        let right_center = Point::new(
            circle.center.x + 0.5 * shift.x,
            circle.center.y + 0.5 * shift.y,
        );
        let left_center = Point::new(
            circle.center.x - 0.5 * shift.x,
            circle.center.y - 0.5 * shift.y,
        );
        assert!((right_center.distance(left_center) - d).abs() < 1e-9);
        for seg in &arcs[..half] {
            for p in seg.geometry.sample(0.5).points() {
                assert!((p.distance(right_center) - circle.radius).abs() < 1e-9);
            }
        }
        for seg in &arcs[half..] {
            for p in seg.geometry.sample(0.5).points() {
                assert!((p.distance(left_center) - circle.radius).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn vanishing_translation_recovers_the_circle() {
        let circle = unit_circle_at(16.0);
        let pair = CompatiblePair {
            index_a: 0,
            index_b: 1,
            axis_angle: 0.9,
        };
        let params = TurboParams {
            translation_distance: Some(1e-9),
            ..Default::default()
        };
        let ring = build_turbo_ring(&circle, &pair, &params).unwrap();
        let mut worst = 0.0f64;
        for seg in &ring {
            for p in seg.geometry.sample(0.1).points() {
                worst = worst.max((p.distance(circle.center) - circle.radius).abs());
            }
        }
        assert!(worst < 1e-6, "deviation from the base circle: {worst}");
    }

    #[test]
    fn oversized_translation_rejected() {
        let circle = unit_circle_at(10.0);
        let pair = CompatiblePair {
            index_a: 0,
            index_b: 1,
            axis_angle: 0.0,
        };
        let params = TurboParams {
            translation_distance: Some(10.0),
            ..Default::default()
        };
        assert!(matches!(
            build_turbo_ring(&circle, &pair, &params),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn generate_turbo_symmetric_smoke() {
        let defs = defs_at_bearings(&[0.0, 90.0, 180.0, 270.0]);
        let params = TurboParams::default();
        let net = generate_turbo(&defs, &params).unwrap();
        assert!(crate::odr::validate_links(&net).is_empty());
        let straight_ring_roads = net
            .roads
            .iter()
            .filter(|r| r.name.starts_with("ring-"))
            .filter(|r| matches!(r.geometry[0], Geometry::Line { .. }))
            .count();
        assert_eq!(straight_ring_roads, 2);
    }

    #[test]
    fn turbo_ring_vs_classic_ring_fingerprint() {
        let defs = defs_at_bearings(&[0.0, 90.0, 180.0, 270.0]);
        let classic = generate_classic(
            &defs,
            &GenerationParams {
                distortion: Distortion::Off,
                ..Default::default()
            },
        )
        .unwrap();
        let straight_classic = classic
            .roads
            .iter()
            .filter(|r| r.name.starts_with("ring-"))
            .filter(|r| matches!(r.geometry[0], Geometry::Line { .. }))
            .count();
        assert_eq!(straight_classic, 0);
    }

    #[test]
    fn spike_crossing_approaches_attach_on_both_half_circles() {
        // with the axis through east and west, the north and south approaches
        // cross the spikes: each picks one boundary pose per half circle
        let defs = defs_at_bearings(&[0.0, 90.0, 180.0, 270.0]);
        let params = TurboParams::default();
        let circle =
            find_maximal_circle_with_factor(&defs, params.base.radius_factor).unwrap();
        let pair = find_compatible_pair(&defs, &circle).unwrap();
        let d = params.resolved_translation();
        let axis = pair.axis_angle;
        let shift = Point::new(0.5 * d * axis.cos(), 0.5 * d * axis.sin());
        let right_center = Point::new(circle.center.x + shift.x, circle.center.y + shift.y);
        let left_center = Point::new(circle.center.x - shift.x, circle.center.y - shift.y);

        let net = generate_turbo(&defs, &params).unwrap();
        let side = |p: Point| -> i32 {
            if (p.distance(right_center) - circle.radius).abs() < 1e-6 {
                1
            } else if (p.distance(left_center) - circle.radius).abs() < 1e-6 {
                -1
            } else {
                0
            }
        };
        for i in [1usize, 3] {
            // north (index 1) and south (index 3) approaches
            let entry = net
                .roads
                .iter()
                .find(|r| r.name == format!("entry-{i}"))
                .unwrap();
            let exit = net
                .roads
                .iter()
                .find(|r| r.name == format!("exit-{i}"))
                .unwrap();
            let entry_side = side(entry.end_pose().position);
            let exit_side = side(exit.start_pose().position);
            assert_ne!(entry_side, 0);
            assert_ne!(exit_side, 0);
            assert_ne!(entry_side, exit_side, "approach {i} stayed on one circle");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn rotation_equivariance(phi in -PI..PI) {
            let circle = unit_circle_at(16.0);
            let params = TurboParams {
                translation_distance: Some(5.0),
                ..Default::default()
            };
            let base = build_turbo_ring(
                &circle,
                &CompatiblePair { index_a: 0, index_b: 1, axis_angle: 0.0 },
                &params,
            ).unwrap();
            let turned = build_turbo_ring(
                &circle,
                &CompatiblePair { index_a: 0, index_b: 1, axis_angle: phi },
                &params,
            ).unwrap();
            for (a, b) in base.iter().zip(&turned) {
                let pa = a.geometry.sample(1.0);
                let pb = b.geometry.sample(1.0);
                for (p, q) in pa.points().iter().zip(pb.points()) {
                    let rotated = crate::geom::rotate_about(*p, circle.center, phi);
                    prop_assert!(rotated.distance(*q) < 1e-9);
                }
            }
        }
    }
}
