//! Structural and geometric validation of road networks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::geom::{
    clearance_at_least, min_clearance, normalize_angle, polylines_properly_cross, Point, Polyline,
    DEFAULT_SAMPLE_STEP,
};
use crate::odr::{ContactPoint, LinkTarget, RoadNetwork};

/// Linked contact points must coincide within this distance.
pub const LINK_POSITION_TOLERANCE: f64 = 1e-3;
/// Headings at linked contact points must agree (modulo travel direction)
/// within this angle.
pub const LINK_HEADING_TOLERANCE: f64 = 1e-2;
/// Default minimum separation between non-adjacent roads.
pub const DEFAULT_VALIDATION_CLEARANCE: f64 = 2.0;

/// One validation finding. Violations are data, not errors; an empty list
/// means the network is valid.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateId {
        id: u32,
    },
    MissingLinkTarget {
        road: u32,
        end: &'static str,
        target: String,
    },
    LinkGap {
        road: u32,
        other: u32,
        gap: f64,
    },
    HeadingDiscontinuity {
        road: u32,
        other: u32,
        error: f64,
    },
    BadJunctionMembership {
        junction: u32,
        connection: u32,
        road: u32,
    },
    MissingJunctionRoad {
        junction: u32,
        connection: u32,
        road: u32,
    },
    JunctionContactGap {
        junction: u32,
        connection: u32,
        gap: f64,
    },
    MissingLane {
        junction: u32,
        connection: u32,
        road: u32,
        lane: i32,
    },
    ClearanceViolation {
        road_a: u32,
        road_b: u32,
        clearance: f64,
    },
    CrossingRoads {
        road_a: u32,
        road_b: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { id } => write!(f, "id {id} is used more than once"),
            Violation::MissingLinkTarget { road, end, target } => {
                write!(f, "road {road} {end} links to missing {target}")
            }
            Violation::LinkGap { road, other, gap } => write!(
                f,
                "linked contact points of roads {road} and {other} are {gap:.4} m apart"
            ),
            Violation::HeadingDiscontinuity { road, other, error } => write!(
                f,
                "headings of linked roads {road} and {other} differ by {error:.4} rad"
            ),
            Violation::BadJunctionMembership {
                junction,
                connection,
                road,
            } => write!(
                f,
                "junction {junction} connection {connection}: road {road} does not declare \
                 membership in the junction"
            ),
            Violation::MissingJunctionRoad {
                junction,
                connection,
                road,
            } => write!(
                f,
                "junction {junction} connection {connection} references missing road {road}"
            ),
            Violation::JunctionContactGap {
                junction,
                connection,
                gap,
            } => write!(
                f,
                "junction {junction} connection {connection}: contact points are {gap:.4} m apart"
            ),
            Violation::MissingLane {
                junction,
                connection,
                road,
                lane,
            } => write!(
                f,
                "junction {junction} connection {connection}: road {road} has no lane {lane}"
            ),
            Violation::ClearanceViolation {
                road_a,
                road_b,
                clearance,
            } => write!(
                f,
                "non-adjacent roads {road_a} and {road_b} come within {clearance:.4} m"
            ),
            Violation::CrossingRoads { road_a, road_b } => {
                write!(f, "roads {road_a} and {road_b} cross each other")
            }
        }
    }
}

/// Validate with the default clearance threshold.
pub fn validate_links(net: &RoadNetwork) -> Vec<Violation> {
    validate_links_with(net, DEFAULT_VALIDATION_CLEARANCE)
}

/// Check link-target existence, contact-point coincidence, heading
/// continuity, junction lane links, and pairwise clearance of non-adjacent
/// roads.
pub fn validate_links_with(net: &RoadNetwork, clearance: f64) -> Vec<Violation> {
    let mut violations = Vec::new();

    // unique ids across roads and junctions
    let mut seen = BTreeSet::new();
    for id in net
        .roads
        .iter()
        .map(|r| r.id)
        .chain(net.junctions.iter().map(|j| j.id))
    {
        if !seen.insert(id) {
            violations.push(Violation::DuplicateId { id });
        }
    }

    let roads: BTreeMap<u32, &crate::odr::Road> = net.roads.iter().map(|r| (r.id, r)).collect();
    let junction_ids: BTreeSet<u32> = net.junctions.iter().map(|j| j.id).collect();

    // endpoint links
    for road in &net.roads {
        for (end, link) in [("predecessor", &road.predecessor), ("successor", &road.successor)] {
            let Some(link) = link else { continue };
            match link.target {
                LinkTarget::Junction(id) => {
                    if !junction_ids.contains(&id) {
                        violations.push(Violation::MissingLinkTarget {
                            road: road.id,
                            end,
                            target: format!("junction {id}"),
                        });
                    }
                }
                LinkTarget::Road(id) => {
                    let Some(other) = roads.get(&id) else {
                        violations.push(Violation::MissingLinkTarget {
                            road: road.id,
                            end,
                            target: format!("road {id}"),
                        });
                        continue;
                    };
                    let own = if end == "predecessor" {
                        road.contact_pose(ContactPoint::Start)
                    } else {
                        road.contact_pose(ContactPoint::End)
                    };
                    let contact = link.contact.unwrap_or(ContactPoint::Start);
                    let theirs = other.contact_pose(contact);
                    let gap = own.position.distance(theirs.position);
                    if gap > LINK_POSITION_TOLERANCE {
                        violations.push(Violation::LinkGap {
                            road: road.id,
                            other: id,
                            gap,
                        });
                    } else {
                        // travel direction may flip across a link, so compare
                        // headings modulo a half turn
                        let diff = normalize_angle(own.heading - theirs.heading).abs();
                        let err = diff.min((std::f64::consts::PI - diff).abs());
                        if err > LINK_HEADING_TOLERANCE {
                            violations.push(Violation::HeadingDiscontinuity {
                                road: road.id,
                                other: id,
                                error: err,
                            });
                        }
                    }
                }
            }
        }
    }

    // junction connections
    for junction in &net.junctions {
        for conn in &junction.connections {
            let incoming = roads.get(&conn.incoming_road);
            let connecting = roads.get(&conn.connecting_road);
            if incoming.is_none() {
                violations.push(Violation::MissingJunctionRoad {
                    junction: junction.id,
                    connection: conn.id,
                    road: conn.incoming_road,
                });
            }
            if connecting.is_none() {
                violations.push(Violation::MissingJunctionRoad {
                    junction: junction.id,
                    connection: conn.id,
                    road: conn.connecting_road,
                });
            }
            let (Some(incoming), Some(connecting)) = (incoming, connecting) else {
                continue;
            };
            if connecting.junction != Some(junction.id) {
                violations.push(Violation::BadJunctionMembership {
                    junction: junction.id,
                    connection: conn.id,
                    road: connecting.id,
                });
            }
            // the connecting road touches the incoming road only at an
            // endpoint; roads cannot be entered mid-geometry
            let touch = connecting.contact_pose(conn.contact_point).position;
            let gap = touch
                .distance(incoming.start_pose().position)
                .min(touch.distance(incoming.end_pose().position));
            if gap > LINK_POSITION_TOLERANCE {
                violations.push(Violation::JunctionContactGap {
                    junction: junction.id,
                    connection: conn.id,
                    gap,
                });
            }
            for ll in &conn.lane_links {
                if !incoming.lanes.lane_ids().any(|id| id == ll.from) {
                    violations.push(Violation::MissingLane {
                        junction: junction.id,
                        connection: conn.id,
                        road: incoming.id,
                        lane: ll.from,
                    });
                }
                if !connecting.lanes.lane_ids().any(|id| id == ll.to) {
                    violations.push(Violation::MissingLane {
                        junction: junction.id,
                        connection: conn.id,
                        road: connecting.id,
                        lane: ll.to,
                    });
                }
            }
        }
    }

    // Pairwise geometry rules: roads that share an endpoint meet by
    // construction and are unconstrained; everything else must not cross,
    // and must keep the clearance unless the pair is adjacent (joined
    // through one plain road) or a connecting road working the apron of a
    // ring segment.
    let samples: Vec<RoadShape> = net.roads.iter().map(RoadShape::of).collect();
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let a = &samples[i];
            let b = &samples[j];
            if share_endpoint(a, b) {
                continue;
            }
            if polylines_properly_cross(&a.polyline, &b.polyline) {
                violations.push(Violation::CrossingRoads {
                    road_a: a.id,
                    road_b: b.id,
                });
                continue;
            }
            if roads_adjacent(a, b, &samples) {
                continue;
            }
            if !clearance_at_least(&a.polyline, &b.polyline, clearance) {
                violations.push(Violation::ClearanceViolation {
                    road_a: a.id,
                    road_b: b.id,
                    clearance: min_clearance(&a.polyline, &b.polyline),
                });
            }
        }
    }

    violations
}

/// What a road is, as far as the pairwise geometry rules care.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RoadKind {
    /// Part of the circular chain: linked road-to-road at both ends.
    Ring,
    /// A junction connecting road.
    Connecting,
    /// Anything else (incident roads, parsed external roads).
    Plain,
}

/// Sampled reference line plus the metadata the adjacency rules need.
#[derive(Clone)]
pub(crate) struct RoadShape {
    pub(crate) id: u32,
    pub(crate) ends: [Point; 2],
    pub(crate) kind: RoadKind,
    pub(crate) polyline: Polyline,
}

impl RoadShape {
    pub(crate) fn of(road: &crate::odr::Road) -> Self {
        let kind = if road.junction.is_some() {
            RoadKind::Connecting
        } else {
            let road_linked = |link: &Option<crate::odr::Link>| {
                matches!(
                    link,
                    Some(crate::odr::Link {
                        target: LinkTarget::Road(_),
                        ..
                    })
                )
            };
            if road_linked(&road.predecessor) && road_linked(&road.successor) {
                RoadKind::Ring
            } else {
                RoadKind::Plain
            }
        };
        let pl = road.sample(DEFAULT_SAMPLE_STEP);
        RoadShape {
            id: road.id,
            ends: [pl.first(), pl.last()],
            kind,
            polyline: pl,
        }
    }
}

pub(crate) fn share_endpoint(a: &RoadShape, b: &RoadShape) -> bool {
    a.ends
        .iter()
        .any(|p| b.ends.iter().any(|q| p.distance(*q) <= LINK_POSITION_TOLERANCE))
}

// Clearance exemptions: roads joined through one intervening plain or ring
// road (a ring segment between a connecting road's attach pose and the next
// segment over), and connecting roads running the apron of the ring they
// merge with. Junction connecting roads never count as the intermediary,
// which keeps incident-road-to-ring clearance enforced.
pub(crate) fn roads_adjacent(a: &RoadShape, b: &RoadShape, all: &[RoadShape]) -> bool {
    if share_endpoint(a, b) {
        return true;
    }
    if (a.kind == RoadKind::Connecting && b.kind == RoadKind::Ring)
        || (b.kind == RoadKind::Connecting && a.kind == RoadKind::Ring)
    {
        return true;
    }
    all.iter().any(|x| {
        x.kind != RoadKind::Connecting
            && x.id != a.id
            && x.id != b.id
            && share_endpoint(a, x)
            && share_endpoint(x, b)
    })
}
