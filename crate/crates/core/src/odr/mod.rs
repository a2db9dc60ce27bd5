//! Road-network model with OpenDRIVE semantics: roads may only be linked at
//! their start and end points, junction connecting roads carry lane links.

pub mod emit;
pub mod parse;
pub mod validate;

pub use emit::emit_opendrive;
pub use parse::{parse_opendrive, Parsed};
pub use validate::{validate_links, validate_links_with, Violation};

use crate::geom::{Geometry, Point, Polyline, Pose};

/// Which endpoint of an element a link attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactPoint {
    Start,
    End,
}

impl ContactPoint {
    pub fn as_str(self) -> &'static str {
        match self {
            ContactPoint::Start => "start",
            ContactPoint::End => "end",
        }
    }
}

/// Link target: another road or a junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkTarget {
    Road(u32),
    Junction(u32),
}

/// Predecessor/successor record. Road targets name the contact point;
/// junction targets have none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub target: LinkTarget,
    pub contact: Option<ContactPoint>,
}

impl Link {
    pub fn road(id: u32, contact: ContactPoint) -> Self {
        Link {
            target: LinkTarget::Road(id),
            contact: Some(contact),
        }
    }

    pub fn junction(id: u32) -> Self {
        Link {
            target: LinkTarget::Junction(id),
            contact: None,
        }
    }
}

/// A driving lane. Positive ids sit left of the reference line, negative ids
/// right; travel on right lanes follows the reference direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lane {
    pub id: i32,
    pub width: f64,
}

/// One lane section spanning the whole road.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaneSection {
    pub left: Vec<Lane>,
    pub right: Vec<Lane>,
}

impl LaneSection {
    /// `count` uniform lanes on one side; positive ids for the left side.
    pub fn one_sided(count: u32, width: f64, left: bool) -> Self {
        let lanes = (1..=count as i32)
            .map(|k| Lane {
                id: if left { k } else { -k },
                width,
            })
            .collect();
        if left {
            LaneSection {
                left: lanes,
                right: Vec::new(),
            }
        } else {
            LaneSection {
                left: Vec::new(),
                right: lanes,
            }
        }
    }

    pub fn two_sided(left_count: u32, right_count: u32, width: f64) -> Self {
        LaneSection {
            left: (1..=left_count as i32).map(|k| Lane { id: k, width }).collect(),
            right: (1..=right_count as i32)
                .map(|k| Lane { id: -k, width })
                .collect(),
        }
    }

    pub fn lane_ids(&self) -> impl Iterator<Item = i32> + '_ {
        self.left
            .iter()
            .map(|l| l.id)
            .chain(self.right.iter().map(|l| l.id))
    }
}

/// A road: reference line, lanes, endpoint links and junction membership.
#[derive(Debug, Clone, PartialEq)]
pub struct Road {
    pub id: u32,
    pub name: String,
    pub geometry: Vec<Geometry>,
    pub lanes: LaneSection,
    pub predecessor: Option<Link>,
    pub successor: Option<Link>,
    /// Junction this road belongs to, for connecting roads.
    pub junction: Option<u32>,
}

impl Road {
    pub fn length(&self) -> f64 {
        self.geometry.iter().map(|g| g.length()).sum()
    }

    pub fn start_pose(&self) -> Pose {
        self.geometry[0].start()
    }

    pub fn end_pose(&self) -> Pose {
        self.geometry.last().unwrap().end()
    }

    pub fn contact_pose(&self, contact: ContactPoint) -> Pose {
        match contact {
            ContactPoint::Start => self.start_pose(),
            ContactPoint::End => self.end_pose(),
        }
    }

    /// Sampled reference line at parameter spacing no coarser than `step`.
    pub fn sample(&self, step: f64) -> Polyline {
        Polyline::new(self.sample_points(step))
    }

    pub fn sample_points(&self, step: f64) -> Vec<Point> {
        let mut pts: Vec<Point> = Vec::new();
        for g in &self.geometry {
            for p in g.sample(step).points() {
                if pts.last() != Some(p) {
                    pts.push(*p);
                }
            }
        }
        pts
    }

    pub fn sample_poses(&self, step: f64) -> Vec<Pose> {
        let mut out = Vec::new();
        for g in &self.geometry {
            for p in g.sample_poses(step) {
                out.push(p);
            }
        }
        out
    }
}

/// A lane-to-lane mapping inside a junction connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneLink {
    pub from: i32,
    pub to: i32,
}

/// One allowed movement through a junction: an incoming road continuing onto
/// a connecting road.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionConnection {
    pub id: u32,
    pub incoming_road: u32,
    pub connecting_road: u32,
    /// Endpoint of the connecting road that touches the incoming road.
    pub contact_point: ContactPoint,
    pub lane_links: Vec<LaneLink>,
}

/// A junction grouping connecting roads.
#[derive(Debug, Clone, PartialEq)]
pub struct Junction {
    pub id: u32,
    pub name: String,
    pub connections: Vec<JunctionConnection>,
}

/// A full road network.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoadNetwork {
    pub name: String,
    pub roads: Vec<Road>,
    pub junctions: Vec<Junction>,
}

impl RoadNetwork {
    pub fn road(&self, id: u32) -> Option<&Road> {
        self.roads.iter().find(|r| r.id == id)
    }

    pub fn junction(&self, id: u32) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.id == id)
    }

    /// Axis-aligned bounds of all sampled reference lines.
    pub fn bounds(&self, step: f64) -> Option<(Point, Point)> {
        let mut lo: Option<Point> = None;
        let mut hi: Option<Point> = None;
        for road in &self.roads {
            for p in road.sample_points(step) {
                lo = Some(match lo {
                    None => p,
                    Some(q) => Point::new(q.x.min(p.x), q.y.min(p.y)),
                });
                hi = Some(match hi {
                    None => p,
                    Some(q) => Point::new(q.x.max(p.x), q.y.max(p.y)),
                });
            }
        }
        lo.zip(hi)
    }
}
