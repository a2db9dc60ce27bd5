//! Deterministic OpenDRIVE 1.6 serialization.
//!
//! Element ordering follows ids and numbers are printed in fixed-point with
//! 17 significant digits, so identical networks serialize byte-identically
//! and every value survives a parse round trip exactly.

use crate::error::{Error, Result};
use crate::geom::{Geometry, DEFAULT_SAMPLE_STEP};
use crate::odr::validate::validate_links;
use crate::odr::{ContactPoint, LaneSection, Link, LinkTarget, Road, RoadNetwork};

/// Fixed-point formatting with 17 significant digits; never scientific.
pub(crate) fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite(), "cannot serialize non-finite number");
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0
    let ax = x.abs();
    let decimals = if ax == 0.0 {
        16
    } else {
        let magnitude = ax.log10().floor() as i32;
        (16 - magnitude).clamp(0, 340) as usize
    };
    format!("{x:.decimals$}")
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Serialize a validated network as OpenDRIVE 1.6 XML.
///
/// Invalid networks are rejected before serialization.
pub fn emit_opendrive(net: &RoadNetwork) -> Result<String> {
    let violations = validate_links(net);
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(emit_unchecked(net))
}

pub(crate) fn emit_unchecked(net: &RoadNetwork) -> String {
    let mut roads: Vec<&Road> = net.roads.iter().collect();
    roads.sort_by_key(|r| r.id);
    let mut junctions: Vec<&crate::odr::Junction> = net.junctions.iter().collect();
    junctions.sort_by_key(|j| j.id);

    let mut out = String::with_capacity(16 * 1024);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<OpenDRIVE>\n");

    let (lo, hi) = net
        .bounds(DEFAULT_SAMPLE_STEP)
        .unwrap_or((crate::geom::Point::new(0.0, 0.0), crate::geom::Point::new(0.0, 0.0)));
    out.push_str(&format!(
        "  <header revMajor=\"1\" revMinor=\"6\" name=\"{}\" version=\"1.00\" \
         north=\"{}\" south=\"{}\" east=\"{}\" west=\"{}\">\n",
        escape_xml(&net.name),
        fmt_f64(hi.y),
        fmt_f64(lo.y),
        fmt_f64(hi.x),
        fmt_f64(lo.x),
    ));
    out.push_str("    <geoReference/>\n");
    out.push_str("  </header>\n");

    for road in roads {
        emit_road(&mut out, road);
    }
    for junction in junctions {
        emit_junction(&mut out, junction);
    }
    out.push_str("</OpenDRIVE>\n");
    out
}

fn emit_road(out: &mut String, road: &Road) {
    let junction = road
        .junction
        .map(|j| j.to_string())
        .unwrap_or_else(|| "-1".to_string());
    out.push_str(&format!(
        "  <road id=\"{}\" name=\"{}\" length=\"{}\" junction=\"{}\">\n",
        road.id,
        escape_xml(&road.name),
        fmt_f64(road.length()),
        junction
    ));

    if road.predecessor.is_some() || road.successor.is_some() {
        out.push_str("    <link>\n");
        if let Some(link) = &road.predecessor {
            emit_link(out, "predecessor", link);
        }
        if let Some(link) = &road.successor {
            emit_link(out, "successor", link);
        }
        out.push_str("    </link>\n");
    }

    out.push_str("    <planView>\n");
    let mut s = 0.0;
    for g in &road.geometry {
        let start = g.start();
        out.push_str(&format!(
            "      <geometry s=\"{}\" x=\"{}\" y=\"{}\" hdg=\"{}\" length=\"{}\">\n",
            fmt_f64(s),
            fmt_f64(start.position.x),
            fmt_f64(start.position.y),
            fmt_f64(start.heading),
            fmt_f64(g.length())
        ));
        match g {
            Geometry::Line { .. } => out.push_str("        <line/>\n"),
            Geometry::Arc { curvature, .. } => out.push_str(&format!(
                "        <arc curvature=\"{}\"/>\n",
                fmt_f64(*curvature)
            )),
            Geometry::ParamCubic { u, v, .. } => out.push_str(&format!(
                "        <paramPoly3 aU=\"{}\" bU=\"{}\" cU=\"{}\" dU=\"{}\" \
                 aV=\"{}\" bV=\"{}\" cV=\"{}\" dV=\"{}\" pRange=\"normalized\"/>\n",
                fmt_f64(u[0]),
                fmt_f64(u[1]),
                fmt_f64(u[2]),
                fmt_f64(u[3]),
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2]),
                fmt_f64(v[3])
            )),
        }
        out.push_str("      </geometry>\n");
        s += g.length();
    }
    out.push_str("    </planView>\n");

    emit_lanes(out, &road.lanes);
    out.push_str("  </road>\n");
}

fn emit_link(out: &mut String, tag: &str, link: &Link) {
    match (link.target, link.contact) {
        (LinkTarget::Road(id), contact) => {
            let contact = contact.unwrap_or(ContactPoint::Start);
            out.push_str(&format!(
                "      <{tag} elementType=\"road\" elementId=\"{id}\" contactPoint=\"{}\"/>\n",
                contact.as_str()
            ));
        }
        (LinkTarget::Junction(id), _) => {
            out.push_str(&format!(
                "      <{tag} elementType=\"junction\" elementId=\"{id}\"/>\n"
            ));
        }
    }
}

fn emit_lanes(out: &mut String, lanes: &LaneSection) {
    out.push_str("    <lanes>\n");
    out.push_str(&format!("      <laneSection s=\"{}\">\n", fmt_f64(0.0)));
    if !lanes.left.is_empty() {
        let mut left = lanes.left.clone();
        left.sort_by_key(|l| std::cmp::Reverse(l.id));
        out.push_str("        <left>\n");
        for lane in &left {
            emit_lane(out, lane.id, lane.width);
        }
        out.push_str("        </left>\n");
    }
    out.push_str("        <center>\n");
    out.push_str("          <lane id=\"0\" type=\"none\" level=\"false\"/>\n");
    out.push_str("        </center>\n");
    if !lanes.right.is_empty() {
        let mut right = lanes.right.clone();
        right.sort_by_key(|l| std::cmp::Reverse(l.id));
        out.push_str("        <right>\n");
        for lane in &right {
            emit_lane(out, lane.id, lane.width);
        }
        out.push_str("        </right>\n");
    }
    out.push_str("      </laneSection>\n");
    out.push_str("    </lanes>\n");
}

fn emit_lane(out: &mut String, id: i32, width: f64) {
    out.push_str(&format!(
        "          <lane id=\"{id}\" type=\"driving\" level=\"false\">\n"
    ));
    out.push_str(&format!(
        "            <width sOffset=\"{}\" a=\"{}\" b=\"{}\" c=\"{}\" d=\"{}\"/>\n",
        fmt_f64(0.0),
        fmt_f64(width),
        fmt_f64(0.0),
        fmt_f64(0.0),
        fmt_f64(0.0)
    ));
    out.push_str("          </lane>\n");
}

fn emit_junction(out: &mut String, junction: &crate::odr::Junction) {
    out.push_str(&format!(
        "  <junction id=\"{}\" name=\"{}\">\n",
        junction.id,
        escape_xml(&junction.name)
    ));
    for conn in &junction.connections {
        out.push_str(&format!(
            "    <connection id=\"{}\" incomingRoad=\"{}\" connectingRoad=\"{}\" \
             contactPoint=\"{}\">\n",
            conn.id,
            conn.incoming_road,
            conn.connecting_road,
            conn.contact_point.as_str()
        ));
        for ll in &conn.lane_links {
            out.push_str(&format!(
                "      <laneLink from=\"{}\" to=\"{}\"/>\n",
                ll.from, ll.to
            ));
        }
        out.push_str("    </connection>\n");
    }
    out.push_str("  </junction>\n");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose;

    #[test]
    fn fixed_point_formatting() {
        assert_eq!(fmt_f64(38.0), "38.000000000000000");
        assert_eq!(fmt_f64(0.5), "0.50000000000000000");
        assert_eq!(fmt_f64(-0.0), "0.0000000000000000");
        assert!(!fmt_f64(1e-7).contains('e'));
        assert!(!fmt_f64(1e12).contains('e'));
    }

    #[test]
    fn formatting_round_trips_exactly() {
        for &x in &[
            0.1,
            -123.456789,
            std::f64::consts::PI,
            1e-9,
            98765.4321,
            -2.2250738585072014e-3,
        ] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "round trip failed for {x} via {s}");
        }
    }

    #[test]
    fn minimal_single_road_document() {
        let net = RoadNetwork {
            name: "single".into(),
            roads: vec![Road {
                id: 1,
                name: "r".into(),
                geometry: vec![Geometry::line(Pose::new(0.0, 0.0, 0.0), 10.0)],
                lanes: LaneSection::one_sided(1, 3.5, false),
                predecessor: None,
                successor: None,
                junction: None,
            }],
            junctions: vec![],
        };
        let xml = emit_opendrive(&net).unwrap();
        assert!(xml.contains("revMajor=\"1\""));
        assert!(xml.contains("revMinor=\"6\""));
        assert!(xml.contains("<line/>"));
        assert!(xml.contains("length=\"10.000000000000000\""));
    }

    #[test]
    fn emission_is_deterministic() {
        let net = RoadNetwork {
            name: "det".into(),
            roads: vec![Road {
                id: 3,
                name: "r".into(),
                geometry: vec![Geometry::arc(Pose::new(1.0, 2.0, 0.3), 12.0, 0.05)],
                lanes: LaneSection::two_sided(2, 3, 3.5),
                predecessor: None,
                successor: None,
                junction: None,
            }],
            junctions: vec![],
        };
        assert_eq!(emit_opendrive(&net).unwrap(), emit_opendrive(&net).unwrap());
    }
}
