//! Deterministic SVG previews: road centerlines with lane boundaries, plus
//! the normalized-ring superposition view.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Point, Pose, DEFAULT_SAMPLE_STEP};
use crate::odr::RoadNetwork;

fn fmt(v: f64) -> String {
    // fixed three decimals keeps output byte-stable
    format!("{v:.3}")
}

fn path_data(points: impl Iterator<Item = Point>) -> String {
    let mut out = String::new();
    for (i, p) in points.enumerate() {
        // svg y grows downward
        let cmd = if i == 0 { 'M' } else { 'L' };
        out.push_str(&format!("{cmd}{} {} ", fmt(p.x), fmt(-p.y)));
    }
    out.trim_end().to_string()
}

// Boundary offsets left (+) and right (-) of the reference line at the
// cumulative lane widths.
fn lane_offsets(road: &crate::odr::Road) -> Vec<f64> {
    let mut offsets = Vec::new();
    let mut acc = 0.0;
    for lane in &road.lanes.left {
        acc += lane.width;
        offsets.push(acc);
    }
    acc = 0.0;
    for lane in &road.lanes.right {
        acc += lane.width;
        offsets.push(-acc);
    }
    offsets
}

fn offset_points(poses: &[Pose], offset: f64) -> Vec<Point> {
    poses
        .iter()
        .map(|p| {
            p.position
                .offset(offset, p.heading + std::f64::consts::FRAC_PI_2)
        })
        .collect()
}

/// Render the network as a standalone SVG document.
pub fn svg_string(net: &RoadNetwork) -> Result<String> {
    if net.roads.is_empty() {
        return Err(Error::InvalidParams(
            "cannot render an empty network".into(),
        ));
    }
    let mut roads: Vec<&crate::odr::Road> = net.roads.iter().collect();
    roads.sort_by_key(|r| r.id);

    let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
    let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut rendered: Vec<(u32, Vec<Pose>, Vec<f64>)> = Vec::new();
    for road in &roads {
        let poses = road.sample_poses(DEFAULT_SAMPLE_STEP);
        let offsets = lane_offsets(road);
        for pose in &poses {
            for off in std::iter::once(0.0).chain(offsets.iter().copied()) {
                let p = pose
                    .position
                    .offset(off, pose.heading + std::f64::consts::FRAC_PI_2);
                lo_x = lo_x.min(p.x);
                lo_y = lo_y.min(p.y);
                hi_x = hi_x.max(p.x);
                hi_y = hi_y.max(p.y);
            }
        }
        rendered.push((road.id, poses, offsets));
    }

    let margin = 0.1 * (hi_x - lo_x).max(hi_y - lo_y).max(1.0);
    let min_x = lo_x - margin;
    let min_y = -(hi_y + margin);
    let width = hi_x - lo_x + 2.0 * margin;
    let height = hi_y - lo_y + 2.0 * margin;

    let mut out = String::with_capacity(32 * 1024);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        fmt(min_x),
        fmt(min_y),
        fmt(width),
        fmt(height)
    ));
    out.push_str("  <rect x=\"-100000\" y=\"-100000\" width=\"200000\" height=\"200000\" fill=\"#f8f8f5\"/>\n");
    for (id, poses, offsets) in &rendered {
        out.push_str(&format!("  <g class=\"road\" id=\"road-{id}\">\n"));
        for off in offsets {
            out.push_str(&format!(
                "    <path class=\"lane-boundary\" d=\"{}\" fill=\"none\" stroke=\"#b9c0c7\" stroke-width=\"0.25\"/>\n",
                path_data(offset_points(poses, *off).into_iter())
            ));
        }
        out.push_str(&format!(
            "    <path class=\"centerline\" d=\"{}\" fill=\"none\" stroke=\"#2d2f33\" stroke-width=\"0.5\"/>\n",
            path_data(poses.iter().map(|p| p.position))
        ));
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render to a file.
pub fn render_svg(net: &RoadNetwork, path: &Path) -> Result<()> {
    let doc = svg_string(net)?;
    std::fs::write(path, doc).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Superimpose normalized rings (unit mean radius) on the unit circle.
pub fn superposition_svg(rings: &[(String, Vec<Point>)]) -> String {
    let mut out = String::with_capacity(16 * 1024);
    out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.4 -1.4 2.8 2.8\">\n");
    out.push_str("  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.02\"/>\n");
    for (id, points) in rings {
        let mut closed = points.clone();
        if let (Some(first), Some(last)) = (points.first(), points.last()) {
            if first != last {
                closed.push(*first);
            }
        }
        out.push_str(&format!(
            "  <path id=\"ring-{id}\" d=\"{}\" fill=\"none\" stroke=\"#7a9ec9\" stroke-width=\"0.008\"/>\n",
            path_data(closed.into_iter())
        ));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::generate_classic;
    use crate::defs::{GenerationParams, IncidentRoadDefinition};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sample_net() -> RoadNetwork {
        let defs: Vec<IncidentRoadDefinition> = [
            (40.0, 0.0, PI),
            (0.0, 40.0, -FRAC_PI_2),
            (-40.0, 0.0, 0.0),
            (0.0, -40.0, FRAC_PI_2),
        ]
        .iter()
        .map(|&(x, y, h)| IncidentRoadDefinition::new(Point::new(x, y), h, 2, 2))
        .collect();
        generate_classic(&defs, &GenerationParams::default()).unwrap()
    }

    #[test]
    fn one_group_per_road() {
        let net = sample_net();
        let svg = svg_string(&net).unwrap();
        assert_eq!(
            svg.matches("class=\"road\"").count(),
            net.roads.len(),
            "expected one group per road"
        );
        assert_eq!(svg.matches("class=\"centerline\"").count(), net.roads.len());
    }

    #[test]
    fn rendering_is_deterministic() {
        let net = sample_net();
        assert_eq!(svg_string(&net).unwrap(), svg_string(&net).unwrap());
    }

    #[test]
    fn empty_network_rejected() {
        let net = RoadNetwork::default();
        assert!(matches!(
            svg_string(&net),
            Err(Error::InvalidParams(_))
        ));
    }
}
