//! OpenDRIVE parser for the emitter's subset: line, arc and normalized
//! paramPoly3 reference lines, uniform lane widths, links and junctions.
//! Unknown elements are skipped and reported as warnings.

use roxmltree::{Document, Node};

use crate::error::{Error, Result};
use crate::geom::{Geometry, Pose};
use crate::odr::{
    ContactPoint, Junction, JunctionConnection, Lane, LaneLink, LaneSection, Link,
    Road, RoadNetwork,
};

/// Parse result: the network plus warnings about ignored content.
#[derive(Debug)]
pub struct Parsed {
    pub network: RoadNetwork,
    pub warnings: Vec<String>,
}

struct Ctx<'a, 'input> {
    doc: &'a Document<'input>,
    warnings: Vec<String>,
}

impl<'a, 'input> Ctx<'a, 'input> {
    fn line_of(&self, node: Node) -> u32 {
        self.doc.text_pos_at(node.range().start).row
    }

    fn warn_unknown(&mut self, node: Node, context: &str) {
        self.warnings.push(format!(
            "ignored element <{}> inside <{}> at line {}",
            node.tag_name().name(),
            context,
            self.line_of(node)
        ));
    }

    fn req_attr(&self, node: Node, name: &str) -> Result<String> {
        node.attribute(name)
            .map(str::to_string)
            .ok_or_else(|| Error::MissingAttribute {
                element: node.tag_name().name().to_string(),
                attribute: name.to_string(),
                line: self.line_of(node),
            })
    }

    fn req_f64(&self, node: Node, name: &str) -> Result<f64> {
        let raw = self.req_attr(node, name)?;
        raw.parse::<f64>().map_err(|e| Error::BadAttribute {
            element: node.tag_name().name().to_string(),
            attribute: name.to_string(),
            line: self.line_of(node),
            message: format!("{e}: '{raw}'"),
        })
    }

    fn req_u32(&self, node: Node, name: &str) -> Result<u32> {
        let raw = self.req_attr(node, name)?;
        raw.parse::<u32>().map_err(|e| Error::BadAttribute {
            element: node.tag_name().name().to_string(),
            attribute: name.to_string(),
            line: self.line_of(node),
            message: format!("{e}: '{raw}'"),
        })
    }

    fn req_i32(&self, node: Node, name: &str) -> Result<i32> {
        let raw = self.req_attr(node, name)?;
        raw.parse::<i32>().map_err(|e| Error::BadAttribute {
            element: node.tag_name().name().to_string(),
            attribute: name.to_string(),
            line: self.line_of(node),
            message: format!("{e}: '{raw}'"),
        })
    }
}

/// Parse an OpenDRIVE document.
pub fn parse_opendrive(text: &str) -> Result<Parsed> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::MalformedXml {
            line: pos.row,
            col: pos.col,
            message: e.to_string(),
        }
    })?;
    let mut ctx = Ctx {
        doc: &doc,
        warnings: Vec::new(),
    };

    let root = doc.root_element();
    if root.tag_name().name() != "OpenDRIVE" {
        return Err(Error::InvalidDocument {
            message: format!(
                "root element must be <OpenDRIVE>, found <{}>",
                root.tag_name().name()
            ),
            line: ctx.line_of(root),
        });
    }

    let mut network = RoadNetwork::default();
    for child in root.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "header" => {
                network.name = child.attribute("name").unwrap_or("").to_string();
            }
            "road" => network.roads.push(parse_road(&mut ctx, child)?),
            "junction" => network.junctions.push(parse_junction(&mut ctx, child)?),
            _ => ctx.warn_unknown(child, "OpenDRIVE"),
        }
    }
    Ok(Parsed {
        network,
        warnings: ctx.warnings,
    })
}

fn parse_road(ctx: &mut Ctx, node: Node) -> Result<Road> {
    let id = ctx.req_u32(node, "id")?;
    let name = node.attribute("name").unwrap_or("").to_string();
    let junction = match node.attribute("junction") {
        None | Some("-1") => None,
        Some(raw) => Some(raw.parse::<u32>().map_err(|e| Error::BadAttribute {
            element: "road".into(),
            attribute: "junction".into(),
            line: ctx.line_of(node),
            message: format!("{e}: '{raw}'"),
        })?),
    };

    let mut road = Road {
        id,
        name,
        geometry: Vec::new(),
        lanes: LaneSection::default(),
        predecessor: None,
        successor: None,
        junction,
    };

    for child in node.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "link" => parse_road_link(ctx, child, &mut road)?,
            "planView" => {
                for geom_node in child.children().filter(Node::is_element) {
                    if geom_node.tag_name().name() == "geometry" {
                        road.geometry.push(parse_geometry(ctx, geom_node)?);
                    } else {
                        ctx.warn_unknown(geom_node, "planView");
                    }
                }
            }
            "lanes" => parse_lanes(ctx, child, &mut road.lanes)?,
            _ => ctx.warn_unknown(child, "road"),
        }
    }

    if road.geometry.is_empty() {
        return Err(Error::InvalidDocument {
            message: format!("road {id} has no planView geometry"),
            line: ctx.line_of(node),
        });
    }
    Ok(road)
}

fn parse_road_link(ctx: &mut Ctx, node: Node, road: &mut Road) -> Result<()> {
    for child in node.children().filter(Node::is_element) {
        let tag = child.tag_name().name();
        if tag != "predecessor" && tag != "successor" {
            ctx.warn_unknown(child, "link");
            continue;
        }
        let element_type = ctx.req_attr(child, "elementType")?;
        let element_id = ctx.req_u32(child, "elementId")?;
        let link = match element_type.as_str() {
            "road" => {
                let contact = match ctx.req_attr(child, "contactPoint")?.as_str() {
                    "start" => ContactPoint::Start,
                    "end" => ContactPoint::End,
                    other => {
                        return Err(Error::BadAttribute {
                            element: tag.to_string(),
                            attribute: "contactPoint".into(),
                            line: ctx.line_of(child),
                            message: format!("expected 'start' or 'end', got '{other}'"),
                        })
                    }
                };
                Link::road(element_id, contact)
            }
            "junction" => Link::junction(element_id),
            other => {
                return Err(Error::BadAttribute {
                    element: tag.to_string(),
                    attribute: "elementType".into(),
                    line: ctx.line_of(child),
                    message: format!("expected 'road' or 'junction', got '{other}'"),
                })
            }
        };
        if tag == "predecessor" {
            road.predecessor = Some(link);
        } else {
            road.successor = Some(link);
        }
    }
    Ok(())
}

fn parse_geometry(ctx: &mut Ctx, node: Node) -> Result<Geometry> {
    let x = ctx.req_f64(node, "x")?;
    let y = ctx.req_f64(node, "y")?;
    let hdg = ctx.req_f64(node, "hdg")?;
    let length = ctx.req_f64(node, "length")?;
    if !(length > 0.0) {
        return Err(Error::BadAttribute {
            element: "geometry".into(),
            attribute: "length".into(),
            line: ctx.line_of(node),
            message: format!("length must be positive, got {length}"),
        });
    }
    let start = Pose::new(x, y, hdg);

    let kind = node
        .children()
        .filter(Node::is_element)
        .next()
        .ok_or_else(|| Error::InvalidDocument {
            message: "geometry element without a reference-line primitive".into(),
            line: ctx.line_of(node),
        })?;
    match kind.tag_name().name() {
        "line" => Ok(Geometry::Line { start, length }),
        "arc" => {
            let curvature = ctx.req_f64(kind, "curvature")?;
            if curvature == 0.0 {
                return Err(Error::BadAttribute {
                    element: "arc".into(),
                    attribute: "curvature".into(),
                    line: ctx.line_of(kind),
                    message: "arc curvature must be nonzero".into(),
                });
            }
            Ok(Geometry::Arc {
                start,
                length,
                curvature,
            })
        }
        "paramPoly3" => {
            if let Some(range) = kind.attribute("pRange") {
                if range != "normalized" {
                    return Err(Error::BadAttribute {
                        element: "paramPoly3".into(),
                        attribute: "pRange".into(),
                        line: ctx.line_of(kind),
                        message: format!("only normalized pRange is supported, got '{range}'"),
                    });
                }
            }
            let u = [
                ctx.req_f64(kind, "aU")?,
                ctx.req_f64(kind, "bU")?,
                ctx.req_f64(kind, "cU")?,
                ctx.req_f64(kind, "dU")?,
            ];
            let v = [
                ctx.req_f64(kind, "aV")?,
                ctx.req_f64(kind, "bV")?,
                ctx.req_f64(kind, "cV")?,
                ctx.req_f64(kind, "dV")?,
            ];
            Ok(Geometry::param_cubic_with_length(start, length, u, v))
        }
        other => Err(Error::UnsupportedGeometry {
            name: other.to_string(),
            line: ctx.line_of(kind),
        }),
    }
}

fn parse_lanes(ctx: &mut Ctx, node: Node, lanes: &mut LaneSection) -> Result<()> {
    for section in node.children().filter(Node::is_element) {
        if section.tag_name().name() != "laneSection" {
            ctx.warn_unknown(section, "lanes");
            continue;
        }
        for side in section.children().filter(Node::is_element) {
            let side_name = side.tag_name().name();
            if side_name == "center" {
                continue;
            }
            if side_name != "left" && side_name != "right" {
                ctx.warn_unknown(side, "laneSection");
                continue;
            }
            for lane_node in side.children().filter(Node::is_element) {
                if lane_node.tag_name().name() != "lane" {
                    ctx.warn_unknown(lane_node, side_name);
                    continue;
                }
                let id = ctx.req_i32(lane_node, "id")?;
                if id == 0 {
                    continue;
                }
                let width = lane_node
                    .children()
                    .filter(Node::is_element)
                    .find(|n| n.tag_name().name() == "width")
                    .map(|w| ctx.req_f64(w, "a"))
                    .transpose()?
                    .unwrap_or(0.0);
                let lane = Lane { id, width };
                if id > 0 {
                    lanes.left.push(lane);
                } else {
                    lanes.right.push(lane);
                }
            }
        }
    }
    Ok(())
}

fn parse_junction(ctx: &mut Ctx, node: Node) -> Result<Junction> {
    let id = ctx.req_u32(node, "id")?;
    let name = node.attribute("name").unwrap_or("").to_string();
    let mut connections = Vec::new();
    for child in node.children().filter(Node::is_element) {
        if child.tag_name().name() != "connection" {
            ctx.warn_unknown(child, "junction");
            continue;
        }
        let contact_point = match ctx.req_attr(child, "contactPoint")?.as_str() {
            "start" => ContactPoint::Start,
            "end" => ContactPoint::End,
            other => {
                return Err(Error::BadAttribute {
                    element: "connection".into(),
                    attribute: "contactPoint".into(),
                    line: ctx.line_of(child),
                    message: format!("expected 'start' or 'end', got '{other}'"),
                })
            }
        };
        let mut conn = JunctionConnection {
            id: ctx.req_u32(child, "id")?,
            incoming_road: ctx.req_u32(child, "incomingRoad")?,
            connecting_road: ctx.req_u32(child, "connectingRoad")?,
            contact_point,
            lane_links: Vec::new(),
        };
        for ll in child.children().filter(Node::is_element) {
            if ll.tag_name().name() != "laneLink" {
                ctx.warn_unknown(ll, "connection");
                continue;
            }
            conn.lane_links.push(LaneLink {
                from: ctx.req_i32(ll, "from")?,
                to: ctx.req_i32(ll, "to")?,
            });
        }
        connections.push(conn);
    }
    Ok(Junction {
        id,
        name,
        connections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odr::emit::emit_opendrive;

    fn two_road_net() -> RoadNetwork {
        let a = Geometry::line(Pose::new(0.0, 0.0, 0.0), 10.0);
        let b = Geometry::arc(a.end(), 5.0, 0.02);
        RoadNetwork {
            name: "roundtrip".into(),
            roads: vec![
                Road {
                    id: 1,
                    name: "a".into(),
                    geometry: vec![a],
                    lanes: LaneSection::two_sided(1, 2, 3.5),
                    predecessor: None,
                    successor: Some(Link::road(2, ContactPoint::Start)),
                    junction: None,
                },
                Road {
                    id: 2,
                    name: "b".into(),
                    geometry: vec![b],
                    lanes: LaneSection::two_sided(1, 2, 3.5),
                    predecessor: Some(Link::road(1, ContactPoint::End)),
                    successor: None,
                    junction: None,
                },
            ],
            junctions: vec![],
        }
    }

    #[test]
    fn emit_parse_emit_is_byte_identical() {
        let net = two_road_net();
        let first = emit_opendrive(&net).unwrap();
        let parsed = parse_opendrive(&first).unwrap();
        assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
        let second = emit_opendrive(&parsed.network).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn spiral_geometry_is_rejected_by_name() {
        let xml = r#"<?xml version="1.0"?>
<OpenDRIVE>
  <road id="1" name="s" length="10.0" junction="-1">
    <planView>
      <geometry s="0.0" x="0.0" y="0.0" hdg="0.0" length="10.0">
        <spiral curvStart="0.0" curvEnd="0.01"/>
      </geometry>
    </planView>
    <lanes><laneSection s="0.0"><center><lane id="0" type="none" level="false"/></center></laneSection></lanes>
  </road>
</OpenDRIVE>"#;
        match parse_opendrive(xml) {
            Err(Error::UnsupportedGeometry { name, line }) => {
                assert_eq!(name, "spiral");
                assert!(line > 1);
            }
            other => panic!("expected unsupported geometry, got {other:?}"),
        }
    }

    #[test]
    fn truncated_document_is_malformed() {
        let full = emit_opendrive(&two_road_net()).unwrap();
        let truncated = &full[..full.len() / 2];
        assert!(matches!(
            parse_opendrive(truncated),
            Err(Error::MalformedXml { .. })
        ));
    }

    #[test]
    fn missing_attribute_names_element_and_line() {
        let xml = r#"<?xml version="1.0"?>
<OpenDRIVE>
  <road name="nold" length="10.0" junction="-1">
    <planView>
      <geometry s="0" x="0" y="0" hdg="0" length="10"><line/></geometry>
    </planView>
  </road>
</OpenDRIVE>"#;
        match parse_opendrive(xml) {
            Err(Error::MissingAttribute {
                element,
                attribute,
                line,
            }) => {
                assert_eq!(element, "road");
                assert_eq!(attribute, "id");
                assert_eq!(line, 3);
            }
            other => panic!("expected missing attribute, got {other:?}"),
        }
    }

    #[test]
    fn unknown_elements_warn_but_parse() {
        let xml = r#"<?xml version="1.0"?>
<OpenDRIVE>
  <header revMajor="1" revMinor="6" name="w"/>
  <road id="1" name="r" length="10.0" junction="-1">
    <elevationProfile/>
    <planView>
      <geometry s="0" x="0" y="0" hdg="0" length="10"><line/></geometry>
    </planView>
  </road>
</OpenDRIVE>"#;
        let parsed = parse_opendrive(xml).unwrap();
        assert_eq!(parsed.network.roads.len(), 1);
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("elevationProfile"));
    }
}
