//! Procedural generation of classic and turbo roundabout road networks.
//!
//! Given a set of incident road definitions (position, heading and lane
//! counts of each approach), the generator fits a base circle to the
//! incident points, builds a segmented circular ring (optionally distorted by
//! seeded gradient noise), extends straight incident roads toward the ring
//! and joins them with parametric-cubic connection roads. Networks serialize
//! to OpenDRIVE 1.6 XML; an analysis module measures the distribution of the
//! centerline radius and its derivative across generated populations.

pub mod classic;
pub mod config;
pub mod defs;
pub mod era;
pub mod error;
pub mod fit;
pub mod geom;
pub mod noise;
pub mod odr;
pub mod svg;
pub mod turbo;

pub use classic::{generate_classic, CircularSegment};
pub use defs::{Distortion, GenerationParams, IncidentRoadDefinition, TurboParams};
pub use error::{Error, Result};
pub use fit::{find_maximal_circle, Circle};
pub use geom::{Geometry, Point, Polyline, Pose};
pub use noise::NoiseParams;
pub use odr::{emit_opendrive, parse_opendrive, validate_links, RoadNetwork};
pub use turbo::{generate_turbo, CompatiblePair};
