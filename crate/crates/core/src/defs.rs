//! Incident road definitions and generation parameters.

use crate::error::{Error, Result};
use crate::geom::{normalize_angle, Point};
use crate::noise::NoiseParams;

/// Anchors one approach road: where it meets the roundabout area, which way
/// it points, and how many lanes it carries on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentRoadDefinition {
    pub position: Point,
    /// Normalized heading of the approach at its anchor point.
    pub heading: f64,
    /// Lanes on the left of the reference line (travel away from the ring).
    pub num_left_lanes: u32,
    /// Lanes on the right of the reference line (travel toward the ring).
    pub num_right_lanes: u32,
}

impl IncidentRoadDefinition {
    pub fn new(position: Point, heading: f64, num_left_lanes: u32, num_right_lanes: u32) -> Self {
        IncidentRoadDefinition {
            position,
            heading: normalize_angle(heading),
            num_left_lanes,
            num_right_lanes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_left_lanes + self.num_right_lanes < 1 {
            return Err(Error::InvalidParams(
                "an incident road needs at least one lane".into(),
            ));
        }
        Ok(())
    }
}

/// Ring distortion selection.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Distortion {
    /// Perfectly circular ring.
    Off,
    /// Noise with amplitude scaled to the fitted radius and the generation
    /// seed.
    #[default]
    Auto,
    /// Radius-relative amplitude with explicit frequency and seed.
    AutoScaled {
        amplitude_factor: f64,
        frequency: f64,
        seed: u64,
    },
    /// Explicit noise parameters.
    Fixed(NoiseParams),
}

pub const DEFAULT_LANE_WIDTH: f64 = 3.5;
pub const DEFAULT_CIRCULATING_LANES: u32 = 2;
pub const DEFAULT_CLEARANCE: f64 = 2.0;
pub const DEFAULT_MIN_INCIDENT_LENGTH: f64 = 5.0;

/// Knobs shared by both generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationParams {
    /// Ring segment count; `None` picks three per incident road with a floor
    /// of twelve.
    pub segments_per_ring: Option<usize>,
    pub circulating_lanes: u32,
    pub lane_width: f64,
    /// Minimum distance kept between non-adjacent roads.
    pub clearance: f64,
    pub min_incident_length: f64,
    /// Scale of the minimum center-to-incident distance used as ring radius.
    pub radius_factor: f64,
    pub distortion: Distortion,
    pub seed: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            segments_per_ring: None,
            circulating_lanes: DEFAULT_CIRCULATING_LANES,
            lane_width: DEFAULT_LANE_WIDTH,
            clearance: DEFAULT_CLEARANCE,
            min_incident_length: DEFAULT_MIN_INCIDENT_LENGTH,
            radius_factor: crate::fit::DEFAULT_RADIUS_FACTOR,
            distortion: Distortion::Auto,
            seed: 0,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self, incident_count: usize) -> Result<()> {
        if self.circulating_lanes < 1 {
            return Err(Error::InvalidParams(
                "the ring needs at least one circulating lane".into(),
            ));
        }
        if !(self.lane_width > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lane width must be positive, got {}",
                self.lane_width
            )));
        }
        if !(self.clearance > 0.0) {
            return Err(Error::InvalidParams(format!(
                "clearance must be positive, got {}",
                self.clearance
            )));
        }
        if !(self.min_incident_length > 0.0) {
            return Err(Error::InvalidParams(format!(
                "minimum incident length must be positive, got {}",
                self.min_incident_length
            )));
        }
        if let Some(n) = self.segments_per_ring {
            if n < 2 * incident_count {
                return Err(Error::InvalidParams(format!(
                    "{n} ring segments is too few for {incident_count} incident roads \
                     (need at least {})",
                    2 * incident_count
                )));
            }
            if n < 4 {
                return Err(Error::InvalidParams(format!(
                    "the ring needs at least 4 segments, got {n}"
                )));
            }
        }
        Ok(())
    }

    /// Resolved ring segment count for a given number of incident roads.
    pub fn ring_segments(&self, incident_count: usize) -> usize {
        self.segments_per_ring
            .unwrap_or_else(|| (3 * incident_count).max(12))
    }

    /// Resolved noise parameters for a given ring radius.
    pub fn resolved_noise(&self, radius: f64) -> Option<NoiseParams> {
        match self.distortion {
            Distortion::Off => None,
            Distortion::Auto => Some(NoiseParams::scaled_default(radius, self.seed)),
            Distortion::AutoScaled {
                amplitude_factor,
                frequency,
                seed,
            } => Some(NoiseParams {
                seed,
                amplitude: amplitude_factor * radius,
                frequency,
            }),
            Distortion::Fixed(p) => Some(p),
        }
    }
}

/// Parameters specific to the spiral-ring generator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TurboParams {
    pub base: GenerationParams,
    /// Separation of the two half-ring centers; `None` derives one lane
    /// system's width (circulating lanes times lane width).
    pub translation_distance: Option<f64>,
}

impl TurboParams {
    pub fn resolved_translation(&self) -> f64 {
        self.translation_distance
            .unwrap_or(self.base.circulating_lanes as f64 * self.base.lane_width)
    }

    pub fn validate(&self, incident_count: usize) -> Result<()> {
        self.base.validate(incident_count)?;
        if !(self.resolved_translation() > 0.0) {
            return Err(Error::InvalidParams(format!(
                "translation distance must be positive, got {}",
                self.resolved_translation()
            )));
        }
        Ok(())
    }
}

pub(crate) fn validate_defs(defs: &[IncidentRoadDefinition]) -> Result<()> {
    if defs.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "at least 3 incident road definitions are required, got {}",
            defs.len()
        )));
    }
    for d in defs {
        d.validate()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_is_normalized_on_construction() {
        let d = IncidentRoadDefinition::new(Point::new(1.0, 2.0), 3.0 * std::f64::consts::PI, 1, 1);
        assert!((d.heading - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn laneless_definition_rejected() {
        let d = IncidentRoadDefinition::new(Point::new(0.0, 0.0), 0.0, 0, 0);
        assert!(d.validate().is_err());
    }

    #[test]
    fn segment_count_floor() {
        let p = GenerationParams::default();
        assert_eq!(p.ring_segments(3), 12);
        assert_eq!(p.ring_segments(4), 12);
        assert_eq!(p.ring_segments(5), 15);
    }

    #[test]
    fn explicit_segment_count_validated_against_defs() {
        let p = GenerationParams {
            segments_per_ring: Some(6),
            ..Default::default()
        };
        assert!(p.validate(4).is_err());
        assert!(p.validate(3).is_ok());
    }

    #[test]
    fn turbo_translation_defaults_to_one_lane_system() {
        let t = TurboParams::default();
        assert!((t.resolved_translation() - 7.0).abs() < 1e-12);
    }
}
