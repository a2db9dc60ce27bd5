//! JSON job configuration and road-definition files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::defs::{Distortion, GenerationParams, IncidentRoadDefinition, TurboParams};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::noise::{NoiseParams, DEFAULT_FREQUENCY};

/// Generator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classic,
    Turbo,
}

/// One incident road definition as stored in JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DefRecord {
    pub x: f64,
    pub y: f64,
    pub heading_rad: f64,
    pub num_left_lanes: u32,
    pub num_right_lanes: u32,
}

impl DefRecord {
    pub fn to_def(&self) -> IncidentRoadDefinition {
        IncidentRoadDefinition::new(
            Point::new(self.x, self.y),
            self.heading_rad,
            self.num_left_lanes,
            self.num_right_lanes,
        )
    }
}

impl From<&IncidentRoadDefinition> for DefRecord {
    fn from(d: &IncidentRoadDefinition) -> Self {
        DefRecord {
            x: d.position.x,
            y: d.position.y,
            heading_rad: d.heading,
            num_left_lanes: d.num_left_lanes,
            num_right_lanes: d.num_right_lanes,
        }
    }
}

/// Parse a JSON array of road definitions.
pub fn parse_defs_json(text: &str) -> Result<Vec<IncidentRoadDefinition>> {
    let records: Vec<DefRecord> = serde_json::from_str(text).map_err(json_err)?;
    Ok(records.iter().map(DefRecord::to_def).collect())
}

fn json_err(e: serde_json::Error) -> Error {
    Error::InvalidDocument {
        message: e.to_string(),
        line: e.line() as u32,
    }
}

/// Distortion overrides; unset fields keep their defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionOverride {
    pub enabled: Option<bool>,
    /// Absolute amplitude in meters; takes precedence over the factor.
    pub amplitude: Option<f64>,
    /// Amplitude as a fraction of the fitted ring radius.
    pub amplitude_factor: Option<f64>,
    pub frequency: Option<f64>,
    pub seed: Option<u64>,
}

/// Generation parameter overrides; unset fields keep their defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub segments_per_ring: Option<usize>,
    pub circulating_lanes: Option<u32>,
    pub lane_width: Option<f64>,
    pub clearance: Option<f64>,
    pub min_incident_length: Option<f64>,
    pub radius_factor: Option<f64>,
    pub translation_distance: Option<f64>,
    pub distortion: Option<DistortionOverride>,
}

/// Output paths of a generation job.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub xodr: PathBuf,
    #[serde(default)]
    pub svg: Option<PathBuf>,
}

/// A full generation job.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub mode: Mode,
    #[serde(default)]
    pub defs: Option<Vec<DefRecord>>,
    #[serde(default)]
    pub defs_file: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: ParamOverrides,
    pub output: OutputSpec,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: JobConfig = serde_json::from_str(text).map_err(json_err)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    fn validate(&self) -> Result<()> {
        match (&self.defs, &self.defs_file) {
            (Some(_), Some(_)) => Err(Error::InvalidParams(
                "config must set exactly one of 'defs' and 'defs_file', found both".into(),
            )),
            (None, None) => Err(Error::InvalidParams(
                "config must set exactly one of 'defs' and 'defs_file', found neither".into(),
            )),
            _ => {
                if self.mode == Mode::Classic && self.params.translation_distance.is_some() {
                    return Err(Error::InvalidParams(
                        "'translation_distance' only applies to turbo mode".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Resolve the definitions, reading `defs_file` relative to `base_dir`.
    pub fn resolve_defs(&self, base_dir: &Path) -> Result<Vec<IncidentRoadDefinition>> {
        if let Some(records) = &self.defs {
            return Ok(records.iter().map(DefRecord::to_def).collect());
        }
        let file = self.defs_file.as_ref().expect("validated at construction");
        let path = if file.is_absolute() {
            file.clone()
        } else {
            base_dir.join(file)
        };
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        parse_defs_json(&text)
    }

    /// Build generation parameters with `seed` already resolved.
    pub fn generation_params(&self, seed: u64) -> GenerationParams {
        let defaults = GenerationParams::default();
        let o = &self.params;
        let distortion = match &o.distortion {
            None => Distortion::Auto,
            Some(d) => {
                if d.enabled == Some(false) {
                    Distortion::Off
                } else if let Some(amplitude) = d.amplitude {
                    Distortion::Fixed(NoiseParams {
                        seed: d.seed.unwrap_or(seed),
                        amplitude,
                        frequency: d.frequency.unwrap_or(DEFAULT_FREQUENCY),
                    })
                } else if d.amplitude_factor.is_some() || d.frequency.is_some() || d.seed.is_some()
                {
                    // factor-relative overrides are resolved against the
                    // fitted radius at generation time
                    Distortion::AutoScaled {
                        amplitude_factor: d
                            .amplitude_factor
                            .unwrap_or(crate::noise::DEFAULT_AMPLITUDE_FACTOR),
                        frequency: d.frequency.unwrap_or(DEFAULT_FREQUENCY),
                        seed: d.seed.unwrap_or(seed),
                    }
                } else {
                    Distortion::Auto
                }
            }
        };
        GenerationParams {
            segments_per_ring: o.segments_per_ring,
            circulating_lanes: o.circulating_lanes.unwrap_or(defaults.circulating_lanes),
            lane_width: o.lane_width.unwrap_or(defaults.lane_width),
            clearance: o.clearance.unwrap_or(defaults.clearance),
            min_incident_length: o
                .min_incident_length
                .unwrap_or(defaults.min_incident_length),
            radius_factor: o.radius_factor.unwrap_or(defaults.radius_factor),
            distortion,
            seed,
        }
    }

    pub fn turbo_params(&self, seed: u64) -> TurboParams {
        TurboParams {
            base: self.generation_params(seed),
            translation_distance: self.params.translation_distance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_def_records() {
        let text = r#"[
            {"x": 40.0, "y": 0.0, "heading_rad": 3.14159, "num_left_lanes": 2, "num_right_lanes": 3}
        ]"#;
        let defs = parse_defs_json(text).unwrap();
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].num_right_lanes, 3);
    }

    #[test]
    fn config_requires_exactly_one_defs_source() {
        let neither = r#"{"mode": "classic", "output": {"xodr": "out.xodr"}}"#;
        assert!(JobConfig::from_json(neither).is_err());
        let both = r#"{
            "mode": "classic",
            "defs": [],
            "defs_file": "defs.json",
            "output": {"xodr": "out.xodr"}
        }"#;
        assert!(JobConfig::from_json(both).is_err());
    }

    #[test]
    fn translation_distance_is_turbo_only() {
        let bad = r#"{
            "mode": "classic",
            "defs": [],
            "params": {"translation_distance": 5.0},
            "output": {"xodr": "out.xodr"}
        }"#;
        assert!(JobConfig::from_json(bad).is_err());
        let good = r#"{
            "mode": "turbo",
            "defs": [],
            "params": {"translation_distance": 5.0},
            "output": {"xodr": "out.xodr"}
        }"#;
        assert!(JobConfig::from_json(good).is_ok());
    }

    #[test]
    fn distortion_override_paths() {
        let absolute = r#"{
            "mode": "classic",
            "defs": [],
            "params": {"distortion": {"amplitude": 0.9, "frequency": 4.0}},
            "output": {"xodr": "o.xodr"}
        }"#;
        let config = JobConfig::from_json(absolute).unwrap();
        match config.generation_params(5).distortion {
            Distortion::Fixed(p) => {
                assert_eq!(p.amplitude, 0.9);
                assert_eq!(p.frequency, 4.0);
                assert_eq!(p.seed, 5);
            }
            other => panic!("expected fixed distortion, got {other:?}"),
        }

        let off = r#"{
            "mode": "classic",
            "defs": [],
            "params": {"distortion": {"enabled": false}},
            "output": {"xodr": "o.xodr"}
        }"#;
        let config = JobConfig::from_json(off).unwrap();
        assert_eq!(config.generation_params(0).distortion, Distortion::Off);
    }
}
