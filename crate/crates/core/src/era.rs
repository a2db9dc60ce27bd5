//! Expressive-range analysis: centerline radius series, their derivatives,
//! summary statistics, randomized road-definition batches and batch reports.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classic::generate_classic;
use crate::defs::{GenerationParams, IncidentRoadDefinition, TurboParams};
use crate::error::{Error, Result};
use crate::fit::{fit_center_least_squares, find_maximal_circle_with_factor, Circle};
use crate::geom::Point;
use crate::odr::{LinkTarget, RoadNetwork};
use crate::turbo::generate_turbo;

/// Input radius band of the randomized road-definition process.
pub const DEFAULT_INPUT_RADIUS_RANGE: (f64, f64) = (35.0, 45.0);

/// Centerline radius as a function of arc position along the ring.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSeries {
    pub id: String,
    /// Center the radii are measured from.
    pub center: Point,
    /// Total arc length of the closed ring.
    pub ring_length: f64,
    /// (arc position, radius) samples with strictly increasing positions.
    pub samples: Vec<(f64, f64)>,
}

impl RadiusSeries {
    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|&(_, r)| r).collect()
    }
}

/// Sample moments of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EraSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// True when the input had zero variance and the shape moments were
    /// reported as zero by convention.
    pub degenerate: bool,
}

/// Road ids forming the closed circular chain, in travel order starting from
/// the smallest id in the cycle.
pub fn ring_road_ids(net: &RoadNetwork) -> Result<Vec<u32>> {
    let non_junction: BTreeSet<u32> = net
        .roads
        .iter()
        .filter(|r| r.junction.is_none())
        .map(|r| r.id)
        .collect();
    let mut succ: BTreeMap<u32, u32> = BTreeMap::new();
    for road in net.roads.iter().filter(|r| r.junction.is_none()) {
        if let Some(link) = &road.successor {
            if let LinkTarget::Road(next) = link.target {
                if non_junction.contains(&next) {
                    succ.insert(road.id, next);
                }
            }
        }
    }
    let mut visited: BTreeSet<u32> = BTreeSet::new();
    for &start in succ.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut path: Vec<u32> = Vec::new();
        let mut seen_at: BTreeMap<u32, usize> = BTreeMap::new();
        let mut cur = start;
        loop {
            if let Some(&pos) = seen_at.get(&cur) {
                let cycle = &path[pos..];
                // canonical order: rotate so the smallest id leads
                let min_pos = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, id)| **id)
                    .map(|(i, _)| i)
                    .unwrap();
                let mut out = Vec::with_capacity(cycle.len());
                out.extend_from_slice(&cycle[min_pos..]);
                out.extend_from_slice(&cycle[..min_pos]);
                return Ok(out);
            }
            visited.insert(cur);
            seen_at.insert(cur, path.len());
            path.push(cur);
            match succ.get(&cur) {
                Some(&next) => cur = next,
                None => break,
            }
        }
    }
    Err(Error::NoRing(
        "the network contains no closed chain of circular roads".into(),
    ))
}

/// Estimate the ring center of a parsed network by fitting a circle to the
/// sampled ring centerline.
pub fn ring_center_estimate(net: &RoadNetwork) -> Result<Circle> {
    let ids = ring_road_ids(net)?;
    let mut pts: Vec<Point> = Vec::new();
    for id in &ids {
        let road = net.road(*id).expect("ring road ids come from the network");
        pts.extend(road.sample_points(1.0));
    }
    let center = fit_center_least_squares(&pts)?;
    let radius = pts.iter().map(|p| p.distance(center)).sum::<f64>() / pts.len() as f64;
    Ok(Circle { center, radius })
}

/// Sample the ring centerline at arc spacing no coarser than `step` and
/// measure the distance of each sample from `center`.
pub fn radius_series(net: &RoadNetwork, center: Point, step: f64) -> Result<RadiusSeries> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!(
            "sampling step must be positive, got {step}"
        )));
    }
    let ids = ring_road_ids(net)?;
    // arc-length spans of every geometry along the chain
    let mut spans: Vec<(f64, &crate::geom::Geometry)> = Vec::new();
    let mut total = 0.0;
    for id in &ids {
        let road = net.road(*id).expect("ring road ids come from the network");
        for g in &road.geometry {
            spans.push((total, g));
            total += g.length();
        }
    }
    let count = (total / step).ceil() as usize;
    let mut samples = Vec::with_capacity(count);
    let mut span_idx = 0;
    for k in 0..count {
        let s = k as f64 * total / count as f64;
        while span_idx + 1 < spans.len() && spans[span_idx + 1].0 <= s {
            span_idx += 1;
        }
        let (s0, g) = spans[span_idx];
        let t = ((s - s0) / g.length()).clamp(0.0, 1.0);
        let p = g.point_at(t);
        samples.push((s, p.distance(center)));
    }
    Ok(RadiusSeries {
        id: net.name.clone(),
        center,
        ring_length: total,
        samples,
    })
}

/// Central-difference derivative of a radius series, wrapping periodically at
/// the ring closure. Output length equals input length.
pub fn radius_derivative(series: &RadiusSeries) -> Result<Vec<(f64, f64)>> {
    let n = series.samples.len();
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "derivative needs at least 3 samples, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (s_prev, r_prev) = series.samples[(i + n - 1) % n];
        let (s, _) = series.samples[i];
        let (s_next, r_next) = series.samples[(i + 1) % n];
        let mut ds = s_next - s_prev;
        if ds <= 0.0 {
            ds += series.ring_length;
        }
        out.push((s, (r_next - r_prev) / ds));
    }
    Ok(out)
}

/// Population moments of a value series. Zero-variance inputs report zero
/// skewness and kurtosis with the degenerate flag set.
pub fn summarize(values: &[f64]) -> Result<EraSummary> {
    if values.len() < 4 {
        return Err(Error::InvalidParams(format!(
            "summary needs at least 4 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if m2 == 0.0 {
        return Ok(EraSummary {
            mean,
            std_dev: 0.0,
            skewness: 0.0,
            excess_kurtosis: 0.0,
            degenerate: true,
        });
    }
    let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    Ok(EraSummary {
        mean,
        std_dev: m2.sqrt(),
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        degenerate: false,
    })
}

/// Randomized road definitions: a circle with radius uniform in
/// `radius_range`, `n` points on it with pairwise angular separation at least
/// pi/n, headings pointing inward with a uniform perturbation in
/// [-pi/4, pi/4], and lane counts drawn from {2, 3}.
///
/// Draws are rejection-sampled until the approach corridors stay apart:
/// angular separation alone does not stop two perturbed headings from aiming
/// across each other, which no roundabout can connect.
pub fn random_road_defs(
    n: usize,
    seed: u64,
    radius_range: (f64, f64),
) -> Result<Vec<IncidentRoadDefinition>> {
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "a roundabout needs at least 3 incident roads, got {n}"
        )));
    }
    let (lo, hi) = radius_range;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidParams(format!(
            "invalid radius range [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = rng.gen_range(lo..=hi);
    let min_sep = PI / n as f64;
    let mut attempts = 0usize;
    loop {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::Infeasible(format!(
                "could not place {n} approach corridors around the circle"
            )));
        }
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut ok = true;
        for i in 0..n {
            let gap = if i + 1 == n {
                angles[0] + TAU - angles[n - 1]
            } else {
                angles[i + 1] - angles[i]
            };
            if gap < min_sep {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let defs: Vec<IncidentRoadDefinition> = angles
            .iter()
            .map(|&theta| {
                let position = Point::new(radius * theta.cos(), radius * theta.sin());
                let heading = theta + PI + rng.gen_range(-FRAC_PI_4..=FRAC_PI_4);
                let left = rng.gen_range(2..=3u32);
                let right = rng.gen_range(2..=3u32);
                IncidentRoadDefinition::new(position, heading, left, right)
            })
            .collect();
        if corridors_are_separated(&defs, radius) {
            return Ok(defs);
        }
    }
}

// Straight-road corridors under the default radius rule: each approach runs
// from its anchor toward the ring until it reaches the ring neighborhood or
// its closest approach to the center. Corridors closer than two road widths
// leave no room for connection roads.
fn corridors_are_separated(defs: &[IncidentRoadDefinition], input_radius: f64) -> bool {
    const CORRIDOR_GAP: f64 = 10.0;
    let ring_radius = crate::fit::DEFAULT_RADIUS_FACTOR * input_radius;
    let stop_radius = ring_radius + 1.0;
    let center = Point::new(0.0, 0.0);
    let corridors: Vec<crate::geom::Polyline> = defs
        .iter()
        .map(|d| {
            let dist = d.position.distance(center);
            let psi = crate::geom::normalize_angle(d.heading - d.position.bearing_to(center));
            let closest = dist * psi.cos();
            let miss = dist * psi.sin().abs();
            let length = if miss >= stop_radius {
                closest
            } else {
                closest - (stop_radius * stop_radius - miss * miss).sqrt()
            };
            let end = d.position.offset(length.max(1.0), d.heading);
            crate::geom::Polyline::new(vec![d.position, end])
        })
        .collect();
    for i in 0..corridors.len() {
        for j in (i + 1)..corridors.len() {
            if !crate::geom::clearance_at_least(&corridors[i], &corridors[j], CORRIDOR_GAP) {
                return false;
            }
        }
    }
    true
}

/// One batch entry: an instance id, its definitions and its seed.
#[derive(Debug, Clone)]
pub struct BatchInstance {
    pub id: String,
    pub n_ways: usize,
    pub seed: u64,
    pub defs: Vec<IncidentRoadDefinition>,
}

/// Which generator a batch runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    Classic,
    Turbo,
}

/// Batch evaluation options.
#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub mode: BatchMode,
    pub params: GenerationParams,
    pub translation_distance: Option<f64>,
    pub step: f64,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            mode: BatchMode::Classic,
            params: GenerationParams::default(),
            translation_distance: None,
            step: crate::geom::DEFAULT_SAMPLE_STEP,
        }
    }
}

/// Per-instance report row.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceRow {
    pub instance_id: String,
    pub n_ways: usize,
    pub mean_radius: f64,
    pub std_radius: f64,
    pub skew: f64,
    pub excess_kurtosis: f64,
    pub deriv_mean: f64,
    pub deriv_kurtosis: f64,
}

/// A generation or analysis failure inside a batch.
#[derive(Debug, Clone, Serialize)]
pub struct BatchFailure {
    pub instance_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Batch-level aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct BatchAggregate {
    pub instances_ok: usize,
    pub instances_failed: usize,
    pub median_mean_radius: f64,
    pub deriv_mean: f64,
    pub deriv_excess_kurtosis: f64,
    pub radius_histogram: Vec<HistogramBin>,
}

/// Retained series for downstream artifact writing.
#[derive(Debug, Clone)]
pub struct InstanceSeries {
    pub id: String,
    pub series: RadiusSeries,
    pub derivative: Vec<(f64, f64)>,
}

/// Full batch report.
#[derive(Debug, Clone)]
pub struct BatchReport {
    pub rows: Vec<InstanceRow>,
    pub failures: Vec<BatchFailure>,
    pub aggregate: BatchAggregate,
    pub series: Vec<InstanceSeries>,
}

/// Build a report row from a measured series.
pub fn instance_row(
    id: &str,
    n_ways: usize,
    series: &RadiusSeries,
    derivative: &[(f64, f64)],
) -> Result<InstanceRow> {
    let radius_summary = summarize(&series.radii())?;
    let deriv_values: Vec<f64> = derivative.iter().map(|&(_, d)| d).collect();
    let deriv_summary = summarize(&deriv_values)?;
    Ok(InstanceRow {
        instance_id: id.to_string(),
        n_ways,
        mean_radius: radius_summary.mean,
        std_radius: radius_summary.std_dev,
        skew: radius_summary.skewness,
        excess_kurtosis: radius_summary.excess_kurtosis,
        deriv_mean: deriv_summary.mean,
        deriv_kurtosis: deriv_summary.excess_kurtosis,
    })
}

/// Generate every instance, measure it, and assemble per-instance rows plus
/// batch aggregates. Instance failures are recorded and the batch continues.
pub fn era_batch(instances: &[BatchInstance], options: &BatchOptions) -> BatchReport {
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut series_out = Vec::new();
    let mut pooled_radii: Vec<f64> = Vec::new();
    let mut pooled_derivs: Vec<f64> = Vec::new();

    for instance in instances {
        let params = GenerationParams {
            seed: instance.seed,
            ..options.params
        };
        let generated = match options.mode {
            BatchMode::Classic => generate_classic(&instance.defs, &params),
            BatchMode::Turbo => generate_turbo(
                &instance.defs,
                &TurboParams {
                    base: params,
                    translation_distance: options.translation_distance,
                },
            ),
        };
        let outcome = generated.and_then(|net| {
            let circle = find_maximal_circle_with_factor(&instance.defs, params.radius_factor)?;
            let series = radius_series(&net, circle.center, options.step)?;
            let derivative = radius_derivative(&series)?;
            let row = instance_row(&instance.id, instance.n_ways, &series, &derivative)?;
            Ok((series, derivative, row))
        });
        match outcome {
            Ok((series, derivative, row)) => {
                pooled_radii.extend(series.radii());
                pooled_derivs.extend(derivative.iter().map(|&(_, d)| d));
                rows.push(row);
                series_out.push(InstanceSeries {
                    id: instance.id.clone(),
                    series,
                    derivative,
                });
            }
            Err(e) => failures.push(BatchFailure {
                instance_id: instance.id.clone(),
                message: e.to_string(),
            }),
        }
    }

    let aggregate = BatchAggregate {
        instances_ok: rows.len(),
        instances_failed: failures.len(),
        median_mean_radius: median(rows.iter().map(|r| r.mean_radius).collect()),
        deriv_mean: if pooled_derivs.is_empty() {
            0.0
        } else {
            pooled_derivs.iter().sum::<f64>() / pooled_derivs.len() as f64
        },
        deriv_excess_kurtosis: summarize(&pooled_derivs)
            .map(|s| s.excess_kurtosis)
            .unwrap_or(0.0),
        radius_histogram: histogram(&pooled_radii, 1.0),
    };
    BatchReport {
        rows,
        failures,
        aggregate,
        series: series_out,
    }
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn histogram(values: &[f64], bin_width: f64) -> Vec<HistogramBin> {
    if values.is_empty() {
        return Vec::new();
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bins = (((hi - lo) / bin_width).floor() as usize) + 1;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lo: lo + i as f64 * bin_width,
            hi: lo + (i + 1) as f64 * bin_width,
            count: 0,
        })
        .collect();
    for v in values {
        let idx = (((v - lo) / bin_width).floor() as usize).min(bins - 1);
        out[idx].count += 1;
    }
    out
}

impl BatchReport {
    /// One row per instance, fixed column set.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "instance_id,n_ways,mean_radius,std_radius,skew,excess_kurtosis,deriv_mean,deriv_kurtosis\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}\n",
                r.instance_id,
                r.n_ways,
                r.mean_radius,
                r.std_radius,
                r.skew,
                r.excess_kurtosis,
                r.deriv_mean,
                r.deriv_kurtosis
            ));
        }
        out
    }

    /// Aggregate JSON (rows, failures and batch statistics).
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            rows: &'a [InstanceRow],
            failures: &'a [BatchFailure],
            aggregate: &'a BatchAggregate,
        }
        serde_json::to_string_pretty(&View {
            rows: &self.rows,
            failures: &self.failures,
            aggregate: &self.aggregate,
        })
        .expect("report serialization cannot fail")
    }
}

/// Per-instance series CSV: arc position, radius, radius derivative.
pub fn series_csv(series: &RadiusSeries, derivative: &[(f64, f64)]) -> String {
    let mut out = String::from("s,radius,dr_ds\n");
    for (&(s, r), &(_, d)) in series.samples.iter().zip(derivative) {
        out.push_str(&format!("{s:.9},{r:.9},{d:.9}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defs::Distortion;
    use std::f64::consts::FRAC_PI_2;

    fn symmetric_defs() -> Vec<IncidentRoadDefinition> {
        [
            (40.0, 0.0, PI),
            (0.0, 40.0, -FRAC_PI_2),
            (-40.0, 0.0, 0.0),
            (0.0, -40.0, FRAC_PI_2),
        ]
        .iter()
        .map(|&(x, y, h)| IncidentRoadDefinition::new(Point::new(x, y), h, 2, 2))
        .collect()
    }

    #[test]
    fn undistorted_series_is_constant() {
        let params = GenerationParams {
            distortion: Distortion::Off,
            ..Default::default()
        };
        let net = generate_classic(&symmetric_defs(), &params).unwrap();
        let series = radius_series(&net, Point::new(0.0, 0.0), 0.5).unwrap();
        for &(_, r) in &series.samples {
            assert!((r - 16.0).abs() < 1e-6);
        }
        let expected = (series.ring_length / 0.5).ceil() as usize;
        assert!((series.samples.len() as i64 - expected as i64).abs() <= 1);
    }

    #[test]
    fn distorted_series_stays_in_amplitude_band() {
        let params = GenerationParams {
            seed: 5,
            ..Default::default()
        };
        let net = generate_classic(&symmetric_defs(), &params).unwrap();
        let series = radius_series(&net, Point::new(0.0, 0.0), 0.25).unwrap();
        let r = 16.0;
        let a = 0.08 * r;
        for &(_, radius) in &series.samples {
            assert!(radius >= r - 1.05 * a, "radius {radius} below band");
            assert!(radius <= r + 1.05 * a, "radius {radius} above band");
        }
    }

    #[test]
    fn network_without_ring_is_rejected() {
        use crate::geom::{Geometry, Pose};
        use crate::odr::{LaneSection, Road};
        let net = RoadNetwork {
            name: "no-ring".into(),
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
        assert!(matches!(
            radius_series(&net, Point::new(0.0, 0.0), 0.5),
            Err(Error::NoRing(_))
        ));
    }

    #[test]
    fn derivative_of_constant_series_is_zero() {
        let series = RadiusSeries {
            id: "const".into(),
            center: Point::new(0.0, 0.0),
            ring_length: 10.0,
            samples: (0..20).map(|i| (i as f64 * 0.5, 16.0)).collect(),
        };
        for (_, d) in radius_derivative(&series).unwrap() {
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn derivative_matches_analytic_sine() {
        let r0 = 16.0;
        let a = 1.0;
        let length = 100.0;
        let n = 2000;
        let series = RadiusSeries {
            id: "sine".into(),
            center: Point::new(0.0, 0.0),
            ring_length: length,
            samples: (0..n)
                .map(|i| {
                    let s = i as f64 * length / n as f64;
                    (s, r0 + a * (TAU * s / length).sin())
                })
                .collect(),
        };
        let derivs = radius_derivative(&series).unwrap();
        assert_eq!(derivs.len(), n);
        let scale = TAU * a / length;
        for &(s, d) in &derivs {
            let expected = scale * (TAU * s / length).cos();
            assert!(
                (d - expected).abs() <= 1e-3 * scale.abs().max(expected.abs()),
                "at s={s}: {d} vs {expected}"
            );
        }
    }

    #[test]
    fn derivative_of_closed_ring_has_zero_mean() {
        let params = GenerationParams {
            seed: 11,
            ..Default::default()
        };
        let net = generate_classic(&symmetric_defs(), &params).unwrap();
        let series = radius_series(&net, Point::new(0.0, 0.0), 0.5).unwrap();
        let derivs = radius_derivative(&series).unwrap();
        let mean = derivs.iter().map(|&(_, d)| d).sum::<f64>() / derivs.len() as f64;
        assert!(mean.abs() < 0.01, "derivative mean {mean} not near zero");
    }

    #[test]
    fn summarize_degenerate_and_two_point_cases() {
        let s = summarize(&[3.0, 3.0, 3.0, 3.0]).unwrap();
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.skewness, 0.0);
        assert_eq!(s.excess_kurtosis, 0.0);
        assert!(s.degenerate);

        let s = summarize(&[-1.0, 1.0, -1.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.skewness, 0.0);
        assert!((s.excess_kurtosis - (-2.0)).abs() < 1e-12);
        assert!(!s.degenerate);

        assert!(summarize(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn summarize_matches_normal_sample_kurtosis() {
        // Box-Muller on a seeded stream
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut values = Vec::with_capacity(100_000);
        for _ in 0..50_000 {
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let m = (-2.0 * u1.ln()).sqrt();
            values.push(m * (TAU * u2).cos());
            values.push(m * (TAU * u2).sin());
        }
        let s = summarize(&values).unwrap();
        assert!(s.mean.abs() < 0.02);
        assert!((s.std_dev - 1.0).abs() < 0.02);
        assert!(s.excess_kurtosis.abs() < 0.1);
    }

    #[test]
    fn random_defs_sit_on_the_input_circle() {
        for seed in 0..20u64 {
            let defs = random_road_defs(4, seed, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
            assert_eq!(defs.len(), 4);
            let r = defs[0].position.distance(Point::new(0.0, 0.0));
            assert!((35.0..=45.0).contains(&r));
            for d in &defs {
                let dr = d.position.distance(Point::new(0.0, 0.0));
                assert!((dr - r).abs() < 1e-9, "points not on one circle");
                assert!(d.num_left_lanes == 2 || d.num_left_lanes == 3);
                assert!(d.num_right_lanes == 2 || d.num_right_lanes == 3);
            }
        }
    }

    #[test]
    fn random_defs_are_deterministic() {
        let a = random_road_defs(5, 99, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
        let b = random_road_defs(5, 99, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
        assert_eq!(a, b);
        let c = random_road_defs(5, 100, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_defs_respect_angular_separation() {
        for seed in 0..1000u64 {
            let n = 3 + (seed % 3) as usize;
            let defs = random_road_defs(n, seed, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
            let center = Point::new(0.0, 0.0);
            let mut angles: Vec<f64> = defs
                .iter()
                .map(|d| center.bearing_to(d.position).rem_euclid(TAU))
                .collect();
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for i in 0..n {
                let gap = if i + 1 == n {
                    angles[0] + TAU - angles[n - 1]
                } else {
                    angles[i + 1] - angles[i]
                };
                assert!(
                    gap >= PI / n as f64 - 1e-9,
                    "seed {seed}: separation {gap} too small"
                );
            }
        }
    }

    #[test]
    fn heading_perturbation_stays_in_quarter_turn() {
        for seed in 0..50u64 {
            let defs = random_road_defs(3, seed, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
            for d in &defs {
                let inward = d.position.bearing_to(Point::new(0.0, 0.0));
                let dev = crate::geom::normalize_angle(d.heading - inward).abs();
                assert!(dev <= FRAC_PI_4 + 1e-9);
            }
        }
    }

    #[test]
    fn batch_report_has_one_row_per_instance() {
        let instances: Vec<BatchInstance> = (0..5)
            .map(|i| BatchInstance {
                id: format!("inst-{i:03}"),
                n_ways: 3,
                seed: i,
                defs: random_road_defs(3, i, DEFAULT_INPUT_RADIUS_RANGE).unwrap(),
            })
            .collect();
        let report = era_batch(&instances, &BatchOptions::default());
        assert_eq!(report.rows.len() + report.failures.len(), 5);
        assert!(report.rows.len() >= 4, "too many failures: {:?}", report.failures);
        let csv = report.to_csv();
        assert!(csv.starts_with("instance_id,n_ways,"));
        assert_eq!(csv.lines().count(), 1 + report.rows.len());
        assert!(!report.aggregate.radius_histogram.is_empty());
    }

    #[test]
    fn empty_batch_gives_empty_report() {
        let report = era_batch(&[], &BatchOptions::default());
        assert!(report.rows.is_empty());
        assert!(report.failures.is_empty());
        assert_eq!(report.to_csv().lines().count(), 1);
    }

    #[test]
    fn fixed_input_varied_seed_series_differ() {
        let defs = random_road_defs(3, 7, DEFAULT_INPUT_RADIUS_RANGE).unwrap();
        let instances: Vec<BatchInstance> = (0..6)
            .map(|i| BatchInstance {
                id: format!("seed-{i}"),
                n_ways: 3,
                seed: i,
                defs: defs.clone(),
            })
            .collect();
        let report = era_batch(&instances, &BatchOptions::default());
        assert_eq!(report.rows.len(), 6, "failures: {:?}", report.failures);
        for i in 0..report.series.len() {
            for j in (i + 1)..report.series.len() {
                assert_ne!(
                    report.series[i].series.samples, report.series[j].series.samples,
                    "seeds {i} and {j} gave identical series"
                );
            }
        }
        let means: Vec<f64> = report.rows.iter().map(|r| r.mean_radius).collect();
        let span = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - means.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(span < 3.5, "means spread too wide: {span}");
    }
}
