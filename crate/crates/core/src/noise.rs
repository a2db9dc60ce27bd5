//! Seeded 1-D gradient noise and the periodic radial distortion field used to
//! push a circular reference line into irregular shapes.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fit::Circle;
use crate::geom::Point;

/// Distortion defaults: amplitude as a fraction of the ring radius, and noise
/// cycles per revolution.
pub const DEFAULT_AMPLITUDE_FACTOR: f64 = 0.08;
pub const DEFAULT_FREQUENCY: f64 = 3.0;

/// Parameters of the ring distortion field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub seed: u64,
    /// Maximum radial displacement in meters.
    pub amplitude: f64,
    /// Noise cycles per full revolution.
    pub frequency: f64,
}

impl NoiseParams {
    /// Defaults scaled to a given ring radius.
    pub fn scaled_default(radius: f64, seed: u64) -> Self {
        NoiseParams {
            seed,
            amplitude: DEFAULT_AMPLITUDE_FACTOR * radius,
            frequency: DEFAULT_FREQUENCY,
        }
    }
}

// Quintic fade, C1 across lattice cells.
fn fade(t: f64) -> f64 {
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Seeded 1-D gradient noise over a shuffled 256-entry permutation table.
///
/// Values lie in [-1, 1], vanish at integer lattice coordinates, and are C1
/// in the coordinate. Deterministic in (x, seed).
pub struct Perlin1D {
    perm: [u8; 256],
    phase: f64,
}

impl Perlin1D {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm = [0u8; 256];
        for (i, slot) in perm.iter_mut().enumerate() {
            *slot = i as u8;
        }
        perm.shuffle(&mut rng);
        let phase = rng.gen::<f64>();
        Perlin1D { perm, phase }
    }

    /// Seed-derived lattice phase in [0, 1).
    pub fn phase(&self) -> f64 {
        self.phase
    }

    // Table entry mapped onto [-1, 1] and cubed: most cells stay gentle
    // while a few carry steep slopes, giving rings their mostly-round look
    // with occasional pronounced bulges.
    fn gradient(&self, cell: i64) -> f64 {
        let t = f64::from(self.perm[(cell & 0xff) as usize]) / 127.5 - 1.0;
        t * t * t
    }

    pub fn sample(&self, x: f64) -> f64 {
        self.sample_cells(x, None)
    }

    /// Sample with gradient indices wrapped modulo `period` lattice cells, so
    /// the field is exactly periodic over that many cells.
    pub fn sample_wrapped(&self, x: f64, period: u32) -> f64 {
        self.sample_cells(x, Some(period))
    }

    fn sample_cells(&self, x: f64, period: Option<u32>) -> f64 {
        assert!(x.is_finite(), "noise coordinate must be finite, got {x}");
        let cell = x.floor();
        let f = x - cell;
        let i = cell as i64;
        let (g0, g1) = match period {
            None => (self.gradient(i), self.gradient(i + 1)),
            Some(p) => {
                let p = p as i64;
                (
                    self.gradient(i.rem_euclid(p)),
                    self.gradient((i + 1).rem_euclid(p)),
                )
            }
        };
        let w = fade(f);
        // lerp of the two gradient ramps, rescaled to [-1, 1]
        2.0 * ((1.0 - w) * (g0 * f) + w * (g1 * (f - 1.0)))
    }
}

/// One-shot noise evaluation. Builds the seeded table on each call; use
/// [`Perlin1D`] directly when evaluating many coordinates.
pub fn perlin1d(x: f64, seed: u64) -> f64 {
    Perlin1D::new(seed).sample(x)
}

/// Periodic radial displacement field over ring polar angle.
pub struct RingNoise {
    noise: Perlin1D,
    cells: u32,
    amplitude: f64,
}

impl RingNoise {
    pub fn new(params: &NoiseParams) -> Result<Self> {
        if !(params.frequency > 0.0) {
            return Err(Error::InvalidParams(format!(
                "noise frequency must be positive, got {}",
                params.frequency
            )));
        }
        if !(params.amplitude >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "noise amplitude must be nonnegative, got {}",
                params.amplitude
            )));
        }
        // An integer number of lattice cells per revolution keeps the field
        // seam-free at the ring closure.
        let cells = params.frequency.round().max(1.0) as u32;
        Ok(RingNoise {
            noise: Perlin1D::new(params.seed),
            cells,
            amplitude: params.amplitude,
        })
    }

    /// Signed radial displacement at polar angle `theta`.
    pub fn displacement(&self, theta: f64) -> f64 {
        let cells = self.cells as f64;
        let u = theta / TAU * cells + self.noise.phase() * cells;
        self.amplitude * self.noise.sample_wrapped(u, self.cells)
    }
}

/// Displace ring points strictly radially by the seeded noise field.
///
/// Points must lie on `circle`; the amplitude must stay below half the radius
/// so the distorted ring cannot fold over itself.
pub fn distort_ring_points(
    points: &[Point],
    circle: &Circle,
    params: &NoiseParams,
) -> Result<Vec<Point>> {
    if params.amplitude >= 0.5 * circle.radius {
        return Err(Error::InvalidParams(format!(
            "noise amplitude {} must be below half the ring radius {}",
            params.amplitude, circle.radius
        )));
    }
    let field = RingNoise::new(params)?;
    Ok(points
        .iter()
        .map(|p| {
            debug_assert!(
                (p.distance(circle.center) - circle.radius).abs() < 1e-6,
                "ring point is not on the circle"
            );
            let theta = circle.center.bearing_to(*p);
            let d = field.displacement(theta);
            Point::new(p.x + d * theta.cos(), p.y + d * theta.sin())
        })
        .collect())
}
