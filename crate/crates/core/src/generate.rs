//! Seeded point-set generators.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Distribution2d {
    /// Uniform in the unit square.
    UniformSquare,
    /// Gaussian blobs around uniformly placed centers.
    Clustered,
    /// One point per cell of a square grid, jittered within its cell.
    GridJitter,
}

impl Distribution2d {
    pub const ALL: [Distribution2d; 3] = [
        Distribution2d::UniformSquare,
        Distribution2d::Clustered,
        Distribution2d::GridJitter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distribution2d::UniformSquare => "uniform-square",
            Distribution2d::Clustered => "clustered",
            Distribution2d::GridJitter => "grid-jitter",
        }
    }
}

impl fmt::Display for Distribution2d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution2d {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution2d::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown distribution `{s}`")))
    }
}

/// `n` points from `dist`; the same arguments always give the same points.
pub fn generate(dist: Distribution2d, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dist {
        Distribution2d::UniformSquare => (0..n).map(|_| Point::new(rng.gen(), rng.gen())).collect(),
        Distribution2d::Clustered => {
            let k = ((n as f64).sqrt() / 8.0).ceil().max(1.0) as usize;
            let centers: Vec<Point> = (0..k).map(|_| Point::new(rng.gen(), rng.gen())).collect();
            let blob = Normal::new(0.0, 0.05 / (k as f64).sqrt()).unwrap();
            (0..n)
                .map(|_| {
                    let c = centers[rng.gen_range(0..k)];
                    Point::new(c.x + blob.sample(&mut rng), c.y + blob.sample(&mut rng))
                })
                .collect()
        }
        Distribution2d::GridJitter => {
            let side = (n as f64).sqrt().ceil().max(1.0) as usize;
            (0..n)
                .map(|i| {
                    let (gx, gy) = ((i % side) as f64, (i / side) as f64);
                    let jx: f64 = rng.gen_range(-0.25..0.25);
                    let jy: f64 = rng.gen_range(-0.25..0.25);
                    Point::new((gx + 0.5 + jx) / side as f64, (gy + 0.5 + jy) / side as f64)
                })
                .collect()
        }
    }
}
