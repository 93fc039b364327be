//! Labelled datasets and the synthetic generators used by the experiments.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::model::Target;
use crate::error::{Error, Result};
use crate::sigpath::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub series: TimeSeries,
    pub target: Target,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    /// Checks that every series shares one dimension and every target has the same kind.
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if let Some(first) = samples.first() {
            let dim = first.series.dim();
            for (i, s) in samples.iter().enumerate() {
                if s.series.dim() != dim {
                    return Err(Error::InvalidArgument(format!(
                        "sample {i} has dimension {}, expected {dim}",
                        s.series.dim()
                    )));
                }
                let same_kind = match (&first.target, &s.target) {
                    (Target::Class(_), Target::Class(_)) => true,
                    (Target::Vector(a), Target::Vector(b)) => a.len() == b.len(),
                    _ => false,
                };
                if !same_kind {
                    return Err(Error::InvalidArgument(format!("sample {i} has an inconsistent target")));
                }
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.samples.first().map(|s| s.series.dim())
    }

    pub fn split(&self, split: Split) -> Vec<&Sample> {
        self.samples.iter().filter(|s| s.split == split).collect()
    }

    /// Number of classes (max label + 1), or `None` for regression data.
    pub fn num_classes(&self) -> Option<usize> {
        self.samples
            .iter()
            .map(|s| match s.target {
                Target::Class(c) => Some(c + 1),
                Target::Vector(_) => None,
            })
            .try_fold(0, |acc, c| c.map(|c| acc.max(c)))
    }

    /// Re-tags samples in order: the first `train` as train, the next `val`
    /// as validation, the rest as test.
    pub fn assign_splits(mut self, train: usize, val: usize) -> Self {
        for (i, s) in self.samples.iter_mut().enumerate() {
            s.split = if i < train {
                Split::Train
            } else if i < train + val {
                Split::Val
            } else {
                Split::Test
            };
        }
        self
    }

    pub fn extend(&mut self, other: Dataset) -> Result<()> {
        let mut all = std::mem::take(&mut self.samples);
        all.extend(other.samples);
        *self = Dataset::new(all)?;
        Ok(())
    }
}

/// Points per rotation sample.
pub const ROTATION_POINTS: usize = 32;

/// Planar circular arcs traversed counter-clockwise (label 1) or clockwise
/// (label 0), at random radius, centre, start angle, sweep and a random
/// monotone time warp; Gaussian observation noise of standard deviation
/// `noise`. Labels alternate, so any prefix is balanced to within one.
pub fn gen_rotation_dataset(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid noise level {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, 1.0).unwrap();
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        let direction = if label == 1 { 1.0 } else { -1.0 };
        let radius = rng.random_range(0.5..1.5);
        let centre = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let start = rng.random_range(0.0..2.0 * PI);
        let sweep = rng.random_range(0.5 * PI..1.5 * PI);
        let warp: f64 = rng.random_range(0.5..2.0);
        let points: Vec<Vec<f64>> = (0..ROTATION_POINTS)
            .map(|k| {
                let s = (k as f64 / (ROTATION_POINTS - 1) as f64).powf(warp);
                let angle = start + direction * sweep * s;
                vec![
                    centre[0] + radius * angle.cos() + noise * jitter.sample(&mut rng),
                    centre[1] + radius * angle.sin() + noise * jitter.sample(&mut rng),
                ]
            })
            .collect();
        samples.push(Sample {
            series: TimeSeries::new(2, &points)?,
            target: Target::Class(label),
            split: Split::Train,
        });
    }
    Dataset::new(samples)
}

/// Parameters of the rigid-motion generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RigidMotionParams {
    /// Observed positions per sample.
    pub window: usize,
    pub speed_min: f64,
    pub speed_max: f64,
    /// Turn rate per step is uniform on `[−max_turn, max_turn]`.
    pub max_turn: f64,
    pub noise: f64,
    /// Initial positions are uniform on `[−extent, extent]²`.
    pub extent: f64,
}

impl Default for RigidMotionParams {
    fn default() -> Self {
        Self {
            window: 20,
            speed_min: 0.2,
            speed_max: 0.4,
            max_turn: 0.05,
            noise: 0.01,
            extent: 2.0,
        }
    }
}

impl RigidMotionParams {
    /// Expected per-component MSE of predicting the last observed position,
    /// by midpoint quadrature over speed and turn rate. For a point rotating
    /// by `ω` per step at speed `v`, the `k`-step displacement has squared
    /// length `v² sin²(kω/2) / sin²(ω/2)`; observation noise adds `σ²` per
    /// component.
    pub fn static_baseline_mse(&self, horizon: usize) -> f64 {
        let grid = 400;
        let k = horizon as f64;
        let mut acc = 0.0;
        for a in 0..grid {
            let v = self.speed_min + (self.speed_max - self.speed_min) * (a as f64 + 0.5) / grid as f64;
            for b in 0..grid {
                let w = -self.max_turn + 2.0 * self.max_turn * (b as f64 + 0.5) / grid as f64;
                let chord2 = if w.abs() < 1e-12 {
                    k * k
                } else {
                    ((k * w / 2.0).sin() / (w / 2.0).sin()).powi(2)
                };
                acc += v * v * chord2;
            }
        }
        acc / (grid * grid) as f64 / 2.0 + self.noise * self.noise
    }
}

/// A point under a constant rigid motion of the plane (rotation by a fixed
/// angle about a fixed centre each step, i.e. constant speed and turn rate).
/// The input is `params.window` noisy positions; the target is the exact
/// position `horizon` steps after the last observation.
pub fn gen_rigid_motion_dataset(n: usize, horizon: usize, params: RigidMotionParams, seed: u64) -> Result<Dataset> {
    if params.window < 2 {
        return Err(Error::InvalidArgument("rigid-motion window needs at least 2 points".into()));
    }
    if horizon == 0 {
        return Err(Error::InvalidArgument("prediction horizon must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, 1.0).unwrap();
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let speed = rng.random_range(params.speed_min..=params.speed_max);
        let turn = rng.random_range(-params.max_turn..=params.max_turn);
        let mut heading = rng.random_range(0.0..2.0 * PI);
        let mut pos = [
            rng.random_range(-params.extent..params.extent),
            rng.random_range(-params.extent..params.extent),
        ];
        let mut track = Vec::with_capacity(params.window + horizon);
        for _ in 0..params.window + horizon {
            track.push(pos);
            pos[0] += speed * heading.cos();
            pos[1] += speed * heading.sin();
            heading += turn;
        }
        let observed: Vec<Vec<f64>> = track[..params.window]
            .iter()
            .map(|p| {
                vec![
                    p[0] + params.noise * jitter.sample(&mut rng),
                    p[1] + params.noise * jitter.sample(&mut rng),
                ]
            })
            .collect();
        let target = track[params.window - 1 + horizon];
        samples.push(Sample {
            series: TimeSeries::new(2, &observed)?,
            target: Target::Vector(target.to_vec()),
            split: Split::Train,
        });
    }
    Dataset::new(samples)
}

/// Mean over `samples` of the per-component MSE of predicting the last
/// observed position.
pub fn static_baseline_mse(samples: &[&Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty split".into()));
    }
    let mut total = 0.0;
    for s in samples {
        let Target::Vector(t) = &s.target else {
            return Err(Error::InvalidArgument("static baseline needs vector targets".into()));
        };
        let last = s.series.point(s.series.len() - 1);
        total += super::loss::mse(&last[..t.len()], t)?.0;
    }
    Ok(total / samples.len() as f64)
}

/// Lévy area `½ Σ_n (X_{n−1} × ΔX_n)` of a planar path, relative to its start.
pub fn levy_area(x: &TimeSeries) -> f64 {
    let p0 = x.point(0);
    let mut area = 0.0;
    for n in 1..x.len() {
        let a = x.point(n - 1);
        let b = x.point(n);
        let (ax, ay) = (a[0] - p0[0], a[1] - p0[1]);
        area += 0.5 * (ax * (b[1] - a[1]) - ay * (b[0] - a[0]));
    }
    area
}
