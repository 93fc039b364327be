use crate::error::{Error, Result};

/// A `d`-dimensional discrete path `x_0, …, x_N`, read as its piecewise-linear lift.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dim: usize,
    values: Vec<f64>,
    timestamps: Option<Vec<f64>>,
}

impl TimeSeries {
    /// Builds a series from its points; every point must have `dim` coordinates.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut values = Vec::with_capacity(points.len() * dim);
        for (n, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "point {n} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            values.extend_from_slice(p);
        }
        Self::from_flat(dim, values)
    }

    /// Row-major `(N+1) × d` values.
    pub fn from_flat(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("series dimension must be positive".into()));
        }
        if values.is_empty() || !values.len().is_multiple_of(dim) {
            return Err(Error::InvalidArgument(format!(
                "{} values cannot form a non-empty series of dimension {dim}",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("time series values"));
        }
        Ok(Self {
            dim,
            values,
            timestamps: None,
        })
    }

    /// Attaches strictly increasing timestamps.
    pub fn with_timestamps(mut self, timestamps: Vec<f64>) -> Result<Self> {
        if timestamps.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: timestamps.len(),
            });
        }
        if !timestamps.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("timestamps"));
        }
        if timestamps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("timestamps must be strictly increasing".into()));
        }
        self.timestamps = Some(timestamps);
        Ok(self)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points, `N + 1`.
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    /// Number of linear segments, `N`.
    #[inline]
    pub fn num_steps(&self) -> usize {
        self.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn point(&self, n: usize) -> &[f64] {
        &self.values[n * self.dim..(n + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timestamps(&self) -> Option<&[f64]> {
        self.timestamps.as_deref()
    }

    /// Explicit timestamps, or `0, 1, …, N` when absent.
    pub fn times(&self) -> Vec<f64> {
        match &self.timestamps {
            Some(t) => t.clone(),
            None => (0..self.len()).map(|n| n as f64).collect(),
        }
    }

    /// Multiplies every value by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let mut out = Self::from_flat(self.dim, self.values.iter().map(|v| v * s).collect())?;
        out.timestamps = self.timestamps.clone();
        Ok(out)
    }

    /// Concatenates `other` after `self`, translating it to start where `self` ends.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let end = self.point(self.len() - 1).to_vec();
        let start = other.point(0).to_vec();
        let mut values = self.values.clone();
        for p in other.points().skip(1) {
            values.extend(p.iter().zip(&start).zip(&end).map(|((v, s), e)| v - s + e));
        }
        Self::from_flat(self.dim, values)
    }
}

/// `Δx_n = x_n − x_{n−1}` for `n = 1..N`; empty for a single-point series.
pub fn increments(x: &TimeSeries) -> Vec<Vec<f64>> {
    x.values
        .chunks(x.dim)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1].iter().zip(w[0]).map(|(b, a)| b - a).collect())
        .collect()
}

/// Prepends the time channel (explicit timestamps or `0..N`).
pub fn add_time(x: &TimeSeries) -> TimeSeries {
    let times = x.times();
    let dim = x.dim + 1;
    let mut values = Vec::with_capacity(x.len() * dim);
    for (t, p) in times.iter().zip(x.points()) {
        values.push(*t);
        values.extend_from_slice(p);
    }
    TimeSeries {
        dim,
        values,
        timestamps: x.timestamps.clone(),
    }
}
