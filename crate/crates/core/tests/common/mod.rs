#![allow(dead_code)]

use pathdev::liealg::AlgebraSpec;
use pathdev::matexp::SquareMatrix;
use pathdev::sigpath::TimeSeries;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(m: usize, std: f64, rng: &mut impl Rng) -> SquareMatrix {
    let normal = Normal::new(0.0, std).unwrap();
    let data = (0..m * m).map(|_| normal.sample(rng)).collect();
    SquareMatrix::from_row_major(m, data).unwrap()
}

/// Gaussian matrix rescaled to Frobenius norm `norm`.
pub fn matrix_with_norm(m: usize, norm: f64, rng: &mut impl Rng) -> SquareMatrix {
    let a = gaussian_matrix(m, 1.0, rng);
    let f = a.frobenius_norm();
    a.scaled(norm / f)
}

pub fn random_algebra_element(spec: &AlgebraSpec, std: f64, rng: &mut impl Rng) -> SquareMatrix {
    let mut out = SquareMatrix::zeros(spec.order());
    for b in spec.basis() {
        let c: f64 = rng.sample::<f64, _>(StandardNormal) * std;
        out.axpy(c, &b);
    }
    out
}

/// Gaussian random walk with `steps` increments.
pub fn random_walk(dim: usize, steps: usize, std: f64, rng: &mut impl Rng) -> TimeSeries {
    let normal = Normal::new(0.0, std).unwrap();
    let mut point: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut values = point.clone();
    for _ in 0..steps {
        for p in &mut point {
            *p += normal.sample(rng);
        }
        values.extend_from_slice(&point);
    }
    TimeSeries::from_flat(dim, values).unwrap()
}

pub fn path_length(x: &TimeSeries) -> f64 {
    (1..x.len())
        .map(|n| {
            x.point(n)
                .iter()
                .zip(x.point(n - 1))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

/// Inserts the midpoint between every pair of consecutive points.
pub fn refine(x: &TimeSeries) -> TimeSeries {
    let d = x.dim();
    let mut values = x.point(0).to_vec();
    for n in 1..x.len() {
        let (a, b) = (x.point(n - 1), x.point(n));
        values.extend(a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)));
        values.extend_from_slice(b);
    }
    TimeSeries::from_flat(d, values).unwrap()
}

/// Repeats every point `times` times.
pub fn duplicate(x: &TimeSeries, times: usize) -> TimeSeries {
    let mut values = Vec::new();
    for p in x.points() {
        for _ in 0..times {
            values.extend_from_slice(p);
        }
    }
    TimeSeries::from_flat(x.dim(), values).unwrap()
}

pub fn rel_diff(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    (a - b).frobenius_norm() / a.frobenius_norm().max(b.frobenius_norm()).max(1e-300)
}

pub fn matrix_strategy(m: usize, bound: f64) -> impl Strategy<Value = SquareMatrix> {
    prop::collection::vec(-bound..bound, m * m).prop_map(move |v| SquareMatrix::from_row_major(m, v).unwrap())
}

pub fn sized_matrix_strategy(max_order: usize, bound: f64) -> impl Strategy<Value = SquareMatrix> {
    (1..=max_order).prop_flat_map(move |m| matrix_strategy(m, bound))
}

pub fn path_strategy(dim: usize, max_steps: usize, bound: f64) -> impl Strategy<Value = TimeSeries> {
    (1..=max_steps).prop_flat_map(move |n| {
        prop::collection::vec(-bound..bound, (n + 1) * dim).prop_map(move |v| TimeSeries::from_flat(dim, v).unwrap())
    })
}
