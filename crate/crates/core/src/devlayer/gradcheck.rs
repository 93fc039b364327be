//! Finite-difference certification of the backward pass.
//!
//! A random weights/path/loss triple is drawn; the analytic gradient is
//! compared against central differences of the scalar loss taken along an
//! orthonormal basis of the algebra, so perturbed weights never leave it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{develop_backward_with_input, develop_forward, LossPartials, OutputMode};
use crate::error::Result;
use crate::liealg::{random_init, AlgebraSpec, DevWeights};
use crate::matexp::SquareMatrix;
use crate::sigpath::TimeSeries;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Smooth test loss `ψ(z) = Σ_n ⟨C_n, z_n⟩ + ½ Σ_n ⟨B_n, z_n⟩²` over the
/// states selected by the output mode.
#[derive(Debug, Clone)]
pub struct QuadraticProbeLoss {
    mode: OutputMode,
    linear: Vec<SquareMatrix>,
    quadratic: Vec<SquareMatrix>,
}

impl QuadraticProbeLoss {
    pub fn random(order: usize, num_states: usize, mode: OutputMode, rng: &mut impl Rng) -> Self {
        let normal = Normal::new(0.0, 1.0 / order as f64).unwrap();
        let mut draw = || {
            let data = (0..order * order).map(|_| normal.sample(rng)).collect();
            SquareMatrix::from_row_major(order, data).unwrap()
        };
        let count = match mode {
            OutputMode::Sequence => num_states,
            OutputMode::Last => 1,
        };
        let linear = (0..count).map(|_| draw()).collect();
        let quadratic = (0..count).map(|_| draw()).collect();
        Self {
            mode,
            linear,
            quadratic,
        }
    }

    fn observed<'a>(&self, states: &'a [SquareMatrix]) -> &'a [SquareMatrix] {
        match self.mode {
            OutputMode::Sequence => states,
            OutputMode::Last => &states[states.len() - 1..],
        }
    }

    pub fn value(&self, states: &[SquareMatrix]) -> f64 {
        self.observed(states)
            .iter()
            .zip(self.linear.iter().zip(&self.quadratic))
            .map(|(z, (c, b))| c.inner(z) + 0.5 * b.inner(z).powi(2))
            .sum()
    }

    pub fn partials(&self, states: &[SquareMatrix]) -> LossPartials {
        let observed = self.observed(states);
        let offset = states.len() - observed.len();
        let mut per_step = vec![SquareMatrix::zeros(states[0].order()); states.len()];
        for (i, z) in observed.iter().enumerate() {
            let (c, b) = (&self.linear[i], &self.quadratic[i]);
            let mut g = c.clone();
            g.axpy(b.inner(z), b);
            per_step[offset + i] = g;
        }
        LossPartials::new(per_step).expect("finite partials")
    }
}

/// One randomly drawn configuration.
#[derive(Debug, Clone)]
pub struct GradCheckCase {
    pub weights: DevWeights,
    pub path: TimeSeries,
    pub loss: QuadraticProbeLoss,
}

impl GradCheckCase {
    /// Draws weights (init scale 1), a Gaussian random walk with `steps`
    /// increments of standard deviation 0.3, and a probe loss.
    pub fn random(spec: AlgebraSpec, dim: usize, steps: usize, mode: OutputMode, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = random_init(spec, dim, 1.0, rng.random())?;
        let normal = Normal::new(0.0, 0.3).unwrap();
        let mut point: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut values = point.clone();
        for _ in 0..steps {
            for p in &mut point {
                *p += normal.sample(&mut rng);
            }
            values.extend_from_slice(&point);
        }
        let path = TimeSeries::from_flat(dim, values)?;
        let loss = QuadraticProbeLoss::random(spec.order(), steps + 1, mode, &mut rng);
        Ok(Self { weights, path, loss })
    }

    fn loss_at(&self, weights: &DevWeights, path: &TimeSeries) -> Result<f64> {
        let out = develop_forward(weights, path, OutputMode::Sequence)?;
        Ok(self.loss.value(out.states()))
    }
}

/// Outcome of one finite-difference comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    /// `‖g_analytic − g_fd‖ / max(‖g_fd‖, ‖g_analytic‖, 1e-12)` over algebra-basis coordinates.
    pub theta_rel_error: f64,
    /// Same, for the input gradient.
    pub input_rel_error: f64,
    pub num_parameters: usize,
}

fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff = analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let scale = norm(analytic).max(norm(numeric)).max(1e-12);
    diff / scale
}

/// Compares the backward pass against central differences for `case`.
pub fn check_case(case: &GradCheckCase) -> Result<GradCheckReport> {
    let weights = &case.weights;
    let path = &case.path;
    let out = develop_forward(weights, path, OutputMode::Sequence)?;
    let partials = case.loss.partials(out.states());
    let grads = develop_backward_with_input(weights, path, &out, &partials)?;

    let basis = weights.spec().basis();
    let mut analytic = Vec::new();
    let mut numeric = Vec::new();
    for j in 0..weights.dim_in() {
        for b in &basis {
            analytic.push(grads.dtheta[j].inner(b));
            let shifted = |s: f64| {
                let mut theta = weights.theta().to_vec();
                theta[j].axpy(s, b);
                DevWeights::new(*weights.spec(), theta)
            };
            let plus = case.loss_at(&shifted(FD_STEP)?, path)?;
            let minus = case.loss_at(&shifted(-FD_STEP)?, path)?;
            numeric.push((plus - minus) / (2.0 * FD_STEP));
        }
    }
    let theta_rel_error = relative_error(&analytic, &numeric);

    let dinput = grads.dinput.expect("input gradient");
    let mut numeric_input = Vec::with_capacity(dinput.len());
    for k in 0..path.values().len() {
        let shifted = |s: f64| {
            let mut v = path.values().to_vec();
            v[k] += s;
            TimeSeries::from_flat(path.dim(), v)
        };
        let plus = case.loss_at(weights, &shifted(FD_STEP)?)?;
        let minus = case.loss_at(weights, &shifted(-FD_STEP)?)?;
        numeric_input.push((plus - minus) / (2.0 * FD_STEP));
    }
    let input_rel_error = relative_error(&dinput, &numeric_input);

    Ok(GradCheckReport {
        theta_rel_error,
        input_rel_error,
        num_parameters: analytic.len(),
    })
}
