use super::forward::DevOutput;
use crate::error::{check_dim, Error, Result};
use crate::liealg::weights::embed_unchecked;
use crate::liealg::DevWeights;
use crate::matexp::{dexp, SquareMatrix};
use crate::sigpath::{increments, TimeSeries};

/// Ambient partial derivatives `∂ψ̂/∂y_n`, one `m × m` matrix per state `n = 0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossPartials {
    per_step: Vec<SquareMatrix>,
}

impl LossPartials {
    pub fn new(per_step: Vec<SquareMatrix>) -> Result<Self> {
        if per_step.is_empty() {
            return Err(Error::InvalidArgument("loss partials need at least one step".into()));
        }
        let m = per_step[0].order();
        for p in &per_step {
            check_dim(m, p.order())?;
            if !p.is_finite() {
                return Err(Error::NonFinite("loss partials"));
            }
        }
        Ok(Self { per_step })
    }

    pub fn zeros(order: usize, num_states: usize) -> Self {
        Self {
            per_step: vec![SquareMatrix::zeros(order); num_states],
        }
    }

    /// Partials for a loss that only sees `z_N`: zero everywhere but the last step.
    pub fn last_only(num_states: usize, last: SquareMatrix) -> Result<Self> {
        if num_states == 0 {
            return Err(Error::InvalidArgument("need at least one state".into()));
        }
        let mut per_step = vec![SquareMatrix::zeros(last.order()); num_states];
        per_step[num_states - 1] = last;
        Self::new(per_step)
    }

    pub fn per_step(&self) -> &[SquareMatrix] {
        &self.per_step
    }
}

/// Gradient of the loss w.r.t. `θ` (projected onto the algebra) and,
/// optionally, w.r.t. the input series.
#[derive(Debug, Clone, PartialEq)]
pub struct GradResult {
    pub dtheta: Vec<SquareMatrix>,
    /// Row-major `(N+1) × d`.
    pub dinput: Option<Vec<f64>>,
}

fn check_shapes(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
) -> Result<()> {
    check_dim(weights.dim_in(), x.dim())?;
    check_dim(x.len(), z.states().len())?;
    check_dim(x.len(), partials.per_step.len())?;
    check_dim(weights.order(), z.spec().order())?;
    check_dim(weights.order(), partials.per_step[0].order())?;
    Ok(())
}

/// Reverse sweep of the adjoint `a_n = ∂ψ̂/∂y_n + a_{n+1}·E_{n+1}ᵀ`, with
/// `E_n = exp(M_θ(Δx_n))`. Returns `a_0..a_N`.
///
/// In Hilbert-Schmidt coordinates the pull-back of a cotangent through
/// right multiplication by `E` is right multiplication by `Eᵀ`; the finite
/// difference checks pin this ordering.
pub fn adjoint_trace(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
) -> Result<Vec<SquareMatrix>> {
    check_shapes(weights, x, z, partials)?;
    let n_states = x.len();
    let mut adjoints = vec![SquareMatrix::zeros(weights.order()); n_states];
    adjoints[n_states - 1] = partials.per_step[n_states - 1].clone();
    for n in (0..n_states - 1).rev() {
        let mut a = &adjoints[n + 1] * &z.step_exps()[n].transpose();
        a += &partials.per_step[n];
        adjoints[n] = a;
    }
    Ok(adjoints)
}

/// Per-step gradients w.r.t. `M_θ(Δx_n)`, `n = 1..N`:
/// `dexp_{M_nᵀ}(z_{n−1}ᵀ·a_n)`.
fn step_gradients(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
) -> Result<(Vec<Vec<f64>>, Vec<SquareMatrix>)> {
    let adjoints = adjoint_trace(weights, x, z, partials)?;
    let deltas = increments(x);
    let mut grads = Vec::with_capacity(deltas.len());
    for (n, delta) in deltas.iter().enumerate() {
        // delta is Δx_{n+1}; states[n] is z_n = z_{(n+1)−1}.
        let step = embed_unchecked(weights.theta(), delta);
        let upstream = &z.states()[n].transpose() * &adjoints[n + 1];
        grads.push(dexp(&step.transpose(), &upstream)?);
    }
    Ok((deltas, grads))
}

fn backward(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
    with_input: bool,
) -> Result<GradResult> {
    let (deltas, grads) = step_gradients(weights, x, z, partials)?;
    let d = weights.dim_in();
    let m = weights.order();

    let mut dtheta = vec![SquareMatrix::zeros(m); d];
    // Summed from the last step backwards, as in the reverse sweep.
    for (delta, g) in deltas.iter().zip(&grads).rev() {
        for (dt, &c) in dtheta.iter_mut().zip(delta) {
            if c != 0.0 {
                dt.axpy(c, g);
            }
        }
    }
    for dt in &mut dtheta {
        *dt = weights.spec().project_unchecked(dt);
    }

    let dinput = with_input.then(|| {
        // ∂L/∂Δx_n^j = ⟨g_n, θ_j⟩, then Δx_n = x_n − x_{n−1} telescopes.
        let mut dx = vec![0.0; x.len() * d];
        for (n, g) in grads.iter().enumerate() {
            for (j, t) in weights.theta().iter().enumerate() {
                let c = g.inner(t);
                dx[(n + 1) * d + j] += c;
                dx[n * d + j] -= c;
            }
        }
        dx
    });

    Ok(GradResult { dtheta, dinput })
}

/// Backward pass: gradient of the loss w.r.t. `θ`.
pub fn develop_backward(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
) -> Result<GradResult> {
    backward(weights, x, z, partials, false)
}

/// Backward pass returning both the parameter and the input gradient.
pub fn develop_backward_with_input(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
) -> Result<GradResult> {
    backward(weights, x, z, partials, true)
}

/// Gradient of the loss w.r.t. the input series, row-major `(N+1) × d`.
pub fn grad_input(
    weights: &DevWeights,
    x: &TimeSeries,
    z: &DevOutput,
    partials: &LossPartials,
) -> Result<Vec<f64>> {
    Ok(backward(weights, x, z, partials, true)?
        .dinput
        .expect("input gradient requested"))
}
