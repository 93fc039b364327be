use crate::error::{check_dim, Error, Result};
use crate::liealg::weights::embed_unchecked;
use crate::liealg::{AlgebraSpec, DevWeights};
use crate::matexp::{exp_unchecked, SquareMatrix};
use crate::sigpath::{increments, TimeSeries};

/// Whether downstream consumers see the whole trajectory or only `z_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Sequence,
    Last,
}

impl std::str::FromStr for OutputMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seq" | "sequence" => Ok(OutputMode::Sequence),
            "last" => Ok(OutputMode::Last),
            other => Err(Error::InvalidArgument(format!("unknown output mode `{other}`"))),
        }
    }
}

/// Group-valued trajectory `z_0 = I, z_n = z_{n−1}·exp(M_θ(Δx_n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct DevOutput {
    spec: AlgebraSpec,
    mode: OutputMode,
    states: Vec<SquareMatrix>,
    // exp(M_θ(Δx_n)) for n = 1..N, reused by the backward sweep.
    step_exps: Vec<SquareMatrix>,
}

impl DevOutput {
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    pub fn mode(&self) -> OutputMode {
        self.mode
    }

    /// All states `z_0..z_N`, regardless of mode.
    pub fn states(&self) -> &[SquareMatrix] {
        &self.states
    }

    pub fn last(&self) -> &SquareMatrix {
        self.states.last().expect("at least z_0")
    }

    /// The states exposed by the output mode: all of them, or only `z_N`.
    pub fn output(&self) -> &[SquareMatrix] {
        match self.mode {
            OutputMode::Sequence => &self.states,
            OutputMode::Last => std::slice::from_ref(self.last()),
        }
    }

    pub fn num_steps(&self) -> usize {
        self.states.len() - 1
    }

    pub(crate) fn step_exps(&self) -> &[SquareMatrix] {
        &self.step_exps
    }
}

/// Forward pass of the development layer.
pub fn develop_forward(weights: &DevWeights, x: &TimeSeries, mode: OutputMode) -> Result<DevOutput> {
    check_dim(weights.dim_in(), x.dim())?;
    let m = weights.order();
    let mut states = Vec::with_capacity(x.len());
    let mut step_exps = Vec::with_capacity(x.num_steps());
    let mut z = SquareMatrix::identity(m);
    states.push(z.clone());
    for delta in increments(x) {
        let e = exp_unchecked(&embed_unchecked(weights.theta(), &delta));
        z = &z * &e;
        if !z.is_finite() {
            return Err(Error::NonFinite("development state"));
        }
        states.push(z.clone());
        step_exps.push(e);
    }
    Ok(DevOutput {
        spec: *weights.spec(),
        mode,
        states,
        step_exps,
    })
}
