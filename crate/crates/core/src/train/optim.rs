use serde::{Deserialize, Serialize};

use super::model::{Head, Model, ModelGrad};
use crate::error::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    #[default]
    Adam,
}

/// First-order optimizer. Development weights are projected back onto the
/// algebra after every step; the readout is unconstrained.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    steps: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

fn param_slices(model: &mut Model) -> Vec<&mut [f64]> {
    let mut out: Vec<&mut [f64]> = model.dev.theta_mut().iter_mut().map(|t| t.as_mut_slice()).collect();
    if let Head::Linear { weight, bias, .. } = &mut model.head {
        out.push(weight.as_mut_slice());
        out.push(bias.as_mut_slice());
    }
    out
}

fn grad_slices(grad: &ModelGrad) -> Vec<&[f64]> {
    let mut out: Vec<&[f64]> = grad.dtheta.iter().map(|t| t.as_slice()).collect();
    if !grad.dweight.is_empty() || !grad.dbias.is_empty() {
        out.push(&grad.dweight);
        out.push(&grad.dbias);
    }
    out
}

impl Optimizer {
    pub fn new(kind: OptimizerKind) -> Self {
        Self {
            kind,
            steps: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    /// Applies one update with learning rate `lr`.
    pub fn step(&mut self, model: &mut Model, grad: &ModelGrad, lr: f64) -> Result<()> {
        if !grad.is_finite() {
            return Err(Error::NonFinite("gradient"));
        }
        let grads = grad_slices(grad);
        let total: usize = grads.iter().map(|g| g.len()).sum();
        {
            let params = param_slices(model);
            if params.len() != grads.len() || params.iter().map(|p| p.len()).sum::<usize>() != total {
                return Err(Error::InvalidArgument("gradient does not match model parameters".into()));
            }
            self.steps += 1;
            match self.kind {
                OptimizerKind::Sgd => {
                    for (p, g) in params.into_iter().zip(&grads) {
                        for (pi, gi) in p.iter_mut().zip(g.iter()) {
                            *pi -= lr * gi;
                        }
                    }
                }
                OptimizerKind::Adam => {
                    if self.first.len() != total {
                        self.first = vec![0.0; total];
                        self.second = vec![0.0; total];
                    }
                    let t = self.steps as i32;
                    let bias1 = 1.0 - ADAM_BETA1.powi(t);
                    let bias2 = 1.0 - ADAM_BETA2.powi(t);
                    let mut k = 0;
                    for (p, g) in params.into_iter().zip(&grads) {
                        for (pi, &gi) in p.iter_mut().zip(g.iter()) {
                            let m = &mut self.first[k];
                            let v = &mut self.second[k];
                            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * gi;
                            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * gi * gi;
                            let m_hat = *m / bias1;
                            let v_hat = *v / bias2;
                            *pi -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
                            k += 1;
                        }
                    }
                }
            }
        }
        model.dev.reproject();
        Ok(())
    }
}
