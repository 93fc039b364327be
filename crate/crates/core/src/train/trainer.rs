use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{Dataset, Sample, Split};
use super::model::{argmax, Model, ModelGrad, Target};
use super::optim::{Optimizer, OptimizerKind};
use crate::error::{Error, Result};

/// Hyperparameters of the training loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Multiplicative per-epoch learning-rate factor in `(0, 1]`.
    pub lr_decay: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Stop after this many epochs without a validation improvement.
    pub patience: usize,
    pub optimizer: OptimizerKind,
    /// Standard deviation multiplier of the development-weight initialisation.
    pub init_scale: f64,
    /// Emit wall-clock milliseconds per epoch. Off by default so that metric
    /// streams of identical seeded runs are byte-identical.
    pub record_wall_ms: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            lr_decay: 0.997,
            batch_size: 32,
            epochs: 150,
            seed: 0,
            patience: 50,
            optimizer: OptimizerKind::Adam,
            init_scale: 1.0,
            record_wall_ms: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("invalid train config: {what}")));
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad("learning_rate must be finite and non-negative");
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return bad("lr_decay must lie in (0, 1]");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be positive");
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return bad("init_scale must be finite and non-negative");
        }
        Ok(())
    }
}

/// One line of the metrics stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Accuracy for classifiers, MSE for regressors.
    pub val_metric: f64,
    pub lr: f64,
    pub wall_ms: Option<u64>,
}

impl EpochRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub history: Vec<EpochRecord>,
    /// Checkpoint with the best validation metric.
    pub best_model: Model,
    /// 0 when no epoch improved on the initial parameters.
    pub best_epoch: usize,
    pub best_val_metric: f64,
}

/// Accuracy (classifiers) or mean per-sample MSE (regressors).
pub fn evaluate(model: &Model, samples: &[&Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate on an empty split".into()));
    }
    let per_sample: Vec<f64> = samples
        .par_iter()
        .map(|s| -> Result<f64> {
            let out = model.predict(&s.series)?;
            match &s.target {
                Target::Class(c) if model.is_classifier() => Ok(f64::from(u8::from(argmax(&out) == *c))),
                Target::Vector(t) if !model.is_classifier() => Ok(super::loss::mse(&out, t)?.0),
                _ => Err(Error::InvalidArgument("target kind does not match the model head".into())),
            }
        })
        .collect::<Result<_>>()?;
    Ok(per_sample.iter().sum::<f64>() / samples.len() as f64)
}

/// Mean loss over `samples`.
pub fn mean_loss(model: &Model, samples: &[&Sample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("cannot evaluate on an empty split".into()));
    }
    let losses: Vec<f64> = samples
        .par_iter()
        .map(|s| model.loss(&s.series, &s.target))
        .collect::<Result<_>>()?;
    Ok(losses.iter().sum::<f64>() / samples.len() as f64)
}

/// Mean loss and gradient over a batch. Per-sample work runs in parallel;
/// the reduction walks the batch in order so results do not depend on
/// scheduling.
pub fn batch_gradient(model: &Model, batch: &[&Sample]) -> Result<(f64, ModelGrad)> {
    let parts: Vec<(f64, ModelGrad)> = batch
        .par_iter()
        .map(|s| model.loss_and_grad(&s.series, &s.target))
        .collect::<Result<_>>()?;
    let scale = 1.0 / batch.len() as f64;
    let mut grad = ModelGrad::zeros_like(model);
    let mut loss = 0.0;
    for (l, g) in &parts {
        loss += l;
        grad.accumulate(g, scale);
    }
    Ok((loss * scale, grad))
}

fn better(classifier: bool, candidate: f64, best: f64) -> bool {
    if classifier {
        candidate > best
    } else {
        candidate < best
    }
}

/// Mini-batch training with per-epoch learning-rate decay, best-checkpoint
/// tracking on the validation metric, and early stopping. Uses the
/// validation split if present, otherwise the training split.
///
/// `on_epoch` sees each record as soon as the epoch finishes.
pub fn train_loop_with(
    config: &TrainConfig,
    dataset: &Dataset,
    model: Model,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    config.validate()?;
    let train = dataset.split(Split::Train);
    if train.is_empty() {
        return Err(Error::InvalidArgument("dataset has no training samples".into()));
    }
    let val = {
        let v = dataset.split(Split::Val);
        if v.is_empty() {
            train.clone()
        } else {
            v
        }
    };
    let classifier = model.is_classifier();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut optimizer = Optimizer::new(config.optimizer);
    let mut model = model;
    let mut best_model = model.clone();
    let mut best_val_metric = evaluate(&model, &val)?;
    let mut best_epoch = 0;
    let mut history = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut lr = config.learning_rate;

    for epoch in 1..=config.epochs {
        let started = Instant::now();
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| train[i]).collect();
            let (loss, grad) = batch_gradient(&model, &batch)?;
            if !loss.is_finite() {
                return Err(Error::Diverged {
                    epoch,
                    reason: format!("batch loss is {loss}"),
                });
            }
            optimizer.step(&mut model, &grad, lr)?;
        }

        let train_loss = mean_loss(&model, &train)?;
        let val_loss = mean_loss(&model, &val)?;
        let val_metric = evaluate(&model, &val)?;
        if !(train_loss.is_finite() && val_loss.is_finite()) {
            return Err(Error::Diverged {
                epoch,
                reason: format!("train loss {train_loss}, val loss {val_loss}"),
            });
        }
        let record = EpochRecord {
            epoch,
            train_loss,
            val_loss,
            val_metric,
            lr,
            wall_ms: config.record_wall_ms.then(|| started.elapsed().as_millis() as u64),
        };
        on_epoch(&record);
        history.push(record);

        if better(classifier, val_metric, best_val_metric) {
            best_val_metric = val_metric;
            best_model = model.clone();
            best_epoch = epoch;
        } else if epoch - best_epoch >= config.patience {
            break;
        }
        lr *= config.lr_decay;
    }

    Ok(TrainOutcome {
        history,
        best_model,
        best_epoch,
        best_val_metric,
    })
}

pub fn train_loop(config: &TrainConfig, dataset: &Dataset, model: Model) -> Result<TrainOutcome> {
    train_loop_with(config, dataset, model, |_| {})
}
