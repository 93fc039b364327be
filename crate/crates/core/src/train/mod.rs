//! Losses, optimizers, synthetic datasets and the training loop.

mod data;
mod loss;
mod model;
mod optim;
mod trainer;

pub use data::{
    gen_rigid_motion_dataset, gen_rotation_dataset, levy_area, static_baseline_mse, Dataset,
    RigidMotionParams, Sample, Split, ROTATION_POINTS,
};
pub use loss::{mse, softmax_xent};
pub use model::{Head, InputMode, Model, ModelFile, ModelGrad, Target};
pub use optim::{Optimizer, OptimizerKind, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use trainer::{
    batch_gradient, evaluate, mean_loss, train_loop, train_loop_with, EpochRecord, TrainConfig,
    TrainOutcome,
};
