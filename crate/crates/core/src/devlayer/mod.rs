//! The path development layer.
//!
//! Forward: `z_0 = I`, `z_n = z_{n−1}·exp(M_θ(Δx_n))`. Backward: a reverse
//! sweep of the adjoint through the step exponentials, with each step's
//! contribution to `∇_θ` obtained from the differential of `exp`.

mod backward;
mod forward;
mod hyperbolic;

pub use backward::{
    adjoint_trace, develop_backward, develop_backward_with_input, grad_input, GradResult,
    LossPartials,
};
pub use forward::{develop_forward, DevOutput, OutputMode};
pub use hyperbolic::{hyperbolic_develop, hyperbolic_weights};
pub mod gradcheck;
