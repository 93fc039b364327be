use super::forward::{develop_forward, OutputMode};
use crate::error::{Error, Result};
use crate::liealg::{AlgebraSpec, DevWeights, Family};
use crate::matexp::SquareMatrix;
use crate::sigpath::TimeSeries;

/// The fixed map `(x, y) ↦ [[0,0,x],[0,0,y],[x,y,0]]` into so(2,1).
pub fn hyperbolic_weights() -> DevWeights {
    let spec = AlgebraSpec::new(Family::Lorentz, 3).expect("so(2,1)");
    let mut tx = SquareMatrix::zeros(3);
    tx[(0, 2)] = 1.0;
    tx[(2, 0)] = 1.0;
    let mut ty = SquareMatrix::zeros(3);
    ty[(1, 2)] = 1.0;
    ty[(2, 1)] = 1.0;
    DevWeights::new(spec, vec![tx, ty]).expect("generators lie in so(2,1)")
}

/// Hyperbolic development of a planar path: `z_n · (0, 0, 1)ᵀ` for every
/// state, a curve on the hyperboloid `x₁² + x₂² − x₃² = −1`, `x₃ > 0`.
pub fn hyperbolic_develop(x: &TimeSeries) -> Result<Vec<[f64; 3]>> {
    if x.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "hyperbolic development needs a 2-dimensional path, got {}",
            x.dim()
        )));
    }
    let out = develop_forward(&hyperbolic_weights(), x, OutputMode::Sequence)?;
    Ok(out
        .states()
        .iter()
        .map(|z| [z[(0, 2)], z[(1, 2)], z[(2, 2)]])
        .collect())
}
