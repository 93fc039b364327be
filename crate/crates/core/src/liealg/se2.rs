use super::AlgebraSpec;
use crate::error::{Error, Result};
use crate::matexp::SquareMatrix;

const SE2_MEMBERSHIP_TOL: f64 = 1e-8;

/// Homogeneous 3×3 matrix of the rigid motion "rotate by `angle`, then translate".
pub fn se2_element(angle: f64, tx: f64, ty: f64) -> SquareMatrix {
    let (s, c) = angle.sin_cos();
    SquareMatrix::from_rows(&[[c, -s, tx], [s, c, ty], [0.0, 0.0, 1.0]]).expect("3x3")
}

/// Applies a rigid motion to a planar point: first two components of `T·(p, 1)`.
pub fn apply_se2(t: &SquareMatrix, p: [f64; 2]) -> Result<[f64; 2]> {
    if !AlgebraSpec::se2().in_group(t, SE2_MEMBERSHIP_TOL) {
        return Err(Error::InvalidArgument("transform is not in SE(2)".into()));
    }
    Ok(apply_unchecked(t, p))
}

#[inline]
pub(crate) fn apply_unchecked(t: &SquareMatrix, p: [f64; 2]) -> [f64; 2] {
    [
        t[(0, 0)] * p[0] + t[(0, 1)] * p[1] + t[(0, 2)],
        t[(1, 0)] * p[0] + t[(1, 1)] * p[1] + t[(1, 2)],
    ]
}
