use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{AlgebraSpec, Family};
use crate::error::{check_dim, Error, Result};
use crate::matexp::SquareMatrix;

/// Tolerance at which constructed weights must already lie in the algebra.
const MEMBERSHIP_TOL: f64 = 1e-12;
/// Loaded weights further than this from the algebra are rejected.
const LOAD_REPROJECT_TOL: f64 = 1e-6;

/// Trainable coefficients `θ = (θ_1, …, θ_d)` of the linear map
/// `M_θ(v) = Σ_j θ_j v_j` into the Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct DevWeights {
    spec: AlgebraSpec,
    theta: Vec<SquareMatrix>,
}

impl DevWeights {
    /// Validates that every slice already lies in the algebra.
    pub fn new(spec: AlgebraSpec, theta: Vec<SquareMatrix>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidArgument("weights need at least one input channel".into()));
        }
        for (j, t) in theta.iter().enumerate() {
            check_dim(spec.order(), t.order())?;
            if !t.is_finite() {
                return Err(Error::NonFinite("weights"));
            }
            let tol = MEMBERSHIP_TOL * t.frobenius_norm().max(1.0);
            if !spec.in_algebra(t, tol) {
                return Err(Error::ConstraintViolation(format!(
                    "theta[{j}] is not in {} (residual {:.3e})",
                    spec,
                    spec.algebra_residual(t)
                )));
            }
        }
        Ok(Self { spec, theta })
    }

    /// Projects every slice onto the algebra.
    pub fn projected(spec: AlgebraSpec, theta: Vec<SquareMatrix>) -> Result<Self> {
        let theta = theta
            .iter()
            .map(|t| spec.project(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, theta)
    }

    pub fn zeros(spec: AlgebraSpec, dim_in: usize) -> Self {
        Self {
            spec,
            theta: vec![SquareMatrix::zeros(spec.order()); dim_in],
        }
    }

    #[inline]
    pub fn spec(&self) -> &AlgebraSpec {
        &self.spec
    }

    #[inline]
    pub fn dim_in(&self) -> usize {
        self.theta.len()
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.spec.order()
    }

    #[inline]
    pub fn theta(&self) -> &[SquareMatrix] {
        &self.theta
    }

    /// Mutable access for optimizers; callers must re-project afterwards.
    pub(crate) fn theta_mut(&mut self) -> &mut [SquareMatrix] {
        &mut self.theta
    }

    pub(crate) fn reproject(&mut self) {
        for t in &mut self.theta {
            *t = self.spec.project_unchecked(t);
        }
    }

    /// Number of real parameters in the ambient `d × m × m` storage.
    pub fn num_parameters(&self) -> usize {
        self.theta.len() * self.order() * self.order()
    }

    pub fn to_file(&self) -> WeightsFile {
        WeightsFile {
            family: self.spec.family(),
            order: self.spec.order(),
            dim_in: self.dim_in(),
            theta: self.theta.iter().map(|t| t.to_rows()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("weights serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WeightsFile =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        file.into_weights()
    }
}

/// On-disk weights document: `{"family","order","dim_in","theta":[d][m][m]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsFile {
    pub family: Family,
    pub order: usize,
    pub dim_in: usize,
    pub theta: Vec<Vec<Vec<f64>>>,
}

impl WeightsFile {
    /// Validates shape and algebra membership. Slices within the re-projection
    /// tolerance are projected back onto the algebra; anything further away is
    /// rejected as a constraint violation.
    pub fn into_weights(self) -> Result<DevWeights> {
        let spec = AlgebraSpec::new(self.family, self.order)?;
        check_dim(self.dim_in, self.theta.len())?;
        let mut theta = Vec::with_capacity(self.theta.len());
        for (j, rows) in self.theta.into_iter().enumerate() {
            check_dim(spec.order(), rows.len())?;
            let t = SquareMatrix::from_rows(&rows)?;
            if !t.is_finite() {
                return Err(Error::NonFinite("weights file"));
            }
            let residual = spec.algebra_residual(&t);
            if residual > LOAD_REPROJECT_TOL {
                return Err(Error::ConstraintViolation(format!(
                    "theta[{j}] is not in {spec} (residual {residual:.3e})"
                )));
            }
            // Exact members are fixed points of the projection bit-for-bit.
            theta.push(spec.project_unchecked(&t));
        }
        DevWeights::new(spec, theta)
    }
}

/// `M_θ(v) = Σ_j θ_j v_j`.
pub fn embed_linear(weights: &DevWeights, v: &[f64]) -> Result<SquareMatrix> {
    check_dim(weights.dim_in(), v.len())?;
    Ok(embed_unchecked(weights.theta(), v))
}

pub(crate) fn embed_unchecked(theta: &[SquareMatrix], v: &[f64]) -> SquareMatrix {
    let mut out = SquareMatrix::zeros(theta[0].order());
    for (t, &c) in theta.iter().zip(v) {
        if c != 0.0 {
            out.axpy(c, t);
        }
    }
    out
}

/// Gaussian initialisation with standard deviation `scale / √(m·d)`, projected
/// onto the algebra. Deterministic in `seed`.
pub fn random_init(spec: AlgebraSpec, dim_in: usize, scale: f64, seed: u64) -> Result<DevWeights> {
    if dim_in == 0 {
        return Err(Error::InvalidArgument("dim_in must be positive".into()));
    }
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid init scale {scale}")));
    }
    let m = spec.order();
    let std = scale / ((m * dim_in) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let theta = (0..dim_in)
        .map(|_| {
            let data = (0..m * m).map(|_| std * normal.sample(&mut rng)).collect();
            let raw = SquareMatrix::from_row_major(m, data).expect("square");
            spec.project_unchecked(&raw)
        })
        .collect();
    DevWeights::new(spec, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> AlgebraSpec {
        AlgebraSpec::so(3).unwrap()
    }

    #[test]
    fn init_is_deterministic() {
        let a = random_init(so3(), 2, 1.0, 7).unwrap();
        let b = random_init(so3(), 2, 1.0, 7).unwrap();
        let c = random_init(so3(), 2, 1.0, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_scale_gives_zero_weights() {
        let w = random_init(so3(), 3, 0.0, 1).unwrap();
        assert!(w.theta().iter().all(|t| t.max_abs() == 0.0));
    }

    #[test]
    fn embed_examples() {
        let w = random_init(so3(), 2, 1.0, 3).unwrap();
        assert_eq!(embed_linear(&w, &[1.0, 0.0]).unwrap(), w.theta()[0]);
        assert_eq!(embed_linear(&w, &[0.0, 0.0]).unwrap(), SquareMatrix::zeros(3));
        let expected = &w.theta()[0] + &w.theta()[1].scaled(2.0);
        assert!((&embed_linear(&w, &[1.0, 2.0]).unwrap() - &expected).frobenius_norm() < 1e-15);
        assert!(matches!(
            embed_linear(&w, &[1.0]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn new_rejects_off_algebra() {
        let sym = SquareMatrix::identity(3);
        assert!(matches!(DevWeights::new(so3(), vec![sym]), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let w = random_init(AlgebraSpec::new(Family::Sp, 4).unwrap(), 3, 1.3, 11).unwrap();
        let back = DevWeights::from_json(&w.to_json()).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn loader_reprojects_small_defects_and_rejects_large() {
        let w = random_init(so3(), 1, 1.0, 5).unwrap();
        let mut file = w.to_file();
        file.theta[0][0][0] = 1e-8;
        let fixed = file.clone().into_weights().unwrap();
        assert!(fixed.spec().in_algebra(&fixed.theta()[0], 1e-15));
        file.theta[0][0][0] = 1e-3;
        assert!(matches!(file.into_weights(), Err(Error::ConstraintViolation(_))));
    }

    #[test]
    fn loader_rejects_unknown_keys() {
        let text = r#"{"family":"SO","order":2,"dim_in":1,"theta":[[[0,1],[-1,0]]],"extra":1}"#;
        assert!(matches!(DevWeights::from_json(text), Err(Error::Serialization(_))));
    }
}
