use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::loss::{mse, softmax_xent};
use crate::devlayer::{develop_backward, develop_forward, LossPartials, OutputMode};
use crate::error::{check_dim, Error, Result};
use crate::liealg::se2::apply_unchecked;
use crate::liealg::{random_init, AlgebraSpec, DevWeights, Family, WeightsFile};
use crate::matexp::SquareMatrix;
use crate::sigpath::{add_time, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    #[default]
    Raw,
    AddTime,
}

impl InputMode {
    pub fn apply<'a>(&self, x: &'a TimeSeries) -> Cow<'a, TimeSeries> {
        match self {
            InputMode::Raw => Cow::Borrowed(x),
            InputMode::AddTime => Cow::Owned(add_time(x)),
        }
    }

    /// Channels the development layer sees for a raw series of dimension `dim`.
    pub fn dev_dim(&self, dim: usize) -> usize {
        match self {
            InputMode::Raw => dim,
            InputMode::AddTime => dim + 1,
        }
    }
}

/// What a sample's target is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Class(usize),
    Vector(Vec<f64>),
}

/// Output layer on top of `z_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Head {
    /// Affine map of the row-major flattened `z_N` (`m²` features). Trained
    /// with cross entropy when `classify`, otherwise with MSE.
    Linear {
        outputs: usize,
        classify: bool,
        /// Row-major `outputs × m²`.
        weight: Vec<f64>,
        bias: Vec<f64>,
    },
    /// Regression through the group action: predicts `z_N ⋅ p_last` where
    /// `p_last` is the first two raw channels of the last observation.
    Se2Action,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dev: DevWeights,
    pub head: Head,
    pub input_mode: InputMode,
}

/// Gradient of a sample (or batch) loss w.r.t. every model parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrad {
    pub dtheta: Vec<SquareMatrix>,
    pub dweight: Vec<f64>,
    pub dbias: Vec<f64>,
}

impl ModelGrad {
    pub fn zeros_like(model: &Model) -> Self {
        let (nw, nb) = match &model.head {
            Head::Linear { weight, bias, .. } => (weight.len(), bias.len()),
            Head::Se2Action => (0, 0),
        };
        Self {
            dtheta: vec![SquareMatrix::zeros(model.dev.order()); model.dev.dim_in()],
            dweight: vec![0.0; nw],
            dbias: vec![0.0; nb],
        }
    }

    pub fn accumulate(&mut self, other: &Self, scale: f64) {
        for (a, b) in self.dtheta.iter_mut().zip(&other.dtheta) {
            a.axpy(scale, b);
        }
        for (a, b) in self.dweight.iter_mut().zip(&other.dweight) {
            *a += scale * b;
        }
        for (a, b) in self.dbias.iter_mut().zip(&other.dbias) {
            *a += scale * b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.dtheta.iter().all(SquareMatrix::is_finite)
            && self.dweight.iter().chain(&self.dbias).all(|v| v.is_finite())
    }
}

impl Model {
    /// DEV + linear classifier, weights drawn deterministically from `seed`.
    pub fn classifier(
        spec: AlgebraSpec,
        raw_dim: usize,
        classes: usize,
        input_mode: InputMode,
        init_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::linear(spec, raw_dim, classes, true, input_mode, init_scale, seed)
    }

    /// DEV + linear regression head.
    pub fn regressor(
        spec: AlgebraSpec,
        raw_dim: usize,
        outputs: usize,
        input_mode: InputMode,
        init_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::linear(spec, raw_dim, outputs, false, input_mode, init_scale, seed)
    }

    fn linear(
        spec: AlgebraSpec,
        raw_dim: usize,
        outputs: usize,
        classify: bool,
        input_mode: InputMode,
        init_scale: f64,
        seed: u64,
    ) -> Result<Self> {
        if outputs == 0 || (classify && outputs < 2) {
            return Err(Error::InvalidArgument(format!("invalid output count {outputs}")));
        }
        let dev = random_init(spec, input_mode.dev_dim(raw_dim), init_scale, seed)?;
        let features = spec.order() * spec.order();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let normal = Normal::new(0.0, 1.0 / (features as f64).sqrt()).unwrap();
        let weight = (0..outputs * features).map(|_| normal.sample(&mut rng)).collect();
        Ok(Self {
            dev,
            head: Head::Linear {
                outputs,
                classify,
                weight,
                bias: vec![0.0; outputs],
            },
            input_mode,
        })
    }

    /// DEV(SE2) whose output acts on the last observed position.
    pub fn se2_predictor(raw_dim: usize, input_mode: InputMode, init_scale: f64, seed: u64) -> Result<Self> {
        if raw_dim < 2 {
            return Err(Error::InvalidArgument("SE2 prediction needs planar positions".into()));
        }
        let dev = random_init(AlgebraSpec::se2(), input_mode.dev_dim(raw_dim), init_scale, seed)?;
        Ok(Self {
            dev,
            head: Head::Se2Action,
            input_mode,
        })
    }

    pub fn is_classifier(&self) -> bool {
        matches!(self.head, Head::Linear { classify: true, .. })
    }

    fn features(z: &SquareMatrix) -> &[f64] {
        z.as_slice()
    }

    fn head_forward(&self, x: &TimeSeries, z: &SquareMatrix) -> Vec<f64> {
        match &self.head {
            Head::Linear { outputs, weight, bias, .. } => {
                let f = Self::features(z);
                (0..*outputs)
                    .map(|c| {
                        let row = &weight[c * f.len()..(c + 1) * f.len()];
                        bias[c] + row.iter().zip(f).map(|(w, v)| w * v).sum::<f64>()
                    })
                    .collect()
            }
            Head::Se2Action => {
                let last = x.point(x.len() - 1);
                apply_unchecked(z, [last[0], last[1]]).to_vec()
            }
        }
    }

    /// Logits (classification) or predictions (regression) for one series.
    pub fn predict(&self, x: &TimeSeries) -> Result<Vec<f64>> {
        let input = self.input_mode.apply(x);
        let out = develop_forward(&self.dev, &input, OutputMode::Last)?;
        Ok(self.head_forward(x, out.last()))
    }

    /// Predicted class (argmax of the logits; first maximum wins).
    pub fn predict_class(&self, x: &TimeSeries) -> Result<usize> {
        let logits = self.predict(x)?;
        Ok(argmax(&logits))
    }

    fn sample_loss(&self, out: &[f64], target: &Target) -> Result<(f64, Vec<f64>)> {
        match (&self.head, target) {
            (Head::Linear { classify: true, .. }, Target::Class(c)) => softmax_xent(out, *c),
            (Head::Linear { classify: false, .. }, Target::Vector(t)) | (Head::Se2Action, Target::Vector(t)) => {
                mse(out, t)
            }
            _ => Err(Error::InvalidArgument("target kind does not match the model head".into())),
        }
    }

    pub fn loss(&self, x: &TimeSeries, target: &Target) -> Result<f64> {
        Ok(self.sample_loss(&self.predict(x)?, target)?.0)
    }

    /// Loss of one sample and its gradient w.r.t. all parameters.
    pub fn loss_and_grad(&self, x: &TimeSeries, target: &Target) -> Result<(f64, ModelGrad)> {
        let input = self.input_mode.apply(x);
        let out = develop_forward(&self.dev, &input, OutputMode::Last)?;
        let z = out.last();
        let pred = self.head_forward(x, z);
        let (loss, dout) = self.sample_loss(&pred, target)?;

        let m = self.dev.order();
        let mut grad = ModelGrad::zeros_like(self);
        let mut dz = SquareMatrix::zeros(m);
        match &self.head {
            Head::Linear { outputs, weight, .. } => {
                let f = Self::features(z);
                let nf = f.len();
                for c in 0..*outputs {
                    let g = dout[c];
                    grad.dbias[c] = g;
                    let row = &weight[c * nf..(c + 1) * nf];
                    let drow = &mut grad.dweight[c * nf..(c + 1) * nf];
                    for ((dw, v), (dzk, w)) in drow.iter_mut().zip(f).zip(dz.as_mut_slice().iter_mut().zip(row)) {
                        *dw = g * v;
                        *dzk += g * w;
                    }
                }
            }
            Head::Se2Action => {
                let last = x.point(x.len() - 1);
                let anchor = [last[0], last[1], 1.0];
                for i in 0..2 {
                    for (j, a) in anchor.iter().enumerate() {
                        dz[(i, j)] = dout[i] * a;
                    }
                }
            }
        }
        let partials = LossPartials::last_only(input.len(), dz)?;
        grad.dtheta = develop_backward(&self.dev, &input, &out, &partials)?.dtheta;
        Ok((loss, grad))
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            dev: self.dev.to_file(),
            head: self.head.clone(),
            input_mode: self.input_mode,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        file.into_model()
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) })
        .0
}

/// Persisted model: development weights plus the output head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub dev: WeightsFile,
    pub head: Head,
    pub input_mode: InputMode,
}

impl ModelFile {
    pub fn into_model(self) -> Result<Model> {
        let dev = self.dev.into_weights()?;
        let m = dev.order();
        match &self.head {
            Head::Linear { outputs, weight, bias, .. } => {
                check_dim(outputs * m * m, weight.len())?;
                check_dim(*outputs, bias.len())?;
                if !weight.iter().chain(bias).all(|v| v.is_finite()) {
                    return Err(Error::NonFinite("readout weights"));
                }
            }
            Head::Se2Action => {
                if dev.spec().family() != Family::Se2 {
                    return Err(Error::InvalidArgument("SE2 action head needs SE2 weights".into()));
                }
            }
        }
        Ok(Model {
            dev,
            head: self.head,
            input_mode: self.input_mode,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> TimeSeries {
        TimeSeries::new(2, &[vec![0.0, 0.0], vec![0.4, 0.1], vec![0.5, 0.6], vec![0.1, 0.9]]).unwrap()
    }

    #[test]
    fn zero_readout_gives_bias_logits() {
        let mut model = Model::classifier(AlgebraSpec::so(3).unwrap(), 2, 3, InputMode::Raw, 1.0, 1).unwrap();
        if let Head::Linear { weight, bias, .. } = &mut model.head {
            weight.iter_mut().for_each(|w| *w = 0.0);
            *bias = vec![0.5, -1.0, 2.0];
        }
        assert_eq!(model.predict(&path()).unwrap(), vec![0.5, -1.0, 2.0]);
    }

    #[test]
    fn readout_shape_contract() {
        let model = Model::classifier(AlgebraSpec::so(4).unwrap(), 2, 5, InputMode::AddTime, 1.0, 1).unwrap();
        assert_eq!(model.dev.dim_in(), 3);
        match &model.head {
            Head::Linear { weight, bias, .. } => {
                assert_eq!(weight.len(), 5 * 16);
                assert_eq!(bias.len(), 5);
            }
            Head::Se2Action => unreachable!(),
        }
        assert_eq!(model.predict(&path()).unwrap().len(), 5);
    }

    #[test]
    fn readout_gradient_matches_differences() {
        let model = Model::classifier(AlgebraSpec::so(3).unwrap(), 2, 3, InputMode::Raw, 1.0, 4).unwrap();
        let target = Target::Class(1);
        let (_, grad) = model.loss_and_grad(&path(), &target).unwrap();
        let h = 1e-6;
        for k in [0, 5, 17, 26] {
            let bump = |s: f64| {
                let mut m = model.clone();
                if let Head::Linear { weight, .. } = &mut m.head {
                    weight[k] += s;
                }
                m.loss(&path(), &target).unwrap()
            };
            let fd = (bump(h) - bump(-h)) / (2.0 * h);
            assert!((fd - grad.dweight[k]).abs() < 1e-8, "{k}");
        }
        for c in 0..3 {
            let bump = |s: f64| {
                let mut m = model.clone();
                if let Head::Linear { bias, .. } = &mut m.head {
                    bias[c] += s;
                }
                m.loss(&path(), &target).unwrap()
            };
            let fd = (bump(h) - bump(-h)) / (2.0 * h);
            assert!((fd - grad.dbias[c]).abs() < 1e-8);
        }
    }

    #[test]
    fn mismatched_target_is_rejected() {
        let model = Model::se2_predictor(2, InputMode::Raw, 1.0, 1).unwrap();
        assert!(model.loss(&path(), &Target::Class(0)).is_err());
        assert!(model.loss(&path(), &Target::Vector(vec![0.0, 0.0])).is_ok());
    }

    #[test]
    fn model_json_roundtrip() {
        let model = Model::regressor(AlgebraSpec::new(Family::Lorentz, 3).unwrap(), 2, 2, InputMode::AddTime, 0.7, 9).unwrap();
        assert_eq!(Model::from_json(&model.to_json()).unwrap(), model);
    }
}
