use crate::error::{check_dim, Error, Result};

/// Cross entropy of `softmax(logits)` against `label`, with its gradient
/// `softmax − onehot`. Uses the log-sum-exp shift for stability.
pub fn softmax_xent(logits: &[f64], label: usize) -> Result<(f64, Vec<f64>)> {
    if label >= logits.len() {
        return Err(Error::InvalidArgument(format!(
            "label {label} out of range for {} classes",
            logits.len()
        )));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::NonFinite("logits"));
    }
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let loss = sum.ln() + max - logits[label];
    let mut grad: Vec<f64> = exps.iter().map(|e| e / sum).collect();
    grad[label] -= 1.0;
    Ok((loss, grad))
}

/// Mean squared error over components, with gradient `2(pred − target)/n`.
pub fn mse(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(target.len(), pred.len())?;
    if pred.is_empty() {
        return Err(Error::InvalidArgument("mse of empty vectors".into()));
    }
    let n = pred.len() as f64;
    let diff: Vec<f64> = pred.iter().zip(target).map(|(p, t)| p - t).collect();
    let loss = diff.iter().map(|d| d * d).sum::<f64>() / n;
    let grad = diff.iter().map(|d| 2.0 * d / n).collect();
    Ok((loss, grad))
}
