use super::series::{increments, TimeSeries};
use crate::error::{check_dim, Error, Result};
use crate::liealg::DevWeights;
use crate::matexp::SquareMatrix;

/// Largest admissible single level, `d^K`.
pub const MAX_LEVEL_SIZE: usize = 1_000_000;
pub const MAX_DEPTH: usize = 12;

/// Truncated signature: level `k` is a flat row-major array of `d^k` reals,
/// first index slowest. Level 0 is the scalar 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSig {
    dim: usize,
    levels: Vec<Vec<f64>>,
}

fn check_size(dim: usize, depth: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument("signature dimension must be positive".into()));
    }
    if depth > MAX_DEPTH {
        return Err(Error::ResourceLimit(format!("depth {depth} exceeds {MAX_DEPTH}")));
    }
    match dim.checked_pow(depth as u32) {
        Some(n) if n <= MAX_LEVEL_SIZE => Ok(()),
        _ => Err(Error::ResourceLimit(format!(
            "level size {dim}^{depth} exceeds {MAX_LEVEL_SIZE}"
        ))),
    }
}

impl TruncSig {
    /// The unit element `(1, 0, 0, …)`.
    pub fn unit(dim: usize, depth: usize) -> Result<Self> {
        check_size(dim, depth)?;
        let levels = (0..=depth)
            .map(|k| {
                let mut v = vec![0.0; dim.pow(k as u32)];
                if k == 0 {
                    v[0] = 1.0;
                }
                v
            })
            .collect();
        Ok(Self { dim, levels })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Entry for the multi-index `(i_1, …, i_k)`.
    pub fn get(&self, word: &[usize]) -> f64 {
        let idx = word.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.levels[word.len()][idx]
    }

    /// All levels concatenated, optionally dropping the constant level 0.
    pub fn flatten(&self, include_constant: bool) -> Vec<f64> {
        let skip = usize::from(!include_constant);
        self.levels.iter().skip(skip).flatten().copied().collect()
    }
}

/// Signature of a single linear segment: level `k` is `Δ^{⊗k} / k!`.
pub fn sig_linear_segment(delta: &[f64], depth: usize) -> Result<TruncSig> {
    let dim = delta.len();
    check_size(dim, depth)?;
    if !delta.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("segment increment"));
    }
    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(vec![1.0]);
    for k in 1..=depth {
        let prev: &Vec<f64> = &levels[k - 1];
        let inv_k = 1.0 / k as f64;
        let mut next = Vec::with_capacity(prev.len() * dim);
        for &p in prev {
            next.extend(delta.iter().map(|&d| p * d * inv_k));
        }
        levels.push(next);
    }
    Ok(TruncSig { dim, levels })
}

/// Truncated tensor product: level `k` is `Σ_{i+j=k} a^i ⊗ b^j`.
pub fn chen_product(a: &TruncSig, b: &TruncSig, depth: usize) -> Result<TruncSig> {
    check_dim(a.dim, b.dim)?;
    if depth > a.depth() || depth > b.depth() {
        return Err(Error::InvalidArgument(format!(
            "cannot truncate depths {} and {} at {depth}",
            a.depth(),
            b.depth()
        )));
    }
    let dim = a.dim;
    let mut levels = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let mut out = vec![0.0; dim.pow(k as u32)];
        for i in 0..=k {
            let left = &a.levels[i];
            let right = &b.levels[k - i];
            let stride = right.len();
            for (u, &l) in left.iter().enumerate() {
                if l == 0.0 {
                    continue;
                }
                let dst = &mut out[u * stride..(u + 1) * stride];
                for (o, &r) in dst.iter_mut().zip(right) {
                    *o += l * r;
                }
            }
        }
        levels.push(out);
    }
    Ok(TruncSig { dim, levels })
}

/// Truncated signature of the piecewise-linear lift of `x`.
pub fn signature(x: &TimeSeries, depth: usize) -> Result<TruncSig> {
    let mut acc = TruncSig::unit(x.dim(), depth)?;
    for delta in increments(x) {
        if delta.iter().all(|&v| v == 0.0) {
            continue;
        }
        let seg = sig_linear_segment(&delta, depth)?;
        acc = chen_product(&acc, &seg, depth)?;
    }
    Ok(acc)
}

/// Number of signature coordinates up to depth `K`: `Σ_{k} d^k`, over
/// `k = 0..=K` when `include_constant`, else `k = 1..=K`.
pub fn sig_dim(dim: usize, depth: usize, include_constant: bool) -> u128 {
    let start = u32::from(!include_constant);
    (start..=depth as u32).map(|k| (dim as u128).pow(k)).sum()
}

/// Canonical extension `M̃` of `M_θ` to the truncated tensor algebra:
/// `Σ_k Σ_{i_1..i_k} S_{i_1..i_k} θ_{i_1}···θ_{i_k}`.
pub fn extend_functional(weights: &DevWeights, sig: &TruncSig) -> Result<SquareMatrix> {
    check_dim(weights.dim_in(), sig.dim())?;
    check_size(sig.dim(), sig.depth())?;
    let m = weights.order();
    let theta = weights.theta();
    let mut out = SquareMatrix::identity(m).scaled(sig.levels[0][0]);
    // Products θ_{i_1}···θ_{i_k} for every word of the current length, in
    // the same row-major order as the signature level.
    let mut words = vec![SquareMatrix::identity(m)];
    for k in 1..=sig.depth() {
        let mut next = Vec::with_capacity(words.len() * theta.len());
        for w in &words {
            for t in theta {
                next.push(w * t);
            }
        }
        words = next;
        for (coef, prod) in sig.levels[k].iter().zip(&words) {
            if *coef != 0.0 {
                out.axpy(*coef, prod);
            }
        }
    }
    Ok(out)
}
