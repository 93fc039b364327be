//! Matrix exponential and its differential.
//!
//! `mat_exp` uses scaling and squaring around a truncated Taylor core.
//! The differential `(d exp)_A(X)` has two independent routes: the
//! block-augmented exponential (default) and the adjoint series
//! `Σ_k (−ad A)^k / (k+1)! (exp(A)·X)`. Each is a check on the other.

mod matrix;

pub use matrix::SquareMatrix;

use crate::error::{Error, Result};

/// Series evaluation happens only once the 1-norm is at most this value.
const SQUARING_THRESHOLD: f64 = 0.5;
/// Taylor degree for the scaled matrix; 0.5^19/19! is far below machine epsilon.
const TAYLOR_DEGREE: usize = 18;
/// Cap on terms of the adjoint series.
const AD_SERIES_MAX_TERMS: usize = 40;
const AD_SERIES_REL_TOL: f64 = 1e-16;

/// Which algorithm evaluates `(d exp)_A(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DexpMethod {
    /// Top-right block of `exp([[A, X], [0, A]])`.
    #[default]
    BlockAugmented,
    /// Truncated adjoint series.
    AdSeries,
}

fn ensure_finite(a: &SquareMatrix, what: &'static str) -> Result<()> {
    if a.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Matrix exponential by scaling and squaring.
pub fn mat_exp(a: &SquareMatrix) -> Result<SquareMatrix> {
    ensure_finite(a, "mat_exp input")?;
    let out = exp_unchecked(a);
    ensure_finite(&out, "mat_exp output")?;
    Ok(out)
}

pub(crate) fn exp_unchecked(a: &SquareMatrix) -> SquareMatrix {
    let norm = a.norm_1();
    let squarings = if norm > SQUARING_THRESHOLD {
        (norm / SQUARING_THRESHOLD).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scaled((-squarings as f64).exp2());

    // Horner: I + B(I + B/2(I + B/3(...)))
    let n = a.order();
    let ident = SquareMatrix::identity(n);
    let mut acc = ident.clone();
    for k in (1..=TAYLOR_DEGREE).rev() {
        let mut next = &scaled * &acc;
        next = next.scaled(1.0 / k as f64);
        next += &ident;
        acc = next;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// `(d exp)_A(X)` using the default method.
pub fn dexp(a: &SquareMatrix, x: &SquareMatrix) -> Result<SquareMatrix> {
    dexp_with(DexpMethod::default(), a, x)
}

pub fn dexp_with(method: DexpMethod, a: &SquareMatrix, x: &SquareMatrix) -> Result<SquareMatrix> {
    match method {
        DexpMethod::BlockAugmented => dexp_block_oracle(a, x),
        DexpMethod::AdSeries => dexp_ad_series(a, x),
    }
}

fn check_pair(a: &SquareMatrix, x: &SquareMatrix) -> Result<()> {
    if a.order() != x.order() {
        return Err(Error::InvalidArgument(format!(
            "dexp operands have orders {} and {}",
            a.order(),
            x.order()
        )));
    }
    ensure_finite(a, "dexp base point")?;
    ensure_finite(x, "dexp direction")
}

/// Top-right block of `exp([[A, X], [0, A]])`.
pub fn dexp_block_oracle(a: &SquareMatrix, x: &SquareMatrix) -> Result<SquareMatrix> {
    check_pair(a, x)?;
    let m = a.order();
    let mut big = SquareMatrix::zeros(2 * m);
    big.set_block(0, 0, a);
    big.set_block(0, m, x);
    big.set_block(m, m, a);
    let e = exp_unchecked(&big);
    let out = e.block(0, m, m);
    ensure_finite(&out, "dexp output")?;
    Ok(out)
}

/// `Σ_{k≥0} (−ad A)^k / (k+1)! (exp(A)·X)`, stopped once a term is negligible
/// relative to the running sum.
pub fn dexp_ad_series(a: &SquareMatrix, x: &SquareMatrix) -> Result<SquareMatrix> {
    check_pair(a, x)?;
    let mut term = &exp_unchecked(a) * x;
    let mut sum = term.clone();
    for k in 1..AD_SERIES_MAX_TERMS {
        // term_k = (−ad A)^k (e^A X) / (k+1)!
        term = term.commutator(a).scaled(1.0 / (k + 1) as f64);
        sum += &term;
        if term.frobenius_norm() < AD_SERIES_REL_TOL * sum.frobenius_norm() {
            break;
        }
    }
    ensure_finite(&sum, "dexp output")?;
    Ok(sum)
}
