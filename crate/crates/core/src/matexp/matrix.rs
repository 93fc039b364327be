use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense real square matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SquareMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(order: usize) -> Self {
        assert!(order >= 1, "matrix order must be at least 1");
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = 1.0;
        }
        m
    }

    /// Builds a diagonal matrix from `diag`.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a perfect square.
    pub fn from_row_major(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("matrix order must be at least 1".into()));
        }
        if data.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                actual: data.len(),
            });
        }
        Ok(Self { order, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let order = rows.len();
        let mut data = Vec::with_capacity(order * order);
        for row in rows {
            let row = row.as_ref();
            if row.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(order, data)
    }

    /// Matrix with a single unit entry at `(i, j)`.
    pub fn unit(order: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(order);
        m[(i, j)] = 1.0;
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            order: self.order,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.order, other.order);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert-Schmidt inner product `tr(selfᵀ other)`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.order, other.order);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        let n = self.order;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Spectral norm (largest singular value), from the eigenvalues of `selfᵀ self`.
    pub fn operator_norm(&self) -> f64 {
        let gram = &self.transpose() * self;
        symmetric_eigenvalues(&gram)
            .into_iter()
            .fold(0.0, f64::max)
            .max(0.0)
            .sqrt()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> f64 {
        let n = self.order;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| a[r1 * n + col].abs().total_cmp(&a[r2 * n + col].abs()))
                .unwrap();
            let p = a[pivot * n + col];
            if p == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            det *= p;
            for r in (col + 1)..n {
                let f = a[r * n + col] / p;
                if f != 0.0 {
                    for k in col..n {
                        a[r * n + k] -= f * a[col * n + k];
                    }
                }
            }
        }
        det
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &Self) {
        let b = block.order;
        assert!(row + b <= self.order && col + b <= self.order);
        for i in 0..b {
            let dst = (row + i) * self.order + col;
            self.data[dst..dst + b].copy_from_slice(&block.data[i * b..(i + 1) * b]);
        }
    }

    /// Extracts the `size × size` block whose top-left corner is `(row, col)`.
    pub fn block(&self, row: usize, col: usize, size: usize) -> Self {
        assert!(row + size <= self.order && col + size <= self.order);
        let mut out = Self::zeros(size);
        for i in 0..size {
            let src = (row + i) * self.order + col;
            out.data[i * size..(i + 1) * size].copy_from_slice(&self.data[src..src + size]);
        }
        out
    }

    /// Commutator `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.order);
        self.data
            .chunks(self.order)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub(crate) fn symmetric_eigenvalues(sym: &SquareMatrix) -> Vec<f64> {
    let n = sym.order();
    let mut a = sym.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.order + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.order + j]
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;

    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.order, rhs.order, "matrix order mismatch");
        let n = self.order;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let rk = &rhs.data[k * n..(k + 1) * n];
                for (d, &b) in dst.iter_mut().zip(rk) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Mul for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: SquareMatrix) -> SquareMatrix {
        &self * &rhs
    }
}

impl Mul<f64> for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: f64) -> SquareMatrix {
        self.scaled(rhs)
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.order, rhs.order, "matrix order mismatch");
        SquareMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.order, rhs.order, "matrix order mismatch");
        SquareMatrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scaled(-1.0)
    }
}

impl AddAssign<&SquareMatrix> for SquareMatrix {
    fn add_assign(&mut self, rhs: &SquareMatrix) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SquareMatrix> for SquareMatrix {
    fn sub_assign(&mut self, rhs: &SquareMatrix) {
        self.axpy(-1.0, rhs);
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.order)).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SquareMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SquareMatrix> for Vec<Vec<f64>> {
    fn from(m: SquareMatrix) -> Self {
        m.to_rows()
    }
}
