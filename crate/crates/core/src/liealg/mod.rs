//! Matrix Lie algebra families, nearest-point projections and group tests.

pub(crate) mod se2;
pub(crate) mod weights;

pub use se2::{apply_se2, se2_element};
pub use weights::{embed_linear, random_init, DevWeights, WeightsFile};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matexp::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// General linear, unconstrained.
    #[serde(rename = "GL")]
    Gl,
    /// Skew-symmetric matrices, group SO(m).
    #[serde(rename = "SO")]
    So,
    /// Rigid motions of the plane, m = 3.
    #[serde(rename = "SE2")]
    Se2,
    /// `AᵀJ + JA = 0` with `J = [[0, I], [I, 0]]`, m even.
    #[serde(rename = "SP")]
    Sp,
    /// `Aᵀη + ηA = 0` with `η = diag(1, …, 1, −1)`.
    #[serde(rename = "LORENTZ")]
    Lorentz,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Gl, Family::So, Family::Se2, Family::Sp, Family::Lorentz];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gl => "GL",
            Family::So => "SO",
            Family::Se2 => "SE2",
            Family::Sp => "SP",
            Family::Lorentz => "LORENTZ",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GL" => Ok(Family::Gl),
            "SO" => Ok(Family::So),
            "SE2" | "SE" => Ok(Family::Se2),
            "SP" => Ok(Family::Sp),
            "LORENTZ" | "SO21" | "HYPERBOLIC" => Ok(Family::Lorentz),
            other => Err(Error::InvalidArgument(format!("unknown algebra family `{other}`"))),
        }
    }
}

/// A Lie-algebra family together with its matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct AlgebraSpec {
    family: Family,
    order: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: Family,
    order: usize,
}

impl TryFrom<RawSpec> for AlgebraSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        AlgebraSpec::new(raw.family, raw.order)
    }
}

impl From<AlgebraSpec> for RawSpec {
    fn from(s: AlgebraSpec) -> Self {
        RawSpec {
            family: s.family,
            order: s.order,
        }
    }
}

impl AlgebraSpec {
    pub fn new(family: Family, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("algebra order must be at least 1".into()));
        }
        match family {
            Family::Se2 if order != 3 => Err(Error::InvalidArgument(format!(
                "SE2 requires order 3, got {order}"
            ))),
            Family::Sp if !order.is_multiple_of(2) => Err(Error::InvalidArgument(format!(
                "SP requires an even order, got {order}"
            ))),
            Family::Lorentz if order < 2 => Err(Error::InvalidArgument(
                "LORENTZ requires order at least 2".into(),
            )),
            _ => Ok(Self { family, order }),
        }
    }

    pub fn so(order: usize) -> Result<Self> {
        Self::new(Family::So, order)
    }

    pub fn se2() -> Self {
        Self {
            family: Family::Se2,
            order: 3,
        }
    }

    #[inline]
    pub fn family(&self) -> Family {
        self.family
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Real dimension of the algebra.
    pub fn dimension(&self) -> usize {
        let m = self.order;
        match self.family {
            Family::Gl => m * m,
            Family::So | Family::Lorentz => m * (m - 1) / 2,
            Family::Se2 => 3,
            // J is symmetric here, so the algebra has the dimension of so(m/2, m/2).
            Family::Sp => m * (m - 1) / 2,
        }
    }

    fn check_order(&self, a: &SquareMatrix) -> Result<()> {
        if a.order() != self.order {
            return Err(Error::InvalidArgument(format!(
                "matrix of order {} does not match {} algebra of order {}",
                a.order(),
                self.family,
                self.order
            )));
        }
        Ok(())
    }

    /// Orthonormal basis (Hilbert-Schmidt) of the algebra.
    pub fn basis(&self) -> Vec<SquareMatrix> {
        let m = self.order;
        let mut basis: Vec<SquareMatrix> = Vec::with_capacity(self.dimension());
        for i in 0..m {
            for j in 0..m {
                let mut v = self.project_unchecked(&SquareMatrix::unit(m, i, j));
                for b in &basis {
                    let c = b.inner(&v);
                    v.axpy(-c, b);
                }
                let norm = v.frobenius_norm();
                if norm > 1e-8 {
                    basis.push(v.scaled(1.0 / norm));
                }
            }
        }
        debug_assert_eq!(basis.len(), self.dimension());
        basis
    }

    /// Hilbert-Schmidt nearest point in the algebra.
    pub fn project(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        self.check_order(a)?;
        Ok(self.project_unchecked(a))
    }

    pub(crate) fn project_unchecked(&self, a: &SquareMatrix) -> SquareMatrix {
        let m = self.order;
        match self.family {
            Family::Gl => a.clone(),
            Family::So => (a - &a.transpose()).scaled(0.5),
            Family::Sp | Family::Lorentz => {
                // A ↦ −B Aᵀ B is an isometric involution for B ∈ {J, η}; the
                // algebra is its +1 eigenspace.
                let b = self.bilinear_form();
                let reflected = &(&b * &a.transpose()) * &b;
                (a - &reflected).scaled(0.5)
            }
            Family::Se2 => {
                let mut out = SquareMatrix::zeros(m);
                let skew = 0.5 * (a[(0, 1)] - a[(1, 0)]);
                out[(0, 1)] = skew;
                out[(1, 0)] = -skew;
                out[(0, 2)] = a[(0, 2)];
                out[(1, 2)] = a[(1, 2)];
                out
            }
        }
    }

    /// The symmetric form preserved by the group: `I` for SO, `J` for SP, `η` for LORENTZ.
    pub fn bilinear_form(&self) -> SquareMatrix {
        let m = self.order;
        match self.family {
            Family::Sp => {
                let h = m / 2;
                let mut j = SquareMatrix::zeros(m);
                for i in 0..h {
                    j[(i, h + i)] = 1.0;
                    j[(h + i, i)] = 1.0;
                }
                j
            }
            Family::Lorentz => {
                let mut eta = SquareMatrix::identity(m);
                eta[(m - 1, m - 1)] = -1.0;
                eta
            }
            _ => SquareMatrix::identity(m),
        }
    }

    /// Frobenius norm of the defining-relation residual; zero on the algebra.
    pub fn algebra_residual(&self, a: &SquareMatrix) -> f64 {
        if a.order() != self.order {
            return f64::INFINITY;
        }
        match self.family {
            Family::Gl => 0.0,
            Family::So => (&a.transpose() + a).frobenius_norm(),
            Family::Sp | Family::Lorentz => {
                let b = self.bilinear_form();
                (&(&a.transpose() * &b) + &(&b * a)).frobenius_norm()
            }
            Family::Se2 => {
                let bottom = (0..3).map(|j| a[(2, j)] * a[(2, j)]).sum::<f64>();
                let skew = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| (a[(i, j)] + a[(j, i)]).powi(2))
                    .sum::<f64>();
                (bottom + skew).sqrt()
            }
        }
    }

    pub fn in_algebra(&self, a: &SquareMatrix, tol: f64) -> bool {
        self.algebra_residual(a) < tol
    }

    /// Group-membership test for the family's connected group.
    pub fn in_group(&self, z: &SquareMatrix, tol: f64) -> bool {
        if z.order() != self.order || !z.is_finite() {
            return false;
        }
        let m = self.order;
        match self.family {
            Family::Gl => z.determinant().abs() > tol,
            Family::So => {
                let gram = &z.transpose() * z;
                (&gram - &SquareMatrix::identity(m)).frobenius_norm() < tol && z.determinant() > 0.0
            }
            Family::Sp | Family::Lorentz => {
                let b = self.bilinear_form();
                let gram = &(&z.transpose() * &b) * z;
                (&gram - &b).frobenius_norm() < tol
            }
            Family::Se2 => {
                let bottom_ok = (z[(2, 0)].abs() < tol) && (z[(2, 1)].abs() < tol) && ((z[(2, 2)] - 1.0).abs() < tol);
                let rot = SquareMatrix::from_rows(&[[z[(0, 0)], z[(0, 1)]], [z[(1, 0)], z[(1, 1)]]]).unwrap();
                bottom_ok && AlgebraSpec::so(2).unwrap().in_group(&rot, tol)
            }
        }
    }

    /// Frobenius-norm deviation from the group's defining identity
    /// (`ZᵀBZ − B`, or the SE2 bottom-row/rotation defect). Zero for GL.
    pub fn group_residual(&self, z: &SquareMatrix) -> f64 {
        let m = self.order;
        match self.family {
            Family::Gl => 0.0,
            Family::So | Family::Sp | Family::Lorentz => {
                let b = self.bilinear_form();
                (&(&(&z.transpose() * &b) * z) - &b).frobenius_norm()
            }
            Family::Se2 => {
                let bottom = z[(2, 0)].powi(2) + z[(2, 1)].powi(2) + (z[(2, 2)] - 1.0).powi(2);
                let rot = z.block(0, 0, 2);
                let orth = (&(&rot.transpose() * &rot) - &SquareMatrix::identity(2)).frobenius_norm();
                debug_assert_eq!(m, 3);
                (bottom + orth * orth).sqrt()
            }
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.order)
    }
}

/// Free-function form of [`AlgebraSpec::project`].
pub fn project(spec: &AlgebraSpec, a: &SquareMatrix) -> Result<SquareMatrix> {
    spec.project(a)
}

pub fn in_algebra(spec: &AlgebraSpec, a: &SquareMatrix, tol: f64) -> bool {
    spec.in_algebra(a, tol)
}

pub fn in_group(spec: &AlgebraSpec, z: &SquareMatrix, tol: f64) -> bool {
    spec.in_group(z, tol)
}
