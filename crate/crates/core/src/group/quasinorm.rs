use serde::{Deserialize, Serialize};

use super::{GroupKind, GroupSpec, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiNormKind {
    /// `|x| = (Σ_j |x_j|^{p/ν_j})^{1/p}`.
    PFamily,
    /// `|x| = ((x_1²+x_2²)² + x_3²)^{1/4}` on the Heisenberg group.
    Koranyi,
    /// `‖x‖`, only homogeneous under isotropic unit weights.
    Euclidean,
}

/// A homogeneous quasi-norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNorm<T> {
    pub kind: QuasiNormKind,
    /// Exponent of the p-family; unused by the other kinds.
    pub p: T,
}

impl<T: Scalar> QuasiNorm<T> {
    pub fn p_family(p: T) -> Result<Self> {
        if !(p >= T::one() && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p-family needs p ≥ 1, got {p}")));
        }
        Ok(QuasiNorm {
            kind: QuasiNormKind::PFamily,
            p,
        })
    }

    pub fn koranyi() -> Self {
        QuasiNorm {
            kind: QuasiNormKind::Koranyi,
            p: T::lit(4.0),
        }
    }

    pub fn euclidean() -> Self {
        QuasiNorm {
            kind: QuasiNormKind::Euclidean,
            p: T::lit(2.0),
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            QuasiNormKind::PFamily => format!("p{}", self.p),
            QuasiNormKind::Koranyi => "koranyi".into(),
            QuasiNormKind::Euclidean => "euclidean".into(),
        }
    }

    /// Exponent `m` for which `|x|^m` is a polynomial-like expression in the
    /// coordinates (used to build fast-decaying radial profiles).
    pub fn natural_power(&self) -> T {
        match self.kind {
            QuasiNormKind::PFamily => self.p,
            QuasiNormKind::Koranyi => T::lit(4.0),
            QuasiNormKind::Euclidean => T::lit(2.0),
        }
    }

    pub fn check_compatible(&self, g: &GroupSpec<T>) -> Result<()> {
        match self.kind {
            QuasiNormKind::PFamily => Ok(()),
            QuasiNormKind::Koranyi if g.kind() == GroupKind::Heisenberg => Ok(()),
            QuasiNormKind::Koranyi => Err(Error::InvalidArgument(format!(
                "Korányi norm requires the Heisenberg group, got {}",
                g.name()
            ))),
            QuasiNormKind::Euclidean if g.nu().iter().all(|&v| v == T::one()) => Ok(()),
            QuasiNormKind::Euclidean => Err(Error::InvalidArgument(format!(
                "Euclidean norm is homogeneous only for unit weights, got {}",
                g.name()
            ))),
        }
    }

    /// `|x|` with the compatibility check.
    pub fn eval(&self, g: &GroupSpec<T>, x: &Point<T>) -> Result<T> {
        self.check_compatible(g)?;
        g.check_point(x)?;
        Ok(self.value(g.nu(), x))
    }

    /// `|x|` without checks; callers guarantee compatibility.
    #[inline]
    pub fn value(&self, nu: &[T], x: &Point<T>) -> T {
        match self.kind {
            QuasiNormKind::Euclidean => x.euclidean_norm(),
            QuasiNormKind::Koranyi => {
                let rho = x[0] * x[0] + x[1] * x[1];
                (rho * rho + x[2] * x[2]).sqrt().sqrt()
            }
            QuasiNormKind::PFamily => {
                let s = self.p_sum(nu, x);
                if s.is_zero() {
                    T::zero()
                } else {
                    s.powf(self.p.recip())
                }
            }
        }
    }

    #[inline]
    fn p_sum(&self, nu: &[T], x: &Point<T>) -> T {
        let mut s = T::zero();
        for (k, &v) in x.as_slice().iter().enumerate() {
            if !v.is_zero() {
                s += v.abs().powf(self.p / nu[k]);
            }
        }
        s
    }

    /// Gradient of `|·|` at `x ≠ 0`.
    pub fn gradient(&self, nu: &[T], x: &Point<T>) -> Point<T> {
        let r = self.value(nu, x);
        self.gradient_with_value(nu, x, r)
    }

    /// Gradient when `|x|` is already known.
    #[inline]
    pub fn gradient_with_value(&self, nu: &[T], x: &Point<T>, r: T) -> Point<T> {
        if r.is_zero() {
            return Point::zeros(x.dim());
        }
        match self.kind {
            QuasiNormKind::Euclidean => x.map(|_, v| v / r),
            QuasiNormKind::Koranyi => {
                let rho = x[0] * x[0] + x[1] * x[1];
                let r3 = r * r * r;
                Point::from_slice(&[rho * x[0] / r3, rho * x[1] / r3, x[2] / (T::lit(2.0) * r3)])
            }
            QuasiNormKind::PFamily => {
                let lead = r.powf(T::one() - self.p);
                x.map(|k, v| {
                    if v.is_zero() {
                        return T::zero();
                    }
                    let e = self.p / nu[k];
                    lead * v.abs().powf(e - T::one()) * v.signum() / nu[k]
                })
            }
        }
    }
}
