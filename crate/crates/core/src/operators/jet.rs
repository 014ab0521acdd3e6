use super::{position_from_value, CVector, EulerVariant, MomentumVariant, PositionVariant};
use crate::field::ScalarField;
use crate::group::{GroupSpec, Point, MAX_DIM};
use crate::scalar::{Cx, Scalar};

/// Value and gradient of a field at one point. Every first-order operator
/// is a pointwise function of this data, so integrands evaluate the field
/// once per node and derive all operators from the jet.
#[derive(Debug, Clone, Copy)]
pub struct Jet<T> {
    pub x: Point<T>,
    pub value: Cx<T>,
    pub grad: [Cx<T>; MAX_DIM],
}

impl<T: Scalar> Jet<T> {
    pub fn new(f: &(impl ScalarField<T> + ?Sized), x: &Point<T>) -> Self {
        let (value, grad) = f.value_and_gradient(x);
        Jet { x: *x, value, grad }
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// `X_j f`.
    #[inline]
    pub fn frame(&self, g: &GroupSpec<T>, j: usize) -> Cx<T> {
        let row = g.frame_row(j, &self.x);
        (0..self.dim()).fold(Cx::new(T::zero(), T::zero()), |acc, k| acc + self.grad[k] * row[k])
    }

    pub fn position(&self, g: &GroupSpec<T>, variant: PositionVariant) -> CVector<T> {
        position_from_value(variant, g, &self.x, self.value)
    }

    /// Momentum vector; `weighted_gradient` on a non-abelian group is
    /// rejected by the public entry points before reaching here.
    pub fn momentum(&self, g: &GroupSpec<T>, variant: MomentumVariant) -> CVector<T> {
        let n = self.dim();
        let minus_i = Cx::new(T::zero(), -T::one());
        let mut out = CVector::zeros(n);
        for j in 0..n {
            let d = match variant {
                MomentumVariant::PlainGradient => self.grad[j],
                MomentumVariant::WeightedGradient => self.grad[j] * g.nu()[j],
                MomentumVariant::WeightedFrame => self.frame(g, j) * g.nu()[j],
            };
            out[j] = minus_i * d;
        }
        out
    }

    pub fn euler(&self, g: &GroupSpec<T>, variant: EulerVariant) -> Cx<T> {
        let n = self.dim();
        let zero = Cx::new(T::zero(), T::zero());
        match variant {
            EulerVariant::DilationWeighted => {
                (0..n).fold(zero, |acc, j| acc + self.grad[j] * (g.nu()[j] * self.x[j]))
            }
            EulerVariant::PaperExample => {
                let e = g.exp_coords(&self.x);
                (0..n).fold(zero, |acc, j| acc + self.frame(g, j) * e[j])
            }
        }
    }

    /// `ℛf = Ef/|x|` given `r = |x| > 0`.
    #[inline]
    pub fn radial(&self, g: &GroupSpec<T>, r: T) -> Cx<T> {
        self.euler(g, EulerVariant::DilationWeighted) / r
    }

    /// `ℛ_g f` given `r = |x| > 0`.
    #[inline]
    pub fn dilation_generator(&self, g: &GroupSpec<T>, r: T) -> Cx<T> {
        let c = (g.homogeneous_dimension() - T::one()) / (T::lit(2.0) * r);
        let inner = self.radial(g, r) + self.value * c;
        Cx::new(inner.im, -inner.re)
    }
}
