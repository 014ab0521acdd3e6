//! Position, momentum, Euler, radial, Coulomb and dilation-generator
//! operators, evaluated lazily at points.

mod handle;
mod jet;
mod pm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ScalarField, Smoothness};
use crate::group::{GroupSpec, Point, QuasiNorm, MAX_DIM};
use crate::scalar::{Cx, Scalar};

pub use handle::{commutator, operator_commutator, symmetry_residual, DerivedField, OpKind, OperatorHandle};
pub use jet::Jet;
pub use pm::{pm_factorization_residual, PmPairing};

/// Small complex vector (one entry per coordinate).
#[derive(Clone, Copy, PartialEq)]
pub struct CVector<T> {
    n: usize,
    c: [Cx<T>; MAX_DIM],
}

impl<T: Scalar> CVector<T> {
    pub fn zeros(n: usize) -> Self {
        CVector {
            n,
            c: [Cx::new(T::zero(), T::zero()); MAX_DIM],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.c[..self.n]
    }

    /// `Σ_j a_j conj(b_j)`.
    pub fn dot_conj(&self, other: &Self) -> Cx<T> {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .fold(Cx::new(T::zero(), T::zero()), |acc, (a, b)| acc + *a * b.conj())
    }

    pub fn norm_sqr(&self) -> T {
        self.as_slice().iter().fold(T::zero(), |acc, v| acc + v.norm_sqr())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        let mut out = *self;
        for v in out.c[..self.n].iter_mut() {
            *v = *v * s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for (v, w) in out.c[..self.n].iter_mut().zip(other.as_slice()) {
            *v += *w;
        }
        out
    }
}

impl<T> std::ops::Index<usize> for CVector<T> {
    type Output = Cx<T>;
    fn index(&self, k: usize) -> &Cx<T> {
        assert!(k < self.n, "component {k} out of range for dimension {}", self.n);
        &self.c[k]
    }
}

impl<T> std::ops::IndexMut<usize> for CVector<T> {
    fn index_mut(&mut self, k: usize) -> &mut Cx<T> {
        assert!(k < self.n, "component {k} out of range for dimension {}", self.n);
        &mut self.c[k]
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for CVector<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.c[..self.n]).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionVariant {
    /// `x_j f`.
    Coordinate,
    /// `e_j(x) f`.
    ExpCoordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentumVariant {
    /// `−i ∂_j f`.
    PlainGradient,
    /// `−i ν_j ∂_j f`, abelian groups only.
    WeightedGradient,
    /// `−i ν_j X_j f`.
    WeightedFrame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerVariant {
    /// `Σ_j ν_j x_j ∂_j f`, the derivative along dilation orbits.
    DilationWeighted,
    /// `Σ_j e_j(x) X_j f`.
    PaperExample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialMethod {
    /// `(E f)(x) / |x|`.
    EulerQuotient,
    /// Central difference of `r ↦ f(D_r y)` at `r = |x|`.
    OrbitFd,
}

impl PositionVariant {
    pub fn label(self) -> &'static str {
        match self {
            PositionVariant::Coordinate => "coordinate",
            PositionVariant::ExpCoordinate => "exp_coordinate",
        }
    }
}

impl MomentumVariant {
    pub fn label(self) -> &'static str {
        match self {
            MomentumVariant::PlainGradient => "plain_gradient",
            MomentumVariant::WeightedGradient => "weighted_gradient",
            MomentumVariant::WeightedFrame => "weighted_frame",
        }
    }
}

impl EulerVariant {
    pub fn label(self) -> &'static str {
        match self {
            EulerVariant::DilationWeighted => "dilation_weighted",
            EulerVariant::PaperExample => "paper_example",
        }
    }
}

impl RadialMethod {
    pub fn label(self) -> &'static str {
        match self {
            RadialMethod::EulerQuotient => "euler_quotient",
            RadialMethod::OrbitFd => "orbit_fd",
        }
    }
}

fn check_dims<T: Scalar>(g: &GroupSpec<T>, f: &dyn ScalarField<T>, x: &Point<T>) -> Result<()> {
    if f.dim() != g.dim() || x.dim() != g.dim() {
        return Err(Error::InvalidArgument(format!(
            "group {} has dimension {}, field {} has {}, point has {}",
            g.name(),
            g.dim(),
            f.id(),
            f.dim(),
            x.dim()
        )));
    }
    Ok(())
}

/// `X_j f (x) = Σ_k c_{j,k}(x) ∂_k f(x)`.
pub fn vector_field_apply<T: Scalar>(
    g: &GroupSpec<T>,
    j: usize,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    check_dims(g, f, x)?;
    if j >= g.dim() {
        return Err(Error::InvalidArgument(format!(
            "frame index {j} out of range for dimension {}",
            g.dim()
        )));
    }
    Ok(Jet::new(f, x).frame(g, j))
}

pub fn position_apply<T: Scalar>(
    variant: PositionVariant,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<CVector<T>> {
    check_dims(g, f, x)?;
    Ok(position_from_value(variant, g, x, f.eval(x)))
}

pub(crate) fn position_from_value<T: Scalar>(
    variant: PositionVariant,
    g: &GroupSpec<T>,
    x: &Point<T>,
    v: Cx<T>,
) -> CVector<T> {
    let m = match variant {
        PositionVariant::Coordinate => *x,
        PositionVariant::ExpCoordinate => g.exp_coords(x),
    };
    let mut out = CVector::zeros(x.dim());
    for j in 0..x.dim() {
        out[j] = v * m[j];
    }
    out
}

pub fn momentum_apply<T: Scalar>(
    variant: MomentumVariant,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<CVector<T>> {
    check_dims(g, f, x)?;
    check_momentum(variant, g)?;
    Ok(Jet::new(f, x).momentum(g, variant))
}

pub(crate) fn check_momentum<T: Scalar>(variant: MomentumVariant, g: &GroupSpec<T>) -> Result<()> {
    if variant == MomentumVariant::WeightedGradient && !g.is_abelian() {
        return Err(Error::InvalidArgument(format!(
            "weighted_gradient momentum needs an abelian group, got {}",
            g.name()
        )));
    }
    Ok(())
}

pub fn euler_apply<T: Scalar>(
    variant: EulerVariant,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    check_dims(g, f, x)?;
    Ok(Jet::new(f, x).euler(g, variant))
}

/// `|x|`, or a singular-point error at the origin unless `f` vanishes there.
/// `Ok(None)` means "origin, and `f` is zero nearby".
fn radius_or_singular<T: Scalar>(
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<Option<T>> {
    let r = qn.value(g.nu(), x);
    if r > T::zero() {
        return Ok(Some(r));
    }
    if f.smoothness() == Smoothness::VanishesNearOrigin {
        return Ok(None);
    }
    Err(Error::SingularPoint(format!("{} evaluated at the origin", f.id())))
}

pub fn radial_apply<T: Scalar>(
    method: RadialMethod,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    check_dims(g, f, x)?;
    qn.check_compatible(g)?;
    let Some(r) = radius_or_singular(g, qn, f, x)? else {
        return Ok(Cx::new(T::zero(), T::zero()));
    };
    Ok(match method {
        RadialMethod::EulerQuotient => Jet::new(f, x).euler(g, EulerVariant::DilationWeighted) / r,
        RadialMethod::OrbitFd => orbit_derivative(g, f, x, r),
    })
}

/// `d/dr f(D_r y)` at `r = |x|`, `y = D_{1/|x|} x`, by a Richardson-extrapolated
/// central difference.
pub(crate) fn orbit_derivative<T: Scalar>(g: &GroupSpec<T>, f: &dyn ScalarField<T>, x: &Point<T>, r: T) -> Cx<T> {
    let y = g.dilate_unchecked(r.recip(), x);
    let h = T::fd_step() * r;
    let two = T::lit(2.0);
    let at = |s: T| f.eval(&g.dilate_unchecked(r + s, &y));
    let d_h = (at(h) - at(-h)) / (two * h);
    let d_h2 = (at(h / two) - at(-h / two)) / h;
    (d_h2 * T::lit(4.0) - d_h) / T::lit(3.0)
}

/// `f(x) / |x|`.
pub fn coulomb_apply<T: Scalar>(
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    check_dims(g, f, x)?;
    qn.check_compatible(g)?;
    Ok(match radius_or_singular(g, qn, f, x)? {
        Some(r) => f.eval(x) / r,
        None => Cx::new(T::zero(), T::zero()),
    })
}

/// `ℛ_g f = −i(ℛf + (Q−1)/(2|x|) f)`.
pub fn dilation_generator_apply<T: Scalar>(
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    check_dims(g, f, x)?;
    qn.check_compatible(g)?;
    let Some(r) = radius_or_singular(g, qn, f, x)? else {
        return Ok(Cx::new(T::zero(), T::zero()));
    };
    Ok(Jet::new(f, x).dilation_generator(g, r))
}
