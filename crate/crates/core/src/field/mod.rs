//! Test functions on a homogeneous group.

mod diff;
mod library;
mod profile;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::group::{Point, QuasiNorm, MAX_DIM};
use crate::scalar::{Cx, Scalar};

pub use diff::{fd_partial, partial_derivative, DerivativeEstimate};
pub use library::{ConstantField, FnField, GaussianField, PolynomialField, RadialField};
pub use profile::{smooth_step, smooth_step_derivative, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    /// Smooth on the whole group (stands in for `C_0^∞(𝔾)` up to rapid decay).
    SmoothEverywhere,
    /// Identically zero on `{|x| ≤ r_min}`, `r_min > 0`.
    VanishesNearOrigin,
}

/// Annulus `{r_min ≤ |x| ≤ r_max}` in the radius of `norm` outside which a
/// field is zero (inner edge) or negligible (outer edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support<T> {
    pub r_min: T,
    pub r_max: Option<T>,
    pub norm: Option<QuasiNorm<T>>,
}

impl<T: Scalar> Support<T> {
    pub fn everywhere() -> Self {
        Support {
            r_min: T::zero(),
            r_max: None,
            norm: None,
        }
    }
}

/// A complex-valued function on `ℝⁿ`, optionally with analytic partials.
pub trait ScalarField<T: Scalar>: Send + Sync {
    /// Short identifier used in reports.
    fn id(&self) -> String;

    fn dim(&self) -> usize;

    fn eval(&self, x: &Point<T>) -> Cx<T>;

    /// Analytic `∂f/∂x_j`, when the field knows it.
    fn partial(&self, _j: usize, _x: &Point<T>) -> Option<Cx<T>> {
        None
    }

    fn has_analytic_partials(&self) -> bool {
        false
    }

    fn smoothness(&self) -> Smoothness {
        Smoothness::SmoothEverywhere
    }

    fn support(&self) -> Support<T> {
        Support::everywhere()
    }

    /// Per-axis half-widths of a box outside of which `|f|` is below
    /// `1e-16` of its peak. `None` for fields that do not decay.
    fn decay_box(&self) -> Option<Point<T>> {
        None
    }

    fn is_real(&self) -> bool {
        false
    }

    /// `f(x)` together with its gradient; fields override this when both
    /// share intermediate quantities.
    fn value_and_gradient(&self, x: &Point<T>) -> (Cx<T>, [Cx<T>; MAX_DIM]) {
        (self.eval(x), default_gradient(self, x))
    }
}

fn default_gradient<T: Scalar, F: ScalarField<T> + ?Sized>(f: &F, x: &Point<T>) -> [Cx<T>; MAX_DIM] {
    let mut out = [Cx::new(T::zero(), T::zero()); MAX_DIM];
    for (j, slot) in out.iter_mut().enumerate().take(x.dim()) {
        *slot = match f.partial(j, x) {
            Some(v) => v,
            None => fd_partial(f, j, x, T::fd_step()).value,
        };
    }
    out
}

impl<T: Scalar> fmt::Debug for dyn ScalarField<T> + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.id())
    }
}

impl<T: Scalar, F: ScalarField<T> + ?Sized> ScalarField<T> for &F {
    fn id(&self) -> String {
        (**self).id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &Point<T>) -> Cx<T> {
        (**self).eval(x)
    }
    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        (**self).partial(j, x)
    }
    fn has_analytic_partials(&self) -> bool {
        (**self).has_analytic_partials()
    }
    fn smoothness(&self) -> Smoothness {
        (**self).smoothness()
    }
    fn support(&self) -> Support<T> {
        (**self).support()
    }
    fn decay_box(&self) -> Option<Point<T>> {
        (**self).decay_box()
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
    fn value_and_gradient(&self, x: &Point<T>) -> (Cx<T>, [Cx<T>; MAX_DIM]) {
        (**self).value_and_gradient(x)
    }
}

impl<T: Scalar, F: ScalarField<T> + ?Sized> ScalarField<T> for std::sync::Arc<F> {
    fn id(&self) -> String {
        (**self).id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &Point<T>) -> Cx<T> {
        (**self).eval(x)
    }
    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        (**self).partial(j, x)
    }
    fn has_analytic_partials(&self) -> bool {
        (**self).has_analytic_partials()
    }
    fn smoothness(&self) -> Smoothness {
        (**self).smoothness()
    }
    fn support(&self) -> Support<T> {
        (**self).support()
    }
    fn decay_box(&self) -> Option<Point<T>> {
        (**self).decay_box()
    }
    fn is_real(&self) -> bool {
        (**self).is_real()
    }
    fn value_and_gradient(&self, x: &Point<T>) -> (Cx<T>, [Cx<T>; MAX_DIM]) {
        (**self).value_and_gradient(x)
    }
}

/// Gradient `(∂_1 f, …, ∂_n f)` at `x`, analytic when available.
pub fn gradient<T: Scalar>(f: &(impl ScalarField<T> + ?Sized), x: &Point<T>) -> [Cx<T>; MAX_DIM] {
    default_gradient(f, x)
}
