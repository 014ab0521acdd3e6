use super::ScalarField;
use crate::error::{Error, Result};
use crate::group::Point;
use crate::scalar::{Cx, Scalar};

/// A derivative value with an error estimate. `degraded` marks values
/// obtained from a one-sided stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate<T> {
    pub value: Cx<T>,
    pub error: T,
    pub degraded: bool,
}

fn finite<T: Scalar>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Central difference with one Richardson step (orders h² and h⁴ combined).
/// `base_step` is scaled by `max(1, |x_j|)`. Falls back to a one-sided
/// second-order stencil when one side of the stencil is not finite.
pub fn fd_partial<T: Scalar>(
    f: &(impl ScalarField<T> + ?Sized),
    j: usize,
    x: &Point<T>,
    base_step: T,
) -> DerivativeEstimate<T> {
    let h = base_step * T::one().max(x[j].abs());
    let two = T::lit(2.0);
    let at = |s: T| f.eval(&x.with(j, x[j] + s));
    let (p1, m1, p2, m2) = (at(h), at(-h), at(h / two), at(-h / two));
    if finite(p1) && finite(m1) && finite(p2) && finite(m2) {
        let d_h = (p1 - m1) / (two * h);
        let d_h2 = (p2 - m2) / h;
        let rich = (d_h2 * T::lit(4.0) - d_h) / T::lit(3.0);
        return DerivativeEstimate {
            value: rich,
            error: (rich - d_h2).norm(),
            degraded: false,
        };
    }
    // One-sided: f'(x) ≈ (−3f(x) + 4f(x+s) − f(x+2s)) / (2s).
    let f0 = f.eval(x);
    let s = if finite(p1) && finite(at(two * h)) { h } else { -h };
    let (a, b) = (at(s), at(two * s));
    let value = (a * T::lit(4.0) - f0 * T::lit(3.0) - b) / (two * s);
    let (a2, b2) = (at(s / two), at(s));
    let half = (a2 * T::lit(4.0) - f0 * T::lit(3.0) - b2) / s;
    DerivativeEstimate {
        value,
        error: (value - half).norm(),
        degraded: true,
    }
}

/// `∂f/∂x_j (x)`: the analytic partial when the field provides one, else a
/// Richardson-extrapolated central difference with step `ε^{1/3}`.
pub fn partial_derivative<T: Scalar>(
    f: &(impl ScalarField<T> + ?Sized),
    j: usize,
    x: &Point<T>,
) -> Result<DerivativeEstimate<T>> {
    if j >= f.dim() || x.dim() != f.dim() {
        return Err(Error::InvalidArgument(format!(
            "partial index {j} / point dimension {} for a field of dimension {}",
            x.dim(),
            f.dim()
        )));
    }
    if let Some(v) = f.partial(j, x) {
        return Ok(DerivativeEstimate {
            value: v,
            error: T::zero(),
            degraded: false,
        });
    }
    Ok(fd_partial(f, j, x, T::fd_step()))
}
