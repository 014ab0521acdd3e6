//! Cartesian tensor-product and polar quadrature.
//!
//! Haar measure is Lebesgue measure in the diagonal chart, so every group
//! integral is an ordinary integral over a truncation box. Reductions use a
//! fixed pairwise tree, which makes results independent of the number of
//! worker threads.

mod cartesian;
mod gauss;
mod polar;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Scalar};

pub use cartesian::{union_box, QuadratureScheme, DECAY_THRESHOLD};
pub use gauss::{composite, gauss_legendre};
pub use polar::{polar_identity_residual, PolarScheme};

/// Result of a multi-output quadrature with its error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Integral<T> {
    pub values: Vec<Cx<T>>,
    /// `|I_fine − I_coarse|` per component.
    pub abs_error: Vec<T>,
    /// `max_k abs_error_k / (1 + max_k |I_k|)`.
    pub rel_error: T,
}

impl<T: Scalar> Integral<T> {
    fn from_pair(fine: Vec<Cx<T>>, coarse: &[Cx<T>]) -> Result<Self> {
        if fine.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NumericFailure("non-finite quadrature sum".into()));
        }
        let abs_error: Vec<T> = fine.iter().zip(coarse).map(|(a, b)| (*a - *b).norm()).collect();
        let scale = fine.iter().map(|v| v.norm()).fold(T::zero(), T::max);
        let worst = abs_error.iter().copied().fold(T::zero(), T::max);
        Ok(Integral {
            values: fine,
            abs_error,
            rel_error: worst / (T::one() + scale),
        })
    }

    pub fn re(&self, k: usize) -> T {
        self.values[k].re
    }
}

/// Sums consecutive rows of width `nout` by a fixed pairwise tree; the
/// total ends up in the first row.
pub(crate) fn pairwise_rows<T: Scalar>(buf: &mut [Cx<T>], nout: usize) {
    if nout == 0 {
        return;
    }
    let rows = buf.len() / nout;
    let mut stride = 1;
    while stride < rows {
        let mut i = 0;
        while i + stride < rows {
            let (head, tail) = buf.split_at_mut((i + stride) * nout);
            let dst = &mut head[i * nout..(i + 1) * nout];
            for (d, s) in dst.iter_mut().zip(&tail[..nout]) {
                *d += *s;
            }
            i += 2 * stride;
        }
        stride *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        for rows in 0..40usize {
            let mut buf: Vec<Cx<f64>> = (0..rows * 2)
                .map(|i| Cx::new(i as f64, -(i as f64)))
                .collect();
            let want0: f64 = (0..rows).map(|r| (2 * r) as f64).sum();
            let want1: f64 = (0..rows).map(|r| (2 * r + 1) as f64).sum();
            pairwise_rows(&mut buf, 2);
            if rows > 0 {
                assert_eq!(buf[0], Cx::new(want0, -want0));
                assert_eq!(buf[1], Cx::new(want1, -want1));
            }
        }
    }
}
