use serde::{Deserialize, Serialize};

use super::{check_momentum, EulerVariant, Jet, MomentumVariant, PositionVariant};
use crate::error::Result;
use crate::field::ScalarField;
use crate::group::{GroupSpec, Point};
use crate::scalar::{Cx, Scalar};

/// A choice of position and momentum operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PmPairing {
    pub position: PositionVariant,
    pub momentum: MomentumVariant,
}

impl PmPairing {
    pub const COORDINATE_PLAIN: PmPairing = PmPairing {
        position: PositionVariant::Coordinate,
        momentum: MomentumVariant::PlainGradient,
    };
    pub const COORDINATE_WEIGHTED: PmPairing = PmPairing {
        position: PositionVariant::Coordinate,
        momentum: MomentumVariant::WeightedGradient,
    };
    pub const EXP_FRAME: PmPairing = PmPairing {
        position: PositionVariant::ExpCoordinate,
        momentum: MomentumVariant::WeightedFrame,
    };

    /// The pairing whose `2Re(𝒫f·conj(iℳf))` equals `E|f|²` with the
    /// dilation-weighted Euler operator.
    pub fn canonical<T: Scalar>(g: &GroupSpec<T>) -> Self {
        if g.is_abelian() {
            Self::COORDINATE_WEIGHTED
        } else {
            Self::EXP_FRAME
        }
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.position.label(), self.momentum.label())
    }
}

/// `(r1, r2)` with `r1 = |2Re(𝒫f·conj(iℳf)) − (𝒫∘(iℳ))|f|²|` and
/// `r2 = |(𝒫∘(iℳ))|f|² − E|f|²|` at `x`.
pub fn pm_factorization_residual<T: Scalar>(
    g: &GroupSpec<T>,
    pairing: PmPairing,
    f: &dyn ScalarField<T>,
    x: &Point<T>,
) -> Result<(T, T)> {
    check_momentum(pairing.momentum, g)?;
    let jet = Jet::new(f, x);
    let n = g.dim();
    let i = Cx::new(T::zero(), T::one());
    let p = jet.position(g, pairing.position);
    let im = jet.momentum(g, pairing.momentum).scale(i);
    let lhs = T::lit(2.0) * p.dot_conj(&im).re;

    // |f|² as a real jet: ∂|f|² = 2 Re(conj(f) ∂f).
    let mut sq = Jet {
        x: *x,
        value: Cx::new(jet.value.norm_sqr(), T::zero()),
        grad: jet.grad,
    };
    for k in 0..n {
        sq.grad[k] = Cx::new(T::lit(2.0) * (jet.value.conj() * jet.grad[k]).re, T::zero());
    }
    // i·ℳ_j applied to a real function is the weighted derivative itself;
    // the position factor multiplies afterwards.
    let unit = Jet { value: Cx::new(T::one(), T::zero()), ..sq };
    let weights = unit.position(g, pairing.position);
    let im_sq = sq.momentum(g, pairing.momentum).scale(i);
    let composed = (0..n).fold(T::zero(), |acc, j| acc + (weights[j] * im_sq[j]).re);
    let euler = sq.euler(g, EulerVariant::DilationWeighted).re;
    Ok(((lhs - composed).abs(), (composed - euler).abs()))
}
