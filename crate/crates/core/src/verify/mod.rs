//! Both sides of every identity and inequality, evaluated by quadrature or
//! pointwise, packaged as [`CheckReport`]s; plus a search for the sharp
//! constants.

mod battery;
mod identities;
mod inequalities;
mod report;
mod sharpness;
mod structural;

pub use battery::{
    annulus_fields, battery, decay_exponent, phase_partner, smooth_fields, BatteryField, BatteryResolution,
    Resolution, BATTERY_IDS, BATTERY_TARGET_TOL,
};
pub use identities::{
    alpha_grid, check_euler_pythagoras, check_heisenberg_kennard, check_kennard, check_rsrc,
    check_symmetric_pair_identity, check_weighted_radial_identity, pm_moments, symmetry_defect, PmMoments,
};
pub use inequalities::{check_ckn, check_hardy, check_hardy_r, check_hpw, check_hpw_euclidean, euclidean_mode};
pub use report::{CheckKind, CheckParams, CheckReport, Outcome, Tolerances, Value};
pub use sharpness::{
    default_family, sharpness_search, Family, InequalityId, PowerWindow, SharpnessOptions, SharpnessResult, TracePoint,
};
pub use structural::{
    check_commutator, check_pm_factorization, check_polar, check_quasinorm_axioms, check_radial_operator,
    check_sphere_mass, check_structural, check_symmetry, shell_points, PolarResolution,
};

use crate::error::{Error, Result};

/// Every check family with the relation it tests. Subchecks are named
/// `<family>.<part>`.
pub const CATALOG: &[(&str, &str)] = &[
    ("structural", "sampled residuals of the group invariants vanish"),
    ("quasinorm_axioms", "|D_λx| = λ|x|, |x⁻¹| = |x|, |x| > 0 for x ≠ 0"),
    ("polar_decomposition", structural::POLAR),
    ("sphere_mass", "σ(℘) = 2π^{n/2}/Γ(n/2)"),
    ("kennard", identities::KENNARD),
    ("heisenberg_kennard", identities::HK),
    ("euler_pythagoras", identities::EULER),
    ("weighted_radial_identity", identities::WEIGHTED),
    ("rsrc", identities::RSRC),
    ("symmetric_pair", identities::PAIR),
    ("hardy", inequalities::HARDY),
    ("hardy_r", inequalities::HARDY_R),
    ("ckn", inequalities::CKN),
    ("hpw", inequalities::HPW),
    ("hpw_euclidean", inequalities::HPW_E),
    ("radial_operator", "ℛf = 𝒞Ef, i.e. Ef/|x| = d/dr f(D_r y)"),
    ("pm_factorization", "2Re(𝒫f·conj(iℳf)) = (𝒫∘iℳ)|f|² = E|f|²"),
    ("commutator", "[ℛ_g, 𝒞]f = i𝒞²f"),
    ("symmetry", "⟨Af, h⟩ = ⟨f, Ah⟩"),
    ("sharpness", "sup over the family of weak/strong = C"),
];

/// The relation tested by a check family or one of its subchecks.
pub fn statement(check_id: &str) -> Option<&'static str> {
    let family = check_id.split('.').next().unwrap_or(check_id);
    CATALOG.iter().find(|(id, _)| *id == family).map(|(_, s)| *s)
}
use crate::field::{ScalarField, Smoothness};
use crate::group::{GroupSpec, QuasiNorm};
use crate::scalar::Scalar;

pub(crate) fn params_for<T: Scalar>(g: &GroupSpec<T>, qn: Option<&QuasiNorm<T>>, f: &dyn ScalarField<T>) -> CheckParams {
    let p = CheckParams::new(g.name(), g.homogeneous_dimension().as_f64()).field(f.id());
    match qn {
        Some(n) => p.quasinorm(n.label()),
        None => p,
    }
}

pub(crate) fn require_vanishing<T: Scalar>(check: &str, f: &dyn ScalarField<T>) -> Result<()> {
    if f.smoothness() == Smoothness::VanishesNearOrigin {
        Ok(())
    } else {
        Err(Error::InvalidField(format!(
            "{check} weights the field by negative powers of |x|; {} does not vanish near the origin",
            f.id()
        )))
    }
}

/// `v` is distinguishable from zero relative to `scale`; an exact zero
/// scale makes everything degenerate.
pub(crate) fn nonzero<T: Scalar>(v: T, scale: T) -> bool {
    v > T::lit(1e-24) * scale && v > T::zero()
}

#[inline]
pub(crate) fn f64_of<T: Scalar>(v: T) -> f64 {
    v.as_f64()
}
