use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{FnField, GaussianField, RadialField, RadialProfile, ScalarField, Smoothness};
use crate::group::{GroupSpec, QuasiNorm};
use crate::quadrature::QuadratureScheme;
use crate::scalar::{Cx, Scalar};

/// Panels × order of a tensor rule, stated for three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub panels: usize,
    pub order: usize,
}

impl Resolution {
    /// Panels per axis in dimension `n`. Below three dimensions the panel
    /// count grows by 4 per missing axis, which still leaves far fewer nodes.
    pub fn panels_for_dim(&self, n: usize) -> usize {
        self.panels << (2 * 3usize.saturating_sub(n))
    }
}

/// Rule sizes per field class. Annulus fields carry a C^∞ cutoff ramp and
/// need roughly twice the nodes of a Gaussian for the same accuracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryResolution {
    pub smooth: Resolution,
    pub annulus: Resolution,
}

impl Default for BatteryResolution {
    fn default() -> Self {
        BatteryResolution {
            smooth: Resolution { panels: 4, order: 16 },
            annulus: Resolution { panels: 8, order: 16 },
        }
    }
}

/// Target for the fine-versus-coarse error estimate of every battery
/// integral. The estimate measures the coarse rule, so it is loose by
/// several orders against the fine result that is reported.
pub const BATTERY_TARGET_TOL: f64 = 1e-3;

/// A test field with the quadrature rule it is integrated with.
#[derive(Clone)]
pub struct BatteryField<T: Scalar> {
    pub field: Arc<dyn ScalarField<T>>,
    pub scheme: QuadratureScheme<T>,
}

impl<T: Scalar> BatteryField<T> {
    pub fn new(field: Arc<dyn ScalarField<T>>, res: Resolution) -> Result<Self> {
        let scheme = QuadratureScheme::for_fields(&[field.as_ref()], res.panels_for_dim(field.dim()), res.order, T::lit(BATTERY_TARGET_TOL))?;
        Ok(BatteryField { field, scheme })
    }

    pub fn id(&self) -> String {
        self.field.id()
    }

    pub fn vanishes_near_origin(&self) -> bool {
        self.field.smoothness() == Smoothness::VanishesNearOrigin
    }
}

impl<T: Scalar> std::fmt::Debug for BatteryField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BatteryField")
            .field("field", &self.field.id())
            .field("scheme", &self.scheme)
            .finish()
    }
}

/// Smallest multiple of the norm's natural power that is at least 4, so that
/// `e^{-|x|^m}` decays fast and stays smooth away from coordinate planes.
pub fn decay_exponent<T: Scalar>(qn: &QuasiNorm<T>) -> T {
    let p = qn.natural_power();
    (T::lit(4.0) / p).ceil().max(T::one()) * p
}

const ANISO_WIDTHS: [f64; 4] = [1.0, 0.6, 1.6, 0.8];

/// The standard eight fields for `(g, qn)`: isotropic, anisotropic and
/// phase-modulated Gaussians, three annulus fields (plain, power-law and
/// oscillating profiles), a quasi-norm-radial field and an odd field.
pub fn battery<T: Scalar>(g: &GroupSpec<T>, qn: QuasiNorm<T>, res: &BatteryResolution) -> Result<Vec<BatteryField<T>>> {
    let mut out = smooth_fields(g, qn, res)?;
    out.extend(annulus_fields(g, qn, res)?);
    out.sort_by_key(|b| battery_rank(&b.id()));
    Ok(out)
}

fn battery_rank(id: &str) -> usize {
    BATTERY_IDS.iter().position(|p| id == *p).unwrap_or(usize::MAX)
}

/// Ids of the battery members, in battery order.
pub const BATTERY_IDS: [&str; 8] = [
    "gauss",
    "gauss_aniso",
    "gauss_phase",
    "annulus_gauss",
    "annulus_power",
    "annulus_osc",
    "qn_radial",
    "odd_gauss",
];

/// The five members that are smooth at the origin.
pub fn smooth_fields<T: Scalar>(g: &GroupSpec<T>, qn: QuasiNorm<T>, res: &BatteryResolution) -> Result<Vec<BatteryField<T>>> {
    let n = g.dim();
    let one = T::one();
    let widths: Vec<T> = ANISO_WIDTHS[..n].iter().map(|w| T::lit(*w)).collect();
    let mut phase = vec![T::zero(); n];
    phase[0] = one;
    let m = decay_exponent(&qn);
    let fields: Vec<Arc<dyn ScalarField<T>>> = vec![
        Arc::new(GaussianField::isotropic(n, one).named("gauss")),
        Arc::new(GaussianField::anisotropic(&widths).named("gauss_aniso")),
        Arc::new(GaussianField::isotropic(n, one).with_phase(&phase).named("gauss_phase")),
        Arc::new(RadialField::new(g, qn, RadialProfile::gaussian(one, m)).named("qn_radial")),
        Arc::new(GaussianField::isotropic(n, one).with_prefactor(0).named("odd_gauss")),
    ];
    fields
        .into_iter()
        .map(|f| {
            let r = if f.id() == "qn_radial" { res.annulus } else { res.smooth };
            BatteryField::new(f, r)
        })
        .collect()
}

/// The three members supported away from the origin.
pub fn annulus_fields<T: Scalar>(g: &GroupSpec<T>, qn: QuasiNorm<T>, res: &BatteryResolution) -> Result<Vec<BatteryField<T>>> {
    let m = decay_exponent(&qn);
    let base = RadialProfile::gaussian(T::one(), m).with_inner_cutoff(T::lit(0.3), T::lit(2.0));
    let profiles = [
        ("annulus_gauss", base),
        ("annulus_power", base.with_power(T::lit(-0.7))),
        ("annulus_osc", base.with_oscillation(T::lit(3.0))),
    ];
    profiles
        .into_iter()
        .map(|(id, p)| BatteryField::new(Arc::new(RadialField::new(g, qn, p).named(id)), res.annulus))
        .collect()
}

/// `f(x)·e^{i k x_1}`, keeping the support data of `f`. Used as a complex
/// partner in symmetry tests, where a real pair cannot expose asymmetry of
/// real operators through `⟨Af, f⟩`.
pub fn phase_partner<T: Scalar>(f: Arc<dyn ScalarField<T>>, k: T) -> Arc<dyn ScalarField<T>> {
    let n = f.dim();
    let phase = move |x: &crate::group::Point<T>| Cx::from_polar(T::one(), k * x[0]);
    let fe = f.clone();
    let fp = f.clone();
    let mut out = FnField::new(format!("{}*exp(i{k}x1)", f.id()), n, move |x| fe.eval(x) * phase(x)).with_partials(
        move |j, x| {
            let (v, grad) = fp.value_and_gradient(x);
            let mut d = grad[j];
            if j == 0 {
                d = d + v * Cx::new(T::zero(), k);
            }
            d * phase(x)
        },
    );
    if let Some(b) = f.decay_box() {
        out = out.with_decay_box(b.as_slice());
    }
    let s = f.support();
    if f.smoothness() == Smoothness::VanishesNearOrigin {
        if let Some(norm) = s.norm {
            out = out.vanishing_near_origin(norm, s.r_min);
        }
    }
    Arc::new(out)
}
