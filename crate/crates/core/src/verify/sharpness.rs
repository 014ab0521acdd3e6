//! Search for the sharp constants over parametrized field families.
//!
//! Every inequality is written as `weak ≤ C · strong` and the search
//! maximizes `weak/strong`, so the result approaches `C` from below. For
//! radial fields `f = φ(|x|)` the polar decomposition reduces every norm
//! to a one-dimensional integral in `t = ln r` with the sphere mass
//! cancelling from the ratio; the Gaussian-width family for the
//! position/momentum inequality is integrated on the group directly.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::identities::pm_moments;
use super::inequalities::euclidean_mode;
use crate::error::{Error, Result};
use crate::field::{GaussianField, RadialProfile};
use crate::group::{GroupSpec, QuasiNorm};
use crate::operators::PmPairing;
use crate::quadrature::{composite, QuadratureScheme};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// `‖f/|x|‖ ≤ (2/(Q−2))‖ℛf‖`.
    Hardy,
    /// `‖f/‖x‖^{α+1}‖ ≤ (2/|n−2−2α|)‖∇f/‖x‖^α‖` on `ℝⁿ`.
    Ckn,
    /// `‖f‖² ≤ (2/Q)‖𝒫f‖‖ℳf‖`.
    Hk,
    /// `‖f‖² ≤ (2/(Q−2))‖ℛf‖‖|x|f‖`.
    Hpw,
    /// `‖f‖ ≤ (2/Q)‖Ef‖`.
    EulerCorollary,
}

impl InequalityId {
    pub const ALL: [InequalityId; 5] = [
        InequalityId::Hardy,
        InequalityId::Ckn,
        InequalityId::Hk,
        InequalityId::Hpw,
        InequalityId::EulerCorollary,
    ];

    pub fn label(self) -> &'static str {
        match self {
            InequalityId::Hardy => "hardy",
            InequalityId::Ckn => "ckn",
            InequalityId::Hk => "hk",
            InequalityId::Hpw => "hpw",
            InequalityId::EulerCorollary => "euler_corollary",
        }
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|i| i.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown inequality `{s}`")))
    }
}

/// `φ(r) = r^{−a/2+ε} · w(ln r)` with `w` a smooth window that is one on
/// `|t| ≤ L(1−ρ)` and zero for `|t| ≥ L`; the cutoff radius is `δ = e^{−L}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWindow {
    pub epsilon: (f64, f64),
    pub log_width: (f64, f64),
    /// Ramp length as a fraction of `L`.
    pub ramp_fraction: f64,
}

/// Parametrized families searched over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    PowerWindow(PowerWindow),
    /// `φ(r) = r^ε e^{−r^β}`.
    PowerGaussian { epsilon: (f64, f64), beta: (f64, f64) },
    /// `exp(−½ Σ a_j x_j²)` with `ln a_j` in the range.
    GaussianWidths { log_width: (f64, f64) },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::PowerWindow(_) => "power_window",
            Family::PowerGaussian { .. } => "power_gaussian",
            Family::GaussianWidths { .. } => "gaussian_widths",
        }
    }

    fn default_for(id: InequalityId, exponent: f64) -> Self {
        match id {
            InequalityId::Hardy | InequalityId::Ckn | InequalityId::EulerCorollary => {
                let c = exponent.abs() / 2.0;
                Family::PowerWindow(PowerWindow {
                    epsilon: (-0.5 * c, 0.5 * c),
                    log_width: (1.0, 60.0),
                    ramp_fraction: 0.5,
                })
            }
            InequalityId::Hpw => Family::PowerGaussian {
                epsilon: (-0.45 * exponent, 2.0),
                beta: (0.5, 6.0),
            },
            InequalityId::Hk => Family::GaussianWidths { log_width: (-4.0, 4.0) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SharpnessOptions {
    /// Maximal number of ratio evaluations.
    pub budget: usize,
    /// `α` for the weighted inequality.
    pub alpha: f64,
    /// A coordinate cycle improving the ratio by less than this relative
    /// amount ends the search.
    pub stabilize_tol: f64,
    /// Golden-section steps per coordinate and cycle.
    pub golden_steps: usize,
    /// Replaces the default family of the inequality.
    pub family: Option<Family>,
}

impl Default for SharpnessOptions {
    fn default() -> Self {
        SharpnessOptions {
            budget: 500,
            alpha: 0.0,
            stabilize_tol: 1e-8,
            golden_steps: 24,
            family: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluations: usize,
    pub best_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub inequality_id: InequalityId,
    pub group: String,
    pub quasinorm: Option<String>,
    pub family: Family,
    /// The constant of the inequality in `weak ≤ C · strong` form.
    pub constant_paper: f64,
    pub best_ratio: f64,
    pub best_params: BTreeMap<String, f64>,
    /// Running maximum after each improvement and at the end of each cycle.
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    /// Whether the last full cycle stabilized within the budget.
    pub converged: bool,
    pub diagnostics: BTreeMap<String, f64>,
}

impl SharpnessResult {
    /// `best_ratio / constant_paper`.
    pub fn attainment(&self) -> f64 {
        self.best_ratio / self.constant_paper
    }

    pub fn trace_is_monotone(&self) -> bool {
        self.trace.windows(2).all(|w| w[1].best_ratio >= w[0].best_ratio)
    }
}

/// Power `a` of the reduced one-dimensional problem and the constant `C`.
fn exponent_and_constant<T: Scalar>(id: InequalityId, g: &GroupSpec<T>, alpha: f64) -> Result<(f64, f64)> {
    let qd = g.homogeneous_dimension().as_f64();
    match id {
        InequalityId::Hardy | InequalityId::Hpw => {
            if qd < 3.0 {
                return Err(Error::PreconditionViolation(format!("{} needs Q ≥ 3", id.label())));
            }
            Ok((qd - 2.0, 2.0 / (qd - 2.0)))
        }
        InequalityId::Ckn => {
            euclidean_mode(g)?;
            let a = g.dim() as f64 - 2.0 - 2.0 * alpha;
            if a.abs() < 1e-12 {
                return Err(Error::PreconditionViolation("degenerate constant: n − 2 − 2α = 0".into()));
            }
            Ok((a, 2.0 / a.abs()))
        }
        InequalityId::EulerCorollary | InequalityId::Hk => Ok((qd, 2.0 / qd)),
    }
}

/// The family searched for `id` on `g` unless the options name another.
pub fn default_family<T: Scalar>(id: InequalityId, g: &GroupSpec<T>, alpha: f64) -> Result<Family> {
    let (exponent, _) = exponent_and_constant(id, g, alpha)?;
    Ok(Family::default_for(id, exponent))
}

/// Maximizes the ratio of `id` over its family by golden-section search in
/// one parameter at a time, cycling through the parameters.
pub fn sharpness_search<T: Scalar>(
    id: InequalityId,
    g: &GroupSpec<T>,
    qn: Option<&QuasiNorm<T>>,
    opts: &SharpnessOptions,
) -> Result<SharpnessResult> {
    if opts.budget == 0 {
        return Err(Error::InvalidArgument("sharpness budget must be positive".into()));
    }
    let qd = g.homogeneous_dimension().as_f64();
    let (exponent, constant) = exponent_and_constant(id, g, opts.alpha)?;
    let family = opts.family.unwrap_or_else(|| Family::default_for(id, exponent));
    let mut diagnostics = BTreeMap::new();
    let (names, bounds, start): (Vec<String>, Vec<(f64, f64)>, Vec<f64>) = match (&family, id) {
        (Family::PowerWindow(p), InequalityId::Hardy | InequalityId::Ckn | InequalityId::EulerCorollary) => (
            vec!["epsilon".into(), "log_width".into()],
            vec![p.epsilon, p.log_width],
            vec![0.5 * (p.epsilon.0 + p.epsilon.1), 0.5 * (p.log_width.0 + p.log_width.1)],
        ),
        (Family::PowerGaussian { epsilon, beta }, InequalityId::Hpw) => (
            vec!["epsilon".into(), "beta".into()],
            vec![*epsilon, *beta],
            vec![0.5 * (epsilon.0 + epsilon.1), 0.5 * (beta.0 + beta.1)],
        ),
        (Family::GaussianWidths { log_width }, InequalityId::Hk) => {
            let k = g.dim();
            (
                (1..=k).map(|j| format!("log_a{j}")).collect(),
                vec![*log_width; k],
                vec![0.5 * (log_width.0 + log_width.1); k],
            )
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "family {} does not apply to {}",
                family.name(),
                id.label()
            )))
        }
    };

    let eval = |p: &[f64]| -> Result<f64> {
        match (&family, id) {
            (Family::PowerWindow(pw), _) => power_window_ratio::<T>(exponent, p[0], p[1], pw.ramp_fraction),
            (Family::PowerGaussian { .. }, _) => power_gaussian_ratio::<T>(qd, p[0], p[1]),
            (Family::GaussianWidths { .. }, _) => gaussian_width_ratio(g, p),
        }
    };
    let search = coordinate_golden(&bounds, &start, opts, eval)?;

    if id == InequalityId::Ckn {
        // The same optimum in `strong ≥ c · weak` orientation.
        diagnostics.insert("reciprocal_constant".into(), exponent.abs() / 2.0);
        diagnostics.insert("reciprocal_best".into(), 1.0 / search.best);
    }
    if id == InequalityId::Hpw {
        // Gaussians give 2/Q, strictly below 2/(Q−2).
        diagnostics.insert("gaussian_value".into(), 2.0 / qd);
    }
    if id == InequalityId::Hk {
        diagnostics.insert("reciprocal_constant".into(), qd / 2.0);
        diagnostics.insert("reciprocal_best".into(), 1.0 / search.best);
    }
    Ok(SharpnessResult {
        inequality_id: id,
        group: g.name().to_string(),
        quasinorm: qn.map(|q| q.label()),
        family,
        constant_paper: constant,
        best_ratio: search.best,
        best_params: names.into_iter().zip(search.best_params).collect(),
        trace: search.trace,
        evaluations: search.evaluations,
        converged: search.converged,
        diagnostics,
    })
}

struct Search {
    best: f64,
    best_params: Vec<f64>,
    trace: Vec<TracePoint>,
    evaluations: usize,
    converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization on `[lo, hi]`; false once the budget is
/// exhausted.
fn golden(lo: f64, hi: f64, steps: usize, mut probe: impl FnMut(f64) -> Result<Option<f64>>) -> Result<bool> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let Some(mut fc) = probe(c)? else { return Ok(false) };
    let Some(mut fd) = probe(d)? else { return Ok(false) };
    for _ in 0..steps {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            let Some(v) = probe(c)? else { return Ok(false) };
            fc = v;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            let Some(v) = probe(d)? else { return Ok(false) };
            fd = v;
        }
    }
    Ok(true)
}

fn coordinate_golden(
    bounds: &[(f64, f64)],
    start: &[f64],
    opts: &SharpnessOptions,
    mut eval: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<Search> {
    let mut s = Search {
        best: f64::NEG_INFINITY,
        best_params: start.to_vec(),
        trace: Vec::new(),
        evaluations: 0,
        converged: false,
    };
    let mut probe = |p: &[f64], s: &mut Search| -> Result<Option<f64>> {
        if s.evaluations >= opts.budget {
            return Ok(None);
        }
        s.evaluations += 1;
        let v = eval(p)?;
        // Failed evaluations (NaN) never become the best point.
        if v.is_finite() && v > s.best {
            s.best = v;
            s.best_params = p.to_vec();
            s.trace.push(TracePoint {
                evaluations: s.evaluations,
                best_ratio: v,
            });
        }
        Ok(Some(if v.is_finite() { v } else { f64::NEG_INFINITY }))
    };

    probe(start, &mut s)?;
    loop {
        let before = s.best;
        let origin = s.best_params.clone();
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            let mut p = s.best_params.clone();
            let at = |v: f64, p: &mut Vec<f64>| {
                p[i] = v;
                p.clone()
            };
            // Endpoints first: monotone directions end up on a bound.
            for v in [lo, hi] {
                if probe(&at(v, &mut p), &mut s)?.is_none() {
                    return Ok(s);
                }
            }
            if !golden(lo, hi, opts.golden_steps, |v| probe(&at(v, &mut p), &mut s))? {
                return Ok(s);
            }
        }
        // Line search along the net move of the cycle, so that ridges
        // oblique to the axes are followed.
        let step: Vec<f64> = s.best_params.iter().zip(&origin).map(|(b, o)| b - o).collect();
        let reach = step
            .iter()
            .zip(origin.iter().zip(bounds))
            .filter(|(d, _)| d.abs() > 0.0)
            .map(|(d, (o, (lo, hi)))| if *d > 0.0 { (hi - o) / d } else { (lo - o) / d })
            .fold(f64::INFINITY, f64::min);
        if reach.is_finite() && reach > 1.0 {
            let along = |t: f64| origin.iter().zip(&step).map(|(o, d)| o + t * d).collect::<Vec<_>>();
            if !golden(1.0, reach.min(8.0), opts.golden_steps, |t| probe(&along(t), &mut s))? {
                return Ok(s);
            }
        }
        s.trace.push(TracePoint {
            evaluations: s.evaluations,
            best_ratio: s.best,
        });
        if before.is_finite() && s.best - before <= opts.stabilize_tol * s.best.abs() {
            s.converged = true;
            return Ok(s);
        }
    }
}

/// `sqrt(∫ φ² e^{at} dt / ∫ (rφ')² e^{at} dt)` for the power-window
/// profile with exponent `−a/2 + ε`.
fn power_window_ratio<T: Scalar>(a: f64, eps: f64, log_width: f64, ramp_fraction: f64) -> Result<f64> {
    let l = T::lit(log_width);
    let prof = RadialProfile::<T>::default()
        .with_power(T::lit(-a / 2.0 + eps))
        .with_log_window(l, l * T::lit(ramp_fraction));
    let panels = (4.0 * log_width).ceil().max(8.0) as usize;
    let at = T::lit(a);
    let (mut num, mut den) = (T::zero(), T::zero());
    for (t, w) in composite::<T>(-l, l, panels, 16) {
        let r = t.exp();
        let (v, d) = prof.value_and_derivative(r);
        let weight = w * (at * t).exp();
        num += weight * v * v;
        den += weight * (r * d) * (r * d);
    }
    Ok((num / den).sqrt().as_f64())
}

/// `∫φ² r^Q dt / sqrt(∫(rφ')² r^{Q−2} dt · ∫φ² r^{Q+2} dt)` for
/// `φ = r^ε e^{−r^β}`.
fn power_gaussian_ratio<T: Scalar>(qd: f64, eps: f64, beta: f64) -> Result<f64> {
    let prof = RadialProfile::<T>::gaussian(T::one(), T::lit(beta)).with_power(T::lit(eps));
    // Integrand ~ r^{2ε+Q−2} at zero and e^{−2r^β} at infinity.
    let t_lo = -80.0 / (2.0 * eps + qd - 2.0).max(1e-3);
    let t_hi = (60.0f64).ln() / beta;
    let q = T::lit(qd);
    let (mut f2, mut r2, mut x2) = (T::zero(), T::zero(), T::zero());
    for (t, w) in composite::<T>(T::lit(t_lo), T::lit(t_hi), 96, 16) {
        let r = t.exp();
        let (v, d) = prof.value_and_derivative(r);
        let rq = (q * t).exp();
        f2 += w * v * v * rq;
        r2 += w * (r * d) * (r * d) * rq / (r * r);
        x2 += w * v * v * rq * r * r;
    }
    Ok((f2 / (r2 * x2).sqrt()).as_f64())
}

/// `‖f‖² / (‖𝒫f‖‖ℳf‖)` for the Gaussian with widths `e^{p_j}` under the
/// canonical pairing of `g`.
fn gaussian_width_ratio<T: Scalar>(g: &GroupSpec<T>, logs: &[f64]) -> Result<f64> {
    let widths: Vec<T> = logs.iter().map(|v| T::lit(v.exp())).collect();
    let f = GaussianField::anisotropic(&widths);
    let q = QuadratureScheme::for_fields(&[&f], 4, 16, T::lit(1e-3))?;
    let m = pm_moments(&q, g, PmPairing::canonical(g), &f)?;
    Ok((m.f2 / (m.p2 * m.m2).sqrt()).as_f64())
}
