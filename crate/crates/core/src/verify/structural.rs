//! Structural invariants and pointwise operator relations.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::battery::BatteryField;
use super::report::{CheckParams, CheckReport, Tolerances, Value};
use super::{f64_of, params_for, require_vanishing};
use crate::error::Result;
use crate::field::{FnField, GaussianField, ScalarField};
use crate::group::{GroupSpec, Point, QuasiNorm, QuasiNormKind};
use crate::operators::{
    operator_commutator, orbit_derivative, pm_factorization_residual, EulerVariant, Jet, OperatorHandle, PmPairing,
};
use crate::quadrature::{PolarScheme, QuadratureScheme};
use crate::scalar::{Cx, Scalar};

fn group_params<T: Scalar>(g: &GroupSpec<T>) -> CheckParams {
    CheckParams::new(g.name(), g.homogeneous_dimension().as_f64())
}

fn probe_field<T: Scalar>(n: usize) -> GaussianField<T> {
    let widths: Vec<T> = [0.8, 1.3, 0.6, 1.1][..n].iter().map(|v| T::lit(*v)).collect();
    let phase: Vec<T> = [0.4, -0.7, 0.3, 0.5][..n].iter().map(|v| T::lit(*v)).collect();
    GaussianField::anisotropic(&widths).with_phase(&phase).named("probe")
}

fn random_point<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Point<T> {
    let mut x = Point::zeros(n);
    for k in 0..n {
        x[k] = T::lit(rng.gen_range(-scale..scale));
    }
    x
}

/// Group axioms, dilation automorphism, frame homogeneity and left
/// invariance, exponential coordinates, and the frame-change polynomials,
/// each as the largest residual over `samples` random draws.
pub fn check_structural<T: Scalar>(g: &GroupSpec<T>, samples: usize, seed: u64, tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for r in g.invariant_residuals(samples, seed)? {
        let t = if r.invariant == "exp_roundtrip" { 1e-10f64.max(tol.structural) } else { tol.structural };
        out.push(
            CheckReport::identity(
                &format!("structural.{}", r.invariant),
                "largest sampled residual of the invariant = 0",
                group_params(g),
                Value::Real(r.max_residual),
                Value::Real(0.0),
                t,
            )
            .with_diag("samples", samples),
        );
    }
    out.push(frame_homogeneity_on_fields(g, samples, seed, tol));
    out.push(frame_change_reconstruction(g, samples, seed, tol)?);
    Ok(out)
}

/// `X_j(f∘D_λ)(x) = λ^{ν_j}(X_j f)(D_λ x)` for an analytic field.
fn frame_homogeneity_on_fields<T: Scalar>(g: &GroupSpec<T>, samples: usize, seed: u64, tol: &Tolerances) -> CheckReport {
    let n = g.dim();
    let f = Arc::new(probe_field::<T>(n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst = T::zero();
    for _ in 0..samples {
        let lambda = T::lit(rng.gen_range(0.3..3.0));
        let x = random_point::<T>(&mut rng, n, 1.5);
        let g2 = g.clone();
        let (fe, fp) = (f.clone(), f.clone());
        let g3 = g.clone();
        let composed = FnField::new("f∘D", n, move |y| fe.eval(&g2.dilate_unchecked(lambda, y))).with_partials(
            move |k, y| {
                let dy = g3.dilate_unchecked(lambda, y);
                fp.partial(k, &dy).expect("analytic") * lambda.powf(g3.nu()[k])
            },
        );
        let dx = g.dilate_unchecked(lambda, &x);
        let jc = Jet::new(&composed, &x);
        let jf = Jet::new(f.as_ref(), &dx);
        for j in 0..n {
            let lhs = jc.frame(g, j);
            let rhs = jf.frame(g, j) * lambda.powf(g.nu()[j]);
            worst = worst.max((lhs - rhs).norm() / (T::one() + rhs.norm()));
        }
    }
    CheckReport::identity(
        "structural.frame_homogeneity_field",
        "X_j(f∘D_λ)(x) = λ^{ν_j}(X_j f)(D_λ x)",
        group_params(g).field(f.id()),
        Value::real(worst),
        Value::Real(0.0),
        tol.structural,
    )
}

/// `∂_j f = Σ_k p_{j,k} X_k f` with the computed polynomials, and the
/// weighted degree of every off-diagonal `p_{j,k}` equal to `ν_k − ν_j`.
fn frame_change_reconstruction<T: Scalar>(g: &GroupSpec<T>, samples: usize, seed: u64, tol: &Tolerances) -> Result<CheckReport> {
    let n = g.dim();
    let p = g.frame_change_polynomials()?;
    let nu = g.nu();
    let mut bad_degrees = 0usize;
    for j in 0..n {
        for k in 0..n {
            let e = p.get(j, k);
            if j == k || e.is_zero() {
                continue;
            }
            match e.weighted_degree(nu) {
                Some(d) if d == nu[k] - nu[j] => {}
                _ => bad_degrees += 1,
            }
        }
    }
    let f = probe_field::<T>(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfc);
    let mut worst = T::zero();
    for _ in 0..samples {
        let x = random_point::<T>(&mut rng, n, 1.5);
        let jet = Jet::new(&f, &x);
        let pm = p.eval(&x);
        for j in 0..n {
            let rebuilt = (0..n).fold(Cx::new(T::zero(), T::zero()), |acc, k| acc + jet.frame(g, k) * pm[j][k]);
            worst = worst.max((rebuilt - jet.grad[j]).norm() / (T::one() + jet.grad[j].norm()));
        }
    }
    Ok(CheckReport::identity(
        "structural.frame_change",
        "∂_j f = X_j f + Σ_{ν_k > ν_j} p_{j,k} X_k f",
        group_params(g).field(f.id()),
        Value::real(worst),
        Value::Real(0.0),
        tol.structural,
    )
    .with_diag("degree_mismatches", bad_degrees)
    .with_diag("samples", samples))
}

/// Homogeneity `|D_λx| = λ|x|`, symmetry `|x⁻¹| = |x|` and positivity
/// away from the origin, on random samples.
pub fn check_quasinorm_axioms<T: Scalar>(
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    qn.check_compatible(g)?;
    let n = g.dim();
    let nu = g.nu();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut hom, mut sym) = (T::zero(), T::zero());
    let mut min_ratio = T::infinity();
    for _ in 0..samples {
        let x = random_point::<T>(&mut rng, n, 2.0);
        let lambda = T::lit(rng.gen_range(0.2..5.0));
        let r = qn.value(nu, &x);
        let rl = qn.value(nu, &g.dilate_unchecked(lambda, &x));
        hom = hom.max((rl - lambda * r).abs() / (T::one() + lambda * r));
        sym = sym.max((qn.value(nu, &g.inverse(&x)) - r).abs() / (T::one() + r));
        if x.euclidean_norm() > T::zero() {
            min_ratio = min_ratio.min(r / x.euclidean_norm().max(T::one()));
        }
    }
    let params = group_params(g).quasinorm(qn.label());
    let at_origin = qn.value(nu, &g.origin());
    Ok(vec![
        CheckReport::identity(
            "quasinorm.homogeneity",
            "|D_λ x| = λ|x|",
            params.clone(),
            Value::real(hom),
            Value::Real(0.0),
            tol.structural,
        ),
        CheckReport::identity(
            "quasinorm.symmetry",
            "|x⁻¹| = |x|",
            params.clone(),
            Value::real(sym),
            Value::Real(0.0),
            tol.structural,
        ),
        CheckReport::identity(
            "quasinorm.positivity",
            "|0| = 0 and |x| > 0 for x ≠ 0",
            params,
            Value::real(at_origin + if min_ratio > T::zero() { T::zero() } else { T::one() }),
            Value::Real(0.0),
            tol.structural,
        )
        .with_diag("min_sampled_value_ratio", f64_of(min_ratio)),
    ])
}

/// Polar rule sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolarResolution {
    pub order: usize,
    pub angular_panels: usize,
    pub radial_panels: usize,
}

impl Default for PolarResolution {
    fn default() -> Self {
        PolarResolution {
            order: 16,
            angular_panels: 2,
            radial_panels: 8,
        }
    }
}

impl PolarResolution {
    pub fn scheme<T: Scalar>(&self, g: &GroupSpec<T>, qn: QuasiNorm<T>) -> Result<PolarScheme<T>> {
        PolarScheme::new(g, qn, self.order, self.angular_panels, self.radial_panels)
    }
}

pub(crate) const POLAR: &str = "∫ f dx = ∫_0^∞ ∫_℘ f(D_r y) r^{Q−1} dσ(y) dr";

/// Cartesian integral against the polar decomposition, per field.
pub fn check_polar<T: Scalar>(
    ps: &PolarScheme<T>,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    fields: &[BatteryField<T>],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    fields
        .iter()
        .map(|bf| {
            let f = bf.field.as_ref();
            let cart = bf.scheme.integral(f)?.values[0];
            let polar = ps.polar_integral(f)?;
            Ok(CheckReport::identity(
                "polar_decomposition",
                POLAR,
                params_for(g, Some(qn), f),
                Value::complex(cart),
                Value::complex(polar),
                tol.identity,
            ))
        })
        .collect()
}

/// Total mass of the unit sphere against `2π^{n/2}/Γ(n/2)`; only for the
/// Euclidean norm on isotropic `ℝⁿ`.
pub fn check_sphere_mass<T: Scalar>(ps: &PolarScheme<T>, g: &GroupSpec<T>, qn: &QuasiNorm<T>, tol: &Tolerances) -> Option<CheckReport> {
    let euclid = qn.kind == QuasiNormKind::Euclidean || (qn.kind == QuasiNormKind::PFamily && qn.p == T::lit(2.0));
    if !(g.is_abelian() && g.nu().iter().all(|v| *v == T::one()) && euclid) {
        return None;
    }
    let n = g.dim();
    // Γ(n/2) by the half-integer recursion.
    let mut gamma = if n % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() };
    let mut s = if n % 2 == 0 { 1.0 } else { 0.5 };
    while s < n as f64 / 2.0 {
        gamma *= s;
        s += 1.0;
    }
    let exact = 2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma;
    Some(CheckReport::identity(
        "sphere_mass",
        "σ(℘) = 2π^{n/2}/Γ(n/2)",
        group_params(g).quasinorm(qn.label()),
        Value::real(ps.sphere_mass()),
        Value::Real(exact),
        tol.identity,
    ))
}

/// Random points `D_r y` with `|y| = 1` and `r` uniform in `[r_lo, r_hi]`.
pub fn shell_points<T: Scalar>(g: &GroupSpec<T>, qn: &QuasiNorm<T>, count: usize, seed: u64, r_lo: f64, r_hi: f64) -> Vec<Point<T>> {
    let n = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = random_point::<T>(&mut rng, n, 1.0);
        let ru = qn.value(g.nu(), &u);
        if !(ru > T::lit(1e-3)) {
            continue;
        }
        let y = g.dilate_unchecked(ru.recip(), &u);
        let r = T::lit(rng.gen_range(r_lo..r_hi));
        out.push(g.dilate_unchecked(r, &y));
    }
    out
}

/// Largest `|Ef/|x| − d/dr f(D_r y)|` over `points`; the frame-based Euler
/// variant is measured against the same orbit derivative in the diagnostics.
pub fn check_radial_operator<T: Scalar>(
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    points: &[Point<T>],
    tol: &Tolerances,
) -> Result<CheckReport> {
    qn.check_compatible(g)?;
    let nu = g.nu();
    let zero = Cx::new(T::zero(), T::zero());
    let (mut worst, mut at) = (T::zero(), (zero, zero));
    let mut paper = T::zero();
    for x in points {
        let r = qn.value(nu, x);
        let jet = Jet::new(f, x);
        let eq = jet.radial(g, r);
        let fd = orbit_derivative(g, f, x, r);
        let d = (eq - fd).norm();
        if d >= worst {
            worst = d;
            at = (eq, fd);
        }
        paper = paper.max((jet.euler(g, EulerVariant::PaperExample) / r - fd).norm());
    }
    Ok(CheckReport::identity(
        "radial_operator",
        "ℛf = 𝒞Ef, i.e. Ef/|x| = d/dr f(D_r y)",
        params_for(g, Some(qn), f).variant("euler_quotient/orbit_fd"),
        Value::complex(at.0),
        Value::complex(at.1),
        tol.pointwise,
    )
    .with_diag("max_abs_residual", f64_of(worst))
    .with_diag("paper_example_max_abs_residual", f64_of(paper))
    .with_diag("points", points.len()))
}

/// Largest pointwise residuals of `2Re(𝒫f·conj(iℳf)) = (𝒫∘iℳ)|f|² = E|f|²`
/// for `pairing`; the unweighted coordinate pairing is reported alongside.
pub fn check_pm_factorization<T: Scalar>(
    g: &GroupSpec<T>,
    pairing: PmPairing,
    f: &dyn ScalarField<T>,
    points: &[Point<T>],
    tol: &Tolerances,
) -> Result<CheckReport> {
    let (mut r1, mut r2, mut plain) = (T::zero(), T::zero(), T::zero());
    for x in points {
        let (a, b) = pm_factorization_residual(g, pairing, f, x)?;
        r1 = r1.max(a);
        r2 = r2.max(b);
        let (c, d) = pm_factorization_residual(g, PmPairing::COORDINATE_PLAIN, f, x)?;
        plain = plain.max(c.max(d));
    }
    Ok(CheckReport::identity(
        "pm_factorization",
        "2Re(𝒫f·conj(iℳf)) = (𝒫∘iℳ)|f|² = E|f|²",
        params_for(g, None, f).variant(pairing.label()),
        Value::real(r1.max(r2)),
        Value::Real(0.0),
        tol.pointwise,
    )
    .with_diag("max_r1", f64_of(r1))
    .with_diag("max_r2", f64_of(r2))
    .with_diag("coordinate_plain_max_residual", f64_of(plain))
    .with_diag("points", points.len()))
}

/// Largest `|[ℛ_g, 𝒞]f − i𝒞²f|` over `points`.
pub fn check_commutator<T: Scalar>(
    g: Arc<GroupSpec<T>>,
    qn: QuasiNorm<T>,
    f: Arc<dyn ScalarField<T>>,
    points: &[Point<T>],
    tol: &Tolerances,
) -> Result<CheckReport> {
    let rg = OperatorHandle::dilation_generator(g.clone(), qn)?;
    let cc = OperatorHandle::coulomb(g.clone(), qn)?;
    let i = Cx::new(T::zero(), T::one());
    let zero = Cx::new(T::zero(), T::zero());
    let (mut worst, mut at) = (T::zero(), (zero, zero));
    for x in points {
        let r = qn.value(g.nu(), x);
        let lhs = operator_commutator(&rg, &cc, f.clone(), x)?;
        let rhs = i * f.eval(x) / (r * r);
        let d = (lhs - rhs).norm();
        if d >= worst {
            worst = d;
            at = (lhs, rhs);
        }
    }
    Ok(CheckReport::identity(
        "commutator",
        "[ℛ_g, 𝒞]f = i𝒞²f",
        params_for(&g, Some(&qn), f.as_ref()),
        Value::complex(at.0),
        Value::complex(at.1),
        tol.pointwise,
    )
    .with_diag("max_abs_residual", f64_of(worst))
    .with_diag("points", points.len()))
}

/// `⟨Af, h⟩ = ⟨f, Ah⟩` for `A = ℛ_g` and `A = 𝒞`, and the failure of the
/// same relation for `A = ℛ` as a negative control: its normalized
/// residual must exceed `1e-2`.
pub fn check_symmetry<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    h: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    qn.check_compatible(g)?;
    require_vanishing("symmetry", f)?;
    require_vanishing("symmetry", h)?;
    q.check_fields(&[f, h])?;
    let nu = g.nu();
    let zero = Cx::new(T::zero(), T::zero());
    let r = q.integrate(6, |x, out| {
        let rad = qn.value(nu, x);
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = zero);
            return;
        }
        let jf = Jet::new(f, x);
        let jh = Jet::new(h, x);
        out[0] = jf.dilation_generator(g, rad) * jh.value.conj();
        out[1] = jf.value * jh.dilation_generator(g, rad).conj();
        out[2] = jf.value / rad * jh.value.conj();
        out[3] = jf.value * (jh.value / rad).conj();
        out[4] = jf.radial(g, rad) * jh.value.conj();
        out[5] = jf.value * jh.radial(g, rad).conj();
    })?;
    let params = params_for(g, Some(qn), f).variant(format!("partner={}", h.id()));
    let stmt = "⟨Af, h⟩ = ⟨f, Ah⟩";
    let v = |k: usize| Value::complex(r.values[k]);
    let rg = CheckReport::identity("symmetry.dilation_generator", stmt, params.clone(), v(0), v(1), tol.pointwise);
    let c = CheckReport::identity("symmetry.coulomb", stmt, params.clone(), v(2), v(3), tol.pointwise);
    let rr = (r.values[4] - r.values[5]).norm() / (T::one() + r.values[4].norm().max(r.values[5].norm()));
    let control = CheckReport::inequality(
        "symmetry.radial_control",
        "normalized |⟨ℛf, h⟩ − ⟨f, ℛh⟩| ≥ 1e-2 (ℛ is not symmetric)",
        params,
        1e-2,
        f64_of(rr),
        tol.inequality,
    );
    Ok(vec![rg, c, control])
}
