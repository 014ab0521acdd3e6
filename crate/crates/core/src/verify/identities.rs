//! Norm identities checked by quadrature.

use std::sync::Arc;

use super::battery::phase_partner;
use super::report::{CheckParams, CheckReport, Tolerances, Value};
use super::{f64_of, nonzero, params_for, require_vanishing};
use crate::error::{Error, Result};
use crate::field::{ScalarField, Smoothness};
use crate::group::{GroupSpec, QuasiNorm};
use crate::operators::{
    check_momentum, operator_commutator, symmetry_residual, EulerVariant, Jet, OperatorHandle, PmPairing,
};
use crate::quadrature::QuadratureScheme;
use crate::scalar::{Cx, Scalar};

/// Norms and the cross term of a position/momentum pair.
#[derive(Debug, Clone, Copy)]
pub struct PmMoments<T> {
    pub f2: T,
    pub p2: T,
    pub m2: T,
    /// `‖𝒫f + iℳf‖²`.
    pub plus: T,
    /// `‖𝒫f − iℳf‖²`.
    pub minus: T,
    /// `⟨𝒫f, iℳf⟩`.
    pub cross: Cx<T>,
}

pub fn pm_moments<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    pairing: PmPairing,
    f: &dyn ScalarField<T>,
) -> Result<PmMoments<T>> {
    check_momentum(pairing.momentum, g)?;
    q.check_fields(&[f])?;
    let i = Cx::new(T::zero(), T::one());
    let r = q.integrate(6, |x, out| {
        let jet = Jet::new(f, x);
        let p = jet.position(g, pairing.position);
        let im = jet.momentum(g, pairing.momentum).scale(i);
        let neg = im.scale(Cx::new(-T::one(), T::zero()));
        out[0] = Cx::new(jet.value.norm_sqr(), T::zero());
        out[1] = Cx::new(p.norm_sqr(), T::zero());
        out[2] = Cx::new(im.norm_sqr(), T::zero());
        out[3] = Cx::new(p.add(&im).norm_sqr(), T::zero());
        out[4] = Cx::new(p.add(&neg).norm_sqr(), T::zero());
        out[5] = p.dot_conj(&im);
    })?;
    let m = PmMoments {
        f2: r.re(0),
        p2: r.re(1),
        m2: r.re(2),
        plus: r.re(3),
        minus: r.re(4),
        cross: r.values[5],
    };
    if !nonzero(m.p2, m.f2) || !nonzero(m.m2, m.f2) {
        return Err(Error::DegenerateInput(format!(
            "𝒫f or ℳf vanishes for {} (‖𝒫f‖² = {:e}, ‖ℳf‖² = {:e})",
            f.id(),
            m.p2.as_f64(),
            m.m2.as_f64()
        )));
    }
    Ok(m)
}

pub(crate) const KENNARD: &str = "‖𝒫f‖² + ‖ℳf‖² = Q‖f‖² + ‖𝒫f + iℳf‖²";
const KENNARD_PROOF: &str = "−2 Re ∫ 𝒫f·conj(iℳf) dx = Q‖f‖²";
const KENNARD_C: &str =
    "‖𝒫f‖² + ‖ℳf‖² = ‖𝒫f‖‖ℳf‖(2 − ‖𝒫f/‖𝒫f‖ + iℳf/‖ℳf‖‖²) + ‖𝒫f + iℳf‖²";

/// The position/momentum norm identity, its integration-by-parts step and
/// its normalized form. The opposite-sign variant `Q‖f‖² + ‖𝒫f − iℳf‖²`
/// is reported in the diagnostics.
pub fn check_kennard<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    pairing: PmPairing,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let m = pm_moments(q, g, pairing, f)?;
    let qd = g.homogeneous_dimension();
    let two = T::lit(2.0);
    let (np, nm) = (m.p2.sqrt(), m.m2.sqrt());
    let i = Cx::new(T::zero(), T::one());
    let unit_sum = q
        .integrate(1, |x, out| {
            let jet = Jet::new(f, x);
            let u = jet.position(g, pairing.position).scale(Cx::new(np.recip(), T::zero()));
            let v = jet.momentum(g, pairing.momentum).scale(i / nm);
            out[0] = Cx::new(u.add(&v).norm_sqr(), T::zero());
        })?
        .re(0);

    let t = tol.identity_for(f.has_analytic_partials());
    let params = params_for(g, None, f).variant(pairing.label());
    let a = m.p2 + m.m2;
    let b_plus = qd * m.f2 + m.plus;
    let b_minus = qd * m.f2 + m.minus;
    let c = np * nm * (two - unit_sum) + m.plus;

    let mut main = CheckReport::identity("kennard", KENNARD, params.clone(), Value::real(a), Value::real(b_plus), t);
    let minus = CheckReport::identity("kennard", KENNARD, params.clone(), Value::real(a), Value::real(b_minus), t);
    main.diag("minus_variant_rhs", b_minus.as_f64());
    main.diag("minus_variant_rel_residual", minus.rel_residual.unwrap_or(f64::NAN));
    // B₋ − A = 2Q‖f‖² exactly when the proof's cross-term identity holds.
    let gap = b_minus - a;
    main.diag("minus_variant_gap", gap.as_f64());
    main.diag(
        "minus_gap_vs_2Qf2_rel",
        ((gap - two * qd * m.f2).abs() / (T::one() + gap.abs())).as_f64(),
    );
    main.diag("plus_norm_sq", m.plus.as_f64());
    main.diag("f_norm_sq", m.f2.as_f64());

    let proof = CheckReport::identity(
        "kennard.proof_identity",
        KENNARD_PROOF,
        params.clone(),
        Value::real(-two * m.cross.re),
        Value::real(qd * m.f2),
        t,
    );
    let c_form = CheckReport::identity("kennard.c_form", KENNARD_C, params, Value::real(a), Value::real(c), t);
    Ok(main.with_sub(proof).with_sub(c_form))
}

pub(crate) const HK: &str = "(Q/2)‖f‖² ≤ ‖𝒫f‖‖ℳf‖";
const PYTHAGOREAN: &str = "Q‖f‖² ≤ ‖𝒫f‖² + ‖ℳf‖²";

/// The uncertainty inequality with its equality-case probe, plus the
/// Pythagorean form.
///
/// The diagnostics report the complex scalar `c` minimizing
/// `‖iℳf − c𝒫f‖` and the relative defect at the minimum; equality forces
/// a zero defect with `Re c < 0`. They also report how far `f` is from the
/// positive-proportionality condition `‖𝒫f‖ iℳf = ‖ℳf‖ 𝒫f` and from the
/// negative one, and likewise `‖𝒫f ∓ iℳf‖/‖𝒫f‖` for the Pythagorean case.
pub fn check_heisenberg_kennard<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    pairing: PmPairing,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let m = pm_moments(q, g, pairing, f)?;
    let qd = g.homogeneous_dimension();
    let half = T::lit(0.5);
    let params = params_for(g, None, f).variant(pairing.label());
    let (np, nm) = (m.p2.sqrt(), m.m2.sqrt());

    let mut main = CheckReport::inequality("heisenberg_kennard", HK, params.clone(), f64_of(half * qd * m.f2), f64_of(np * nm), tol.inequality);
    // ⟨iℳf, 𝒫f⟩ = conj⟨𝒫f, iℳf⟩.
    let c = m.cross.conj() / m.p2;
    let defect_sq = (m.m2 - m.cross.norm_sqr() / m.p2).max(T::zero()) / m.m2;
    main.diag("optimal_c_re", c.re.as_f64());
    main.diag("optimal_c_im", c.im.as_f64());
    main.diag("proportionality_defect", defect_sq.sqrt().as_f64());
    let cos = m.cross.re / (np * nm);
    // ‖a iℳf ∓ b 𝒫f‖² / (2 a² b²) with a = ‖𝒫f‖, b = ‖ℳf‖.
    let printed = (T::one() - cos).max(T::zero()).sqrt();
    let derived = (T::one() + cos).max(T::zero()).sqrt();
    main.diag("positive_proportionality_defect", printed.as_f64());
    main.diag("negative_proportionality_defect", derived.as_f64());
    main.diag(
        "equality_is_negative_proportionality",
        (defect_sq.sqrt() < T::lit(1e-4) && c.re < T::zero()).to_string(),
    );
    main.diag("ratio", (half * qd * m.f2 / (np * nm)).as_f64());

    let mut pyth = CheckReport::inequality(
        "heisenberg_kennard.pythagorean",
        PYTHAGOREAN,
        params,
        f64_of(qd * m.f2),
        f64_of(m.p2 + m.m2),
        tol.inequality,
    );
    pyth.diag("plus_over_p", (m.plus.sqrt() / np).as_f64());
    pyth.diag("minus_over_p", (m.minus.sqrt() / np).as_f64());
    Ok(main.with_sub(pyth))
}

pub(crate) const EULER: &str = "‖Ef‖² = (Q/2)²‖f‖² + ‖Ef + (Q/2)f‖²";
const EULER_COR: &str = "‖f‖ ≤ (2/Q)‖Ef‖";

/// The Pythagorean relation for the Euler operator and its corollary. The
/// same relation with the frame-based Euler variant is in the diagnostics.
pub fn check_euler_pythagoras<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    q.check_fields(&[f])?;
    let hq = g.homogeneous_dimension() / T::lit(2.0);
    let r = q.integrate(5, |x, out| {
        let jet = Jet::new(f, x);
        let e = jet.euler(g, EulerVariant::DilationWeighted);
        let ep = jet.euler(g, EulerVariant::PaperExample);
        out[0] = Cx::new(jet.value.norm_sqr(), T::zero());
        out[1] = Cx::new(e.norm_sqr(), T::zero());
        out[2] = Cx::new((e + jet.value * hq).norm_sqr(), T::zero());
        out[3] = Cx::new(ep.norm_sqr(), T::zero());
        out[4] = Cx::new((ep + jet.value * hq).norm_sqr(), T::zero());
    })?;
    let (f2, e2, s2, ep2, sp2) = (r.re(0), r.re(1), r.re(2), r.re(3), r.re(4));
    let t = tol.identity_for(f.has_analytic_partials());
    let params = params_for(g, None, f).variant(EulerVariant::DilationWeighted.label());
    let mut main = CheckReport::identity("euler_pythagoras", EULER, params.clone(), Value::real(e2), Value::real(hq * hq * f2 + s2), t);
    let alt = CheckReport::identity("euler_pythagoras", EULER, params.clone(), Value::real(ep2), Value::real(hq * hq * f2 + sp2), t);
    main.diag("paper_example_rel_residual", alt.rel_residual.unwrap_or(f64::NAN));
    let cor = CheckReport::inequality(
        "euler_pythagoras.corollary",
        EULER_COR,
        params,
        f64_of(f2.sqrt()),
        f64_of(e2.sqrt() / hq),
        tol.inequality,
    );
    Ok(main.with_sub(cor))
}

pub(crate) const WEIGHTED: &str =
    "‖|x|^{−α}ℛf‖² = ((Q−2)/2 − α)²‖f/|x|^{α+1}‖² + ‖|x|^{−α}ℛf + (Q−2−2α)/(2|x|^{α+1}) f‖²";

/// The weighted radial identity for each `α`, from a single quadrature pass.
pub fn check_weighted_radial_identity<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    alphas: &[T],
    tol: &Tolerances,
) -> Result<Vec<CheckReport>> {
    qn.check_compatible(g)?;
    require_vanishing("weighted_radial_identity", f)?;
    q.check_fields(&[f])?;
    let nu = g.nu();
    let qd = g.homogeneous_dimension();
    let two = T::lit(2.0);
    let k = alphas.len();
    let r = q.integrate(3 * k, |x, out| {
        let rad = qn.value(nu, x);
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = Cx::new(T::zero(), T::zero()));
            return;
        }
        let jet = Jet::new(f, x);
        let rf = jet.radial(g, rad);
        for (i, &a) in alphas.iter().enumerate() {
            let w = rad.powf(-a);
            let lhs = rf * w;
            let low = jet.value * (w / rad);
            let coef = (qd - two - two * a) / two;
            out[3 * i] = Cx::new(lhs.norm_sqr(), T::zero());
            out[3 * i + 1] = Cx::new(low.norm_sqr(), T::zero());
            out[3 * i + 2] = Cx::new((lhs + low * coef).norm_sqr(), T::zero());
        }
    })?;
    let t = tol.identity_for(f.has_analytic_partials());
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let c = (qd - two) / two - a;
            let params = params_for(g, Some(qn), f).alpha(a.as_f64());
            CheckReport::identity(
                "weighted_radial_identity",
                WEIGHTED,
                params,
                Value::real(r.re(3 * i)),
                Value::real(c * c * r.re(3 * i + 1) + r.re(3 * i + 2)),
                t,
            )
        })
        .collect())
}

/// The default `α` grid: `{−2, −1, −½, 0, (Q−2)/2, 1, 2}` without repeats.
pub fn alpha_grid<T: Scalar>(qd: T) -> Vec<T> {
    let mut out: Vec<T> = [-2.0, -1.0, -0.5, 0.0, 1.0, 2.0].iter().map(|a| T::lit(*a)).collect();
    let special = (qd - T::lit(2.0)) / T::lit(2.0);
    if !out.iter().any(|a| (*a - special).abs() < T::lit(1e-12)) {
        out.push(special);
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    out
}

pub(crate) const RSRC: &str = "‖ℛf‖² = ‖ℛ_g f‖² + ((Q−1)(Q−3)/4)‖𝒞f‖²";
const RSC: &str = "‖𝒞f‖² = ‖ℛ_g f‖‖𝒞f‖(2 − ‖ℛ_g f/‖ℛ_g f‖ + i𝒞f/‖𝒞f‖‖²)";

/// Relations between the radial operator, the dilation generator and the
/// Coulomb operator, with their corollary bounds.
///
/// The second relation is checked with `‖𝒞f‖²` on the left: it is the
/// expectation `−i⟨[ℛ_g, 𝒞]f, f⟩ = ‖𝒞f‖²` put through the abstract
/// commutator identity. The unsquared form is reported in the diagnostics.
pub fn check_rsrc<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    qn.check_compatible(g)?;
    require_vanishing("rsrc", f)?;
    q.check_fields(&[f])?;
    let nu = g.nu();
    let qd = g.homogeneous_dimension();
    let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
    let zero = Cx::new(T::zero(), T::zero());
    let r = q.integrate(4, |x, out| {
        let rad = qn.value(nu, x);
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = zero);
            return;
        }
        let jet = Jet::new(f, x);
        out[0] = Cx::new(jet.radial(g, rad).norm_sqr(), T::zero());
        out[1] = Cx::new(jet.dilation_generator(g, rad).norm_sqr(), T::zero());
        out[2] = Cx::new((jet.value / rad).norm_sqr(), T::zero());
        out[3] = Cx::new(jet.value.norm_sqr(), T::zero());
    })?;
    let (r2, g2, c2, f2) = (r.re(0), r.re(1), r.re(2), r.re(3));
    if !nonzero(g2, f2) || !nonzero(c2, f2) {
        return Err(Error::DegenerateInput(format!("ℛ_g f or 𝒞f vanishes for {}", f.id())));
    }
    let (ng, nc, nr) = (g2.sqrt(), c2.sqrt(), r2.sqrt());
    let i = Cx::new(T::zero(), one);
    let unit_sum = q
        .integrate(1, |x, out| {
            let rad = qn.value(nu, x);
            if !(rad > T::zero()) {
                out[0] = zero;
                return;
            }
            let jet = Jet::new(f, x);
            let s = jet.dilation_generator(g, rad) / ng + i * jet.value / (rad * nc);
            out[0] = Cx::new(s.norm_sqr(), T::zero());
        })?
        .re(0);

    let t = tol.identity_for(f.has_analytic_partials());
    let params = params_for(g, Some(qn), f);
    let coef = (qd - one) * (qd - three) / T::lit(4.0);
    let main = CheckReport::identity("rsrc", RSRC, params.clone(), Value::real(r2), Value::real(g2 + coef * c2), t);
    let bracket = two - unit_sum;
    let mut rsc = CheckReport::identity("rsrc.rsc", RSC, params.clone(), Value::real(c2), Value::real(ng * nc * bracket), t);
    let printed = CheckReport::identity("rsrc.rsc", RSC, params.clone(), Value::real(nc), Value::real(ng * nc * bracket), t);
    rsc.diag("unsquared_variant_rel_residual", printed.rel_residual.unwrap_or(f64::NAN));
    let mut out = main.with_sub(rsc);

    if (qd - three).abs() < T::lit(1e-12) {
        out = out.with_sub(CheckReport::identity(
            "rsrc.zero_coefficient",
            "‖ℛf‖ = ‖ℛ_g f‖ when Q = 3",
            params.clone(),
            Value::real(nr),
            Value::real(ng),
            t,
        ));
    }
    if qd >= three {
        out = out
            .with_sub(CheckReport::inequality(
                "rsrc.dilation_bound",
                "‖ℛ_g f‖ ≤ ‖ℛf‖",
                params.clone(),
                f64_of(ng),
                f64_of(nr),
                tol.inequality,
            ))
            .with_sub(CheckReport::inequality(
                "rsrc.coulomb_bound",
                "(√((Q−1)(Q−3))/2)‖𝒞f‖ ≤ ‖ℛf‖",
                params.clone(),
                f64_of(coef.max(T::zero()).sqrt() * nc),
                f64_of(nr),
                tol.inequality,
            ));
    }
    Ok(out.with_sub(CheckReport::inequality(
        "rsrc.relative_bound",
        "‖𝒞f‖ ≤ 2‖ℛ_g f‖",
        params,
        f64_of(nc),
        f64_of(two * ng),
        tol.inequality,
    )))
}

pub(crate) const PAIR: &str = "−i⟨[A,B]f, f⟩ = ‖Af‖‖Bf‖(2 − ‖Af/‖Af‖ + iBf/‖Bf‖‖²)";

/// Largest symmetry residual of `a` over the pairs `(f, f)` and
/// `(f, f·e^{ix_1})`.
pub fn symmetry_defect<T: Scalar>(
    q: &QuadratureScheme<T>,
    a: &OperatorHandle<T>,
    f: &Arc<dyn ScalarField<T>>,
) -> Result<T> {
    let partner = phase_partner(f.clone(), T::one());
    let s1 = symmetry_residual(q, a, f.as_ref(), f.as_ref())?;
    let s2 = symmetry_residual(q, a, f.as_ref(), partner.as_ref())?;
    Ok(s1.max(s2))
}

/// The commutator identity for a pair of symmetric operators.
///
/// Both operators are first tested for symmetry on `f` and a phase-shifted
/// partner; a residual above `1e-6` rejects the pair.
pub fn check_symmetric_pair_identity<T: Scalar>(
    q: &QuadratureScheme<T>,
    a: &OperatorHandle<T>,
    b: &OperatorHandle<T>,
    f: Arc<dyn ScalarField<T>>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let limit = T::lit(1e-6);
    let partner = phase_partner(f.clone(), T::one());
    let (fr, hr) = (f.as_ref(), partner.as_ref());
    for op in [a, b] {
        if op.required_smoothness() == Smoothness::VanishesNearOrigin {
            for fld in [fr, hr] {
                if fld.smoothness() != Smoothness::VanishesNearOrigin {
                    return Err(Error::InvalidField(format!(
                        "{} needs fields vanishing near the origin, {} does not",
                        op.label(),
                        fld.id()
                    )));
                }
            }
        }
    }
    q.check_fields(&[fr, hr])?;
    // One pass: the symmetry pairings of both operators against f and the
    // partner, the two norms, the commutator term and the cross term.
    let nan = Cx::new(T::nan(), T::nan());
    let r = q.integrate(13, |x, out| {
        let (v, w) = (fr.eval(x), hr.eval(x));
        let af = a.apply(fr, x).unwrap_or(nan);
        let ah = a.apply(hr, x).unwrap_or(nan);
        let bf = b.apply(fr, x).unwrap_or(nan);
        let bh = b.apply(hr, x).unwrap_or(nan);
        out[0] = af * v.conj();
        out[1] = v * af.conj();
        out[2] = af * w.conj();
        out[3] = v * ah.conj();
        out[4] = bf * v.conj();
        out[5] = v * bf.conj();
        out[6] = bf * w.conj();
        out[7] = v * bh.conj();
        out[8] = Cx::new(af.norm_sqr(), T::zero());
        out[9] = Cx::new(bf.norm_sqr(), T::zero());
        out[10] = operator_commutator(a, b, f.clone(), x).unwrap_or(nan) * v.conj();
        out[11] = af.conj() * bf;
        out[12] = Cx::new(v.norm_sqr(), T::zero());
    })?;
    let sym = |k: usize| (r.values[k] - r.values[k + 1]).norm() / (T::one() + r.values[k].norm());
    for (op, k) in [(a, 0), (b, 4)] {
        let s = sym(k).max(sym(k + 2));
        if !(s <= limit) {
            return Err(Error::PreconditionViolation(format!(
                "{} is not symmetric on {} (residual {:e})",
                op.label(),
                f.id(),
                s.as_f64()
            )));
        }
    }
    let (a2, b2, f2) = (r.re(8), r.re(9), r.re(12));
    if !nonzero(a2, f2) || !nonzero(b2, f2) {
        return Err(Error::DegenerateInput(format!(
            "{} or {} annihilates {}",
            a.label(),
            b.label(),
            f.id()
        )));
    }
    let (na, nb) = (a2.sqrt(), b2.sqrt());
    let i = Cx::new(T::zero(), T::one());
    // ‖Af/‖Af‖ + i Bf/‖Bf‖‖² expanded: 2 + 2 Re(i⟨Bf, Af⟩)/(‖Af‖‖Bf‖).
    let unit_sum = T::lit(2.0) + T::lit(2.0) * (i * r.values[11]).re / (na * nb);
    let lhs = -i * r.values[10];
    let rhs = na * nb * (T::lit(2.0) - unit_sum);
    let params = CheckParams::new(a.group().name(), a.group().homogeneous_dimension().as_f64())
        .field(f.id())
        .variant(format!("A={},B={}", a.label(), b.label()));
    let params = match a_norm(a, b) {
        Some(l) => params.quasinorm(l),
        None => params,
    };
    let t = tol.identity_for(f.has_analytic_partials());
    Ok(CheckReport::identity("symmetric_pair", PAIR, params, Value::complex(lhs), Value::real(rhs), t))
}

fn a_norm<T: Scalar>(a: &OperatorHandle<T>, b: &OperatorHandle<T>) -> Option<String> {
    a.norm().or(b.norm()).map(|n| n.label())
}
