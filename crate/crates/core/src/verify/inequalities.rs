//! Hardy-type and uncertainty inequalities checked by quadrature.

use super::report::{CheckReport, Tolerances};
use super::{f64_of, params_for, require_vanishing};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::group::{GroupSpec, QuasiNorm};
use crate::operators::Jet;
use crate::quadrature::QuadratureScheme;
use crate::scalar::{Cx, Scalar};

fn require_q3<T: Scalar>(check: &str, g: &GroupSpec<T>) -> Result<()> {
    if g.homogeneous_dimension() >= T::lit(3.0) {
        Ok(())
    } else {
        Err(Error::PreconditionViolation(format!(
            "{check} needs Q ≥ 3, group {} has Q = {}",
            g.name(),
            g.homogeneous_dimension()
        )))
    }
}

/// Abelian `ℝⁿ` with unit weights and `n ≥ 3`, where the Euclidean forms
/// of the inequalities apply.
pub fn euclidean_mode<T: Scalar>(g: &GroupSpec<T>) -> Result<()> {
    if g.is_abelian() && g.nu().iter().all(|v| *v == T::one()) && g.dim() >= 3 {
        Ok(())
    } else {
        Err(Error::PreconditionViolation(format!(
            "needs isotropic Euclidean ℝⁿ with n ≥ 3, got {}",
            g.name()
        )))
    }
}

#[inline]
fn re<T: Scalar>(v: T) -> Cx<T> {
    Cx::new(v, T::zero())
}

pub(crate) const HARDY: &str = "‖f/|x|‖ ≤ (2/(Q−2))‖ℛf‖";

/// Hardy's inequality in the quasi-norm radius, with a cross-check of
/// `‖ℛf‖` computed from the Euler quotient and from orbit differences.
pub fn check_hardy<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    qn.check_compatible(g)?;
    require_q3("hardy", g)?;
    require_vanishing("hardy", f)?;
    q.check_fields(&[f])?;
    let nu = g.nu();
    let zero = re(T::zero());
    let r = q.integrate(3, |x, out| {
        let rad = qn.value(nu, x);
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = zero);
            return;
        }
        let jet = Jet::new(f, x);
        out[0] = re((jet.value / rad).norm_sqr());
        out[1] = re(jet.radial(g, rad).norm_sqr());
        let orbit = if jet.value.norm_sqr() > T::zero() || jet.grad.iter().any(|d| d.norm_sqr() > T::zero()) {
            crate::operators::orbit_derivative(g, f, x, rad)
        } else {
            zero
        };
        out[2] = re(orbit.norm_sqr());
    })?;
    let qd = g.homogeneous_dimension();
    let two = T::lit(2.0);
    let (weak, strong, orbit) = (r.re(0).sqrt(), r.re(1).sqrt(), r.re(2).sqrt());
    let constant = two / (qd - two);
    let params = params_for(g, Some(qn), f);
    let mut main = CheckReport::inequality("hardy", HARDY, params.clone(), f64_of(weak), f64_of(constant * strong), tol.inequality);
    main.diag("ratio", f64_of(weak / strong));
    main.diag("constant", f64_of(constant));
    let methods = CheckReport::identity(
        "hardy.radial_methods",
        "‖ℛf‖ by Euler quotient = ‖ℛf‖ by orbit differences",
        params.variant("euler_quotient/orbit_fd"),
        super::Value::real(strong),
        super::Value::real(orbit),
        tol.pointwise,
    );
    Ok(main.with_sub(methods))
}

pub(crate) const HARDY_R: &str = "‖f/‖x‖‖ ≤ (2/(n−2))‖(x/‖x‖)·∇f‖";

/// The Euclidean Hardy inequality with the radial derivative.
pub fn check_hardy_r<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    euclidean_mode(g)?;
    require_vanishing("hardy_r", f)?;
    q.check_fields(&[f])?;
    let n = g.dim();
    let zero = re(T::zero());
    let r = q.integrate(2, |x, out| {
        let rad = x.euclidean_norm();
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = zero);
            return;
        }
        let jet = Jet::new(f, x);
        let dr = (0..n).fold(zero, |acc, j| acc + jet.grad[j] * (x[j] / rad));
        out[0] = re((jet.value / rad).norm_sqr());
        out[1] = re(dr.norm_sqr());
    })?;
    let constant = T::lit(2.0) / (T::from_usize_lossy(n) - T::lit(2.0));
    let (weak, strong) = (r.re(0).sqrt(), r.re(1).sqrt());
    let params = params_for(g, None, f).quasinorm("euclidean");
    let mut rep = CheckReport::inequality("hardy_r", HARDY_R, params, f64_of(weak), f64_of(constant * strong), tol.inequality);
    rep.diag("ratio", f64_of(weak / strong));
    Ok(rep)
}

pub(crate) const CKN: &str = "(|n−2−2α|/2)‖f/‖x‖^{α+1}‖ ≤ ‖∇f/‖x‖^α‖";

/// The weighted `L²` Caffarelli–Kohn–Nirenberg inequality on `ℝⁿ`. A zero
/// constant makes the inequality empty; the report is then skipped.
pub fn check_ckn<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    alpha: T,
    tol: &Tolerances,
) -> Result<CheckReport> {
    euclidean_mode(g)?;
    let n = g.dim();
    let two = T::lit(2.0);
    let constant = (T::from_usize_lossy(n) - two - two * alpha).abs() / two;
    let params = params_for(g, None, f).quasinorm("euclidean").alpha(alpha.as_f64());
    if constant < T::lit(1e-12) {
        return Ok(CheckReport::skipped("ckn", CKN, params, "degenerate constant: n − 2 − 2α = 0"));
    }
    require_vanishing("ckn", f)?;
    q.check_fields(&[f])?;
    let zero = re(T::zero());
    let r = q.integrate(2, |x, out| {
        let rad = x.euclidean_norm();
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = zero);
            return;
        }
        let jet = Jet::new(f, x);
        let w = rad.powf(-alpha);
        let grad2 = (0..n).fold(T::zero(), |acc, j| acc + jet.grad[j].norm_sqr());
        out[0] = re((jet.value * (w / rad)).norm_sqr());
        out[1] = re(grad2 * w * w);
    })?;
    let (weak, strong) = (r.re(0).sqrt(), r.re(1).sqrt());
    let mut rep = CheckReport::inequality("ckn", CKN, params, f64_of(constant * weak), f64_of(strong), tol.inequality);
    rep.diag("ratio", f64_of(weak / strong));
    rep.diag("constant", f64_of(constant));
    Ok(rep)
}

pub(crate) const HPW: &str = "‖f‖² ≤ (2/(Q−2))‖ℛf‖‖|x|f‖";

/// The uncertainty principle derived from Hardy's inequality, with both
/// links of its proof: Hardy, then Cauchy–Schwarz.
pub fn check_hpw<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    qn: &QuasiNorm<T>,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    qn.check_compatible(g)?;
    require_q3("hpw", g)?;
    require_vanishing("hpw", f)?;
    q.check_fields(&[f])?;
    let nu = g.nu();
    let zero = re(T::zero());
    let r = q.integrate(4, |x, out| {
        let rad = qn.value(nu, x);
        if !(rad > T::zero()) {
            out.iter_mut().for_each(|o| *o = zero);
            return;
        }
        let jet = Jet::new(f, x);
        let v2 = jet.value.norm_sqr();
        out[0] = re(v2);
        out[1] = re(jet.radial(g, rad).norm_sqr());
        out[2] = re(v2 / (rad * rad));
        out[3] = re(v2 * rad * rad);
    })?;
    let qd = g.homogeneous_dimension();
    let two = T::lit(2.0);
    let c = (qd - two) / two;
    let (f2, nr, nc, nx) = (r.re(0), r.re(1).sqrt(), r.re(2).sqrt(), r.re(3).sqrt());
    let params = params_for(g, Some(qn), f);
    let mut main = CheckReport::inequality("hpw", HPW, params.clone(), f64_of(f2), f64_of(nr * nx / c), tol.inequality);
    if nr * nx > T::zero() {
        main.diag("ratio", f64_of(f2 / (nr * nx)));
    }
    let hardy = CheckReport::inequality(
        "hpw.chain_hardy",
        "((Q−2)/2)‖f/|x|‖‖|x|f‖ ≤ ‖ℛf‖‖|x|f‖",
        params.clone(),
        f64_of(c * nc * nx),
        f64_of(nr * nx),
        tol.inequality,
    );
    let holder = CheckReport::inequality(
        "hpw.chain_holder",
        "((Q−2)/2)‖f‖² ≤ ((Q−2)/2)‖f/|x|‖‖|x|f‖",
        params,
        f64_of(c * f2),
        f64_of(c * nc * nx),
        tol.inequality,
    );
    Ok(main.with_sub(hardy).with_sub(holder))
}

pub(crate) const HPW_E: &str = "‖f‖⁴ ≤ (2/(n−2))²‖∇f‖²‖‖x‖f‖²";

/// The Euclidean uncertainty principle with the full gradient; it admits
/// fields that do not vanish at the origin.
pub fn check_hpw_euclidean<T: Scalar>(
    q: &QuadratureScheme<T>,
    g: &GroupSpec<T>,
    f: &dyn ScalarField<T>,
    tol: &Tolerances,
) -> Result<CheckReport> {
    euclidean_mode(g)?;
    q.check_fields(&[f])?;
    let n = g.dim();
    let r = q.integrate(3, |x, out| {
        let jet = Jet::new(f, x);
        let v2 = jet.value.norm_sqr();
        out[0] = re(v2);
        out[1] = re((0..n).fold(T::zero(), |acc, j| acc + jet.grad[j].norm_sqr()));
        out[2] = re(v2 * x.euclidean_norm() * x.euclidean_norm());
    })?;
    let c = T::lit(2.0) / (T::from_usize_lossy(n) - T::lit(2.0));
    let (f2, g2, x2) = (r.re(0), r.re(1), r.re(2));
    let params = params_for(g, None, f).quasinorm("euclidean");
    let mut rep = CheckReport::inequality("hpw_euclidean", HPW_E, params, f64_of(f2 * f2), f64_of(c * c * g2 * x2), tol.inequality);
    if g2 * x2 > T::zero() {
        rep.diag("ratio", f64_of(f2 * f2 / (c * c * g2 * x2)));
    }
    Ok(rep)
}
