//! Concrete field families.

use std::sync::Arc;

use super::{RadialProfile, ScalarField, Smoothness, Support};
use crate::group::poly::Poly;
use crate::group::{GroupSpec, Point, QuasiNorm, MAX_DIM};
use crate::scalar::{Cx, Scalar};

/// `ln(1e16)` plus a margin: the exponent budget for decay boxes.
const DECAY_LOG_BUDGET: f64 = 38.0;

#[inline]
fn czero<T: Scalar>() -> Cx<T> {
    Cx::new(T::zero(), T::zero())
}

/// `A · [x_m] · exp(−½ Σ_j a_j x_j²) · exp(i k·x)`.
#[derive(Debug, Clone)]
pub struct GaussianField<T> {
    label: String,
    widths: Point<T>,
    phase: Point<T>,
    prefactor: Option<usize>,
    amplitude: T,
    named: bool,
}

impl<T: Scalar> GaussianField<T> {
    /// `exp(−a‖x‖²/2)`.
    pub fn isotropic(n: usize, a: T) -> Self {
        let widths = Point::from_slice(&vec![a; n]);
        GaussianField {
            label: format!("gauss_iso(a={a})"),
            widths,
            phase: Point::zeros(n),
            prefactor: None,
            amplitude: T::one(),
            named: false,
        }
    }

    pub fn anisotropic(widths: &[T]) -> Self {
        let label = widths.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",");
        GaussianField {
            label: format!("gauss_aniso(a=[{label}])"),
            widths: Point::from_slice(widths),
            phase: Point::zeros(widths.len()),
            prefactor: None,
            amplitude: T::one(),
            named: false,
        }
    }

    /// Multiplies by `exp(i k·x)`.
    pub fn with_phase(mut self, k: &[T]) -> Self {
        self.phase = Point::from_slice(k);
        self
    }

    /// Multiplies by the coordinate `x_m`.
    pub fn with_prefactor(mut self, m: usize) -> Self {
        self.prefactor = Some(m);
        self
    }

    pub fn with_amplitude(mut self, a: T) -> Self {
        self.amplitude = a;
        self
    }

    /// Replaces the generated id.
    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self.named = true;
        self
    }

    pub fn widths(&self) -> &Point<T> {
        &self.widths
    }

    #[inline]
    fn parts(&self, x: &Point<T>) -> (Cx<T>, T) {
        let half = T::lit(0.5);
        let mut q = T::zero();
        let mut kx = T::zero();
        for j in 0..x.dim() {
            q += self.widths[j] * x[j] * x[j];
            kx += self.phase[j] * x[j];
        }
        let base = Cx::from_polar(self.amplitude * (-half * q).exp(), kx);
        let pre = self.prefactor.map_or(T::one(), |m| x[m]);
        (base, pre)
    }
}

impl<T: Scalar> ScalarField<T> for GaussianField<T> {
    fn id(&self) -> String {
        let mut s = self.label.clone();
        if let (Some(m), false) = (self.prefactor, self.named) {
            s = format!("x{}*{s}", m + 1);
        }
        s
    }

    fn dim(&self) -> usize {
        self.widths.dim()
    }

    fn eval(&self, x: &Point<T>) -> Cx<T> {
        let (base, pre) = self.parts(x);
        base * pre
    }

    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        let (base, pre) = self.parts(x);
        let log_d = Cx::new(-self.widths[j] * x[j], self.phase[j]);
        let mut v = base * pre * log_d;
        if self.prefactor == Some(j) {
            v += base;
        }
        Some(v)
    }

    fn has_analytic_partials(&self) -> bool {
        true
    }

    fn value_and_gradient(&self, x: &Point<T>) -> (Cx<T>, [Cx<T>; MAX_DIM]) {
        let (base, pre) = self.parts(x);
        let f = base * pre;
        let mut g = [czero(); MAX_DIM];
        for (j, slot) in g.iter_mut().enumerate().take(x.dim()) {
            *slot = f * Cx::new(-self.widths[j] * x[j], self.phase[j]);
            if self.prefactor == Some(j) {
                *slot += base;
            }
        }
        (f, g)
    }

    fn decay_box(&self) -> Option<Point<T>> {
        let budget = T::lit(DECAY_LOG_BUDGET);
        let two = T::lit(2.0);
        let slack = if self.prefactor.is_some() { T::lit(1.0) } else { T::zero() };
        Some(self.widths.map(|_, a| (two * budget / a).sqrt() + slack))
    }

    fn is_real(&self) -> bool {
        self.phase.is_origin()
    }
}

/// `f(x) = g(|x|)` for a [`RadialProfile`] `g` and a quasi-norm.
#[derive(Debug, Clone)]
pub struct RadialField<T> {
    label: String,
    nu: Point<T>,
    norm: QuasiNorm<T>,
    profile: RadialProfile<T>,
    outer: T,
}

impl<T: Scalar> RadialField<T> {
    pub fn new(g: &GroupSpec<T>, norm: QuasiNorm<T>, profile: RadialProfile<T>) -> Self {
        let outer = profile.decay_radius(T::lit(1e-16));
        RadialField {
            label: "radial".into(),
            nu: Point::from_slice(g.nu()),
            norm,
            profile,
            outer,
        }
    }

    pub fn named(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn profile(&self) -> &RadialProfile<T> {
        &self.profile
    }

    pub fn norm(&self) -> &QuasiNorm<T> {
        &self.norm
    }

    #[inline]
    fn radius(&self, x: &Point<T>) -> T {
        self.norm.value(self.nu.as_slice(), x)
    }
}

impl<T: Scalar> ScalarField<T> for RadialField<T> {
    fn id(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        self.nu.dim()
    }

    fn eval(&self, x: &Point<T>) -> Cx<T> {
        Cx::new(self.profile.value(self.radius(x)), T::zero())
    }

    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        Some(self.value_and_gradient(x).1[j])
    }

    fn has_analytic_partials(&self) -> bool {
        true
    }

    fn value_and_gradient(&self, x: &Point<T>) -> (Cx<T>, [Cx<T>; MAX_DIM]) {
        let r = self.radius(x);
        let (v, d) = self.profile.value_and_derivative(r);
        let mut g = [czero(); MAX_DIM];
        if !d.is_zero() {
            let grad = self.norm.gradient_with_value(self.nu.as_slice(), x, r);
            for (j, slot) in g.iter_mut().enumerate().take(x.dim()) {
                *slot = Cx::new(d * grad[j], T::zero());
            }
        }
        (Cx::new(v, T::zero()), g)
    }

    fn smoothness(&self) -> Smoothness {
        if self.profile.inner_radius() > T::zero() {
            Smoothness::VanishesNearOrigin
        } else {
            Smoothness::SmoothEverywhere
        }
    }

    fn support(&self) -> Support<T> {
        Support {
            r_min: self.profile.inner_radius(),
            r_max: Some(self.outer),
            norm: Some(self.norm),
        }
    }

    fn decay_box(&self) -> Option<Point<T>> {
        // |x| ≤ R implies |x_j| ≤ R^{ν_j} for every shipped quasi-norm.
        let r = self.outer;
        Some(self.nu.map(|_, v| r.powf(v)))
    }

    fn is_real(&self) -> bool {
        true
    }
}

/// The constant function.
#[derive(Debug, Clone)]
pub struct ConstantField<T> {
    n: usize,
    value: Cx<T>,
}

impl<T: Scalar> ConstantField<T> {
    pub fn new(n: usize, value: T) -> Self {
        ConstantField {
            n,
            value: Cx::new(value, T::zero()),
        }
    }

    pub fn complex(n: usize, value: Cx<T>) -> Self {
        ConstantField { n, value }
    }
}

impl<T: Scalar> ScalarField<T> for ConstantField<T> {
    fn id(&self) -> String {
        format!("const({})", self.value)
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, _x: &Point<T>) -> Cx<T> {
        self.value
    }
    fn partial(&self, _j: usize, _x: &Point<T>) -> Option<Cx<T>> {
        Some(czero())
    }
    fn has_analytic_partials(&self) -> bool {
        true
    }
    fn is_real(&self) -> bool {
        self.value.im.is_zero()
    }
}

/// A real polynomial in the coordinates.
#[derive(Debug, Clone)]
pub struct PolynomialField<T> {
    poly: Poly<T>,
    partials: Vec<Poly<T>>,
}

impl<T: Scalar> PolynomialField<T> {
    pub fn new(poly: Poly<T>) -> Self {
        let partials = (0..poly.nvars()).map(|k| poly.partial(k)).collect();
        PolynomialField { poly, partials }
    }
}

impl<T: Scalar> ScalarField<T> for PolynomialField<T> {
    fn id(&self) -> String {
        "polynomial".into()
    }
    fn dim(&self) -> usize {
        self.poly.nvars()
    }
    fn eval(&self, x: &Point<T>) -> Cx<T> {
        Cx::new(self.poly.eval(x.as_slice()), T::zero())
    }
    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        Some(Cx::new(self.partials[j].eval(x.as_slice()), T::zero()))
    }
    fn has_analytic_partials(&self) -> bool {
        true
    }
    fn is_real(&self) -> bool {
        true
    }
}

type EvalFn<T> = dyn Fn(&Point<T>) -> Cx<T> + Send + Sync;
type PartialFn<T> = dyn Fn(usize, &Point<T>) -> Cx<T> + Send + Sync;

/// A field given by closures.
#[derive(Clone)]
pub struct FnField<T> {
    label: String,
    n: usize,
    eval: Arc<EvalFn<T>>,
    partial: Option<Arc<PartialFn<T>>>,
    smoothness: Smoothness,
    support: Support<T>,
    decay_box: Option<Point<T>>,
    real: bool,
}

impl<T: Scalar> FnField<T> {
    pub fn new(
        label: impl Into<String>,
        n: usize,
        eval: impl Fn(&Point<T>) -> Cx<T> + Send + Sync + 'static,
    ) -> Self {
        FnField {
            label: label.into(),
            n,
            eval: Arc::new(eval),
            partial: None,
            smoothness: Smoothness::SmoothEverywhere,
            support: Support::everywhere(),
            decay_box: None,
            real: false,
        }
    }

    pub fn with_partials(mut self, p: impl Fn(usize, &Point<T>) -> Cx<T> + Send + Sync + 'static) -> Self {
        self.partial = Some(Arc::new(p));
        self
    }

    pub fn with_decay_box(mut self, half_widths: &[T]) -> Self {
        self.decay_box = Some(Point::from_slice(half_widths));
        self
    }

    /// Declares the field zero on `{|x| ≤ r_min}` for `norm`.
    pub fn vanishing_near_origin(mut self, norm: QuasiNorm<T>, r_min: T) -> Self {
        self.smoothness = Smoothness::VanishesNearOrigin;
        self.support = Support {
            r_min,
            r_max: None,
            norm: Some(norm),
        };
        self
    }

    pub fn real(mut self) -> Self {
        self.real = true;
        self
    }
}

impl<T: Scalar> std::fmt::Debug for FnField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FnField({})", self.label)
    }
}

impl<T: Scalar> ScalarField<T> for FnField<T> {
    fn id(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn eval(&self, x: &Point<T>) -> Cx<T> {
        (self.eval)(x)
    }
    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        self.partial.as_ref().map(|p| p(j, x))
    }
    fn has_analytic_partials(&self) -> bool {
        self.partial.is_some()
    }
    fn smoothness(&self) -> Smoothness {
        self.smoothness
    }
    fn support(&self) -> Support<T> {
        self.support
    }
    fn decay_box(&self) -> Option<Point<T>> {
        self.decay_box
    }
    fn is_real(&self) -> bool {
        self.real
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fd_partial;
    use crate::group::DilationWeights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn assert_partials_agree(f: &dyn ScalarField<f64>, points: &[Point<f64>]) {
        for x in points {
            for j in 0..f.dim() {
                let a = f.partial(j, x).unwrap();
                let d = fd_partial(f, j, x, f64::fd_step()).value;
                assert!(
                    (a - d).norm() <= 1e-7 * (1.0 + a.norm()),
                    "{} ∂{j} at {x:?}: {a} vs {d}",
                    f.id()
                );
                assert_eq!(f.value_and_gradient(x).1[j], a);
            }
        }
    }

    #[test]
    fn analytic_partials_agree_with_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point<f64>> = (0..20)
            .map(|_| Point::from_f64(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]))
            .collect();
        let h = GroupSpec::<f64>::heisenberg();
        let a = GroupSpec::abelian(DilationWeights::from_f64(&[1.0, 2.0, 3.0]).unwrap());
        let fields: Vec<Box<dyn ScalarField<f64>>> = vec![
            Box::new(GaussianField::anisotropic(&[1.0, 0.5, 2.0]).with_phase(&[1.0, 0.0, -0.5]).with_prefactor(1)),
            Box::new(RadialField::new(
                &h,
                QuasiNorm::koranyi(),
                RadialProfile::gaussian(1.5, 4.0).with_inner_cutoff(0.4, 1.0).with_oscillation(2.0),
            )),
            Box::new(RadialField::new(
                &a,
                QuasiNorm::p_family(6.0).unwrap(),
                RadialProfile::gaussian(1.5, 6.0).with_power(-1.0).with_inner_cutoff(0.3, 1.0),
            )),
        ];
        for f in &fields {
            assert_partials_agree(f.as_ref(), &pts);
        }
    }

    #[test]
    fn annulus_field_vanishes_inside_inner_radius() {
        let h = GroupSpec::<f64>::heisenberg();
        let qn = QuasiNorm::koranyi();
        let f = RadialField::new(&h, qn, RadialProfile::gaussian(1.0, 4.0).with_inner_cutoff(0.5, 1.0));
        assert_eq!(f.smoothness(), Smoothness::VanishesNearOrigin);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let x = Point::from_f64(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            if qn.value(h.nu(), &x) <= 0.5 {
                assert_eq!(f.eval(&x).norm(), 0.0);
            }
        }
    }

    #[test]
    fn decay_boxes_bound_the_field() {
        let g = GaussianField::<f64>::isotropic(3, 1.0);
        let b = g.decay_box().unwrap();
        assert!(g.eval(&Point::from_f64(&[b[0], 0.0, 0.0])).norm() < 1e-16);
        let a = GroupSpec::abelian(DilationWeights::from_f64(&[1.0, 2.0, 3.0]).unwrap());
        let f = RadialField::new(&a, QuasiNorm::p_family(6.0).unwrap(), RadialProfile::gaussian(1.0, 6.0));
        let b = f.decay_box().unwrap();
        for k in 0..3 {
            let x = Point::zeros(3).with(k, b[k]);
            assert!(f.eval(&x).norm() < 1e-16, "axis {k}");
        }
    }
}
