use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    check_momentum, coulomb_apply, dilation_generator_apply, euler_apply, momentum_apply, position_apply,
    radial_apply, EulerVariant, MomentumVariant, PositionVariant, RadialMethod,
};
use crate::error::{Error, Result};
use crate::field::{fd_partial, ScalarField, Smoothness, Support};
use crate::group::{GroupKind, GroupSpec, Point, QuasiNorm, MAX_DIM};
use crate::quadrature::QuadratureScheme;
use crate::scalar::{Cx, Scalar};

/// Which operator a handle applies. Vector-valued operators are addressed
/// one component at a time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind<T> {
    Position { variant: PositionVariant, j: usize },
    Momentum { variant: MomentumVariant, j: usize },
    Euler(EulerVariant),
    Radial(RadialMethod),
    Coulomb,
    /// Multiplication by `|x|^{−k}`.
    CoulombPower(T),
    DilationGenerator,
}

/// A linear operator bound to a group (and a quasi-norm where it needs one).
#[derive(Debug, Clone)]
pub struct OperatorHandle<T> {
    kind: OpKind<T>,
    group: Arc<GroupSpec<T>>,
    norm: Option<QuasiNorm<T>>,
}

impl<T: Scalar> OperatorHandle<T> {
    pub fn new(kind: OpKind<T>, group: Arc<GroupSpec<T>>, norm: Option<QuasiNorm<T>>) -> Result<Self> {
        let needs_norm = matches!(
            kind,
            OpKind::Radial(_) | OpKind::Coulomb | OpKind::CoulombPower(_) | OpKind::DilationGenerator
        );
        match (needs_norm, norm) {
            (true, None) => {
                return Err(Error::InvalidArgument(format!("{kind:?} needs a quasi-norm")));
            }
            (_, Some(qn)) => qn.check_compatible(&group)?,
            _ => {}
        }
        match kind {
            OpKind::Position { j, .. } | OpKind::Momentum { j, .. } if j >= group.dim() => {
                return Err(Error::InvalidArgument(format!(
                    "component {j} out of range for dimension {}",
                    group.dim()
                )));
            }
            OpKind::Momentum { variant, .. } => check_momentum(variant, &group)?,
            _ => {}
        }
        Ok(OperatorHandle { kind, group, norm })
    }

    pub fn position(g: Arc<GroupSpec<T>>, variant: PositionVariant, j: usize) -> Result<Self> {
        Self::new(OpKind::Position { variant, j }, g, None)
    }

    pub fn momentum(g: Arc<GroupSpec<T>>, variant: MomentumVariant, j: usize) -> Result<Self> {
        Self::new(OpKind::Momentum { variant, j }, g, None)
    }

    pub fn euler(g: Arc<GroupSpec<T>>, variant: EulerVariant) -> Self {
        OperatorHandle {
            kind: OpKind::Euler(variant),
            group: g,
            norm: None,
        }
    }

    pub fn radial(g: Arc<GroupSpec<T>>, qn: QuasiNorm<T>, method: RadialMethod) -> Result<Self> {
        Self::new(OpKind::Radial(method), g, Some(qn))
    }

    pub fn coulomb(g: Arc<GroupSpec<T>>, qn: QuasiNorm<T>) -> Result<Self> {
        Self::new(OpKind::Coulomb, g, Some(qn))
    }

    pub fn coulomb_power(g: Arc<GroupSpec<T>>, qn: QuasiNorm<T>, k: T) -> Result<Self> {
        Self::new(OpKind::CoulombPower(k), g, Some(qn))
    }

    pub fn dilation_generator(g: Arc<GroupSpec<T>>, qn: QuasiNorm<T>) -> Result<Self> {
        Self::new(OpKind::DilationGenerator, g, Some(qn))
    }

    /// Parses `P1`, `P2.exp_coordinate`, `M3.weighted_frame`, `E`,
    /// `E.paper_example`, `R`, `R.orbit_fd`, `C`, `C^2`, `Rg`.
    pub fn parse(label: &str, g: Arc<GroupSpec<T>>, qn: Option<QuasiNorm<T>>) -> Result<Self> {
        let (head, variant) = match label.split_once('.') {
            Some((h, v)) => (h, Some(v)),
            None => (label, None),
        };
        let bad = || Error::InvalidArgument(format!("unknown operator `{label}`"));
        let need_qn = || qn.ok_or_else(|| Error::InvalidArgument(format!("operator `{label}` needs a quasi-norm")));
        let component = |rest: &str| -> Result<usize> {
            let j: usize = rest.parse().map_err(|_| bad())?;
            j.checked_sub(1).ok_or_else(bad)
        };
        match head {
            "E" => Ok(Self::euler(
                g,
                match variant {
                    None | Some("dilation_weighted") => EulerVariant::DilationWeighted,
                    Some("paper_example") => EulerVariant::PaperExample,
                    _ => return Err(bad()),
                },
            )),
            "R" => {
                let method = match variant {
                    None | Some("euler_quotient") => RadialMethod::EulerQuotient,
                    Some("orbit_fd") => RadialMethod::OrbitFd,
                    _ => return Err(bad()),
                };
                Self::radial(g, need_qn()?, method)
            }
            "C" if variant.is_none() => Self::coulomb(g, need_qn()?),
            "Rg" if variant.is_none() => Self::dilation_generator(g, need_qn()?),
            h if h.starts_with("C^") && variant.is_none() => {
                let k: f64 = h[2..].parse().map_err(|_| bad())?;
                Self::coulomb_power(g, need_qn()?, T::lit(k))
            }
            h if h.starts_with('P') => {
                let j = component(&h[1..])?;
                let v = match variant {
                    None | Some("coordinate") => PositionVariant::Coordinate,
                    Some("exp_coordinate") => PositionVariant::ExpCoordinate,
                    _ => return Err(bad()),
                };
                Self::position(g, v, j)
            }
            h if h.starts_with('M') => {
                let j = component(&h[1..])?;
                let v = match variant {
                    None | Some("plain_gradient") => MomentumVariant::PlainGradient,
                    Some("weighted_gradient") => MomentumVariant::WeightedGradient,
                    Some("weighted_frame") => MomentumVariant::WeightedFrame,
                    _ => return Err(bad()),
                };
                Self::momentum(g, v, j)
            }
            _ => Err(bad()),
        }
    }

    pub fn kind(&self) -> OpKind<T> {
        self.kind
    }

    pub fn group(&self) -> &Arc<GroupSpec<T>> {
        &self.group
    }

    pub fn norm(&self) -> Option<QuasiNorm<T>> {
        self.norm
    }

    pub fn name(&self) -> String {
        match self.kind {
            OpKind::Position { j, .. } => format!("P{}", j + 1),
            OpKind::Momentum { j, .. } => format!("M{}", j + 1),
            OpKind::Euler(_) => "E".into(),
            OpKind::Radial(_) => "R".into(),
            OpKind::Coulomb => "C".into(),
            OpKind::CoulombPower(k) => format!("C^{k}"),
            OpKind::DilationGenerator => "Rg".into(),
        }
    }

    pub fn variant(&self) -> Option<&'static str> {
        match self.kind {
            OpKind::Position { variant, .. } => Some(variant.label()),
            OpKind::Momentum { variant, .. } => Some(variant.label()),
            OpKind::Euler(v) => Some(v.label()),
            OpKind::Radial(m) => Some(m.label()),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self.variant() {
            Some(v) => format!("{}.{v}", self.name()),
            None => self.name(),
        }
    }

    /// Field class the operator is meant to act on.
    pub fn required_smoothness(&self) -> Smoothness {
        match self.kind {
            OpKind::Radial(_) | OpKind::Coulomb | OpKind::CoulombPower(_) | OpKind::DilationGenerator => {
                Smoothness::VanishesNearOrigin
            }
            _ => Smoothness::SmoothEverywhere,
        }
    }

    pub fn apply(&self, f: &dyn ScalarField<T>, x: &Point<T>) -> Result<Cx<T>> {
        let g = self.group.as_ref();
        match self.kind {
            OpKind::Position { variant, j } => Ok(position_apply(variant, g, f, x)?[j]),
            OpKind::Momentum { variant, j } => Ok(momentum_apply(variant, g, f, x)?[j]),
            OpKind::Euler(v) => euler_apply(v, g, f, x),
            OpKind::Radial(m) => radial_apply(m, g, self.qn(), f, x),
            OpKind::Coulomb => coulomb_apply(g, self.qn(), f, x),
            OpKind::CoulombPower(_) => {
                let (m, _) = self.multiplier(x).expect("multiplier operator");
                if m.is_finite() {
                    Ok(f.eval(x) * m)
                } else if f.smoothness() == Smoothness::VanishesNearOrigin {
                    Ok(Cx::new(T::zero(), T::zero()))
                } else {
                    Err(Error::SingularPoint(format!("{} at the origin", self.name())))
                }
            }
            OpKind::DilationGenerator => dilation_generator_apply(g, self.qn(), f, x),
        }
    }

    fn qn(&self) -> &QuasiNorm<T> {
        self.norm.as_ref().expect("constructor guarantees a quasi-norm")
    }

    /// For multiplication operators: the real multiplier and its gradient.
    pub fn multiplier(&self, x: &Point<T>) -> Option<(T, [T; MAX_DIM])> {
        let g = self.group.as_ref();
        let n = g.dim();
        let mut grad = [T::zero(); MAX_DIM];
        match self.kind {
            OpKind::Position { variant, j } => match (variant, g.kind()) {
                (PositionVariant::Coordinate, _) | (PositionVariant::ExpCoordinate, GroupKind::Abelian) => {
                    grad[j] = T::one();
                    Some((x[j], grad))
                }
                (PositionVariant::ExpCoordinate, GroupKind::Heisenberg) => {
                    grad[j] = if j == 2 { T::lit(-0.25) } else { T::one() };
                    Some((g.exp_coords(x)[j], grad))
                }
                (PositionVariant::ExpCoordinate, GroupKind::Custom) => {
                    let p = &g.exp_inverse_table()[j];
                    for (k, slot) in grad.iter_mut().enumerate().take(n) {
                        *slot = p.partial(k).eval(x.as_slice());
                    }
                    Some((p.eval(x.as_slice()), grad))
                }
            },
            OpKind::Coulomb | OpKind::CoulombPower(_) => {
                let k = match self.kind {
                    OpKind::CoulombPower(k) => k,
                    _ => T::one(),
                };
                let qn = self.qn();
                let r = qn.value(g.nu(), x);
                if r.is_zero() {
                    return Some((T::infinity(), grad));
                }
                let m = r.powf(-k);
                let dr = qn.gradient_with_value(g.nu(), x, r);
                for (i, slot) in grad.iter_mut().enumerate().take(n) {
                    *slot = -k * m / r * dr[i];
                }
                Some((m, grad))
            }
            _ => None,
        }
    }
}

/// `A f` as a field in its own right.
///
/// Partials are analytic (product rule) for multiplication operators on
/// fields with analytic partials; otherwise they are central differences of
/// the derived values, with a wider step when the inner field itself is
/// differentiated numerically.
#[derive(Clone)]
pub struct DerivedField<T: Scalar> {
    op: OperatorHandle<T>,
    inner: Arc<dyn ScalarField<T>>,
}

impl<T: Scalar> DerivedField<T> {
    pub fn new(op: OperatorHandle<T>, inner: Arc<dyn ScalarField<T>>) -> Self {
        DerivedField { op, inner }
    }

    fn fd_step(&self) -> T {
        if self.inner.has_analytic_partials() {
            T::fd_step()
        } else {
            T::epsilon().powf(T::lit(1.0 / 6.0))
        }
    }

    fn analytic_partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        if !self.inner.has_analytic_partials() {
            return None;
        }
        let (m, dm) = self.op.multiplier(x)?;
        if !m.is_finite() {
            return Some(Cx::new(T::zero(), T::zero()));
        }
        let df = self.inner.partial(j, x)?;
        Some(df * m + self.inner.eval(x) * dm[j])
    }
}

impl<T: Scalar> ScalarField<T> for DerivedField<T> {
    fn id(&self) -> String {
        format!("{}({})", self.op.label(), self.inner.id())
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &Point<T>) -> Cx<T> {
        self.op
            .apply(self.inner.as_ref(), x)
            .unwrap_or_else(|_| Cx::new(T::nan(), T::nan()))
    }

    fn partial(&self, j: usize, x: &Point<T>) -> Option<Cx<T>> {
        self.analytic_partial(j, x)
            .or_else(|| Some(fd_partial(self, j, x, self.fd_step()).value))
    }

    fn value_and_gradient(&self, x: &Point<T>) -> (Cx<T>, [Cx<T>; MAX_DIM]) {
        if self.inner.has_analytic_partials() {
            if let Some((m, dm)) = self.op.multiplier(x) {
                let zero = Cx::new(T::zero(), T::zero());
                let mut grad = [zero; MAX_DIM];
                if !m.is_finite() {
                    return (self.eval(x), grad);
                }
                let (v, df) = self.inner.value_and_gradient(x);
                for (j, slot) in grad.iter_mut().enumerate().take(self.dim()) {
                    *slot = df[j] * m + v * dm[j];
                }
                return (v * m, grad);
            }
        }
        let mut grad = [Cx::new(T::zero(), T::zero()); MAX_DIM];
        for (j, slot) in grad.iter_mut().enumerate().take(self.dim()) {
            *slot = self.partial(j, x).expect("derived partials always resolve");
        }
        (self.eval(x), grad)
    }

    fn has_analytic_partials(&self) -> bool {
        self.inner.has_analytic_partials() && matches!(self.op.kind, OpKind::Position { .. } | OpKind::Coulomb | OpKind::CoulombPower(_))
    }

    fn smoothness(&self) -> Smoothness {
        self.inner.smoothness()
    }

    fn support(&self) -> Support<T> {
        self.inner.support()
    }

    fn decay_box(&self) -> Option<Point<T>> {
        self.inner.decay_box()
    }

    fn is_real(&self) -> bool {
        self.inner.is_real() && self.op.multiplier(&Point::zeros(self.dim())).is_some()
    }
}

/// `A(Bf)(x) − B(Af)(x)`.
pub fn operator_commutator<T: Scalar>(
    a: &OperatorHandle<T>,
    b: &OperatorHandle<T>,
    f: Arc<dyn ScalarField<T>>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    let bf = DerivedField::new(b.clone(), f.clone());
    let af = DerivedField::new(a.clone(), f);
    Ok(a.apply(&bf, x)? - b.apply(&af, x)?)
}

/// Alias of [`operator_commutator`].
pub fn commutator<T: Scalar>(
    a: &OperatorHandle<T>,
    b: &OperatorHandle<T>,
    f: Arc<dyn ScalarField<T>>,
    x: &Point<T>,
) -> Result<Cx<T>> {
    operator_commutator(a, b, f, x)
}

/// `|⟨Af, h⟩ − ⟨f, Ah⟩| / (1 + |⟨Af, h⟩|)`.
pub fn symmetry_residual<T: Scalar>(
    q: &QuadratureScheme<T>,
    a: &OperatorHandle<T>,
    f: &dyn ScalarField<T>,
    h: &dyn ScalarField<T>,
) -> Result<T> {
    if a.required_smoothness() == Smoothness::VanishesNearOrigin {
        for fld in [f, h] {
            if fld.smoothness() != Smoothness::VanishesNearOrigin {
                return Err(Error::InvalidField(format!(
                    "{} needs fields vanishing near the origin, {} does not",
                    a.label(),
                    fld.id()
                )));
            }
        }
    }
    q.check_fields(&[f, h])?;
    let nan = Cx::new(T::nan(), T::nan());
    let r = q.integrate(2, |x, out| {
        out[0] = a.apply(f, x).unwrap_or(nan) * h.eval(x).conj();
        out[1] = f.eval(x) * a.apply(h, x).unwrap_or(nan).conj();
    })?;
    let (af_h, f_ah) = (r.values[0], r.values[1]);
    Ok((af_h - f_ah).norm() / (T::one() + af_h.norm()))
}
