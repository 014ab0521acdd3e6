use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gauss::composite;
use super::{pairwise_rows, Integral};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::group::{Point, MAX_DIM};
use crate::scalar::{Cx, Scalar};

/// Relative size of `|f|` on the box boundary below which truncation is
/// considered negligible.
pub const DECAY_THRESHOLD: f64 = 1e-16;

/// Tensor-product composite Gauss–Legendre rule on a symmetric box.
///
/// Each axis `[-b_j, b_j]` is split into `panels` equal panels (an even
/// number, so the origin is always a breakpoint) of `order` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureScheme<T> {
    pub half_widths: Vec<T>,
    pub panels: usize,
    pub order: usize,
    pub target_tol: T,
}

impl<T: Scalar> QuadratureScheme<T> {
    pub fn new(half_widths: &[T], panels: usize, order: usize, target_tol: T) -> Result<Self> {
        if half_widths.is_empty() || half_widths.len() > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "quadrature dimension {} outside 1..={MAX_DIM}",
                half_widths.len()
            )));
        }
        if half_widths.iter().any(|b| !(*b > T::zero() && b.is_finite())) {
            return Err(Error::InvalidArgument("box half-widths must be positive".into()));
        }
        if panels < 2 || panels % 2 == 1 || order == 0 {
            return Err(Error::InvalidArgument(format!(
                "need an even panel count ≥ 2 and positive order, got {panels}×{order}"
            )));
        }
        if !(target_tol > T::zero()) {
            return Err(Error::InvalidArgument("target tolerance must be positive".into()));
        }
        Ok(QuadratureScheme {
            half_widths: half_widths.to_vec(),
            panels,
            order,
            target_tol,
        })
    }

    /// Scheme on the union of the decay boxes of `fields`.
    pub fn for_fields(
        fields: &[&dyn ScalarField<T>],
        panels: usize,
        order: usize,
        target_tol: T,
    ) -> Result<Self> {
        let b = union_box(fields)?;
        Self::new(b.as_slice(), panels, order, target_tol)
    }

    /// Same rule on a different box.
    pub fn with_box(&self, half_widths: &[T]) -> Result<Self> {
        Self::new(half_widths, self.panels, self.order, self.target_tol)
    }

    pub fn dim(&self) -> usize {
        self.half_widths.len()
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.panels * self.order
    }

    fn axis_rules(&self, panels: usize) -> Vec<Vec<(T, T)>> {
        self.half_widths
            .iter()
            .map(|&b| composite(-b, b, panels, self.order))
            .collect()
    }

    /// Integrates the `nout` components written by `integrand` into its
    /// output slice, with an error estimate from the same rule on half as
    /// many panels.
    pub fn integrate<F>(&self, nout: usize, integrand: F) -> Result<Integral<T>>
    where
        F: Fn(&Point<T>, &mut [Cx<T>]) + Sync,
    {
        let fine = self.raw_integral(self.panels, nout, &integrand);
        let coarse = self.raw_integral(self.panels / 2, nout, &integrand);
        let integral = Integral::from_pair(fine, &coarse)?;
        if integral.rel_error > self.target_tol {
            return Err(Error::RefineNeeded {
                estimate: integral.rel_error.as_f64(),
                target: self.target_tol.as_f64(),
            });
        }
        Ok(integral)
    }

    /// The rule applied once, without an error estimate.
    pub fn integrate_once<F>(&self, nout: usize, integrand: F) -> Vec<Cx<T>>
    where
        F: Fn(&Point<T>, &mut [Cx<T>]) + Sync,
    {
        self.raw_integral(self.panels, nout, &integrand)
    }

    fn raw_integral<F>(&self, panels: usize, nout: usize, integrand: &F) -> Vec<Cx<T>>
    where
        F: Fn(&Point<T>, &mut [Cx<T>]) + Sync,
    {
        let rules = self.axis_rules(panels);
        let n = self.dim();
        let slabs: Vec<Vec<Cx<T>>> = rules[0]
            .par_iter()
            .map(|&(x0, w0)| {
                let mut x = Point::zeros(n);
                x[0] = x0;
                let mut acc = vec![Cx::new(T::zero(), T::zero()); nout];
                sum_axes(&rules, 1, &mut x, nout, integrand, &mut acc);
                for v in acc.iter_mut() {
                    *v = *v * w0;
                }
                acc
            })
            .collect();
        let mut flat: Vec<Cx<T>> = slabs.into_iter().flatten().collect();
        pairwise_rows(&mut flat, nout);
        flat.truncate(nout);
        flat
    }

    /// `∫ f · conj(h)`.
    pub fn l2_inner(&self, f: &dyn ScalarField<T>, h: &dyn ScalarField<T>) -> Result<Integral<T>> {
        self.check_fields(&[f, h])?;
        self.integrate(1, |x, out| out[0] = f.eval(x) * h.eval(x).conj())
    }

    pub fn l2_norm(&self, f: &dyn ScalarField<T>) -> Result<T> {
        self.check_fields(&[f])?;
        let r = self.integrate(1, |x, out| out[0] = Cx::new(f.eval(x).norm_sqr(), T::zero()))?;
        Ok(r.values[0].re.max(T::zero()).sqrt())
    }

    /// `∫ f`.
    pub fn integral(&self, f: &dyn ScalarField<T>) -> Result<Integral<T>> {
        self.check_fields(&[f])?;
        self.integrate(1, |x, out| out[0] = f.eval(x))
    }

    /// Verifies dimensions and that every field is negligible on the box
    /// boundary.
    pub fn check_fields(&self, fields: &[&dyn ScalarField<T>]) -> Result<()> {
        for f in fields {
            if f.dim() != self.dim() {
                return Err(Error::InvalidArgument(format!(
                    "field {} has dimension {}, scheme has {}",
                    f.id(),
                    f.dim(),
                    self.dim()
                )));
            }
            self.check_decay(*f)?;
        }
        Ok(())
    }

    /// Samples the boundary faces and an interior grid; fails when the
    /// boundary maximum exceeds [`DECAY_THRESHOLD`] times the interior peak.
    pub fn check_decay(&self, f: &dyn ScalarField<T>) -> Result<()> {
        let n = self.dim();
        let interior = grid_points(&self.half_widths, 15, None);
        let peak = interior.iter().map(|x| f.eval(x).norm()).fold(T::zero(), T::max);
        if peak.is_zero() {
            return Ok(());
        }
        let mut edge = T::zero();
        let mut worst = Point::zeros(n);
        for axis in 0..n {
            for side in [-T::one(), T::one()] {
                for x in grid_points(&self.half_widths, 9, Some((axis, side))) {
                    let v = f.eval(&x).norm();
                    if !(v <= edge) {
                        edge = v;
                        worst = x;
                    }
                }
            }
        }
        if !(edge <= T::lit(DECAY_THRESHOLD) * peak) {
            return Err(Error::TruncationError(format!(
                "{}: |f| = {:.3e} at {:?} vs peak {:.3e}",
                f.id(),
                edge.as_f64(),
                worst,
                peak.as_f64()
            )));
        }
        Ok(())
    }
}

fn sum_axes<T: Scalar, F>(
    rules: &[Vec<(T, T)>],
    axis: usize,
    x: &mut Point<T>,
    nout: usize,
    integrand: &F,
    acc: &mut [Cx<T>],
) where
    F: Fn(&Point<T>, &mut [Cx<T>]) + Sync,
{
    if axis == rules.len() {
        integrand(x, acc);
        return;
    }
    let rule = &rules[axis];
    let mut rows = vec![Cx::new(T::zero(), T::zero()); rule.len() * nout];
    for (k, &(xk, wk)) in rule.iter().enumerate() {
        x[axis] = xk;
        let row = &mut rows[k * nout..(k + 1) * nout];
        sum_axes(rules, axis + 1, x, nout, integrand, row);
        for v in row.iter_mut() {
            *v = *v * wk;
        }
    }
    pairwise_rows(&mut rows, nout);
    acc.copy_from_slice(&rows[..nout]);
}

/// Uniform grid with `m` points per axis on the box, optionally pinned to
/// one face.
fn grid_points<T: Scalar>(half: &[T], m: usize, face: Option<(usize, T)>) -> Vec<Point<T>> {
    let n = half.len();
    let total = m.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut x = Point::zeros(n);
        let mut rest = idx;
        for k in 0..n {
            let i = rest % m;
            rest /= m;
            let s = T::lit(-1.0) + T::lit(2.0) * T::from_usize_lossy(i) / T::from_usize_lossy(m - 1);
            x[k] = half[k] * s;
        }
        if let Some((axis, side)) = face {
            x[axis] = half[axis] * side;
        }
        out.push(x);
    }
    if face.is_some() {
        out.dedup_by(|a, b| a.as_slice() == b.as_slice());
    }
    out
}

/// Componentwise maximum of the decay boxes of `fields`.
pub fn union_box<T: Scalar>(fields: &[&dyn ScalarField<T>]) -> Result<Point<T>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidArgument("no fields given".into()))?;
    let n = first.dim();
    let mut b = Point::<T>::zeros(n);
    for f in fields {
        let fb = f.decay_box().ok_or_else(|| {
            Error::TruncationError(format!("{} declares no decay box", f.id()))
        })?;
        if fb.dim() != n {
            return Err(Error::InvalidArgument("fields of different dimensions".into()));
        }
        for k in 0..n {
            b[k] = b[k].max(fb[k]);
        }
    }
    Ok(b)
}
