use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::{DilationWeights, Point, Vector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Abelian,
    Heisenberg,
    Custom,
}

/// A homogeneous group on `ℝⁿ` in the chart where dilations are diagonal.
///
/// Laws, frame coefficients and exponential coordinates are polynomial
/// tables; the abelian and Heisenberg constructors additionally take
/// closed-form fast paths on hot evaluation routes.
#[derive(Debug, Clone)]
pub struct GroupSpec<T> {
    name: String,
    kind: GroupKind,
    weights: DilationWeights<T>,
    /// Coordinate `k` of `x·y` as a polynomial in `(x_1..x_n, y_1..y_n)`.
    product: Vec<Poly<T>>,
    /// Closed-form inverse, when known.
    inverse: Option<Vec<Poly<T>>>,
    /// `frame[j][k] = c_{j,k}` with `X_j = Σ_k c_{j,k}(x) ∂_k`.
    frame: Vec<Vec<Poly<T>>>,
    /// `e_j(x)` with `exp⁻¹(x) = Σ_j e_j(x) X_j`.
    exp_inverse: Vec<Poly<T>>,
}

impl<T: Scalar> GroupSpec<T> {
    /// `(ℝⁿ, +)` with arbitrary positive dilation weights.
    pub fn abelian(weights: DilationWeights<T>) -> Self {
        let n = weights.dim();
        let product = (0..n)
            .map(|k| Poly::var(2 * n, k).add(&Poly::var(2 * n, n + k)))
            .collect();
        let inverse = (0..n).map(|k| Poly::var(n, k).scale(-T::one())).collect();
        let frame = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        if j == k {
                            Poly::constant(n, T::one())
                        } else {
                            Poly::zero(n)
                        }
                    })
                    .collect()
            })
            .collect();
        let exp_inverse = (0..n).map(|k| Poly::var(n, k)).collect();
        let label = weights
            .nu()
            .iter()
            .map(|v| format!("{v}"))
            .collect::<Vec<_>>()
            .join(",");
        GroupSpec {
            name: format!("abelian(nu=[{label}])"),
            kind: GroupKind::Abelian,
            weights,
            product,
            inverse: Some(inverse),
            frame,
            exp_inverse,
        }
    }

    /// Isotropic `ℝⁿ`.
    pub fn euclidean(n: usize) -> Result<Self> {
        Ok(Self::abelian(DilationWeights::isotropic(n)?))
    }

    /// Heisenberg group on `ℝ³`, weights `(1,1,2)`, with frame
    /// `X_1 = ∂_1 + 2x_2∂_3`, `X_2 = ∂_2 − 2x_1∂_3`, `X_3 = −4∂_3` and law
    /// `x·y = (x_1+y_1, x_2+y_2, x_3+y_3+2(x_2y_1 − x_1y_2))`.
    pub fn heisenberg() -> Self {
        let two = T::lit(2.0);
        let v6 = |k| Poly::<T>::var(6, k);
        let v3 = |k| Poly::<T>::var(3, k);
        let product = vec![
            v6(0).add(&v6(3)),
            v6(1).add(&v6(4)),
            v6(2)
                .add(&v6(5))
                .add(&v6(1).mul(&v6(3)).scale(two))
                .sub(&v6(0).mul(&v6(4)).scale(two)),
        ];
        let inverse = (0..3).map(|k| v3(k).scale(-T::one())).collect();
        let zero = Poly::zero(3);
        let one = Poly::constant(3, T::one());
        let frame = vec![
            vec![one.clone(), zero.clone(), v3(1).scale(two)],
            vec![zero.clone(), one.clone(), v3(0).scale(-two)],
            vec![zero.clone(), zero, Poly::constant(3, T::lit(-4.0))],
        ];
        let exp_inverse = vec![v3(0), v3(1), v3(2).scale(T::lit(-0.25))];
        GroupSpec {
            name: "heisenberg".into(),
            kind: GroupKind::Heisenberg,
            weights: DilationWeights::from_f64(&[1.0, 1.0, 2.0]).expect("valid weights"),
            product,
            inverse: Some(inverse),
            frame,
            exp_inverse,
        }
    }

    /// Builds a user-defined group and validates every structural invariant
    /// before returning it.
    pub fn custom(
        name: impl Into<String>,
        weights: DilationWeights<T>,
        product: Vec<Poly<T>>,
        inverse: Option<Vec<Poly<T>>>,
        frame: Vec<Vec<Poly<T>>>,
        exp_inverse: Vec<Poly<T>>,
    ) -> Result<Self> {
        let n = weights.dim();
        let shape_err = |what: &str| Error::invalid_group("table_shape", what.to_string());
        if product.len() != n || product.iter().any(|p| p.nvars() != 2 * n) {
            return Err(shape_err("product needs n polynomials in 2n variables"));
        }
        if let Some(inv) = &inverse {
            if inv.len() != n || inv.iter().any(|p| p.nvars() != n) {
                return Err(shape_err("inverse needs n polynomials in n variables"));
            }
        }
        if frame.len() != n || frame.iter().any(|r| r.len() != n || r.iter().any(|p| p.nvars() != n)) {
            return Err(shape_err("frame needs an n×n table of polynomials in n variables"));
        }
        if exp_inverse.len() != n || exp_inverse.iter().any(|p| p.nvars() != n) {
            return Err(shape_err("exp_inverse needs n polynomials in n variables"));
        }
        let g = GroupSpec {
            name: name.into(),
            kind: GroupKind::Custom,
            weights,
            product,
            inverse,
            frame,
            exp_inverse,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    #[inline]
    pub fn weights(&self) -> &DilationWeights<T> {
        &self.weights
    }

    #[inline]
    pub fn nu(&self) -> &[T] {
        self.weights.nu()
    }

    #[inline]
    pub fn homogeneous_dimension(&self) -> T {
        self.weights.homogeneous_dimension()
    }

    pub fn is_abelian(&self) -> bool {
        self.kind == GroupKind::Abelian
    }

    pub fn origin(&self) -> Point<T> {
        Point::zeros(self.dim())
    }

    pub fn product_table(&self) -> &[Poly<T>] {
        &self.product
    }

    pub fn inverse_table(&self) -> Option<&[Poly<T>]> {
        self.inverse.as_deref()
    }

    pub fn frame_table(&self) -> &[Vec<Poly<T>>] {
        &self.frame
    }

    pub fn exp_inverse_table(&self) -> &[Poly<T>] {
        &self.exp_inverse
    }

    /// `D_λ x = (λ^{ν_1} x_1, …, λ^{ν_n} x_n)`.
    pub fn dilate(&self, lambda: T, x: &Point<T>) -> Result<Point<T>> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation parameter must be positive, got {lambda}"
            )));
        }
        Ok(self.dilate_unchecked(lambda, x))
    }

    #[inline]
    pub(crate) fn dilate_unchecked(&self, lambda: T, x: &Point<T>) -> Point<T> {
        let nu = self.nu();
        x.map(|k, v| v * lambda.powf(nu[k]))
    }

    pub fn product(&self, x: &Point<T>, y: &Point<T>) -> Point<T> {
        let n = self.dim();
        match self.kind {
            GroupKind::Abelian => x.map(|k, v| v + y[k]),
            GroupKind::Heisenberg => {
                let two = T::lit(2.0);
                Point::from_slice(&[
                    x[0] + y[0],
                    x[1] + y[1],
                    x[2] + y[2] + two * (x[1] * y[0] - x[0] * y[1]),
                ])
            }
            GroupKind::Custom => {
                let mut xy = [T::zero(); super::poly::MAX_VARS];
                xy[..n].copy_from_slice(x.as_slice());
                xy[n..2 * n].copy_from_slice(y.as_slice());
                let mut out = Point::zeros(n);
                for (k, p) in self.product.iter().enumerate() {
                    out[k] = p.eval(&xy);
                }
                out
            }
        }
    }

    /// Group inverse. Without a closed form the equation `x·y = 0` is solved
    /// by the iteration `y ← y − x·y`, which terminates after at most `n`
    /// sweeps for a graded polynomial law.
    pub fn inverse(&self, x: &Point<T>) -> Point<T> {
        match (&self.kind, &self.inverse) {
            (GroupKind::Abelian | GroupKind::Heisenberg, _) => x.map(|_, v| -v),
            (_, Some(table)) => {
                let mut out = Point::zeros(self.dim());
                for (k, p) in table.iter().enumerate() {
                    out[k] = p.eval(x.as_slice());
                }
                out
            }
            (_, None) => {
                let mut y = x.map(|_, v| -v);
                for _ in 0..(self.dim() + 2) {
                    let r = self.product(x, &y);
                    if r.is_origin() {
                        break;
                    }
                    y = y.map(|k, v| v - r[k]);
                }
                y
            }
        }
    }

    /// Frame coefficient `c_{j,k}(x)`.
    #[inline]
    pub fn frame_coeff(&self, j: usize, k: usize, x: &Point<T>) -> T {
        match self.kind {
            GroupKind::Abelian => {
                if j == k {
                    T::one()
                } else {
                    T::zero()
                }
            }
            _ => self.frame[j][k].eval(x.as_slice()),
        }
    }

    /// Row `(c_{j,1}(x), …, c_{j,n}(x))`, the vector field `X_j` at `x`.
    pub fn frame_row(&self, j: usize, x: &Point<T>) -> Point<T> {
        let two = T::lit(2.0);
        match self.kind {
            GroupKind::Abelian => {
                let mut e = Point::zeros(self.dim());
                e[j] = T::one();
                e
            }
            GroupKind::Heisenberg => match j {
                0 => Point::from_slice(&[T::one(), T::zero(), two * x[1]]),
                1 => Point::from_slice(&[T::zero(), T::one(), -two * x[0]]),
                _ => Point::from_slice(&[T::zero(), T::zero(), T::lit(-4.0)]),
            },
            GroupKind::Custom => {
                let mut out = Point::zeros(self.dim());
                for k in 0..self.dim() {
                    out[k] = self.frame[j][k].eval(x.as_slice());
                }
                out
            }
        }
    }

    /// Exponential coordinates `e(x)`.
    pub fn exp_coords(&self, x: &Point<T>) -> Vector<T> {
        match self.kind {
            GroupKind::Abelian => *x,
            GroupKind::Heisenberg => x.with(2, x[2] * T::lit(-0.25)),
            GroupKind::Custom => {
                let mut out = Point::zeros(self.dim());
                for (k, p) in self.exp_inverse.iter().enumerate() {
                    out[k] = p.eval(x.as_slice());
                }
                out
            }
        }
    }

    fn flow_rhs(&self, a: &Vector<T>, x: &Point<T>) -> Point<T> {
        let n = self.dim();
        let mut v = Point::zeros(n);
        for j in 0..n {
            if a[j].is_zero() {
                continue;
            }
            let row = self.frame_row(j, x);
            for k in 0..n {
                v[k] += a[j] * row[k];
            }
        }
        v
    }

    fn rk4(&self, a: &Vector<T>, steps: usize) -> Point<T> {
        let h = T::one() / T::from_usize_lossy(steps);
        let half = T::lit(0.5);
        let sixth = T::one() / T::lit(6.0);
        let axpy = |x: &Point<T>, s: T, d: &Point<T>| x.map(|k, v| v + s * d[k]);
        let mut x = self.origin();
        for _ in 0..steps {
            let k1 = self.flow_rhs(a, &x);
            let k2 = self.flow_rhs(a, &axpy(&x, half * h, &k1));
            let k3 = self.flow_rhs(a, &axpy(&x, half * h, &k2));
            let k4 = self.flow_rhs(a, &axpy(&x, h, &k3));
            x = x.map(|k, v| {
                v + h * sixth * (k1[k] + T::lit(2.0) * k2[k] + T::lit(2.0) * k3[k] + k4[k])
            });
        }
        x
    }

    /// Time-one flow from the origin of `Σ_j a_j X_j`, by fixed-step RK4 with
    /// step doubling until two successive resolutions agree to `1e-12`
    /// (relative to the solution size).
    pub fn exp_map(&self, a: &Vector<T>) -> Result<Point<T>> {
        if a.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "vector of dimension {} on a group of dimension {}",
                a.dim(),
                self.dim()
            )));
        }
        if a.is_origin() {
            return Ok(self.origin());
        }
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0));
        let mut steps = 4usize;
        let mut prev = self.rk4(a, steps);
        while steps < (1 << 16) {
            steps *= 2;
            let next = self.rk4(a, steps);
            let scale = T::one() + next.euclidean_norm();
            if next.max_abs_diff(&prev) <= tol * scale {
                return Ok(next);
            }
            prev = next;
        }
        Err(Error::NumericFailure(format!(
            "exp_map did not converge for a = {a:?}"
        )))
    }

    /// Checks dimension compatibility of a point.
    pub fn check_point(&self, x: &Point<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "point of dimension {} on a group of dimension {}",
                x.dim(),
                self.dim()
            )));
        }
        if !x.is_finite() {
            return Err(Error::InvalidArgument("point has non-finite entries".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Point<f64> {
        Point::from_f64(v)
    }

    #[test]
    fn dilation_examples() {
        let h = GroupSpec::<f64>::heisenberg();
        assert_eq!(h.dilate(2.0, &p(&[1.0, 1.0, 1.0])).unwrap(), p(&[2.0, 2.0, 4.0]));
        let a = GroupSpec::abelian(DilationWeights::from_f64(&[1.0, 2.0, 3.0]).unwrap());
        assert_eq!(a.dilate(3.0, &p(&[1.0, 1.0, 1.0])).unwrap(), p(&[3.0, 9.0, 27.0]));
        let x = p(&[0.3, -1.2, 2.5]);
        assert_eq!(a.dilate(1.0, &x).unwrap(), x);
    }

    #[test]
    fn dilation_rejects_nonpositive_lambda() {
        let h = GroupSpec::<f64>::heisenberg();
        let x = p(&[1.0, 1.0, 1.0]);
        assert!(matches!(h.dilate(0.0, &x), Err(Error::InvalidArgument(_))));
        assert!(h.dilate(-1.0, &x).is_err());
        assert!(h.dilate(f64::NAN, &x).is_err());
    }

    #[test]
    fn dilation_composes() {
        let a = GroupSpec::abelian(DilationWeights::from_f64(&[1.0, 2.0, 3.0]).unwrap());
        let x = p(&[0.7, -0.4, 1.1]);
        let ab = a.dilate(0.5, &a.dilate(3.0, &x).unwrap()).unwrap();
        assert!(ab.max_abs_diff(&a.dilate(1.5, &x).unwrap()) < 1e-14);
    }

    #[test]
    fn heisenberg_product_examples() {
        let h = GroupSpec::<f64>::heisenberg();
        assert_eq!(h.product(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 1.0, 0.0])), p(&[1.0, 1.0, -2.0]));
        let x = p(&[0.3, 0.2, -1.0]);
        assert_eq!(h.product(&x, &h.origin()), x);
        let lhs = h.dilate(2.0, &h.product(&p(&[1.0, 0.0, 0.0]), &p(&[0.0, 1.0, 0.0]))).unwrap();
        let rhs = h.product(
            &h.dilate(2.0, &p(&[1.0, 0.0, 0.0])).unwrap(),
            &h.dilate(2.0, &p(&[0.0, 1.0, 0.0])).unwrap(),
        );
        assert_eq!(lhs, p(&[2.0, 2.0, -8.0]));
        assert_eq!(rhs, p(&[2.0, 2.0, -8.0]));
    }

    #[test]
    fn heisenberg_fast_path_matches_tables() {
        let h = GroupSpec::<f64>::heisenberg();
        let x = p(&[0.3, -0.8, 1.7]);
        let y = p(&[-1.1, 0.4, 0.25]);
        let mut xy = [0.0; 8];
        xy[..3].copy_from_slice(x.as_slice());
        xy[3..6].copy_from_slice(y.as_slice());
        let prod = h.product(&x, &y);
        for k in 0..3 {
            assert!((h.product_table()[k].eval(&xy) - prod[k]).abs() < 1e-15);
            assert!((h.exp_inverse_table()[k].eval(x.as_slice()) - h.exp_coords(&x)[k]).abs() < 1e-15);
            for j in 0..3 {
                assert!((h.frame_table()[j][k].eval(x.as_slice()) - h.frame_row(j, &x)[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn left_invariant_fields_are_derivatives_of_the_law() {
        // X_j(x) = d/dt x·(t e_j) at t = 0, checked by central differences.
        let h = GroupSpec::<f64>::heisenberg();
        let x = p(&[0.6, -1.3, 0.2]);
        let t = 1e-5;
        for j in 0..2 {
            let mut e = h.origin();
            e[j] = t;
            let fwd = h.product(&x, &e);
            e[j] = -t;
            let bwd = h.product(&x, &e);
            let row = h.frame_row(j, &x);
            for k in 0..3 {
                assert!(((fwd[k] - bwd[k]) / (2.0 * t) - row[k]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exp_coordinates_examples() {
        let h = GroupSpec::<f64>::heisenberg();
        assert_eq!(h.exp_coords(&p(&[0.0, 0.0, 8.0])), p(&[0.0, 0.0, -2.0]));
        let d = h.dilate(2.0, &p(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(h.exp_coords(&d), p(&[2.0, 2.0, -1.0]));
        let a = GroupSpec::<f64>::euclidean(3).unwrap();
        assert_eq!(a.exp_coords(&p(&[1.0, 2.0, 3.0])), p(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn exp_map_examples() {
        let h = GroupSpec::<f64>::heisenberg();
        let x = h.exp_map(&p(&[0.0, 0.0, -2.0])).unwrap();
        assert!(x.max_abs_diff(&p(&[0.0, 0.0, 8.0])) < 1e-12);
        assert_eq!(h.exp_map(&p(&[0.0, 0.0, 0.0])).unwrap(), h.origin());
        let a = GroupSpec::abelian(DilationWeights::from_f64(&[1.0, 2.0]).unwrap());
        assert!(a.exp_map(&p(&[1.0, 1.0])).unwrap().max_abs_diff(&p(&[1.0, 1.0])) < 1e-12);
        assert!(h.exp_map(&p(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn iterative_inverse_matches_closed_form() {
        let h = GroupSpec::<f64>::heisenberg();
        let mut g = h.clone();
        g.kind = GroupKind::Custom;
        g.inverse = None;
        let x = p(&[0.4, -2.0, 3.0]);
        assert!(g.inverse(&x).max_abs_diff(&h.inverse(&x)) < 1e-15);
        assert!(g.product(&x, &g.inverse(&x)).is_origin());
    }
}
