use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gauss::composite;
use super::{pairwise_rows, QuadratureScheme};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::group::{GroupSpec, Point, QuasiNorm, MAX_DIM};
use crate::scalar::{Cx, Scalar};

#[derive(Clone, Copy)]
enum Trig {
    Sin,
    Cos,
}

/// Radial × quasi-sphere rule for `∫ f = ∫_0^∞ ∫_℘ f(D_r y) r^{Q−1} dσ(y) dr`.
///
/// The quasi-sphere is charted by hyperspherical angles: a Euclidean unit
/// vector `u(θ)` is pushed onto `{|y| = 1}` by `y = D_{1/|u|} u`. The density
/// of `σ` in the chart is `|det[ν∘y, ∂_θ y]|`, the Jacobian of
/// `(r, θ) ↦ D_r y(θ)` with the factor `r^{Q−1}` removed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolarScheme<T> {
    nu: Vec<T>,
    q: T,
    norm: QuasiNorm<T>,
    pub order: usize,
    /// Panels per quarter turn in every angle.
    pub angular_panels: usize,
    pub radial_panels: usize,
    /// Sphere nodes `y` with weight `dσ · dθ`.
    #[serde(skip)]
    sphere: Vec<(Point<T>, T)>,
}

impl<T: Scalar> PolarScheme<T> {
    pub fn new(
        g: &GroupSpec<T>,
        norm: QuasiNorm<T>,
        order: usize,
        angular_panels: usize,
        radial_panels: usize,
    ) -> Result<Self> {
        norm.check_compatible(g)?;
        let n = g.dim();
        if n < 2 {
            return Err(Error::InvalidArgument("polar scheme needs dimension ≥ 2".into()));
        }
        if order == 0 || angular_panels == 0 || radial_panels == 0 {
            return Err(Error::InvalidArgument("polar rule sizes must be positive".into()));
        }
        let mut ps = PolarScheme {
            nu: g.nu().to_vec(),
            q: g.homogeneous_dimension(),
            norm,
            order,
            angular_panels,
            radial_panels,
            sphere: Vec::new(),
        };
        ps.sphere = ps.build_sphere()?;
        Ok(ps)
    }

    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    pub fn homogeneous_dimension(&self) -> T {
        self.q
    }

    pub fn norm(&self) -> &QuasiNorm<T> {
        &self.norm
    }

    /// Number of chart angles, `n − 1`.
    pub fn angle_count(&self) -> usize {
        self.dim() - 1
    }

    /// Ranges of the chart angles: `θ_i ∈ (0, π)` then `φ ∈ (0, 2π)`.
    fn angle_ranges(&self) -> Vec<(T, usize)> {
        let pi = T::PI();
        let n = self.dim();
        let mut out: Vec<(T, usize)> = (0..n - 2).map(|_| (pi, 2 * self.angular_panels)).collect();
        out.push((T::lit(2.0) * pi, 4 * self.angular_panels));
        out
    }

    /// Factor list of the Euclidean chart: component `k` of `u` is the
    /// product of `sin`/`cos` of the listed angles.
    fn chart_factors(&self) -> Vec<Vec<(usize, Trig)>> {
        let n = self.dim();
        let phi = n - 2;
        let mut comps = vec![Vec::new(); n];
        for i in 0..n - 2 {
            let mut f: Vec<(usize, Trig)> = (0..i).map(|l| (l, Trig::Sin)).collect();
            f.push((i, Trig::Cos));
            comps[n - 1 - i] = f;
        }
        let sines: Vec<(usize, Trig)> = (0..n - 2).map(|l| (l, Trig::Sin)).collect();
        comps[0] = sines.clone();
        comps[0].push((phi, Trig::Cos));
        comps[1] = sines;
        comps[1].push((phi, Trig::Sin));
        comps
    }

    /// `u(θ)` and `∂u/∂θ_a` for each angle.
    fn chart(&self, angles: &[T]) -> (Point<T>, Vec<Point<T>>) {
        let n = self.dim();
        let factors = self.chart_factors();
        let val = |a: usize, t: Trig| match t {
            Trig::Sin => angles[a].sin(),
            Trig::Cos => angles[a].cos(),
        };
        let der = |a: usize, t: Trig| match t {
            Trig::Sin => angles[a].cos(),
            Trig::Cos => -angles[a].sin(),
        };
        let mut u = Point::zeros(n);
        let mut du = vec![Point::zeros(n); n - 1];
        for (k, f) in factors.iter().enumerate() {
            u[k] = f.iter().fold(T::one(), |acc, &(a, t)| acc * val(a, t));
            for (a, slot) in du.iter_mut().enumerate() {
                slot[k] = f.iter().fold(T::one(), |acc, &(b, t)| {
                    acc * if b == a { der(b, t) } else { val(b, t) }
                });
                if !f.iter().any(|&(b, _)| b == a) {
                    slot[k] = T::zero();
                }
            }
        }
        (u, du)
    }

    /// Quasi-sphere point `y(θ)` and the density of `σ` at `θ`.
    pub fn sphere_point(&self, angles: &[T]) -> Result<(Point<T>, T)> {
        let n = self.dim();
        if angles.len() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} angles, got {}",
                n - 1,
                angles.len()
            )));
        }
        let (u, du) = self.chart(angles);
        let ru = self.norm.value(&self.nu, &u);
        if !(ru > T::zero() && ru.is_finite()) {
            return Err(Error::ChartDegenerate(format!("|u(θ)| = {ru} at θ = {angles:?}")));
        }
        let grad = self.norm.gradient_with_value(&self.nu, &u, ru);
        let y = u.map(|j, uj| uj * ru.powf(-self.nu[j]));
        // Columns: ν∘y, then ∂y/∂θ_a.
        let mut m = [[T::zero(); MAX_DIM]; MAX_DIM];
        for j in 0..n {
            m[j][0] = self.nu[j] * y[j];
        }
        for (a, d) in du.iter().enumerate() {
            let gd = (0..n).fold(T::zero(), |acc, k| acc + grad[k] * d[k]);
            for j in 0..n {
                m[j][a + 1] = ru.powf(-self.nu[j]) * (d[j] - self.nu[j] * u[j] * gd / ru);
            }
        }
        let det = determinant(&mut m, n);
        if !det.is_finite() || det.is_zero() {
            return Err(Error::ChartDegenerate(format!("Jacobian determinant {det} at θ = {angles:?}")));
        }
        Ok((y, det.abs()))
    }

    /// Density of `σ` with respect to `dθ` at the given chart angles.
    pub fn sphere_measure_density(&self, angles: &[T]) -> Result<T> {
        self.sphere_point(angles).map(|(_, d)| d)
    }

    fn build_sphere(&self) -> Result<Vec<(Point<T>, T)>> {
        let rules: Vec<Vec<(T, T)>> = self
            .angle_ranges()
            .into_iter()
            .map(|(hi, panels)| composite(T::zero(), hi, panels, self.order))
            .collect();
        let total: usize = rules.iter().map(Vec::len).product();
        let mut out = Vec::with_capacity(total);
        let mut angles = vec![T::zero(); rules.len()];
        for idx in 0..total {
            let mut rest = idx;
            let mut w = T::one();
            for (a, rule) in rules.iter().enumerate().rev() {
                let (t, wt) = rule[rest % rule.len()];
                rest /= rule.len();
                angles[a] = t;
                w *= wt;
            }
            let (y, dens) = self.sphere_point(&angles)?;
            out.push((y, w * dens));
        }
        Ok(out)
    }

    /// `σ(℘)`.
    pub fn sphere_mass(&self) -> T {
        let mut buf: Vec<Cx<T>> = self.sphere.iter().map(|&(_, w)| Cx::new(w, T::zero())).collect();
        pairwise_rows(&mut buf, 1);
        buf.first().map_or(T::zero(), |v| v.re)
    }

    pub fn sphere_nodes(&self) -> &[(Point<T>, T)] {
        &self.sphere
    }

    /// Radial interval `[r_lo, r_hi]` outside which `f` is zero or
    /// negligible.
    pub fn radial_extent(&self, f: &dyn ScalarField<T>) -> Result<(T, T)> {
        let s = f.support();
        let same_norm = s.norm.is_some_and(|qn| qn == self.norm);
        let lo = if same_norm { s.r_min.max(T::zero()) } else { T::zero() };
        let hi = match (same_norm, s.r_max) {
            (true, Some(r)) => r,
            _ => {
                let b = f.decay_box().ok_or_else(|| {
                    Error::TruncationError(format!("{} declares no decay box", f.id()))
                })?;
                self.norm.value(&self.nu, &b)
            }
        };
        Ok((lo, hi))
    }

    /// `∫_0^∞ ∫_℘ f(D_r y) r^{Q−1} dσ(y) dr`.
    pub fn polar_integral(&self, f: &dyn ScalarField<T>) -> Result<Cx<T>> {
        if f.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "field dimension {} does not match scheme dimension {}",
                f.dim(),
                self.dim()
            )));
        }
        let (lo, hi) = self.radial_extent(f)?;
        let rule = composite(lo, hi, self.radial_panels, self.order);
        let qm1 = self.q - T::one();
        let shells: Vec<Cx<T>> = rule
            .par_iter()
            .map(|&(r, w)| {
                let scale: Vec<T> = self.nu.iter().map(|&v| r.powf(v)).collect();
                let mut buf: Vec<Cx<T>> = self
                    .sphere
                    .iter()
                    .map(|(y, ws)| f.eval(&y.map(|j, v| v * scale[j])) * *ws)
                    .collect();
                pairwise_rows(&mut buf, 1);
                buf.first().copied().unwrap_or_default() * (w * r.powf(qm1))
            })
            .collect();
        let mut buf = shells;
        pairwise_rows(&mut buf, 1);
        let v = buf.first().copied().unwrap_or_default();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NumericFailure("non-finite polar sum".into()));
        }
        Ok(v)
    }
}

/// `|∫f − ∫_polar f| / (1 + |∫f|)`.
pub fn polar_identity_residual<T: Scalar>(
    q: &QuadratureScheme<T>,
    ps: &PolarScheme<T>,
    f: &dyn ScalarField<T>,
) -> Result<T> {
    let cart = q.integral(f)?.values[0];
    let polar = ps.polar_integral(f)?;
    Ok((cart - polar).norm() / (T::one() + cart.norm()))
}

/// Determinant of the leading `n × n` block by partial pivoting.
fn determinant<T: Scalar>(m: &mut [[T; MAX_DIM]; MAX_DIM], n: usize) -> T {
    let mut det = T::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(c);
        if m[p][c].is_zero() {
            return T::zero();
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let v = m[c][k];
                m[r][k] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DilationWeights;

    #[test]
    fn determinant_of_small_matrices() {
        let mut m = [[0.0f64; MAX_DIM]; MAX_DIM];
        m[0][..3].copy_from_slice(&[2.0, 0.0, 1.0]);
        m[1][..3].copy_from_slice(&[1.0, 3.0, 0.0]);
        m[2][..3].copy_from_slice(&[0.0, 1.0, 4.0]);
        assert!((determinant(&mut m, 3) - 25.0).abs() < 1e-14);
    }

    #[test]
    fn euclidean_sphere_masses() {
        for (n, want) in [(2usize, 2.0 * std::f64::consts::PI), (3, 4.0 * std::f64::consts::PI)] {
            let g = GroupSpec::<f64>::euclidean(n).unwrap();
            let ps = PolarScheme::new(&g, QuasiNorm::euclidean(), 12, 1, 1).unwrap();
            assert!((ps.sphere_mass() - want).abs() < 1e-12, "n={n}: {}", ps.sphere_mass());
        }
    }

    #[test]
    fn density_matches_finite_difference_jacobian() {
        let g = GroupSpec::<f64>::heisenberg();
        let ps = PolarScheme::new(&g, QuasiNorm::koranyi(), 4, 1, 1).unwrap();
        let angles = [0.7, 2.1];
        let (y, dens) = ps.sphere_point(&angles).unwrap();
        assert!((QuasiNorm::koranyi().value(g.nu(), &y) - 1.0).abs() < 1e-14);
        let h = 1e-6;
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for j in 0..3 {
            m[j][0] = g.nu()[j] * y[j];
        }
        for a in 0..2 {
            let mut p = angles;
            let mut q = angles;
            p[a] += h;
            q[a] -= h;
            let (yp, _) = ps.sphere_point(&p).unwrap();
            let (yq, _) = ps.sphere_point(&q).unwrap();
            for j in 0..3 {
                m[j][a + 1] = (yp[j] - yq[j]) / (2.0 * h);
            }
        }
        let fd = determinant(&mut m, 3).abs();
        assert!((fd - dens).abs() < 1e-8 * dens, "{fd} vs {dens}");
    }

    #[test]
    fn pole_is_chart_degenerate() {
        let g = GroupSpec::<f64>::euclidean(3).unwrap();
        let ps = PolarScheme::new(&g, QuasiNorm::euclidean(), 4, 1, 1).unwrap();
        assert!(matches!(ps.sphere_measure_density(&[0.0, 1.0]), Err(Error::ChartDegenerate(_))));
    }

    #[test]
    fn anisotropic_density_is_positive() {
        let g = GroupSpec::abelian(DilationWeights::<f64>::from_f64(&[1.0, 2.0, 3.0]).unwrap());
        let ps = PolarScheme::new(&g, QuasiNorm::p_family(6.0).unwrap(), 6, 1, 1).unwrap();
        assert!(ps.sphere_nodes().iter().all(|(_, w)| *w > 0.0));
        assert!(ps.sphere_mass() > 0.0);
    }
}
