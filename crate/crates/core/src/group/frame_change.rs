use super::poly::Poly;
use super::{GroupSpec, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Polynomial matrix `P` with `∂/∂x_j = Σ_k P[j][k] X_k`.
///
/// Off the diagonal `P[j][k]` vanishes unless `ν_k > ν_j`, in which case it
/// is the homogeneous polynomial `p_{j,k}` of degree `ν_k − ν_j`.
#[derive(Debug, Clone)]
pub struct PolynomialMatrix<T> {
    entries: Vec<Vec<Poly<T>>>,
}

impl<T: Scalar> PolynomialMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: usize, k: usize) -> &Poly<T> {
        &self.entries[j][k]
    }

    pub fn eval(&self, x: &Point<T>) -> Vec<Vec<T>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval(x.as_slice())).collect())
            .collect()
    }
}

fn identity<T: Scalar>(n: usize) -> Vec<Vec<Poly<T>>> {
    (0..n)
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
        .collect()
}

fn matmul<T: Scalar>(a: &[Vec<Poly<T>>], b: &[Vec<Poly<T>>]) -> Vec<Vec<Poly<T>>> {
    let n = a.len();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    (0..n).fold(Poly::zero(n), |acc, m| acc.add(&a[j][m].mul(&b[m][k])))
                })
                .collect()
        })
        .collect()
}

/// Gauss–Jordan inverse of a small constant matrix.
fn invert_constant<T: Scalar>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let mut inv: Vec<Vec<T>> = (0..n)
        .map(|j| (0..n).map(|k| if j == k { T::one() } else { T::zero() }).collect())
        .collect();
    let scale = m
        .iter()
        .flatten()
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())?;
        if a[piv][col].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for k in 0..n {
            a[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let (ac, ic) = (a[col][k], inv[col][k]);
                    a[r][k] -= f * ac;
                    inv[r][k] -= f * ic;
                }
            }
        }
    }
    Some(inv)
}

impl<T: Scalar> GroupSpec<T> {
    /// Expresses the coordinate derivatives through the left-invariant
    /// frame by inverting the coefficient matrix `C(x)` (`X = C ∂`).
    ///
    /// `C = C₀ + N` with `C₀` constant and `C₀⁻¹N` nilpotent (it strictly
    /// raises the weighted degree), so `C⁻¹ = Σ_{m<n} (−C₀⁻¹N)^m C₀⁻¹` is a
    /// finite polynomial expression.
    pub fn frame_change_polynomials(&self) -> Result<PolynomialMatrix<T>> {
        let n = self.dim();
        let c = self.frame_table();
        let c0: Vec<Vec<T>> = c.iter().map(|row| row.iter().map(|p| p.constant_term()).collect()).collect();
        let c0_inv = invert_constant(&c0).ok_or_else(|| {
            Error::invalid_group("frame_invertible", "constant part of the frame is singular")
        })?;
        let c0_inv_p: Vec<Vec<Poly<T>>> = c0_inv
            .iter()
            .map(|row| row.iter().map(|&v| Poly::constant(n, v)).collect())
            .collect();
        let nil: Vec<Vec<Poly<T>>> = c.iter().map(|row| row.iter().map(|p| p.without_constant()).collect()).collect();
        let m = matmul(&c0_inv_p, &nil);
        let neg_m: Vec<Vec<Poly<T>>> = m.iter().map(|row| row.iter().map(|p| p.scale(-T::one())).collect()).collect();

        let mut power = identity::<T>(n);
        let mut series = identity::<T>(n);
        for _ in 1..n {
            power = matmul(&power, &neg_m);
            series = series
                .iter()
                .zip(&power)
                .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.add(q)).collect())
                .collect();
        }
        let tail = matmul(&power, &neg_m);
        if tail.iter().flatten().any(|p| !p.is_zero()) {
            return Err(Error::invalid_group(
                "frame_invertible",
                "non-constant frame part is not nilpotent",
            ));
        }
        let entries = matmul(&series, &c0_inv_p);

        let nu = self.nu();
        for j in 0..n {
            for k in 0..n {
                let p = &entries[j][k];
                if p.is_zero() || j == k {
                    continue;
                }
                let ok = nu[k] > nu[j]
                    && p
                        .weighted_degree(nu)
                        .is_some_and(|d| (d - (nu[k] - nu[j])).abs() <= T::lit(1e-12));
                if !ok && !(nu[k] == nu[j] && p.weighted_degree(nu).is_some_and(|d| d.is_zero())) {
                    return Err(Error::invalid_group(
                        "frame_change_homogeneity",
                        format!("p[{j}][{k}] is not homogeneous of degree ν_k − ν_j"),
                    ));
                }
            }
        }
        let out = PolynomialMatrix { entries };
        self.check_frame_inverse(&out)?;
        Ok(out)
    }

    fn check_frame_inverse(&self, p: &PolynomialMatrix<T>) -> Result<()> {
        let n = self.dim();
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
        for s in 0..8 {
            let x = Point::from_slice(
                &(0..n)
                    .map(|k| T::lit(((s * 7 + k * 3) % 11) as f64 / 3.0 - 1.6))
                    .collect::<Vec<_>>(),
            );
            let pv = p.eval(&x);
            for j in 0..n {
                for k in 0..n {
                    let v = (0..n).fold(T::zero(), |acc, m| acc + pv[j][m] * self.frame_coeff(m, k, &x));
                    let want = if j == k { T::one() } else { T::zero() };
                    if (v - want).abs() > tol * (T::one() + v.abs()) {
                        return Err(Error::invalid_group(
                            "frame_invertible",
                            format!("P·C ≠ I at sample {x:?}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DilationWeights;

    #[test]
    fn heisenberg_frame_change() {
        let h = GroupSpec::<f64>::heisenberg();
        let p = h.frame_change_polynomials().unwrap();
        let x = Point::from_f64(&[0.3, 1.7, -2.0]);
        let v = p.eval(&x);
        // ∂_1 = X_1 + (x_2/2) X_3
        assert!((v[0][0] - 1.0).abs() < 1e-15);
        assert!((v[0][2] - 1.7 / 2.0).abs() < 1e-15);
        assert!(p.get(0, 1).is_zero());
        // ∂_2 = X_2 − (x_1/2) X_3
        assert!((v[1][2] + 0.3 / 2.0).abs() < 1e-15);
        // ∂_3 = −¼ X_3
        assert!(p.get(2, 0).is_zero() && p.get(2, 1).is_zero());
        assert!((v[2][2] + 0.25).abs() < 1e-15);
        assert_eq!(p.get(0, 2).weighted_degree(h.nu()), Some(1.0));
    }

    #[test]
    fn abelian_frame_change_is_identity() {
        let a = GroupSpec::<f64>::abelian(DilationWeights::from_f64(&[1.0, 2.0, 3.0]).unwrap());
        let p = a.frame_change_polynomials().unwrap();
        for j in 0..3 {
            for k in 0..3 {
                if j == k {
                    assert_eq!(p.get(j, k).constant_term(), 1.0);
                } else {
                    assert!(p.get(j, k).is_zero());
                }
            }
        }
    }
}
