//! Sample-based verification of the structural invariants of a group.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GroupSpec, Point};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const SAMPLES: usize = 24;
const SEED: u64 = 0x6867_6361_6c63;

/// Outcome of one invariant family, reported by [`GroupSpec::invariant_residuals`].
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantResidual {
    pub invariant: &'static str,
    pub max_residual: f64,
}

fn sample_point<T: Scalar>(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Point<T> {
    let mut x = Point::zeros(n);
    for k in 0..n {
        x[k] = T::lit(rng.gen_range(-radius..radius));
    }
    x
}

fn rel<T: Scalar>(a: &Point<T>, b: &Point<T>) -> T {
    let scale = T::one() + a.euclidean_norm().max(b.euclidean_norm());
    a.max_abs_diff(b) / scale
}

impl<T: Scalar> GroupSpec<T> {
    fn tolerance() -> T {
        T::lit(1e-9).max(T::epsilon() * T::lit(1e3))
    }

    /// Checks every structural invariant; the first failure is returned with
    /// the violated invariant named.
    pub fn validate(&self) -> Result<()> {
        let tol = Self::tolerance();
        for r in self.invariant_residuals(SAMPLES, SEED)? {
            if !(r.max_residual <= tol.as_f64()) {
                return Err(Error::invalid_group(
                    r.invariant,
                    format!("max sampled residual {:e} exceeds {:e}", r.max_residual, tol.as_f64()),
                ));
            }
        }
        Ok(())
    }

    /// Largest sampled residual of each invariant, in evaluation order:
    /// exact homogeneity of the polynomial tables first, then the sampled
    /// algebraic laws, then exponential coordinates.
    pub fn invariant_residuals(&self, samples: usize, seed: u64) -> Result<Vec<InvariantResidual>> {
        let n = self.dim();
        let nu = self.nu();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();

        // Frame coefficients must be homogeneous of degree ν_k − ν_j.
        for j in 0..n {
            for k in 0..n {
                let c = &self.frame_table()[j][k];
                if c.is_zero() {
                    continue;
                }
                let want = nu[k] - nu[j];
                match c.weighted_degree(nu) {
                    Some(d) if (d - want).abs() <= T::lit(1e-12) => {}
                    _ => {
                        return Err(Error::invalid_group(
                            "frame_homogeneity",
                            format!("c[{j}][{k}] is not homogeneous of degree {want}"),
                        ))
                    }
                }
            }
        }
        for (j, e) in self.exp_inverse_table().iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            match e.weighted_degree(nu) {
                Some(d) if (d - nu[j]).abs() <= T::lit(1e-12) => {}
                _ => {
                    return Err(Error::invalid_group(
                        "exp_homogeneity",
                        format!("e_{} is not homogeneous of degree {}", j + 1, nu[j]),
                    ))
                }
            }
        }

        let mut ident = T::zero();
        let mut inv = T::zero();
        let mut assoc = T::zero();
        let mut auto = T::zero();
        let mut left = T::zero();
        let mut frame_h = T::zero();
        let mut exp_h = T::zero();
        let mut exp_rt = T::zero();
        let zero = self.origin();
        for _ in 0..samples {
            let x = sample_point::<T>(&mut rng, n, 1.5);
            let y = sample_point::<T>(&mut rng, n, 1.5);
            let z = sample_point::<T>(&mut rng, n, 1.5);
            let lambda = T::lit(rng.gen_range(0.3..3.0));

            ident = ident
                .max(rel(&self.product(&x, &zero), &x))
                .max(rel(&self.product(&zero, &x), &x));
            let xi = self.inverse(&x);
            inv = inv
                .max(rel(&self.product(&x, &xi), &zero))
                .max(rel(&self.product(&xi, &x), &zero));
            assoc = assoc.max(rel(
                &self.product(&self.product(&x, &y), &z),
                &self.product(&x, &self.product(&y, &z)),
            ));
            let lhs = self.dilate_unchecked(lambda, &self.product(&x, &y));
            let rhs = self.product(
                &self.dilate_unchecked(lambda, &x),
                &self.dilate_unchecked(lambda, &y),
            );
            auto = auto.max(rel(&lhs, &rhs));

            // X_j(x) = dL_x X_j(0): Jacobian of y ↦ x·y at y = 0.
            let jac = self.left_translation_jacobian(&x);
            for j in 0..n {
                let at0 = self.frame_row(j, &zero);
                let pushed = Point::from_slice(
                    &(0..n)
                        .map(|k| (0..n).fold(T::zero(), |acc, m| acc + jac[k][m] * at0[m]))
                        .collect::<Vec<_>>(),
                );
                left = left.max(rel(&pushed, &self.frame_row(j, &x)));

                let dx = self.dilate_unchecked(lambda, &x);
                let scaled = self
                    .frame_row(j, &x)
                    .map(|k, v| v * lambda.powf(nu[k] - nu[j]));
                frame_h = frame_h.max(rel(&self.frame_row(j, &dx), &scaled));
            }

            let e_scaled = self.exp_coords(&x).map(|k, v| v * lambda.powf(nu[k]));
            exp_h = exp_h.max(rel(&self.exp_coords(&self.dilate_unchecked(lambda, &x)), &e_scaled));
            let back = self.exp_map(&self.exp_coords(&x))?;
            exp_rt = exp_rt.max(rel(&back, &x));
        }
        for (invariant, v) in [
            ("identity", ident),
            ("inverse", inv),
            ("associativity", assoc),
            ("automorphism", auto),
            ("frame_left_invariance", left),
            ("frame_homogeneity", frame_h),
            ("exp_homogeneity", exp_h),
            ("exp_roundtrip", exp_rt),
        ] {
            out.push(InvariantResidual {
                invariant,
                max_residual: v.as_f64(),
            });
        }
        Ok(out)
    }

    /// `J[k][m] = ∂(x·y)_k / ∂y_m` at `y = 0`.
    pub fn left_translation_jacobian(&self, x: &Point<T>) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut xy = [T::zero(); super::poly::MAX_VARS];
        xy[..n].copy_from_slice(x.as_slice());
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|m| self.product_table()[k].partial(n + m).eval(&xy))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DilationWeights;

    #[test]
    fn shipped_groups_validate() {
        GroupSpec::<f64>::heisenberg().validate().unwrap();
        for nu in [&[1.0, 1.0, 1.0][..], &[1.0, 2.0, 3.0], &[1.0, 2.0], &[0.5, 1.5, 1.0, 2.0]] {
            GroupSpec::<f64>::abelian(DilationWeights::from_f64(nu).unwrap())
                .validate()
                .unwrap();
        }
    }

    #[test]
    fn heisenberg_residuals_are_tiny() {
        let res = GroupSpec::<f64>::heisenberg().invariant_residuals(100, 7).unwrap();
        for r in res {
            assert!(r.max_residual < 1e-12, "{r:?}");
        }
    }
}
