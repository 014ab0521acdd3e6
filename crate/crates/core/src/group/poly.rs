//! Sparse multivariate polynomials used for group laws, frame coefficients
//! and exponential coordinates.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Maximum number of variables (a product law uses `2n` of them).
pub const MAX_VARS: usize = 2 * super::MAX_DIM;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term<T> {
    pub coeff: T,
    /// Exponent of each variable; missing trailing entries are zero.
    pub exponents: Vec<u8>,
}

/// Polynomial in `nvars` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    nvars: usize,
    terms: Vec<(T, [u8; MAX_VARS])>,
}

impl<T: Scalar> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        p.push(c, &[]);
        p
    }

    /// The coordinate function `x_k`.
    pub fn var(nvars: usize, k: usize) -> Self {
        Self::monomial(nvars, T::one(), &unit(k))
    }

    pub fn monomial(nvars: usize, coeff: T, exponents: &[u8]) -> Self {
        let mut p = Self::zero(nvars);
        p.push(coeff, exponents);
        p
    }

    pub fn from_terms(nvars: usize, terms: &[Term<T>]) -> Self {
        let mut p = Self::zero(nvars);
        for t in terms {
            p.push(t.coeff, &t.exponents);
        }
        p
    }

    pub fn terms(&self) -> Vec<Term<T>> {
        self.terms
            .iter()
            .map(|(c, e)| Term {
                coeff: *c,
                exponents: e[..self.nvars].to_vec(),
            })
            .collect()
    }

    fn push(&mut self, coeff: T, exponents: &[u8]) {
        assert!(
            exponents.len() <= self.nvars || exponents[self.nvars..].iter().all(|&e| e == 0),
            "exponent vector longer than variable count"
        );
        let mut e = [0u8; MAX_VARS];
        e[..exponents.len().min(MAX_VARS)]
            .copy_from_slice(&exponents[..exponents.len().min(MAX_VARS)]);
        if let Some(slot) = self.terms.iter_mut().find(|(_, f)| *f == e) {
            slot.0 += coeff;
        } else {
            self.terms.push((coeff, e));
        }
        self.terms.retain(|(c, _)| !c.is_zero());
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the constant coefficient.
    pub fn constant_term(&self) -> T {
        self.terms
            .iter()
            .find(|(_, e)| e.iter().all(|&v| v == 0))
            .map_or(T::zero(), |(c, _)| *c)
    }

    /// Drops the constant coefficient.
    pub fn without_constant(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, e)| e.iter().any(|&v| v != 0))
                .cloned()
                .collect(),
        }
    }

    pub fn eval(&self, x: &[T]) -> T {
        debug_assert!(x.len() >= self.nvars);
        let mut acc = T::zero();
        for (c, e) in &self.terms {
            let mut m = *c;
            for (k, &p) in e[..self.nvars].iter().enumerate() {
                if p > 0 {
                    m *= x[k].powi(p as i32);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn partial(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (c, e) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut f = *e;
            f[k] -= 1;
            out.push(*c * T::from_usize_lossy(e[k] as usize), &f);
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (c, e) in &self.terms {
            out.push(*c * s, e);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (c, e) in &other.terms {
            out.push(*c, e);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (a, ea) in &self.terms {
            for (b, eb) in &other.terms {
                let mut e = [0u8; MAX_VARS];
                for k in 0..MAX_VARS {
                    e[k] = ea[k] + eb[k];
                }
                out.push(*a * *b, &e);
            }
        }
        out
    }

    /// Weighted degree `Σ e_k w_k` of every term; `None` when the terms
    /// disagree (the polynomial is not homogeneous). The zero polynomial
    /// is homogeneous of every degree and reports `None` as well.
    pub fn weighted_degree(&self, weights: &[T]) -> Option<T> {
        let tol = T::lit(1e-12);
        let mut deg: Option<T> = None;
        for (_, e) in &self.terms {
            let d = e[..self.nvars]
                .iter()
                .zip(weights)
                .fold(T::zero(), |acc, (&p, &w)| acc + T::from_usize_lossy(p as usize) * w);
            match deg {
                None => deg = Some(d),
                Some(prev) if (prev - d).abs() > tol => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn is_homogeneous(&self, weights: &[T]) -> bool {
        self.is_zero() || self.weighted_degree(weights).is_some()
    }
}

fn unit(k: usize) -> [u8; MAX_VARS] {
    let mut e = [0u8; MAX_VARS];
    e[k] = 1;
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_partials() {
        // p = 3 x0^2 x1 - x1 + 2
        let p = Poly::<f64>::monomial(2, 3.0, &[2, 1])
            .sub(&Poly::var(2, 1))
            .add(&Poly::constant(2, 2.0));
        assert_eq!(p.eval(&[2.0, 3.0]), 3.0 * 4.0 * 3.0 - 3.0 + 2.0);
        assert_eq!(p.partial(0).eval(&[2.0, 3.0]), 6.0 * 2.0 * 3.0);
        assert_eq!(p.partial(1).eval(&[2.0, 3.0]), 3.0 * 4.0 - 1.0);
        assert_eq!(p.constant_term(), 2.0);
    }

    #[test]
    fn cancellation_leaves_zero() {
        let x = Poly::<f64>::var(3, 2);
        assert!(x.sub(&x).is_zero());
        assert!(x.mul(&Poly::zero(3)).is_zero());
    }

    #[test]
    fn weighted_degree_detects_homogeneity() {
        let w = [1.0, 1.0, 2.0];
        let x2 = Poly::<f64>::var(3, 1).scale(0.5);
        assert_eq!(x2.weighted_degree(&w), Some(1.0));
        let mixed = Poly::<f64>::var(3, 0).add(&Poly::var(3, 2));
        assert_eq!(mixed.weighted_degree(&w), None);
        let x1x2 = Poly::<f64>::var(3, 0).mul(&Poly::var(3, 1));
        assert_eq!(x1x2.weighted_degree(&w), Some(2.0));
    }
}
