use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Largest supported group dimension.
pub const MAX_DIM: usize = 4;

/// Coordinates of a group element in the global chart where dilations are
/// diagonal. Stored inline so that quadrature loops never allocate.
#[derive(Clone, Copy, PartialEq)]
pub struct Point<T> {
    n: usize,
    c: [T; MAX_DIM],
}

/// Coefficients of a Lie-algebra element in the frame `X_1..X_n`.
pub type Vector<T> = Point<T>;

impl<T: Scalar> Point<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} outside 1..={MAX_DIM}");
        Point {
            n,
            c: [T::zero(); MAX_DIM],
        }
    }

    pub fn from_slice(v: &[T]) -> Self {
        let mut p = Self::zeros(v.len());
        p.c[..v.len()].copy_from_slice(v);
        p
    }

    pub fn from_f64(v: &[f64]) -> Self {
        let mut p = Self::zeros(v.len());
        for (dst, &src) in p.c.iter_mut().zip(v) {
            *dst = T::lit(src);
        }
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.c[..self.n]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.c[..self.n]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    pub fn is_origin(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_zero())
    }

    /// Euclidean length of the coordinate vector (not a group quantity).
    pub fn euclidean_norm(&self) -> T {
        self.as_slice()
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert_eq!(self.n, other.n);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn map(&self, mut f: impl FnMut(usize, T) -> T) -> Self {
        let mut out = *self;
        for (k, v) in out.as_mut_slice().iter_mut().enumerate() {
            *v = f(k, *v);
        }
        out
    }

    pub fn with(&self, k: usize, value: T) -> Self {
        let mut out = *self;
        out[k] = value;
        out
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.as_slice().to_vec()
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;
    #[inline]
    fn index(&self, k: usize) -> &T {
        debug_assert!(k < self.n);
        &self.c[k]
    }
}

impl<T> IndexMut<usize> for Point<T> {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut T {
        debug_assert!(k < self.n);
        &mut self.c[k]
    }
}

impl<T: fmt::Debug> fmt::Debug for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.c[..self.n]).finish()
    }
}

impl<T: Scalar + Serialize> Serialize for Point<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Point<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<T>::deserialize(d)?;
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(serde::de::Error::custom(format!(
                "point dimension {} outside 1..={MAX_DIM}",
                v.len()
            )));
        }
        Ok(Point::from_slice(&v))
    }
}
