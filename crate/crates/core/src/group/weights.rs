use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponents `ν_1..ν_n` of the dilation family `D_λ x = (λ^{ν_1} x_1, …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>", bound = "T: Scalar")]
pub struct DilationWeights<T> {
    nu: Vec<T>,
    q: T,
}

impl<T: Scalar> DilationWeights<T> {
    pub fn new(nu: Vec<T>) -> Result<Self> {
        if nu.is_empty() || nu.len() > super::MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "need 1..={} dilation weights, got {}",
                super::MAX_DIM,
                nu.len()
            )));
        }
        if let Some(bad) = nu.iter().find(|v| !(v.is_finite() && **v > T::zero())) {
            return Err(Error::invalid_group(
                "positive_weights",
                format!("weight {bad} is not a positive real"),
            ));
        }
        let q = nu.iter().fold(T::zero(), |acc, &v| acc + v);
        Ok(DilationWeights { nu, q })
    }

    pub fn from_f64(nu: &[f64]) -> Result<Self> {
        Self::new(nu.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn isotropic(n: usize) -> Result<Self> {
        Self::new(vec![T::one(); n])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    #[inline]
    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    #[inline]
    pub fn get(&self, j: usize) -> T {
        self.nu[j]
    }

    /// Homogeneous dimension `Q = ν_1 + … + ν_n`.
    #[inline]
    pub fn homogeneous_dimension(&self) -> T {
        self.q
    }

    pub fn is_isotropic(&self) -> bool {
        self.nu.iter().all(|&v| v == self.nu[0])
    }

    pub fn max_weight(&self) -> T {
        self.nu.iter().fold(T::zero(), |a, &b| a.max(b))
    }
}

impl<T: Scalar> TryFrom<Vec<f64>> for DilationWeights<T> {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::from_f64(&v)
    }
}

impl<T: Scalar> From<DilationWeights<T>> for Vec<f64> {
    fn from(w: DilationWeights<T>) -> Self {
        w.nu.iter().map(|v| v.as_f64()).collect()
    }
}
