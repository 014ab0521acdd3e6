//! JSON definition files for user-supplied groups.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::poly::{Poly, Term};
use super::{DilationWeights, GroupSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// On-disk form of a group. Polynomials are lists of
/// `{"coeff": c, "exponents": [..]}` terms; product polynomials are in the
/// variables `(x_1..x_n, y_1..y_n)`, all others in `(x_1..x_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    #[serde(default)]
    pub name: Option<String>,
    pub n: usize,
    pub nu: Vec<f64>,
    pub product: Vec<Vec<Term<f64>>>,
    /// Rows `j`, columns `k`: coefficient of `∂_k` in `X_j`.
    pub frame: Vec<Vec<Vec<Term<f64>>>>,
    pub exp_inverse: Vec<Vec<Term<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<Vec<Term<f64>>>>,
}

fn to_poly<T: Scalar>(nvars: usize, terms: &[Term<f64>], what: &str) -> Result<Poly<T>> {
    for t in terms {
        if t.exponents.len() > nvars {
            return Err(Error::invalid_group(
                "table_shape",
                format!("{what}: exponent vector of length {} for {nvars} variables", t.exponents.len()),
            ));
        }
        if !t.coeff.is_finite() {
            return Err(Error::invalid_group("table_shape", format!("{what}: non-finite coefficient")));
        }
    }
    let converted: Vec<Term<T>> = terms
        .iter()
        .map(|t| Term {
            coeff: T::lit(t.coeff),
            exponents: t.exponents.clone(),
        })
        .collect();
    Ok(Poly::from_terms(nvars, &converted))
}

fn from_poly<T: Scalar>(p: &Poly<T>) -> Vec<Term<f64>> {
    p.terms()
        .into_iter()
        .map(|t| Term {
            coeff: t.coeff.as_f64(),
            exponents: t.exponents,
        })
        .collect()
}

impl GroupFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::invalid_group("schema", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group file serializes")
    }

    /// Builds and validates the group.
    pub fn build<T: Scalar>(&self) -> Result<GroupSpec<T>> {
        let n = self.n;
        if n != self.nu.len() {
            return Err(Error::invalid_group(
                "dimension",
                format!("n = {n} but {} weights given", self.nu.len()),
            ));
        }
        let weights = DilationWeights::<T>::from_f64(&self.nu)?;
        let product = self
            .product
            .iter()
            .enumerate()
            .map(|(k, t)| to_poly(2 * n, t, &format!("product[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let frame = self
            .frame
            .iter()
            .enumerate()
            .map(|(j, row)| {
                row.iter()
                    .enumerate()
                    .map(|(k, t)| to_poly(n, t, &format!("frame[{j}][{k}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let exp_inverse = self
            .exp_inverse
            .iter()
            .enumerate()
            .map(|(k, t)| to_poly(n, t, &format!("exp_inverse[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let inverse = self
            .inverse
            .as_ref()
            .map(|tbl| {
                tbl.iter()
                    .enumerate()
                    .map(|(k, t)| to_poly(n, t, &format!("inverse[{k}]")))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        GroupSpec::custom(
            self.name.clone().unwrap_or_else(|| "custom".into()),
            weights,
            product,
            inverse,
            frame,
            exp_inverse,
        )
    }

    /// Exports any group to the file format.
    pub fn from_group<T: Scalar>(g: &GroupSpec<T>) -> Self {
        GroupFile {
            name: Some(g.name().to_string()),
            n: g.dim(),
            nu: g.nu().iter().map(|v| v.as_f64()).collect(),
            product: g.product_table().iter().map(from_poly).collect(),
            frame: g
                .frame_table()
                .iter()
                .map(|row| row.iter().map(from_poly).collect())
                .collect(),
            exp_inverse: g.exp_inverse_table().iter().map(from_poly).collect(),
            inverse: g.inverse_table().map(|t| t.iter().map(from_poly).collect()),
        }
    }
}

impl<T: Scalar> GroupSpec<T> {
    pub fn from_json_str(text: &str) -> Result<Self> {
        GroupFile::from_json(text)?.build()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupKind, Point};

    #[test]
    fn heisenberg_round_trips_through_the_file_format() {
        let h = GroupSpec::<f64>::heisenberg();
        let file = GroupFile::from_group(&h);
        let back: GroupSpec<f64> = GroupSpec::from_json_str(&file.to_json()).unwrap();
        assert_eq!(back.kind(), GroupKind::Custom);
        let x = Point::from_f64(&[0.5, -1.0, 2.0]);
        let y = Point::from_f64(&[1.5, 0.25, -0.75]);
        assert!(back.product(&x, &y).max_abs_diff(&h.product(&x, &y)) < 1e-15);
        assert!(back.exp_coords(&x).max_abs_diff(&h.exp_coords(&x)) < 1e-15);
    }

    #[test]
    fn mismatched_dimension_is_named() {
        let mut file = GroupFile::from_group(&GroupSpec::<f64>::heisenberg());
        file.n = 2;
        match file.build::<f64>() {
            Err(Error::InvalidGroup { invariant, .. }) => assert_eq!(invariant, "dimension"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn broken_law_is_rejected_with_invariant_name() {
        // Flip the sign of the bracket term in the product but keep the frame:
        // the frame is then no longer left-invariant for the law.
        let mut file = GroupFile::from_group(&GroupSpec::<f64>::heisenberg());
        for t in &mut file.product[2] {
            if t.exponents.iter().map(|&e| e as u32).sum::<u32>() == 2 {
                t.coeff = -t.coeff;
            }
        }
        match file.build::<f64>() {
            Err(Error::InvalidGroup { invariant, .. }) => assert_eq!(invariant, "frame_left_invariance"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_homogeneous_frame_is_rejected() {
        let mut file = GroupFile::from_group(&GroupSpec::<f64>::heisenberg());
        file.frame[0][2].push(Term { coeff: 1.0, exponents: vec![0, 0, 1] });
        match file.build::<f64>() {
            Err(Error::InvalidGroup { invariant, .. }) => assert_eq!(invariant, "frame_homogeneity"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_errors_are_reported() {
        assert!(matches!(
            GroupSpec::<f64>::from_json_str("{\"n\": 2}"),
            Err(Error::InvalidGroup { .. })
        ));
    }
}
