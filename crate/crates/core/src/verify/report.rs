use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::{Cx, Scalar};

/// A side of a checked relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Value {
    pub fn abs(&self) -> f64 {
        match *self {
            Value::Real(v) => v.abs(),
            Value::Complex { re, im } => re.hypot(im),
        }
    }

    pub fn to_complex(&self) -> Cx<f64> {
        match *self {
            Value::Real(v) => Cx::new(v, 0.0),
            Value::Complex { re, im } => Cx::new(re, im),
        }
    }

    pub fn real<T: Scalar>(v: T) -> Self {
        Value::Real(v.as_f64())
    }

    pub fn complex<T: Scalar>(z: Cx<T>) -> Self {
        Value::Complex {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `lhs = rhs`.
    Identity,
    /// `lhs ≤ rhs`.
    Inequality,
}

/// Configuration a check ran under.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quasinorm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(rename = "Q")]
    pub q: f64,
}

impl CheckParams {
    pub fn new(group: impl Into<String>, q: f64) -> Self {
        CheckParams {
            group: group.into(),
            q,
            ..Default::default()
        }
    }

    pub fn quasinorm(mut self, label: impl Into<String>) -> Self {
        self.quasinorm = Some(label.into());
        self
    }

    pub fn field(mut self, id: impl Into<String>) -> Self {
        self.field = Some(id.into());
        self
    }

    pub fn alpha(mut self, a: f64) -> Self {
        self.alpha = Some(a);
        self
    }

    pub fn variant(mut self, v: impl Into<String>) -> Self {
        self.variant = Some(v.into());
        self
    }

    /// Total order used to canonicalize report listings.
    pub fn sort_key(&self) -> (String, String, String, i64, String) {
        (
            self.group.clone(),
            self.quasinorm.clone().unwrap_or_default(),
            self.field.clone().unwrap_or_default(),
            self.alpha.map_or(i64::MIN, |a| (a * 1e9).round() as i64),
            self.variant.clone().unwrap_or_default(),
        )
    }
}

/// One verified identity or inequality.
///
/// For identities `rel_residual = |lhs − rhs| / (1 + max(|lhs|, |rhs|))`.
/// Inequalities `lhs ≤ rhs` measure only the violation, `max(0, lhs − rhs)`,
/// under the same normalization, and report the signed margin as `slack`.
/// Either way `pass ⇔ rel_residual ≤ tolerance`. Skipped and errored
/// reports carry no sides or residuals and never pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    /// The relation being checked, written out.
    pub paper_ref: String,
    pub params: CheckParams,
    pub kind: CheckKind,
    pub lhs: Option<Value>,
    pub rhs: Option<Value>,
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped_reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subchecks: Vec<CheckReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
    Errored,
}

impl CheckReport {
    fn blank(check_id: &str, statement: &str, params: CheckParams, kind: CheckKind, tolerance: f64) -> Self {
        CheckReport {
            check_id: check_id.to_string(),
            paper_ref: statement.to_string(),
            params,
            kind,
            lhs: None,
            rhs: None,
            abs_residual: None,
            rel_residual: None,
            slack: None,
            tolerance,
            pass: false,
            skipped_reason: None,
            error: None,
            diagnostics: BTreeMap::new(),
            subchecks: Vec::new(),
        }
    }

    pub fn identity(
        check_id: &str,
        statement: &str,
        params: CheckParams,
        lhs: Value,
        rhs: Value,
        tolerance: f64,
    ) -> Self {
        let mut r = Self::blank(check_id, statement, params, CheckKind::Identity, tolerance);
        let abs = (lhs.to_complex() - rhs.to_complex()).norm();
        let rel = abs / (1.0 + lhs.abs().max(rhs.abs()));
        r.lhs = Some(lhs);
        r.rhs = Some(rhs);
        r.abs_residual = Some(abs);
        r.rel_residual = Some(rel);
        r.pass = rel <= tolerance;
        r
    }

    /// `lhs ≤ rhs`.
    pub fn inequality(
        check_id: &str,
        statement: &str,
        params: CheckParams,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let mut r = Self::blank(check_id, statement, params, CheckKind::Inequality, tolerance);
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        let abs = (lhs - rhs).max(0.0);
        let rel = abs / scale;
        r.lhs = Some(Value::Real(lhs));
        r.rhs = Some(Value::Real(rhs));
        r.abs_residual = Some(abs);
        r.rel_residual = Some(rel);
        r.slack = Some((rhs - lhs) / scale);
        // NaN sides fail through the comparison.
        r.pass = rel <= tolerance && lhs.is_finite() && rhs.is_finite();
        r
    }

    pub fn skipped(check_id: &str, statement: &str, params: CheckParams, reason: impl Into<String>) -> Self {
        let mut r = Self::blank(check_id, statement, params, CheckKind::Identity, 0.0);
        r.skipped_reason = Some(reason.into());
        r
    }

    pub fn errored(check_id: &str, statement: &str, params: CheckParams, error: impl ToString) -> Self {
        let mut r = Self::blank(check_id, statement, params, CheckKind::Identity, 0.0);
        r.error = Some(error.to_string());
        r
    }

    pub fn with_diag(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.diag(key, value);
        self
    }

    /// Records a diagnostic; non-finite numbers are stored as strings since
    /// JSON has no encoding for them.
    pub fn diag(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        let v = value.into();
        let v = match v {
            serde_json::Value::Null => serde_json::Value::String("non-finite".into()),
            other => other,
        };
        self.diagnostics.insert(key.to_string(), v);
    }

    pub fn with_sub(mut self, sub: CheckReport) -> Self {
        self.subchecks.push(sub);
        self
    }

    pub fn outcome(&self) -> Outcome {
        if self.error.is_some() {
            Outcome::Errored
        } else if self.skipped_reason.is_some() {
            Outcome::Skipped
        } else if self.pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    /// Passes, counting every subcheck.
    pub fn all_pass(&self) -> bool {
        self.outcome() == Outcome::Pass && self.subchecks.iter().all(|s| s.all_pass())
    }

    /// This report followed by all nested subchecks, each without children.
    pub fn flatten(self) -> Vec<CheckReport> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(mut r) = stack.pop() {
            let subs = std::mem::take(&mut r.subchecks);
            out.push(r);
            stack.extend(subs.into_iter().rev());
        }
        out
    }

    /// Finds a report (this or a nested one) by id.
    pub fn find(&self, check_id: &str) -> Option<&CheckReport> {
        if self.check_id == check_id {
            return Some(self);
        }
        self.subchecks.iter().find_map(|s| s.find(check_id))
    }

    pub fn lhs_f64(&self) -> f64 {
        self.lhs.map_or(f64::NAN, |v| v.to_complex().re)
    }

    pub fn rhs_f64(&self) -> f64 {
        self.rhs.map_or(f64::NAN, |v| v.to_complex().re)
    }

    pub fn diag_f64(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).and_then(|v| v.as_f64())
    }
}

/// Default acceptance thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Identities on fields with analytic partials.
    pub identity: f64,
    /// Identities on fields differentiated numerically.
    pub identity_fd: f64,
    /// Allowed normalized violation of an inequality.
    pub inequality: f64,
    /// Pointwise operator relations.
    pub pointwise: f64,
    /// Algebraic group invariants.
    pub structural: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-6,
            identity_fd: 1e-5,
            inequality: 1e-8,
            pointwise: 1e-7,
            structural: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn identity_for(&self, analytic: bool) -> f64 {
        if analytic {
            self.identity
        } else {
            self.identity_fd
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let all = [self.identity, self.identity_fd, self.inequality, self.pointwise, self.structural];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(crate::Error::InvalidArgument("tolerances must be positive".into()))
        }
    }
}
