//! Suite configuration and its resolution into concrete groups, quasi-norms
//! and check families.

use std::path::Path;
use std::sync::Arc;

use hgcalc::verify::{BatteryResolution, PolarResolution, Tolerances, BATTERY_IDS, CATALOG};
use hgcalc::{DilationWeights, GroupSpec, QuasiNorm};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Markdown,
}

/// Groups with a built-in definition and the quasi-norms run on them when
/// none are requested.
pub const SHIPPED_GROUPS: &[(&str, &str, &[&str])] = &[
    ("r3_isotropic", "ℝ³ with unit weights", &["euclidean", "p4"]),
    ("r3_aniso", "ℝ³ with weights (1, 2, 3)", &["p6", "p12"]),
    ("heisenberg", "Heisenberg group ℍ¹, weights (1, 1, 2)", &["koranyi"]),
    ("r2_aniso", "ℝ² with weights (1, 2)", &["p4"]),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Shipped ids, `r<n>`, `abelian:<ν,..>` or paths to group files.
    pub groups: Vec<String>,
    /// `euclidean`, `koranyi` or `p<value>`; empty runs the defaults of each group.
    pub quasinorms: Vec<String>,
    /// Battery field ids or `all`.
    pub fields: Vec<String>,
    /// Check families or `all`.
    pub checks: Vec<String>,
    pub tolerances: Tolerances,
    /// Replaces the `α` grid of the weighted radial identity.
    pub alphas: Option<Vec<f64>>,
    pub ckn_alphas: Vec<f64>,
    pub sharpness_budget: usize,
    pub resolution: BatteryResolution,
    pub polar: PolarResolution,
    /// Random samples for structural checks and pointwise operator checks.
    pub samples: usize,
    pub seed: u64,
    pub output: Option<String>,
    pub format: Format,
    /// Never echoed: the report must not depend on it.
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            groups: SHIPPED_GROUPS.iter().map(|g| g.0.to_string()).collect(),
            quasinorms: Vec::new(),
            fields: vec!["all".into()],
            checks: vec!["all".into()],
            tolerances: Tolerances::default(),
            alphas: None,
            ckn_alphas: vec![-1.0, 0.0, 1.0],
            sharpness_budget: 500,
            resolution: BatteryResolution::default(),
            polar: PolarResolution::default(),
            samples: 100,
            seed: 20240917,
            output: None,
            format: Format::Json,
            threads: None,
        }
    }
}

/// A group with the quasi-norms requested on it. Incompatible quasi-norms
/// keep the reason so the suite can report them as skipped.
#[derive(Clone)]
pub struct ResolvedGroup {
    pub id: String,
    pub group: Arc<GroupSpec>,
    pub norms: Vec<(String, std::result::Result<QuasiNorm, String>)>,
}

pub struct Resolved {
    pub groups: Vec<ResolvedGroup>,
    pub fields: Vec<String>,
    pub checks: Vec<&'static str>,
}

impl SuiteConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", e.to_string()))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        self.tolerances
            .validate()
            .map_err(|e| CliError::config("tolerances", e.to_string()))?;
        if self.groups.is_empty() {
            return Err(CliError::config("groups", "no groups selected"));
        }
        if self.sharpness_budget == 0 {
            return Err(CliError::config("sharpness_budget", "must be positive"));
        }
        if self.samples == 0 {
            return Err(CliError::config("samples", "must be positive"));
        }
        if self.threads == Some(0) {
            return Err(CliError::config("threads", "must be positive"));
        }
        let checks = select(&self.checks, "checks", &CATALOG.iter().map(|c| c.0).collect::<Vec<_>>())?;
        let fields = select(&self.fields, "fields", &BATTERY_IDS)?.into_iter().map(String::from).collect();

        let mut groups = Vec::new();
        for (i, id) in self.groups.iter().enumerate() {
            let group = parse_group(id).map_err(|m| CliError::config(format!("groups[{i}]"), m))?;
            let labels: Vec<String> = if self.quasinorms.is_empty() {
                default_norms(id, &group)
            } else {
                self.quasinorms.clone()
            };
            let mut norms = Vec::new();
            for (k, label) in labels.iter().enumerate() {
                let qn = parse_quasinorm(label).map_err(|m| CliError::config(format!("quasinorms[{k}]"), m))?;
                let status = qn.check_compatible(&group).map(|_| qn).map_err(|e| e.to_string());
                norms.push((label.clone(), status));
            }
            groups.push(ResolvedGroup {
                id: id.clone(),
                group: Arc::new(group),
                norms,
            });
        }
        Ok(Resolved { groups, fields, checks })
    }
}

fn select(requested: &[String], key: &str, known: &[&'static str]) -> Result<Vec<&'static str>, CliError> {
    if requested.is_empty() {
        return Err(CliError::config(key, "empty list; use \"all\""));
    }
    if requested.iter().any(|r| r == "all") {
        return Ok(known.to_vec());
    }
    let mut out = Vec::new();
    for (i, r) in requested.iter().enumerate() {
        let hit = known
            .iter()
            .find(|k| **k == r.as_str())
            .ok_or_else(|| CliError::config(format!("{key}[{i}]"), format!("unknown id `{r}`")))?;
        if !out.contains(hit) {
            out.push(*hit);
        }
    }
    Ok(out)
}

pub fn parse_group(id: &str) -> Result<GroupSpec, String> {
    let named = |g: GroupSpec| g.with_name(id);
    match id {
        "r3_isotropic" => return GroupSpec::euclidean(3).map(named).map_err(|e| e.to_string()),
        "r3_aniso" => return abelian(&[1.0, 2.0, 3.0]).map(named),
        "r2_aniso" => return abelian(&[1.0, 2.0]).map(named),
        "heisenberg" => return Ok(GroupSpec::heisenberg()),
        _ => {}
    }
    if let Some(n) = id.strip_prefix('r').and_then(|n| n.parse::<usize>().ok()) {
        return GroupSpec::euclidean(n).map(named).map_err(|e| e.to_string());
    }
    if let Some(list) = id.strip_prefix("abelian:") {
        let nu = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad weight `{v}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        return abelian(&nu).map(named);
    }
    if Path::new(id).is_file() {
        return GroupSpec::from_json_file(id).map_err(|e| e.to_string());
    }
    Err(format!("unknown group `{id}` (not a shipped id, r<n>, abelian:<weights> or a file)"))
}

fn abelian(nu: &[f64]) -> Result<GroupSpec, String> {
    DilationWeights::from_f64(nu).map(GroupSpec::abelian).map_err(|e| e.to_string())
}

pub fn parse_quasinorm(label: &str) -> Result<QuasiNorm, String> {
    match label {
        "euclidean" => Ok(QuasiNorm::euclidean()),
        "koranyi" => Ok(QuasiNorm::koranyi()),
        _ => {
            let p = label
                .strip_prefix('p')
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| format!("unknown quasi-norm `{label}` (euclidean, koranyi or p<value>)"))?;
            QuasiNorm::p_family(p).map_err(|e| e.to_string())
        }
    }
}

/// Shipped defaults, else Korányi on Heisenberg-type groups, the Euclidean
/// norm for unit weights, and otherwise the p-norm with `p = 2·lcm(ν)` so
/// that every `|x_j|^{p/ν_j}` is an even power.
fn default_norms(id: &str, g: &GroupSpec) -> Vec<String> {
    if let Some((_, _, norms)) = SHIPPED_GROUPS.iter().find(|s| s.0 == id) {
        return norms.iter().map(|s| s.to_string()).collect();
    }
    if QuasiNorm::koranyi().check_compatible(g).is_ok() {
        return vec!["koranyi".into()];
    }
    if g.nu().iter().all(|v| *v == 1.0) {
        return vec!["euclidean".into()];
    }
    let ints: Option<Vec<u64>> = g
        .nu()
        .iter()
        .map(|v| (v.fract() == 0.0).then_some(*v as u64))
        .collect();
    let p = match ints {
        Some(v) => 2 * v.into_iter().fold(1, lcm),
        None => 2 * g.nu().iter().cloned().fold(1.0, f64::max).ceil() as u64,
    };
    vec![format!("p{p}")]
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}
