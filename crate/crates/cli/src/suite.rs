//! Fan-out of the configured checks and collection into a canonical report.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use hgcalc::field::{RadialField, RadialProfile, ScalarField};
use hgcalc::operators::{OperatorHandle, PmPairing};
use hgcalc::verify::*;
use hgcalc::{Error, GroupSpec, QuasiNorm};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ResolvedGroup, SuiteConfig};
use crate::error::CliError;

/// Attainment demanded of the sharpness search, as a relative gap to the
/// constant. Absent entries are searched and reported without a target.
fn sharpness_target(id: InequalityId, g: &GroupSpec) -> Option<f64> {
    match id {
        InequalityId::Hardy | InequalityId::EulerCorollary => Some(0.02),
        InequalityId::Ckn => Some(0.03),
        InequalityId::Hk if g.is_abelian() => Some(1e-6),
        InequalityId::Hk | InequalityId::Hpw => None,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub errored: usize,
}

impl Summary {
    pub fn of(checks: &[CheckReport]) -> Self {
        let mut s = Summary::default();
        for c in checks {
            match c.outcome() {
                Outcome::Pass => s.pass += 1,
                Outcome::Fail => s.fail += 1,
                Outcome::Skipped => s.skipped += 1,
                Outcome::Errored => s.errored += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.skipped + self.errored
    }

    pub fn ok(&self) -> bool {
        self.fail == 0 && self.errored == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub config: SuiteConfig,
    /// One row per check and subcheck, in canonical order.
    pub checks: Vec<CheckReport>,
    pub sharpness: Vec<SharpnessResult>,
    pub summary: Summary,
    /// Kept out of the serialized form so that reports are reproducible.
    #[serde(skip)]
    pub wall_time_s: f64,
    /// Seconds spent per `(group, check family)`, summed over workers.
    #[serde(skip)]
    pub busy_s: BTreeMap<(String, String), f64>,
}

impl SuiteReport {
    pub fn rows<'a>(&'a self, check_id: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
        self.checks.iter().filter(move |c| c.check_id == check_id)
    }

    pub fn busy_seconds(&self, group: &str, family: &str) -> f64 {
        self.busy_s.get(&(group.to_string(), family.to_string())).copied().unwrap_or(0.0)
    }
}

/// A resolved (group, quasi-norm) pair with its battery.
struct Pair {
    group: usize,
    label: String,
    qn: QuasiNorm,
    fields: std::result::Result<Vec<BatteryField<f64>>, String>,
}

enum Job<'a> {
    Group { group: usize, family: &'static str },
    Sharpness { group: usize, id: InequalityId, alpha: f64 },
    Pair { pair: &'a Pair, family: &'static str },
    Field { pair: &'a Pair, field: &'a BatteryField<f64>, family: &'static str },
    Incompatible { group: usize, label: &'a str, reason: &'a str, family: &'static str },
}

const GROUP_FAMILIES: &[&str] = &["structural"];
const PAIR_FAMILIES: &[&str] = &[
    "quasinorm_axioms",
    "polar_decomposition",
    "sphere_mass",
    "radial_operator",
    "pm_factorization",
    "commutator",
    "symmetry",
];
const FIELD_FAMILIES: &[&str] = &[
    "kennard",
    "heisenberg_kennard",
    "euler_pythagoras",
    "weighted_radial_identity",
    "rsrc",
    "symmetric_pair",
    "hardy",
    "hardy_r",
    "ckn",
    "hpw",
    "hpw_euclidean",
];

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, CliError> {
    let resolved = cfg.resolve()?;
    let threads = cfg
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let start = Instant::now();
    let out = pool.install(|| run_resolved(cfg, &resolved.groups, &resolved.fields, &resolved.checks));
    let (mut checks, mut sharpness, busy) = out;
    checks.sort_by(|a, b| (&a.check_id, a.params.sort_key()).cmp(&(&b.check_id, b.params.sort_key())));
    sharpness.sort_by(|a, b| {
        (&a.group, a.inequality_id.label(), a.diagnostics.get("alpha").map(|v| v.to_bits()))
            .cmp(&(&b.group, b.inequality_id.label(), b.diagnostics.get("alpha").map(|v| v.to_bits())))
    });
    let mut echo = cfg.clone();
    echo.threads = None;
    Ok(SuiteReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: echo,
        summary: Summary::of(&checks),
        checks,
        sharpness,
        wall_time_s: start.elapsed().as_secs_f64(),
        busy_s: busy,
    })
}

type Collected = (Vec<CheckReport>, Vec<SharpnessResult>, BTreeMap<(String, String), f64>);

fn run_resolved(cfg: &SuiteConfig, groups: &[ResolvedGroup], field_ids: &[String], checks: &[&'static str]) -> Collected {
    let wants = |f: &str| checks.contains(&f);
    let pairs: Vec<Pair> = groups
        .iter()
        .enumerate()
        .flat_map(|(gi, rg)| {
            rg.norms.iter().filter_map(move |(label, status)| {
                status.as_ref().ok().map(|qn| (gi, label.clone(), *qn))
            })
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(gi, label, qn)| {
            let g = groups[gi].group.as_ref();
            let fields = battery(g, qn, &cfg.resolution)
                .map(|b| b.into_iter().filter(|f| field_ids.contains(&f.id())).collect())
                .map_err(|e| e.to_string());
            Pair { group: gi, label, qn, fields }
        })
        .collect();

    let mut jobs = Vec::new();
    for (gi, rg) in groups.iter().enumerate() {
        for family in GROUP_FAMILIES.iter().filter(|f| wants(f)) {
            jobs.push(Job::Group { group: gi, family });
        }
        if wants("sharpness") {
            for id in InequalityId::ALL {
                let alphas: &[f64] = if id == InequalityId::Ckn { &cfg.ckn_alphas } else { &[0.0] };
                for &alpha in alphas {
                    jobs.push(Job::Sharpness { group: gi, id, alpha });
                }
            }
        }
        for (label, status) in &rg.norms {
            if let Err(reason) = status {
                for family in PAIR_FAMILIES.iter().chain(FIELD_FAMILIES).filter(|f| wants(f)) {
                    jobs.push(Job::Incompatible { group: gi, label, reason, family });
                }
            }
        }
    }
    for pair in &pairs {
        for family in PAIR_FAMILIES.iter().filter(|f| wants(f)) {
            jobs.push(Job::Pair { pair, family });
        }
        match &pair.fields {
            Ok(fields) => {
                for field in fields {
                    for family in FIELD_FAMILIES.iter().filter(|f| wants(f)) {
                        jobs.push(Job::Field { pair, field, family });
                    }
                }
            }
            Err(_) => {
                for family in FIELD_FAMILIES.iter().filter(|f| wants(f)) {
                    jobs.push(Job::Pair { pair, family });
                }
            }
        }
    }

    let results: Vec<(Vec<CheckReport>, Option<SharpnessResult>, (String, String), f64)> = jobs
        .par_iter()
        .map(|job| {
            let t = Instant::now();
            let (rows, sharp, key) = run_job(cfg, groups, job);
            (rows, sharp, key, t.elapsed().as_secs_f64())
        })
        .collect();

    let mut checks = Vec::new();
    let mut sharpness = Vec::new();
    let mut busy = BTreeMap::new();
    for (rows, sharp, key, secs) in results {
        checks.extend(rows.into_iter().flat_map(CheckReport::flatten));
        sharpness.extend(sharp);
        *busy.entry(key).or_insert(0.0) += secs;
    }
    (checks, sharpness, busy)
}

/// `x1*odd_gauss` and similar decorated ids map back to the battery id.
fn params(g: &GroupSpec, qn: Option<&str>) -> CheckParams {
    let p = CheckParams::new(g.name(), g.homogeneous_dimension());
    match qn {
        Some(l) => p.quasinorm(l),
        None => p,
    }
}

/// Maps a failed check to a skipped row when the combination does not
/// apply and to an errored row otherwise.
fn failure(family: &str, p: CheckParams, e: &Error) -> CheckReport {
    let stmt = statement(family).unwrap_or("");
    match e {
        Error::PreconditionViolation(m) | Error::InvalidField(m) => CheckReport::skipped(family, stmt, p, m.clone()),
        other => CheckReport::errored(family, stmt, p, other),
    }
}

fn tag(mut r: CheckReport, label: &str) -> CheckReport {
    r.params.quasinorm = Some(label.to_string());
    r.subchecks = r.subchecks.into_iter().map(|s| tag(s, label)).collect();
    r
}

fn run_job(
    cfg: &SuiteConfig,
    groups: &[ResolvedGroup],
    job: &Job,
) -> (Vec<CheckReport>, Option<SharpnessResult>, (String, String)) {
    let tol = &cfg.tolerances;
    match job {
        Job::Group { group, family } => {
            let g = groups[*group].group.as_ref();
            let rows = check_structural(g, cfg.samples, cfg.seed, tol)
                .unwrap_or_else(|e| vec![failure(family, params(g, None), &e)]);
            (rows, None, (g.name().to_string(), family.to_string()))
        }
        Job::Sharpness { group, id, alpha } => {
            let g = groups[*group].group.as_ref();
            let key = (g.name().to_string(), "sharpness".to_string());
            let check_id = format!("sharpness.{}", id.label());
            let mut p = params(g, None);
            if *id == InequalityId::Ckn {
                p = p.alpha(*alpha);
            }
            let opts = SharpnessOptions {
                budget: cfg.sharpness_budget,
                alpha: *alpha,
                ..Default::default()
            };
            match sharpness_search(*id, g, None, &opts) {
                Ok(mut r) => {
                    if *id == InequalityId::Ckn {
                        r.diagnostics.insert("alpha".into(), *alpha);
                    }
                    let rows = vec![sharpness_report(&check_id, p, &r, sharpness_target(*id, g), tol)];
                    (rows, Some(r), key)
                }
                Err(e) => {
                    let mut row = failure("sharpness", p, &e);
                    row.check_id = check_id;
                    (vec![row], None, key)
                }
            }
        }
        Job::Incompatible { group, label, reason, family } => {
            let g = groups[*group].group.as_ref();
            let stmt = statement(family).unwrap_or("");
            let row = CheckReport::skipped(family, stmt, params(g, Some(label)), reason.to_string());
            (vec![row], None, (g.name().to_string(), family.to_string()))
        }
        Job::Pair { pair, family } => {
            let g = &groups[pair.group].group;
            let key = (g.name().to_string(), family.to_string());
            let p = params(g, Some(&pair.label));
            let rows = match &pair.fields {
                Err(e) => vec![CheckReport::errored(family, statement(family).unwrap_or(""), p, e)],
                Ok(fields) => match pair_family(cfg, g, pair, fields, family) {
                    Ok(rows) => rows,
                    Err(e) => vec![failure(family, p, &e)],
                },
            };
            (rows.into_iter().map(|r| tag(r, &pair.label)).collect(), None, key)
        }
        Job::Field { pair, field, family } => {
            let g = &groups[pair.group].group;
            let key = (g.name().to_string(), family.to_string());
            let rows = match field_family(cfg, g, pair, field, family) {
                Ok(rows) => rows,
                Err(e) => {
                    let p = params(g, Some(&pair.label)).field(field.id());
                    if *family == "ckn" {
                        cfg.ckn_alphas.iter().map(|a| failure(family, p.clone().alpha(*a), &e)).collect()
                    } else {
                        vec![failure(family, p, &e)]
                    }
                }
            };
            (rows.into_iter().map(|r| tag(r, &pair.label)).collect(), None, key)
        }
    }
}

fn sharpness_report(check_id: &str, p: CheckParams, r: &SharpnessResult, target: Option<f64>, tol: &Tolerances) -> CheckReport {
    let p = p.variant(r.family.name());
    let mut main = CheckReport::inequality(
        check_id,
        "best ratio ≤ C",
        p.clone(),
        r.best_ratio,
        r.constant_paper,
        tol.inequality,
    );
    main.diag("constant", r.constant_paper);
    main.diag("best_ratio", r.best_ratio);
    main.diag("attainment", r.attainment());
    main.diag("evaluations", r.evaluations);
    main.diag("converged", r.converged);
    main.diag("trace_monotone", r.trace_is_monotone());
    for (k, v) in &r.best_params {
        main.diag(&format!("param_{k}"), *v);
    }
    for (k, v) in &r.diagnostics {
        main.diag(k, *v);
    }
    match target {
        Some(gap) => {
            let mut sub = CheckReport::inequality(
                &format!("{check_id}.attainment"),
                "(1 − gap)·C ≤ best ratio",
                p,
                (1.0 - gap) * r.constant_paper,
                r.best_ratio,
                tol.inequality,
            );
            sub.diag("gap", gap);
            main.with_sub(sub)
        }
        None => main,
    }
}

fn probe_field(g: &GroupSpec, qn: QuasiNorm) -> Arc<dyn ScalarField<f64>> {
    Arc::new(RadialField::new(g, qn, RadialProfile::gaussian(1.0, decay_exponent(&qn))).named("probe_gauss"))
}

fn pair_family(
    cfg: &SuiteConfig,
    g: &Arc<GroupSpec>,
    pair: &Pair,
    fields: &[BatteryField<f64>],
    family: &str,
) -> hgcalc::Result<Vec<CheckReport>> {
    let tol = &cfg.tolerances;
    let qn = pair.qn;
    let seed = cfg.seed.wrapping_add(pair.group as u64);
    let points = || shell_points(g, &qn, cfg.samples, seed, 0.4, 2.5);
    Ok(match family {
        "quasinorm_axioms" => check_quasinorm_axioms(g, &qn, cfg.samples, seed, tol)?,
        "polar_decomposition" => {
            let ps = cfg.polar.scheme(g, qn)?;
            check_polar(&ps, g, &qn, fields, tol)?
        }
        "sphere_mass" => {
            let ps = cfg.polar.scheme(g, qn)?;
            match check_sphere_mass(&ps, g, &qn, tol) {
                Some(r) => vec![r],
                None => {
                    return Err(Error::PreconditionViolation(
                        "closed-form sphere mass needs the Euclidean norm on ℝⁿ with unit weights".into(),
                    ))
                }
            }
        }
        "radial_operator" => vec![check_radial_operator(g, &qn, probe_field(g, qn).as_ref(), &points(), tol)?],
        "pm_factorization" => {
            vec![check_pm_factorization(g, PmPairing::canonical(g), probe_field(g, qn).as_ref(), &points(), tol)?]
        }
        "commutator" => vec![check_commutator(g.clone(), qn, probe_field(g, qn), &points(), tol)?],
        "symmetry" => {
            let annulus: Vec<&BatteryField<f64>> = fields.iter().filter(|f| f.vanishes_near_origin()).collect();
            if annulus.len() < 2 {
                return Err(Error::PreconditionViolation("needs two annulus fields in the selection".into()));
            }
            check_symmetry(&annulus[0].scheme, g, &qn, annulus[0].field.as_ref(), annulus[1].field.as_ref(), tol)?
        }
        other => unreachable!("not a pair-level family: {other}"),
    })
}

fn field_family(
    cfg: &SuiteConfig,
    g: &Arc<GroupSpec>,
    pair: &Pair,
    bf: &BatteryField<f64>,
    family: &str,
) -> hgcalc::Result<Vec<CheckReport>> {
    let tol = &cfg.tolerances;
    let (q, f, qn) = (&bf.scheme, bf.field.as_ref(), &pair.qn);
    let pairing = PmPairing::canonical(g);
    Ok(match family {
        "kennard" => vec![check_kennard(q, g, pairing, f, tol)?],
        "heisenberg_kennard" => vec![check_heisenberg_kennard(q, g, pairing, f, tol)?],
        "euler_pythagoras" => vec![check_euler_pythagoras(q, g, f, tol)?],
        "weighted_radial_identity" => {
            let alphas = cfg.alphas.clone().unwrap_or_else(|| alpha_grid(g.homogeneous_dimension()));
            check_weighted_radial_identity(q, g, qn, f, &alphas, tol)?
        }
        "rsrc" => vec![check_rsrc(q, g, qn, f, tol)?],
        "symmetric_pair" => {
            if !bf.vanishes_near_origin() {
                return Err(Error::InvalidField(format!("{} does not vanish near the origin", bf.id())));
            }
            let a = OperatorHandle::dilation_generator(g.clone(), *qn)?;
            let b = OperatorHandle::coulomb(g.clone(), *qn)?;
            vec![check_symmetric_pair_identity(q, &a, &b, bf.field.clone(), tol)?]
        }
        "hardy" => vec![check_hardy(q, g, qn, f, tol)?],
        "hardy_r" => vec![check_hardy_r(q, g, f, tol)?],
        "ckn" => {
            euclidean_mode(g)?;
            let mut out = Vec::new();
            for &alpha in &cfg.ckn_alphas {
                out.push(match check_ckn(q, g, f, alpha, tol) {
                    Ok(r) => r,
                    Err(e) => failure("ckn", params(g, Some(&pair.label)).field(f.id()).alpha(alpha), &e),
                });
            }
            out
        }
        "hpw" => vec![check_hpw(q, g, qn, f, tol)?],
        "hpw_euclidean" => vec![check_hpw_euclidean(q, g, f, tol)?],
        other => unreachable!("not a field-level family: {other}"),
    })
}
