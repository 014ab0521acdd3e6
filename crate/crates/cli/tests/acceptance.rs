//! Runs the default suite once, single-threaded, and prints one line per
//! acceptance criterion. Exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::process::ExitCode;

use hgcalc::verify::{CheckReport, InequalityId, Outcome, SharpnessResult};
use hgcalc_cli::{run_suite, SuiteConfig, SuiteReport};

const ANNULUS: [&str; 3] = ["annulus_gauss", "annulus_power", "annulus_osc"];
const MAIN_GROUPS: [&str; 3] = ["r3_isotropic", "r3_aniso", "heisenberg"];
const QN_FREE: [&str; 4] = ["gauss", "gauss_aniso", "gauss_phase", "odd_gauss"];

struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { failures: Vec::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn re(v: Option<hgcalc::verify::Value>) -> f64 {
    v.map(|v| v.to_complex().re).unwrap_or(f64::NAN)
}

fn tag(c: &CheckReport) -> String {
    let p = &c.params;
    let mut s = format!("{} on {}", c.check_id, p.group);
    if let Some(q) = &p.quasinorm {
        s += &format!("/{q}");
    }
    if let Some(f) = &p.field {
        s += &format!("/{f}");
    }
    if let Some(a) = p.alpha {
        s += &format!(" α={a}");
    }
    s
}

struct View<'a> {
    r: &'a SuiteReport,
}

impl<'a> View<'a> {
    fn rows(&self, id: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
        self.r.checks.iter().filter(move |c| c.check_id == id)
    }

    fn evaluated(&self, id: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
        self.rows(id).filter(|c| c.outcome() != Outcome::Skipped)
    }

    fn in_group(&self, id: &'a str, group: &'a str) -> impl Iterator<Item = &'a CheckReport> + 'a {
        self.evaluated(id).filter(move |c| c.params.group == group)
    }

    fn one(&self, id: &'a str, group: &str, qn: &str, field: &str) -> Option<&'a CheckReport> {
        self.rows(id).find(|c| {
            c.params.group == group && c.params.quasinorm.as_deref() == Some(qn) && c.params.field.as_deref() == Some(field)
        })
    }

    fn sharpness(&self, id: InequalityId) -> impl Iterator<Item = &'a SharpnessResult> + 'a {
        self.r.sharpness.iter().filter(move |s| s.inequality_id == id)
    }

    fn pairs(&self, group: &str) -> BTreeSet<String> {
        self.r
            .checks
            .iter()
            .filter(|c| c.params.group == group)
            .filter_map(|c| c.params.quasinorm.clone())
            .collect()
    }
}

/// Every (group, quasi-norm) pair of `group` has all `fields` evaluated for
/// `id`, each satisfying `ok`.
fn battery_rows(v: &mut Verdict, w: &View, id: &str, group: &str, fields: &[&str], ok: impl Fn(&CheckReport) -> bool, what: &str) {
    for qn in w.pairs(group) {
        for f in fields {
            match w.one(id, group, &qn, f) {
                Some(c) if c.outcome() == Outcome::Skipped || c.outcome() == Outcome::Errored => {
                    v.require(false, || format!("{} not evaluated", tag(c)))
                }
                Some(c) => v.require(ok(c), || format!("{}: {what} (rel {:?}, slack {:?})", tag(c), c.rel_residual, c.slack)),
                None => v.require(false, || format!("{id} on {group}/{qn}/{f} missing")),
            }
        }
    }
}

fn all_fields() -> Vec<&'static str> {
    hgcalc::verify::BATTERY_IDS.to_vec()
}

fn c1(w: &View, v: &mut Verdict) {
    for g in MAIN_GROUPS {
        battery_rows(v, w, "kennard", g, &all_fields(), |c| c.rel_residual.is_some_and(|r| r <= 1e-6), "rel_residual > 1e-6");
        let t = w.r.busy_seconds(g, "kennard");
        v.require(t <= 60.0, || format!("{g}: kennard took {t:.1} s"));
        v.note(format!("{g} {t:.1}s"));
    }
    let c = w.one("kennard", "r3_isotropic", "euclidean", "gauss").expect("gaussian row");
    let closed = 3.0 * PI.powf(1.5);
    let (l, r) = (re(c.lhs), re(c.rhs));
    v.require(rel(l, closed) <= 1e-8 && rel(r, closed) <= 1e-8, || format!("gaussian sum {l} / {r} vs {closed}"));
    let plus = c.diag_f64("plus_norm_sq").unwrap_or(f64::NAN);
    v.require(plus.abs() <= 1e-8, || format!("‖𝒫f+iℳf‖² = {plus}"));
}

fn c2(w: &View, v: &mut Verdict) {
    let c = w.one("kennard", "r3_isotropic", "euclidean", "gauss").expect("gaussian row");
    let minus = c.diag_f64("minus_variant_rel_residual").unwrap_or(f64::NAN);
    let plus = c.rel_residual.unwrap_or(f64::NAN);
    v.require(minus >= 0.5, || format!("minus variant residual {minus}"));
    v.require(plus <= 1e-8, || format!("plus variant residual {plus}"));
    v.note(format!("minus {minus:.4}, plus {plus:.1e}"));
}

fn c3(w: &View, v: &mut Verdict) {
    for g in MAIN_GROUPS {
        battery_rows(v, w, "kennard.proof_identity", g, &all_fields(), |c| c.rel_residual.is_some_and(|r| r <= 1e-6), "rel_residual > 1e-6");
    }
}

fn c4(w: &View, v: &mut Verdict) {
    let c = w.one("heisenberg_kennard", "r3_isotropic", "euclidean", "gauss").expect("gaussian row");
    let closed = 1.5 * PI.powf(1.5);
    let (l, r) = (re(c.lhs), re(c.rhs));
    v.require(rel(l, closed) <= 1e-8 && rel(r, closed) <= 1e-8, || format!("{l} / {r} vs {closed}"));
    let mut n = 0;
    for c in w.evaluated("heisenberg_kennard") {
        n += 1;
        v.require(c.slack.is_some_and(|s| s >= -1e-8), || format!("{}: slack {:?}", tag(c), c.slack));
    }
    v.require(n > 0, || "no rows".into());
}

fn c5(w: &View, v: &mut Verdict) {
    let mut qs = BTreeSet::new();
    for c in w.evaluated("weighted_radial_identity") {
        v.require(c.rel_residual.is_some_and(|r| r <= 1e-6), || format!("{}: rel {:?}", tag(c), c.rel_residual));
    }
    let groups: BTreeSet<String> = w.rows("weighted_radial_identity").map(|c| c.params.group.clone()).collect();
    for g in &groups {
        for qn in w.pairs(g) {
            for f in ANNULUS {
                let rows: Vec<_> = w
                    .evaluated("weighted_radial_identity")
                    .filter(|c| &c.params.group == g && c.params.quasinorm.as_deref() == Some(&qn) && c.params.field.as_deref() == Some(f))
                    .collect();
                let Some(q) = rows.first().map(|c| c.params.q) else {
                    v.require(false, || format!("{g}/{qn}/{f}: no rows"));
                    continue;
                };
                qs.insert((q * 2.0).round() as i64);
                let have: Vec<f64> = rows.iter().filter_map(|c| c.params.alpha).collect();
                for a in [-2.0, -1.0, -0.5, 0.0, (q - 2.0) / 2.0, 1.0, 2.0] {
                    v.require(have.iter().any(|h| (h - a).abs() < 1e-12), || format!("{g}/{qn}/{f}: α = {a} missing"));
                }
            }
        }
    }
    for q in [3, 4, 6] {
        v.require(qs.contains(&(2 * q)), || format!("no pair with Q = {q}"));
    }
}

fn c6(w: &View, v: &mut Verdict) {
    let mut found = BTreeMap::new();
    for s in w.sharpness(InequalityId::Hardy) {
        let k = s.constant_paper;
        let a = s.attainment();
        v.require((0.98..=1.0 + 1e-12).contains(&a), || format!("{}: attainment {a}", s.group));
        v.require(s.evaluations <= 500, || format!("{}: {} evaluations", s.group, s.evaluations));
        found.insert(s.group.clone(), (k, a));
    }
    for want in [3.0, 4.0, 6.0] {
        let c = 2.0 / (want - 2.0);
        v.require(found.values().any(|(k, _)| rel(*k, c) < 1e-12), || format!("no Hardy search with Q = {want}"));
    }
    for (g, (_, a)) in &found {
        v.note(format!("{g} {a:.4}"));
    }
    for c in w.evaluated("hardy") {
        v.require(c.slack.is_some_and(|s| s >= -1e-8), || format!("{}: slack {:?}", tag(c), c.slack));
    }
}

fn c7(w: &View, v: &mut Verdict) {
    for alpha in [-1.0, 0.0, 1.0] {
        let rows: Vec<_> = w
            .in_group("ckn", "r3_isotropic")
            .filter(|c| c.params.alpha == Some(alpha) && c.params.quasinorm.as_deref() == Some("euclidean"))
            .collect();
        v.require(rows.len() == ANNULUS.len(), || format!("α = {alpha}: {} evaluated rows", rows.len()));
        for c in rows {
            v.require(c.pass && c.slack.is_some_and(|s| s >= -1e-8), || format!("{}: slack {:?}", tag(c), c.slack));
        }
        let s = w
            .sharpness(InequalityId::Ckn)
            .find(|s| s.diagnostics.get("alpha") == Some(&alpha));
        match s {
            Some(s) => {
                let att = s.attainment();
                v.require(att >= 0.97, || format!("α = {alpha}: attainment {att}"));
                v.note(format!("α={alpha} {att:.4}"));
            }
            None => v.require(false, || format!("α = {alpha}: no sharpness search")),
        }
    }
}

fn c8(w: &View, v: &mut Verdict) {
    let c = w.one("hpw_euclidean", "r3_isotropic", "euclidean", "gauss").expect("gaussian row");
    let (l, r) = (re(c.lhs), re(c.rhs));
    v.require(rel(l, PI.powi(3)) <= 1e-8, || format!("‖f‖⁴ = {l}"));
    v.require(rel(r, 9.0 * PI.powi(3)) <= 1e-8, || format!("rhs = {r}"));
    let mut n = 0;
    for id in ["hpw", "hpw.chain_hardy", "hpw.chain_holder", "hpw_euclidean"] {
        for c in w.evaluated(id) {
            n += 1;
            v.require(c.slack.is_some_and(|s| s >= 0.0), || format!("{}: slack {:?}", tag(c), c.slack));
        }
    }
    v.require(n > 0, || "no chain rows".into());
}

fn c9(w: &View, v: &mut Verdict) {
    let c = w.one("euler_pythagoras", "r3_isotropic", "euclidean", "gauss").expect("gaussian row");
    let (l, r) = (re(c.lhs), re(c.rhs));
    let e = 15.0 / 4.0 * PI.powf(1.5);
    let parts = (9.0 / 4.0 + 6.0 / 4.0) * PI.powf(1.5);
    v.require(rel(l, e) <= 1e-8 && rel(r, parts) <= 1e-8, || format!("{l} / {r}"));
    let mut compared = 0;
    for g in ["r3_isotropic", "r3_aniso"] {
        let qns: Vec<String> = w.pairs(g).into_iter().collect();
        for f in QN_FREE {
            for id in ["euler_pythagoras", "euler_pythagoras.corollary"] {
                let vals: Vec<(f64, f64)> = qns
                    .iter()
                    .filter_map(|q| w.one(id, g, q, f))
                    .map(|c| (re(c.lhs), re(c.rhs)))
                    .collect();
                for pair in vals.windows(2) {
                    compared += 1;
                    let (a, b) = (pair[0], pair[1]);
                    v.require(rel(a.0, b.0) <= 1e-9 && rel(a.1, b.1) <= 1e-9, || format!("{id} on {g}/{f}: {a:?} vs {b:?}"));
                }
            }
        }
    }
    v.require(compared > 0, || "nothing compared across quasi-norms".into());
}

fn c10(w: &View, v: &mut Verdict) {
    let groups: BTreeSet<String> = w.evaluated("commutator").map(|c| c.params.group.clone()).collect();
    v.require(groups.len() >= MAIN_GROUPS.len(), || format!("commutator ran on {groups:?}"));
    for c in w.evaluated("commutator") {
        let m = c.diag_f64("max_abs_residual").unwrap_or(f64::NAN);
        let pts = c.diag_f64("points").unwrap_or(0.0);
        v.require(m <= 1e-7 && pts >= 100.0, || format!("{}: {m} at {pts} points", tag(c)));
    }
    for id in ["symmetry.dilation_generator", "symmetry.coulomb"] {
        for c in w.evaluated(id) {
            v.require(c.rel_residual.is_some_and(|r| r <= 1e-7), || format!("{}: rel {:?}", tag(c), c.rel_residual));
        }
    }
    for c in w.evaluated("symmetry.radial_control") {
        let r = re(c.rhs);
        v.require(c.pass && r >= 1e-2, || format!("{}: control residual {r}", tag(c)));
    }
}

fn c11(w: &View, v: &mut Verdict) {
    let groups: BTreeSet<String> = w.evaluated("symmetric_pair").map(|c| c.params.group.clone()).collect();
    for g in &groups {
        battery_rows(v, w, "symmetric_pair", g, &ANNULUS, |c| c.rel_residual.is_some_and(|r| r <= 1e-6), "rel_residual > 1e-6");
    }
    v.require(!groups.is_empty(), || "no rows".into());
}

fn c12(w: &View, v: &mut Verdict) {
    for id in ["rsrc", "rsrc.rsc"] {
        for c in w.evaluated(id) {
            v.require(c.rel_residual.is_some_and(|r| r <= 1e-6), || format!("{}: rel {:?}", tag(c), c.rel_residual));
        }
    }
    let mut n = 0;
    for c in w.evaluated("rsrc.zero_coefficient") {
        n += 1;
        v.require(c.params.q == 3.0 && c.rel_residual.is_some_and(|r| r <= 1e-6), || format!("{}: rel {:?}", tag(c), c.rel_residual));
    }
    v.require(n > 0, || "no Q = 3 rows".into());
    // The dilation bound is an equality when Q = 3, so its slack sits at
    // rounding level; the inequality tolerance is the floor.
    for id in ["rsrc.coulomb_bound", "rsrc.dilation_bound", "rsrc.relative_bound"] {
        let mut n = 0;
        for c in w.evaluated(id) {
            n += 1;
            v.require(c.pass && c.slack.is_some_and(|s| s >= -c.tolerance), || format!("{}: slack {:?}", tag(c), c.slack));
        }
        v.require(n > 0, || format!("{id}: no rows"));
    }
}

fn c13(w: &View, v: &mut Verdict) {
    let mut pairs = 0;
    for c in w.rows("polar_decomposition") {
        v.require(c.outcome() == Outcome::Pass && c.rel_residual.is_some_and(|r| r <= 1e-6), || {
            format!("{}: {:?} rel {:?}", tag(c), c.outcome(), c.rel_residual)
        });
        pairs += 1;
    }
    v.require(pairs > 0, || "no polar rows".into());
    let s = w
        .rows("sphere_mass")
        .find(|c| c.params.group == "r3_isotropic" && c.params.quasinorm.as_deref() == Some("euclidean"));
    match s {
        Some(c) => {
            let m = re(c.lhs);
            v.require((m - 4.0 * PI).abs() <= 1e-6, || format!("sphere mass {m}"));
        }
        None => v.require(false, || "no sphere mass row".into()),
    }
}

fn c14(w: &View, v: &mut Verdict) {
    let families = [
        "structural.automorphism",
        "structural.frame_homogeneity",
        "structural.exp_roundtrip",
        "structural.frame_change",
        "quasinorm.homogeneity",
        "quasinorm.positivity",
        "quasinorm.symmetry",
    ];
    for id in families {
        let rows: Vec<_> = w.rows(id).collect();
        v.require(!rows.is_empty(), || format!("{id}: no rows"));
        for c in rows {
            v.require(c.outcome() == Outcome::Pass, || format!("{}: {:?}", tag(c), c.outcome()));
        }
    }
    for c in w.r.checks.iter().filter(|c| c.check_id.starts_with("structural.")) {
        v.require(c.pass, || format!("{} failed", tag(c)));
    }
    let t = w.r.wall_time_s;
    v.require(t <= 600.0, || format!("suite took {t:.0} s"));
    v.note(format!("suite {t:.0}s on 1 thread"));
}

fn main() -> ExitCode {
    let cfg = SuiteConfig {
        threads: Some(1),
        ..Default::default()
    };
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: suite did not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let w = View { r: &report };
    let criteria: [(&str, fn(&View, &mut Verdict)); 14] = [
        ("kennard identity on the battery", c1),
        ("sign diagnosis of the minus variant", c2),
        ("integral identity behind the Kennard bound", c3),
        ("Heisenberg–Kennard equality at the Gaussian", c4),
        ("weighted radial identity over the α grid", c5),
        ("Hardy inequality and sharpness", c6),
        ("CKN inequality and sharpness", c7),
        ("HPW closed form and proof chain", c8),
        ("Euler Pythagoras and quasi-norm invariance", c9),
        ("commutator, symmetry and negative control", c10),
        ("abstract identity for the dilation/Coulomb pair", c11),
        ("RsRC/RsC identities and corollary bounds", c12),
        ("polar decomposition and sphere mass", c13),
        ("structural invariants and suite runtime", c14),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let mut v = Verdict::new();
        check(&w, &mut v);
        let status = if v.failures.is_empty() { "PASS" } else { "FAIL" };
        let notes = if v.notes.is_empty() { String::new() } else { format!(" [{}]", v.notes.join("; ")) };
        println!("criterion {:>2}: {status} {name}{notes}", i + 1);
        for f in v.failures.iter().take(5) {
            println!("    {f}");
        }
        if v.failures.len() > 5 {
            println!("    … {} more", v.failures.len() - 5);
        }
        failed += usize::from(!v.failures.is_empty());
    }
    let s = &report.summary;
    println!(
        "suite: {} pass, {} fail, {} skipped, {} errored; {} of 14 criteria pass",
        s.pass,
        s.fail,
        s.skipped,
        s.errored,
        14 - failed
    );
    if failed == 0 && s.ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
