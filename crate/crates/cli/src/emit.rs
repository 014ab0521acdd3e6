use std::fmt::Write as _;
use std::path::Path;

use hgcalc::verify::{CheckReport, Outcome, Value};

use crate::config::Format;
use crate::error::CliError;
use crate::suite::SuiteReport;

pub fn emit_report(r: &SuiteReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => to_json(r),
        Format::Csv => to_csv(r),
        Format::Markdown => Ok(to_markdown(r)),
    }
}

pub fn write_report(r: &SuiteReport, format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let doc = emit_report(r, format)?;
    match path {
        Some(p) => std::fs::write(p, doc).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

pub fn to_json(r: &SuiteReport) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(r).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<SuiteReport, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::config("report", e.to_string()))
}

pub const CSV_HEADER: [&str; 22] = [
    "check_id",
    "group",
    "quasinorm",
    "field",
    "alpha",
    "variant",
    "Q",
    "kind",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "abs_residual",
    "rel_residual",
    "slack",
    "tolerance",
    "pass",
    "outcome",
    "skipped_reason",
    "error",
    "relation",
    "diagnostics",
];

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn parts(v: Option<Value>) -> (String, String) {
    match v {
        None => (String::new(), String::new()),
        Some(Value::Real(x)) => (format!("{x:e}"), String::new()),
        Some(Value::Complex { re, im }) => (format!("{re:e}"), format!("{im:e}")),
    }
}

fn outcome(c: &CheckReport) -> &'static str {
    match c.outcome() {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Skipped => "skipped",
        Outcome::Errored => "errored",
    }
}

pub fn to_csv(r: &SuiteReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(CSV_HEADER).map_err(err)?;
    for c in &r.checks {
        let p = &c.params;
        let (lr, li) = parts(c.lhs);
        let (rr, ri) = parts(c.rhs);
        let diag = if c.diagnostics.is_empty() {
            String::new()
        } else {
            serde_json::to_string(&c.diagnostics).map_err(|e| CliError::Internal(e.to_string()))?
        };
        w.write_record([
            c.check_id.as_str(),
            &p.group,
            p.quasinorm.as_deref().unwrap_or(""),
            p.field.as_deref().unwrap_or(""),
            &p.alpha.map(|a| a.to_string()).unwrap_or_default(),
            p.variant.as_deref().unwrap_or(""),
            &p.q.to_string(),
            match c.kind {
                hgcalc::verify::CheckKind::Identity => "identity",
                hgcalc::verify::CheckKind::Inequality => "inequality",
            },
            &lr,
            &li,
            &rr,
            &ri,
            &num(c.abs_residual),
            &num(c.rel_residual),
            &num(c.slack),
            &format!("{:e}", c.tolerance),
            if c.pass { "true" } else { "false" },
            outcome(c),
            c.skipped_reason.as_deref().unwrap_or(""),
            c.error.as_deref().unwrap_or(""),
            &c.paper_ref,
            &diag,
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn short(v: Option<Value>) -> String {
    match v {
        None => "–".into(),
        Some(Value::Real(x)) => format!("{x:.6e}"),
        Some(Value::Complex { re, im }) => format!("{re:.6e}{im:+.2e}i"),
    }
}

pub fn to_markdown(r: &SuiteReport) -> String {
    let mut s = String::new();
    let m = &r.summary;
    let _ = writeln!(s, "# hgcalc verification report\n");
    let _ = writeln!(s, "version {}\n", r.version);
    let _ = writeln!(
        s,
        "**{} pass, {} fail, {} skipped, {} errored** of {} checks; wall time {:.1} s\n",
        m.pass,
        m.fail,
        m.skipped,
        m.errored,
        m.total(),
        r.wall_time_s
    );
    let _ = writeln!(s, "| check | group | quasi-norm | field | α | variant | lhs | rhs | rel. residual | outcome | relation |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|---|---|---|---|");
    for c in &r.checks {
        let p = &c.params;
        let status = match c.outcome() {
            Outcome::Skipped => format!("skipped: {}", c.skipped_reason.as_deref().unwrap_or("")),
            Outcome::Errored => format!("errored: {}", c.error.as_deref().unwrap_or("")),
            _ => outcome(c).to_string(),
        };
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            cell(&c.check_id),
            cell(&p.group),
            cell(p.quasinorm.as_deref().unwrap_or("")),
            cell(p.field.as_deref().unwrap_or("")),
            p.alpha.map(|a| a.to_string()).unwrap_or_default(),
            cell(p.variant.as_deref().unwrap_or("")),
            short(c.lhs),
            short(c.rhs),
            c.rel_residual.map(|v| format!("{v:.2e}")).unwrap_or_else(|| "–".into()),
            cell(&status),
            cell(&c.paper_ref),
        );
    }
    if !r.sharpness.is_empty() {
        let _ = writeln!(s, "\n## Sharpness searches\n");
        let _ = writeln!(s, "| inequality | group | family | constant | best ratio | attainment | evaluations | converged |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
        for h in &r.sharpness {
            let alpha = h.diagnostics.get("alpha").map(|a| format!(" (α = {a})")).unwrap_or_default();
            let _ = writeln!(
                s,
                "| {}{} | {} | {} | {:.6} | {:.6} | {:.4} | {} | {} |",
                h.inequality_id.label(),
                alpha,
                cell(&h.group),
                h.family.name(),
                h.constant_paper,
                h.best_ratio,
                h.attainment(),
                h.evaluations,
                if h.converged { "yes" } else { "unconverged" },
            );
        }
    }
    s
}
