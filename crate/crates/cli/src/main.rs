use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hgcalc::verify::{
    default_family, sharpness_search, Family, InequalityId, SharpnessOptions, Tolerances, BATTERY_IDS, CATALOG,
};
use hgcalc_cli::config::{parse_group, parse_quasinorm};
use hgcalc_cli::{exit_code, run_suite, write_report, CliError, Format, SuiteConfig, SHIPPED_GROUPS};

#[derive(Parser)]
#[command(name = "hgcalc", version, about = "Verify uncertainty identities and Hardy-type inequalities on homogeneous groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show the available groups, quasi-norms, fields and checks.
    List,
    /// Run the verification suite.
    Run(RunArgs),
    /// Search for the sharp constant of one inequality.
    Sharpness(SharpArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with a suite configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "group")]
    groups: Vec<String>,
    #[arg(long = "quasinorm")]
    quasinorms: Vec<String>,
    #[arg(long = "field")]
    fields: Vec<String>,
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Tolerance override, `name=value` with name one of identity,
    /// identity_fd, inequality, pointwise, structural.
    #[arg(long = "tol", value_parser = parse_tol)]
    tols: Vec<(String, f64)>,
    /// `α` grid of the weighted radial identity.
    #[arg(long = "alpha", allow_negative_numbers = true)]
    alphas: Vec<f64>,
    #[arg(long = "ckn-alpha", allow_negative_numbers = true)]
    ckn_alphas: Vec<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, env = "HGCALC_THREADS")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ineq {
    Hardy,
    Ckn,
    Hk,
    Hpw,
    EulerCorollary,
}

impl From<Ineq> for InequalityId {
    fn from(i: Ineq) -> Self {
        match i {
            Ineq::Hardy => InequalityId::Hardy,
            Ineq::Ckn => InequalityId::Ckn,
            Ineq::Hk => InequalityId::Hk,
            Ineq::Hpw => InequalityId::Hpw,
            Ineq::EulerCorollary => InequalityId::EulerCorollary,
        }
    }
}

#[derive(Args)]
struct SharpArgs {
    #[arg(long, value_enum)]
    inequality: Ineq,
    #[arg(long, default_value = "r3_isotropic")]
    group: String,
    /// Recorded with the result; the radial families depend only on `Q`.
    #[arg(long)]
    quasinorm: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 500)]
    budget: usize,
    /// Range of the power perturbation `ε`, as `lo,hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    epsilon: Option<(f64, f64)>,
    /// Range of `L = ln(1/δ)` for the power-window family.
    #[arg(long, value_parser = parse_range)]
    log_width: Option<(f64, f64)>,
    /// Ramp length of the window as a fraction of `L`.
    #[arg(long)]
    ramp: Option<f64>,
    /// Range of the Gaussian exponent `β` for the power-Gaussian family.
    #[arg(long, value_parser = parse_range)]
    beta: Option<(f64, f64)>,
    /// Range of `ln a_j` for the Gaussian-width family.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    widths: Option<(f64, f64)>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "HGCALC_THREADS")]
    threads: Option<usize>,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = v.parse().map_err(|e| format!("{e}"))?;
    Ok((k.to_string(), v))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo <= hi) {
        return Err("lo must not exceed hi".into());
    }
    Ok((lo, hi))
}

fn set_tol(t: &mut Tolerances, key: &str, v: f64) -> Result<(), CliError> {
    let slot = match key {
        "identity" => &mut t.identity,
        "identity_fd" => &mut t.identity_fd,
        "inequality" => &mut t.inequality,
        "pointwise" => &mut t.pointwise,
        "structural" => &mut t.structural,
        _ => return Err(CliError::config(format!("tol.{key}"), "unknown tolerance")),
    };
    *slot = v;
    Ok(())
}

fn run(args: RunArgs) -> Result<i32, CliError> {
    let mut cfg = match &args.config {
        Some(p) => SuiteConfig::from_json_file(p)?,
        None => SuiteConfig::default(),
    };
    if !args.groups.is_empty() {
        cfg.groups = args.groups;
    }
    if !args.quasinorms.is_empty() {
        cfg.quasinorms = args.quasinorms;
    }
    if !args.fields.is_empty() {
        cfg.fields = args.fields;
    }
    if !args.checks.is_empty() {
        cfg.checks = args.checks;
    }
    for (k, v) in &args.tols {
        set_tol(&mut cfg.tolerances, k, *v)?;
    }
    if !args.alphas.is_empty() {
        cfg.alphas = Some(args.alphas);
    }
    if !args.ckn_alphas.is_empty() {
        cfg.ckn_alphas = args.ckn_alphas;
    }
    if let Some(b) = args.budget {
        cfg.sharpness_budget = b;
    }
    if let Some(o) = args.out {
        cfg.output = Some(o.display().to_string());
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    let report = run_suite(&cfg)?;
    write_report(&report, cfg.format, cfg.output.as_deref().map(std::path::Path::new))?;
    let s = &report.summary;
    eprintln!(
        "{} pass, {} fail, {} skipped, {} errored in {:.1} s",
        s.pass, s.fail, s.skipped, s.errored, report.wall_time_s
    );
    Ok(exit_code(s))
}

fn sharpness(args: SharpArgs) -> Result<i32, CliError> {
    let g = parse_group(&args.group).map_err(|m| CliError::config("group", m))?;
    let qn = match &args.quasinorm {
        Some(l) => {
            let qn = parse_quasinorm(l).map_err(|m| CliError::config("quasinorm", m))?;
            qn.check_compatible(&g).map_err(|e| CliError::config("quasinorm", e.to_string()))?;
            Some(qn)
        }
        None => None,
    };
    let id: InequalityId = args.inequality.into();
    let map_err = |e: hgcalc::Error| match e {
        hgcalc::Error::PreconditionViolation(_) | hgcalc::Error::InvalidArgument(_) => {
            CliError::config("inequality", e.to_string())
        }
        other => CliError::Internal(other.to_string()),
    };
    let mut family = default_family(id, &g, args.alpha).map_err(map_err)?;
    match &mut family {
        Family::PowerWindow(p) => {
            p.epsilon = args.epsilon.unwrap_or(p.epsilon);
            p.log_width = args.log_width.unwrap_or(p.log_width);
            p.ramp_fraction = args.ramp.unwrap_or(p.ramp_fraction);
        }
        Family::PowerGaussian { epsilon, beta } => {
            *epsilon = args.epsilon.unwrap_or(*epsilon);
            *beta = args.beta.unwrap_or(*beta);
        }
        Family::GaussianWidths { log_width } => {
            *log_width = args.widths.unwrap_or(*log_width);
        }
    }
    let opts = SharpnessOptions {
        budget: args.budget,
        alpha: args.alpha,
        family: Some(family),
        ..Default::default()
    };
    let threads = args.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let r = pool.install(|| sharpness_search(id, &g, qn.as_ref(), &opts)).map_err(map_err)?;
    let mut doc = serde_json::to_string_pretty(&r).map_err(|e| CliError::Internal(e.to_string()))?;
    doc.push('\n');
    match &args.out {
        Some(p) => std::fs::write(p, doc).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        None => print!("{doc}"),
    }
    eprintln!(
        "{}: best ratio {:.8} against constant {:.8} ({:.4}%), {} evaluations{}",
        id.label(),
        r.best_ratio,
        r.constant_paper,
        100.0 * r.attainment(),
        r.evaluations,
        if r.converged { "" } else { ", unconverged" }
    );
    Ok(0)
}

fn list() -> i32 {
    println!("groups:");
    for (id, desc, norms) in SHIPPED_GROUPS {
        println!("  {id:<14} {desc}; quasi-norms {}", norms.join(", "));
    }
    println!("  r<n>           ℝⁿ with unit weights");
    println!("  abelian:<ν,..> ℝⁿ with the given weights");
    println!("  <path.json>    group definition file");
    println!("quasi-norms: euclidean, koranyi, p<value>");
    println!("fields: {}", BATTERY_IDS.join(", "));
    println!("checks:");
    for (id, stmt) in CATALOG {
        println!("  {id:<26} {stmt}");
    }
    println!("inequalities for `sharpness`:");
    for id in InequalityId::ALL {
        println!("  {}", id.label().replace('_', "-"));
    }
    0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List => Ok(list()),
        Command::Run(a) => run(a),
        Command::Sharpness(a) => sharpness(a),
    };
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(e) => {
            eprintln!("hgcalc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
