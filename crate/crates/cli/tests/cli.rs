use std::process::{Command, Output};

use hgcalc::verify::Outcome;
use hgcalc_cli::{from_json, run_suite, to_csv, to_json, to_markdown, CliError, SuiteConfig, CSV_HEADER};

fn hgcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgcalc"))
        .args(args)
        .env_remove("HGCALC_THREADS")
        .output()
        .expect("binary runs")
}

fn small(groups: &[&str], checks: &[&str], fields: &[&str]) -> SuiteConfig {
    SuiteConfig {
        groups: groups.iter().map(|s| s.to_string()).collect(),
        checks: checks.iter().map(|s| s.to_string()).collect(),
        fields: fields.iter().map(|s| s.to_string()).collect(),
        samples: 10,
        ..Default::default()
    }
}

#[test]
fn single_euler_check_on_the_gaussian() {
    let mut cfg = small(&["r3_isotropic"], &["euler_pythagoras"], &["gauss"]);
    cfg.quasinorms = vec!["euclidean".into()];
    let r = run_suite(&cfg).unwrap();
    let main: Vec<_> = r.rows("euler_pythagoras").collect();
    assert_eq!(main.len(), 1);
    assert!(main[0].pass);
    let e = 15.0 / 4.0 * std::f64::consts::PI.powf(1.5);
    let lhs = main[0].lhs.unwrap().to_complex().re;
    assert!((lhs - e).abs() / e < 1e-8, "{lhs} vs {e}");
    assert_eq!(r.summary.fail + r.summary.errored, 0);
}

#[test]
fn incompatible_combination_is_skipped_with_reason() {
    let r = run_suite(&small(&["heisenberg"], &["ckn"], &["annulus_gauss"])).unwrap();
    assert!(r.summary.skipped > 0);
    assert_eq!(r.summary.pass + r.summary.fail + r.summary.errored, 0);
    for row in r.rows("ckn") {
        assert_eq!(row.outcome(), Outcome::Skipped);
        assert!(!row.pass);
        assert!(row.lhs.is_none() && row.rhs.is_none());
        let reason = row.skipped_reason.as_deref().unwrap();
        assert!(reason.contains("Euclidean"), "{reason}");
    }
}

#[test]
fn empty_check_list_is_a_config_error() {
    let cfg = small(&["r3_isotropic"], &[], &["all"]);
    match run_suite(&cfg) {
        Err(e @ CliError::Config { .. }) => {
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains("checks"));
        }
        other => panic!("expected a config error, got {:?}", other.map(|r| r.summary)),
    }
}

#[test]
fn unknown_ids_name_the_offending_key() {
    let bad = [
        small(&["nowhere"], &["all"], &["all"]),
        small(&["r3_isotropic"], &["kennard", "nope"], &["all"]),
        small(&["r3_isotropic"], &["all"], &["gauss", "square"]),
        SuiteConfig {
            quasinorms: vec!["q3".into()],
            ..small(&["r3_isotropic"], &["all"], &["all"])
        },
    ];
    let keys = ["groups[0]", "checks[1]", "fields[1]", "quasinorms[0]"];
    for (cfg, key) in bad.iter().zip(keys) {
        match run_suite(cfg) {
            Err(CliError::Config { key: k, .. }) => assert_eq!(k, key),
            other => panic!("{key}: {:?}", other.map(|r| r.summary)),
        }
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    std::fs::write(&p, r#"{"groups": ["r3_isotropic"], "chekcs": ["all"]}"#).unwrap();
    assert!(matches!(SuiteConfig::from_json_file(&p), Err(CliError::Config { .. })));
}

#[test]
fn emitters_agree_on_rows() {
    let cfg = small(&["heisenberg"], &["kennard", "structural", "ckn"], &["gauss", "annulus_osc"]);
    let r = run_suite(&cfg).unwrap();
    assert!(r.summary.ok());
    assert_eq!(r.summary.total(), r.checks.len());

    let json = to_json(&r).unwrap();
    let back = from_json(&json).unwrap();
    assert_eq!(back.checks, r.checks);
    assert_eq!(back.summary, r.summary);
    assert_eq!(to_json(&back).unwrap(), json);

    let csv = to_csv(&r).unwrap();
    let mut rd = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER.to_vec());
    let records: Vec<_> = rd.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), r.checks.len());
    for (rec, row) in records.iter().zip(&r.checks) {
        assert_eq!(&rec[0], row.check_id.as_str());
        assert_eq!(rec[16] == *"true", row.pass);
    }

    let md = to_markdown(&r);
    let table_rows = md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| check ")).count();
    assert_eq!(table_rows, r.checks.len());
}

#[test]
fn report_is_identical_across_thread_counts() {
    let base = small(
        &["r3_aniso"],
        &["kennard", "weighted_radial_identity", "commutator", "structural"],
        &["gauss_phase", "annulus_power"],
    );
    let docs: Vec<String> = [1, 2, 5]
        .into_iter()
        .map(|t| {
            let cfg = SuiteConfig { threads: Some(t), ..base.clone() };
            to_json(&run_suite(&cfg).unwrap()).unwrap()
        })
        .collect();
    assert_eq!(docs[0], docs[1]);
    assert_eq!(docs[0], docs[2]);
    assert!(!docs[0].contains("threads"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = out.to_str().unwrap();

    let ok = hgcalc(&["run", "--group", "r3_isotropic", "--check", "euler_pythagoras", "--field", "gauss", "--out", o]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let r = from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.summary.pass > 0);

    // An impossible tolerance turns passes into failures.
    let fail = hgcalc(&[
        "run", "--group", "r3_isotropic", "--check", "euler_pythagoras", "--field", "gauss", "--tol", "identity=1e-300",
        "--out", o,
    ]);
    assert_eq!(fail.status.code(), Some(1));

    let cfg = hgcalc(&["run", "--group", "r3_isotropic", "--check", "bogus"]);
    assert_eq!(cfg.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&cfg.stderr).contains("checks[0]"));

    let tol = hgcalc(&["run", "--tol", "identity=-1"]);
    assert_eq!(tol.status.code(), Some(2));

    let io = hgcalc(&[
        "run", "--group", "r3_isotropic", "--check", "euler_pythagoras", "--field", "gauss", "--out",
        dir.path().join("missing/dir/r.json").to_str().unwrap(),
    ]);
    assert_eq!(io.status.code(), Some(3));
}

#[test]
fn csv_and_markdown_from_the_binary() {
    let csv = hgcalc(&["run", "--group", "r2_aniso", "--check", "kennard", "--field", "gauss", "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("check_id,group,quasinorm"));
    // kennard plus its two subchecks, on one quasi-norm.
    assert_eq!(text.lines().count(), 1 + 3);

    let md = hgcalc(&["run", "--group", "r2_aniso", "--check", "kennard", "--field", "gauss", "--format", "markdown"]);
    let text = String::from_utf8(md.stdout).unwrap();
    assert!(text.contains("| kennard.proof_identity | r2_aniso | p4 | gauss |"));
}

#[test]
fn thread_count_from_environment() {
    let run = |env: &str| {
        Command::new(env!("CARGO_BIN_EXE_hgcalc"))
            .args(["run", "--group", "heisenberg", "--check", "kennard", "--field", "gauss"])
            .env("HGCALC_THREADS", env)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn sharpness_verb() {
    let o = hgcalc(&["sharpness", "--inequality", "hardy", "--group", "r4", "--budget", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["inequality_id"], "hardy");
    let best = v["best_ratio"].as_f64().unwrap();
    assert!(best <= 1.0 && best >= 0.98, "{best}");
    assert!(v["evaluations"].as_u64().unwrap() <= 200);

    let o = hgcalc(&["sharpness", "--inequality", "ckn", "--group", "heisenberg"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hgcalc(&["sharpness", "--inequality", "ckn", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
}

#[test]
fn list_names_every_check_family() {
    let o = hgcalc(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for (id, _) in hgcalc::verify::CATALOG {
        assert!(text.contains(id), "{id}");
    }
    for id in hgcalc::verify::BATTERY_IDS {
        assert!(text.contains(id), "{id}");
    }
}
