use hgcalc::field::GaussianField;
use hgcalc::group::{DilationWeights, GroupSpec, Point, QuasiNorm};
use hgcalc::quadrature::QuadratureScheme;
use hgcalc::verify::*;
use hgcalc::Cx;
use proptest::prelude::*;

fn groups() -> Vec<GroupSpec<f64>> {
    vec![
        GroupSpec::euclidean(3).unwrap(),
        GroupSpec::abelian(DilationWeights::from_f64(&[1.0, 2.0, 3.0]).unwrap()),
        GroupSpec::heisenberg(),
    ]
}

fn point3() -> impl Strategy<Value = Point<f64>> {
    prop::array::uniform3(-3.0f64..3.0).prop_map(|v| Point::from_f64(&v))
}

fn close(a: &Point<f64>, b: &Point<f64>, scale: f64) -> bool {
    a.max_abs_diff(b) <= 1e-11 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_axioms(gi in 0usize..3, x in point3(), y in point3(), z in point3()) {
        let g = &groups()[gi];
        let e = g.origin();
        let xy_z = g.product(&g.product(&x, &y), &z);
        let x_yz = g.product(&x, &g.product(&y, &z));
        prop_assert!(close(&xy_z, &x_yz, 50.0));
        prop_assert!(close(&g.product(&x, &e), &x, 1.0));
        prop_assert!(close(&g.product(&e, &x), &x, 1.0));
        prop_assert!(close(&g.product(&x, &g.inverse(&x)), &e, 10.0));
    }

    #[test]
    fn dilations_are_automorphisms(gi in 0usize..3, x in point3(), y in point3(), lambda in 0.2f64..4.0) {
        let g = &groups()[gi];
        let d = |p: &Point<f64>| g.dilate(lambda, p).unwrap();
        let lhs = d(&g.product(&x, &y));
        let rhs = g.product(&d(&x), &d(&y));
        prop_assert!(close(&lhs, &rhs, 500.0));
    }

    #[test]
    fn quasinorm_homogeneous_and_symmetric(gi in 0usize..3, x in point3(), lambda in 0.2f64..4.0) {
        let g = &groups()[gi];
        let qn = match gi {
            0 => QuasiNorm::euclidean(),
            1 => QuasiNorm::p_family(6.0).unwrap(),
            _ => QuasiNorm::koranyi(),
        };
        let r = qn.eval(g, &x).unwrap();
        let rd = qn.eval(g, &g.dilate(lambda, &x).unwrap()).unwrap();
        prop_assert!((rd - lambda * r).abs() <= 1e-12 * (1.0 + lambda * r));
        let ri = qn.eval(g, &g.inverse(&x)).unwrap();
        prop_assert!((ri - r).abs() <= 1e-12 * (1.0 + r));
        if !x.is_origin() {
            prop_assert!(r > 0.0);
        }
    }

    #[test]
    fn integration_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, w in 0.5f64..2.0) {
        let f = GaussianField::isotropic(3, 1.0);
        let h = GaussianField::anisotropic(&[w, 1.0, 1.0 / w]).with_phase(&[0.5, 0.0, 0.0]);
        let q = QuadratureScheme::for_fields(&[&f, &h], 2, 12, 1.0).unwrap();
        use hgcalc::field::ScalarField;
        let r = q.integrate(3, |x, out| {
            let (fv, hv) = (f.eval(x), h.eval(x));
            out[0] = fv;
            out[1] = hv;
            out[2] = fv * a + hv * b;
        }).unwrap();
        let combo = r.values[0] * a + r.values[1] * b;
        prop_assert!((r.values[2] - combo).norm() <= 1e-12 * (1.0 + combo.norm()));
    }

    #[test]
    fn identity_report_invariants(lhs in -1e3f64..1e3, rhs in -1e3f64..1e3, tol in 1e-12f64..1.0) {
        let p = CheckParams::new("g", 3.0);
        let r = CheckReport::identity("id", "a = b", p, Value::Real(lhs), Value::Real(rhs), tol);
        let rel = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
        prop_assert!((r.rel_residual.unwrap() - rel).abs() <= 1e-15 * (1.0 + rel));
        prop_assert_eq!(r.pass, rel <= tol);
        prop_assert_eq!(r.abs_residual.unwrap(), (lhs - rhs).abs());
    }

    #[test]
    fn complex_identity_report(lr in -10.0f64..10.0, li in -10.0f64..10.0, rr in -10.0f64..10.0) {
        let p = CheckParams::new("g", 3.0);
        let r = CheckReport::identity("id", "a = b", p, Value::complex(Cx::new(lr, li)), Value::Real(rr), 1e-6);
        let d = ((lr - rr).powi(2) + li * li).sqrt();
        prop_assert!((r.abs_residual.unwrap() - d).abs() <= 1e-12 * (1.0 + d));
    }

    #[test]
    fn inequality_report_invariants(lhs in 0.0f64..1e3, rhs in 0.0f64..1e3, tol in 1e-12f64..1e-2) {
        let p = CheckParams::new("g", 3.0);
        let r = CheckReport::inequality("ineq", "a ≤ b", p, lhs, rhs, tol);
        let scale = 1.0 + lhs.max(rhs);
        prop_assert_eq!(r.abs_residual.unwrap(), (lhs - rhs).max(0.0));
        prop_assert!((r.rel_residual.unwrap() - (lhs - rhs).max(0.0) / scale).abs() <= 1e-15);
        prop_assert!((r.slack.unwrap() - (rhs - lhs) / scale).abs() <= 1e-15);
        prop_assert_eq!(r.pass, r.rel_residual.unwrap() <= tol);
        if lhs <= rhs {
            prop_assert!(r.pass);
        }
    }

    #[test]
    fn skipped_reports_carry_no_values(reason in "[a-z ]{1,20}") {
        let p = CheckParams::new("g", 3.0);
        let r = CheckReport::skipped("s", "x", p.clone(), reason.clone());
        prop_assert!(!r.pass && r.lhs.is_none() && r.rhs.is_none() && r.rel_residual.is_none());
        prop_assert_eq!(r.skipped_reason.as_deref(), Some(reason.as_str()));
        prop_assert_eq!(r.outcome(), Outcome::Skipped);
        let e = CheckReport::errored("s", "x", p, "boom");
        prop_assert!(!e.pass && e.abs_residual.is_none());
        prop_assert_eq!(e.outcome(), Outcome::Errored);
    }

    #[test]
    fn sharpness_trace_is_monotone(budget in 3usize..60, lo in -0.4f64..0.0, hi in 0.01f64..0.4) {
        let g = GroupSpec::<f64>::euclidean(3).unwrap();
        let fam = Family::PowerWindow(PowerWindow { epsilon: (lo, hi), log_width: (1.0, 20.0), ramp_fraction: 0.5 });
        let opts = SharpnessOptions { budget, family: Some(fam), ..Default::default() };
        let r = sharpness_search(InequalityId::Hardy, &g, None, &opts).unwrap();
        prop_assert!(r.evaluations <= budget);
        prop_assert!(r.trace_is_monotone());
        prop_assert!(r.best_ratio <= r.constant_paper);
        prop_assert_eq!(r.trace.last().map(|t| t.best_ratio), Some(r.best_ratio));
    }
}
