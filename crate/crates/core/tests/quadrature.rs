use std::f64::consts::PI;
use std::sync::Arc;

use hgcalc::field::{FnField, GaussianField, RadialField, RadialProfile, ScalarField};
use hgcalc::group::{DilationWeights, GroupSpec, Point, QuasiNorm};
use hgcalc::quadrature::{composite, polar_identity_residual, PolarScheme, QuadratureScheme};
use hgcalc::{Cx, Error};

fn scheme_for(f: &dyn ScalarField<f64>, panels: usize, order: usize) -> QuadratureScheme<f64> {
    QuadratureScheme::for_fields(&[f], panels, order, 1e-3).unwrap()
}

#[test]
fn gaussian_norm_matches_closed_form() {
    let f = GaussianField::<f64>::isotropic(3, 1.0);
    let q = scheme_for(&f, 4, 24);
    let ip = q.l2_inner(&f, &f).unwrap();
    let want = PI.powf(1.5);
    assert!((ip.values[0].re - want).abs() < 1e-12 * want, "{}", ip.values[0]);
    assert!(ip.values[0].im.abs() < 1e-15);
    assert!((q.l2_norm(&f).unwrap() - want.sqrt()).abs() < 1e-12);
}

#[test]
fn odd_field_is_orthogonal_to_gaussian() {
    let f = GaussianField::<f64>::isotropic(2, 2.0).with_prefactor(0);
    let h = GaussianField::<f64>::isotropic(2, 2.0);
    let q = QuadratureScheme::for_fields(&[&f, &h], 4, 20, 1e-3).unwrap();
    assert!(q.l2_inner(&f, &h).unwrap().values[0].norm() < 1e-15);
}

#[test]
fn second_moment_of_gaussian() {
    // f = ‖x‖ e^{−‖x‖²/2}: ∫ ‖x‖² e^{−‖x‖²} = (n/2) π^{n/2}.
    let f = FnField::new("norm_gauss", 3, |x: &Point<f64>| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        Cx::new(r2.sqrt() * (-0.5 * r2).exp(), 0.0)
    })
    .with_decay_box(&[9.5, 9.5, 9.5]);
    // ‖x‖ has a kink at the origin, which is a panel corner.
    let q = scheme_for(&f, 8, 24);
    let got = q.l2_inner(&f, &f).unwrap().values[0].re;
    let want = 1.5 * PI.powf(1.5);
    assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
}

#[test]
fn inner_product_is_conjugate_symmetric_and_linear() {
    let f = GaussianField::<f64>::anisotropic(&[1.0, 0.5]).with_phase(&[1.0, -0.3]);
    let h = GaussianField::<f64>::anisotropic(&[0.7, 1.2]).with_prefactor(1);
    let q = QuadratureScheme::for_fields(&[&f, &h], 4, 24, 1e-3).unwrap();
    let fh = q.l2_inner(&f, &h).unwrap().values[0];
    let hf = q.l2_inner(&h, &f).unwrap().values[0];
    assert!((fh - hf.conj()).norm() < 1e-14);
    let a = Cx::new(0.3, -1.1);
    let f2 = Arc::new(f.clone());
    let af = FnField::new("a f", 2, move |x| f2.eval(x) * a).with_decay_box(q.half_widths.as_slice());
    let afh = q.l2_inner(&af, &h).unwrap().values[0];
    assert!((afh - a * fh).norm() < 1e-14);
}

#[test]
fn doubling_nodes_converges_fast() {
    let f = GaussianField::<f64>::anisotropic(&[1.0, 3.0]);
    let want = PI / 3f64.sqrt() / 1.0;
    let mut prev = f64::INFINITY;
    for order in [8, 16, 32, 64] {
        let q = QuadratureScheme::new(&[7.0, 7.0], 2, order, 1.0).unwrap();
        let err = (q.integrate_once(1, |x, o| o[0] = f.eval(x).powi(2))[0].re - want).abs();
        assert!(err <= (prev * 1e-2).max(1e-12), "order {order}: {err} after {prev}");
        prev = err;
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let f = GaussianField::<f64>::anisotropic(&[1.0, 0.5, 2.0]).with_phase(&[1.0, 0.0, 0.0]);
    let q = scheme_for(&f, 4, 16);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| q.l2_inner(&f, &f).unwrap())
    };
    assert_eq!(run(1), run(5));
}

#[test]
fn truncation_is_detected() {
    let f = GaussianField::<f64>::isotropic(2, 1.0);
    let q = QuadratureScheme::new(&[3.0, 3.0], 4, 10, 1e-3).unwrap();
    assert!(matches!(q.l2_norm(&f), Err(Error::TruncationError(_))));
}

#[test]
fn refine_needed_when_rule_is_too_coarse() {
    let f = GaussianField::<f64>::isotropic(2, 1.0);
    let q = QuadratureScheme::for_fields(&[&f], 2, 3, 1e-10).unwrap();
    assert!(matches!(q.l2_norm(&f), Err(Error::RefineNeeded { .. })));
}

#[test]
fn haar_measure_scales_with_homogeneous_dimension() {
    let g = GroupSpec::<f64>::heisenberg();
    let f = Arc::new(GaussianField::<f64>::anisotropic(&[1.0, 0.8, 0.5]).with_phase(&[0.5, 0.0, 0.2]));
    let base = scheme_for(f.as_ref(), 4, 24).integral(f.as_ref()).unwrap().values[0];
    for lambda in [0.5f64, 1.7, 3.0] {
        let (gg, ff) = (g.clone(), f.clone());
        let fb = f.decay_box().unwrap();
        let bx: Vec<f64> = (0..3).map(|j| fb[j] / lambda.powf(g.nu()[j])).collect();
        let dil = FnField::new("f∘D", 3, move |x| ff.eval(&gg.dilate(lambda, x).unwrap()))
            .with_decay_box(&bx);
        let got = scheme_for(&dil, 4, 24).integral(&dil).unwrap().values[0];
        let want = base * lambda.powf(-4.0);
        assert!((got - want).norm() < 1e-8 * want.norm(), "λ={lambda}: {got} vs {want}");
    }
}

fn radial_oracle(profile: &RadialProfile<f64>, q: f64, hi: f64) -> f64 {
    composite(0.0, hi, 64, 20)
        .into_iter()
        .map(|(r, w)| w * profile.value(r) * r.powf(q - 1.0))
        .sum()
}

#[test]
fn euclidean_sphere_mass_from_radial_gaussian() {
    let g = GroupSpec::<f64>::euclidean(3).unwrap();
    let qn = QuasiNorm::euclidean();
    let profile = RadialProfile::gaussian(1.0, 2.0);
    let f = RadialField::new(&g, qn, profile);
    let ps = PolarScheme::new(&g, qn, 16, 2, 8).unwrap();
    let polar = ps.polar_integral(&f).unwrap().re;
    let mass = polar / radial_oracle(&profile, 3.0, 12.0);
    assert!((mass - 4.0 * PI).abs() < 1e-6, "{mass}");
    assert!((ps.sphere_mass() - 4.0 * PI).abs() < 1e-10);
}

#[test]
fn polar_integral_of_radial_field_factorizes() {
    let g = GroupSpec::abelian(DilationWeights::<f64>::from_f64(&[1.0, 2.0, 3.0]).unwrap());
    let qn = QuasiNorm::p_family(6.0).unwrap();
    let profile = RadialProfile::gaussian(1.0, 6.0).with_inner_cutoff(0.3, 0.8);
    let f = RadialField::new(&g, qn, profile);
    let ps = PolarScheme::new(&g, qn, 16, 2, 8).unwrap();
    let got = ps.polar_integral(&f).unwrap().re;
    let want = ps.sphere_mass() * radial_oracle(&profile, 6.0, 4.0);
    assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
}

#[test]
fn zero_field_integrates_to_zero() {
    let g = GroupSpec::<f64>::heisenberg();
    let f = FnField::new("zero", 3, |_| Cx::new(0.0, 0.0)).with_decay_box(&[1.0, 1.0, 1.0]);
    let q = QuadratureScheme::new(&[1.0, 1.0, 1.0], 2, 4, 1e-3).unwrap();
    let ps = PolarScheme::new(&g, QuasiNorm::koranyi(), 4, 1, 1).unwrap();
    assert_eq!(ps.polar_integral(&f).unwrap(), Cx::new(0.0, 0.0));
    assert_eq!(polar_identity_residual(&q, &ps, &f).unwrap(), 0.0);
}

#[test]
fn polar_matches_cartesian_on_heisenberg() {
    let g = GroupSpec::<f64>::heisenberg();
    let qn = QuasiNorm::koranyi();
    let f = RadialField::new(&g, qn, RadialProfile::gaussian(1.0, 4.0));
    let q = scheme_for(&f, 8, 24);
    let ps = PolarScheme::new(&g, qn, 16, 2, 8).unwrap();
    let res = polar_identity_residual(&q, &ps, &f).unwrap();
    assert!(res < 1e-8, "{res}");
}

#[test]
fn polar_matches_cartesian_on_anisotropic_plane() {
    let g = GroupSpec::abelian(DilationWeights::<f64>::from_f64(&[1.0, 2.0]).unwrap());
    let qn = QuasiNorm::p_family(4.0).unwrap();
    let f = FnField::new("exp(-x1^4-x2^2)", 2, |x: &Point<f64>| {
        Cx::new((-x[0].powi(4) - x[1] * x[1]).exp(), 0.0)
    })
    .with_decay_box(&[2.5, 6.2]);
    let q = scheme_for(&f, 8, 24);
    let ps = PolarScheme::new(&g, qn, 20, 2, 8).unwrap();
    let res = polar_identity_residual(&q, &ps, &f).unwrap();
    assert!(res < 1e-6, "{res}");
}

#[test]
fn polar_matches_cartesian_for_euclidean_gaussian() {
    let g = GroupSpec::<f64>::euclidean(3).unwrap();
    let f = GaussianField::<f64>::isotropic(3, 1.0);
    let q = scheme_for(&f, 4, 24);
    let ps = PolarScheme::new(&g, QuasiNorm::euclidean(), 16, 2, 8).unwrap();
    assert!(polar_identity_residual(&q, &ps, &f).unwrap() < 1e-8);
}
