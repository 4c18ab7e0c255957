mod support;

use dirac_warp::heun::{
    exponents_at_infinity, exponents_at_zero, master_coefficients, mobius_map, mobius_map_sphere, singular_points,
    SingularityReport, SpherePoint,
};
use dirac_warp::modes::{ModeContext, SpinStructure};
use dirac_warp::ode::{integrate_fundamental, Basis, IntegratorConfig};
use dirac_warp::heun::second_order_residual;
use dirac_warp::warp::WarpProfile;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn exponents_solve_the_indicial_equations(lambda in -5.0f64..5.0, m in -5.0f64..5.0, alpha in 0.05f64..10.0) {
        let e = exponents_at_zero(lambda, m, alpha).unwrap();
        prop_assert_eq!(e.sum(), c(0.0, 0.0));
        let d = lambda * lambda - m / alpha;
        let expect = if d > 0.0 { c(0.0, d.sqrt()) } else { c((-d).sqrt(), 0.0) };
        prop_assert!((e.plus - expect).norm() <= 1e-12 * expect.norm().max(1.0));
        // ρ² + (λ² − m/α) = 0
        prop_assert!((e.plus * e.plus + d).norm() <= 1e-10 * d.abs().max(1.0));

        let inf = exponents_at_infinity(lambda);
        prop_assert_eq!(inf.sum(), c(0.0, 0.0));
        prop_assert_eq!(inf.plus, c(0.0, lambda.abs()));
        prop_assert_eq!(inf, exponents_at_infinity(-lambda));
    }

    #[test]
    fn mobius_images_are_exact(alpha in 0.01f64..100.0) {
        let b = alpha.sqrt();
        prop_assert_eq!(mobius_map(c(0.0, 0.0), alpha).unwrap(), c(-1.0, 0.0));
        prop_assert_eq!(mobius_map(c(0.0, b), alpha).unwrap(), c(0.0, 0.0));
        prop_assert!(mobius_map(c(0.0, -b), alpha).is_err());
        let images: Vec<SpherePoint> = singular_points(alpha).unwrap()
            .iter()
            .map(|&p| mobius_map_sphere(p, alpha).unwrap())
            .collect();
        prop_assert_eq!(
            images,
            vec![
                SpherePoint::Finite(c(-1.0, 0.0)),
                SpherePoint::Finite(c(0.0, 0.0)),
                SpherePoint::Infinity,
                SpherePoint::Finite(c(1.0, 0.0)),
            ]
        );
    }

    #[test]
    fn liouville_substitution(m in -3.0f64..3.0, lambda in -4.0f64..4.0, x in 0.0f64..=1.0) {
        let p = WarpProfile::new(1.0, 1.5).unwrap();
        let t = 1.5 * x;
        let (f, fp, fpp) = support::warp(1.0, t);
        let (pp, r) = master_coefficients(&p, m, lambda, t).unwrap();
        let dp = fpp / f - fp * fp / (f * f);
        let v = p.eval_potential(m, lambda, t).unwrap();
        prop_assert!((r - dp / 2.0 - pp * pp / 4.0 - v).abs() <= 1e-10);
    }
}

#[test]
fn report_lists_four_regular_points() {
    let r = SingularityReport::compute(4.0, 2.0, 1.3).unwrap();
    assert_eq!(r.points.len(), 4);
    assert!(r.regular.iter().all(|&x| x));
    assert_eq!(r.points[1], SpherePoint::Finite(c(0.0, 2.0)));
    assert!(SingularityReport::compute(0.0, 1.0, 1.0).is_err());
}

#[test]
fn exact_solution_has_small_residual() {
    let ctx = ModeContext::new(0.0, 0.0, SpinStructure::Periodic, WarpProfile::new(1.0, 1.5).unwrap()).unwrap();
    let sol = integrate_fundamental(&ctx, 1.0, Basis::ComplexUV, &IntegratorConfig::default()).unwrap();
    for col in 0..2 {
        assert!(second_order_residual(&ctx, &sol, col).unwrap() <= 1e-6);
    }
    let real = integrate_fundamental(&ctx, 1.0, Basis::RealUW, &IntegratorConfig::default()).unwrap();
    assert!(second_order_residual(&ctx, &real, 0).is_err());
}
