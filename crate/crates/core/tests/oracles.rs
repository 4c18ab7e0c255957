//! The test oracles are checked against known closed forms before they are
//! trusted anywhere else.

mod support;

use std::f64::consts::PI;

use support::{bracket_roots, hurwitz_zeta, simpson};

#[test]
fn hurwitz_at_two_is_basel() {
    assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-13);
    // ζ(2, 1/2) = 3ζ(2)
    assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-12);
}

#[test]
fn hurwitz_continuation_at_minus_one() {
    for i in 1..10 {
        let a = i as f64 / 10.0;
        let b2 = a * a - a + 1.0 / 6.0;
        assert!((hurwitz_zeta(-1.0, a) + b2 / 2.0).abs() < 1e-10, "a = {a}");
    }
}

#[test]
fn hurwitz_at_zero() {
    for i in 1..10 {
        let a = i as f64 / 10.0;
        assert!((hurwitz_zeta(0.0, a) - (0.5 - a)).abs() < 1e-10);
    }
}

#[test]
fn hurwitz_is_continuous_through_zero() {
    for a in [0.2, 0.55, 0.85] {
        let mid = 0.5 * (hurwitz_zeta(1e-7, a) + hurwitz_zeta(-1e-7, a));
        assert!((mid - (0.5 - a)).abs() < 1e-10);
    }
}

#[test]
fn simpson_known_integrals() {
    assert!((simpson(&|x: f64| x.sin(), 0.0, PI, 1e-13) - 2.0).abs() < 1e-12);
    // ∫₀^∞ dt / (2 cosh t) = π/4, truncated where the tail is below 1e−15
    assert!((simpson(&|t: f64| 1.0 / (t.exp() + (-t).exp()), 0.0, 36.0, 1e-14) - PI / 4.0).abs() < 1e-12);
}

#[test]
fn bisection_oracle() {
    let r = bracket_roots(&|x: f64| x.cos(), 0.0, 10.0, 100, 1e-13);
    assert_eq!(r.len(), 3);
    for (i, x) in r.iter().enumerate() {
        assert!((x - (PI / 2.0 + i as f64 * PI)).abs() < 1e-12);
    }
}
