mod common;

use afsum_core::extrapop::{
    build_extrap_operator, extrap_coeffs_general, extrap_generating_poly, extrap_moments, remainder_bound,
};
use afsum_core::prony::{generating_polynomial, newton_power_sums};
use afsum_core::series::FunctionSpec;
use afsum_core::C64;
use common::{c, complex_in_disc, config, rel};
use proptest::prelude::*;

const SCALES: [f64; 4] = [0.25, 0.5, 1.0, 2.0];
const WEIGHTS: [f64; 4] = [0.5, 1.0, 2.0, 8.0];

fn grid() -> impl Iterator<Item = (usize, f64, f64)> {
    (1..=8).flat_map(|n| SCALES.iter().flat_map(move |&a| WEIGHTS.iter().map(move |&p| (n, a, p))))
}

#[test]
fn nodes_contract_strictly() {
    let mut cases = 0;
    for (n, a, p) in grid() {
        let op = build_extrap_operator(n, a, p).unwrap();
        assert!(op.contraction > 0.0 && op.contraction < 1.0);
        let max = op.frequencies.iter().map(|l| l.norm()).fold(0.0, f64::max);
        if n == 1 {
            assert!(max <= op.contraction * a * (1.0 + 4.0 * f64::EPSILON));
        } else {
            assert!(max < op.contraction * a, "n = {n}, a = {a}, p = {p}");
        }
        cases += 1;
    }
    assert!(cases >= 100);
}

#[test]
fn power_sums_stay_in_range() {
    for (n, a, p) in grid() {
        let op = build_extrap_operator(n, a, p).unwrap();
        for v in 2 * n..2 * n + 6 {
            let s = op.power_sum(v);
            let top = a.powi(v as i32);
            let slack = 1e-9 * top.max(1.0);
            assert!(s.re >= -slack && s.re <= top + slack, "n = {n}, a = {a}, p = {p}, v = {v}: {s}");
            assert!(s.im.abs() <= slack);
        }
    }
}

#[test]
fn newton_propagation_matches_direct_sums() {
    for (n, a, p) in grid() {
        let op = build_extrap_operator(n, a, p).unwrap();
        let g = extrap_generating_poly(n, a, p).unwrap();
        let direct: Vec<C64> = (0..2 * n + 6).map(|v| op.power_sum(v)).collect();
        let rec = newton_power_sums(&g, &direct[..2 * n], 2 * n + 6);
        let scale = direct.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for v in 2 * n..2 * n + 6 {
            assert!((rec[v] - direct[v]).norm() <= 1e-8 * scale);
        }
    }
}

#[test]
fn observed_error_within_remainder_bound() {
    for (n, a, p) in grid() {
        let op = build_extrap_operator(n, a, p).unwrap();
        let rounding = 64.0 * f64::EPSILON * op.amplitudes.iter().map(|m| m.norm()).sum::<f64>() * (a * 2.0).exp();
        for i in 0..=20 {
            let z = c(-1.0 + i as f64 / 10.0, 0.0);
            let err = (op.apply(&FunctionSpec::Exp, z).unwrap() - (z * a).exp()).norm();
            let bound = remainder_bound(&op, &FunctionSpec::Exp, z, 60);
            assert!(!bound.lower_estimate || z.norm() == 0.0);
            assert!(err <= bound.value + rounding, "n = {n}, a = {a}, p = {p}, z = {z}: {err:e} > {:e}", bound.value);
        }
    }
}

#[test]
fn bound_does_not_depend_on_weight() {
    let z = c(0.8, 0.0);
    let base = build_extrap_operator(4, 0.5, 0.5).unwrap();
    let other = build_extrap_operator(4, 0.5, 8.0).unwrap();
    assert_ne!(base.frequencies, other.frequencies);
    assert_eq!(
        remainder_bound(&base, &FunctionSpec::Exp, z, 60),
        remainder_bound(&other, &FunctionSpec::Exp, z, 60)
    );
}

#[test]
fn closed_form_matches_general_coefficients() {
    for n in 1..=10 {
        for (a, p) in [(0.5, 2.0), (1.5, 0.7), (2.0, 8.0)] {
            let general = extrap_coeffs_general(n, a, p, 0.0).unwrap();
            let closed = extrap_generating_poly(n, a, p).unwrap();
            for (m, want) in closed.coeffs().iter().enumerate() {
                let got = c(general[m] / general[n], 0.0);
                assert!(rel(got, *want) <= 1e-10, "n = {n}, m = {m}");
            }
        }
    }
}

#[test]
fn hankel_route_matches_closed_form() {
    for n in 1..=6 {
        let (a, p) = (0.5, 2.0);
        let hankel = generating_polynomial(&extrap_moments(n, a, p, 0.0)).unwrap();
        let closed = extrap_generating_poly(n, a, p).unwrap();
        for (x, y) in hankel.coeffs().iter().zip(closed.coeffs()) {
            assert!(rel(*x, *y) <= 1e-8, "n = {n}");
        }
    }
}

fn poly_and_points(n: usize) -> impl Strategy<Value = (Vec<C64>, Vec<C64>)> {
    (
        prop::collection::vec((-1.0f64..1.0).prop_map(|x| c(x, 0.0)), 1..=2 * n),
        prop::collection::vec(complex_in_disc(1.0), 10),
    )
}

fn check_exactness(n: usize, coeffs: Vec<C64>, points: Vec<C64>) -> Result<(), TestCaseError> {
    let (a, p) = (0.5, 2.0);
    let op = build_extrap_operator(n, a, p).unwrap();
    let f = FunctionSpec::Polynomial(coeffs);
    for z in points {
        let exact = f.evaluate(z * a).unwrap();
        let got = op.apply(&f, z).unwrap();
        prop_assert!(rel(got, exact) <= 1e-9, "n = {n}, z = {z}");
    }
    Ok(())
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn exact_on_polynomials_n3((f, z) in poly_and_points(3)) { check_exactness(3, f, z)?; }
    #[test]
    fn exact_on_polynomials_n4((f, z) in poly_and_points(4)) { check_exactness(4, f, z)?; }
    #[test]
    fn exact_on_polynomials_n5((f, z) in poly_and_points(5)) { check_exactness(5, f, z)?; }
    #[test]
    fn exact_on_polynomials_n7((f, z) in poly_and_points(7)) { check_exactness(7, f, z)?; }
}
