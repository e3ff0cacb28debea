mod common;

use afsum_core::prony::{
    amplitudes_sylvester, amplitudes_vandermonde, generating_polynomial, is_positive_sequence,
    is_regular, moment_residual, newton_power_sums, solve, MomentSequence, Verdict,
};
use afsum_core::polyroots::min_separation;
use afsum_core::series::{FunctionSpec, Maclaurin};
use afsum_core::C64;
use common::{c, complex_box, complex_in_disc, config, max_rel};
use proptest::prelude::*;

/// Distinct nodes with `|λ| ≤ 2`, pairwise at least 0.1 apart, and amplitudes
/// with `0.1 ≤ |μ| ≤ 10`.
fn planted() -> impl Strategy<Value = (Vec<C64>, Vec<C64>)> {
    (1usize..=6).prop_flat_map(|n| {
        (
            prop::collection::vec(complex_in_disc(2.0), n)
                .prop_filter("separated nodes", |l| min_separation(l) >= 0.1),
            prop::collection::vec(
                (0.1f64..10.0, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t)),
                n,
            ),
        )
    })
}

fn moments_of(mu: &[C64], lambda: &[C64]) -> MomentSequence {
    let n = lambda.len();
    MomentSequence::new(
        (0..2 * n)
            .map(|m| mu.iter().zip(lambda).map(|(a, l)| a * l.powu(m as u32)).sum())
            .collect(),
    )
    .unwrap()
}

fn random_regular() -> impl Strategy<Value = MomentSequence> {
    (1usize..=6)
        .prop_flat_map(|n| prop::collection::vec(complex_box(10.0), 2 * n))
        .prop_map(|s| MomentSequence::new(s).unwrap())
        .prop_filter("regular instance", |m| is_regular(m) == Verdict::Regular)
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn sylvester_matches_vandermonde(m in random_regular()) {
        let roots = generating_polynomial(&m).unwrap().roots().unwrap();
        let syl = amplitudes_sylvester(&roots, &m).unwrap();
        let van = amplitudes_vandermonde(&roots, &m).unwrap();
        let scale = van.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (a, b) in syl.iter().zip(&van) {
            prop_assert!((a - b).norm() <= 1e-8 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn round_trip_recovers_planted_sum((lambda, mu) in planted()) {
        let m = moments_of(&mu, &lambda);
        let sol = solve(&m).unwrap();
        for (l, a) in lambda.iter().zip(&mu) {
            let k = (0..sol.n())
                .min_by(|&i, &j| (sol.frequencies[i] - l).norm().total_cmp(&(sol.frequencies[j] - l).norm()))
                .unwrap();
            prop_assert!((sol.frequencies[k] - l).norm() <= 1e-7 * l.norm().max(1.0));
            prop_assert!((sol.amplitudes[k] - a).norm() <= 1e-7 * a.norm());
        }
    }

    #[test]
    fn newton_recurrence_propagates(m in random_regular()) {
        let sol = solve(&m).unwrap();
        let g = generating_polynomial(&m).unwrap();
        let n = sol.n();
        let direct: Vec<C64> = (0..2 * n + 6).map(|v| sol.power_sum(v)).collect();
        let rec = newton_power_sums(&g, &direct[..2 * n], 2 * n + 6);
        let scale = direct.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for v in 2 * n..2 * n + 6 {
            prop_assert!((rec[v] - direct[v]).norm() <= 1e-8 * scale, "v = {v}");
        }
    }

    #[test]
    fn solution_meets_all_moment_equations(m in random_regular()) {
        let sol = solve(&m).unwrap();
        prop_assert!(moment_residual(&sol, &m) <= 1e-9 * (1.0 + m.max_abs()));
    }

    #[test]
    fn positive_sequences_give_real_nodes(
        nodes in prop::collection::vec(-3.0f64..3.0, 1..=5),
        weights in prop::collection::vec(0.1f64..5.0, 5),
    ) {
        let n = nodes.len();
        let lambda: Vec<C64> = nodes.iter().map(|&x| c(x, 0.0)).collect();
        let mu: Vec<C64> = weights[..n].iter().map(|&w| c(w, 0.0)).collect();
        let m = moments_of(&mu, &lambda);
        if is_positive_sequence(&m) {
            let sol = solve(&m).unwrap();
            prop_assert!(sol.frequencies.iter().all(|l| l.im.abs() < 1e-8));
            prop_assert!(sol.amplitudes.iter().all(|a| a.re > 0.0));
        }
    }
}

#[test]
fn interpolation_order_for_named_pairs() {
    let pairs = [
        (FunctionSpec::BesselJ0, FunctionSpec::Exp, 4),
        (FunctionSpec::Cos, FunctionSpec::Exp, 2),
        (FunctionSpec::Exp, FunctionSpec::InvZm1, 5),
        (FunctionSpec::Sinc, FunctionSpec::Cos, 3),
    ];
    for (f, h, n) in pairs {
        let m = afsum_core::prony::moment_sequence(&f, &h, n).unwrap();
        let sum = solve(&m).unwrap().into_sum(h.clone(), None);
        let got = sum.maclaurin(2 * n - 1);
        let want = f.coefficients(2 * n - 1);
        assert!(max_rel(got.coefficients(), &want) < 1e-7, "{f} over {h}");
    }
}

#[test]
fn golden_sum_evaluates_near_target() {
    let m = MomentSequence::from_real(&[1.0, 1.0, 0.0, 1.0]).unwrap();
    let sum = solve(&m).unwrap().into_sum(FunctionSpec::Exp, None);
    let z = c(0.1, 0.0);
    let target: C64 = m
        .as_slice()
        .iter()
        .zip(FunctionSpec::Exp.coefficients(3))
        .enumerate()
        .map(|(k, (s, h))| s * h * z.powu(k as u32))
        .sum();
    let value = sum.evaluate(z).unwrap();
    assert!((value - target).norm() < 1e-3, "{value} vs {target}");
    assert!((sum.evaluate(c(0.0, 0.0)).unwrap() - sum.power_sum(0)).norm() < 1e-15);
}

#[test]
fn legendre_two_point_integrates_exponential() {
    let m = MomentSequence::from_real(&[2.0, 0.0, 2.0 / 3.0, 0.0]).unwrap();
    let sum = solve(&m).unwrap().into_sum(FunctionSpec::Exp, None);
    let x = 0.5f64;
    let exact = 2.0 * x.sinh() / x;
    let got = sum.evaluate(c(x, 0.0)).unwrap().re;
    assert!((got - exact).abs() < x.powi(4));
}
