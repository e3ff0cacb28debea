mod common;

use afsum_core::prony::{generating_polynomial, hankel_rank, MomentSequence};
use afsum_core::regularize::{
    choose_p, regularized_interpolant_with, varied_moments, RegularizationParams,
};
use afsum_core::series::{FunctionSpec, Maclaurin};
use afsum_core::{Tolerances, C64};
use common::{c, complex_box, config, max_rel};
use proptest::prelude::*;

fn moments() -> impl Strategy<Value = MomentSequence> {
    (1usize..=6)
        .prop_flat_map(|n| prop::collection::vec(complex_box(10.0), 2 * n))
        .prop_map(|s| MomentSequence::new(s).unwrap())
}

/// Targets built from fewer exponentials than `n`, so the raw problem is
/// rank deficient, mixed with generic random series.
fn target_and_order() -> impl Strategy<Value = (FunctionSpec, usize)> {
    let low_rank = (2usize..=5, prop::collection::vec((complex_box(1.0), complex_box(1.0)), 1..=2)).prop_map(
        |(n, terms)| {
            let coeffs = (0..2 * n)
                .map(|m| {
                    let fact: f64 = (1..=m).map(|k| k as f64).product();
                    terms.iter().map(|(mu, l)| mu * l.powu(m as u32)).sum::<C64>() / fact
                })
                .collect();
            (FunctionSpec::RawSeries(coeffs), n)
        },
    );
    let generic = (1usize..=5)
        .prop_flat_map(|n| (prop::collection::vec(complex_box(1.0), 2 * n), Just(n)))
        .prop_map(|(v, n)| (FunctionSpec::RawSeries(v), n));
    prop_oneof![low_rank, generic]
}

fn tau_moments(n: usize, params: &RegularizationParams) -> MomentSequence {
    let mut s = vec![c(0.0, 0.0); 2 * n];
    s[n - 1] = params.p;
    s[2 * n - 1] = params.effective_q();
    MomentSequence::new(s).unwrap()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn zero_variation_is_identity(m in moments()) {
        let v = varied_moments(&m, c(0.0, 0.0), c(0.0, 0.0));
        let same = v.as_slice().iter().zip(m.as_slice()).all(|(a, b)| {
            a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
        });
        prop_assert!(same);
    }

    #[test]
    fn chosen_p_gives_full_degree(m in moments()) {
        let p = c(choose_p(&m), 0.0);
        let g = generating_polynomial(&varied_moments(&m, p, p)).unwrap();
        prop_assert_eq!(g.degree(), m.n());
    }

    #[test]
    fn regularized_sum_interpolates((f, n) in target_and_order()) {
        let (sum, params) =
            regularized_interpolant_with(&f, &FunctionSpec::Exp, n, None, &Tolerances::default()).unwrap();
        let got = sum.maclaurin(2 * n - 1);
        let want = f.coefficients(2 * n - 1);
        prop_assert!(max_rel(got.coefficients(), &want) < 1e-7);

        // A variation of rank r can only repair a raw Hankel matrix of rank
        // at least n - r.
        if params.is_active() {
            let raw = afsum_core::prony::moment_sequence(&f, &FunctionSpec::Exp, n).unwrap();
            prop_assert!(hankel_rank(&raw) + hankel_rank(&tau_moments(n, &params)) >= n);
        }
    }
}

#[test]
fn unit_series_basis_closing_example() {
    let f = FunctionSpec::RawSeries(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let h = FunctionSpec::RawSeries(vec![c(1.0, 0.0); 4]);
    let params = RegularizationParams::new(c(1.0, 0.0), c(0.0, 0.0));
    let (sum, used) = regularized_interpolant_with(&f, &h, 2, Some(params), &Tolerances::default()).unwrap();
    assert_eq!(used.delta, c(0.0, 0.0));
    let got = sum.maclaurin(3);
    assert!(max_rel(got.coefficients(), &f.coefficients(3)) < 1e-12);
}
