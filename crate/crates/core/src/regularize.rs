//! Regularization of non-regular moment problems by varying two moments.
//!
//! Adding `p` to `s_{n-1}` and `q` to `s_{2n-1}` is equivalent to fitting
//! `f - c1 z^{n-1} - c2 z^{2n-1}` instead of `f`, so the resulting sum carries
//! the correction binomial `c1 = -p h_{n-1}`, `c2 = -q h_{2n-1}`. A large `p`
//! makes the varied Hankel matrix diagonally dominant, and a small shift of
//! `q` splits any remaining multiple root.

use std::f64::consts::PI;

use crate::prony::{
    generating_polynomial_with, is_regular_with, moment_sequence, solve_with, Binomial,
    MomentSequence, PronySolution, Tolerances, Verdict,
};
use crate::series::{FunctionSpec, Maclaurin};
use crate::{AFSum, AfsumError, Result, C64};

/// Number of shifts tried by [`separate_roots`].
pub const SEPARATION_TRIALS: usize = 41;

/// Variation parameters; `delta` is the shift that was added to `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizationParams {
    pub p: C64,
    pub q: C64,
    pub delta: C64,
}

impl RegularizationParams {
    pub fn new(p: C64, q: C64) -> Self {
        RegularizationParams {
            p,
            q,
            delta: C64::new(0.0, 0.0),
        }
    }

    /// `q + δ`, the amount actually added to `s_{2n-1}`.
    pub fn effective_q(&self) -> C64 {
        self.q + self.delta
    }

    pub fn is_active(&self) -> bool {
        self.p != C64::new(0.0, 0.0) || self.effective_q() != C64::new(0.0, 0.0)
    }
}

/// `s_{n-1} += p`, `s_{2n-1} += q`.
pub fn varied_moments(m: &MomentSequence, p: C64, q: C64) -> MomentSequence {
    let n = m.n();
    let mut s = m.as_slice().to_vec();
    s[n - 1] += p;
    s[2 * n - 1] += q;
    MomentSequence::new(s).expect("varying a valid sequence keeps it valid")
}

/// `n · max|s_m| · 17/16 + 1`, large enough for strict diagonal dominance.
pub fn choose_p(m: &MomentSequence) -> f64 {
    m.n() as f64 * m.max_abs() * (17.0 / 16.0) + 1.0
}

/// The `j`-th trial shift of `q`.
pub fn separation_shift(q: C64, j: usize) -> C64 {
    C64::from_polar(1e-2 * 0.5f64.powi(j as i32) * (1.0 + q.norm()), PI / 7.0)
}

/// Find the first shift of `q` that makes the varied problem regular.
pub fn separate_roots(m: &MomentSequence, p: C64, q: C64) -> Result<RegularizationParams> {
    separate_roots_with(m, p, q, &Tolerances::default())
}

pub fn separate_roots_with(
    m: &MomentSequence,
    p: C64,
    q: C64,
    tol: &Tolerances,
) -> Result<RegularizationParams> {
    generating_polynomial_with(&varied_moments(m, p, q), tol)?;
    if is_regular_with(&varied_moments(m, p, q), tol) == Verdict::Regular {
        return Ok(RegularizationParams::new(p, q));
    }
    for j in 0..SEPARATION_TRIALS {
        let delta = separation_shift(q, j);
        if is_regular_with(&varied_moments(m, p, q + delta), tol) == Verdict::Regular {
            log::debug!("roots separated by shifting q by {delta} (trial {j})");
            return Ok(RegularizationParams { p, q, delta });
        }
    }
    Err(AfsumError::SeparationFailure {
        trials: SEPARATION_TRIALS,
    })
}

/// Solve the varied problem. Without `params`, a regular problem is solved
/// as is and anything else is varied with `p = q = choose_p`.
pub fn regularized_solution(
    m: &MomentSequence,
    params: Option<(C64, C64)>,
    tol: &Tolerances,
) -> Result<(PronySolution, RegularizationParams)> {
    let (p, q) = match params {
        Some(pq) => pq,
        None => {
            if is_regular_with(m, tol) == Verdict::Regular {
                let zero = C64::new(0.0, 0.0);
                return Ok((solve_with(m, tol)?, RegularizationParams::new(zero, zero)));
            }
            let p = C64::new(choose_p(m), 0.0);
            (p, p)
        }
    };
    let params = separate_roots_with(m, p, q, tol)?;
    let varied = varied_moments(m, params.p, params.effective_q());
    Ok((solve_with(&varied, tol)?, params))
}

/// Correction binomial for `params` over basis `h`.
pub fn correction_binomial(h: &FunctionSpec, n: usize, params: &RegularizationParams) -> Binomial {
    Binomial {
        c1: -params.p * h.coefficient(n - 1),
        k1: n - 1,
        c2: -params.effective_q() * h.coefficient(2 * n - 1),
        k2: 2 * n - 1,
    }
}

/// Interpolating sum of `f` over `h` through order `2n - 1`, regularized
/// when needed. Given `params`, their `p` and `q` are used and a separating
/// shift is searched again.
pub fn regularized_interpolant(
    f: &FunctionSpec,
    h: &FunctionSpec,
    n: usize,
    params: Option<RegularizationParams>,
) -> Result<AFSum> {
    regularized_interpolant_with(f, h, n, params, &Tolerances::default()).map(|(sum, _)| sum)
}

pub fn regularized_interpolant_with(
    f: &FunctionSpec,
    h: &FunctionSpec,
    n: usize,
    params: Option<RegularizationParams>,
    tol: &Tolerances,
) -> Result<(AFSum, RegularizationParams)> {
    let m = moment_sequence(f, h, n)?;
    let (solution, used) = regularized_solution(&m, params.map(|r| (r.p, r.q)), tol)?;
    let binomial = used
        .is_active()
        .then(|| correction_binomial(h, n, &used));
    Ok((solution.into_sum(h.clone(), binomial), used))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn moments(v: &[f64]) -> MomentSequence {
        MomentSequence::from_real(v).unwrap()
    }

    #[test]
    fn variation_touches_two_slots() {
        let m = moments(&[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(varied_moments(&m, c(1.0), c(0.0)), moments(&[1.0, 1.0, 0.0, 1.0]));
        assert_eq!(varied_moments(&m, c(0.0), c(0.0)), m);
        let lin = moments(&(0..8).map(|m| m as f64).collect::<Vec<_>>());
        let v = varied_moments(&lin, c(-1.0), c(4.0));
        assert_eq!(v.as_slice()[3], c(2.0));
        assert_eq!(v.as_slice()[7], c(11.0));
    }

    #[test]
    fn choose_p_rule() {
        assert_eq!(choose_p(&moments(&[0.0, 1.0, 0.0, 0.0])), 3.125);
        assert_eq!(choose_p(&moments(&[0.0; 6])), 1.0);
        assert_eq!(choose_p(&moments(&[1.0; 4])), 3.125);
    }

    #[test]
    fn separation_cases() {
        let r = separate_roots(&moments(&[1.0, 0.0, 0.0, 1.0]), c(1.0), c(0.0)).unwrap();
        assert_eq!(r.delta, c(0.0));
        let lin2 = moments(&[0.0, 1.0, 2.0, 3.0]);
        let r = separate_roots(&lin2, c(0.0), c(0.0)).unwrap();
        assert_ne!(r.delta, c(0.0));
        let split = varied_moments(&lin2, r.p, r.effective_q());
        assert_eq!(crate::prony::is_regular(&split), Verdict::Regular);
        let lin4 = moments(&(0..8).map(|m| m as f64).collect::<Vec<_>>());
        let r = separate_roots(&lin4, c(-1.0), c(4.0)).unwrap();
        assert_eq!(r.delta, c(0.0));
    }

    #[test]
    fn closing_example_over_unit_series() {
        let f = FunctionSpec::RawSeries(vec![c(1.0), c(0.0), c(0.0), c(1.0)]);
        let h = FunctionSpec::RawSeries(vec![c(1.0); 8]);
        let params = RegularizationParams::new(c(1.0), c(0.0));
        let sum = regularized_interpolant(&f, &h, 2, Some(params)).unwrap();
        let b = sum.binomial.unwrap();
        assert_eq!((b.c1, b.k1), (c(-1.0), 1));
        assert_eq!(b.c2, c(0.0));
        let s5 = 5f64.sqrt();
        assert!((sum.frequencies[0] - c(-(1.0 + s5) / 2.0)).norm() < 1e-14);
    }

    #[test]
    fn exp_over_exp_needs_regularization() {
        let sum = regularized_interpolant(&FunctionSpec::Exp, &FunctionSpec::Exp, 2, None).unwrap();
        assert!(sum.binomial.is_some());
        let got = sum.maclaurin(3);
        let want = FunctionSpec::Exp.maclaurin(3);
        for (a, b) in got.coefficients().iter().zip(want.coefficients()) {
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
        let one = regularized_interpolant(&FunctionSpec::Exp, &FunctionSpec::Exp, 1, None).unwrap();
        assert_eq!(one.amplitudes, vec![c(1.0)]);
        assert_eq!(one.frequencies, vec![c(1.0)]);
        assert!(one.binomial.is_none());
    }
}
