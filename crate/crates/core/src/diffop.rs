//! Universal differentiation operator
//!
//! `z f'(z) ≈ Σ μ_k f(λ_k z) - p f_{n-1} z^{n-1} - q f_{2n-1} z^{2n-1}`,
//! exact for polynomials of degree at most `2n - 1`. The nodes and weights
//! depend only on `n` and `p`; the coupling `q = q0(n, p)` makes the
//! generating polynomial available in closed form.

use std::f64::consts::PI;

use crate::exec::{try_map_ordered, Execution};
use crate::polyroots::ComplexPolynomial;
use crate::prony::{compensated_sum, roots_are_simple, solve_with_roots, MomentSequence, Tolerances};
use crate::series::{FunctionSpec, Maclaurin, Parity};
use crate::{AfsumError, Result, C64};

/// Minimum distance between `p` and the degenerate set.
pub const FORBIDDEN_DISTANCE: f64 = 1e-6;

const PERTURBATION_TRIALS: usize = 41;

#[derive(Clone, Debug, PartialEq)]
pub struct DiffOperator {
    pub n: usize,
    pub p: C64,
    pub q: C64,
    pub amplitudes: Vec<C64>,
    pub frequencies: Vec<C64>,
    /// Upper bound on `|λ_k|`.
    pub lambda_bound: f64,
    /// Leading remainder factor: `z f'(z) - apply(f, z) = C z^{2n} f_{2n} + …`.
    pub remainder_factor: C64,
}

fn check_order(n: usize) -> Result<()> {
    if n < 3 {
        return Err(AfsumError::InvalidArgument(format!(
            "the differentiation operator needs n >= 3, got {n}"
        )));
    }
    Ok(())
}

fn pair_denominator(n: usize) -> f64 {
    ((n - 1) * (n - 2)) as f64
}

/// The values of `p` at which the leading coefficient of the varied
/// generating polynomial vanishes: `0` and `(n/2)(1 - n ± √((2/3)(n-1)(n-2)))`.
pub fn forbidden_set(n: usize) -> [C64; 3] {
    let nf = n as f64;
    let d = (2.0 / 3.0 * (nf - 1.0) * (nf - 2.0)).sqrt();
    [
        C64::new(0.0, 0.0),
        C64::new(nf / 2.0 * (1.0 - nf + d), 0.0),
        C64::new(nf / 2.0 * (1.0 - nf - d), 0.0),
    ]
}

fn check_p(n: usize, p: C64) -> Result<()> {
    if !p.is_finite() {
        return Err(AfsumError::InvalidArgument(format!("p = {p} is not finite")));
    }
    let distance = forbidden_set(n)
        .iter()
        .map(|f| (p - f).norm())
        .fold(f64::INFINITY, f64::min);
    if distance <= FORBIDDEN_DISTANCE {
        return Err(AfsumError::ForbiddenP { n, p, distance });
    }
    Ok(())
}

/// The coupling `q0(p) = -2p(3p + n² - 1) / ((n-1)(n-2))`.
pub fn q0(n: usize, p: C64) -> C64 {
    let nf = n as f64;
    -2.0 * p * (3.0 * p + nf * nf - 1.0) / pair_denominator(n)
}

/// Bound `Λ = (2(1 + 3|p|/((n-1)(n-2))))^{3/√(n-2)}` on the node moduli.
pub fn lambda_bound(n: usize, p: C64) -> f64 {
    let base = 2.0 * (1.0 + 3.0 * p.norm() / pair_denominator(n));
    base.powf(3.0 / ((n - 2) as f64).sqrt())
}

/// `C_n(p) = 6np / ((n-1)(n-2))`.
pub fn remainder_factor(n: usize, p: C64) -> C64 {
    6.0 * n as f64 * p / pair_denominator(n)
}

/// Moments `s_m = m` varied by `p` at `n-1` and `q` at `2n-1`.
pub fn diff_moments(n: usize, p: C64, q: C64) -> MomentSequence {
    let mut s: Vec<C64> = (0..2 * n).map(|m| C64::new(m as f64, 0.0)).collect();
    s[n - 1] += p;
    s[2 * n - 1] += q;
    MomentSequence::new(s).expect("finite moments of positive even length")
}

/// Monic generating polynomial for `q = q0(n, p)`:
/// `λⁿ - (6/((n-1)(n-2))) Σ_{m=1}^{n-1} (n-m-1) λ^m + 2 + 6p/((n-1)(n-2))`.
pub fn diff_generating_poly(n: usize, p: C64) -> Result<ComplexPolynomial> {
    check_order(n)?;
    check_p(n, p)?;
    let d = pair_denominator(n);
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[0] = 2.0 + 6.0 * p / d;
    for (m, c) in coeffs.iter_mut().enumerate().take(n).skip(1) {
        *c = C64::new(-6.0 * (n - m - 1) as f64 / d, 0.0);
    }
    coeffs[n] = C64::new(1.0, 0.0);
    Ok(ComplexPolynomial::new(coeffs))
}

/// Unnormalized coefficients `ĝ_0..ĝ_n` of the varied generating
/// polynomial for arbitrary `q`, with `κ = (-1)^{n(n+1)/2} p^{n-3}`.
/// For `n < 3`, `p` must be nonzero.
pub fn diff_coeffs_general(n: usize, p: C64, q: C64) -> Vec<C64> {
    let nf = n as f64;
    let sign = if (n * (n + 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let kappa = sign * p.powi(n as i32 - 3);
    let mut g = vec![C64::new(0.0, 0.0); n + 1];
    g[n] = kappa * p * (p * p + nf * (nf - 1.0) * p + nf * nf * (nf * nf - 1.0) / 12.0);
    g[0] = -kappa
        * (p * p * q + (2.0 * nf - 1.0) * p * p + (nf - 1.0).powi(2) * p * q
            - nf * (nf * nf - 1.0) / 6.0 * p
            + (nf - 2.0) * nf * (nf - 1.0).powi(2) / 12.0 * q);
    for (m, gm) in g.iter_mut().enumerate().take(n).skip(1) {
        let k = m as f64 + 1.0;
        *gm = -kappa
            * ((2.0 * nf - k) * p * p
                - (nf - k) * p * q
                - nf * (nf + 1.0) / 2.0 * ((nf + 2.0) / 3.0 - k) * p
                - nf * (nf - 1.0) / 2.0 * (2.0 * (nf + 1.0) / 3.0 - k) * q);
    }
    g
}

/// `p`-shift for the `j`-th attempt at splitting a multiple root.
fn perturbation(p: C64, j: usize) -> C64 {
    C64::from_polar(1e-2 * 0.5f64.powi(j as i32) * (1.0 + p.norm()), PI / 7.0)
}

fn simple_roots(n: usize, p: C64, tol: &Tolerances) -> Result<Option<Vec<C64>>> {
    let poly = diff_generating_poly(n, p)?;
    let roots = poly.roots()?;
    Ok(roots_are_simple(&poly, &roots, tol).then_some(roots))
}

/// Build the operator for order `n` and parameter `p`. When the roots at `p`
/// are not simple, `p` is shifted by the smallest trial step that separates them.
pub fn build_diff_operator(n: usize, p: C64) -> Result<DiffOperator> {
    build_diff_operator_with(n, p, &Tolerances::default())
}

pub fn build_diff_operator_with(n: usize, p: C64, tol: &Tolerances) -> Result<DiffOperator> {
    check_order(n)?;
    check_p(n, p)?;
    let (p, roots) = match simple_roots(n, p, tol)? {
        Some(roots) => (p, roots),
        None => (0..PERTURBATION_TRIALS)
            .map(|j| p + perturbation(p, j))
            .find_map(|candidate| match simple_roots(n, candidate, tol) {
                Ok(Some(roots)) => Some((candidate, roots)),
                _ => None,
            })
            .ok_or(AfsumError::SeparationFailure {
                trials: PERTURBATION_TRIALS,
            })?,
    };
    let q = q0(n, p);
    let solution = solve_with_roots(roots, &diff_moments(n, p, q), tol)?;
    Ok(DiffOperator {
        n,
        p,
        q,
        amplitudes: solution.amplitudes,
        frequencies: solution.frequencies,
        lambda_bound: lambda_bound(n, p),
        remainder_factor: remainder_factor(n, p),
    })
}

impl DiffOperator {
    /// Approximation of `z f'(z)`.
    pub fn apply(&self, f: &FunctionSpec, z: C64) -> Result<C64> {
        let terms = self
            .amplitudes
            .iter()
            .zip(&self.frequencies)
            .map(|(mu, l)| Ok(mu * f.evaluate(l * z)?))
            .collect::<Result<Vec<C64>>>()?;
        Ok(compensated_sum(terms) - self.correction(f, z))
    }

    /// Apply at many points, preserving order.
    pub fn apply_many(&self, f: &FunctionSpec, zs: &[C64], exec: Execution) -> Result<Vec<C64>> {
        try_map_ordered(exec, zs, |&z| self.apply(f, z))
    }

    fn correction(&self, f: &FunctionSpec, z: C64) -> C64 {
        let n = self.n;
        // n-1 and 2n-1 share parity, so a function of the opposite parity
        // has neither coefficient.
        let skip = match f.parity() {
            Parity::Even => n.is_multiple_of(2),
            Parity::Odd => n % 2 == 1,
            Parity::None => false,
        };
        if skip {
            return C64::new(0.0, 0.0);
        }
        self.p * f.coefficient(n - 1) * z.powu((n - 1) as u32)
            + self.q * f.coefficient(2 * n - 1) * z.powu((2 * n - 1) as u32)
    }
}

/// Free-function form of [`DiffOperator::apply`].
pub fn apply_diff(op: &DiffOperator, f: &FunctionSpec, z: C64) -> Result<C64> {
    op.apply(f, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn degenerate_set() {
        let s3 = 3f64.sqrt();
        let f3 = forbidden_set(3);
        assert!((f3[1] - c(-3.0 + s3, 0.0)).norm() < 1e-14);
        assert!((f3[2] - c(-3.0 - s3, 0.0)).norm() < 1e-14);
        let f4 = forbidden_set(4);
        assert!((f4[1] - c(-2.0, 0.0)).norm() < 1e-14);
        assert!((f4[2] - c(-10.0, 0.0)).norm() < 1e-14);
        for n in 3..12 {
            let nf = n as f64;
            let constant = nf * nf * (nf * nf - 1.0) / 12.0;
            for p in &forbidden_set(n)[1..] {
                let factor = p * p + nf * (nf - 1.0) * p + constant;
                assert!(factor.norm() < 1e-12 * constant, "n = {n}, p = {p}");
            }
            assert_eq!(diff_coeffs_general(n, c(0.0, 0.0), c(1.0, 0.0))[n].norm(), 0.0);
        }
        assert!(matches!(
            build_diff_operator(4, c(-2.0, 0.0)),
            Err(AfsumError::ForbiddenP { .. })
        ));
        assert!(build_diff_operator(4, c(-1.0, 0.0)).is_ok());
    }

    #[test]
    fn coupling_values() {
        assert_eq!(q0(4, c(-1.0, 0.0)), c(4.0, 0.0));
        assert_eq!(q0(7, c(0.0, 0.0)).norm(), 0.0);
        assert_eq!(q0(5, c(1.0, 0.0)), c(-4.5, 0.0));
    }

    #[test]
    fn closed_form_polynomials() {
        let g = diff_generating_poly(4, c(-1.0, 0.0)).unwrap();
        assert_eq!(g, ComplexPolynomial::from_real(&[1.0, -2.0, -1.0, 0.0, 1.0]));
        let g = diff_generating_poly(3, c(1.0, 0.0)).unwrap();
        assert_eq!(g, ComplexPolynomial::from_real(&[5.0, -3.0, 0.0, 1.0]));
    }

    #[test]
    fn general_coefficients_at_worked_example() {
        let g = diff_coeffs_general(4, c(-1.0, 0.0), c(4.0, 0.0));
        assert!((g[4] - c(9.0, 0.0)).norm() < 1e-12);
        let monic: Vec<C64> = g.iter().map(|v| v / g[4]).collect();
        let want = diff_generating_poly(4, c(-1.0, 0.0)).unwrap();
        for (a, b) in monic.iter().zip(want.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        for n in 3..10 {
            let p = c(0.7, -0.2);
            let g = diff_coeffs_general(n, p, q0(n, p));
            assert!(g[n - 1].norm() < 1e-10 * g[n].norm());
        }
    }

    #[test]
    fn worked_example_operator() {
        let op = build_diff_operator(4, c(-1.0, 0.0)).unwrap();
        assert_eq!(op.q, c(4.0, 0.0));
        assert_eq!(op.remainder_factor, c(-4.0, 0.0));
        assert!((op.lambda_bound - 3f64.powf(3.0 / 2f64.sqrt())).abs() < 1e-12);
        for l in &op.frequencies {
            assert!(l.norm() <= op.lambda_bound);
        }
    }

    #[test]
    fn rejects_low_orders() {
        assert!(matches!(
            build_diff_operator(2, c(-1.0, 0.0)),
            Err(AfsumError::InvalidArgument(_))
        ));
    }
}
