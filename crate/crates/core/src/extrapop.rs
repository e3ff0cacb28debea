//! Universal extrapolation operator
//!
//! `f(az) ≈ Σ μ_k f(λ_k z) - p f_{n-1} z^{n-1}`, with every node strictly
//! inside the disc of radius `δa`, `δ < 1`.

use crate::exec::{try_map_ordered, Execution};
use crate::polyroots::ComplexPolynomial;
use crate::prony::{compensated_sum, roots_are_simple, solve_with_roots, MomentSequence, Tolerances, Verdict};
use crate::series::{FunctionSpec, Maclaurin};
use crate::{AfsumError, Result, C64};

/// Number of trailing nonzero coefficients inspected for a ratio bound.
const TAIL_WINDOW: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapOperator {
    pub n: usize,
    pub a: f64,
    pub p: f64,
    pub amplitudes: Vec<C64>,
    pub frequencies: Vec<C64>,
    /// `δ`, with `|λ_k| < δa`.
    pub contraction: f64,
}

/// Value of [`remainder_bound`]; `lower_estimate` is set when no tail
/// majorant could be established and `value` is only the partial sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemainderBound {
    pub value: f64,
    pub lower_estimate: bool,
}

fn check_params(n: usize, a: f64, p: f64) -> Result<()> {
    if n == 0 {
        return Err(AfsumError::InvalidArgument("n must be at least 1".into()));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(AfsumError::InvalidArgument(format!("a must be positive, got {a}")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(AfsumError::InvalidArgument(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// Monic `λⁿ - (a^{2n-1} / (n a^{n-1} + p)) Σ_{m<n} λ^m / a^m`.
pub fn extrap_generating_poly(n: usize, a: f64, p: f64) -> Result<ComplexPolynomial> {
    check_params(n, a, p)?;
    let denom = n as f64 * a.powi(n as i32 - 1) + p;
    let mut coeffs: Vec<C64> = (0..n)
        .map(|m| C64::new(-a.powi((2 * n - 1 - m) as i32) / denom, 0.0))
        .collect();
    coeffs.push(C64::new(1.0, 0.0));
    Ok(ComplexPolynomial::new(coeffs))
}

/// Unnormalized coefficients `ǧ_0..ǧ_n` for moments `a^m` varied by `p` at
/// `n-1` and `q` at `2n-1`, with `κ = (-1)^{n(n+1)/2} p^{n-2}`.
pub fn extrap_coeffs_general(n: usize, a: f64, p: f64, q: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(AfsumError::InvalidArgument("n must be at least 1".into()));
    }
    let lead = n as f64 * a.powi(n as i32 - 1);
    if p == 0.0 || p == -lead {
        return Err(AfsumError::InvalidArgument(format!(
            "p = {p} makes the leading coefficient vanish"
        )));
    }
    let sign = if (n * (n + 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let kappa = sign * p.powi(n as i32 - 2);
    let an = a.powi(n as i32);
    let mut g = vec![0.0; n + 1];
    g[n] = kappa * p * (lead + p);
    g[0] = -kappa
        * (a.powi(2 * n as i32 - 1) * p + (n as f64 - 1.0) * a.powi(n as i32 - 1) * q + p * q);
    for (m, gm) in g.iter_mut().enumerate().take(n).skip(1) {
        *gm = -kappa * a.powi((n - 1 - m) as i32) * (an * p - q);
    }
    Ok(g)
}

/// `δ = (1 + p / (n a^{n-1}))^{-1/n}`.
pub fn contraction_factor(n: usize, a: f64, p: f64) -> f64 {
    (1.0 + p / (n as f64 * a.powi(n as i32 - 1))).powf(-1.0 / n as f64)
}

/// Moments `s_m = a^m` with `s_{n-1} += p` and `s_{2n-1} += q`.
pub fn extrap_moments(n: usize, a: f64, p: f64, q: f64) -> MomentSequence {
    let mut s: Vec<C64> = (0..2 * n).map(|m| C64::new(a.powi(m as i32), 0.0)).collect();
    s[n - 1] += p;
    s[2 * n - 1] += q;
    MomentSequence::new(s).expect("finite moments of positive even length")
}

pub fn build_extrap_operator(n: usize, a: f64, p: f64) -> Result<ExtrapOperator> {
    build_extrap_operator_with(n, a, p, &Tolerances::default())
}

pub fn build_extrap_operator_with(n: usize, a: f64, p: f64, tol: &Tolerances) -> Result<ExtrapOperator> {
    let poly = extrap_generating_poly(n, a, p)?;
    let roots = poly.roots()?;
    if !roots_are_simple(&poly, &roots, tol) {
        return Err(AfsumError::NonRegular(Verdict::MultipleRoots));
    }
    let solution = solve_with_roots(roots, &extrap_moments(n, a, p, 0.0), tol)?;
    let max_amplitude = solution.amplitudes.iter().map(|m| m.norm()).fold(0.0, f64::max);
    log::debug!("extrapolation operator n={n} a={a} p={p}: max|mu| = {max_amplitude:e}");
    Ok(ExtrapOperator {
        n,
        a,
        p,
        amplitudes: solution.amplitudes,
        frequencies: solution.frequencies,
        contraction: contraction_factor(n, a, p),
    })
}

impl ExtrapOperator {
    /// Approximation of `f(az)`.
    pub fn apply(&self, f: &FunctionSpec, z: C64) -> Result<C64> {
        let terms = self
            .amplitudes
            .iter()
            .zip(&self.frequencies)
            .map(|(mu, l)| Ok(mu * f.evaluate(l * z)?))
            .collect::<Result<Vec<C64>>>()?;
        let n = self.n;
        let correction = self.p * f.coefficient(n - 1) * z.powu((n - 1) as u32);
        Ok(compensated_sum(terms) - correction)
    }

    pub fn apply_many(&self, f: &FunctionSpec, zs: &[C64], exec: Execution) -> Result<Vec<C64>> {
        try_map_ordered(exec, zs, |&z| self.apply(f, z))
    }

    pub fn power_sum(&self, v: usize) -> C64 {
        crate::prony::power_sum(&self.amplitudes, &self.frequencies, v)
    }
}

pub fn apply_extrap(op: &ExtrapOperator, f: &FunctionSpec, z: C64) -> Result<C64> {
    op.apply(f, z)
}

/// `Σ_{m=2n}^{M} |f_m| |az|^m`, plus a geometric majorant of the rest when
/// the last few nonzero coefficients decay at a rate `ρ < 1/|az|`.
pub fn remainder_bound(op: &ExtrapOperator, f: &FunctionSpec, z: C64, order: usize) -> RemainderBound {
    let r = op.a * z.norm();
    let start = 2 * op.n;
    if r == 0.0 || order < start {
        return RemainderBound {
            value: 0.0,
            lower_estimate: r != 0.0,
        };
    }
    let coeffs = f.coefficients(order);
    let partial: f64 = (start..=order)
        .map(|m| coeffs[m].norm() * r.powi(m as i32))
        .sum();

    let finite_len = match f {
        FunctionSpec::Polynomial(c) | FunctionSpec::RawSeries(c) => Some(c.len()),
        _ => None,
    };
    if finite_len.is_some_and(|len| order + 1 >= len) {
        return RemainderBound {
            value: partial,
            lower_estimate: false,
        };
    }

    let nonzero: Vec<usize> = (0..=order).rev().filter(|&m| coeffs[m].norm() > 0.0).take(TAIL_WINDOW).collect();
    if nonzero.len() < 2 {
        return RemainderBound {
            value: partial,
            lower_estimate: true,
        };
    }
    let rho = nonzero
        .windows(2)
        .map(|w| {
            let (hi, lo) = (w[0], w[1]);
            (coeffs[hi].norm() / coeffs[lo].norm()).powf(1.0 / (hi - lo) as f64)
        })
        .fold(0.0, f64::max);
    let ratio = rho * r;
    if ratio >= 1.0 {
        return RemainderBound {
            value: partial,
            lower_estimate: true,
        };
    }
    let last = nonzero[0];
    let tail = coeffs[last].norm() * r.powi(last as i32) * ratio.powi((order - last) as i32) * ratio
        / (1.0 - ratio);
    RemainderBound {
        value: partial + tail,
        lower_estimate: false,
    }
}
