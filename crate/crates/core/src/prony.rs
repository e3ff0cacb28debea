//! The discrete moment problem `Σ μ_k λ_k^m = s_m`, `m = 0..2n-1`.
//!
//! [`generating_polynomial`] solves the Hankel system for the monic
//! polynomial whose roots are the frequencies, [`is_regular`] applies the
//! degree-and-distinct-roots test, and [`solve`] recovers the amplitudes with
//! Sylvester's formula.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, PivotFailure};
use crate::polyroots::{min_separation, ComplexPolynomial};
use crate::series::{FunctionSpec, Maclaurin, TruncatedSeries};
use crate::{AfsumError, Result, C64};

/// Numerical thresholds shared by the moment-problem routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative pivot threshold for Hankel and Vandermonde elimination.
    pub pivot: f64,
    /// Roots closer than `separation · (1 + max|λ|)` count as multiple.
    pub separation: f64,
    /// Accepted moment residual, relative to `1 + max|s_m|`.
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pivot: 1e-10,
            separation: 1e-8,
            residual: 1e-9,
        }
    }
}

/// Relative threshold on `|G'(λ_k)|` in Sylvester's amplitude formula.
const DERIVATIVE_FLOOR: f64 = 1e-12;

/// Safety factor between a root pair's separation and its first-order
/// rounding uncertainty.
const NOISE_SEPARATION_FACTOR: f64 = 16.0;

/// Moments `s_0..s_{2n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    s: Vec<C64>,
}

impl MomentSequence {
    pub fn new(s: Vec<C64>) -> Result<Self> {
        if s.is_empty() || !s.len().is_multiple_of(2) {
            return Err(AfsumError::InvalidArgument(format!(
                "a moment sequence needs a positive even length, got {}",
                s.len()
            )));
        }
        if let Some(bad) = s.iter().position(|v| !v.is_finite()) {
            return Err(AfsumError::InvalidArgument(format!(
                "moment s_{bad} is not finite"
            )));
        }
        Ok(MomentSequence { s })
    }

    pub fn from_real(s: &[f64]) -> Result<Self> {
        Self::new(s.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.s.len() / 2
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.s
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.s
    }

    pub fn max_abs(&self) -> f64 {
        self.s.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn hankel(&self) -> Vec<Vec<C64>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.s[i + j]).collect())
            .collect()
    }
}

/// Outcome of the regularity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Regular,
    DegreeDeficient,
    MultipleRoots,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Regular => "regular",
            Verdict::DegreeDeficient => "degree_deficient",
            Verdict::MultipleRoots => "multiple_roots",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Correction `c1 z^k1 + c2 z^k2` added by regularization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Binomial {
    pub c1: C64,
    pub k1: usize,
    pub c2: C64,
    pub k2: usize,
}

impl Binomial {
    pub fn eval(&self, z: C64) -> C64 {
        self.c1 * z.powu(self.k1 as u32) + self.c2 * z.powu(self.k2 as u32)
    }

    /// Contribution to the Maclaurin coefficient of order `m`.
    pub fn coefficient(&self, m: usize) -> C64 {
        let mut c = C64::new(0.0, 0.0);
        if m == self.k1 {
            c += self.c1;
        }
        if m == self.k2 {
            c += self.c2;
        }
        c
    }
}

/// Amplitudes and frequencies solving a moment problem.
#[derive(Clone, Debug, PartialEq)]
pub struct PronySolution {
    pub amplitudes: Vec<C64>,
    pub frequencies: Vec<C64>,
}

impl PronySolution {
    pub fn n(&self) -> usize {
        self.frequencies.len()
    }

    /// `S_v = Σ μ_k λ_k^v`.
    pub fn power_sum(&self, v: usize) -> C64 {
        power_sum(&self.amplitudes, &self.frequencies, v)
    }

    /// Attach a basis and optional binomial.
    pub fn into_sum(self, basis: FunctionSpec, binomial: Option<Binomial>) -> AFSum {
        AFSum {
            amplitudes: self.amplitudes,
            frequencies: self.frequencies,
            basis,
            binomial,
        }
    }
}

/// `c1 z^{n-1} + c2 z^{2n-1} + Σ μ_k h(λ_k z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AFSum {
    pub amplitudes: Vec<C64>,
    pub frequencies: Vec<C64>,
    pub basis: FunctionSpec,
    pub binomial: Option<Binomial>,
}

impl AFSum {
    pub fn n(&self) -> usize {
        self.frequencies.len()
    }

    pub fn power_sum(&self, v: usize) -> C64 {
        power_sum(&self.amplitudes, &self.frequencies, v)
    }

    pub fn evaluate(&self, z: C64) -> Result<C64> {
        evaluate_sum(self, z)
    }

    /// Maclaurin coefficients `h_m S_m` plus binomial terms, through `order`.
    pub fn maclaurin(&self, order: usize) -> TruncatedSeries {
        let h = self.basis.coefficients(order);
        let coeffs = h
            .iter()
            .enumerate()
            .map(|(m, hm)| {
                let b = self.binomial.map_or(C64::new(0.0, 0.0), |b| b.coefficient(m));
                hm * self.power_sum(m) + b
            })
            .collect();
        TruncatedSeries::new(coeffs)
    }
}

/// Neumaier-compensated complex sum.
pub(crate) fn compensated_sum(terms: impl IntoIterator<Item = C64>) -> C64 {
    fn step(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }
    let (mut re, mut re_c, mut im, mut im_c) = (0.0, 0.0, 0.0, 0.0);
    for t in terms {
        step(&mut re, &mut re_c, t.re);
        step(&mut im, &mut im_c, t.im);
    }
    C64::new(re + re_c, im + im_c)
}

/// `s_m = f_m / h_m` (zero where `f_m = 0`).
pub fn moment_sequence(f: &impl Maclaurin, h: &impl Maclaurin, n: usize) -> Result<MomentSequence> {
    if n == 0 {
        return Err(AfsumError::InvalidArgument("n must be at least 1".into()));
    }
    let fc = f.coefficients(2 * n - 1);
    let hc = h.coefficients(2 * n - 1);
    let mut s = Vec::with_capacity(2 * n);
    for (m, (fm, hm)) in fc.into_iter().zip(hc).enumerate() {
        if fm == C64::new(0.0, 0.0) {
            s.push(C64::new(0.0, 0.0));
        } else if hm == C64::new(0.0, 0.0) {
            return Err(AfsumError::IncompatibleBasis { index: m, value: fm });
        } else {
            s.push(fm / hm);
        }
    }
    MomentSequence::new(s)
}

/// Monic generating polynomial from the Hankel system.
pub fn generating_polynomial(m: &MomentSequence) -> Result<ComplexPolynomial> {
    generating_polynomial_with(m, &Tolerances::default())
}

pub fn generating_polynomial_with(m: &MomentSequence, tol: &Tolerances) -> Result<ComplexPolynomial> {
    let n = m.n();
    let rhs: Vec<C64> = m.s[n..].iter().map(|v| -v).collect();
    let g = linalg::solve_refined(&m.hankel(), &rhs, tol.pivot, 2).map_err(
        |PivotFailure {
             column,
             pivot,
             threshold,
         }| AfsumError::Degenerate {
            n,
            column,
            pivot,
            threshold,
        },
    )?;
    let mut coeffs = g;
    coeffs.push(C64::new(1.0, 0.0));
    Ok(ComplexPolynomial::new(coeffs))
}

/// Numerical rank of the `n × n` Hankel matrix `(s_{i+j})`.
pub fn hankel_rank(m: &MomentSequence) -> usize {
    hankel_rank_with(m, &Tolerances::default())
}

pub fn hankel_rank_with(m: &MomentSequence, tol: &Tolerances) -> usize {
    linalg::numerical_rank(m.hankel(), tol.pivot)
}

/// Classify the roots of `poly`: distinct within tolerance, or a cluster.
///
/// A pair is also treated as one multiple root when its separation is within
/// a small factor of the first-order rounding uncertainty of each root,
/// `n ε Σ|g_m||r|^m / |G'(r)|`, which is how a computed double root shows up.
pub fn roots_are_simple(poly: &ComplexPolynomial, roots: &[C64], tol: &Tolerances) -> bool {
    if roots.len() < 2 {
        return true;
    }
    let max_root = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if min_separation(roots) <= tol.separation * (1.0 + max_root) || roots.iter().any(|r| r.is_nan()) {
        return false;
    }
    let deriv = poly.derivative();
    let n = poly.degree() as f64;
    let uncertainty: Vec<f64> = roots
        .iter()
        .map(|&r| {
            let noise = 2.0 * n * f64::EPSILON * poly.eval_magnitude(r);
            noise / deriv.eval(r).norm()
        })
        .collect();
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let gap = (roots[i] - roots[j]).norm();
            let floor = NOISE_SEPARATION_FACTOR * (uncertainty[i] + uncertainty[j]);
            if gap.is_nan() || floor.is_nan() || gap <= floor {
                return false;
            }
        }
    }
    true
}

/// Generating polynomial and its simple roots, or the reason there are none.
fn frequencies(m: &MomentSequence, tol: &Tolerances) -> Result<Vec<C64>> {
    let poly = generating_polynomial_with(m, tol)?;
    if poly.degree() < m.n() {
        return Err(AfsumError::NonRegular(Verdict::DegreeDeficient));
    }
    let roots = poly.roots()?;
    if !roots_are_simple(&poly, &roots, tol) {
        return Err(AfsumError::NonRegular(Verdict::MultipleRoots));
    }
    Ok(roots)
}

pub fn is_regular(m: &MomentSequence) -> Verdict {
    is_regular_with(m, &Tolerances::default())
}

pub fn is_regular_with(m: &MomentSequence, tol: &Tolerances) -> Verdict {
    match frequencies(m, tol) {
        Ok(_) => Verdict::Regular,
        Err(AfsumError::NonRegular(v)) => v,
        Err(AfsumError::NonConvergence { .. }) => Verdict::MultipleRoots,
        Err(_) => Verdict::DegreeDeficient,
    }
}

/// Ascending coefficients of `Π_{j≠skip} (x - λ_j)`.
fn cofactor_coefficients(roots: &[C64], skip: usize) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for (j, &r) in roots.iter().enumerate() {
        if j == skip {
            continue;
        }
        c.push(C64::new(0.0, 0.0));
        for i in (0..c.len()).rev() {
            let lower = if i > 0 { c[i - 1] } else { C64::new(0.0, 0.0) };
            c[i] = lower - r * c[i];
        }
    }
    c
}

/// Amplitudes by Sylvester's formula: `μ_k = Σ_i c_i^{(k)} s_i / G'(λ_k)`
/// where `c^{(k)}` are the coefficients of `G(x) / (x - λ_k)` and `G` is monic.
pub fn amplitudes_sylvester(roots: &[C64], m: &MomentSequence) -> Result<Vec<C64>> {
    check_root_count(roots, m)?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    let threshold = DERIVATIVE_FLOOR * scale.powi(roots.len() as i32 - 1);
    roots
        .iter()
        .enumerate()
        .map(|(k, &lk)| {
            let c = cofactor_coefficients(roots, k);
            let numerator = compensated_sum(c.iter().zip(&m.s).map(|(ci, si)| ci * si));
            let derivative: C64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &lj)| lk - lj)
                .product();
            if derivative.norm().is_nan() || derivative.norm() < threshold {
                return Err(AfsumError::SingularDerivative {
                    index: k,
                    value: derivative.norm(),
                    threshold,
                });
            }
            Ok(numerator / derivative)
        })
        .collect()
}

/// Amplitudes from the first `n` moment equations by pivoted elimination.
pub fn amplitudes_vandermonde(roots: &[C64], m: &MomentSequence) -> Result<Vec<C64>> {
    amplitudes_vandermonde_with(roots, m, &Tolerances::default())
}

pub fn amplitudes_vandermonde_with(
    roots: &[C64],
    m: &MomentSequence,
    tol: &Tolerances,
) -> Result<Vec<C64>> {
    check_root_count(roots, m)?;
    let n = roots.len();
    let a: Vec<Vec<C64>> = (0..n)
        .map(|row| roots.iter().map(|r| r.powu(row as u32)).collect())
        .collect();
    linalg::solve_pivoted(a, m.s[..n].to_vec(), tol.pivot).map_err(
        |PivotFailure {
             column,
             pivot,
             threshold,
         }| AfsumError::SingularSystem {
            column,
            pivot,
            threshold,
        },
    )
}

fn check_root_count(roots: &[C64], m: &MomentSequence) -> Result<()> {
    if roots.len() != m.n() {
        return Err(AfsumError::InvalidArgument(format!(
            "{} roots given for a moment problem of order {}",
            roots.len(),
            m.n()
        )));
    }
    Ok(())
}

/// Largest `|Σ μ_k λ_k^m - s_m|` over all `2n` moments.
pub fn moment_residual(solution: &PronySolution, m: &MomentSequence) -> f64 {
    m.s.iter()
        .enumerate()
        .map(|(v, s)| (solution.power_sum(v) - s).norm())
        .fold(0.0, f64::max)
}

/// Smallest residual that `f64` evaluation of the power sums can resolve.
fn rounding_floor(solution: &PronySolution, len: usize) -> f64 {
    let weight = (0..len)
        .map(|v| {
            solution
                .amplitudes
                .iter()
                .zip(&solution.frequencies)
                .map(|(mu, l)| mu.norm() * l.norm().powi(v as i32))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    8.0 * solution.n() as f64 * f64::EPSILON * weight
}

pub(crate) fn check_residual(solution: &PronySolution, m: &MomentSequence, tol: &Tolerances) -> Result<()> {
    let residual = moment_residual(solution, m);
    let limit = (tol.residual * (1.0 + m.max_abs())).max(rounding_floor(solution, m.s.len()));
    if residual.is_nan() || residual > limit {
        return Err(AfsumError::Residual { residual, limit });
    }
    Ok(())
}

/// Amplitudes for known simple roots, verified against all `2n` moments.
pub(crate) fn solve_with_roots(roots: Vec<C64>, m: &MomentSequence, tol: &Tolerances) -> Result<PronySolution> {
    let amplitudes = amplitudes_sylvester(&roots, m)?;
    if cfg!(debug_assertions) {
        if let Ok(check) = amplitudes_vandermonde_with(&roots, m, tol) {
            let scale = amplitudes.iter().map(|v| v.norm()).fold(1.0, f64::max);
            let gap = amplitudes
                .iter()
                .zip(&check)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if gap > 1e-6 * scale {
                log::warn!("Sylvester and Vandermonde amplitudes differ by {gap:e}");
            }
        }
    }
    let solution = PronySolution {
        amplitudes,
        frequencies: roots,
    };
    check_residual(&solution, m, tol)?;
    Ok(solution)
}

/// Solve a regular moment problem.
pub fn solve(m: &MomentSequence) -> Result<PronySolution> {
    solve_with(m, &Tolerances::default())
}

pub fn solve_with(m: &MomentSequence, tol: &Tolerances) -> Result<PronySolution> {
    let roots = match frequencies(m, tol) {
        Err(AfsumError::Degenerate { .. }) => {
            return Err(AfsumError::NonRegular(Verdict::DegreeDeficient))
        }
        other => other?,
    };
    solve_with_roots(roots, m, tol)
}

/// `Σ μ_k λ_k^v`.
pub fn power_sum(amplitudes: &[C64], frequencies: &[C64], v: usize) -> C64 {
    compensated_sum(
        amplitudes
            .iter()
            .zip(frequencies)
            .map(|(mu, l)| mu * l.powu(v as u32)),
    )
}

/// Extend `S_0..S_{2n-1}` to `S_0..S_{len-1}` with the recurrence
/// `S_v = -Σ_{m<n} g_m S_{v-n+m}` of a monic degree-`n` polynomial.
pub fn newton_power_sums(monic: &ComplexPolynomial, initial: &[C64], len: usize) -> Vec<C64> {
    let n = monic.degree();
    let g = monic.coeffs();
    let mut s = initial.to_vec();
    while s.len() < len {
        let v = s.len();
        let next = -(0..n).map(|m| g[m] * s[v - n + m]).sum::<C64>();
        s.push(next);
    }
    s.truncate(len.max(initial.len()));
    s
}

/// True when every leading principal minor of `(s_{i+j})` is positive.
///
/// Moments with a nonzero imaginary part are never positive.
pub fn is_positive_sequence(m: &MomentSequence) -> bool {
    is_positive_sequence_with(m, &Tolerances::default())
}

pub fn is_positive_sequence_with(m: &MomentSequence, tol: &Tolerances) -> bool {
    if m.s.iter().any(|v| v.im != 0.0) {
        return false;
    }
    let n = m.n();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m.s[i + j].re).collect())
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let pivots = linalg::leading_pivots(a);
    pivots.len() == n && pivots.iter().all(|&p| p > tol.pivot * scale)
}

/// `c1 z^{n-1} + c2 z^{2n-1} + Σ μ_k h(λ_k z)`.
pub fn evaluate_sum(sum: &AFSum, z: C64) -> Result<C64> {
    let terms = sum
        .amplitudes
        .iter()
        .zip(&sum.frequencies)
        .map(|(mu, l)| Ok(mu * sum.basis.evaluate(l * z)?))
        .collect::<Result<Vec<C64>>>()?;
    let binomial = sum.binomial.map_or(C64::new(0.0, 0.0), |b| b.eval(z));
    Ok(compensated_sum(terms) + binomial)
}
