//! Classical special cases: Gauss rules, Padé approximants, exponential
//! sums and Bessel approximants, plus grid error tables.

use std::f64::consts::PI;

use crate::dd::Dd;
use crate::exec::{try_map_ordered, Execution};
use crate::prony::{moment_sequence, solve, MomentSequence, PronySolution};
use crate::series::{FunctionSpec, Maclaurin, TruncatedSeries};
use crate::{AFSum, AfsumError, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureFamily {
    Legendre,
    Chebyshev,
}

/// `∫ w(x) g(x) dx ≈ Σ μ_k g(λ_k)` on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub family: QuadratureFamily,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * g(*x)).sum()
    }
}

/// `s_m = ∫_{-1}^{1} x^m dx`.
pub fn legendre_moments(n: usize) -> MomentSequence {
    let s: Vec<f64> = (0..2 * n)
        .map(|m| if m % 2 == 0 { 2.0 / (m as f64 + 1.0) } else { 0.0 })
        .collect();
    MomentSequence::from_real(&s).expect("nonempty finite moments")
}

const PI_DD: Dd = Dd {
    hi: PI,
    lo: 1.2246467991473532e-16,
};

/// `s_m = ∫_{-1}^{1} x^m / √(1-x²) dx`; even moments are `π C(2j, j) / 4^j`.
pub fn chebyshev_moments(n: usize) -> MomentSequence {
    let mut s = vec![0.0; 2 * n];
    let mut central = Some(1u128);
    let mut approx = 1.0f64;
    for j in 0..n {
        let ratio = match central {
            Some(c) => c as f64 / 4f64.powi(j as i32),
            None => approx,
        };
        s[2 * j] = (PI_DD * Dd::from_f64(ratio)).to_f64();
        let (num, den) = ((2 * j + 1) as u128 * (2 * j + 2) as u128, (j as u128 + 1).pow(2));
        central = central.and_then(|c| c.checked_mul(num)).map(|c| c / den);
        approx = ratio * (2 * j + 1) as f64 / (2 * (j + 1)) as f64;
    }
    MomentSequence::from_real(&s).expect("nonempty finite moments")
}

fn rule_from_moments(family: QuadratureFamily, m: &MomentSequence) -> Result<QuadratureRule> {
    let sol = solve(m)?;
    let imag = sol
        .frequencies
        .iter()
        .chain(&sol.amplitudes)
        .map(|v| v.im.abs())
        .fold(0.0, f64::max);
    if imag > 1e-8 {
        log::warn!("quadrature from moments has imaginary parts up to {imag:e}");
    }
    Ok(QuadratureRule {
        family,
        nodes: sol.frequencies.iter().map(|v| v.re).collect(),
        weights: sol.amplitudes.iter().map(|v| v.re).collect(),
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(AfsumError::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// Gauss–Legendre rule obtained from the moment problem.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    check_n(n)?;
    rule_from_moments(QuadratureFamily::Legendre, &legendre_moments(n))
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let deriv = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

/// Gauss–Legendre weight `2 / ((1 - x²) P_n'(x)²)` at a node `x`.
pub fn legendre_weight(n: usize, x: f64) -> f64 {
    let (_, d) = legendre_p(n, x);
    2.0 / ((1.0 - x * x) * d * d)
}

/// Closed-form Gauss–Chebyshev rule, nodes `cos((2k-1)π/(2n))` for `k = 1..n`.
pub fn gauss_chebyshev(n: usize) -> Result<QuadratureRule> {
    check_n(n)?;
    Ok(QuadratureRule {
        family: QuadratureFamily::Chebyshev,
        nodes: (1..=n)
            .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
            .collect(),
        weights: vec![PI / n as f64; n],
    })
}

/// Gauss–Chebyshev rule obtained from the moment problem.
pub fn gauss_chebyshev_pipeline(n: usize) -> Result<QuadratureRule> {
    check_n(n)?;
    rule_from_moments(QuadratureFamily::Chebyshev, &chebyshev_moments(n))
}

fn sum_over_basis(f: &FunctionSpec, basis: FunctionSpec, n: usize) -> Result<AFSum> {
    check_n(n)?;
    let m = moment_sequence(f, &basis, n)?;
    Ok(solve(&m)?.into_sum(basis, None))
}

/// `Σ μ_k / (λ_k z - 1)` matching `f` through order `2n - 1`.
pub fn pade_from_series(f: &FunctionSpec, n: usize) -> Result<AFSum> {
    sum_over_basis(f, FunctionSpec::InvZm1, n)
}

/// `Σ μ_k e^{λ_k z}` matching `f` through order `2n - 1`.
pub fn exp_sum(f: &FunctionSpec, n: usize) -> Result<AFSum> {
    sum_over_basis(f, FunctionSpec::Exp, n)
}

/// `|x|^len / (2^len len!)`, accumulated term by term.
fn scaled_power_over_factorial(x: f64, len: usize) -> f64 {
    (1..=len).fold(1.0, |acc, j| acc * x.abs() / (2 * j) as f64)
}

/// `H_n(x) = (1/n) Σ cos(x c_k)`, `c_k = cos((2k-1)π/(4n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselCosineSum {
    n: usize,
    nodes: Vec<f64>,
}

pub fn bessel_j0_sum(n: usize) -> BesselCosineSum {
    BesselCosineSum {
        n,
        nodes: (1..=n)
            .map(|k| ((2 * k - 1) as f64 * PI / (4 * n) as f64).cos())
            .collect(),
    }
}

impl BesselCosineSum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.nodes.iter().map(|c| (x * c).cos()).sum::<f64>() / self.n as f64
    }

    /// `|x|^{4n} / (2^{4n-1} (4n)!)`.
    pub fn bound(&self, x: f64) -> f64 {
        2.0 * scaled_power_over_factorial(x, 4 * self.n)
    }
}

/// `H_n'(x) = -(1/n) Σ c_k sin(x c_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselCosineDerivative {
    inner: BesselCosineSum,
}

pub fn bessel_j0_prime_sum(n: usize) -> BesselCosineDerivative {
    BesselCosineDerivative {
        inner: bessel_j0_sum(n),
    }
}

impl BesselCosineDerivative {
    pub fn eval(&self, x: f64) -> f64 {
        -self.inner.nodes.iter().map(|c| c * (x * c).sin()).sum::<f64>() / self.inner.n as f64
    }

    /// `|x|^{4n-1} / (2^{4n-1} (4n-1)!)`.
    pub fn bound(&self, x: f64) -> f64 {
        scaled_power_over_factorial(x, 4 * self.inner.n - 1)
    }
}

/// `J₀(x) ≈ Σ μ_k sinc(√λ_k x)`, from the parity-reduced moment problem.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselSincSum {
    pub solution: PronySolution,
}

pub fn bessel_j0_sinc_sum(n: usize) -> Result<BesselSincSum> {
    check_n(n)?;
    let m = moment_sequence(
        &FunctionSpec::BesselJ0.parity_reduce(),
        &FunctionSpec::Sinc.parity_reduce(),
        n,
    )?;
    let solution = solve(&m)?;
    let off_axis = solution
        .frequencies
        .iter()
        .any(|l| l.re < 0.0 || l.im.abs() > 1e-10 * (1.0 + l.norm()))
        || solution.amplitudes.iter().any(|mu| mu.im.abs() > 1e-10 * (1.0 + mu.norm()));
    if off_axis {
        log::warn!("sinc approximant of J0 at n = {n} has frequencies off the non-negative axis or complex amplitudes");
    }
    Ok(BesselSincSum { solution })
}

impl BesselSincSum {
    pub fn eval(&self, x: C64) -> C64 {
        let terms = self
            .solution
            .amplitudes
            .iter()
            .zip(&self.solution.frequencies)
            .map(|(mu, l)| {
                mu * FunctionSpec::Sinc
                    .evaluate(l.sqrt() * x)
                    .expect("sinc is entire")
            });
        crate::prony::compensated_sum(terms)
    }

    /// Maclaurin coefficients in `x` through `order`.
    pub fn maclaurin(&self, order: usize) -> TruncatedSeries {
        let sinc = FunctionSpec::Sinc.coefficients(order);
        let coeffs = sinc
            .iter()
            .enumerate()
            .map(|(m, c)| {
                if m % 2 == 0 {
                    c * self.solution.power_sum(m / 2)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        TruncatedSeries::new(coeffs)
    }
}

/// Uniform grid `start..=end` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(AfsumError::InvalidArgument(format!(
                "a grid needs at least 2 points, got {count}"
            )));
        }
        if !(start.is_finite() && end.is_finite()) {
            return Err(AfsumError::InvalidArgument("grid ends must be finite".into()));
        }
        Ok(Grid { start, end, count })
    }

    /// Points in ascending order; both ends are included exactly.
    pub fn points(&self) -> Vec<f64> {
        let (lo, hi) = if self.start <= self.end {
            (self.start, self.end)
        } else {
            (self.end, self.start)
        };
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    hi
                } else {
                    lo + (hi - lo) * (i as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRow {
    pub x: f64,
    pub exact: C64,
    pub approx: C64,
    pub abs_err: f64,
}

/// Exact and approximate values over `grid`, rows in ascending `x`.
pub fn error_table<E, A>(exact: E, approx: A, grid: &Grid, exec: Execution) -> Result<Vec<ErrorRow>>
where
    E: Fn(f64) -> Result<C64> + Sync + Send,
    A: Fn(f64) -> Result<C64> + Sync + Send,
{
    try_map_ordered(exec, &grid.points(), |&x| {
        let e = exact(x)?;
        let a = approx(x)?;
        Ok(ErrorRow {
            x,
            exact: e,
            approx: a,
            abs_err: (e - a).norm(),
        })
    })
}

pub fn max_abs_err(rows: &[ErrorRow]) -> f64 {
    rows.iter().map(|r| r.abs_err).fold(0.0, f64::max)
}
