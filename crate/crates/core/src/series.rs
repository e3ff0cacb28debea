//! Target and basis functions as Maclaurin coefficient streams with
//! complex-point evaluators.

use std::fmt;

use crate::dd::CDd;
use crate::{AfsumError, Result, C64};

/// Largest `|z|` at which [`FunctionSpec::BesselJ0`] is evaluated.
pub const BESSEL_J0_DOMAIN: f64 = 30.0;

const BESSEL_TERM_CAP: usize = 200;

/// Anything that yields Maclaurin coefficients on demand.
pub trait Maclaurin {
    fn coefficient(&self, m: usize) -> C64;

    /// Coefficients `c_0..=c_order`.
    fn coefficients(&self, order: usize) -> Vec<C64> {
        (0..=order).map(|m| self.coefficient(m)).collect()
    }
}

/// A named analytic function.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Exp,
    Cos,
    /// `sin z / z`, with value 1 at the origin.
    Sinc,
    BesselJ0,
    /// `1 / (z - 1)`.
    InvZm1,
    /// Finite polynomial, ascending coefficients.
    Polynomial(Vec<C64>),
    /// Maclaurin coefficients; zero beyond the list.
    RawSeries(Vec<C64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// The stream `f̃` of a parity reduction: `f(z) = f̃(z²)` for even `f`,
/// `f(z) = z f̃(z²)` for odd `f`, the identity otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityReduction {
    pub parity: Parity,
    pub source: FunctionSpec,
}

/// Coefficients `c_0..c_M` of a truncated Maclaurin series.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<C64>,
}

impl TruncatedSeries {
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series has at least c_0");
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coefficients(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn eval(&self, z: C64) -> C64 {
        horner(&self.coeffs, z)
    }
}

fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Exact coefficients `c_0..=order` for a named kind, generated by recurrence.
fn named_coefficients(spec: &FunctionSpec, order: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); order + 1];
    match spec {
        FunctionSpec::Exp => {
            let mut c = 1.0;
            for (m, slot) in out.iter_mut().enumerate() {
                if m > 0 {
                    c /= m as f64;
                }
                *slot = C64::new(c, 0.0);
            }
        }
        FunctionSpec::Cos | FunctionSpec::Sinc | FunctionSpec::BesselJ0 => {
            let mut c = 1.0;
            let mut k = 0usize;
            while 2 * k <= order {
                out[2 * k] = C64::new(c, 0.0);
                let kf = k as f64;
                c = -c
                    / match spec {
                        FunctionSpec::Cos => (2.0 * kf + 1.0) * (2.0 * kf + 2.0),
                        FunctionSpec::Sinc => (2.0 * kf + 2.0) * (2.0 * kf + 3.0),
                        _ => 4.0 * (kf + 1.0) * (kf + 1.0),
                    };
                k += 1;
            }
        }
        FunctionSpec::InvZm1 => out.fill(C64::new(-1.0, 0.0)),
        FunctionSpec::Polynomial(c) | FunctionSpec::RawSeries(c) => {
            for (slot, v) in out.iter_mut().zip(c) {
                *slot = *v;
            }
        }
    }
    out
}

impl Maclaurin for FunctionSpec {
    fn coefficient(&self, m: usize) -> C64 {
        match self {
            FunctionSpec::Polynomial(c) | FunctionSpec::RawSeries(c) => {
                c.get(m).copied().unwrap_or_default()
            }
            FunctionSpec::InvZm1 => C64::new(-1.0, 0.0),
            _ => named_coefficients(self, m)[m],
        }
    }

    fn coefficients(&self, order: usize) -> Vec<C64> {
        named_coefficients(self, order)
    }
}

impl Maclaurin for ParityReduction {
    fn coefficient(&self, m: usize) -> C64 {
        match self.parity {
            Parity::Even => self.source.coefficient(2 * m),
            Parity::Odd => self.source.coefficient(2 * m + 1),
            Parity::None => self.source.coefficient(m),
        }
    }

    fn coefficients(&self, order: usize) -> Vec<C64> {
        match self.parity {
            Parity::None => self.source.coefficients(order),
            Parity::Even => self
                .source
                .coefficients(2 * order)
                .into_iter()
                .step_by(2)
                .collect(),
            Parity::Odd => self
                .source
                .coefficients(2 * order + 1)
                .into_iter()
                .skip(1)
                .step_by(2)
                .collect(),
        }
    }
}

impl ParityReduction {
    pub fn truncated(&self, order: usize) -> TruncatedSeries {
        TruncatedSeries::new(self.coefficients(order))
    }

    /// Evaluate `f̃(t)` through the source function. Any square root of `t`
    /// gives the same value because the source has the stated parity.
    pub fn evaluate(&self, t: C64) -> Result<C64> {
        match self.parity {
            Parity::None => self.source.evaluate(t),
            Parity::Even => self.source.evaluate(t.sqrt()),
            Parity::Odd => {
                if t == C64::new(0.0, 0.0) {
                    Ok(self.source.coefficient(1))
                } else {
                    let r = t.sqrt();
                    Ok(self.source.evaluate(r)? / r)
                }
            }
        }
    }
}

impl FunctionSpec {
    /// Truncated Maclaurin series of order `order`.
    pub fn maclaurin(&self, order: usize) -> TruncatedSeries {
        TruncatedSeries::new(self.coefficients(order))
    }

    /// Short name used in documents and diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            FunctionSpec::Exp => "exp",
            FunctionSpec::Cos => "cos",
            FunctionSpec::Sinc => "sinc",
            FunctionSpec::BesselJ0 => "j0",
            FunctionSpec::InvZm1 => "invzm1",
            FunctionSpec::Polynomial(_) => "poly",
            FunctionSpec::RawSeries(_) => "series",
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            FunctionSpec::Cos | FunctionSpec::Sinc | FunctionSpec::BesselJ0 => Parity::Even,
            FunctionSpec::Exp | FunctionSpec::InvZm1 => Parity::None,
            FunctionSpec::Polynomial(c) | FunctionSpec::RawSeries(c) => {
                let zero = |m: usize| c.get(m).is_none_or(|v| *v == C64::new(0.0, 0.0));
                if (1..c.len()).step_by(2).all(zero) {
                    Parity::Even
                } else if (0..c.len()).step_by(2).all(zero) {
                    Parity::Odd
                } else {
                    Parity::None
                }
            }
        }
    }

    pub fn parity_reduce(&self) -> ParityReduction {
        ParityReduction {
            parity: self.parity(),
            source: self.clone(),
        }
    }

    /// Value at `z`.
    pub fn evaluate(&self, z: C64) -> Result<C64> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(AfsumError::InvalidArgument(format!(
                "{} evaluated at non-finite z = {z}",
                self.name()
            )));
        }
        Ok(match self {
            FunctionSpec::Exp => z.exp(),
            FunctionSpec::Cos => z.cos(),
            FunctionSpec::Sinc => {
                if z == C64::new(0.0, 0.0) {
                    C64::new(1.0, 0.0)
                } else {
                    z.sin() / z
                }
            }
            FunctionSpec::BesselJ0 => {
                self.check_bessel_domain(z)?;
                bessel_j0(z)
            }
            FunctionSpec::InvZm1 => {
                let d = z - 1.0;
                if d == C64::new(0.0, 0.0) {
                    return Err(AfsumError::Pole {
                        function: self.name().into(),
                        z,
                    });
                }
                d.inv()
            }
            FunctionSpec::Polynomial(c) | FunctionSpec::RawSeries(c) => horner(c, z),
        })
    }

    /// Value of the first derivative at `z`.
    pub fn derivative_at(&self, z: C64) -> Result<C64> {
        self.evaluate(z)?;
        Ok(match self {
            FunctionSpec::Exp => z.exp(),
            FunctionSpec::Cos => -z.sin(),
            FunctionSpec::Sinc => sinc_derivative(z),
            FunctionSpec::BesselJ0 => -bessel_j1(z),
            FunctionSpec::InvZm1 => {
                let d = z - 1.0;
                -(d * d).inv()
            }
            FunctionSpec::Polynomial(c) | FunctionSpec::RawSeries(c) => {
                let dc: Vec<C64> = c
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(m, v)| v * m as f64)
                    .collect();
                horner(&dc, z)
            }
        })
    }

    fn check_bessel_domain(&self, z: C64) -> Result<()> {
        let modulus = z.norm();
        if modulus > BESSEL_J0_DOMAIN {
            return Err(AfsumError::Domain {
                function: self.name().into(),
                limit: BESSEL_J0_DOMAIN,
                modulus,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FunctionSpec {
    /// Renders the command-line grammar form; raw series print their name only.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Polynomial(c) => {
                write!(f, "poly:")?;
                for (i, v) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    if v.im == 0.0 {
                        write!(f, "{:e}", v.re)?;
                    } else {
                        write!(f, "{:e}{:+e}i", v.re, v.im)?;
                    }
                }
                Ok(())
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Sum `Σ_k term_k` with `term_0 = 1` and `term_{k+1} = term_k · w / d(k)`,
/// carried in double-double so that cancellation at moderate `|z|` does not
/// eat the result.
fn hypergeometric_dd(w: CDd, denom: impl Fn(f64) -> f64) -> C64 {
    let w_norm = w.norm_f64();
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    for k in 0..BESSEL_TERM_CAP {
        let d = denom(k as f64);
        term = (term * w).div_f64(d);
        sum = sum + term;
        let past_peak = d > w_norm;
        if past_peak && term.norm_f64() < f64::EPSILON * 0.5 * sum.norm_f64() {
            break;
        }
    }
    sum.to_c64()
}

/// `J₀(z)` by Maclaurin summation.
pub fn bessel_j0(z: C64) -> C64 {
    let w = CDd::square_of(z).scale(-0.25);
    hypergeometric_dd(w, |k| (k + 1.0) * (k + 1.0))
}

/// `J₁(z) = -J₀'(z)` by Maclaurin summation.
pub fn bessel_j1(z: C64) -> C64 {
    let w = CDd::square_of(z).scale(-0.25);
    hypergeometric_dd(w, |k| (k + 1.0) * (k + 2.0)) * z * 0.5
}

fn sinc_derivative(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // Σ_{k≥1} (-1)^k 2k z^{2k-1} / (2k+1)!
        let z2 = z * z;
        let mut power = z;
        let mut fact = 6.0;
        let mut sum = C64::new(0.0, 0.0);
        for k in 1..30 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            let term = power * (sign * 2.0 * kf / fact);
            sum += term;
            if term.norm() <= f64::EPSILON * 1e-3 * sum.norm() {
                break;
            }
            power *= z2;
            fact *= (2.0 * kf + 2.0) * (2.0 * kf + 3.0);
        }
        sum
    } else {
        (z * z.cos() - z.sin()) / (z * z)
    }
}
