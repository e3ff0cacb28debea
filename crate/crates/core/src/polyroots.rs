//! Complex polynomials and simultaneous root finding.
//!
//! Roots come from Aberth–Ehrlich iteration started on a perturbed circle,
//! then each root gets a short Newton polish that only accepts steps which
//! lower `|p|`. Output is sorted by real part, then imaginary part.

use std::f64::consts::PI;

use crate::dd::CDd;
use crate::{AfsumError, Result, C64};

const MAX_ITERATIONS: usize = 500;
const POLISH_STEPS: usize = 8;

/// Trailing coefficients below this fraction of the largest one are dropped.
pub const TRIM_RELATIVE: f64 = 1.0 / (1u64 << 40) as f64;

/// Accepted root residual, relative to `max|g_m| · max(1, |r|)^n`.
pub const ROOT_RESIDUAL_RELATIVE: f64 = 1.0 / (1u64 << 35) as f64;

/// Polynomial with ascending complex coefficients `g_0..g_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    /// Build from ascending coefficients and [`trim`](Self::trim). An empty
    /// list is the zero polynomial.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let coeffs = if coeffs.is_empty() {
            vec![C64::new(0.0, 0.0)]
        } else {
            coeffs
        };
        let mut p = ComplexPolynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Monic polynomial `Π (λ - r_k)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(C64::new(0.0, 0.0));
            for i in (0..coeffs.len()).rev() {
                let lower = if i > 0 { coeffs[i - 1] } else { C64::new(0.0, 0.0) };
                coeffs[i] = lower - r * coeffs[i];
            }
        }
        ComplexPolynomial { coeffs }
    }

    /// Strip trailing coefficients smaller than `2⁻⁴⁰ · max|g_m|`.
    pub fn trim(&mut self) {
        let scale = self.max_abs_coeff();
        while self.coeffs.len() > 1 {
            let last = self.coeffs[self.coeffs.len() - 1].norm();
            if last < TRIM_RELATIVE * scale || last == 0.0 {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        ComplexPolynomial {
            coeffs: self.coeffs.iter().map(|c| c / lead).collect(),
        }
    }

    /// Horner evaluation from the highest power down.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Horner evaluation carried in double-double.
    pub(crate) fn eval_compensated(&self, z: C64) -> C64 {
        let z = CDd::from_c64(z);
        self.coeffs
            .iter()
            .rev()
            .fold(CDd::default(), |acc, &c| acc * z + CDd::from_c64(c))
            .to_c64()
    }

    /// `Σ |g_m| |z|^m`, the scale of rounding error in [`eval`](Self::eval).
    pub fn eval_magnitude(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return ComplexPolynomial::new(vec![]);
        }
        ComplexPolynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(m, c)| c * m as f64)
                .collect(),
        }
    }

    /// All `n` roots counted with multiplicity.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n == 0 {
            return Err(AfsumError::InvalidArgument(
                "root finding needs degree at least 1".into(),
            ));
        }
        let monic = self.monic();
        let mut roots = if n == 1 {
            vec![-monic.coeffs[0]]
        } else {
            aberth(&monic)
        };
        for r in roots.iter_mut() {
            *r = polish(&monic, *r);
        }

        let scale = monic.max_abs_coeff();
        for &r in &roots {
            let residual = monic.eval(r).norm();
            let limit = ROOT_RESIDUAL_RELATIVE * scale * r.norm().max(1.0).powi(n as i32);
            if residual.is_nan() || residual > limit {
                return Err(AfsumError::NonConvergence {
                    degree: n,
                    residual,
                    limit,
                });
            }
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

fn aberth(monic: &ComplexPolynomial) -> Vec<C64> {
    let n = monic.degree();
    let deriv = monic.derivative();
    let radius = 1.0
        + monic.coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut largest_step = 0.0f64;
        for k in 0..n {
            let p = monic.eval(z[k]);
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            let dp = deriv.eval(z[k]);
            let repulsion: C64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let denom = dp - p * repulsion;
            if denom == C64::new(0.0, 0.0) || !denom.is_finite() {
                continue;
            }
            let step = p / denom;
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            largest_step = largest_step.max(step.norm() / z[k].norm().max(1.0));
        }
        if largest_step <= 4.0 * f64::EPSILON {
            break;
        }
    }
    z
}

fn polish(monic: &ComplexPolynomial, mut r: C64) -> C64 {
    let deriv = monic.derivative();
    let mut value = monic.eval_compensated(r).norm();
    for _ in 0..POLISH_STEPS {
        if value == 0.0 {
            break;
        }
        let dp = deriv.eval(r);
        if dp == C64::new(0.0, 0.0) {
            break;
        }
        let candidate = r - monic.eval_compensated(r) / dp;
        let candidate_value = monic.eval_compensated(candidate).norm();
        if candidate.is_finite() && candidate_value < value {
            r = candidate;
            value = candidate_value;
        } else {
            break;
        }
    }
    r
}

/// Smallest pairwise distance; `+∞` for a single root.
pub fn min_separation(roots: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn golden_ratio_quadratic() {
        let p = ComplexPolynomial::from_real(&[-1.0, 1.0, 1.0]);
        let r = p.roots().unwrap();
        let s5 = 5f64.sqrt();
        assert!((r[0] - c((-1.0 - s5) / 2.0, 0.0)).norm() < 1e-15);
        assert!((r[1] - c((-1.0 + s5) / 2.0, 0.0)).norm() < 1e-15);
        assert!((min_separation(&r) - s5).abs() < 1e-14);
        assert_eq!(p.derivative(), ComplexPolynomial::from_real(&[1.0, 2.0]));
        assert_eq!(p.eval(c(0.0, 0.0)), c(-1.0, 0.0));
    }

    #[test]
    fn triple_root_at_origin() {
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, 0.0, 1.0]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 3);
        for z in r {
            assert!(z.norm() < 1e-5);
        }
    }

    #[test]
    fn differentiation_example_quartic() {
        let p = ComplexPolynomial::from_real(&[9.0, -18.0, -9.0, 0.0, 9.0]);
        let r = p.roots().unwrap();
        let expected = [
            c(-0.90612, -0.93427),
            c(-0.90612, 0.93427),
            c(0.42578, 0.0),
            c(1.38647, 0.0),
        ];
        for (got, want) in r.iter().zip(expected) {
            assert!((got - want).norm() < 5e-5, "{got} vs {want}");
        }
        assert!(p.eval(c(1.38647, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn separation_edge_cases() {
        assert_eq!(min_separation(&[c(1.0, 0.0), c(-1.0, 0.0)]), 2.0);
        assert_eq!(min_separation(&[c(0.0, 0.0), c(0.0, 0.0)]), 0.0);
        assert_eq!(min_separation(&[c(3.0, 0.0)]), f64::INFINITY);
    }

    #[test]
    fn trim_drops_negligible_leading_terms() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 1e-13]);
        assert_eq!(p.degree(), 1);
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 1e-11]);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn from_roots_inverts_roots() {
        let roots = vec![c(-2.0, 0.0), c(0.5, -1.0), c(0.5, 1.0), c(3.0, 0.25)];
        let p = ComplexPolynomial::from_roots(&roots);
        let back = p.roots().unwrap();
        for (a, b) in back.iter().zip(&roots) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
