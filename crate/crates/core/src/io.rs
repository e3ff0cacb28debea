//! Text formats: the function grammar, moment files, grids, the JSON
//! operator document and CSV error tables.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::classics::{ErrorRow, Grid};
use crate::diffop::DiffOperator;
use crate::extrapop::ExtrapOperator;
use crate::prony::{AFSum, MomentSequence, PronySolution};
use crate::regularize::RegularizationParams;
use crate::series::FunctionSpec;
use crate::{AfsumError, Result, C64};

/// A number rendered with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Real number written with 17 significant digits in JSON.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real17(pub f64);

impl Serialize for Real17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("cannot write non-finite number {}", self.0)));
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Real17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Real17)
    }
}

pub type Complex17 = [Real17; 2];

fn c17(z: C64) -> Complex17 {
    [Real17(z.re), Real17(z.im)]
}

fn from17(z: &Complex17) -> C64 {
    C64::new(z[0].0, z[1].0)
}

fn list17(v: &[C64]) -> Vec<Complex17> {
    v.iter().copied().map(c17).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Afsum,
    Diff,
    Extrap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinomialDocument {
    pub c1: Complex17,
    pub k1: usize,
    pub c2: Complex17,
    pub k2: usize,
}

/// Serialized sum or operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDocument {
    pub kind: DocumentKind,
    pub n: usize,
    pub basis: String,
    pub mu: Vec<Complex17>,
    pub lambda: Vec<Complex17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binomial: Option<BinomialDocument>,
    /// The moments the amplitudes and frequencies solve.
    pub moments: Vec<Complex17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Complex17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Complex17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Complex17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bound: Option<Real17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder_factor: Option<Complex17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Real17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contraction: Option<Real17>,
}

impl OperatorDocument {
    fn base(kind: DocumentKind, basis: String, amplitudes: &[C64], frequencies: &[C64], moments: &MomentSequence) -> Self {
        OperatorDocument {
            kind,
            n: frequencies.len(),
            basis,
            mu: list17(amplitudes),
            lambda: list17(frequencies),
            binomial: None,
            moments: list17(moments.as_slice()),
            p: None,
            q: None,
            delta: None,
            lambda_bound: None,
            remainder_factor: None,
            a: None,
            contraction: None,
        }
    }

    /// Document for a solved sum. `moments` are the (possibly varied)
    /// moments it solves; `params` records an active regularization.
    pub fn from_sum(sum: &AFSum, moments: &MomentSequence, params: Option<&RegularizationParams>) -> Self {
        let mut doc = Self::base(DocumentKind::Afsum, sum.basis.to_string(), &sum.amplitudes, &sum.frequencies, moments);
        doc.binomial = sum.binomial.map(|b| BinomialDocument {
            c1: c17(b.c1),
            k1: b.k1,
            c2: c17(b.c2),
            k2: b.k2,
        });
        if let Some(r) = params.filter(|r| r.is_active()) {
            doc.p = Some(c17(r.p));
            doc.q = Some(c17(r.effective_q()));
            doc.delta = Some(c17(r.delta));
        }
        doc
    }

    pub fn from_diff(op: &DiffOperator) -> Self {
        let moments = crate::diffop::diff_moments(op.n, op.p, op.q);
        let mut doc = Self::base(DocumentKind::Diff, "universal".into(), &op.amplitudes, &op.frequencies, &moments);
        doc.p = Some(c17(op.p));
        doc.q = Some(c17(op.q));
        doc.lambda_bound = Some(Real17(op.lambda_bound));
        doc.remainder_factor = Some(c17(op.remainder_factor));
        doc
    }

    pub fn from_extrap(op: &ExtrapOperator) -> Self {
        let moments = crate::extrapop::extrap_moments(op.n, op.a, op.p, 0.0);
        let mut doc = Self::base(DocumentKind::Extrap, "universal".into(), &op.amplitudes, &op.frequencies, &moments);
        doc.a = Some(Real17(op.a));
        doc.p = Some(c17(C64::new(op.p, 0.0)));
        doc.contraction = Some(Real17(op.contraction));
        doc
    }

    pub fn moments(&self) -> Result<MomentSequence> {
        MomentSequence::new(self.moments.iter().map(from17).collect())
    }

    pub fn solution(&self) -> PronySolution {
        PronySolution {
            amplitudes: self.mu.iter().map(from17).collect(),
            frequencies: self.lambda.iter().map(from17).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| AfsumError::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AfsumError::Parse(e.to_string()))
    }
}

pub fn parse_real(text: &str) -> Result<f64> {
    let t = text.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(AfsumError::Parse(format!("not a finite number: {t:?}"))),
    }
}

/// `re`, `re+imi`, `re-imi` or `imi`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let t = text.trim();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(parse_real(t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => parse_real(other),
        }
    };
    let parsed: Result<C64> = match split {
        Some(i) => parse_real(&body[..i]).and_then(|re| Ok(C64::new(re, imag(&body[i..])?))),
        None => imag(body).map(|im| C64::new(0.0, im)),
    };
    parsed.map_err(|_| AfsumError::Parse(format!("not a complex number: {t:?}")))
}

/// One complex per line as `re` or `re,im`; blank lines and `#` comments
/// are skipped.
pub fn parse_complex_lines(text: &str) -> Result<Vec<C64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split(',').collect();
            match parts.as_slice() {
                [re] => parse_complex(re),
                [re, im] => Ok(C64::new(parse_real(re)?, parse_real(im)?)),
                _ => Err(AfsumError::Parse(format!("expected `re` or `re,im`, got {l:?}"))),
            }
        })
        .collect()
}

pub fn parse_moments(text: &str) -> Result<MomentSequence> {
    let values = parse_complex_lines(text)?;
    if values.is_empty() || values.len() % 2 != 0 {
        return Err(AfsumError::Parse(format!(
            "a moments file needs a positive even number of entries, got {}",
            values.len()
        )));
    }
    MomentSequence::new(values)
}

pub fn read_moments(path: &Path) -> Result<MomentSequence> {
    let text = std::fs::read_to_string(path).map_err(|e| AfsumError::Io(format!("{}: {e}", path.display())))?;
    parse_moments(&text)
}

/// The function grammar: `exp`, `cos`, `sinc`, `j0`, `invzm1`,
/// `poly:c0,c1,...` and `series:<path>`.
pub fn parse_function_spec(text: &str) -> Result<FunctionSpec> {
    let t = text.trim();
    match t {
        "exp" => return Ok(FunctionSpec::Exp),
        "cos" => return Ok(FunctionSpec::Cos),
        "sinc" => return Ok(FunctionSpec::Sinc),
        "j0" => return Ok(FunctionSpec::BesselJ0),
        "invzm1" => return Ok(FunctionSpec::InvZm1),
        _ => {}
    }
    if let Some(list) = t.strip_prefix("poly:") {
        let coeffs = list.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
        return Ok(FunctionSpec::Polynomial(coeffs));
    }
    if let Some(path) = t.strip_prefix("series:") {
        let text = std::fs::read_to_string(path).map_err(|e| AfsumError::Io(format!("{path}: {e}")))?;
        return Ok(FunctionSpec::RawSeries(parse_complex_lines(&text)?));
    }
    Err(AfsumError::Parse(format!(
        "unknown function {t:?}; expected exp, cos, sinc, j0, invzm1, poly:... or series:<path>"
    )))
}

impl FromStr for Grid {
    type Err = AfsumError;

    /// `start:end:count`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, end, count] = parts.as_slice() else {
            return Err(AfsumError::Parse(format!("grid must be start:end:count, got {s:?}")));
        };
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|_| AfsumError::Parse(format!("grid count must be an integer, got {count:?}")))?;
        Grid::new(parse_real(start)?, parse_real(end)?, count)
    }
}

pub const CSV_HEADER: &str = "x,exact_re,exact_im,approx_re,approx_im,abs_err";

pub fn error_table_csv(rows: &[ErrorRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 128);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt17(r.x),
            fmt17(r.exact.re),
            fmt17(r.exact.im),
            fmt17(r.approx.re),
            fmt17(r.approx.im),
            fmt17(r.abs_err)
        );
    }
    out
}

pub fn write_error_table(rows: &[ErrorRow], mut w: impl Write) -> Result<()> {
    w.write_all(error_table_csv(rows).as_bytes())?;
    Ok(())
}

/// Rows of a CSV error table written by [`error_table_csv`].
pub fn parse_error_table(text: &str) -> Result<Vec<ErrorRow>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(AfsumError::Parse("missing error-table header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v = l.split(',').map(parse_real).collect::<Result<Vec<f64>>>()?;
            let [x, er, ei, ar, ai, err] = v.as_slice() else {
                return Err(AfsumError::Parse(format!("expected 6 columns, got {l:?}")));
            };
            Ok(ErrorRow {
                x: *x,
                exact: C64::new(*er, *ei),
                approx: C64::new(*ar, *ai),
                abs_err: *err,
            })
        })
        .collect()
}
