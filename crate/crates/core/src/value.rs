//! Measure values under two numeric backends.
//!
//! Scale-type decisions rest on value *equality* (ties make a measure
//! non-injective, equal gaps make it equispaced), so every measure whose
//! formula is a rational function of integer counts is evaluated exactly.
//! Only logarithmic measures fall back to floating point, and those values
//! carry the tolerance used to compare them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for approximate values.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Builds the reduced rational `num / den`.
///
/// Panics if `den` is zero; callers check denominators and report
/// [`Error::Undefined`] before reaching this point.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Numeric backend a value was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Approx { epsilon: f64 },
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Approx { epsilon } => write!(f, "approx(eps={epsilon:e})"),
        }
    }
}

/// A measure value.
///
/// `PartialEq` is structural (used for serialization round trips); use
/// [`value_eq`] or [`Value::same`] for the semantic comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ValueRepr", try_from = "ValueRepr")]
pub enum Value {
    Exact(BigRational),
    Approx { value: f64, epsilon: f64 },
}

impl Value {
    pub fn exact(q: BigRational) -> Self {
        Value::Exact(q)
    }

    pub fn approx(value: f64) -> Self {
        Value::Approx { value, epsilon: DEFAULT_EPSILON }
    }

    pub fn zero() -> Self {
        Value::Exact(BigRational::zero())
    }

    pub fn backend(&self) -> Backend {
        match self {
            Value::Exact(_) => Backend::Exact,
            Value::Approx { epsilon, .. } => Backend::Approx { epsilon: *epsilon },
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => rational_to_f64(q),
            Value::Approx { value, .. } => *value,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Approx { .. } => None,
        }
    }

    fn epsilon(&self) -> Option<f64> {
        match self {
            Value::Exact(_) => None,
            Value::Approx { epsilon, .. } => Some(*epsilon),
        }
    }

    /// Semantic equality with each operand's own tolerance. Mixed
    /// exact/approximate pairs compare under the approximate side's epsilon.
    pub fn same(&self, other: &Value) -> bool {
        let eps = self.epsilon().or(other.epsilon());
        value_eq(self, other, eps).unwrap_or(false)
    }

    /// Total order used to sort values within a report. Exact pairs compare
    /// exactly; anything else compares as `f64`.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Approx {
                value: self.to_f64() - other.to_f64(),
                epsilon: max_eps(self, other),
            },
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Approx {
                value: self.to_f64() + other.to_f64(),
                epsilon: max_eps(self, other),
            },
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(q.abs()),
            Value::Approx { value, epsilon } => Value::Approx { value: value.abs(), epsilon: *epsilon },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_zero(),
            Value::Approx { value, epsilon } => value.abs() <= *epsilon,
        }
    }

    /// `self <= other`, with ties decided by [`Value::same`].
    pub fn le(&self, other: &Value) -> bool {
        self.same(other) || self.total_cmp(other) == Ordering::Less
    }

    /// `self < other` beyond tolerance.
    pub fn lt(&self, other: &Value) -> bool {
        !self.same(other) && self.total_cmp(other) == Ordering::Less
    }

    /// Fraction text, e.g. `2/5`, `1`, or `~0.630930` for approximate values.
    pub fn fraction(&self) -> String {
        match self {
            Value::Exact(q) => format_rational(q),
            Value::Approx { value, .. } => format!("~{value:.6}"),
        }
    }

    /// Three-decimal rendering.
    pub fn decimal(&self) -> String {
        format!("{:.3}", self.to_f64())
    }
}

fn max_eps(a: &Value, b: &Value) -> f64 {
    a.epsilon().unwrap_or(0.0).max(b.epsilon().unwrap_or(0.0))
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.fraction(), self.decimal())
    }
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Exact(q)
    }
}

/// Equality of two values.
///
/// Exact pairs compare exactly. Approximate pairs compare within the declared
/// tolerance, or the larger of their own tolerances when none is declared.
/// Comparing an exact value with an approximate one requires a declared
/// tolerance.
pub fn value_eq(a: &Value, b: &Value, declared: Option<f64>) -> Result<bool> {
    match (a, b) {
        (Value::Exact(x), Value::Exact(y)) => Ok(x == y),
        (Value::Approx { .. }, Value::Approx { .. }) => {
            let eps = declared.unwrap_or_else(|| max_eps(a, b));
            Ok((a.to_f64() - b.to_f64()).abs() <= eps)
        }
        _ => {
            let eps = declared.ok_or(Error::MixedBackends)?;
            Ok((a.to_f64() - b.to_f64()).abs() <= eps)
        }
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    // Very large operands: scale down by a common power of two.
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `3`, `-1/2`, or a finite decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" { "0" } else { whole };
        let w = BigInt::from_str(whole).ok()?;
        let f = BigInt::from_str(frac).ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let magnitude = w.abs() * &scale + f;
        let signed = if negative { -magnitude } else { magnitude };
        return Some(BigRational::new(signed, scale));
    }
    BigInt::from_str(text).ok().map(BigRational::from_integer)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase")]
enum ValueRepr {
    Exact { num: String, den: String },
    Approx { value: f64, epsilon: f64 },
}

impl From<Value> for ValueRepr {
    fn from(v: Value) -> Self {
        match v {
            Value::Exact(q) => ValueRepr::Exact { num: q.numer().to_string(), den: q.denom().to_string() },
            Value::Approx { value, epsilon } => ValueRepr::Approx { value, epsilon },
        }
    }
}

impl TryFrom<ValueRepr> for Value {
    type Error = String;

    fn try_from(r: ValueRepr) -> std::result::Result<Self, String> {
        match r {
            ValueRepr::Exact { num, den } => {
                let n = BigInt::from_str(&num).map_err(|e| e.to_string())?;
                let d = BigInt::from_str(&den).map_err(|e| e.to_string())?;
                if d.is_zero() {
                    return Err("zero denominator".into());
                }
                Ok(Value::Exact(BigRational::new(n, d)))
            }
            ValueRepr::Approx { value, epsilon } => Ok(Value::Approx { value, epsilon }),
        }
    }
}
