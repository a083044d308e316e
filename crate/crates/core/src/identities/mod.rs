//! Checkers for the weighted-average identities of generalized Ramanujan sums.
//!
//! Every checker computes its left side by literal summation over `j` using
//! [`CsumTable`](crate::csum::CsumTable) values and its right side from the
//! closed form, so the two never share an evaluation path. Algebraic
//! identities are compared exactly (integers, rationals, [`LogLinear`]);
//! transcendental ones in floating point against a recorded tolerance.

mod checks;
mod suite;
mod weights;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::logspace::LogLinear;

pub use checks::*;
pub use suite::*;
pub use weights::WeightFunctionSpec;

/// Default relative tolerance for floating-mode checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Identity ids as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityId {
    PowerSum,
    CoprimePowerSum,
    AlkanClassical,
    Alkan,
    LogWeight,
    GcdWeight,
    MuLogLemma,
    GammaWeight,
    GaussProduct,
    BernoulliWeight,
    BinomialWeight,
    Multisection,
    ExpWeight,
    Multivariate,
    GMultiplicative,
}

impl IdentityId {
    pub const ALL: [IdentityId; 15] = [
        IdentityId::PowerSum,
        IdentityId::CoprimePowerSum,
        IdentityId::AlkanClassical,
        IdentityId::Alkan,
        IdentityId::LogWeight,
        IdentityId::GcdWeight,
        IdentityId::MuLogLemma,
        IdentityId::GammaWeight,
        IdentityId::GaussProduct,
        IdentityId::BernoulliWeight,
        IdentityId::BinomialWeight,
        IdentityId::Multisection,
        IdentityId::ExpWeight,
        IdentityId::Multivariate,
        IdentityId::GMultiplicative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::PowerSum => "power-sum",
            IdentityId::CoprimePowerSum => "coprime-power-sum",
            IdentityId::AlkanClassical => "alkan-classical",
            IdentityId::Alkan => "alkan",
            IdentityId::LogWeight => "log-weight",
            IdentityId::GcdWeight => "gcd-weight",
            IdentityId::MuLogLemma => "mu-log-lemma",
            IdentityId::GammaWeight => "gamma-weight",
            IdentityId::GaussProduct => "gauss-product",
            IdentityId::BernoulliWeight => "bernoulli-weight",
            IdentityId::BinomialWeight => "binomial-weight",
            IdentityId::Multisection => "multisection",
            IdentityId::ExpWeight => "exp-weight",
            IdentityId::Multivariate => "multivariate",
            IdentityId::GMultiplicative => "g-multiplicative",
        }
    }

    /// Parses a single id or `all`.
    pub fn parse_selector(s: &str) -> Result<Vec<IdentityId>> {
        if s == "all" {
            Ok(Self::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown identity id {s:?}")))
    }
}

impl Serialize for IdentityId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// A grid parameter value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Int(i64),
    List(Vec<u64>),
    Text(String),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Int(v) => write!(f, "{v}"),
            Param::List(v) => {
                let parts: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "[{}]", parts.join(","))
            }
            Param::Text(t) => f.write_str(t),
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Param::Int(v) => serializer.serialize_i64(*v),
            Param::List(v) => v.serialize(serializer),
            Param::Text(t) => serializer.serialize_str(t),
        }
    }
}

/// Named parameters in checker-defined order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Params(pub Vec<(&'static str, Param)>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn int(mut self, name: &'static str, v: impl Into<i64>) -> Self {
        self.0.push((name, Param::Int(v.into())));
        self
    }

    pub fn list(mut self, name: &'static str, v: &[u64]) -> Self {
        self.0.push((name, Param::List(v.to_vec())));
        self
    }

    pub fn text(mut self, name: &'static str, v: impl Into<String>) -> Self {
        self.0.push((name, Param::Text(v.into())));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Param> {
        self.0.iter().find(|(n, _)| *n == name).map(|(_, p)| p)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(n, v)| format!("{n}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (n, v) in &self.0 {
            map.serialize_entry(n, v)?;
        }
        map.end()
    }
}

/// One side of an identity, or a residual.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Integer(BigInt),
    Rational(Rational),
    Log(LogLinear),
    Float(f64),
    /// The checker failed before producing a value.
    Missing,
}

impl Value {
    pub fn is_exact_zero(&self) -> bool {
        match self {
            Value::Integer(i) => i.sign() == num_bigint::Sign::NoSign,
            Value::Rational(r) => num_traits::Zero::is_zero(r),
            Value::Log(l) => l.is_zero(),
            Value::Float(_) | Value::Missing => false,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(i) => write!(f, "{i}"),
            Value::Rational(r) => write!(f, "{r}"),
            Value::Log(l) => write!(f, "{l}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Missing => f.write_str("-"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Float(x) => serializer.serialize_f64(*x),
            Value::Missing => serializer.serialize_none(),
            exact => serializer.serialize_str(&exact.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Floating,
}

/// How a result should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Exact equality of canonical forms.
    Verified,
    /// Within the floating tolerance.
    NumericalPass,
    /// A mismatch in a family known to sit outside the identity's range of
    /// validity. Reported, but not a verification failure.
    FindingMismatch,
    /// A genuine mismatch.
    Failed,
    /// The checker returned an error.
    Error,
}

impl Classification {
    pub fn is_hard_failure(self) -> bool {
        matches!(self, Classification::Failed | Classification::Error)
    }
}

/// Outcome of one identity at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub identity: IdentityId,
    pub params: Params,
    pub lhs: Value,
    pub rhs: Value,
    pub residual: Value,
    pub mode: Mode,
    pub pass: bool,
    pub classification: Classification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl CheckResult {
    /// Exact comparison: passes iff the residual is exactly zero.
    pub(crate) fn exact(identity: IdentityId, params: Params, lhs: Value, rhs: Value) -> Self {
        let residual = exact_residual(&lhs, &rhs);
        let pass = residual.is_exact_zero();
        CheckResult {
            identity,
            params,
            lhs,
            rhs,
            residual,
            mode: Mode::Exact,
            pass,
            classification: if pass {
                Classification::Verified
            } else {
                Classification::Failed
            },
            tolerance: None,
            details: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    /// Floating comparison: passes iff `|lhs - rhs| <= tolerance`, where the
    /// caller has already scaled the tolerance.
    pub(crate) fn floating(
        identity: IdentityId,
        params: Params,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let residual = (lhs - rhs).abs();
        let pass = residual <= tolerance;
        CheckResult {
            identity,
            params,
            lhs: Value::Float(lhs),
            rhs: Value::Float(rhs),
            residual: Value::Float(residual),
            mode: Mode::Floating,
            pass,
            classification: if pass {
                Classification::NumericalPass
            } else {
                Classification::Failed
            },
            tolerance: Some(tolerance),
            details: BTreeMap::new(),
            elapsed_ms: None,
        }
    }

    pub(crate) fn error(identity: IdentityId, params: Params, err: &Error) -> Self {
        let mut details = BTreeMap::new();
        details.insert("error".to_string(), err.to_string());
        CheckResult {
            identity,
            params,
            lhs: Value::Missing,
            rhs: Value::Missing,
            residual: Value::Missing,
            mode: Mode::Exact,
            pass: false,
            classification: Classification::Error,
            tolerance: None,
            details,
            elapsed_ms: None,
        }
    }

    pub(crate) fn detail(mut self, key: &str, value: impl ToString) -> Self {
        self.details.insert(key.to_string(), value.to_string());
        self
    }

    /// Marks a failing result as a finding rather than a hard failure.
    pub(crate) fn into_finding(mut self) -> Self {
        if !self.pass {
            self.classification = Classification::FindingMismatch;
        }
        self
    }

    /// Fails a passing result, e.g. when a cross-check disagrees.
    pub(crate) fn fail_with(mut self, key: &str, why: impl ToString) -> Self {
        self.pass = false;
        self.classification = Classification::Failed;
        self.details.insert(key.to_string(), why.to_string());
        self
    }
}

fn exact_residual(lhs: &Value, rhs: &Value) -> Value {
    use num_traits::Signed;
    match (lhs, rhs) {
        (Value::Integer(a), Value::Integer(b)) => Value::Integer((a - b).abs()),
        (Value::Rational(a), Value::Rational(b)) => Value::Rational((a - b).abs()),
        (Value::Integer(a), Value::Rational(b)) | (Value::Rational(b), Value::Integer(a)) => {
            Value::Rational((Rational::from_integer(a.clone()) - b).abs())
        }
        (Value::Log(a), Value::Log(b)) => Value::Log(a - b),
        _ => Value::Missing,
    }
}
