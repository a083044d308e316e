use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::arith::{euler_phi, factor, jordan_totient, tau_sigma};
use crate::error::{Error, Result};

/// Weight `f` for the GCD-weighted sum `Σ_j f((j, k^s)_s^s) c_k^(s)(j)`.
///
/// `Power(s)` is `f = N^s`, which turns the weight into a power of the
/// generalized GCD.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightFunctionSpec {
    Power(u32),
    Phi,
    Jordan(u32),
    Tau,
    Sigma,
    /// Explicit values; evaluating outside the table is a domain error.
    Table(BTreeMap<u64, BigInt>),
}

impl WeightFunctionSpec {
    pub fn eval(&self, x: u64) -> Result<BigInt> {
        Ok(match self {
            WeightFunctionSpec::Power(t) => BigInt::from(x).pow(*t),
            WeightFunctionSpec::Phi => euler_phi(&factor(x)?).into(),
            WeightFunctionSpec::Jordan(t) => jordan_totient(*t, &factor(x)?).into(),
            WeightFunctionSpec::Tau => tau_sigma(&factor(x)?).0.into(),
            WeightFunctionSpec::Sigma => tau_sigma(&factor(x)?).1.into(),
            WeightFunctionSpec::Table(t) => t
                .get(&x)
                .cloned()
                .ok_or_else(|| Error::domain(format!("weight table has no value at {x}")))?,
        })
    }
}

impl fmt::Display for WeightFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunctionSpec::Power(t) => write!(f, "power({t})"),
            WeightFunctionSpec::Phi => f.write_str("phi"),
            WeightFunctionSpec::Jordan(t) => write!(f, "jordan({t})"),
            WeightFunctionSpec::Tau => f.write_str("tau"),
            WeightFunctionSpec::Sigma => f.write_str("sigma"),
            WeightFunctionSpec::Table(t) => {
                let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                write!(f, "table({})", parts.join(";"))
            }
        }
    }
}

/// Parses `phi`, `tau`, `sigma`, `power(t)`, `jordan(t)` or `table(1:1;2:5;...)`.
impl FromStr for WeightFunctionSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("unknown weight function {s:?}"));
        let s = s.trim();
        let arg = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')
        };
        match s {
            "phi" => return Ok(WeightFunctionSpec::Phi),
            "tau" => return Ok(WeightFunctionSpec::Tau),
            "sigma" => return Ok(WeightFunctionSpec::Sigma),
            _ => {}
        }
        if let Some(a) = arg("power") {
            return a.parse().map(WeightFunctionSpec::Power).map_err(|_| bad());
        }
        if let Some(a) = arg("jordan") {
            return a.parse().map(WeightFunctionSpec::Jordan).map_err(|_| bad());
        }
        if let Some(a) = arg("table") {
            let mut table = BTreeMap::new();
            for entry in a.split(';').filter(|e| !e.is_empty()) {
                let (k, v) = entry.split_once(':').ok_or_else(bad)?;
                table.insert(
                    k.trim().parse().map_err(|_| bad())?,
                    v.trim().parse().map_err(|_| bad())?,
                );
            }
            return Ok(WeightFunctionSpec::Table(table));
        }
        Err(bad())
    }
}
