//! Exact arithmetic for Cohen's generalized Ramanujan sums
//! `c_k^(s)(j)` and machine checks of their weighted-average identities.
//!
//! Integers and rationals are arbitrary precision, logarithms are kept as
//! exact rational combinations of `log p` and `log 2π`, and floating point
//! is used only where an identity is transcendental.
//!
//! ```
//! use ramsum::{csum_moebius, CsumTable};
//!
//! assert_eq!(csum_moebius(6, 3, 1).unwrap(), (-2).into());
//! let t = CsumTable::new(4, 1, 1_000).unwrap();
//! assert_eq!(t.to_json(), "[2,0,-2,0]");
//! ```

pub mod arith;
pub mod csum;
pub mod error;
pub mod exactnum;
pub mod identities;
pub mod logspace;
pub mod summation;

pub use arith::{
    factor, factorize, gen_gcd, init_global_sieve, jordan_totient, moebius, Factorization,
    PrimeSieve,
};
pub use csum::{
    csum_direct, csum_hoelder, csum_moebius, evaluate, theta, CsumEvaluation, CsumMethod,
    CsumTable, DEFAULT_EVAL_CAP, DEFAULT_SWEEP_CAP,
};
pub use error::{Error, Result};
pub use exactnum::{bernoulli_number, rational_string, Rational};
pub use identities::{
    run_suite, CheckResult, Classification, GridOverrides, IdentityId, IdentityReport, SuiteConfig,
    WeightFunctionSpec,
};
pub use logspace::{LogLinear, LogSymbol};
