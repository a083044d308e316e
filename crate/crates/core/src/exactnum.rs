//! Exact rationals, binomials, Bernoulli numbers/polynomials and power sums.

use std::sync::{OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::Factorization;
use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator. `Display` gives the canonical `p/q` (or `p`) form.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat_big(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n.clone()))
}

/// Canonical string: `p/q`, or `p` when `q = 1`; the sign sits on the numerator.
pub fn rational_string(x: &Rational) -> String {
    x.to_string()
}

/// Parses the canonical `p/q` or `p` form.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::domain(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// The integer value of `x`, or an internal-consistency error if it is not integral.
pub fn expect_integer(x: &Rational, what: &str) -> Result<BigInt> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(Error::Internal(format!(
            "{what} evaluated to non-integer {x}"
        )))
    }
}

pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn bernoulli_table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// Bernoulli number `B_m` with `B_1 = -1/2`.
///
/// Uses `Σ_{k=0}^{n-1} C(n,k) B_k = 0` (n ≥ 2) solved for `B_{n-1}`; values
/// are memoized process-wide.
pub fn bernoulli_number(m: usize) -> Rational {
    if let Some(b) = bernoulli_table().read().unwrap().get(m) {
        return b.clone();
    }
    let mut table = bernoulli_table().write().unwrap();
    while table.len() <= m {
        let n = table.len();
        let b = if n >= 3 && n % 2 == 1 {
            Rational::zero()
        } else {
            let sum = table
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (k, bk)| {
                    acc + rat_big(&binomial(n as u64 + 1, k as u64)) * bk
                });
            -sum / rat_int(n as u64 + 1)
        };
        table.push(b);
    }
    table[m].clone()
}

/// `B_m(x) = Σ_{k=0}^{m} C(m,k) B_k x^{m-k}`.
pub fn bernoulli_poly(m: usize, x: &Rational) -> Rational {
    BernoulliPoly::new(m).eval(x)
}

/// `B_m` as a coefficient list, for evaluating at many points.
#[derive(Debug, Clone)]
pub struct BernoulliPoly {
    // coefficient of x^{m-k} at index k
    coeffs: Vec<Rational>,
}

impl BernoulliPoly {
    pub fn new(m: usize) -> Self {
        let coeffs = (0..=m)
            .map(|k| rat_big(&binomial(m as u64, k as u64)) * bernoulli_number(k))
            .collect();
        BernoulliPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// `Σ_{n=1}^{N} n^r` from the Bernoulli closed form
/// `N^r/2 + 1/(r+1) Σ_{m=0}^{⌊r/2⌋} C(r+1,2m) B_{2m} N^{r+1-2m}` (r ≥ 1).
pub fn power_sum(n: u64, r: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("power_sum needs N >= 1"));
    }
    if r == 0 {
        return Ok(BigUint::from(n));
    }
    let big_n = rat_int(n);
    let pow = |e: u32| Pow::pow(&big_n, e);
    let mut even = Rational::zero();
    for m in 0..=(r / 2) {
        let b = bernoulli_number(2 * m as usize);
        even += rat_big(&binomial(r as u64 + 1, 2 * m as u64)) * b * pow(r + 1 - 2 * m);
    }
    let total = pow(r) / rat_int(2) + even / rat_int(r + 1);
    to_natural(&total, "power_sum")
}

/// `Σ_{j ≤ n, gcd(j,n)=1} j^r` by the Bernoulli/prime-product closed form
/// `n^{r+1}/(r+1) Σ_m C(r+1,2m) B_{2m} n^{-2m} Π_{p|n} (1 - p^{2m-1})`.
///
/// The closed form does not cover `n = 1`; there the sum is just `1^r = 1`.
pub fn coprime_power_sum(n: &Factorization, r: u32) -> Result<BigUint> {
    if n.value() == 1 {
        return Ok(BigUint::one());
    }
    let nn = rat_int(n.value());
    let mut acc = Rational::zero();
    for m in 0..=(r / 2) {
        let mut prod = Rational::one();
        for p in n.primes() {
            // 1 - p^{2m-1}; for m = 0 that is 1 - 1/p
            let p = rat_int(p);
            let term = if m == 0 {
                Rational::one() - p.recip()
            } else {
                Rational::one() - Pow::pow(&p, 2 * m - 1)
            };
            prod *= term;
        }
        let coeff =
            rat_big(&binomial(r as u64 + 1, 2 * m as u64)) * bernoulli_number(2 * m as usize);
        acc += coeff * prod / Pow::pow(&nn, 2 * m);
    }
    let total = Pow::pow(&nn, r + 1) / rat_int(r + 1) * acc;
    to_natural(&total, "coprime_power_sum")
}

fn to_natural(x: &Rational, what: &str) -> Result<BigUint> {
    let i = expect_integer(x, what)?;
    if i.is_negative() {
        return Err(Error::Internal(format!("{what} evaluated to negative {i}")));
    }
    Ok(i.magnitude().clone())
}

/// `x^e` for rationals, also usable with negative exponents.
pub trait Pow {
    fn pow(&self, e: u32) -> Rational;
    fn powi(&self, e: i64) -> Rational;
}

impl Pow for Rational {
    fn pow(&self, e: u32) -> Rational {
        Rational::new(self.numer().pow(e), self.denom().pow(e))
    }

    fn powi(&self, e: i64) -> Rational {
        let p = Pow::pow(self, e.unsigned_abs() as u32);
        if e < 0 {
            p.recip()
        } else {
            p
        }
    }
}

/// `Σ_{n=1}^{N} n^r` as an exact integer, by direct summation.
pub fn power_sum_direct(n: u64, r: u32) -> BigUint {
    (1..=n).map(|i| BigUint::from(i).pow(r)).sum()
}
