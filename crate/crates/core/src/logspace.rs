//! Exact linear combinations of logarithms.
//!
//! A [`LogLinear`] is a finite rational combination of the symbols `log p`
//! (p prime) and `log 2π`. `log 2π` is kept atomic: the only place it appears
//! is the Gamma-weight closed form, which produces exactly that combination.
//! Equality is coefficient-wise on the canonical form.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    divisors, factor, global_sieve, jordan_totient, moebius, Factorization, PrimeSieve,
};
use crate::error::{Error, Result};
use crate::exactnum::{rat_big, rat_int, rational_to_f64, Pow, Rational};
use crate::summation::CompensatedSum;

/// Basis symbol. Primes sort first (by value), `log 2π` last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogSymbol {
    Prime(u64),
    TwoPi,
}

impl LogSymbol {
    pub fn ln(self) -> f64 {
        match self {
            LogSymbol::Prime(p) => (p as f64).ln(),
            LogSymbol::TwoPi => std::f64::consts::TAU.ln(),
        }
    }
}

impl fmt::Display for LogSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogSymbol::Prime(p) => write!(f, "log({p})"),
            LogSymbol::TwoPi => f.write_str("log(2pi)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LogLinear {
    terms: BTreeMap<LogSymbol, Rational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn symbol(sym: LogSymbol) -> Self {
        Self::term(sym, Rational::one())
    }

    pub fn term(sym: LogSymbol, coeff: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term(sym, coeff);
        out
    }

    pub fn of_integer(n: u64) -> Result<Self> {
        Ok(log_of_integer(&factor(n)?))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, sym: LogSymbol) -> Rational {
        self.terms.get(&sym).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LogSymbol, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, sym: LogSymbol, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(sym).or_insert_with(Rational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LogLinear {
            terms: self.terms.iter().map(|(s, v)| (*s, v * c)).collect(),
        }
    }

    /// `Σ coeff · ln(symbol)` in binary64 with compensated accumulation.
    pub fn float_value(&self) -> f64 {
        self.terms
            .iter()
            .map(|(s, c)| rational_to_f64(c) * s.ln())
            .collect::<CompensatedSum>()
            .value()
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (sym, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, _) => write!(f, "{c}*{sym}")?,
                (_, true) => write!(f, " - {}*{sym}", c.abs())?,
                (_, false) => write!(f, " + {c}*{sym}")?,
            }
        }
        Ok(())
    }
}

impl AddAssign<&LogLinear> for LogLinear {
    fn add_assign(&mut self, rhs: &LogLinear) {
        for (s, c) in &rhs.terms {
            self.add_term(*s, c.clone());
        }
    }
}

impl AddAssign for LogLinear {
    fn add_assign(&mut self, rhs: LogLinear) {
        *self += &rhs;
    }
}

impl SubAssign<&LogLinear> for LogLinear {
    fn sub_assign(&mut self, rhs: &LogLinear) {
        for (s, c) in &rhs.terms {
            self.add_term(*s, -c.clone());
        }
    }
}

impl Add for LogLinear {
    type Output = LogLinear;
    fn add(mut self, rhs: LogLinear) -> LogLinear {
        self += &rhs;
        self
    }
}

impl Sub for LogLinear {
    type Output = LogLinear;
    fn sub(mut self, rhs: LogLinear) -> LogLinear {
        self -= &rhs;
        self
    }
}

impl Sub<&LogLinear> for &LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: &LogLinear) -> LogLinear {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        self.scale(&-Rational::one())
    }
}

impl Zero for LogLinear {
    fn zero() -> Self {
        LogLinear::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Sum for LogLinear {
    fn sum<I: Iterator<Item = LogLinear>>(iter: I) -> Self {
        iter.fold(LogLinear::zero(), |a, b| a + b)
    }
}

impl Mul<Rational> for LogLinear {
    type Output = LogLinear;
    fn mul(self, rhs: Rational) -> LogLinear {
        self.scale(&rhs)
    }
}

impl Mul<LogLinear> for Rational {
    type Output = LogLinear;
    fn mul(self, rhs: LogLinear) -> LogLinear {
        rhs.scale(&self)
    }
}

impl Mul<LogLinear> for BigInt {
    type Output = LogLinear;
    fn mul(self, rhs: LogLinear) -> LogLinear {
        rhs.scale(&Rational::from_integer(self))
    }
}

impl Mul<LogLinear> for i64 {
    type Output = LogLinear;
    fn mul(self, rhs: LogLinear) -> LogLinear {
        rhs.scale(&rat_int(self))
    }
}

/// `log n = Σ e_p log p` over the factorization.
pub fn log_of_integer(f: &Factorization) -> LogLinear {
    LogLinear {
        terms: f
            .factors()
            .iter()
            .map(|&(p, e)| (LogSymbol::Prime(p), rat_int(e)))
            .collect(),
    }
}

/// `log n!` by Legendre's formula: the exponent of `p` in `n!` is `Σ_i ⌊n/p^i⌋`.
pub fn log_factorial(n: u64) -> LogLinear {
    let local;
    let sieve = if n <= global_sieve().limit() {
        global_sieve()
    } else {
        local = PrimeSieve::new(n);
        &local
    };
    let mut out = LogLinear::zero();
    for p in sieve.primes_up_to(n) {
        let mut e = 0u64;
        let mut q = n / p;
        while q > 0 {
            e += q;
            q /= p;
        }
        out.add_term(LogSymbol::Prime(p), rat_int(e));
    }
    out
}

/// Both sides of `Σ_{d|k} μ(d) d^-s log d = -(J_s(k)/k^s) Σ_{p|k} log p/(p^s - 1)`.
///
/// The left side is the literal divisor sum; the right side is the prime sum.
pub fn mu_log_lemma_sides(k: u64, s: u32) -> Result<(LogLinear, LogLinear)> {
    if s == 0 {
        return Err(Error::domain("lemma needs s >= 1"));
    }
    let f = factor(k)?;
    let mut lhs = LogLinear::zero();
    for d in divisors(&f) {
        let mu = moebius(&factor(d)?);
        if mu == 0 || d == 1 {
            continue;
        }
        let weight = rat_int(mu as i64) / Pow::pow(&rat_int(d), s);
        lhs += log_of_integer(&factor(d)?).scale(&weight);
    }

    let ratio = rat_big(&jordan_totient(s, &f)) / Pow::pow(&rat_int(k), s);
    let mut prime_sum = LogLinear::zero();
    for p in f.primes() {
        let denom = Pow::pow(&rat_int(p), s) - Rational::one();
        prime_sum.add_term(LogSymbol::Prime(p), denom.recip());
    }
    let rhs = prime_sum.scale(&-ratio);
    Ok((lhs, rhs))
}
