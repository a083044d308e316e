//! Factorization and the elementary multiplicative functions.
//!
//! Every arithmetic function here takes a [`Factorization`] rather than a raw
//! integer, so a sweep factors each modulus once and reuses it.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::logspace::{LogLinear, LogSymbol};

/// Default smallest-prime-factor table size.
pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

/// An integer together with its prime factorization.
///
/// Primes are strictly increasing and every exponent is at least one; the
/// factorization of 1 is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from prime/exponent pairs, checking the invariants.
    /// Primality of the bases is checked by trial division.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        let mut prev = 1;
        for &(p, e) in &factors {
            if p <= prev || e == 0 || !is_prime(p) {
                return Err(Error::domain(format!("invalid factor pair ({p}, {e})")));
            }
            prev = p;
            value = p
                .checked_pow(e)
                .and_then(|pe| value.checked_mul(pe))
                .ok_or_else(|| Error::domain("factorization value overflows u64"))?;
        }
        Ok(Factorization { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Squarefree divisors `e` of the value paired with `μ(e)`, in increasing order of `e`.
    ///
    /// A sum `Σ_{d|n} g(d) μ(n/d)` only has nonzero terms at `d = n/e` for these `e`.
    pub fn squarefree_divisors(&self) -> Vec<(u64, i8)> {
        let mut out = vec![(1u64, 1i8)];
        for p in self.primes() {
            let len = out.len();
            for i in 0..len {
                let (d, m) = out[i];
                out.push((d * p, -m));
            }
        }
        out.sort_unstable();
        out
    }

    /// Factorization of `value / d` for a divisor `d`.
    pub fn cofactor(&self, d: u64) -> Result<Factorization> {
        if d == 0 || !self.value.is_multiple_of(d) {
            return Err(Error::domain(format!("{d} does not divide {}", self.value)));
        }
        let mut rest = d;
        let mut factors = Vec::with_capacity(self.factors.len());
        for &(p, e) in &self.factors {
            let mut taken = 0;
            while taken < e && rest.is_multiple_of(p) {
                rest /= p;
                taken += 1;
            }
            if taken < e {
                factors.push((p, e - taken));
            }
        }
        Ok(Factorization {
            value: self.value / d,
            factors,
        })
    }
}

/// Smallest-prime-factor table for `[2, limit]`. Built once, read-only afterwards.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    spf: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let limit = limit.clamp(1, u32::MAX as u64);
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        // linear sieve
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let Some(m) = i.checked_mul(p as usize) else {
                    break;
                };
                if m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        PrimeSieve { limit, spf }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, or `None` outside `[2, limit]`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        self.spf(n)
            .map(|p| p == n)
            .or(if n < 2 { Some(false) } else { None })
    }

    /// All primes up to `min(n, limit)`.
    pub fn primes_up_to(&self, n: u64) -> impl Iterator<Item = u64> + '_ {
        let top = n.min(self.limit);
        (2..=top).filter(move |&i| self.spf[i as usize] as u64 == i)
    }
}

static GLOBAL_SIEVE: OnceLock<PrimeSieve> = OnceLock::new();

/// Sets the size of the process-wide sieve. Returns `false` if the sieve was
/// already built (in which case the existing one stays in place).
pub fn init_global_sieve(limit: u64) -> bool {
    let mut installed = false;
    GLOBAL_SIEVE.get_or_init(|| {
        installed = true;
        PrimeSieve::new(limit)
    });
    installed
}

/// The process-wide sieve, built with [`DEFAULT_SIEVE_LIMIT`] on first use
/// unless [`init_global_sieve`] ran earlier.
pub fn global_sieve() -> &'static PrimeSieve {
    GLOBAL_SIEVE.get_or_init(|| PrimeSieve::new(DEFAULT_SIEVE_LIMIT))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if let Some(b) = global_sieve().is_prime(n) {
        return b;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    true
}

/// Factors `n`, using the sieve while the cofactor is inside its range and
/// trial division above it.
pub fn factorize(n: u64, sieve: Option<&PrimeSieve>) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut push = |p: u64| match factors.last_mut() {
        Some((q, e)) if *q == p => *e += 1,
        _ => factors.push((p, 1)),
    };
    let mut m = n;
    let mut d = 2u64;
    while m > 1 {
        if let Some(p) = sieve.and_then(|s| s.spf(m)) {
            push(p);
            m /= p;
            continue;
        }
        if d.saturating_mul(d) > m {
            push(m);
            break;
        }
        if m.is_multiple_of(d) {
            push(d);
            m /= d;
        } else {
            d += if d == 2 { 1 } else { 2 };
        }
    }
    Ok(Factorization { value: n, factors })
}

/// [`factorize`] against the global sieve.
pub fn factor(n: u64) -> Result<Factorization> {
    factorize(n, Some(global_sieve()))
}

/// All divisors in increasing order.
pub fn divisors(f: &Factorization) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in f.factors() {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn moebius(f: &Factorization) -> i8 {
    if f.is_squarefree() {
        if f.omega().is_multiple_of(2) {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Jordan's totient `J_s(n) = n^s Π_{p|n} (1 - p^-s)`, evaluated block by
/// block as `Π (p^{se} - p^{s(e-1)})` so it stays integral.
///
/// `s = 0` is accepted and gives `[n = 1]`, which is also the value of the
/// divisor sum `Σ_{d|n} μ(n/d)`.
pub fn jordan_totient(s: u32, f: &Factorization) -> BigUint {
    let mut acc = BigUint::one();
    for &(p, e) in f.factors() {
        let p = BigUint::from(p);
        let low = p.pow(s * (e - 1));
        let high = &low * p.pow(s);
        acc *= high - low;
    }
    acc
}

pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// `Λ(n)`: `log p` when `n = p^a`, zero otherwise.
pub fn von_mangoldt(f: &Factorization) -> LogLinear {
    match f.factors() {
        [(p, _)] => LogLinear::symbol(LogSymbol::Prime(*p)),
        _ => LogLinear::zero(),
    }
}

/// Number and sum of divisors.
pub fn tau_sigma(f: &Factorization) -> (u64, u64) {
    f.factors().iter().fold((1, 1), |(t, s), &(p, e)| {
        let geometric = (p.pow(e + 1) - 1) / (p - 1);
        (t * (e as u64 + 1), s * geometric)
    })
}

/// Generalized GCD `(j, k^s)_s`: the largest `d | k` with `d^s | j`.
///
/// `j = 0` is divisible by everything, so the answer is `k`.
pub fn gen_gcd(j: u64, k: u64, s: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::domain("gen_gcd needs k >= 1"));
    }
    if s == 0 {
        return Err(Error::domain("gen_gcd needs s >= 1"));
    }
    Ok(gen_gcd_factored(j, &factor(k)?, s))
}

/// [`gen_gcd`] with `k` already factored. Per prime `p^a || k` the answer
/// carries `p^min(a, ⌊v_p(j)/s⌋)`.
pub fn gen_gcd_factored(j: u64, k: &Factorization, s: u32) -> u64 {
    debug_assert!(s >= 1);
    if j == 0 {
        return k.value();
    }
    let mut d = 1u64;
    for &(p, a) in k.factors() {
        let mut v = 0u32;
        let mut rest = j;
        // only need up to a*s powers of p
        while v < a * s && rest.is_multiple_of(p) {
            rest /= p;
            v += 1;
        }
        d *= p.pow((v / s).min(a));
    }
    d
}

/// `(f * g)(n) = Σ_{d|n} f(d) g(n/d)` for value tables keyed by divisor.
///
/// `f` and `g` may live in different types as long as their product lands in
/// a common additive type, e.g. integer Möbius values times [`LogLinear`]
/// logarithms.
pub fn dirichlet_convolve<F, G, V>(
    f: &BTreeMap<u64, F>,
    g: &BTreeMap<u64, G>,
    n: &Factorization,
) -> Result<V>
where
    F: Clone + Mul<G, Output = V>,
    G: Clone,
    V: Zero + Add<Output = V>,
{
    let mut acc = V::zero();
    for d in divisors(n) {
        let fd = f
            .get(&d)
            .ok_or_else(|| Error::domain(format!("left table has no value at divisor {d}")))?;
        let e = n.value() / d;
        let ge = g
            .get(&e)
            .ok_or_else(|| Error::domain(format!("right table has no value at divisor {e}")))?;
        acc = acc + fd.clone() * ge.clone();
    }
    Ok(acc)
}

/// `base^exp` if it fits in a `u64`.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn fac(n: u64) -> Factorization {
        factor(n).unwrap()
    }

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while n > 1 {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        out
    }

    fn brute_mu(n: u64) -> i64 {
        let f = trial_division(n);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(fac(1).factors(), &[]);
        assert_eq!(fac(12).factors(), &[(2, 2), (3, 1)]);
        assert_eq!(fac(360).factors(), trial_division(360).as_slice());
        assert_eq!(fac(360).factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert!(matches!(factorize(0, None), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_beyond_sieve_uses_trial_division() {
        let small = PrimeSieve::new(100);
        let n = 1_000_003u64 * 6;
        let f = factorize(n, Some(&small)).unwrap();
        assert_eq!(f.factors(), &[(2, 1), (3, 1), (1_000_003, 1)]);
        assert_eq!(factorize(n, None).unwrap(), f);
    }

    #[test]
    fn factorization_reconstructs_value() {
        for n in 1..=10_000u64 {
            let f = fac(n);
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.factors().iter().all(|&(_, e)| e >= 1));
        }
    }

    #[test]
    fn sieve_smallest_factor_is_prime() {
        let s = PrimeSieve::new(5000);
        for n in 2..=5000 {
            let p = s.spf(n).unwrap();
            assert_eq!(n % p, 0);
            assert_eq!(trial_division(p), vec![(p, 1)]);
        }
        assert_eq!(s.spf(5001), None);
        assert_eq!(
            s.primes_up_to(30).collect::<Vec<_>>(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
    }

    #[test]
    fn from_factors_validates() {
        assert_eq!(
            Factorization::from_factors(vec![(2, 2), (3, 1)])
                .unwrap()
                .value(),
            12
        );
        assert!(Factorization::from_factors(vec![(3, 1), (2, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(4, 1)]).is_err());
        assert!(Factorization::from_factors(vec![(2, 0)]).is_err());
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(&fac(1)), vec![1]);
        assert_eq!(divisors(&fac(12)), vec![1, 2, 3, 4, 6, 12]);
        let brute: Vec<u64> = (1..=36).filter(|d| 36 % d == 0).collect();
        assert_eq!(brute.len(), 9);
        assert_eq!(divisors(&fac(36)), brute);
    }

    #[test]
    fn moebius_examples_and_sum() {
        assert_eq!(moebius(&fac(1)), 1);
        assert_eq!(moebius(&fac(4)), 0);
        assert_eq!(moebius(&fac(30)), -1);
        for n in 1..=2000u64 {
            assert_eq!(moebius(&fac(n)) as i64, brute_mu(n));
            let sum: i64 = divisors(&fac(n))
                .iter()
                .map(|&d| moebius(&fac(d)) as i64)
                .sum();
            assert_eq!(sum, (n == 1) as i64, "n = {n}");
        }
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_totient(1, &fac(6)), big(2));
        assert_eq!(jordan_totient(2, &fac(6)), big(24));
        assert_eq!(jordan_totient(3, &fac(1)), big(1));
        assert_eq!(jordan_totient(0, &fac(1)), big(1));
        assert_eq!(jordan_totient(0, &fac(12)), big(0));
    }

    #[test]
    fn jordan_matches_divisor_sum() {
        for n in 1..=2000u64 {
            let f = fac(n);
            for s in 1..=3u32 {
                let sum: i128 = divisors(&f)
                    .iter()
                    .map(|&d| (d as i128).pow(s) * brute_mu(n / d) as i128)
                    .sum();
                assert_eq!(
                    jordan_totient(s, &f),
                    BigUint::try_from(sum).unwrap(),
                    "n={n} s={s}"
                );
            }
        }
    }

    #[test]
    fn jordan_is_multiplicative() {
        for m in 1..=100u64 {
            for n in 1..=100u64 {
                if gcd(m, n) != 1 {
                    continue;
                }
                for s in 1..=3 {
                    assert_eq!(
                        jordan_totient(s, &fac(m * n)),
                        jordan_totient(s, &fac(m)) * jordan_totient(s, &fac(n))
                    );
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(euler_phi(&fac(1)), 1);
        let coprime = (1..=10u64).filter(|&j| gcd(j, 10) == 1).count() as u64;
        assert_eq!(euler_phi(&fac(10)), coprime);
        assert_eq!(euler_phi(&fac(10)), 4);
        assert_eq!(euler_phi(&fac(97)), 96);
        for n in 1..=500 {
            assert_eq!(big(euler_phi(&fac(n))), jordan_totient(1, &fac(n)));
        }
    }

    #[test]
    fn von_mangoldt_examples() {
        assert_eq!(
            von_mangoldt(&fac(8)),
            LogLinear::symbol(LogSymbol::Prime(2))
        );
        assert!(von_mangoldt(&fac(6)).is_zero());
        assert!(von_mangoldt(&fac(1)).is_zero());
    }

    #[test]
    fn gen_gcd_examples() {
        assert_eq!(gen_gcd(12, 6, 2).unwrap(), 2);
        assert_eq!(gen_gcd(5, 5, 1).unwrap(), 5);
        assert_eq!(gen_gcd(4, 2, 3).unwrap(), 1);
        assert_eq!(gen_gcd(0, 18, 2).unwrap(), 18);
        assert!(gen_gcd(3, 0, 1).is_err());
        assert!(gen_gcd(3, 4, 0).is_err());
    }

    #[test]
    fn gen_gcd_s1_is_gcd() {
        for j in 0..=500u64 {
            for k in 1..=500u64 {
                assert_eq!(gen_gcd_factored(j, &fac(k), 1), gcd(j, k));
            }
        }
    }

    #[test]
    fn gen_gcd_lattice_property() {
        for k in 1..=200u64 {
            let f = fac(k);
            let divs = divisors(&f);
            for s in 1..=3u32 {
                for j in 0..=500u64 {
                    let qualifying: Vec<u64> = divs
                        .iter()
                        .copied()
                        .filter(|&d| j % d.pow(s) == 0)
                        .collect();
                    let g = gen_gcd_factored(j, &f, s);
                    assert_eq!(*qualifying.iter().max().unwrap(), g);
                    assert_eq!(qualifying, divisors(&fac(g)), "j={j} k={k} s={s}");
                }
            }
        }
    }

    #[test]
    fn tau_sigma_examples() {
        assert_eq!(tau_sigma(&fac(1)), (1, 1));
        let d6 = divisors(&fac(6));
        assert_eq!(tau_sigma(&fac(6)), (d6.len() as u64, d6.iter().sum()));
        assert_eq!(tau_sigma(&fac(6)), (4, 12));
        assert_eq!(tau_sigma(&fac(13)), (2, 14));
    }

    #[test]
    fn convolution_examples() {
        let f6 = fac(6);
        let mu: BTreeMap<u64, i64> = divisors(&f6)
            .iter()
            .map(|&d| (d, moebius(&fac(d)) as i64))
            .collect();
        let one: BTreeMap<u64, i64> = divisors(&f6).iter().map(|&d| (d, 1)).collect();
        let id: BTreeMap<u64, i64> = divisors(&f6).iter().map(|&d| (d, d as i64)).collect();
        assert_eq!(dirichlet_convolve::<_, _, i64>(&mu, &one, &f6).unwrap(), 0);
        assert_eq!(dirichlet_convolve::<_, _, i64>(&mu, &id, &f6).unwrap(), 2);

        let f8 = fac(8);
        let mu8: BTreeMap<u64, BigRational> = divisors(&f8)
            .iter()
            .map(|&d| {
                (
                    d,
                    BigRational::from_integer((moebius(&fac(d)) as i64).into()),
                )
            })
            .collect();
        let log8: BTreeMap<u64, LogLinear> = divisors(&f8)
            .iter()
            .map(|&d| (d, LogLinear::of_integer(d).unwrap()))
            .collect();
        let lam: LogLinear = dirichlet_convolve(&mu8, &log8, &f8).unwrap();
        assert_eq!(lam, von_mangoldt(&f8));

        let mut partial = one.clone();
        partial.remove(&3);
        assert!(dirichlet_convolve::<_, _, i64>(&mu, &partial, &f6).is_err());
    }

    #[test]
    fn squarefree_divisors_carry_mobius() {
        let f = fac(360);
        let sq = f.squarefree_divisors();
        assert_eq!(sq.len(), 8);
        for (e, m) in sq {
            assert_eq!(m, moebius(&fac(e)));
        }
        assert_eq!(f.cofactor(12).unwrap(), fac(30));
        assert!(f.cofactor(7).is_err());
    }

    proptest! {
        #[test]
        fn jordan_multiplicative_prop(m in 1u64..5000, n in 1u64..5000, s in 1u32..4) {
            prop_assume!(gcd(m, n) == 1);
            prop_assert_eq!(
                jordan_totient(s, &fac(m * n)),
                jordan_totient(s, &fac(m)) * jordan_totient(s, &fac(n))
            );
        }
    }
}
