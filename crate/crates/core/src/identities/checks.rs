use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{CheckResult, IdentityId, Params, Value, WeightFunctionSpec, DEFAULT_TOLERANCE};
use crate::arith::{
    divisors, euler_phi, factor, gcd, gen_gcd_factored, jordan_totient, lcm, moebius, von_mangoldt,
    Factorization,
};
use crate::csum::{modulus, theta, CsumTable, MoebiusEvaluator, DEFAULT_EVAL_CAP};
use crate::error::{Error, Result};
use crate::exactnum::{
    bernoulli_number, binomial, coprime_power_sum, power_sum, power_sum_direct, rat, rat_big,
    rat_int, rational_to_f64, BernoulliPoly, Pow, Rational,
};
use crate::logspace::{log_factorial, log_of_integer, mu_log_lemma_sides, LogLinear, LogSymbol};
use crate::summation::{unit_root, CompensatedSum, ComplexCompensatedSum};

/// Largest `k^s` accepted by the binomial-weight check (the weights grow like `2^{k^s}`).
pub const BINOMIAL_CAP: u64 = 256;
/// Largest `N` accepted by the Gauss product check.
pub const GAUSS_MAX: u64 = 500;
/// Relative tolerance of the cosine/multisection cross-checks.
pub const COSINE_TOLERANCE: f64 = 1e-9;
/// Absolute tolerance of the exponential-weight check.
pub const EXP_TOLERANCE: f64 = 1e-9;
/// Agreement required between the two renderings of the Gamma-weight right side.
pub const GAMMA_RHS_AGREEMENT: f64 = 1e-12;
/// Per-unit-of-N tolerance of the Gauss product check.
pub const GAUSS_TOLERANCE_PER_N: f64 = 1e-9;

/// Size cap and floating tolerance shared by the checkers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Upper bound on `k^s` (or `lcm^s`).
    pub cap: u64,
    /// Relative tolerance for the Gamma-weight check.
    pub tolerance: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cap: DEFAULT_EVAL_CAP,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::domain(msg))
    }
}

/// `Σ_{j ∈ range} j^r w(j)`, in `i128` while it fits and `BigInt` beyond.
fn power_weighted_sum(range: RangeInclusive<u64>, r: u32, weight: impl Fn(u64) -> i128) -> BigInt {
    let mut fast: i128 = 0;
    let mut slow = BigInt::zero();
    for j in range {
        let w = weight(j);
        if w == 0 {
            continue;
        }
        let term = (j as i128).checked_pow(r).and_then(|p| p.checked_mul(w));
        match term.and_then(|t| fast.checked_add(t)) {
            Some(v) => fast = v,
            None => slow += BigInt::from(j).pow(r) * w,
        }
    }
    slow + fast
}

fn jordan(s: u32, f: &Factorization) -> Rational {
    rat_big(&jordan_totient(s, f))
}

/// `Σ_{m=0}^{⌊r/2⌋} C(r+1, 2m) B_{2m} term(m)`.
fn even_bernoulli_sum(r: u32, term: impl Fn(u32) -> Rational) -> Rational {
    (0..=r / 2)
        .map(|m| {
            rat_big(&binomial(r as u64 + 1, 2 * m as u64))
                * bernoulli_number(2 * m as usize)
                * term(m)
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// Classical Alkan average `S_r(k) = k^{-(r+1)} Σ_{j=1}^{k} j^r c_k(j)` against
/// `φ(k)/2k + 1/(r+1) Σ_m C(r+1,2m) B_{2m} Π_{p|k}(1 - p^{-2m})`.
pub fn check_alkan_classical(k: u64, r: u32, lim: &Limits) -> Result<CheckResult> {
    require(k >= 1 && r >= 1, "alkan-classical needs k >= 1, r >= 1")?;
    let table = CsumTable::new(k, 1, lim.cap)?;
    let kf = factor(k)?;
    let num = power_weighted_sum(1..=k, r, |j| table.get(j as i64) as i128);
    let lhs = Rational::new(num, BigInt::from(k).pow(r + 1));

    let rhs = rat(euler_phi(&kf) as i64, 2 * k as i64)
        + even_bernoulli_sum(r, |m| {
            kf.primes().fold(Rational::one(), |acc, p| {
                acc * (Rational::one() - Pow::powi(&rat_int(p), -2 * m as i64))
            })
        }) / rat_int(r + 1);
    Ok(CheckResult::exact(
        IdentityId::AlkanClassical,
        Params::new().int("k", k as i64).int("r", r),
        Value::Rational(lhs),
        Value::Rational(rhs),
    ))
}

/// `S_r^(s)(k) = k^{-s(r+1)} Σ_{j=1}^{k^s} j^r c_k^(s)(j)` (the left side).
pub fn alkan_average(table: &CsumTable, r: u32) -> Rational {
    let n = table.period();
    let num = power_weighted_sum(1..=n, r, |j| table.get(j as i64) as i128);
    Rational::new(num, BigInt::from(n).pow(r + 1))
}

/// Generalized Alkan identity with right side
/// `J_s(k)/2k^s + 1/(r+1) Σ_m C(r+1,2m) B_{2m} J_{2ms}(k)/k^{2ms}`.
///
/// The details also carry the alternative form with `J_s(k)/2k` and
/// `J_s(k)/k^{2ms}` and whether it matches.
pub fn check_alkan_generalized(k: u64, s: u32, r: u32, lim: &Limits) -> Result<CheckResult> {
    require(k >= 1 && s >= 1 && r >= 1, "alkan needs k, s, r >= 1")?;
    let table = CsumTable::new(k, s, lim.cap)?;
    let kf = factor(k)?;
    let lhs = alkan_average(&table, r);

    let ks = rat_int(k).pow_u(s);
    let js = jordan(s, &kf);
    let rhs = &js / (rat_int(2) * &ks)
        + even_bernoulli_sum(r, |m| jordan(2 * m * s, &kf) / rat_int(k).pow_u(2 * m * s))
            / rat_int(r + 1);

    let alternative = &js / rat_int(2 * k)
        + even_bernoulli_sum(r, |m| &js / rat_int(k).pow_u(2 * m * s)) / rat_int(r + 1);
    let alt_matches = alternative == lhs;
    Ok(CheckResult::exact(
        IdentityId::Alkan,
        Params::new().int("k", k as i64).int("s", s).int("r", r),
        Value::Rational(lhs),
        Value::Rational(rhs),
    )
    .detail("alt_form", &alternative)
    .detail("alt_form_matches", alt_matches))
}

trait PowU {
    fn pow_u(&self, e: u32) -> Rational;
}

impl PowU for Rational {
    fn pow_u(&self, e: u32) -> Rational {
        Pow::pow(self, e)
    }
}

/// Whether `rad(k)^s | k`.
pub fn is_s_full(kf: &Factorization, s: u32) -> bool {
    kf.factors().iter().all(|&(_, e)| e >= s)
}

/// Log-weight identity
/// `(1/k) Σ_{j=1}^{k} log j · c_k^(s)(j) = sΛ(k) + Σ_{d|k} (d^s/k) μ(k/d) log(⌊k/d^s⌋)!`,
/// both sides exact in [`LogLinear`]. Terms with `d^s > k` contribute
/// `log 0! = 0`.
///
/// For `s ≥ 2` the identity does not hold in general; mismatches there are
/// classified as findings.
pub fn check_log_weight(k: u64, s: u32) -> Result<CheckResult> {
    require(k >= 1 && s >= 1, "log-weight needs k, s >= 1")?;
    let ev = MoebiusEvaluator::new(k, s)?;
    let kf = ev.factorization().clone();
    let inv_k = rat(1, k as i64);

    let mut lhs = LogLinear::zero();
    for j in 2..=k {
        let c = ev.eval(j as i64);
        if c.is_zero() {
            continue;
        }
        lhs += log_of_integer(&factor(j)?).scale(&(Rational::from_integer(c.clone()) * &inv_k));
    }

    let mut rhs = von_mangoldt(&kf).scale(&rat_int(s));
    for d in divisors(&kf) {
        let mu = moebius(&kf.cofactor(d)?);
        if mu == 0 {
            continue;
        }
        let count = d.checked_pow(s).map_or(0, |ds| k / ds);
        if count < 2 {
            continue; // log 0! = log 1! = 0
        }
        let weight = rat_int(BigInt::from(d).pow(s) * mu) * &inv_k;
        rhs += log_factorial(count).scale(&weight);
    }

    let result = CheckResult::exact(
        IdentityId::LogWeight,
        Params::new().int("k", k as i64).int("s", s),
        Value::Log(lhs),
        Value::Log(rhs),
    )
    .detail("s_full", is_s_full(&kf, s));
    Ok(if s >= 2 {
        result.into_finding()
    } else {
        result
    })
}

/// GCD-weight identity
/// `Σ_{j=1}^{k^s} f((j,k^s)_s^s) c_k^(s)(j) = J_s(k) Σ_{d|k} f(d^s) μ(k/d)`.
pub fn check_gcd_weight(
    k: u64,
    s: u32,
    f: &WeightFunctionSpec,
    lim: &Limits,
) -> Result<CheckResult> {
    require(k >= 1 && s >= 1, "gcd-weight needs k, s >= 1")?;
    let table = CsumTable::new(k, s, lim.cap)?;
    let kf = factor(k)?;
    let n = table.period();

    // group the j-sum by generalized gcd, then weight each class once
    let mut by_gcd: BTreeMap<u64, i128> = BTreeMap::new();
    for j in 1..=n {
        let e = gen_gcd_factored(j % n, &kf, s);
        *by_gcd.entry(e).or_insert(0) += table.get(j as i64) as i128;
    }
    let mut lhs = BigInt::zero();
    for (e, c) in by_gcd {
        lhs += f.eval(e.pow(s))? * c;
    }

    let mut conv = BigInt::zero();
    for d in divisors(&kf) {
        let mu = moebius(&kf.cofactor(d)?);
        if mu != 0 {
            conv += f.eval(d.pow(s))? * mu;
        }
    }
    let rhs = BigInt::from(jordan_totient(s, &kf)) * conv;
    Ok(CheckResult::exact(
        IdentityId::GcdWeight,
        Params::new()
            .int("k", k as i64)
            .int("s", s)
            .text("f", f.to_string()),
        Value::Integer(lhs),
        Value::Integer(rhs),
    ))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Exact right side of the Gamma-weight identity,
/// `(s/2) Σ_{p|k} log p/(p^s - 1) - (1/2) log 2π`.
pub fn gamma_weight_rhs(kf: &Factorization, s: u32) -> LogLinear {
    let mut out = LogLinear::term(LogSymbol::TwoPi, rat(-1, 2));
    for p in kf.primes() {
        let coeff = rat(s as i64, 2) / (rat_int(p).pow_u(s) - Rational::one());
        out.add_term(LogSymbol::Prime(p), coeff);
    }
    out
}

/// Gamma-weight identity
/// `(1/J_s(k)) Σ_{j=1}^{k^s} ln Γ(j/k^s) c_k^(s)(j) = (s/2) Σ_{p|k} log p/(p^s-1) - (log 2π)/2`
/// for `k ≥ 2`. The left side is floating point; the right side is exact
/// and rendered to binary64 two independent ways.
pub fn check_gamma_weight(k: u64, s: u32, lim: &Limits) -> Result<CheckResult> {
    require(
        k >= 2,
        "gamma-weight needs k >= 2 (at k = 1 the identity degenerates)",
    )?;
    require(s >= 1, "gamma-weight needs s >= 1")?;
    let table = CsumTable::new(k, s, lim.cap)?;
    let kf = factor(k)?;
    let n = table.period();
    let mut acc = CompensatedSum::new();
    for j in 1..=n {
        let c = table.get(j as i64);
        if c != 0 {
            acc.add(ln_gamma(j as f64 / n as f64) * c as f64);
        }
    }
    let jk = rational_to_f64(&jordan(s, &kf));
    let lhs = acc.value() / jk;

    let exact = gamma_weight_rhs(&kf, s);
    let rhs = exact.float_value();
    let direct = {
        let mut sum = CompensatedSum::new();
        for p in kf.primes() {
            sum.add((p as f64).ln() / ((p as f64).powi(s as i32) - 1.0));
        }
        s as f64 / 2.0 * sum.value() - std::f64::consts::TAU.ln() / 2.0
    };

    let tol = lim.tolerance * rhs.abs().max(1.0);
    let result = CheckResult::floating(
        IdentityId::GammaWeight,
        Params::new().int("k", k as i64).int("s", s),
        lhs,
        rhs,
        tol,
    )
    .detail("rhs_exact", &exact)
    .detail("rhs_direct", format!("{direct:?}"));
    let agreement = (rhs - direct).abs();
    Ok(if agreement > GAMMA_RHS_AGREEMENT * rhs.abs().max(1.0) {
        result.fail_with("rhs_renderings_disagree", format!("{agreement:e}"))
    } else {
        result
    })
}

/// `Σ_{j=1}^{N} ln Γ(j/N) = ((N-1)/2) ln 2π - (1/2) ln N`, to `1e-9·N`.
pub fn check_gauss_product(n: u64) -> Result<CheckResult> {
    require(
        (1..=GAUSS_MAX).contains(&n),
        "gauss-product needs 1 <= N <= 500",
    )?;
    let lhs: CompensatedSum = (1..=n).map(|j| ln_gamma(j as f64 / n as f64)).collect();
    let rhs = (n as f64 - 1.0) / 2.0 * std::f64::consts::TAU.ln() - 0.5 * (n as f64).ln();
    Ok(CheckResult::floating(
        IdentityId::GaussProduct,
        Params::new().int("N", n as i64),
        lhs.value(),
        rhs,
        GAUSS_TOLERANCE_PER_N * n as f64,
    ))
}

/// Bernoulli-weight identity
/// `(1/k^s) Σ_{j=0}^{k^s-1} B_m(j/k^s) c_k^(s)(j) = B_m J_{sm}(k) / k^{sm}`,
/// with `J_0(k) = [k = 1]`.
pub fn check_bernoulli_weight(k: u64, s: u32, m: u32, lim: &Limits) -> Result<CheckResult> {
    require(k >= 1 && s >= 1, "bernoulli-weight needs k, s >= 1")?;
    let table = CsumTable::new(k, s, lim.cap)?;
    let kf = factor(k)?;
    let n = table.period();
    let poly = BernoulliPoly::new(m as usize);
    let big_n = BigInt::from(n);
    let mut sum = Rational::zero();
    for j in 0..n {
        let c = table.get(j as i64);
        if c != 0 {
            let x = Rational::new(BigInt::from(j), big_n.clone());
            sum += poly.eval(&x) * rat_int(c);
        }
    }
    let lhs = sum / rat_int(n);
    let rhs = bernoulli_number(m as usize) * jordan(s * m, &kf) / rat_int(k).pow_u(s * m);
    Ok(CheckResult::exact(
        IdentityId::BernoulliWeight,
        Params::new().int("k", k as i64).int("s", s).int("m", m),
        Value::Rational(lhs),
        Value::Rational(rhs),
    ))
}

/// `cos(π·a/b)` with the argument reduced exactly modulo `2π`.
fn cos_pi_ratio(a: u64, b: u64) -> f64 {
    let a = a % (2 * b);
    (std::f64::consts::PI * a as f64 / b as f64).cos()
}

/// Binomial-weight identity. The left side `Σ_{j=0}^{k^s} C(k^s,j) c_k^(s)(j)`
/// is compared exactly with `Σ_{d|k} d^s μ(k/d) Σ_m C(k^s, m d^s)`, and in
/// floating point with `2^{k^s} Σ_{d|k} μ(k/d) Σ_{l=1}^{d^s} (-1)^{l k^s/d^s} cos^{k^s}(lπ/d^s)`
/// relative to `max(|lhs|, 2^{k^s})`.
pub fn check_binomial_weight(k: u64, s: u32, lim: &Limits) -> Result<CheckResult> {
    require(k >= 1 && s >= 1, "binomial-weight needs k, s >= 1")?;
    let n = modulus(k, s, lim.cap.min(BINOMIAL_CAP))?;
    let table = CsumTable::new(k, s, n)?;
    let kf = factor(k)?;
    let row: Vec<BigInt> = (0..=n).map(|j| BigInt::from(binomial(n, j))).collect();

    let lhs: BigInt = (0..=n)
        .map(|j| &row[j as usize] * table.get(j as i64))
        .sum();

    let mut exact = BigInt::zero();
    let mut cosine = CompensatedSum::new();
    let two_n = 2f64.powi(n as i32);
    for d in divisors(&kf) {
        let mu = moebius(&kf.cofactor(d)?);
        if mu == 0 {
            continue;
        }
        let ds = d.pow(s);
        let inner: BigInt = (0..=n / ds).map(|m| &row[(m * ds) as usize]).sum();
        exact += inner * BigInt::from(ds) * mu;
        for l in 1..=ds {
            let sign = if (l * (n / ds)) % 2 == 0 { 1.0 } else { -1.0 };
            cosine.add(mu as f64 * sign * two_n * cos_pi_ratio(l, ds).powi(n as i32));
        }
    }

    let lhs_f = lhs.to_f64().unwrap_or(f64::INFINITY);
    let scale = lhs_f.abs().max(two_n);
    let rel = (cosine.value() - lhs_f).abs() / scale;
    let result = CheckResult::exact(
        IdentityId::BinomialWeight,
        Params::new().int("k", k as i64).int("s", s),
        Value::Integer(lhs),
        Value::Integer(exact),
    )
    .detail("rhs_cosine", format!("{:?}", cosine.value()))
    .detail("cosine_relative_residual", format!("{rel:e}"));
    Ok(if rel > COSINE_TOLERANCE {
        result.fail_with("cosine_branch", "relative residual above 1e-9")
    } else {
        result
    })
}

/// Series multisection
/// `Σ_{m=0}^{⌊n/r⌋} C(n, mr) = (2^n/r) Σ_{l=1}^{r} cos^n(lπ/r) cos(nlπ/r)`,
/// exact left side against the floating right side, relative tolerance 1e-9.
pub fn check_multisection(n: u64, r: u64) -> Result<CheckResult> {
    require(
        (1..=BINOMIAL_CAP).contains(&n),
        "multisection needs 1 <= n <= 256",
    )?;
    require(r >= 1 && r <= n, "multisection needs 1 <= r <= n")?;
    let lhs: BigInt = (0..=n / r).map(|m| BigInt::from(binomial(n, m * r))).sum();
    let mut acc = CompensatedSum::new();
    for l in 1..=r {
        acc.add(cos_pi_ratio(l, r).powi(n as i32) * cos_pi_ratio(n * l, r));
    }
    let rhs = 2f64.powi(n as i32) / r as f64 * acc.value();
    let lhs_f = lhs.to_f64().unwrap_or(f64::INFINITY);
    let mut result = CheckResult::floating(
        IdentityId::Multisection,
        Params::new().int("n", n as i64).int("r", r as i64),
        lhs_f,
        rhs,
        COSINE_TOLERANCE * lhs_f.abs(),
    );
    result.lhs = Value::Integer(lhs);
    Ok(result)
}

/// Exponential-weight checks at a fixed `(k, s)` share one table.
#[derive(Debug, Clone)]
pub struct ExpWeightContext {
    table: CsumTable,
}

impl ExpWeightContext {
    pub fn new(k: u64, s: u32, lim: &Limits) -> Result<Self> {
        Ok(ExpWeightContext {
            table: CsumTable::new(k, s, lim.cap)?,
        })
    }

    /// `(1/k^s) Σ_{j=1}^{k^s} exp(2πi·j·n/k^s) c_k^(s)(j)` against `θ_k^(s)(n)`.
    pub fn check(&self, n: u64) -> Result<CheckResult> {
        let (k, s, period) = (self.table.k(), self.table.s(), self.table.period());
        let mut acc = ComplexCompensatedSum::new();
        let nr = n % period;
        for j in 1..=period {
            let c = self.table.get(j as i64);
            if c != 0 {
                let t = ((j as u128 * nr as u128) % period as u128) as u64;
                acc.add(unit_root(t, period) * c as f64);
            }
        }
        let z: Complex64 = acc.value() / period as f64;
        let th = theta(k, n as i64, s)?;
        let result = CheckResult::floating(
            IdentityId::ExpWeight,
            Params::new()
                .int("k", k as i64)
                .int("s", s)
                .int("n", n as i64),
            z.re,
            th as f64,
            EXP_TOLERANCE,
        )
        .detail("imag", format!("{:?}", z.im));
        Ok(if z.im.abs() >= EXP_TOLERANCE {
            result.fail_with("imaginary_part", "imaginary part above 1e-9")
        } else {
            result
        })
    }
}

pub fn check_exp_weight(k: u64, s: u32, n: u64, lim: &Limits) -> Result<CheckResult> {
    require(k >= 1 && s >= 1, "exp-weight needs k, s >= 1")?;
    ExpWeightContext::new(k, s, lim)?.check(n)
}

/// `g_m^(s)(k_1..k_n) = Σ_{d_i|k_i} Π d_i^s μ(k_i/d_i) · lcm(d)^{(2m-1)s}`.
pub fn g_multivariate(ks: &[u64], s: u32, m: u32) -> Result<Rational> {
    require(
        !ks.is_empty() && ks.iter().all(|&k| k >= 1),
        "g needs a non-empty list of k_i >= 1",
    )?;
    // per coordinate: (d, d^s μ(k/d)) with μ ≠ 0
    let mut factors: Vec<Vec<(u64, BigInt)>> = Vec::with_capacity(ks.len());
    for &k in ks {
        let kf = factor(k)?;
        let mut col = Vec::new();
        for d in divisors(&kf) {
            let mu = moebius(&kf.cofactor(d)?);
            if mu != 0 {
                col.push((d, BigInt::from(d).pow(s) * mu));
            }
        }
        factors.push(col);
    }
    let exponent = (2 * m as i64 - 1) * s as i64;
    let mut total = Rational::zero();
    let mut stack: Vec<(usize, u64, BigInt)> = vec![(0, 1, BigInt::one())];
    while let Some((i, l, w)) = stack.pop() {
        if i == factors.len() {
            total += Rational::from_integer(w) * Pow::powi(&rat_int(l), exponent);
            continue;
        }
        for (d, v) in &factors[i] {
            stack.push((i + 1, lcm(l, *d), &w * v));
        }
    }
    Ok(total)
}

/// Multivariate identity for `S_r^(s)(k_1..k_n) = k^{-s(r+1)} Σ_{j=1}^{k^s} j^r Π_i c_{k_i}^(s)(j)`
/// with `k = lcm(k_i)`, against
/// `Π J_s(k_i)/2k^s + 1/(r+1) Σ_m C(r+1,2m) B_{2m} g_m^(s)/k^{2ms}`.
///
/// At `r = 1` the details also hold the corollary `Π J_s(k_i)/2k^s + E/2`
/// with `E = g_0` (checked), and the residuals of the variants with
/// `E = g_1` and with denominator `2k`.
pub fn check_multivariate(ks: &[u64], s: u32, r: u32, lim: &Limits) -> Result<CheckResult> {
    require(
        (1..=4).contains(&ks.len()),
        "multivariate needs 1 to 4 moduli",
    )?;
    require(
        ks.iter().all(|&k| k >= 1) && s >= 1 && r >= 1,
        "multivariate needs k_i, s, r >= 1",
    )?;
    let k = ks.iter().fold(1u64, |a, &b| lcm(a, b));
    let n = modulus(k, s, lim.cap)?;
    let tables = ks
        .iter()
        .map(|&ki| CsumTable::new(ki, s, lim.cap))
        .collect::<Result<Vec<_>>>()?;
    let weight = |j: u64| -> i128 { tables.iter().map(|t| t.get(j as i64) as i128).product() };
    let num = power_weighted_sum(1..=n, r, weight);
    let lhs = Rational::new(num, BigInt::from(n).pow(r + 1));

    let jprod = ks
        .iter()
        .try_fold(Rational::one(), |acc, &ki| -> Result<Rational> {
            Ok(acc * jordan(s, &factor(ki)?))
        })?;
    let first = &jprod / (rat_int(2) * rat_int(n));
    let mut gs = Vec::new();
    for m in 0..=r / 2 {
        gs.push(g_multivariate(ks, s, m)?);
    }
    let rhs = &first
        + even_bernoulli_sum(r, |m| &gs[m as usize] / rat_int(k).pow_u(2 * m * s)) / rat_int(r + 1);

    let mut result = CheckResult::exact(
        IdentityId::Multivariate,
        Params::new().list("ks", ks).int("s", s).int("r", r),
        Value::Rational(lhs.clone()),
        Value::Rational(rhs),
    );
    if r == 1 {
        let g0 = &gs[0];
        let g1 = g_multivariate(ks, s, 1)?;
        let corollary = &first + g0 / rat_int(2);
        let residual = (&lhs - &corollary).abs();
        let with_g1 = (&lhs - (&first + &g1 / rat_int(2))).abs();
        let with_2k = (&lhs - (&jprod / rat_int(2 * k) + g0 / rat_int(2))).abs();
        result = result
            .detail("corollary_rhs", &corollary)
            .detail("corollary_residual", &residual)
            .detail("corollary_g1_residual", &with_g1)
            .detail("corollary_2k_residual", &with_2k);
        if !residual.is_zero() {
            result = result.fail_with(
                "corollary",
                "corollary with E = g_0 and 2k^s does not match",
            );
        }
    }
    Ok(result)
}

/// `g_m^(s)` multiplicativity: `g(k_i k'_i) = g(k_i) g(k'_i)` for coprime tuples.
pub fn check_g_multiplicative(ks: &[u64], ks2: &[u64], s: u32, m: u32) -> Result<CheckResult> {
    require(
        ks.len() == ks2.len() && !ks.is_empty(),
        "g-multiplicative needs equal non-empty lengths",
    )?;
    require(
        ks.iter().all(|&a| ks2.iter().all(|&b| gcd(a, b) == 1)),
        "g-multiplicative needs gcd(Π ks, Π ks2) = 1",
    )?;
    let prod: Vec<u64> = ks
        .iter()
        .zip(ks2)
        .map(|(a, b)| {
            a.checked_mul(*b)
                .ok_or_else(|| Error::domain("product overflows u64"))
        })
        .collect::<Result<_>>()?;
    let lhs = g_multivariate(&prod, s, m)?;
    let rhs = g_multivariate(ks, s, m)? * g_multivariate(ks2, s, m)?;
    Ok(CheckResult::exact(
        IdentityId::GMultiplicative,
        Params::new()
            .list("ks", ks)
            .list("ks2", ks2)
            .int("s", s)
            .int("m", m),
        Value::Rational(lhs),
        Value::Rational(rhs),
    ))
}

/// `Σ_{d|k} μ(d) d^{-s} log d = -(J_s(k)/k^s) Σ_{p|k} log p/(p^s - 1)`, exactly.
pub fn check_mu_log_lemma(k: u64, s: u32) -> Result<CheckResult> {
    let (lhs, rhs) = mu_log_lemma_sides(k, s)?;
    Ok(CheckResult::exact(
        IdentityId::MuLogLemma,
        Params::new().int("k", k as i64).int("s", s),
        Value::Log(lhs),
        Value::Log(rhs),
    ))
}

/// Bernoulli closed form of `Σ_{n≤N} n^r` against direct summation.
pub fn check_power_sum(n: u64, r: u32) -> Result<CheckResult> {
    let closed = power_sum(n, r)?;
    Ok(CheckResult::exact(
        IdentityId::PowerSum,
        Params::new().int("N", n as i64).int("r", r),
        Value::Integer(power_sum_direct(n, r).into()),
        Value::Integer(closed.into()),
    ))
}

/// Closed form of `Σ_{j≤n, (j,n)=1} j^r` against brute force.
pub fn check_coprime_power_sum(n: u64, r: u32) -> Result<CheckResult> {
    let nf = factor(n)?;
    let brute: BigInt = (1..=n)
        .filter(|&j| gcd(j, n) == 1)
        .map(|j| BigInt::from(j).pow(r))
        .sum();
    let closed = coprime_power_sum(&nf, r)?;
    Ok(CheckResult::exact(
        IdentityId::CoprimePowerSum,
        Params::new().int("n", n as i64).int("r", r),
        Value::Integer(brute),
        Value::Integer(closed.into()),
    ))
}
