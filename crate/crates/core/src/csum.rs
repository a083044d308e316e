//! Cohen's generalized Ramanujan sums.
//!
//! `c_k^(s)(j)` is the sum of `exp(2πi·j·m/k^s)` over `m ∈ [1, k^s]` with
//! `(m, k^s)_s = 1`. It is periodic in `j` with period `k^s`, and three
//! independent evaluators are provided:
//!
//! * [`csum_moebius`]: `Σ_{d | (j,k^s)_s} d^s μ(k/d)`, exact;
//! * [`csum_hoelder`]: `J_s(k) μ(k/e) / J_s(k/e)` with `e = (j,k^s)_s`, exact;
//! * [`csum_direct`]: the defining exponential sum in floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{divisors, factor, gen_gcd_factored, jordan_totient, moebius, Factorization};
use crate::error::{Error, Result};
use crate::summation::{roots_of_unity, unit_root, ComplexCompensatedSum};

/// Cap on `k^s` for single evaluations.
pub const DEFAULT_EVAL_CAP: u64 = 1_000_000;
/// Cap on `k^s` for grid sweeps.
pub const DEFAULT_SWEEP_CAP: u64 = 100_000;

/// Residual above which a rounded direct sum is flagged as numerically unhealthy.
pub const DIRECT_HEALTH_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CsumMethod {
    Direct,
    Moebius,
    Hoelder,
}

impl fmt::Display for CsumMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CsumMethod::Direct => "direct",
            CsumMethod::Moebius => "moebius",
            CsumMethod::Hoelder => "hoelder",
        })
    }
}

impl FromStr for CsumMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(CsumMethod::Direct),
            "moebius" | "mobius" => Ok(CsumMethod::Moebius),
            "hoelder" | "holder" => Ok(CsumMethod::Hoelder),
            other => Err(Error::Usage(format!("unknown csum method {other:?}"))),
        }
    }
}

/// A value of `c_k^(s)(j)` and the evaluator that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsumEvaluation {
    pub k: u64,
    pub s: u32,
    pub j: i64,
    pub value: BigInt,
    pub method: CsumMethod,
}

fn check_args(k: u64, s: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    if s == 0 {
        return Err(Error::domain("s must be >= 1"));
    }
    Ok(())
}

/// `k^s`, failing if it exceeds `cap`.
pub fn modulus(k: u64, s: u32, cap: u64) -> Result<u64> {
    match k.checked_pow(s) {
        Some(m) if m <= cap => Ok(m),
        Some(m) => Err(Error::over_cap(format!("{k}^{s}"), m, cap)),
        None => Err(Error::over_cap(
            format!("{k}^{s}"),
            BigUint::from(k).pow(s),
            cap,
        )),
    }
}

/// `(j mod k^s, k^s)_s` without forming `k^s`: every `d | k` has `d^s | k^s`,
/// so divisibility of `j` and of `|j|` and of `j mod k^s` by `d^s` agree.
fn reduced_gen_gcd(j: i64, kf: &Factorization, s: u32) -> u64 {
    gen_gcd_factored(j.unsigned_abs(), kf, s)
}

/// `Σ_{d|e} d^s μ(k/d)` as a literal divisor sum.
fn moebius_divisor_sum(kf: &Factorization, e: u64, s: u32) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for d in divisors(&factor(e)?) {
        let mu = moebius(&kf.cofactor(d)?);
        if mu != 0 {
            acc += BigInt::from(d).pow(s) * mu;
        }
    }
    Ok(acc)
}

pub fn csum_moebius(k: u64, j: i64, s: u32) -> Result<BigInt> {
    check_args(k, s)?;
    let kf = factor(k)?;
    let e = reduced_gen_gcd(j, &kf, s);
    moebius_divisor_sum(&kf, e, s)
}

pub fn csum_hoelder(k: u64, j: i64, s: u32) -> Result<BigInt> {
    check_args(k, s)?;
    let kf = factor(k)?;
    let e = reduced_gen_gcd(j, &kf, s);
    hoelder_from_gcd(&kf, e, s)
}

fn hoelder_from_gcd(kf: &Factorization, e: u64, s: u32) -> Result<BigInt> {
    let quotient = kf.cofactor(e)?;
    let mu = moebius(&quotient);
    if mu == 0 {
        return Ok(BigInt::zero());
    }
    let num = BigInt::from(jordan_totient(s, kf)) * mu;
    let den = BigInt::from(jordan_totient(s, &quotient));
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::Internal(format!(
            "Hölder quotient not integral for k={} e={e} s={s}",
            kf.value()
        )));
    }
    Ok(q)
}

/// `c_k^(s)(j)` by the divisor-sum route with the per-divisor values
/// precomputed, for repeated evaluation at a fixed `(k, s)` without any
/// bound on `k^s`.
#[derive(Debug, Clone)]
pub struct MoebiusEvaluator {
    kf: Factorization,
    s: u32,
    divisors: Vec<u64>,
    values: Vec<BigInt>,
}

impl MoebiusEvaluator {
    pub fn new(k: u64, s: u32) -> Result<Self> {
        check_args(k, s)?;
        let kf = factor(k)?;
        let divisors = divisors(&kf);
        let values = divisors
            .iter()
            .map(|&e| moebius_divisor_sum(&kf, e, s))
            .collect::<Result<_>>()?;
        Ok(MoebiusEvaluator {
            kf,
            s,
            divisors,
            values,
        })
    }

    pub fn factorization(&self) -> &Factorization {
        &self.kf
    }

    pub fn eval(&self, j: i64) -> &BigInt {
        let e = reduced_gen_gcd(j, &self.kf, self.s);
        let idx = self
            .divisors
            .binary_search(&e)
            .expect("generalized gcd divides k");
        &self.values[idx]
    }
}

/// Precomputed data for repeated direct evaluation at fixed `(k, s)`:
/// the admissible residues `m` and the table of `k^s`-th roots of unity.
#[derive(Debug, Clone)]
pub struct DirectEvaluator {
    k: u64,
    s: u32,
    modulus: u64,
    residues: Vec<u64>,
    roots: Vec<Complex64>,
}

impl DirectEvaluator {
    pub fn new(k: u64, s: u32, cap: u64) -> Result<Self> {
        check_args(k, s)?;
        let modulus = modulus(k, s, cap)?;
        let kf = factor(k)?;
        let residues = (1..=modulus)
            .filter(|&m| gen_gcd_factored(m % modulus, &kf, s) == 1)
            .collect();
        Ok(DirectEvaluator {
            k,
            s,
            modulus,
            residues,
            roots: roots_of_unity(modulus),
        })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Number of admissible residues, i.e. `J_s(k)`.
    pub fn residue_count(&self) -> usize {
        self.residues.len()
    }

    pub fn eval(&self, j: i64) -> Complex64 {
        let n = self.modulus;
        let jr = j.rem_euclid(n as i64) as u64;
        let mut acc = ComplexCompensatedSum::new();
        if n <= u32::MAX as u64 {
            for &m in &self.residues {
                acc.add(self.roots[(jr * m % n) as usize]);
            }
        } else {
            for &m in &self.residues {
                let t = ((jr as u128 * m as u128) % n as u128) as usize;
                acc.add(self.roots[t]);
            }
        }
        acc.value()
    }
}

/// The defining exponential sum, in floating point.
pub fn csum_direct(k: u64, j: i64, s: u32, cap: u64) -> Result<Complex64> {
    check_args(k, s)?;
    let n = modulus(k, s, cap)?;
    let kf = factor(k)?;
    let jr = j.rem_euclid(n as i64) as u64;
    let mut acc = ComplexCompensatedSum::new();
    for m in 1..=n {
        if gen_gcd_factored(m % n, &kf, s) == 1 {
            let t = ((jr as u128 * m as u128) % n as u128) as u64;
            acc.add(unit_root(t, n));
        }
    }
    Ok(acc.value())
}

/// Result of snapping a direct sum to the nearest integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rounded {
    pub value: i64,
    /// `|z - value|` including the imaginary part.
    pub residual: f64,
}

impl Rounded {
    pub fn healthy(&self) -> bool {
        self.residual <= DIRECT_HEALTH_THRESHOLD
    }
}

/// Nearest integer to a direct sum. A residual of 1/2 or more means the sum
/// cannot be trusted at all and is reported as an internal error.
pub fn round_direct(z: Complex64) -> Result<Rounded> {
    let value = z.re.round();
    let residual = (z - Complex64::new(value, 0.0)).norm();
    if residual.is_nan() || residual >= 0.5 {
        return Err(Error::Internal(format!(
            "direct sum {z} is not near an integer"
        )));
    }
    Ok(Rounded {
        value: value as i64,
        residual,
    })
}

/// Evaluates `c_k^(s)(j)` with the chosen method. Direct sums are rounded to
/// the nearest integer.
pub fn evaluate(k: u64, j: i64, s: u32, method: CsumMethod, cap: u64) -> Result<CsumEvaluation> {
    let value = match method {
        CsumMethod::Moebius => csum_moebius(k, j, s)?,
        CsumMethod::Hoelder => csum_hoelder(k, j, s)?,
        CsumMethod::Direct => BigInt::from(round_direct(csum_direct(k, j, s, cap)?)?.value),
    };
    Ok(CsumEvaluation {
        k,
        s,
        j,
        value,
        method,
    })
}

/// One full period of `c_k^(s)`, `values[j]` for `j = 0..k^s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsumTable {
    k: u64,
    s: u32,
    values: Vec<i64>,
}

impl CsumTable {
    /// Builds the table from one factorization of `k`: each residue is
    /// classified by its generalized GCD and the divisor sum is evaluated
    /// once per divisor.
    pub fn new(k: u64, s: u32, cap: u64) -> Result<Self> {
        check_args(k, s)?;
        let n = modulus(k, s, cap)? as usize;
        let kf = factor(k)?;
        let divs = divisors(&kf);
        let per_divisor = divs
            .iter()
            .map(|&e| {
                moebius_divisor_sum(&kf, e, s)?
                    .to_i64()
                    .ok_or_else(|| Error::Internal("table value overflows i64".into()))
            })
            .collect::<Result<Vec<i64>>>()?;
        // Increasing sweep: the last divisor e with e^s | j is (j, k^s)_s.
        let mut class = vec![0usize; n];
        for (idx, &e) in divs.iter().enumerate().skip(1) {
            let step = e.pow(s) as usize;
            for slot in class.iter_mut().step_by(step) {
                *slot = idx;
            }
        }
        let values = class.into_iter().map(|i| per_divisor[i]).collect();
        Ok(CsumTable { k, s, values })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn period(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `c_k^(s)(j)` for any integer `j`.
    pub fn get(&self, j: i64) -> i64 {
        self.values[j.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,c\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{j},{v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.values).expect("integer array serializes")
    }
}

/// `θ_k^(s)(n)`: 1 when `(n, k^s)_s = 1`, else 0.
pub fn theta(k: u64, n: i64, s: u32) -> Result<u8> {
    check_args(k, s)?;
    let kf = factor(k)?;
    let g = if n == 0 {
        k
    } else {
        reduced_gen_gcd(n, &kf, s)
    };
    Ok((g == 1) as u8)
}

/// Fourier coefficients of one period of a `k`-periodic function:
/// `g(m) = (1/k) Σ_{j=0}^{k-1} f(j) exp(-2πi·j·m/k)`.
pub fn fourier_coefficients(samples: &[Complex64]) -> Vec<Complex64> {
    let k = samples.len() as u64;
    (0..k)
        .map(|m| {
            let mut acc = ComplexCompensatedSum::new();
            for (j, f) in samples.iter().enumerate() {
                acc.add(f * unit_root(k - (j as u64 * m) % k, k));
            }
            acc.value() / k as f64
        })
        .collect()
}

/// Inverse of [`fourier_coefficients`]: `f(n) = Σ_j g(j) exp(2πi·j·n/k)`.
pub fn fourier_synthesis(coefficients: &[Complex64]) -> Vec<Complex64> {
    let k = coefficients.len() as u64;
    (0..k)
        .map(|n| {
            let mut acc = ComplexCompensatedSum::new();
            for (j, g) in coefficients.iter().enumerate() {
                acc.add(g * unit_root((j as u64 * n) % k, k));
            }
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gcd;
    use proptest::prelude::*;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(csum_moebius(6, 3, 1).unwrap(), big(-2));
        assert_eq!(csum_moebius(2, 1, 2).unwrap(), big(-1));
        assert_eq!(csum_moebius(2, 4, 2).unwrap(), big(3));
        assert_eq!(csum_moebius(2, -4, 2).unwrap(), big(3));
        assert_eq!(csum_moebius(2, 0, 2).unwrap(), big(3));
    }

    #[test]
    fn hoelder_examples() {
        assert_eq!(csum_hoelder(4, 2, 1).unwrap(), big(-2));
        assert_eq!(csum_hoelder(13, 0, 1).unwrap(), big(12));
        assert_eq!(csum_hoelder(6, 1, 2).unwrap(), big(1));
    }

    #[test]
    fn direct_examples() {
        let z = csum_direct(1, 0, 1, DEFAULT_EVAL_CAP).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let z = csum_direct(2, 1, 1, DEFAULT_EVAL_CAP).unwrap();
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let z = csum_direct(3, 1, 2, DEFAULT_EVAL_CAP).unwrap();
        assert!((z.re + 1.0).abs() < 1e-6 && z.im.abs() < 1e-6);
        assert_eq!(
            DirectEvaluator::new(3, 2, DEFAULT_EVAL_CAP)
                .unwrap()
                .residue_count(),
            8
        );
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            csum_direct(1001, 1, 2, DEFAULT_EVAL_CAP),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(matches!(
            CsumTable::new(10, 7, DEFAULT_EVAL_CAP),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(matches!(
            modulus(1 << 40, 2, u64::MAX),
            Err(Error::ResourceLimit { .. })
        ));
        // the exact evaluators need no modulus at all
        assert_eq!(csum_moebius(1001, 1, 5).unwrap(), big(-1));
        assert_eq!(csum_hoelder(1001, 1, 5).unwrap(), big(-1));
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(csum_moebius(0, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(csum_hoelder(3, 1, 0), Err(Error::Domain(_))));
        assert!(theta(0, 1, 1).is_err());
    }

    #[test]
    fn evaluate_records_method() {
        for method in [CsumMethod::Direct, CsumMethod::Moebius, CsumMethod::Hoelder] {
            let ev = evaluate(6, 3, 1, method, DEFAULT_EVAL_CAP).unwrap();
            assert_eq!(ev.value, big(-2));
            assert_eq!(ev.method, method);
            assert_eq!(method.to_string().parse::<CsumMethod>().unwrap(), method);
        }
        assert!("fourier".parse::<CsumMethod>().is_err());
    }

    #[test]
    fn round_direct_rejects_garbage() {
        assert!(round_direct(Complex64::new(0.5, 0.0)).is_err());
        let r = round_direct(Complex64::new(2.0 + 1e-9, -1e-9)).unwrap();
        assert_eq!(r.value, 2);
        assert!(r.healthy());
        assert!(!round_direct(Complex64::new(2.001, 0.0)).unwrap().healthy());
    }

    #[test]
    fn table_examples() {
        assert_eq!(
            CsumTable::new(1, 3, DEFAULT_EVAL_CAP).unwrap().values(),
            &[1]
        );
        assert_eq!(
            CsumTable::new(2, 1, DEFAULT_EVAL_CAP).unwrap().values(),
            &[1, -1]
        );
        let t4 = CsumTable::new(4, 1, DEFAULT_EVAL_CAP).unwrap();
        assert_eq!(t4.values(), &[2, 0, -2, 0]);
        assert_eq!(t4.to_json(), "[2,0,-2,0]");
        assert_eq!(
            CsumTable::new(2, 1, DEFAULT_EVAL_CAP).unwrap().to_csv(),
            "j,c\n0,1\n1,-1\n"
        );
        assert_eq!(t4.get(-1), 0);
        assert_eq!(t4.get(6), -2);
    }

    #[test]
    fn table_matches_moebius() {
        for k in 1..=40u64 {
            for s in 1..=3u32 {
                let Ok(t) = CsumTable::new(k, s, 20_000) else {
                    continue;
                };
                let jf = jordan_totient(s, &factor(k).unwrap());
                assert_eq!(BigUint::from(t.values()[0] as u64), jf);
                let total: i64 = t.values().iter().sum();
                assert_eq!(total, (k == 1) as i64);
                for (j, &v) in t.values().iter().enumerate() {
                    assert_eq!(
                        big(v),
                        csum_moebius(k, j as i64, s).unwrap(),
                        "k={k} j={j} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn special_values() {
        for k in 1..=60u64 {
            let kf = factor(k).unwrap();
            for s in 1..=3u32 {
                let ks = k.pow(s) as i64;
                assert_eq!(
                    csum_moebius(k, ks, s).unwrap(),
                    BigInt::from(jordan_totient(s, &kf))
                );
                assert_eq!(csum_moebius(k, 1, s).unwrap(), big(moebius(&kf) as i64));
                for j in 0..50i64 {
                    assert_eq!(
                        csum_moebius(k, j + ks, s).unwrap(),
                        csum_moebius(k, j, s).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn classical_divisor_form() {
        for k in 1..=200u64 {
            for j in 0..=200i64 {
                let g = gcd(j as u64, k);
                let classical: i64 = divisors(&factor(g).unwrap())
                    .iter()
                    .map(|&d| d as i64 * moebius(&factor(k / d).unwrap()) as i64)
                    .sum();
                assert_eq!(csum_moebius(k, j, 1).unwrap(), big(classical));
            }
        }
    }

    #[test]
    fn multiplicative_in_k() {
        for k1 in 1..=30u64 {
            for k2 in 1..=30u64 {
                if gcd(k1, k2) != 1 {
                    continue;
                }
                for s in 1..=2 {
                    for j in 0..=200i64 {
                        assert_eq!(
                            csum_moebius(k1 * k2, j, s).unwrap(),
                            csum_moebius(k1, j, s).unwrap() * csum_moebius(k2, j, s).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(6, 5, 1).unwrap(), 1);
        assert_eq!(theta(6, 4, 1).unwrap(), 0);
        assert_eq!(theta(2, 2, 2).unwrap(), 1);
        assert_eq!(theta(1, 0, 1).unwrap(), 1);
        assert_eq!(theta(4, 0, 1).unwrap(), 0);
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn fourier_examples() {
        let c = Complex64::new(2.5, -1.0);
        let coeffs = fourier_coefficients(&[c; 6]);
        let mut expected = vec![Complex64::zero(); 6];
        expected[0] = c;
        assert!(close(&coeffs, &expected, 1e-12));

        let theta4: Vec<Complex64> = (0..4)
            .map(|n| Complex64::new(theta(4, n, 1).unwrap() as f64, 0.0))
            .collect();
        let c4 = CsumTable::new(4, 1, DEFAULT_EVAL_CAP).unwrap();
        let expected: Vec<Complex64> = c4
            .values()
            .iter()
            .map(|&v| Complex64::new(v as f64 / 4.0, 0.0))
            .collect();
        assert!(close(&fourier_coefficients(&theta4), &expected, 1e-12));

        let mut spike = vec![Complex64::zero(); 7];
        spike[3] = Complex64::new(1.0, 0.0);
        for g in fourier_coefficients(&spike) {
            assert!((g.norm() - 1.0 / 7.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn fourier_roundtrip(samples in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..64)) {
            let f: Vec<Complex64> = samples.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let back = fourier_synthesis(&fourier_coefficients(&f));
            prop_assert!(close(&back, &f, 1e-9));
        }

        #[test]
        fn evaluators_agree(k in 1u64..200, j in -5000i64..5000, s in 1u32..4) {
            let m = csum_moebius(k, j, s).unwrap();
            prop_assert_eq!(&m, &csum_hoelder(k, j, s).unwrap());
            if let Ok(z) = csum_direct(k, j, s, 20_000) {
                prop_assert!((z.re - m.to_f64().unwrap()).abs() < 1e-6);
                prop_assert!(z.im.abs() < 1e-6);
            }
        }
    }
}
