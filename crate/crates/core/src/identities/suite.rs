use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::checks::*;
use super::{
    CheckResult, Classification, IdentityId, Params, WeightFunctionSpec, DEFAULT_TOLERANCE,
};
use crate::arith::{gcd, lcm};
use crate::csum::DEFAULT_SWEEP_CAP;
use crate::error::{Error, Result};

/// Seed of the random tuples drawn for `g-multiplicative`.
pub const G_MULTIPLICATIVE_SEED: u64 = 0x5eed_0001;
/// Number of random coprime tuple pairs drawn for `g-multiplicative`.
pub const G_MULTIPLICATIVE_SAMPLES: usize = 50;

/// Range overrides shared by every identity in a sweep.
///
/// Each identity reads the axes it has (`k`, `s`, `r`, `m`, `n`) and
/// falls back to its own defaults for the rest; `n` doubles as `N` for
/// `power-sum`, `coprime-power-sum` and `gauss-product`, and as an upper
/// bound on the frequency for `exp-weight`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GridOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_min: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
}

/// Parameter ranges for one identity after overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub k: (u64, u64),
    pub s: (u32, u32),
    pub r: (u32, u32),
    pub m: (u32, u32),
    pub n: (u64, u64),
}

impl GridSpec {
    /// Built-in ranges, sized so that `verify all` stays within seconds.
    pub fn defaults(id: IdentityId) -> GridSpec {
        use IdentityId::*;
        let g = |k, s, r, m, n| GridSpec { k, s, r, m, n };
        match id {
            PowerSum => g((1, 1), (1, 1), (0, 8), (0, 0), (1, 200)),
            CoprimePowerSum => g((1, 1), (1, 1), (0, 6), (0, 0), (1, 150)),
            AlkanClassical => g((1, 50), (1, 1), (1, 4), (0, 0), (0, 0)),
            Alkan => g((1, 50), (1, 2), (1, 4), (0, 0), (0, 0)),
            LogWeight => g((1, 50), (1, 2), (0, 0), (0, 0), (0, 0)),
            GcdWeight => g((1, 30), (1, 2), (0, 0), (0, 0), (0, 0)),
            MuLogLemma => g((1, 100), (1, 4), (0, 0), (0, 0), (0, 0)),
            GammaWeight => g((2, 30), (1, 2), (0, 0), (0, 0), (0, 0)),
            GaussProduct => g((1, 1), (1, 1), (0, 0), (0, 0), (1, 100)),
            BernoulliWeight => g((1, 20), (1, 2), (0, 0), (0, 6), (0, 0)),
            BinomialWeight => g((1, 16), (1, 2), (0, 0), (0, 0), (0, 0)),
            Multisection => g((1, 1), (1, 1), (1, 16), (0, 0), (1, 64)),
            ExpWeight => g((1, 20), (1, 2), (0, 0), (0, 0), (0, u64::MAX)),
            Multivariate => g((1, 6), (1, 2), (1, 3), (0, 0), (0, 0)),
            GMultiplicative => g((1, 12), (1, 2), (0, 0), (0, 3), (0, 0)),
        }
    }

    pub fn with_overrides(mut self, o: &GridOverrides) -> GridSpec {
        self.k = (o.k_min.unwrap_or(self.k.0), o.k_max.unwrap_or(self.k.1));
        self.s = (o.s_min.unwrap_or(self.s.0), o.s_max.unwrap_or(self.s.1));
        self.r.1 = o.r_max.unwrap_or(self.r.1);
        self.m.1 = o.m_max.unwrap_or(self.m.1);
        self.n.1 = o.n_max.unwrap_or(self.n.1);
        self
    }
}

/// What to sweep and how.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub identities: Vec<IdentityId>,
    pub overrides: GridOverrides,
    /// Upper bound on `k^s` for sweep points; larger points are skipped and counted.
    pub cap: u64,
    pub tolerance: f64,
    /// Worker threads. Never affects the report.
    pub jobs: usize,
    /// Record per-point and total wall time (makes the report run-dependent).
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            identities: IdentityId::ALL.to_vec(),
            overrides: GridOverrides::default(),
            cap: DEFAULT_SWEEP_CAP,
            tolerance: DEFAULT_TOLERANCE,
            jobs: 1,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteInfo {
    pub identities: Vec<IdentityId>,
    pub grid: GridOverrides,
    pub cap: u64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    /// Hard failures: mismatches and checker errors.
    pub fail: usize,
    pub findings: usize,
    /// Grid points over the cap, left out of `results`.
    pub skipped: usize,
}

/// Outcome of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub suite: SuiteInfo,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl IdentityReport {
    pub fn has_hard_failure(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "identity,params,lhs,rhs,residual,mode,pass,classification,tolerance,elapsed_ms\n",
        );
        for r in &self.results {
            let fields = [
                r.identity.to_string(),
                r.params.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.residual.to_string(),
                json_word(&r.mode),
                r.pass.to_string(),
                json_word(&r.classification),
                r.tolerance.map(|t| format!("{t:?}")).unwrap_or_default(),
                r.elapsed_ms.map(|t| format!("{t:?}")).unwrap_or_default(),
            ];
            let row: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Aligned plain-text table followed by a summary line.
    pub fn to_human(&self) -> String {
        let header = ["identity", "params", "class", "lhs", "rhs", "residual"];
        let rows: Vec<[String; 6]> = self
            .results
            .iter()
            .map(|r| {
                [
                    r.identity.to_string(),
                    r.params.to_string(),
                    json_word(&r.classification),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.residual.to_string(),
                ]
            })
            .collect();
        let mut width = header.map(str::len);
        for row in &rows {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: &[&str]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(width)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        };
        line(&header);
        for row in &rows {
            line(&row.each_ref().map(String::as_str));
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "\npass={} fail={} findings={} skipped={}",
            s.pass, s.fail, s.findings, s.skipped
        );
        out
    }
}

fn json_word<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn csv_field(f: &str) -> String {
    if f.contains([',', '"', '\n']) {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

type Task = Box<dyn FnOnce() -> Vec<CheckResult> + Send>;

/// Runs one point, turning an error into an error-classified result.
fn point(
    id: IdentityId,
    timings: bool,
    params: impl FnOnce() -> Params,
    check: impl FnOnce() -> Result<CheckResult>,
) -> CheckResult {
    let start = timings.then(Instant::now);
    let mut result = check().unwrap_or_else(|e| CheckResult::error(id, params(), &e));
    if let Some(t) = start {
        result.elapsed_ms = Some(t.elapsed().as_secs_f64() * 1e3);
    }
    result
}

fn fits(k: u64, s: u32, cap: u64) -> bool {
    k.checked_pow(s).is_some_and(|v| v <= cap)
}

fn range<T: Copy>(r: (T, T)) -> std::ops::RangeInclusive<T> {
    r.0..=r.1
}

/// Non-decreasing tuples of length `n` over `lo..=hi`.
fn multisets(n: usize, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn go(n: usize, from: u64, hi: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in from..=hi {
            cur.push(v);
            go(n, v, hi, cur, out);
            cur.pop();
        }
    }
    if lo <= hi {
        go(n, lo, hi, &mut cur, &mut out);
    }
    out
}

/// Deterministic coprime tuple pairs for the multiplicativity check.
pub fn g_multiplicative_samples(grid: &GridSpec) -> Vec<(Vec<u64>, Vec<u64>, u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(G_MULTIPLICATIVE_SEED);
    let (lo, hi) = (grid.k.0.max(1), grid.k.1);
    if lo > hi || grid.s.0 > grid.s.1 || grid.s.0 == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(G_MULTIPLICATIVE_SAMPLES);
    while out.len() < G_MULTIPLICATIVE_SAMPLES {
        let n = rng.random_range(2..=3usize);
        let ks: Vec<u64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        let ks2: Vec<u64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
        let s = rng.random_range(grid.s.0..=grid.s.1);
        let m = rng.random_range(grid.m.0..=grid.m.1);
        let coprime = ks.iter().all(|&a| ks2.iter().all(|&b| gcd(a, b) == 1));
        if coprime {
            out.push((ks, ks2, s, m));
        }
    }
    out
}

/// Expands one identity's grid into tasks; returns them with the count of
/// points skipped for exceeding the cap.
fn tasks_for(id: IdentityId, grid: &GridSpec, cfg: &SuiteConfig) -> (Vec<Task>, usize) {
    use IdentityId::*;
    let lim = Limits {
        cap: cfg.cap,
        tolerance: cfg.tolerance,
    };
    let t = cfg.timings;
    let mut tasks: Vec<Task> = Vec::new();
    let mut skipped = 0;
    let mut push = |task: Task| tasks.push(task);

    // (k, s) pairs within the cap, counting the rest
    let mut ks_pairs = |cap: u64, per_point: usize| -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for k in range(grid.k) {
            for s in range(grid.s) {
                if fits(k, s, cap) {
                    out.push((k, s));
                } else {
                    skipped += per_point;
                }
            }
        }
        out
    };

    match id {
        PowerSum | CoprimePowerSum => {
            for n in range(grid.n) {
                for r in range(grid.r) {
                    let p = move || Params::new().int("N", n as i64).int("r", r);
                    push(Box::new(move || {
                        vec![point(id, t, p, || match id {
                            PowerSum => check_power_sum(n, r),
                            _ => check_coprime_power_sum(n, r),
                        })]
                    }));
                }
            }
        }
        AlkanClassical | Alkan | BernoulliWeight => {
            let (inner, per) = match id {
                BernoulliWeight => (grid.m, grid.m.1.saturating_sub(grid.m.0) as usize + 1),
                _ => (grid.r, grid.r.1.saturating_sub(grid.r.0) as usize + 1),
            };
            let pairs = if id == AlkanClassical {
                range(grid.k)
                    .map(|k| (k, 1))
                    .filter(|&(k, _)| k <= cfg.cap)
                    .collect()
            } else {
                ks_pairs(cfg.cap, per)
            };
            for (k, s) in pairs {
                for x in range(inner) {
                    push(Box::new(move || {
                        let check = || match id {
                            AlkanClassical => check_alkan_classical(k, x, &lim),
                            Alkan => check_alkan_generalized(k, s, x, &lim),
                            _ => check_bernoulli_weight(k, s, x, &lim),
                        };
                        let p = move || match id {
                            AlkanClassical => Params::new().int("k", k as i64).int("r", x),
                            Alkan => Params::new().int("k", k as i64).int("s", s).int("r", x),
                            _ => Params::new().int("k", k as i64).int("s", s).int("m", x),
                        };
                        vec![point(id, t, p, check)]
                    }));
                }
            }
        }
        LogWeight | MuLogLemma => {
            for k in range(grid.k) {
                for s in range(grid.s) {
                    push(Box::new(move || {
                        let p = move || Params::new().int("k", k as i64).int("s", s);
                        vec![point(id, t, p, || match id {
                            LogWeight => check_log_weight(k, s),
                            _ => check_mu_log_lemma(k, s),
                        })]
                    }));
                }
            }
        }
        GcdWeight => {
            for (k, s) in ks_pairs(cfg.cap, 5) {
                let fs = [
                    WeightFunctionSpec::Power(s),
                    WeightFunctionSpec::Phi,
                    WeightFunctionSpec::Tau,
                    WeightFunctionSpec::Sigma,
                    WeightFunctionSpec::Jordan(2),
                ];
                for f in fs {
                    push(Box::new(move || {
                        let p = || {
                            Params::new()
                                .int("k", k as i64)
                                .int("s", s)
                                .text("f", f.to_string())
                        };
                        vec![point(id, t, p, || check_gcd_weight(k, s, &f, &lim))]
                    }));
                }
            }
        }
        GammaWeight | BinomialWeight => {
            let cap = if id == BinomialWeight {
                cfg.cap.min(BINOMIAL_CAP)
            } else {
                cfg.cap
            };
            for (k, s) in ks_pairs(cap, 1) {
                push(Box::new(move || {
                    let p = move || Params::new().int("k", k as i64).int("s", s);
                    vec![point(id, t, p, || match id {
                        GammaWeight => check_gamma_weight(k, s, &lim),
                        _ => check_binomial_weight(k, s, &lim),
                    })]
                }));
            }
        }
        GaussProduct => {
            for n in range(grid.n) {
                push(Box::new(move || {
                    let p = move || Params::new().int("N", n as i64);
                    vec![point(id, t, p, || check_gauss_product(n))]
                }));
            }
        }
        Multisection => {
            for n in range(grid.n) {
                for r in grid.r.0.max(1) as u64..=(grid.r.1 as u64).min(n) {
                    push(Box::new(move || {
                        let p = move || Params::new().int("n", n as i64).int("r", r as i64);
                        vec![point(id, t, p, || check_multisection(n, r))]
                    }));
                }
            }
        }
        ExpWeight => {
            for (k, s) in ks_pairs(cfg.cap, 0) {
                let top = k.pow(s).min(grid.n.1);
                let lo = grid.n.0;
                push(Box::new(move || {
                    let ctx = ExpWeightContext::new(k, s, &lim);
                    (lo..=top)
                        .map(|n| {
                            let p = move || {
                                Params::new()
                                    .int("k", k as i64)
                                    .int("s", s)
                                    .int("n", n as i64)
                            };
                            point(id, t, p, || ctx.clone().and_then(|c| c.check(n)))
                        })
                        .collect()
                }));
            }
        }
        Multivariate => {
            for n in 2..=3 {
                for ks in multisets(n, grid.k.0.max(1), grid.k.1) {
                    let l = ks.iter().fold(1, |a, &b| lcm(a, b));
                    for s in range(grid.s) {
                        if !fits(l, s, cfg.cap) {
                            skipped += grid.r.1.saturating_sub(grid.r.0) as usize + 1;
                            continue;
                        }
                        for r in range(grid.r) {
                            let ks = ks.clone();
                            push(Box::new(move || {
                                let p = || Params::new().list("ks", &ks).int("s", s).int("r", r);
                                vec![point(id, t, p, || check_multivariate(&ks, s, r, &lim))]
                            }));
                        }
                    }
                }
            }
        }
        GMultiplicative => {
            for (ks, ks2, s, m) in g_multiplicative_samples(grid) {
                push(Box::new(move || {
                    let p = || {
                        Params::new()
                            .list("ks", &ks)
                            .list("ks2", &ks2)
                            .int("s", s)
                            .int("m", m)
                    };
                    vec![point(id, t, p, || check_g_multiplicative(&ks, &ks2, s, m))]
                }));
            }
        }
    }
    (tasks, skipped)
}

/// Sweeps the configured identities and returns a report whose bytes depend
/// only on the configuration (not on `jobs`), unless timings are enabled.
pub fn run_suite(cfg: &SuiteConfig) -> Result<IdentityReport> {
    let start = cfg.timings.then(Instant::now);
    let mut identities = cfg.identities.clone();
    identities.sort();
    identities.dedup();

    let mut tasks = Vec::new();
    let mut skipped = 0;
    for &id in &identities {
        let grid = GridSpec::defaults(id).with_overrides(&cfg.overrides);
        let (t, s) = tasks_for(id, &grid, cfg);
        tasks.extend(t);
        skipped += s;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut results: Vec<CheckResult> =
        pool.install(|| tasks.into_par_iter().flat_map_iter(|task| task()).collect());
    results.sort_by(|a, b| (a.identity, &a.params).cmp(&(b.identity, &b.params)));

    let mut summary = Summary {
        skipped,
        ..Summary::default()
    };
    for r in &results {
        match r.classification {
            Classification::Verified | Classification::NumericalPass => summary.pass += 1,
            Classification::FindingMismatch => summary.findings += 1,
            Classification::Failed | Classification::Error => summary.fail += 1,
        }
    }
    Ok(IdentityReport {
        suite: SuiteInfo {
            identities,
            grid: cfg.overrides,
            cap: cfg.cap,
            tolerance: cfg.tolerance,
        },
        results,
        summary,
        wall_time_ms: start.map(|t| t.elapsed().as_secs_f64() * 1e3),
    })
}
