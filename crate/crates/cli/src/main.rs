use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ramsum::arith::DEFAULT_SIEVE_LIMIT;
use ramsum::csum::{csum_direct, round_direct};
use ramsum::identities::DEFAULT_TOLERANCE;
use ramsum::{
    bernoulli_number, evaluate, factor, gen_gcd, init_global_sieve, jordan_totient,
    rational_string, run_suite, theta, CsumMethod, CsumTable, Error, GridOverrides, IdentityId,
    SuiteConfig, DEFAULT_EVAL_CAP, DEFAULT_SWEEP_CAP,
};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ramsum",
    version,
    about = "Generalized Ramanujan sums: evaluate, tabulate, verify identities"
)]
struct Cli {
    /// Size of the smallest-prime-factor sieve.
    #[arg(long, global = true, env = "RAMSUM_SIEVE_LIMIT", default_value_t = DEFAULT_SIEVE_LIMIT)]
    sieve_limit: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a single exact value.
    Eval {
        #[command(subcommand)]
        what: EvalCommand,
    },
    /// Print one full period j = 0..k^s-1 of c_k^(s)(j).
    Table {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Upper bound on k^s.
        #[arg(long, default_value_t = DEFAULT_EVAL_CAP)]
        cap: u64,
    },
    /// Sweep an identity (or `all`) over a parameter grid and report.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
enum EvalCommand {
    /// c_k^(s)(j)
    Csum {
        #[arg(long)]
        k: u64,
        #[arg(long, allow_negative_numbers = true)]
        j: i64,
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// direct, moebius or hoelder
        #[arg(long, default_value = "moebius")]
        method: String,
        /// Upper bound on k^s for the direct method.
        #[arg(long, default_value_t = DEFAULT_EVAL_CAP)]
        cap: u64,
    },
    /// Jordan totient J_s(n)
    Jordan {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// Bernoulli number B_m (B_1 = -1/2)
    Bernoulli {
        #[arg(long)]
        m: usize,
    },
    /// (j, k^s)_s, the largest d | k with d^s | j
    Gengcd {
        #[arg(long)]
        j: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// θ_k^(s)(n): 1 if (n, k^s)_s = 1, else 0
    Theta {
        #[arg(long)]
        k: u64,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Identity id, or `all`.
    identity: String,
    #[arg(long)]
    k_min: Option<u64>,
    #[arg(long)]
    k_max: Option<u64>,
    /// Fix s to a single value.
    #[arg(long, conflicts_with_all = ["s_min", "s_max"])]
    s: Option<u32>,
    #[arg(long)]
    s_min: Option<u32>,
    #[arg(long)]
    s_max: Option<u32>,
    #[arg(long)]
    r_max: Option<u32>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    n_max: Option<u64>,
    /// Worker threads (does not change the report).
    #[arg(long)]
    jobs: Option<usize>,
    /// Relative tolerance for floating-mode checks.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Upper bound on k^s; larger grid points are skipped and counted.
    #[arg(long, default_value_t = DEFAULT_SWEEP_CAP)]
    cap: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Treat classified findings as failures.
    #[arg(long)]
    strict_findings: bool,
    /// Record wall times (the report then differs between runs).
    #[arg(long)]
    timings: bool,
}

/// Output plus exit code of a successful command.
struct Outcome {
    stdout: String,
    code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn eval(what: EvalCommand) -> Result<Outcome, Error> {
    let line = match what {
        EvalCommand::Csum {
            k,
            j,
            s,
            method,
            cap,
        } => {
            let method: CsumMethod = method.parse()?;
            if method == CsumMethod::Direct {
                let r = round_direct(csum_direct(k, j, s, cap)?)?;
                if !r.healthy() {
                    eprintln!(
                        "warning: direct sum is {:e} away from an integer",
                        r.residual
                    );
                }
                r.value.to_string()
            } else {
                evaluate(k, j, s, method, cap)?.value.to_string()
            }
        }
        EvalCommand::Jordan { n, s } => jordan_totient(s, &factor(n)?).to_string(),
        EvalCommand::Bernoulli { m } => rational_string(&bernoulli_number(m)),
        EvalCommand::Gengcd { j, k, s } => gen_gcd(j, k, s)?.to_string(),
        EvalCommand::Theta { k, n, s } => theta(k, n, s)?.to_string(),
    };
    Ok(Outcome::ok(line + "\n"))
}

fn suite_config(a: &VerifyArgs) -> Result<SuiteConfig, Error> {
    let identities = IdentityId::parse_selector(&a.identity)?;
    let overrides = GridOverrides {
        k_min: a.k_min,
        k_max: a.k_max,
        s_min: a.s.or(a.s_min),
        s_max: a.s.or(a.s_max),
        r_max: a.r_max,
        m_max: a.m_max,
        n_max: a.n_max,
    };
    if a.k_min == Some(0) {
        return Err(usage("--k-min must be at least 1"));
    }
    if overrides.s_min == Some(0) || overrides.s_max == Some(0) {
        return Err(usage("s must be at least 1"));
    }
    if let (Some(lo), Some(hi)) = (a.k_min, a.k_max) {
        if lo > hi {
            return Err(usage(format!("empty k range {lo}..={hi}")));
        }
    }
    if let (Some(lo), Some(hi)) = (overrides.s_min, overrides.s_max) {
        if lo > hi {
            return Err(usage(format!("empty s range {lo}..={hi}")));
        }
    }
    if !(a.tolerance.is_finite() && a.tolerance > 0.0) {
        return Err(usage("--tolerance must be a positive number"));
    }
    if a.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    Ok(SuiteConfig {
        identities,
        overrides,
        cap: a.cap,
        tolerance: a.tolerance,
        jobs,
        timings: a.timings,
    })
}

fn verify(a: VerifyArgs) -> Result<Outcome, Error> {
    let report = run_suite(&suite_config(&a)?)?;
    let stdout = match a.format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Human => report.to_human(),
    };
    let failed = report.has_hard_failure() || (a.strict_findings && report.summary.findings > 0);
    Ok(Outcome {
        stdout,
        code: if failed { EXIT_VERIFY } else { 0 },
    })
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    init_global_sieve(cli.sieve_limit);
    match cli.command {
        Command::Eval { what } => eval(what),
        Command::Table { k, s, format, cap } => {
            let table = CsumTable::new(k, s, cap)?;
            Ok(Outcome::ok(match format {
                TableFormat::Csv => table.to_csv(),
                TableFormat::Json => table.to_json() + "\n",
            }))
        }
        Command::Verify(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("ramsum: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
