//! Command-line front end: range scans, per-q certificates, verification and
//! the table of exceptional q.

mod output;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use output::{
    read_certificate, read_scan_csv, read_scan_jsonl, write_certificate, ScanHeader, ScanLine,
    ScanSummaryLine,
};

use crate::numth::{is_prime_power, DEFAULT_SMOOTH_BOUND, DEFAULT_WINDOW};
use crate::search::{
    certify_q, verify_certificate, CertStatus, Certificate, CertifyConfig, SearchError,
    DEFAULT_BRUTE_FORCE_CAP, DEFAULT_FAMILIES,
};
use crate::sieve::{scan_range, Criterion, ScanConfig, SieveError, DEFAULT_CROSSOVER, MAX_SCAN_Q};

/// Environment variable that overrides `--workers`.
pub const WORKERS_ENV: &str = "TRACEPAIR_WORKERS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_EXCEPTIONS: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("verification failed at {0}")]
    Verify(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Psc,
    Mpsc,
    PscPartial,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Psc => Criterion::Psc,
            CriterionArg::Mpsc => Criterion::Mpsc,
            CriterionArg::PscPartial => Criterion::PscPartial,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tracepair",
    version,
    about = "Primitive pairs with prescribed trace in F_{q^3}"
)]
pub struct Cli {
    /// Worker threads; TRACEPAIR_WORKERS overrides, default is all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "jsonl")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sieve verdicts for every prime power in a range.
    Scan(ScanArgs),
    /// Certificate for one q.
    Test(TestArgs),
    /// Checks a certificate file.
    Verify {
        file: PathBuf,
        /// Largest q^3 for which exceptions are rechecked exhaustively.
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
        brute_force_cap: u64,
    },
    /// Exhaustive table of exceptional q up to a bound.
    Exceptions {
        #[arg(long)]
        max_q: u64,
        /// Also write each certificate to this directory as q<q>.jsonl.
        #[arg(long)]
        certs: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[arg(long, value_enum, default_value = "mpsc")]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = DEFAULT_SMOOTH_BOUND)]
    pub smooth_bound: u64,
    #[arg(long, default_value_t = DEFAULT_CROSSOVER)]
    pub crossover: u64,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: u64,
    /// Emit only q that are not ruled out.
    #[arg(long)]
    pub survivors_only: bool,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    pub q: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_FAMILIES)]
    pub families: usize,
}

/// Worker count: the environment wins over the flag, then all cores.
pub fn resolve_workers(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    let n = match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(s) => s
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}={s} is not a count")))?,
        None => match flag {
            Some(n) => n,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(CliError::Usage("worker count must be at least 1".into()));
    }
    Ok(n)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn status_code(status: CertStatus) -> u8 {
    match status {
        CertStatus::Full | CertStatus::Sample => EXIT_OK,
        CertStatus::Exceptions => EXIT_EXCEPTIONS,
        CertStatus::BudgetExceeded => EXIT_BUDGET,
    }
}

/// `scan`: one record per prime power, then a summary.
pub fn cmd_scan(args: &ScanArgs, format: Format, out: &mut dyn Write) -> Result<u8, CliError> {
    if args.from > args.to || args.to > MAX_SCAN_Q {
        return Err(CliError::Usage(format!(
            "range [{}, {}] must satisfy from <= to <= {MAX_SCAN_Q}",
            args.from, args.to
        )));
    }
    let cfg = ScanConfig {
        criterion: args.criterion.into(),
        smooth_bound: args.smooth_bound,
        crossover: args.crossover,
        window: args.window,
    };
    let header = ScanHeader::new(args.from.max(2), args.to, &cfg);
    let mut w = output::ScanWriter::new(format, out, &header)?;
    let mut err = None;
    let summary = scan_range(args.from, args.to, &cfg, |r| {
        if err.is_some() || (args.survivors_only && r.verdict.ruled_out) {
            return;
        }
        if let Err(e) = w.record(&ScanLine::from_record(&r)) {
            err = Some(e);
        }
    })?;
    if let Some(e) = err {
        return Err(e.into());
    }
    w.summary(&ScanSummaryLine::new(&summary, cfg.criterion))?;
    Ok(EXIT_OK)
}

/// `test`: certificate for one q.
pub fn cmd_test(args: &TestArgs, format: Format, out: &mut dyn Write) -> Result<u8, CliError> {
    if args.q < 2 || is_prime_power(args.q as u128).is_none() {
        return Err(CliError::Usage(format!("{} is not a prime power", args.q)));
    }
    let cfg = CertifyConfig {
        seed: args.seed,
        families: args.families,
        ..CertifyConfig::default()
    };
    let cert = certify_q(args.q, &cfg)?;
    let s = &cert.stats;
    log::info!(
        "q={}: status={:?} families={} fallback_ks={} trace_searches={} brute_force_runs={}",
        args.q,
        cert.header.status,
        s.families,
        s.fallback_ks.len(),
        s.trace_searches,
        s.brute_force_runs
    );
    write_certificate(&cert, format, out)?;
    Ok(status_code(cert.header.status))
}

#[derive(Serialize)]
struct VerifyReport {
    record: &'static str,
    q: u64,
    ok: bool,
    witnesses: usize,
    exceptions: usize,
    status: CertStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

/// `verify`: every record of a certificate file.
pub fn cmd_verify(file: &Path, cap: u64, out: &mut dyn Write) -> Result<u8, CliError> {
    let cert = read_certificate(BufReader::new(File::open(file)?))?;
    let res = verify_certificate(&cert, cap);
    let failure = res.as_ref().err().map(|f| {
        if f.a == u64::MAX {
            format!("header: {}", f.reason)
        } else {
            format!("a={}: {}", f.a, f.reason)
        }
    });
    let report = VerifyReport {
        record: "verify",
        q: cert.header.q,
        ok: res.is_ok(),
        witnesses: cert.witnesses.len(),
        exceptions: cert.exceptions.len(),
        status: cert.header.status,
        failure: failure.clone(),
    };
    serde_json::to_writer(&mut *out, &report).map_err(io::Error::other)?;
    out.write_all(b"\n")?;
    match failure {
        Some(f) => Err(CliError::Verify(f)),
        None => Ok(EXIT_OK),
    }
}

#[derive(Serialize)]
pub struct ExceptionRow {
    pub q: u64,
    pub p: u64,
    pub e: u32,
    pub status: CertStatus,
    pub witnesses: usize,
    pub failing_a: Vec<u64>,
    pub exhaustive: bool,
}

/// Certificates for every prime power up to `max_q`, in ascending order.
pub fn exception_table(
    max_q: u64,
    cfg: &CertifyConfig,
    mut each: impl FnMut(&Certificate) -> Result<(), CliError>,
) -> Result<Vec<ExceptionRow>, CliError> {
    if (max_q as u128).pow(3) > cfg.brute_force_cap as u128 {
        return Err(SearchError::CapExceeded {
            q: max_q,
            cap: cfg.brute_force_cap,
        }
        .into());
    }
    let mut rows = Vec::new();
    for q in 2..=max_q {
        let Some((p, e)) = is_prime_power(q as u128) else {
            continue;
        };
        let cert = certify_q(q, cfg)?;
        each(&cert)?;
        rows.push(ExceptionRow {
            q,
            p: p as u64,
            e,
            status: cert.header.status,
            witnesses: cert.witnesses.len(),
            failing_a: cert.exceptional_as(),
            exhaustive: cert.exceptions.iter().all(|x| x.exhaustive),
        });
    }
    Ok(rows)
}

/// `exceptions`: one row per prime power, exceptional or not.
pub fn cmd_exceptions(
    max_q: u64,
    certs: Option<&Path>,
    format: Format,
    out: &mut dyn Write,
) -> Result<u8, CliError> {
    let cfg = CertifyConfig {
        brute_force_max_q: max_q.max(CertifyConfig::default().brute_force_max_q),
        ..CertifyConfig::default()
    };
    if let Some(dir) = certs {
        std::fs::create_dir_all(dir)?;
    }
    let rows = exception_table(max_q, &cfg, |c| {
        if let Some(dir) = certs {
            let f = File::create(dir.join(format!("q{}.jsonl", c.header.q)))?;
            write_certificate(c, Format::Jsonl, &mut BufWriter::new(f))?;
        }
        Ok(())
    })?;
    output::write_exception_rows(&rows, format, out)?;
    let code = rows
        .iter()
        .map(|r| status_code(r.status))
        .max()
        .unwrap_or(EXIT_OK);
    Ok(code)
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    let env = std::env::var(WORKERS_ENV).ok();
    let workers = resolve_workers(cli.workers, env.as_deref())?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = open_out(cli.out.as_deref())?;
    let code = match &cli.command {
        Command::Scan(a) => cmd_scan(a, cli.format, &mut out),
        Command::Test(a) => cmd_test(a, cli.format, &mut out),
        Command::Verify {
            file,
            brute_force_cap,
        } => cmd_verify(file, *brute_force_cap, &mut out),
        Command::Exceptions { max_q, certs } => {
            cmd_exceptions(*max_q, certs.as_deref(), cli.format, &mut out)
        }
    };
    out.flush()?;
    code
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
