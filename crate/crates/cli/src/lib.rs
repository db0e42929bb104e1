//! Command-line front end for the `incmat` library.

pub mod oeis;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use incmat::asymptotics::{asym_table, AsymClass};
use incmat::counting::{f1111_mobius, f1111_series, f1111_stirling, formula_table, formula_value};
use incmat::oracle::{census_with, CensusOptions, CENSUS_DEFAULT_LIMIT, ORACLE_HARD_LIMIT};
use incmat::sampling::{
    MatrixSampler, PreorderSampler, RandomBitSource, RejectionSampler, SymmetricSampler,
};
use incmat::stats::{identity_suite, statistical_suite, SamplerKind, STANDARD_SEED};
use incmat::{ClassId, CountTable, Error};
use num_bigint::BigUint;
use serde::Serialize;

use crate::oeis::{compare_sequence, default_cache_dir, fetch_bfile, HttpTransport, Transport};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for a failed verification or a runtime error.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for invalid arguments.
pub const EXIT_USAGE: i32 = 2;

/// Largest `n` accepted by `table`.
const TABLE_MAX_N: u32 = 200;

#[derive(Debug, Parser)]
#[command(
    name = "incmat",
    version,
    about = "Count, enumerate, sample and approximate incidence matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print one exact count.
    Count(CountArgs),
    /// Print a table of counts as CSV or JSON.
    Table(TableArgs),
    /// Draw uniform random objects.
    Sample(SampleArgs),
    /// Run the identity suite (and optionally the statistical suite).
    Verify(VerifyArgs),
    /// Compare exact values with asymptotic formulas.
    Asym(AsymArgs),
    /// Cross-check a computed sequence against an OEIS b-file.
    Oeis(OeisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Mobius,
    Stirling,
    Series,
}

#[derive(Debug, Args)]
struct CountArgs {
    /// Class name, e.g. F1111, F0101, Phi11, S10.
    #[arg(long)]
    class: ClassId,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Counting route for F1111.
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Relative tolerance for the series route.
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    /// Worker threads for the brute-force census.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=TABLE_MAX_N as i64))]
    max_n: u32,
    /// Also run the brute-force census up to n = 7 and cross-check every
    /// closed form against it.
    #[arg(long)]
    oracle: bool,
    /// Include the four symmetric classes S_ij.
    #[arg(long)]
    with_symmetric: bool,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// preorder, matrix, symmetric or rejection.
    #[arg(long)]
    kind: SamplerKind,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    n: u32,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SampleFormat::Json)]
    format: SampleFormat,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    max_n: u32,
    /// Also run the chi-square uniformity tests and acceptance experiments.
    #[arg(long)]
    stats: bool,
    #[arg(long, default_value_t = STANDARD_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct AsymArgs {
    /// F1111, P (preorders), I (involutions), S11 or F0111.
    #[arg(long)]
    class: AsymClass,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=2000))]
    max_n: u64,
}

#[derive(Debug, Args)]
struct OeisArgs {
    /// A101370 (compared with F1111) or A049311 (compared with F0101).
    #[arg(long)]
    id: String,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..=TABLE_MAX_N as i64))]
    max_n: u32,
    /// Cache directory (default: $INCMAT_OEIS_CACHE or the user cache dir).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Use only the cache; never touch the network.
    #[arg(long)]
    offline: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

/// Failure of a subcommand after argument parsing.
enum Failure {
    Usage(String),
    Runtime(String),
    /// A check ran and failed; its report has already been printed.
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<oeis::OeisError> for Failure {
    fn from(e: oeis::OeisError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_transport(args, out, err, &HttpTransport::default())
}

/// As [`run`], with the network transport used by `oeis` supplied.
pub fn run_with_transport<I, T>(
    args: I,
    out: &mut dyn Write,
    err: &mut dyn Write,
    transport: &dyn Transport,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Count(a) => count(a, out),
        Command::Table(a) => table(a, out),
        Command::Sample(a) => sample(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Asym(a) => asym(a, out),
        Command::Oeis(a) => oeis_cmd(a, out, transport),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
        Err(Failure::Verification) => EXIT_FAILURE,
    }
}

fn census_value(
    class: ClassId,
    n: u32,
    jobs: Option<usize>,
) -> std::result::Result<BigUint, Failure> {
    if n > ORACLE_HARD_LIMIT {
        return Err(Failure::Usage(format!(
            "{class} has no closed form; the brute-force census covers n <= {ORACLE_HARD_LIMIT}"
        )));
    }
    let c = census_with(
        n,
        CensusOptions {
            limit: ORACLE_HARD_LIMIT,
            threads: jobs,
        },
    )?;
    Ok(c.table
        .get(class, n)
        .cloned()
        .expect("census covers every class"))
}

fn count(a: CountArgs, out: &mut dyn Write) -> CmdResult {
    let n = a.n as u64;
    if let Some(route) = a.route {
        if a.class != ClassId::F1111 {
            return Err(Failure::Usage(format!(
                "--route applies only to F1111, not {}",
                a.class
            )));
        }
        match route {
            Route::Mobius => writeln!(out, "{}", f1111_mobius(n))?,
            Route::Stirling => writeln!(out, "{}", f1111_stirling(n)?)?,
            Route::Series => {
                let est = f1111_series(n, a.rel_tol)?;
                writeln!(
                    out,
                    "{:.0} (certified relative error <= {:e})",
                    est.value_f64(),
                    est.certified_relative_error
                )?;
            }
        }
        return Ok(());
    }
    let value = match formula_value(a.class, n) {
        Ok(v) => v,
        Err(Error::NoFormula(_)) => census_value(a.class, a.n, a.jobs)?,
        Err(e) => return Err(e.into()),
    };
    writeln!(out, "{value}")?;
    Ok(())
}

/// Formula values for `1..=max_n` plus census values: census-only classes
/// up to n = 6 by default; with `oracle`, every class up to n = 7 so the
/// closed forms are cross-checked.
fn build_table(
    max_n: u32,
    oracle: bool,
    jobs: Option<usize>,
) -> std::result::Result<CountTable, Failure> {
    let mut table = formula_table(max_n)?;
    let limit = if oracle {
        ORACLE_HARD_LIMIT
    } else {
        CENSUS_DEFAULT_LIMIT
    };
    let census = census_with(
        max_n.min(limit),
        CensusOptions {
            limit,
            threads: jobs,
        },
    )?;
    for (class, n, entry) in census.table.iter() {
        let no_formula = matches!(formula_value(class, 1), Err(Error::NoFormula(_)));
        if oracle || no_formula {
            table.insert(class, n, entry.value.clone(), entry.provenance)?;
        }
    }
    Ok(table)
}

fn table(a: TableArgs, out: &mut dyn Write) -> CmdResult {
    let mut classes = ClassId::fourteen();
    if a.with_symmetric {
        classes.extend(ClassId::symmetric_four());
    }
    let t = build_table(a.max_n, a.oracle, a.jobs)?;
    let rows = t.rows(&classes);
    match a.format {
        TableFormat::Csv => {
            writeln!(out, "class,n,value,provenance")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    r.class,
                    r.n,
                    r.value,
                    r.provenance.as_str()
                )?;
            }
        }
        TableFormat::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&rows).expect("rows serialize")
            )?;
        }
    }
    Ok(())
}

fn sample(a: SampleArgs, out: &mut dyn Write) -> CmdResult {
    let n = a.n as usize;
    let mut rng = RandomBitSource::new(a.seed);
    let text = a.format == SampleFormat::Text;
    match a.kind {
        SamplerKind::Preorder => {
            let mut s = PreorderSampler::new(n)?;
            for _ in 0..a.count {
                let p = s.sample(&mut rng);
                if text {
                    writeln!(out, "{p}")?;
                } else {
                    writeln!(out, "{}", p.to_json())?;
                }
            }
        }
        SamplerKind::Matrix | SamplerKind::Symmetric => {
            let mut draw: Box<dyn FnMut(&mut RandomBitSource) -> incmat::ZeroOneMatrix> =
                if a.kind == SamplerKind::Matrix {
                    let mut s = MatrixSampler::new(n)?;
                    Box::new(move |r| s.sample(r))
                } else {
                    let mut s = SymmetricSampler::new(n)?;
                    Box::new(move |r| s.sample(r))
                };
            for i in 0..a.count {
                let m = draw(&mut rng);
                if text {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    write!(out, "{m}")?;
                } else {
                    writeln!(out, "{}", m.to_json())?;
                }
            }
        }
        SamplerKind::Rejection => {
            let mut s = RejectionSampler::new(n)?;
            for i in 0..a.count {
                let (m, attempts) = s.sample(&mut rng);
                if text {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    writeln!(out, "attempts: {attempts}")?;
                    write!(out, "{m}")?;
                } else {
                    writeln!(out, "{}", m.to_json())?;
                }
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    identities: incmat::stats::IdentityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    statistics: Option<incmat::stats::StatisticalReport>,
    passed: bool,
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let identities = identity_suite(a.max_n).map_err(|e| match e {
        Error::OutOfRange(m) => Failure::Usage(m),
        e => e.into(),
    })?;
    let statistics = if a.stats {
        Some(statistical_suite(a.seed)?)
    } else {
        None
    };
    let passed = identities.all_passed() && statistics.as_ref().is_none_or(|s| s.all_passed());
    let report = VerifyReport {
        identities,
        statistics,
        passed,
    };
    match a.format {
        ReportFormat::Text => {
            write!(out, "{}", report.identities)?;
            if let Some(s) = &report.statistics {
                write!(out, "{s}")?;
            }
            writeln!(out, "{}", if passed { "ALL PASSED" } else { "FAILURES" })?;
        }
        ReportFormat::Json => {
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            )?;
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn asym(a: AsymArgs, out: &mut dyn Write) -> CmdResult {
    writeln!(out, "n,exact,asymptotic,ratio")?;
    for r in asym_table(a.class, a.max_n)? {
        writeln!(
            out,
            "{},{},{:.9e},{:.9}",
            r.n, r.exact, r.asymptotic, r.ratio
        )?;
    }
    Ok(())
}

/// The class a supported A-number is compared with.
pub fn oeis_class(id: &str) -> Option<ClassId> {
    match id {
        "A101370" => Some(ClassId::F1111),
        "A049311" => Some(ClassId::F0101),
        _ => None,
    }
}

fn oeis_cmd(a: OeisArgs, out: &mut dyn Write, transport: &dyn Transport) -> CmdResult {
    oeis::validate_id(&a.id).map_err(|e| Failure::Usage(e.to_string()))?;
    let class = oeis_class(&a.id).ok_or_else(|| {
        Failure::Usage(format!(
            "no local sequence for {} (supported: A101370, A049311)",
            a.id
        ))
    })?;
    let local: Vec<(u32, BigUint)> = if class == ClassId::F1111 {
        (1..=a.max_n).map(|n| (n, f1111_mobius(n as u64))).collect()
    } else {
        let top = a.max_n.min(CENSUS_DEFAULT_LIMIT);
        let census = census_with(top, CensusOptions::default())?;
        census.table.series(class)
    };
    let cache = a.cache.unwrap_or_else(default_cache_dir);
    let remote = fetch_bfile(&a.id, &cache, a.offline, transport)?;
    let report = compare_sequence(&class.to_string(), &local, &remote)?;
    match a.format {
        ReportFormat::Text => write!(out, "{report}")?,
        ReportFormat::Json => writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        )?,
    }
    if report.success {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
