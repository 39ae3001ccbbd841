//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification finds exceptions past its
//! threshold (or a run fails), 2 on usage errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::conjectures::{self, GOLDBACH_THRESHOLD, SP_GOLDBACH_THRESHOLD, SQUARES_THRESHOLD_K};
use crate::density;
use crate::digits;
use crate::error::{Error, Result};
use crate::pell;
use crate::report::{Cell, Sheet};
use crate::sieve::{SpTable, TableConfig, DEFAULT_SEGMENT_SIZE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping table memory, in MiB.
pub const MEMORY_CAP_ENV: &str = "SP_MEMORY_CAP_MB";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "sqprime",
    version,
    about = "Square-prime numbers p*a^2: tables, counts and conjecture checks"
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Inclusive upper bound of the sieve table
    #[arg(long, global = true, default_value_t = 1_000_000)]
    limit: u64,
    /// Integers per sieve segment
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_SIZE)]
    segment_size: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write data here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List SP numbers with their decompositions
    Sieve {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: Option<u64>,
    },
    /// SP(n) by enumeration and by the prime-counting sum, with π(n)
    Count {
        #[arg(long)]
        to: Option<u64>,
    },
    /// Density against (ζ(2)−1)·n/ln n at checkpoints
    Density {
        /// Comma-separated checkpoints (default: powers of ten and the limit)
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<u64>>,
    },
    /// Integers that are not a sum of two SP numbers
    Goldbach {
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long)]
        to: Option<u64>,
        /// Exceptions at or above this fail the run
        #[arg(long, default_value_t = GOLDBACH_THRESHOLD)]
        threshold: u64,
    },
    /// SP numbers that are not a sum of two SP numbers
    SpGoldbach {
        /// Scan SP values strictly above this
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long)]
        to: Option<u64>,
        /// Exceptions strictly above this fail the run
        #[arg(long, default_value_t = SP_GOLDBACH_THRESHOLD)]
        threshold: u64,
    },
    /// k with no SP strictly between k² and (k+1)²
    Squares {
        #[arg(long, default_value_t = 2)]
        from: u64,
        #[arg(long)]
        to: Option<u64>,
        /// Failures at k >= this fail the run
        #[arg(long, default_value_t = SQUARES_THRESHOLD_K)]
        threshold: u64,
    },
    /// Gap histogram between consecutive SP numbers
    Gaps {
        #[arg(long)]
        to: Option<u64>,
    },
    /// SP twins (n, n+1)
    Twins {
        #[arg(long)]
        to: Option<u64>,
    },
    /// SP pairs with a given gap from the Pell equation orbit
    Pell {
        #[arg(long)]
        gap: u64,
        #[arg(long, default_value_t = 5)]
        count: usize,
    },
    /// Last-digit distribution against the Hurwitz zeta constants
    Digits,
    /// Hurwitz zeta ζ(2, c)
    Zeta {
        /// "p/q" or a decimal in (0, 2]
        #[arg(long)]
        c: String,
    },
}

/// Validated global options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub limit: u64,
    pub segment_size: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub workers: usize,
}

impl RunConfig {
    fn from_args(args: ConfigArgs) -> Result<Self> {
        let workers =
            args.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if args.limit < 2 {
            return Err(Error::invalid(format!("--limit must be at least 2, got {}", args.limit)));
        }
        if args.segment_size < 2 {
            return Err(Error::invalid(format!(
                "--segment-size must be at least 2, got {}",
                args.segment_size
            )));
        }
        if workers == 0 {
            return Err(Error::invalid("--workers must be at least 1"));
        }
        Ok(RunConfig {
            limit: args.limit,
            segment_size: args.segment_size,
            format: args.format,
            output: args.output,
            workers,
        })
    }

    fn build_table(&self) -> Result<SpTable> {
        let memory_cap = parse_memory_cap(std::env::var(MEMORY_CAP_ENV).ok().as_deref())?;
        SpTable::build(self.limit, &TableConfig { segment_size: self.segment_size, memory_cap })
    }

    fn upper(&self, to: Option<u64>) -> u64 {
        to.unwrap_or(self.limit)
    }
}

/// Memory cap in bytes from the MiB value of [`MEMORY_CAP_ENV`].
fn parse_memory_cap(raw: Option<&str>) -> Result<Option<u64>> {
    raw.map(|v| {
        v.trim()
            .parse::<u64>()
            .map(|mb| mb.saturating_mul(1 << 20))
            .map_err(|_| Error::invalid(format!("{MEMORY_CAP_ENV}={v:?} is not a number")))
    })
    .transpose()
}

struct Outcome {
    sheet: Sheet,
    passed: bool,
}

impl From<Sheet> for Outcome {
    fn from(sheet: Sheet) -> Self {
        Outcome { sheet, passed: true }
    }
}

fn single_column(name: &'static str, values: &[u64]) -> Sheet {
    let mut sheet = Sheet::new(&[name]);
    for &v in values {
        sheet.push(vec![Cell::Int(v)]);
    }
    sheet
}

fn opt_real(v: Option<f64>) -> Cell {
    v.map_or(Cell::Empty, Cell::Real)
}

fn execute(cfg: &RunConfig, command: Command, diag: &mut Vec<String>) -> Result<Outcome> {
    if let Command::Zeta { c } = &command {
        let z = digits::hurwitz_zeta2(digits::parse_rational(c)?)?;
        let mut sheet = Sheet::new(&["c", "value", "abs_error_bound"]);
        sheet.push(vec![Cell::Real(z.c), Cell::Real(z.value), Cell::Real(z.abs_error_bound)]);
        return Ok(sheet.into());
    }
    let table = cfg.build_table()?;
    let outcome = match command {
        Command::Sieve { from, to } => {
            let mut sheet = Sheet::new(&["n", "p", "a"]);
            for d in table.sp_list(from.max(1), cfg.upper(to))? {
                sheet.push(vec![Cell::Int(d.n), Cell::Int(d.p), Cell::Int(d.a)]);
            }
            sheet.into()
        }
        Command::Count { to } => {
            let n = cfg.upper(to);
            let exact = density::sp_count(&table, n)?;
            let via_pi = density::sp_count_via_pi(&table, n)?;
            let mut sheet = Sheet::new(&["n", "sp_exact", "sp_via_pi", "pi_n"]);
            sheet.push(vec![
                Cell::Int(n),
                Cell::Int(exact),
                Cell::Int(via_pi),
                Cell::Int(table.prime_count(n)?),
            ]);
            if exact != via_pi {
                diag.push(format!("count identity failed at {n}: {exact} != {via_pi}"));
            }
            Outcome { sheet, passed: exact == via_pi }
        }
        Command::Density { checkpoints } => {
            let checkpoints = checkpoints.unwrap_or_else(|| density::decade_checkpoints(cfg.limit));
            let mut sheet = Sheet::new(&["n", "sp_exact", "pi_n", "asymptotic", "ratio"]);
            for r in density::density_table(&table, &checkpoints)? {
                sheet.push(vec![
                    Cell::Int(r.n),
                    Cell::Int(r.sp_exact),
                    Cell::Int(r.pi_n),
                    Cell::Real(r.asymptotic),
                    Cell::Real(r.ratio),
                ]);
            }
            sheet.into()
        }
        Command::Goldbach { from, to, threshold } => {
            let hi = cfg.upper(to);
            let exceptions = conjectures::verify_goldbach_range(&table, from, hi)?;
            let late = exceptions.iter().filter(|&&n| n >= threshold).count();
            report_exceptions(diag, "not a sum of two SP numbers", late, threshold);
            Outcome { sheet: single_column("n", &exceptions), passed: late == 0 }
        }
        Command::SpGoldbach { from, to, threshold } => {
            let hi = cfg.upper(to);
            let exceptions = conjectures::verify_sp_goldbach_above(&table, from, hi)?;
            let late = exceptions.iter().filter(|&&n| n > threshold).count();
            report_exceptions(diag, "SP values without a two-SP sum", late, threshold + 1);
            Outcome { sheet: single_column("n", &exceptions), passed: late == 0 }
        }
        Command::Squares { from, to, threshold } => {
            let k_max = to.unwrap_or_else(|| max_square_k(cfg.limit));
            let failures = conjectures::verify_squares_range(&table, from, k_max)?;
            let late = failures.iter().filter(|&&k| k >= threshold).count();
            report_exceptions(diag, "square intervals without an SP", late, threshold);
            Outcome { sheet: single_column("k", &failures), passed: late == 0 }
        }
        Command::Gaps { to } => {
            let mut sheet = Sheet::new(&["g", "first_lo", "count"]);
            for r in conjectures::gap_histogram(&table, cfg.upper(to))? {
                sheet.push(vec![Cell::Int(r.g), Cell::Int(r.first_lo), Cell::Int(r.count)]);
            }
            sheet.into()
        }
        Command::Twins { to } => {
            let mut sheet = Sheet::new(&["lo", "hi"]);
            for n in conjectures::sp_twins(&table, cfg.upper(to))? {
                sheet.push(vec![Cell::Int(n), Cell::Int(n + 1)]);
            }
            sheet.into()
        }
        Command::Pell { gap, count } => {
            let mut sheet = Sheet::new(&["g", "u", "p_u", "a_u", "v", "p_v", "a_v"]);
            let Some(witness) = pell::find_witness(&table, gap)? else {
                diag.push(format!("no SP pair with gap {gap} and distinct primes up to {}", table.limit()));
                return Ok(Outcome { sheet, passed: false });
            };
            diag.push(format!("witness: {witness}"));
            for p in pell::generate_gap_pairs(&witness, count)? {
                sheet.push(vec![
                    Cell::Int(p.g),
                    Cell::Digits(p.small.n.to_string()),
                    Cell::Int(p.small.p),
                    Cell::Digits(p.small.a.to_string()),
                    Cell::Digits(p.large.n.to_string()),
                    Cell::Int(p.large.p),
                    Cell::Digits(p.large.a.to_string()),
                ]);
            }
            sheet.into()
        }
        Command::Digits => {
            let report = digits::digit_report(&table);
            let mut sheet = Sheet::new(&[
                "digit",
                "count",
                "share",
                "predicted_share",
                "constant_literal",
                "constant_corrected",
            ]);
            for r in &report.rows {
                sheet.push(vec![
                    Cell::Int(u64::from(r.digit)),
                    Cell::Int(r.count),
                    Cell::Real(r.share),
                    opt_real(r.predicted_share),
                    opt_real(r.constant_literal),
                    opt_real(r.constant_corrected),
                ]);
            }
            diag.push(format!(
                "coprime-digit share {:.6}, predicted {:.6} (corrected), {:.6} (literal)",
                report.aggregate_share, report.predicted_aggregate_share, report.literal_aggregate_share
            ));
            sheet.into()
        }
        Command::Zeta { .. } => unreachable!("handled above"),
    };
    Ok(outcome)
}

fn report_exceptions(diag: &mut Vec<String>, what: &str, late: usize, from: u64) {
    if late > 0 {
        diag.push(format!("{late} {what} at or beyond {from}"));
    }
}

/// Largest `k` with `(k+1)² <= limit`.
fn max_square_k(limit: u64) -> u64 {
    num_integer::Roots::sqrt(&limit).saturating_sub(1)
}

fn emit(cfg: &RunConfig, sheet: &Sheet, out: &mut dyn Write) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_sheet(cfg.format, sheet, &mut file)
        }
        None => write_sheet(cfg.format, sheet, out),
    }
}

fn write_sheet(format: Format, sheet: &Sheet, w: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => sheet.write_csv(w),
        Format::Json => sheet.write_json(w),
    }
}

/// Parses `argv` (program name first) and runs one subcommand, writing data
/// to `out` and diagnostics to `diag`. Returns the process exit code.
pub fn run_with(argv: &[String], out: &mut dyn Write, diag: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(diag, "{rendered}");
            }
            return code;
        }
    };
    let cfg = match RunConfig::from_args(cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(diag, "error: cannot start worker pool: {e}");
            return EXIT_VERIFY_FAILED;
        }
    };
    let mut notes = Vec::new();
    let result = pool.install(|| execute(&cfg, cli.command, &mut notes));
    for note in &notes {
        let _ = writeln!(diag, "{note}");
    }
    let result = result.and_then(|outcome| emit(&cfg, &outcome.sheet, out).map(|()| outcome.passed));
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            match e {
                Error::InvalidArgument(_) | Error::OutOfRange { .. } => EXIT_USAGE,
                _ => EXIT_VERIFY_FAILED,
            }
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = BufWriter::new(stdout.lock());
    let code = run_with(argv, &mut out, &mut stderr.lock());
    if out.flush().is_err() {
        return EXIT_VERIFY_FAILED;
    }
    code
}
