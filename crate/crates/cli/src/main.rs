//! `rkverify`: command-line driver for the model pairing checks. Verify
//! suites exit 0 only when every check passes (1 on any failure, 2 on a
//! configuration error); reports are written out even for failing runs.

mod config;
mod emit;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{FlagInputs, Format, Suite};

#[derive(Parser)]
#[command(
    name = "rkverify",
    version,
    about = "Numerical checks for the GL(3)xGL(2) model pairing: integral identities, \
             the reduction ladder, the closed gamma form, reciprocity, and bump scaling"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite; one report record per check
    Verify {
        #[arg(value_enum)]
        suite: VerifySuiteArg,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Parameter sweeps
    Sweep {
        #[command(subcommand)]
        what: SweepCmd,
    },
    /// Print the report field list for every record kind
    Schema,
}

#[derive(Subcommand)]
enum SweepCmd {
    /// Sweep the localized bump pairing over scales T and fit the decay slope
    Bump {
        /// Comma-separated scales, each at least 4 (default 8,16,32,64)
        #[arg(long = "t-values", value_delimiter = ',', value_name = "T,T,..")]
        t_values: Option<Vec<f64>>,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifySuiteArg {
    Appendix,
    Chain,
    ClosedForm,
    Reciprocity,
    All,
}

impl From<VerifySuiteArg> for Suite {
    fn from(v: VerifySuiteArg) -> Suite {
        match v {
            VerifySuiteArg::Appendix => Suite::Appendix,
            VerifySuiteArg::Chain => Suite::Chain,
            VerifySuiteArg::ClosedForm => Suite::ClosedForm,
            VerifySuiteArg::Reciprocity => Suite::Reciprocity,
            VerifySuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(v: FormatArg) -> Format {
        match v {
            FormatArg::Json => Format::JsonLines,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct CommonOpts {
    /// Base seed for parameter draws (falls back to RK_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Seeded draws per check (default: 20 for appendix, 50 for reciprocity)
    #[arg(long)]
    samples: Option<u64>,
    /// Tolerance override, repeatable, e.g. --tol a1_mellin_spherical=1e-6
    #[arg(long, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Worker threads (default 1)
    #[arg(long)]
    parallelism: Option<usize>,
    /// Directory for report files (default: current directory)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report format (default: json for verify, csv for sweeps)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Widen the imaginary range of sampled parameters from 2 to 8
    #[arg(long)]
    hard: bool,
    /// Flat key=value config file; command-line flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, String> {
    match cli.cmd {
        Cmd::Schema => {
            print!("{}", emit::schema_text());
            Ok(true)
        }
        Cmd::Verify { suite, opts } => execute(suite.into(), opts, None),
        Cmd::Sweep {
            what: SweepCmd::Bump { t_values, opts },
        } => execute(Suite::Bump, opts, t_values),
    }
}

fn execute(suite: Suite, opts: CommonOpts, t_values: Option<Vec<f64>>) -> Result<bool, String> {
    let started = Instant::now();
    let cfg = config::resolve(
        suite,
        FlagInputs {
            seed: opts.seed,
            samples: opts.samples,
            tol: opts.tol,
            parallelism: opts.parallelism,
            out: opts.out,
            format: opts.format.map(Into::into),
            hard: opts.hard,
            config: opts.config,
            t_values,
        },
    )?;
    let run = suites::run_suite(&cfg);
    let files = emit::write_reports(&cfg.output_dir, cfg.format, &run.records)?;
    let summary = emit::Summary::build(&cfg, &run, started.elapsed());
    let summary_path = emit::write_summary(&cfg.output_dir, &summary)?;

    for line in &run.extras.lines {
        println!("{line}");
    }
    for path in files.iter().chain([&summary_path]) {
        println!("wrote {}", path.display());
    }
    if let Some(err) = &run.error {
        eprintln!("suite error: {err}");
    }
    let ok = run.all_pass();
    println!(
        "{}: {} records, {} passed, {} failed -> {}",
        cfg.suite.as_str(),
        run.records.len(),
        run.passed_records(),
        run.failed_records(),
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(ok)
}
