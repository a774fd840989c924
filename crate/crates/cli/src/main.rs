use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

mod report;

use report::Report;

/// Interval bounds for conditional probabilities between classes.
#[derive(Parser, Debug)]
#[command(name = "probsyl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether some distribution satisfies the knowledge base.
    Check(Common),
    /// Saturate the knowledge base and print it.
    Saturate(Common),
    /// Answer a query by local propagation.
    Query {
        #[command(flatten)]
        common: Common,
        /// `TARGET | GIVEN`, each side `NAME`, `NAME & NAME` or `NAME + NAME`.
        query: String,
    },
    /// Answer a query exactly by linear programming.
    Exact {
        #[command(flatten)]
        common: Common,
        query: String,
    },
    /// Compare local and exact bounds on every ordered pair of atoms.
    Compare(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Knowledge base file.
    kb: PathBuf,
    /// Smallest endpoint movement counted as progress.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_outer: usize,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Include derivation steps.
    #[arg(long)]
    trace: bool,
    /// Run the exact oracle beyond its usual atom limit.
    #[arg(long)]
    force: bool,
    /// Line-delimited JSON output.
    #[arg(long)]
    json: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

impl Common {
    fn load(&self) -> anyhow::Result<probsyl::Network> {
        let text = fs::read_to_string(&self.kb).with_context(|| format!("reading {}", self.kb.display()))?;
        probsyl::parse_kb(&text).with_context(|| format!("parsing {}", self.kb.display()))
    }

    fn saturation(&self) -> probsyl::SaturationOptions {
        probsyl::SaturationOptions {
            tol: self.tol,
            max_outer: self.max_outer,
        }
    }

    fn oracle(&self) -> probsyl::OracleOptions {
        probsyl::OracleOptions {
            force: self.force,
            ..Default::default()
        }
    }
}

/// Exit statuses.
pub const OK: u8 = 0;
pub const FAILED: u8 = 1;
pub const INCONSISTENT: u8 = 2;
pub const UNSOUND: u8 = 3;

fn run(cli: &Cli) -> anyhow::Result<(Report, u8)> {
    match &cli.command {
        Command::Check(c) => report::check(&c.load()?, c.json, &c.oracle()),
        Command::Saturate(c) => Ok(report::saturate(c.load()?, c.json, c.trace, &c.saturation())),
        Command::Query { common: c, query } => report::query(c.load()?, query, c.json, c.trace, &c.saturation()),
        Command::Exact { common: c, query } => report::exact(&c.load()?, query, c.json, &c.oracle()),
        Command::Compare(c) => report::compare(c.load()?, c.json, &c.saturation(), &c.oracle()),
    }
}

fn common(cli: &Cli) -> &Common {
    match &cli.command {
        Command::Check(c) | Command::Saturate(c) | Command::Compare(c) => c,
        Command::Query { common, .. } | Command::Exact { common, .. } => common,
    }
}

fn emit(report: &Report, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = report.render();
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(report, code)| {
        emit(&report, common(&cli).output.as_ref())?;
        for line in report.warnings() {
            eprintln!("warning: {line}");
        }
        Ok(code)
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(FAILED)
        }
    }
}
