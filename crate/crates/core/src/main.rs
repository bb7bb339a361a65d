//! Command-line front end for the curve analyzer.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quasihom::analysis::{AnalysisOptions, Check};
use quasihom::cli::{run, InputSource, RunConfig};
use quasihom::ring::DEFAULT_MAX_PRECISION;

#[derive(Parser)]
#[command(
    name = "quasihom",
    version,
    about = "Decide quasihomogeneity of parametrized algebroid curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a parametrized curve, or a ';'-separated batch of them
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Generator expressions, e.g. "t^4 + t^5, t^7, t^8, t^9"
    /// (stdin is read when neither an expression nor --file is given)
    expression: Option<String>,

    /// Read the input document from a file
    #[arg(long, conflicts_with = "expression")]
    file: Option<PathBuf>,

    /// Fixed working precision (chosen automatically when omitted)
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    precision: Option<i64>,

    /// Cap for the automatic precision search
    #[arg(long, default_value_t = DEFAULT_MAX_PRECISION, value_parser = clap::value_parser!(i64).range(1..))]
    max_precision: i64,

    /// Which criteria to run
    #[arg(long, value_enum, default_value_t = CheckArg::All)]
    check: CheckArg,

    /// Construct and certify a new uniformizer when the valuation
    /// criterion is met
    #[arg(long)]
    reparametrize: bool,

    /// Emit the report as JSON on stdout
    #[arg(long)]
    json: bool,

    /// Print only the verdict line (text mode)
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Copy, Clone, ValueEnum)]
enum CheckArg {
    Valuation,
    Trace,
    All,
}

impl From<CheckArg> for Check {
    fn from(c: CheckArg) -> Check {
        match c {
            CheckArg::Valuation => Check::Valuation,
            CheckArg::Trace => Check::Trace,
            CheckArg::All => Check::All,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let Command::Analyze(args) = cli.command;
    let input = match (&args.expression, &args.file) {
        (Some(expr), _) => InputSource::Expression(expr.clone()),
        (None, Some(path)) => InputSource::File(path.clone()),
        (None, None) => InputSource::Stdin,
    };
    let config = RunConfig {
        input,
        options: AnalysisOptions {
            precision: args.precision,
            max_precision: args.max_precision,
            check: args.check.into(),
            reparametrize: args.reparametrize,
        },
        json: args.json,
        quiet: args.quiet,
    };
    let code = run(&config, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
