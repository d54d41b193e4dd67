//! Command-line front end: interactive REPL, script runner with golden
//! checks, and component-calculus reports.

use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tensorkernel_core::clifford::spinor_dimension;
use tensorkernel_core::geometry::{self, Chart, GeometryError};
use tensorkernel_core::notation::{Piece, Splitter};
use tensorkernel_core::session::{Session, SessionOptions};
use tensorkernel_core::symmetry::DEFAULT_MAX_ORBIT;
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(name = "tensorkernel", version, about = "Symbolic tensor algebra kernel")]
struct Cli {
    /// Print expressions and reports as TeX.
    #[arg(long, global = true)]
    tex: bool,
    /// Do not run the PostDefaultRules pipeline.
    #[arg(long, global = true)]
    no_post_rules: bool,
    /// Largest symmetry orbit canonicalise may enumerate.
    #[arg(long, global = true, env = "TENSORKERNEL_MAX_ORBIT", default_value_t = DEFAULT_MAX_ORBIT)]
    max_orbit: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read statements from standard input and print results.
    Repl,
    /// Execute a script; with --check, compare output against its `#>` lines.
    Run {
        file: PathBuf,
        #[arg(long)]
        check: bool,
    },
    /// Chart reports.
    #[command(subcommand)]
    Chart(ChartCommand),
    /// Non-zero Christoffel symbols of a chart.
    Christoffel(ChartArgs),
    /// Maxwell-equation residuals on a chart.
    Maxwell {
        #[command(flatten)]
        chart: ChartArgs,
        /// Field spec file (`tensorkernel-fields v1`).
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Covariant derivative of the metric, which must vanish.
    MetricCheck(ChartArgs),
    /// Dimension of the spinor space for an n-dimensional Clifford algebra.
    SpinorDim { n: u32 },
}

#[derive(Subcommand, Debug)]
enum ChartCommand {
    /// Metric, inverse metric and sqrt|det g|.
    Show(ChartArgs),
}

#[derive(Args, Debug)]
struct ChartArgs {
    /// A built-in chart (cartesian3, cylindrical, spherical) or the name of
    /// a chart given with --coords and --metric.
    name: String,
    /// Coordinates of a custom chart, e.g. `{r,theta}`.
    #[arg(long, requires = "metric")]
    coords: Option<String>,
    /// Metric of a custom chart, e.g. `{{1,0},{0,r^2}}`.
    #[arg(long, requires = "coords")]
    metric: Option<String>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid argument: {0}")]
    Usage(String),
}

impl ChartArgs {
    fn chart(&self) -> Result<Chart, GeometryError> {
        match (&self.coords, &self.metric) {
            (Some(c), Some(m)) => Chart::from_source(&self.name, c, m),
            _ => geometry::builtin_chart(&self.name),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn print_block(text: &str) {
    print!("{}", text);
    if !text.ends_with('\n') {
        println!();
    }
}

fn repl(session: &mut Session) -> ExitCode {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut splitter = Splitter::new();
    let mut stdout = io::stdout();
    let prompt = |s: &Splitter, out: &mut io::Stdout| {
        if interactive {
            let _ = write!(out, "{}", if s.is_incomplete() { "... " } else { "> " });
            let _ = out.flush();
        }
    };
    let exec = |session: &mut Session, text: &str| match session.execute(text) {
        Ok(lines) => lines.iter().for_each(|l| println!("{}", l)),
        Err(e) => println!("error: {}", e),
    };
    prompt(&splitter, &mut stdout);
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let t = line.trim();
        if !splitter.is_incomplete() && (t == "quit" || t == "exit") {
            break;
        }
        if !splitter.is_incomplete() && t == "show properties" {
            exec(session, t);
        } else {
            for piece in splitter.push_line(&line) {
                if let Piece::Statement { text, .. } = piece {
                    exec(session, &text);
                }
            }
        }
        prompt(&splitter, &mut stdout);
    }
    if let Some(Piece::Statement { text, .. }) = splitter.finish_input() {
        exec(session, &text);
    }
    ExitCode::SUCCESS
}

fn run_file(session: &mut Session, file: &Path, check: bool) -> Result<ExitCode, CliError> {
    let src = read(file)?;
    let report = session.run_script(&src);
    for line in &report.output {
        println!("{}", line);
    }
    if !check {
        return Ok(if report.errors == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }
    for c in report.checks.iter().filter(|c| !c.passed()) {
        eprintln!(
            "{}:{}: expected `{}`, got `{}`",
            file.display(),
            c.line,
            c.expected,
            c.actual.as_deref().unwrap_or("<no output>")
        );
    }
    eprintln!("check: {} passed, {} failed", report.passed(), report.failed());
    Ok(if report.failed() == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let options = SessionOptions { tex: cli.tex, post_rules: !cli.no_post_rules, max_orbit: cli.max_orbit };
    let tex = cli.tex;
    let result: Result<ExitCode, CliError> = (|| {
        Ok(match &cli.command {
            Command::Repl => repl(&mut Session::new(options)),
            Command::Run { file, check } => run_file(&mut Session::new(options), file, *check)?,
            Command::Chart(ChartCommand::Show(args)) => {
                print_block(&geometry::chart_report(&args.chart()?, tex));
                ExitCode::SUCCESS
            }
            Command::Christoffel(args) => {
                print_block(&geometry::christoffel_report(&args.chart()?, tex));
                ExitCode::SUCCESS
            }
            Command::MetricCheck(args) => {
                print_block(&geometry::metric_check_report(&args.chart()?));
                ExitCode::SUCCESS
            }
            Command::Maxwell { chart, spec } => {
                let chart = chart.chart()?;
                let text = match spec {
                    Some(p) => read(p)?,
                    None => geometry::default_maxwell_spec(&chart),
                };
                let fields = geometry::maxwell_fields(&chart, &geometry::parse_field_spec(&text)?)?;
                print_block(&geometry::maxwell_report(&chart, &geometry::maxwell_residuals(&chart, &fields)?, tex));
                ExitCode::SUCCESS
            }
            Command::SpinorDim { n } => {
                let d = spinor_dimension(*n).ok_or_else(|| CliError::Usage(format!("no spinor dimension for n = {}", n)))?;
                println!("{}", d);
                ExitCode::SUCCESS
            }
        })
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
