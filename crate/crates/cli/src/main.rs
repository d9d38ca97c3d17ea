use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcoupling_cli::numeric::Numeric;
use gcoupling_cli::{experiments, list_builtins, suite, CliError, Experiment, Overrides, ProblemFile, Report};

/// Numerical experiments on G-couplings, conjugates and duality schemes.
#[derive(Parser)]
#[command(name = "gcoupling", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the coupling conditions on a joint grid.
    Validate(FileArgs),
    /// Tabulate f^g and f^gg.
    Conjugate(FileArgs),
    /// Primal and dual optimal values, membership and dual attainment.
    Duality(FileArgs),
    /// Recession directions of gamma and the compactness verdict.
    Recession(FileArgs),
    /// Lagrangian dual of min f subject to h(x) <= 0.
    Lagrangian(FileArgs),
    /// Perturbation scheme, h* by both routes and the duality gap.
    Perturb(FileArgs),
    /// Equilibrium problem: gap, certificates, zero-gap couplings; also VIP/EPVIP blocks.
    Ep(FileArgs),
    /// Complementarity problem: exact LCP, closed-form dual, zero-gap equivalence.
    Cp(FileArgs),
    /// Regression suite over the worked examples.
    PaperSuite(Common),
    /// List the built-in couplings.
    ListBuiltins,
}

#[derive(Args)]
struct FileArgs {
    /// Problem file (JSON).
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// Points per dimension for grids the file does not size.
    #[arg(long)]
    points: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Table to emit with --format csv (default: the first one).
    #[arg(long)]
    table: Option<String>,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, CliError> {
        Overrides { tol: self.tol, radius: self.radius, points: self.points, ..Default::default() }.with_env()
    }
}

fn experiment(c: &Command) -> Option<(Experiment, &FileArgs)> {
    Some(match c {
        Command::Validate(a) => (Experiment::Validate, a),
        Command::Conjugate(a) => (Experiment::Conjugate, a),
        Command::Duality(a) => (Experiment::Duality, a),
        Command::Recession(a) => (Experiment::Recession, a),
        Command::Lagrangian(a) => (Experiment::Lagrangian, a),
        Command::Perturb(a) => (Experiment::Perturb, a),
        Command::Ep(a) => (Experiment::Ep, a),
        Command::Cp(a) => (Experiment::Cp, a),
        Command::PaperSuite(_) | Command::ListBuiltins => return None,
    })
}

fn emit(rep: &Report, common: &Common) -> Result<(), CliError> {
    let text = match common.format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.to_csv(common.table.as_deref())?,
    };
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let (mut rep, common) = match &cli.command {
        Command::ListBuiltins => {
            print!("{}", list_builtins());
            return Ok(true);
        }
        Command::PaperSuite(common) => {
            let num = Numeric::resolve(&Default::default(), &common.overrides()?)?;
            let rep = suite::paper_suite(&num);
            if common.out.is_some() {
                eprint!("{}", suite::render_table(&rep));
            }
            (rep, common)
        }
        c => {
            let (exp, args) = experiment(c).expect("file-driven subcommand");
            let pf = ProblemFile::load(&args.file)?;
            let num = Numeric::resolve(&pf.numeric, &args.common.overrides()?)?;
            (experiments::run(exp, &pf, &num)?, &args.common)
        }
    };
    if common.timing {
        rep.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    emit(&rep, common)?;
    if !rep.passed() {
        eprintln!("failed checks: {}", rep.failed_checks().join(", "));
    }
    Ok(rep.passed())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
