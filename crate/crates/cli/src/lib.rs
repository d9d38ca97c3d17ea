//! File-driven experiments and report formatting for the `gcoupling` binary.

pub mod error;
pub mod experiments;
pub mod numeric;
pub mod problem;
pub mod report;
pub mod suite;

pub use error::{CliError, Result};
pub use experiments::Experiment;
pub use numeric::{Numeric, Overrides};
pub use problem::ProblemFile;
pub use report::Report;

/// Loads a problem file, resolves its numeric settings against `overrides`
/// and runs the experiment.
pub fn run_experiment(exp: Experiment, path: &std::path::Path, overrides: &Overrides) -> Result<Report> {
    let pf = ProblemFile::load(path)?;
    let num = Numeric::resolve(&pf.numeric, overrides)?;
    experiments::run(exp, &pf, &num)
}

/// One line per built-in coupling.
pub fn list_builtins() -> String {
    let width = gcoupling::BUILTINS.iter().map(|b| b.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for b in gcoupling::BUILTINS {
        out.push_str(&format!("{:<width$}  {}  [{}; {}]\n", b.name, b.formula, b.set, b.anchor));
    }
    out
}
