mod bench;
mod check_group;
mod develop;
mod eval;
mod generate;
mod gradcheck;
mod signature;
mod train;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub use bench::{bench, fit_loglog, run_bench, BenchReport, BenchRow};
pub use check_group::{check_group, run_check_group, GroupReport};
pub use develop::{develop, develop_rows, DevelopOutput, JsonState};
pub use eval::{eval, run_eval, EvalReport};
pub use generate::generate;
pub use gradcheck::{gradcheck, run_gradcheck, FamilyReport, GradcheckReport};
pub use signature::signature;
pub use train::{build_model, run_training, train, TrainSummary, EFFECTIVE_CONFIG, METRICS, MODEL, SUMMARY};

use crate::cli::{Cli, Command};
use crate::csvio::{open_input, read_series, source_name, NamedSeries};
use crate::error::{CliError, Result};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Develop(args) => develop(&args),
        Command::Signature(args) => signature(&args),
        Command::Gradcheck(args) => gradcheck(&args),
        Command::Train(args) => train(&args),
        Command::Eval(args) => eval(&args),
        Command::Bench(args) => bench(&args),
        Command::CheckGroup(args) => check_group(&args),
        Command::Generate(args) => generate(&args),
    }
}

pub(crate) fn load_series(path: &Path) -> Result<Vec<NamedSeries>> {
    read_series(open_input(path)?, &source_name(path))
}

pub(crate) fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Input(format!("cannot encode JSON: {e}")))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| CliError::io("<stdout>", e))
}
