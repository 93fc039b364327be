use std::fs;

use pathdev::train::{evaluate, mean_loss, Model, Sample};
use serde::Serialize;

use super::{load_series, print_json};
use crate::cli::EvalArgs;
use crate::csvio::{join_dataset, open_input, read_targets, source_name};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    /// `accuracy` or `mse`.
    pub metric: &'static str,
    pub value: f64,
    pub loss: f64,
    pub samples: usize,
}

pub fn run_eval(args: &EvalArgs) -> Result<EvalReport> {
    let text = fs::read_to_string(&args.model).map_err(|e| CliError::io(&args.model, e))?;
    let model = Model::from_json(&text)?;
    let series = load_series(&args.input)?;
    let targets = read_targets(open_input(&args.targets)?, &source_name(&args.targets))?;
    let data = join_dataset(series, targets)?;
    let samples: Vec<&Sample> = data.samples().iter().collect();
    Ok(EvalReport {
        metric: if model.is_classifier() { "accuracy" } else { "mse" },
        value: evaluate(&model, &samples)?,
        loss: mean_loss(&model, &samples)?,
        samples: samples.len(),
    })
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let report = run_eval(args)?;
    if args.json {
        print_json(&report)
    } else {
        println!("{} {}", report.metric, report.value);
        println!("loss {}", report.loss);
        println!("samples {}", report.samples);
        Ok(())
    }
}
