use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use pathdev::train::{evaluate, train_loop_with, Dataset, Model, Split};
use serde::Serialize;

use super::print_json;
use crate::cli::TrainArgs;
use crate::config::{HeadKind, RunConfig};
use crate::error::{CliError, Result};

pub const EFFECTIVE_CONFIG: &str = "effective_config.json";
pub const METRICS: &str = "metrics.jsonl";
pub const MODEL: &str = "model.json";
pub const SUMMARY: &str = "summary.json";

#[derive(Debug, Clone, Serialize)]
pub struct TrainSummary {
    /// `accuracy` or `mse`.
    pub metric: &'static str,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_metric: f64,
    /// Metric of the best checkpoint on the test split, if there is one.
    pub test_metric: Option<f64>,
    pub output_dir: PathBuf,
}

pub fn build_model(config: &RunConfig, data: &Dataset) -> Result<Model> {
    let dim = data.dim().ok_or_else(|| CliError::Input("dataset is empty".into()))?;
    let mode = config.model.input_mode;
    let scale = config.train.init_scale;
    let seed = config.train.seed;
    let model = match (config.model.head, data.num_classes()) {
        (HeadKind::Linear, Some(classes)) => Model::classifier(config.algebra, dim, classes.max(2), mode, scale, seed)?,
        (HeadKind::Linear, None) => {
            let outputs = match &data.samples()[0].target {
                pathdev::train::Target::Vector(v) => v.len(),
                pathdev::train::Target::Class(_) => unreachable!("num_classes covers class targets"),
            };
            Model::regressor(config.algebra, dim, outputs, mode, scale, seed)?
        }
        (HeadKind::Se2Action, None) => Model::se2_predictor(dim, mode, scale, seed)?,
        (HeadKind::Se2Action, Some(_)) => {
            return Err(CliError::Input("the se2_action head needs vector targets".into()));
        }
    };
    Ok(model)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn run_training(config: &RunConfig, verbose: bool) -> Result<TrainSummary> {
    config.validate()?;
    let data = config.load_dataset()?;
    let model = build_model(config, &data)?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_file(&dir.join(EFFECTIVE_CONFIG), &config.to_json())?;

    let metrics_path = dir.join(METRICS);
    let file = File::create(&metrics_path).map_err(|e| CliError::io(&metrics_path, e))?;
    let mut metrics = BufWriter::new(file);
    let mut write_error = None;
    let outcome = train_loop_with(&config.train, &data, model, |record| {
        if write_error.is_none() {
            let line = record.to_json_line();
            if let Err(e) = writeln!(metrics, "{line}").and_then(|_| metrics.flush()) {
                write_error = Some(e);
            }
        }
        if verbose {
            eprintln!(
                "epoch {:>4}  train_loss {:.6}  val_loss {:.6}  val_metric {:.6}",
                record.epoch, record.train_loss, record.val_loss, record.val_metric
            );
        }
    })?;
    if let Some(e) = write_error {
        return Err(CliError::io(metrics_path, e));
    }

    write_file(&dir.join(MODEL), &(outcome.best_model.to_json() + "\n"))?;
    let test = data.split(Split::Test);
    let summary = TrainSummary {
        metric: if outcome.best_model.is_classifier() { "accuracy" } else { "mse" },
        epochs_run: outcome.history.len(),
        best_epoch: outcome.best_epoch,
        best_val_metric: outcome.best_val_metric,
        test_metric: if test.is_empty() {
            None
        } else {
            Some(evaluate(&outcome.best_model, &test)?)
        },
        output_dir: dir.clone(),
    };
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    write_file(&dir.join(SUMMARY), &text)?;
    Ok(summary)
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    let summary = run_training(&config, args.verbose)?;
    if args.json {
        print_json(&summary)
    } else {
        let mut lines = vec![
            ("epochs run".to_string(), summary.epochs_run.to_string()),
            ("best epoch".to_string(), summary.best_epoch.to_string()),
            (format!("best val {}", summary.metric), summary.best_val_metric.to_string()),
        ];
        if let Some(t) = summary.test_metric {
            lines.push((format!("test {}", summary.metric), t.to_string()));
        }
        lines.push(("outputs in".to_string(), summary.output_dir.display().to_string()));
        let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0) + 1;
        for (key, value) in lines {
            println!("{:<width$} {value}", format!("{key}:"));
        }
        Ok(())
    }
}
