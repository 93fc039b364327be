use std::fs;
use std::io::Write;

use pathdev::devlayer::{develop_forward, OutputMode};
use pathdev::liealg::{random_init, AlgebraSpec, DevWeights};
use pathdev::sigpath::add_time;
use serde::Serialize;

use super::load_series;
use crate::cli::DevelopArgs;
use crate::csvio::{open_output, write_states, StateRow};
use crate::error::{CliError, Result};

#[derive(Debug, Serialize)]
pub struct DevelopOutput {
    pub algebra: AlgebraSpec,
    pub rows: Vec<JsonState>,
}

#[derive(Debug, Serialize)]
pub struct JsonState {
    pub series_id: String,
    pub step: usize,
    pub matrix: Vec<Vec<f64>>,
}

fn resolve_weights(args: &DevelopArgs, dim: usize) -> Result<DevWeights> {
    if let Some(path) = &args.weights {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let weights = DevWeights::from_json(&text)?;
        if args.algebra.is_some_and(|f| f != weights.spec().family())
            || args.order.is_some_and(|m| m != weights.order())
        {
            return Err(CliError::Input(format!(
                "weights file holds {}, which contradicts --algebra/--order",
                weights.spec()
            )));
        }
        if weights.dim_in() != dim {
            return Err(CliError::Input(format!(
                "weights expect {} input channels, the series provide {dim}",
                weights.dim_in()
            )));
        }
        return Ok(weights);
    }
    let family = args
        .algebra
        .ok_or_else(|| CliError::Input("--algebra is required without --weights".into()))?;
    let order = args
        .order
        .ok_or_else(|| CliError::Input("--order is required without --weights".into()))?;
    let spec = AlgebraSpec::new(family, order)?;
    Ok(random_init(spec, dim, args.init_scale, args.seed.unwrap_or(0))?)
}

/// Develops every series and returns one row per emitted state.
pub fn develop_rows(args: &DevelopArgs) -> Result<(AlgebraSpec, Vec<StateRow>)> {
    let series = load_series(&args.input)?;
    let dim = series[0].series.dim() + usize::from(args.add_time);
    let weights = resolve_weights(args, dim)?;
    let mut rows = Vec::new();
    for s in &series {
        let input = if args.add_time { add_time(&s.series) } else { s.series.clone() };
        let out = develop_forward(&weights, &input, args.mode)?;
        let first_step = match args.mode {
            OutputMode::Sequence => 0,
            OutputMode::Last => out.num_steps(),
        };
        for (k, z) in out.output().iter().enumerate() {
            rows.push(StateRow {
                id: s.id.clone(),
                step: first_step + k,
                matrix: z.clone(),
            });
        }
    }
    Ok((*weights.spec(), rows))
}

pub fn develop(args: &DevelopArgs) -> Result<()> {
    let (algebra, rows) = develop_rows(args)?;
    let mut out = open_output(args.output.as_deref())?;
    if args.json {
        let doc = DevelopOutput {
            algebra,
            rows: rows
                .into_iter()
                .map(|r| JsonState {
                    series_id: r.id,
                    step: r.step,
                    matrix: r.matrix.to_rows(),
                })
                .collect(),
        };
        let text = serde_json::to_string(&doc).expect("output serializes");
        writeln!(out, "{text}").map_err(|e| CliError::io("<output>", e))?;
        out.flush().map_err(|e| CliError::io("<output>", e))
    } else {
        write_states(out, &rows)
    }
}
