use std::io::Write;

use pathdev::sigpath::{add_time, signature as compute_signature};
use serde::Serialize;

use super::load_series;
use crate::cli::SignatureArgs;
use crate::csvio::{open_output, signature_header, write_signatures};
use crate::error::{CliError, Result};

#[derive(Serialize)]
struct JsonSignature<'a> {
    series_id: &'a str,
    signature: &'a [f64],
}

pub fn signature(args: &SignatureArgs) -> Result<()> {
    let series = load_series(&args.input)?;
    let dim = series[0].series.dim() + usize::from(args.add_time);
    let mut rows = Vec::with_capacity(series.len());
    for s in &series {
        let input = if args.add_time { add_time(&s.series) } else { s.series.clone() };
        let sig = compute_signature(&input, args.depth)?;
        rows.push((s.id.clone(), sig.flatten(args.include_constant)));
    }
    let mut out = open_output(args.output.as_deref())?;
    if args.json {
        for (id, values) in &rows {
            let line = serde_json::to_string(&JsonSignature {
                series_id: id,
                signature: values,
            })
            .expect("output serializes");
            writeln!(out, "{line}").map_err(|e| CliError::io("<output>", e))?;
        }
        out.flush().map_err(|e| CliError::io("<output>", e))
    } else {
        write_signatures(out, &signature_header(dim, args.depth, args.include_constant), &rows)
    }
}
