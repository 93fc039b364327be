use std::time::Instant;

use pathdev::devlayer::{develop_backward, develop_forward, DevOutput, LossPartials, OutputMode};
use pathdev::liealg::{random_init, AlgebraSpec};
use pathdev::matexp::SquareMatrix;
use pathdev::sigpath::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::print_json;
use crate::cli::BenchArgs;
use crate::error::{CliError, Result};

const LADDER: usize = 6;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub len: usize,
    pub forward_ms: f64,
    pub backward_ms: f64,
    pub backward_forward_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub algebra: AlgebraSpec,
    pub dim: usize,
    pub batch: usize,
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of log(forward time) against log(len).
    pub forward_loglog_slope: Option<f64>,
    pub forward_loglog_r2: Option<f64>,
}

/// Slope and coefficient of determination of `log y` regressed on `log x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

fn lengths(max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..LADDER).map(|k| max >> k).filter(|&n| n > 0).collect();
    out.dedup();
    out.reverse();
    out
}

fn time_ms(f: impl FnOnce() -> Result<()>) -> Result<f64> {
    let started = Instant::now();
    f()?;
    Ok(started.elapsed().as_secs_f64() * 1e3)
}

struct Case {
    len: usize,
    batch: Vec<TimeSeries>,
    outputs: Vec<DevOutput>,
    partials: LossPartials,
}

pub fn run_bench(args: &BenchArgs) -> Result<BenchReport> {
    if args.len == 0 {
        return Err(CliError::Input("zero-length input: --len must be positive".into()));
    }
    if args.batch == 0 || args.dim == 0 || args.repeats == 0 {
        return Err(CliError::Input("--batch, --dim and --repeats must be positive".into()));
    }
    let spec = AlgebraSpec::new(args.algebra, args.order)?;
    let weights = random_init(spec, args.dim, 1.0, args.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let ones = SquareMatrix::from_row_major(args.order, vec![1.0; args.order * args.order])?;
    let mut cases = Vec::new();
    for len in lengths(args.len) {
        let batch: Vec<TimeSeries> = (0..args.batch)
            .map(|_| {
                let values = (0..(len + 1) * args.dim).map(|_| rng.random_range(-0.5..0.5)).collect();
                TimeSeries::from_flat(args.dim, values)
            })
            .collect::<pathdev::Result<_>>()?;
        let outputs = batch
            .iter()
            .map(|x| develop_forward(&weights, x, OutputMode::Last))
            .collect::<pathdev::Result<Vec<_>>>()?;
        let partials = LossPartials::last_only(len + 1, ones.clone())?;
        cases.push(Case {
            len,
            batch,
            outputs,
            partials,
        });
    }
    // Repeats cycle through all lengths so that a burst of machine load
    // cannot inflate every timing of a single length.
    let mut forward = vec![f64::INFINITY; cases.len()];
    let mut backward = vec![f64::INFINITY; cases.len()];
    for _ in 0..args.repeats {
        for (k, case) in cases.iter().enumerate() {
            let f = time_ms(|| {
                for x in &case.batch {
                    develop_forward(&weights, x, OutputMode::Last)?;
                }
                Ok(())
            })?;
            let b = time_ms(|| {
                for (x, z) in case.batch.iter().zip(&case.outputs) {
                    develop_backward(&weights, x, z, &case.partials)?;
                }
                Ok(())
            })?;
            forward[k] = forward[k].min(f);
            backward[k] = backward[k].min(b);
        }
    }
    let rows: Vec<BenchRow> = cases
        .iter()
        .zip(forward.iter().zip(&backward))
        .map(|(case, (&forward_ms, &backward_ms))| BenchRow {
            len: case.len,
            forward_ms,
            backward_ms,
            backward_forward_ratio: backward_ms / forward_ms,
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.len as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.forward_ms).collect();
    let fit = fit_loglog(&xs, &ys);
    Ok(BenchReport {
        algebra: spec,
        dim: args.dim,
        batch: args.batch,
        rows,
        forward_loglog_slope: fit.map(|f| f.0),
        forward_loglog_r2: fit.map(|f| f.1),
    })
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let report = run_bench(args)?;
    if args.json {
        return print_json(&report);
    }
    println!("{} dim={} batch={}", report.algebra, report.dim, report.batch);
    println!("{:>8} {:>12} {:>12} {:>8}", "len", "forward_ms", "backward_ms", "ratio");
    for r in &report.rows {
        println!(
            "{:>8} {:>12.3} {:>12.3} {:>8.2}",
            r.len, r.forward_ms, r.backward_ms, r.backward_forward_ratio
        );
    }
    if let (Some(slope), Some(r2)) = (report.forward_loglog_slope, report.forward_loglog_r2) {
        println!("forward log-log slope {slope:.3} (R² {r2:.4})");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_fit_recovers_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        let (slope, r2) = fit_loglog(&xs, &ys).unwrap();
        assert!((slope - 1.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
        assert!(fit_loglog(&[1.0], &[1.0]).is_none());
    }

    #[test]
    fn length_ladder() {
        assert_eq!(lengths(1024), vec![32, 64, 128, 256, 512, 1024]);
        assert_eq!(lengths(3), vec![1, 3]);
        assert_eq!(lengths(1), vec![1]);
    }
}
