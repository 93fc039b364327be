use pathdev::liealg::{AlgebraSpec, Family};
use pathdev::matexp::SquareMatrix;
use serde::Serialize;

use super::print_json;
use crate::cli::CheckGroupArgs;
use crate::csvio::{open_input, read_states, source_name};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub algebra: AlgebraSpec,
    pub rows: usize,
    pub failures: usize,
    /// Largest residual relative to max(1, ‖Z‖²).
    pub max_residual: f64,
    /// `series_id:step` of the first failing rows.
    pub failing: Vec<String>,
    pub passed: bool,
}

const MAX_LISTED: usize = 20;

/// Relative defining-relation residual and orientation check.
fn row_ok(spec: &AlgebraSpec, z: &SquareMatrix, tol: f64) -> (bool, f64) {
    if !z.is_finite() {
        return (false, f64::INFINITY);
    }
    let residual = spec.group_residual(z) / z.frobenius_norm().powi(2).max(1.0);
    let oriented = match spec.family() {
        Family::Gl => z.determinant() != 0.0,
        Family::So => z.determinant() > 0.0,
        Family::Se2 => z.block(0, 0, 2).determinant() > 0.0,
        Family::Sp | Family::Lorentz => true,
    };
    (oriented && residual <= tol, residual)
}

pub fn run_check_group(args: &CheckGroupArgs) -> Result<GroupReport> {
    let rows = read_states(open_input(&args.input)?, &source_name(&args.input))?;
    let order = match (args.order, rows.first()) {
        (Some(m), _) => m,
        (None, Some(r)) => r.matrix.order(),
        (None, None) => return Err(CliError::Input("no matrices to check".into())),
    };
    let spec = AlgebraSpec::new(args.algebra, order)?;
    let mut report = GroupReport {
        algebra: spec,
        rows: rows.len(),
        failures: 0,
        max_residual: 0.0,
        failing: Vec::new(),
        passed: true,
    };
    for r in &rows {
        if r.matrix.order() != order {
            return Err(CliError::Input(format!("matrix order {} does not match {spec}", r.matrix.order())));
        }
        let (ok, residual) = row_ok(&spec, &r.matrix, args.tol);
        report.max_residual = report.max_residual.max(residual);
        if !ok {
            report.failures += 1;
            if report.failing.len() < MAX_LISTED {
                report.failing.push(format!("{}:{}", r.id, r.step));
            }
        }
    }
    report.passed = report.failures == 0;
    Ok(report)
}

pub fn check_group(args: &CheckGroupArgs) -> Result<()> {
    let report = run_check_group(args)?;
    if args.json {
        print_json(&report)?;
    } else {
        println!(
            "{}: {} rows, {} failures, max relative residual {:.3e}",
            report.algebra, report.rows, report.failures, report.max_residual
        );
        for f in &report.failing {
            println!("fail {f}");
        }
        println!("{}", if report.passed { "PASS" } else { "FAIL" });
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Constraint(format!(
            "{} of {} matrices are outside {}",
            report.failures, report.rows, report.algebra
        )))
    }
}
