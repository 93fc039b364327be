use pathdev::devlayer::gradcheck::{check_case, GradCheckCase};
use pathdev::devlayer::OutputMode;
use pathdev::liealg::{AlgebraSpec, Family};
use serde::Serialize;

use super::print_json;
use crate::cli::GradcheckArgs;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub algebra: AlgebraSpec,
    pub trials: usize,
    pub max_theta_rel_error: f64,
    pub max_input_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckReport {
    pub tolerance: f64,
    pub families: Vec<FamilyReport>,
    pub passed: bool,
}

fn default_order(family: Family) -> usize {
    match family {
        Family::Gl | Family::Lorentz | Family::Se2 => 3,
        Family::So | Family::Sp => 4,
    }
}

pub fn run_gradcheck(args: &GradcheckArgs) -> Result<GradcheckReport> {
    if args.dim == 0 || args.len == 0 {
        return Err(CliError::Input("--dim and --len must be positive".into()));
    }
    let specs = match args.algebra {
        Some(family) => vec![AlgebraSpec::new(family, args.order.unwrap_or(default_order(family)))?],
        None => Family::ALL
            .iter()
            .map(|&f| AlgebraSpec::new(f, default_order(f)))
            .collect::<pathdev::Result<_>>()?,
    };
    let mut families = Vec::new();
    if args.trials > 0 {
        for (fi, spec) in specs.into_iter().enumerate() {
            let mut report = FamilyReport {
                algebra: spec,
                trials: args.trials,
                max_theta_rel_error: 0.0,
                max_input_rel_error: 0.0,
            };
            for t in 0..args.trials {
                let mode = if t % 2 == 0 { OutputMode::Sequence } else { OutputMode::Last };
                let seed = args.seed ^ ((fi as u64) << 32) ^ t as u64;
                let case = GradCheckCase::random(spec, args.dim, args.len, mode, seed)?;
                let r = check_case(&case)?;
                report.max_theta_rel_error = report.max_theta_rel_error.max(r.theta_rel_error);
                report.max_input_rel_error = report.max_input_rel_error.max(r.input_rel_error);
            }
            families.push(report);
        }
    }
    let passed = families
        .iter()
        .all(|f| f.max_theta_rel_error <= args.tol && f.max_input_rel_error <= args.tol);
    Ok(GradcheckReport {
        tolerance: args.tol,
        families,
        passed,
    })
}

pub fn gradcheck(args: &GradcheckArgs) -> Result<()> {
    let report = run_gradcheck(args)?;
    if args.json {
        print_json(&report)?;
    } else {
        println!("{:<12} {:>6} {:>14} {:>14}", "algebra", "trials", "theta_rel_err", "input_rel_err");
        for f in &report.families {
            println!(
                "{:<12} {:>6} {:>14.3e} {:>14.3e}",
                f.algebra.to_string(),
                f.trials,
                f.max_theta_rel_error,
                f.max_input_rel_error
            );
        }
        println!("{}", if report.passed { "PASS" } else { "FAIL" });
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "gradient check exceeded relative error {}",
            args.tol
        )))
    }
}
