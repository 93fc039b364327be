//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each, and exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use pathdev::devlayer::gradcheck::{check_case, GradCheckCase};
use pathdev::devlayer::{adjoint_trace, develop_forward, hyperbolic_develop, LossPartials, OutputMode};
use pathdev::liealg::{random_init, AlgebraSpec, DevWeights, Family};
use pathdev::matexp::{dexp_ad_series, dexp_block_oracle, mat_exp, SquareMatrix};
use pathdev::sigpath::{extend_functional, sig_dim, signature, TimeSeries};
use pathdev::train::{
    evaluate, gen_rigid_motion_dataset, gen_rotation_dataset, static_baseline_mse, train_loop, train_loop_with, Head,
    InputMode, Model, RigidMotionParams, Split, TrainConfig,
};
use rand::Rng;

type Outcome = (bool, String);

fn last_state(w: &DevWeights, x: &TimeSeries) -> SquareMatrix {
    develop_forward(w, x, OutputMode::Last).unwrap().last().clone()
}

fn gradient_certification() -> Outcome {
    let started = Instant::now();
    let mut r = rng(2024);
    let mut worst: f64 = 0.0;
    let mut modes = [0usize; 2];
    let configs = 60;
    for i in 0..configs {
        let family = Family::ALL[i % Family::ALL.len()];
        let order = match family {
            Family::Se2 => 3,
            Family::Sp => 2 * r.random_range(1..=3),
            _ => r.random_range(2..=6),
        };
        let spec = AlgebraSpec::new(family, order).unwrap();
        let dim = r.random_range(1..=4);
        let steps = r.random_range(1..=20);
        let mode = if (i / Family::ALL.len()).is_multiple_of(2) { OutputMode::Sequence } else { OutputMode::Last };
        modes[usize::from(mode == OutputMode::Last)] += 1;
        let case = GradCheckCase::random(spec, dim, steps, mode, r.random()).unwrap();
        let report = check_case(&case).unwrap();
        worst = worst.max(report.theta_rel_error).max(report.input_rel_error);
    }
    let secs = started.elapsed().as_secs_f64();
    (
        worst < 1e-5 && secs < 60.0 && modes.iter().all(|&c| c > 0),
        format!("{configs} configs (seq {}, last {}), max rel err {worst:.2e}, {secs:.1}s", modes[0], modes[1]),
    )
}

fn dexp_equivalence() -> Outcome {
    let mut r = rng(7);
    let (mut agree, mut fd_err): (f64, f64) = (0.0, 0.0);
    let h = 1e-5;
    for i in 0..100 {
        let m = 2 + i % 5;
        let a = matrix_with_norm(m, r.random_range(0.0..2.0), &mut r);
        let x = matrix_with_norm(m, 1.0, &mut r);
        let block = dexp_block_oracle(&a, &x).unwrap();
        let series = dexp_ad_series(&a, &x).unwrap();
        agree = agree.max((&block - &series).frobenius_norm());
        let fd = (&mat_exp(&(&a + &x.scaled(h))).unwrap() - &mat_exp(&(&a - &x.scaled(h))).unwrap()).scaled(0.5 / h);
        fd_err = fd_err.max(rel_diff(&block, &fd)).max(rel_diff(&series, &fd));
    }
    (
        agree < 1e-10 && fd_err < 1e-6,
        format!("100 pairs, route gap {agree:.2e}, max rel err vs differences {fd_err:.2e}"),
    )
}

/// Norm of `v ↦ Σ v_j θ_j` from Euclidean vectors to Frobenius matrices.
fn map_norm(theta: &[SquareMatrix]) -> f64 {
    let (a, b, c) = (theta[0].inner(&theta[0]), theta[0].inner(&theta[1]), theta[1].inner(&theta[1]));
    (0.5 * (a + c) + (0.25 * (a - c).powi(2) + b * b).sqrt()).sqrt()
}

fn signature_link() -> Outcome {
    let mut r = rng(31);
    let mut ok = true;
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20 {
        let family = [Family::Gl, Family::So, Family::Lorentz][i % 3];
        let x = random_walk(2, r.random_range(2..=8), 0.5, &mut r);
        let length = path_length(&x);
        let base = random_init(AlgebraSpec::new(family, 3).unwrap(), 2, 1.0, r.random()).unwrap();
        let target = r.random_range(0.3..1.5);
        let s = target / (map_norm(base.theta()) * length);
        let w = DevWeights::new(*base.spec(), base.theta().iter().map(|t| t.scaled(s)).collect()).unwrap();
        let c = map_norm(w.theta()) * length;
        let dev = last_state(&w, &x);
        let mut prev = f64::INFINITY;
        let mut factorial = 1.0;
        for k in 1..=6 {
            factorial *= (k + 1) as f64;
            let err = (&dev - &extend_functional(&w, &signature(&x, k).unwrap()).unwrap()).frobenius_norm();
            let bound = c.powi(k as i32 + 1) * c.exp() / factorial;
            ok &= err < prev && err <= bound;
            worst_ratio = worst_ratio.max(err / bound);
            prev = err;
        }
    }
    (ok, format!("20 paths, K=1..6 monotone, max error/bound {worst_ratio:.3}"))
}

fn group_drift() -> Outcome {
    let mut r = rng(5);
    let unit_steps = |n: usize, r: &mut rand_chacha::ChaCha8Rng| {
        let mut p = [0.0, 0.0];
        let mut values = p.to_vec();
        for _ in 0..n {
            let phi: f64 = r.random_range(0.0..std::f64::consts::TAU);
            p[0] += phi.cos();
            p[1] += phi.sin();
            values.extend_from_slice(&p);
        }
        TimeSeries::from_flat(2, values).unwrap()
    };
    let x = unit_steps(10_000, &mut r);
    let so = AlgebraSpec::so(5).unwrap();
    let w = random_init(so, 2, 1.0, 1).unwrap();
    let out = develop_forward(&w, &x, OutputMode::Sequence).unwrap();
    let so_drift = out.states().iter().map(|z| so.group_residual(z)).fold(0.0, f64::max);

    // Non-compact groups grow exponentially along a random walk, so their
    // residual is taken relative to ‖Z‖² over a shorter walk.
    let short = unit_steps(200, &mut r);
    let mut rel = Vec::new();
    for spec in [AlgebraSpec::new(Family::Sp, 4).unwrap(), AlgebraSpec::new(Family::Lorentz, 4).unwrap()] {
        let w = random_init(spec, 2, 1.0, 2).unwrap();
        let out = develop_forward(&w, &short, OutputMode::Sequence).unwrap();
        let worst = out
            .states()
            .iter()
            .map(|z| spec.group_residual(z) / z.frobenius_norm().powi(2))
            .fold(0.0, f64::max);
        rel.push(worst);
    }

    let w = random_init(AlgebraSpec::se2(), 2, 1.0, 3).unwrap();
    let out = develop_forward(&w, &x, OutputMode::Sequence).unwrap();
    let bottom_exact = out.states().iter().all(|z| z[(2, 0)] == 0.0 && z[(2, 1)] == 0.0 && z[(2, 2)] == 1.0);
    (
        so_drift < 1e-8 && rel.iter().all(|&v| v < 1e-8) && bottom_exact,
        format!(
            "SO(5) 1e4 steps drift {so_drift:.2e}; SP(4) rel {:.2e}; LORENTZ(4) rel {:.2e}; SE2 bottom row exact: {bottom_exact}",
            rel[0], rel[1]
        ),
    )
}

fn all_specs() -> [AlgebraSpec; 5] {
    [
        AlgebraSpec::new(Family::Gl, 3).unwrap(),
        AlgebraSpec::so(4).unwrap(),
        AlgebraSpec::se2(),
        AlgebraSpec::new(Family::Sp, 4).unwrap(),
        AlgebraSpec::new(Family::Lorentz, 3).unwrap(),
    ]
}

fn reparametrization() -> Outcome {
    let mut r = rng(6);
    let mut refined: f64 = 0.0;
    let mut duplicated_exact = true;
    for (i, spec) in all_specs().into_iter().cycle().take(50).enumerate() {
        let w = random_init(spec, 2, 1.0, i as u64).unwrap();
        let x = random_walk(2, 12, 0.4, &mut r);
        let base = last_state(&w, &x);
        let scale = base.frobenius_norm().max(1.0);
        refined = refined.max((&base - &last_state(&w, &refine(&x))).frobenius_norm() / scale);
        duplicated_exact &= base == last_state(&w, &duplicate(&x, 3));
    }
    (
        refined < 1e-12 && duplicated_exact,
        format!("midpoint refinement change {refined:.2e}; duplicated samples exact: {duplicated_exact}"),
    )
}

fn multiplicativity() -> Outcome {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    for (i, spec) in all_specs().into_iter().cycle().take(100).enumerate() {
        let w = random_init(spec, 2, 1.0, i as u64).unwrap();
        let x = random_walk(2, r.random_range(1..=10), 0.4, &mut r);
        let y = random_walk(2, r.random_range(1..=10), 0.4, &mut r);
        let joined = last_state(&w, &x.concat(&y).unwrap());
        let product = &last_state(&w, &x) * &last_state(&w, &y);
        worst = worst.max((&joined - &product).frobenius_norm() / product.frobenius_norm().max(1.0));
    }
    (worst < 1e-13, format!("100 pairs, max deviation {worst:.2e}"))
}

fn dimension_counts() -> Outcome {
    let sig = sig_dim(20, 3, false);
    let x = TimeSeries::new(20, &[vec![0.0; 20], (0..20).map(|i| i as f64 * 0.1).collect()]).unwrap();
    let flat = signature(&x, 3).unwrap().flatten(false).len();
    let model = Model::classifier(AlgebraSpec::so(30).unwrap(), 2, 2, InputMode::Raw, 1.0, 0).unwrap();
    let dev_features = match &model.head {
        Head::Linear { outputs, weight, .. } => weight.len() / outputs,
        Head::Se2Action => 0,
    };
    let small = sig_dim(2, 2, true);
    (
        sig == 8420 && flat == 8420 && dev_features == 900 && small == 7,
        format!("sig_dim(20,3) = {sig} (flattened {flat}), DEV m=30 features {dev_features}, sig_dim(2,2)+1 = {small}"),
    )
}

fn hyperbolic() -> Outcome {
    let mut r = rng(12);
    // The absolute residual of x1²+x2²-x3² is limited by cancellation to
    // about eps·x3², so paths are kept at moderate hyperbolic distance.
    let mut worst: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut height: f64 = 0.0;
    let mut above = true;
    for _ in 0..50 {
        let x = random_walk(2, r.random_range(1..=20), 0.2, &mut r);
        for p in hyperbolic_develop(&x).unwrap() {
            let residual = (p[0] * p[0] + p[1] * p[1] - p[2] * p[2] + 1.0).abs();
            worst = worst.max(residual);
            worst_rel = worst_rel.max(residual / (p[2] * p[2]));
            height = height.max(p[2]);
            above &= p[2] >= 1.0;
        }
    }
    let mut cosh_err: f64 = 0.0;
    for s in [0.0, 0.25, 0.5, 1.0, 2.0, 3.0] {
        let angle: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let x = TimeSeries::new(2, &[vec![0.0, 0.0], vec![s * angle.cos(), s * angle.sin()]]).unwrap();
        cosh_err = cosh_err.max((hyperbolic_develop(&x).unwrap()[1][2] - s.cosh()).abs());
    }
    (
        worst < 1e-9 && above && cosh_err < 1e-9,
        format!(
            "50 paths, max |x1²+x2²-x3²+1| {worst:.2e} (max x3 {height:.1}, relative {worst_rel:.1e}), \
             x3 >= 1: {above}, segment cosh err {cosh_err:.2e}"
        ),
    )
}

fn rotation_classification() -> Outcome {
    let mut accs = Vec::new();
    let mut slowest: f64 = 0.0;
    for seed in 0..5u64 {
        let started = Instant::now();
        let data = gen_rotation_dataset(700, 0.05, 1000 + seed).unwrap().assign_splits(500, 0);
        let model = Model::classifier(AlgebraSpec::so(4).unwrap(), 2, 2, InputMode::Raw, 1.0, seed).unwrap();
        let config = TrainConfig {
            epochs: 50,
            seed,
            ..Default::default()
        };
        let out = train_loop(&config, &data, model).unwrap();
        accs.push(evaluate(&out.best_model, &data.split(Split::Test)).unwrap());
        slowest = slowest.max(started.elapsed().as_secs_f64());
    }
    (
        accs.iter().all(|&a| a >= 0.97) && slowest < 120.0,
        format!("test accuracy per seed {accs:.3?}, slowest run {slowest:.1}s"),
    )
}

fn se2_regression() -> Outcome {
    let mut ratios = Vec::new();
    for seed in 0..5u64 {
        let data = gen_rigid_motion_dataset(600, 5, RigidMotionParams::default(), 2000 + seed)
            .unwrap()
            .assign_splits(400, 100);
        let model = Model::se2_predictor(2, InputMode::Raw, 1.0, seed).unwrap();
        let config = TrainConfig {
            learning_rate: 1e-2,
            epochs: 60,
            seed,
            ..Default::default()
        };
        let out = train_loop(&config, &data, model).unwrap();
        let test = data.split(Split::Test);
        ratios.push(static_baseline_mse(&test).unwrap() / evaluate(&out.best_model, &test).unwrap());
    }
    (
        ratios.iter().all(|&q| q >= 5.0),
        format!("static-baseline MSE / model MSE per seed {ratios:.1?}"),
    )
}

fn adjoint_norm() -> Outcome {
    let mut r = rng(13);
    let mut worst: f64 = 0.0;
    for m in 2..=8 {
        let w = random_init(AlgebraSpec::so(m).unwrap(), 2, 1.0, m as u64).unwrap();
        let x = random_walk(2, 100, 1.0, &mut r);
        let z = develop_forward(&w, &x, OutputMode::Last).unwrap();
        let g = gaussian_matrix(m, 1.0, &mut r);
        let adjoints = adjoint_trace(&w, &x, &z, &LossPartials::last_only(x.len(), g.clone()).unwrap()).unwrap();
        let reference = adjoints.last().unwrap().frobenius_norm();
        for a in &adjoints {
            worst = worst.max((a.frobenius_norm() - reference).abs());
        }
    }
    (worst < 1e-12, format!("SO(2..8), 100 steps, max norm deviation {worst:.2e}"))
}

fn determinism() -> Outcome {
    let data = gen_rotation_dataset(120, 0.05, 3).unwrap().assign_splits(80, 20);
    let run = |seed| {
        let model = Model::classifier(AlgebraSpec::so(4).unwrap(), 2, 2, InputMode::Raw, 1.0, seed).unwrap();
        let config = TrainConfig {
            epochs: 8,
            batch_size: 16,
            learning_rate: 1e-2,
            seed,
            ..Default::default()
        };
        let mut jsonl = String::new();
        train_loop_with(&config, &data, model, |rec| {
            jsonl.push_str(&rec.to_json_line());
            jsonl.push('\n');
        })
        .unwrap();
        jsonl
    };
    let (a, b, other) = (run(4), run(4), run(5));
    (
        a == b && a != other,
        format!("{} bytes identical across runs; different seed differs: {}", a.len(), a != other),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("gradient certification", gradient_certification),
        ("dexp dual-route equivalence", dexp_equivalence),
        ("signature-development link", signature_link),
        ("group drift", group_drift),
        ("reparametrization invariance", reparametrization),
        ("multiplicativity", multiplicativity),
        ("dimension counts", dimension_counts),
        ("hyperbolic development", hyperbolic),
        ("rotation classification", rotation_classification),
        ("SE(2) regression", se2_regression),
        ("SO adjoint norm preservation", adjoint_norm),
        ("training determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (pass, detail) = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        failures += usize::from(!pass);
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
