mod common;

use common::*;
use pathdev::liealg::{apply_se2, random_init, se2_element, AlgebraSpec, DevWeights, Family, WeightsFile};
use pathdev::matexp::{mat_exp, SquareMatrix};
use proptest::prelude::*;

fn specs() -> Vec<AlgebraSpec> {
    let mut out = Vec::new();
    for m in 1..=6 {
        out.push(AlgebraSpec::new(Family::Gl, m).unwrap());
        out.push(AlgebraSpec::new(Family::So, m).unwrap());
        if m >= 2 {
            out.push(AlgebraSpec::new(Family::Lorentz, m).unwrap());
        }
        if m % 2 == 0 {
            out.push(AlgebraSpec::new(Family::Sp, m).unwrap());
        }
    }
    out.push(AlgebraSpec::se2());
    out
}

fn spec_strategy() -> impl Strategy<Value = AlgebraSpec> {
    prop::sample::select(specs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_is_idempotent(spec in spec_strategy(), seed in any::<u64>()) {
        let a = gaussian_matrix(spec.order(), 1.0, &mut rng(seed));
        let p = spec.project(&a).unwrap();
        let pp = spec.project(&p).unwrap();
        prop_assert!((&p - &pp).frobenius_norm() < 1e-14 * (1.0 + p.frobenius_norm()));
        prop_assert!(spec.in_algebra(&p, 1e-12));
    }

    #[test]
    fn projection_residual_is_orthogonal(spec in spec_strategy(), seed in any::<u64>()) {
        let a = gaussian_matrix(spec.order(), 1.0, &mut rng(seed));
        let residual = &a - &spec.project(&a).unwrap();
        for b in spec.basis() {
            prop_assert!(residual.inner(&b).abs() < 1e-13);
        }
    }

    #[test]
    fn exp_maps_algebra_into_group(spec in spec_strategy(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_algebra_element(&spec, 0.7, &mut r);
        let z = mat_exp(&a).unwrap();
        prop_assert!(spec.in_group(&z, 1e-10), "{} residual {}", spec, spec.group_residual(&z));
    }

    #[test]
    fn se2_action_is_rigid(angle in -6.0f64..6.0, tx in -3.0f64..3.0, ty in -3.0f64..3.0,
                           p in prop::array::uniform2(-3.0f64..3.0), q in prop::array::uniform2(-3.0f64..3.0)) {
        let t = se2_element(angle, tx, ty);
        let (tp, tq) = (apply_se2(&t, p).unwrap(), apply_se2(&t, q).unwrap());
        let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        prop_assert!((dist(tp, tq) - dist(p, q)).abs() < 1e-12);
    }
}

#[test]
fn basis_is_orthonormal_with_expected_dimension() {
    for spec in specs() {
        let basis = spec.basis();
        assert_eq!(basis.len(), spec.dimension(), "{spec}");
        for (i, a) in basis.iter().enumerate() {
            assert!(spec.in_algebra(a, 1e-14), "{spec}");
            for (j, b) in basis.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - expected).abs() < 1e-13, "{spec}");
            }
        }
    }
}

#[test]
fn sp_projection_beats_sampled_competitors() {
    // Nearest-point oracle: no algebra element found by random search is
    // closer to B than its projection.
    let spec = AlgebraSpec::new(Family::Sp, 4).unwrap();
    let mut r = rng(5);
    for _ in 0..1000 {
        let b = gaussian_matrix(4, 1.0, &mut r);
        let p = spec.project(&b).unwrap();
        let best = (&b - &p).frobenius_norm();
        for scale in [1e-3, 1e-1, 1.0] {
            let c = &p + &random_algebra_element(&spec, scale, &mut r);
            assert!((&b - &c).frobenius_norm() >= best - 1e-12);
        }
    }
}

#[test]
fn lorentz_projection_matches_constraint_solution() {
    // so(m−1,1): spatial block skew, mixed row/column symmetric, corner zero.
    let spec = AlgebraSpec::new(Family::Lorentz, 4).unwrap();
    let a = gaussian_matrix(4, 1.0, &mut rng(9));
    let p = spec.project(&a).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let spatial = i < 3 && j < 3;
            let mixed = (i == 3) != (j == 3);
            let expected = if spatial {
                0.5 * (a[(i, j)] - a[(j, i)])
            } else if mixed {
                0.5 * (a[(i, j)] + a[(j, i)])
            } else {
                0.0
            };
            assert!((p[(i, j)] - expected).abs() < 1e-15);
        }
    }
}

#[test]
fn init_standard_deviation_matches_target() {
    let (m, d) = (50, 40);
    let w = random_init(AlgebraSpec::new(Family::Gl, m).unwrap(), d, 1.0, 42).unwrap();
    let values: Vec<f64> = w.theta().iter().flat_map(|t| t.as_slice().iter().copied()).collect();
    assert_eq!(values.len(), 100_000);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    let target = 1.0 / ((m * d) as f64).sqrt();
    assert!((var.sqrt() / target - 1.0).abs() < 0.02, "std {} vs {}", var.sqrt(), target);
}

#[test]
fn random_init_lands_in_algebra_and_is_seeded() {
    for spec in specs() {
        let a = random_init(spec, 3, 1.0, 7).unwrap();
        let b = random_init(spec, 3, 1.0, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.theta().iter().all(|t| spec.in_algebra(t, 1e-12)));
    }
}

#[test]
fn weights_json_round_trip_is_exact() {
    for spec in specs() {
        let w = random_init(spec, 2, 1.3, 3).unwrap();
        let back = DevWeights::from_json(&w.to_json()).unwrap();
        assert_eq!(w, back, "{spec}");
    }
}

#[test]
fn weights_file_rejects_violations() {
    let spec = AlgebraSpec::so(3).unwrap();
    let mut file = random_init(spec, 1, 1.0, 0).unwrap().to_file();
    file.theta[0][0][0] = 0.5;
    let text = serde_json::to_string(&file).unwrap();
    assert!(DevWeights::from_json(&text).is_err());

    let unknown = r#"{"family":"SO","order":2,"dim_in":1,"theta":[[[0,1],[-1,0]]],"extra":1}"#;
    assert!(DevWeights::from_json(unknown).is_err());
    let ok = r#"{"family":"SO","order":2,"dim_in":1,"theta":[[[0,1],[-1,0]]]}"#;
    let parsed: WeightsFile = serde_json::from_str(ok).unwrap();
    assert!(parsed.into_weights().is_ok());
}

#[test]
fn se2_composition_is_matrix_product() {
    let a = se2_element(0.4, 1.0, -2.0);
    let b = se2_element(-1.1, 0.3, 0.7);
    let p = [0.25, -1.5];
    let direct = apply_se2(&(&a * &b), p).unwrap();
    let nested = apply_se2(&a, apply_se2(&b, p).unwrap()).unwrap();
    assert!((direct[0] - nested[0]).abs() < 1e-14 && (direct[1] - nested[1]).abs() < 1e-14);
    assert!(apply_se2(&SquareMatrix::identity(2), p).is_err());
}
