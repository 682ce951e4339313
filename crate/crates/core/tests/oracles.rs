//! Fast paths checked against independent slow computations and frozen
//! hand-derived values.

mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::DMatrix;
use rand::Rng;
use siginv::bounds::{
    compare_recovery, insertion_residual, residual_bound, theorem_bound, TheoremBoundInput,
};
use siginv::development::{
    base_point, develop, geodesic_turning_angles, hyperbolic_distance, segment_transport,
};
use siginv::insertion::{
    adjoint_contract, insertion_apply, insertion_chen_split, solve_slope, DEFAULT_EPS_NORM,
};
use siginv::tensor::MultiIndex;
use siginv::{
    batch_invert, chen_concat, constant_speed_reparam, invert_signature, linear_signature,
    path_signature, riemann_oracle, PiecewiseLinearPath, TensorLevel,
};

#[test]
fn tensor_product_matches_triple_loop() {
    let mut rng = rng(10);
    let a = random_level(&mut rng, 2, 2);
    let b = random_level(&mut rng, 2, 1);
    let ab = a.tensor(&b).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let want = a.get(&MultiIndex(vec![i, j])) * b.get(&MultiIndex(vec![k]));
                assert_eq!(ab.get(&MultiIndex(vec![i, j, k])), want);
            }
        }
    }
}

#[test]
fn graded_scale_matches_scaled_path() {
    let mut rng = rng(11);
    let path = random_path(&mut rng, 2, 3);
    let alpha = 1.7;
    let direct = path_signature(&path.scaled(alpha), 5).unwrap();
    let graded = path_signature(&path, 5).unwrap().graded_scale(alpha);
    assert!(direct.max_abs_diff(&graded).unwrap() < 1e-10);
}

#[test]
fn two_segments_match_oracle() {
    let mut rng = rng(12);
    for _ in 0..5 {
        let path = random_path(&mut rng, 2, 2);
        let incs: Vec<Vec<f64>> = path.increments().collect();
        let a = linear_signature(&incs[0], 1.0, 4).unwrap();
        let b = linear_signature(&incs[1], 1.0, 4).unwrap();
        let chen = chen_concat(&a, &b).unwrap();
        let oracle = riemann_oracle(&path, 4, 800).unwrap();
        for k in 1..=4 {
            let err = chen.level(k).sub(oracle.level(k)).unwrap().norm();
            assert!(err <= 5e-2 * chen.level(k).norm(), "level {k}: {err}");
        }
    }
}

#[test]
fn oracle_error_shrinks_with_steps() {
    let path =
        PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let exact = path_signature(&path, 3).unwrap();
    let coarse = riemann_oracle(&path, 3, 100).unwrap();
    let fine = riemann_oracle(&path, 3, 1000).unwrap();
    let e_coarse = exact.max_abs_diff(&coarse).unwrap();
    let e_fine = exact.max_abs_diff(&fine).unwrap();
    assert!(e_fine < e_coarse / 5.0);
    let area = (fine.level(2).coeffs()[1] - fine.level(2).coeffs()[2]) / 2.0;
    assert!((area - 0.5).abs() < 1e-2);
}

#[test]
fn level_one_is_displacement() {
    let mut rng = rng(13);
    let path = random_path(&mut rng, 3, 5);
    let sig = path_signature(&path, 3).unwrap();
    let disp: Vec<f64> = path
        .end()
        .iter()
        .zip(path.start())
        .map(|(a, b)| a - b)
        .collect();
    assert!(max_abs(sig.level(1).coeffs(), &disp) < 1e-14);
}

/// Scaling-and-squaring Taylor exponential.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().max() * a.nrows() as f64;
    let s = norm.max(1.0).log2().ceil() as i32 + 4;
    let scaled = a / 2f64.powi(s);
    let n = a.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[test]
fn transport_matches_generic_exponential() {
    let mut rng = rng(14);
    for _ in 0..10 {
        let v = random_vec(&mut rng, 3, 1.5);
        let t = segment_transport(&v);
        let e = expm(&siginv::development::f_map(&v));
        assert!((t.matrix() - e).abs().max() < 1e-10);
    }
}

#[test]
fn split_identity() {
    let line = PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![0.7, -0.3]]).unwrap();
    let two =
        PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 2.0]]).unwrap();
    let mut rng = rng(15);
    let three = random_path(&mut rng, 2, 3);
    let cases = [
        (&line, 0.37, 1e-12),
        (&two, 0.5, 1e-12),
        (&three, rng.random_range(0.1..0.9), 1e-11),
    ];
    for (path, v, tol) in cases {
        let n = 3;
        let sig = path_signature(path, n).unwrap();
        let y = random_vec(&mut rng, 2, 1.0);
        for p in 1..=n + 1 {
            let full = insertion_apply(sig.level(n), &y, p).unwrap();
            let split = insertion_chen_split(path, n, p, &y, v).unwrap();
            assert!(full.max_abs_diff(&split).unwrap() < tol, "p = {p}, v = {v}");
        }
    }
}

#[test]
fn slope_is_a_local_minimum() {
    let mut rng = rng(16);
    for _ in 0..10 {
        let n = rng.random_range(2..5);
        let a = random_level(&mut rng, 2, n);
        let b = random_level(&mut rng, 2, n + 1);
        let p = rng.random_range(1..=n + 1);
        let y = solve_slope(&a, &b, p, DEFAULT_EPS_NORM).unwrap();
        let target = b.scaled((n + 1) as f64);
        let residual = |y: &[f64]| {
            insertion_apply(&a, y, p)
                .unwrap()
                .sub(&target)
                .unwrap()
                .norm()
        };
        let best = residual(&y);
        for j in 0..2 {
            for s in [-1e-3, 1e-3] {
                let mut z = y.clone();
                z[j] += s;
                assert!(residual(&z) >= best);
            }
        }
    }
}

#[test]
fn one_dimensional_slope() {
    let a = TensorLevel::new(1, 2, vec![0.5]).unwrap();
    let b = TensorLevel::new(1, 3, vec![1.0 / 6.0]).unwrap();
    assert!((adjoint_contract(&a, &b, 2).unwrap()[0] - 1.0 / 12.0).abs() < 1e-15);
    assert!((solve_slope(&a, &b, 2, DEFAULT_EPS_NORM).unwrap()[0] - 1.0).abs() < 1e-14);
}

#[test]
fn batch_matches_sequential_loop() {
    let mut rng = rng(17);
    let sigs: Vec<_> = (0..50)
        .map(|_| path_signature(&random_path(&mut rng, 2, 10), 10).unwrap())
        .collect();
    let starts = vec![vec![0.0, 0.0]; 50];
    let batch = batch_invert(&sigs, &starts).unwrap();
    for (sig, got) in sigs.iter().zip(batch) {
        let want = invert_signature(sig, &[0.0, 0.0]).unwrap();
        assert_eq!(got.unwrap(), want);
    }
    let dup = batch_invert(
        &[sigs[0].clone(), sigs[0].clone(), sigs[0].clone()],
        &starts[..3],
    )
    .unwrap();
    assert_eq!(dup[0], dup[1]);
    assert_eq!(dup[1], dup[2]);
}

#[test]
fn start_point_translates_output() {
    let mut rng = rng(18);
    let sig = path_signature(&random_path(&mut rng, 2, 3), 6).unwrap();
    let at_zero = invert_signature(&sig, &[0.0, 0.0]).unwrap();
    let moved = invert_signature(&sig, &[7.0, -3.0]).unwrap();
    assert_eq!(moved.start_point, vec![7.0, -3.0]);
    for (a, b) in at_zero.path.points().iter().zip(moved.path.points()) {
        assert!((b[0] - a[0] - 7.0).abs() < 1e-12 && (b[1] - a[1] + 3.0).abs() < 1e-12);
    }
}

#[test]
fn two_segment_reconstruction_improves_with_depth() {
    let path = constant_speed_reparam(
        &PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.3, 0.8]]).unwrap(),
    )
    .unwrap();
    let rows = siginv::pipeline::roundtrip_errors(&path, &[5, 10, 20]).unwrap();
    assert!(
        rows[0].mean > rows[1].mean && rows[1].mean > rows[2].mean,
        "{rows:?}"
    );
}

#[test]
fn graded_scale_scales_slopes() {
    let mut rng = rng(19);
    let sig = path_signature(&random_path(&mut rng, 2, 3), 7).unwrap();
    let alpha = 2.5;
    let base = invert_signature(&sig, &[0.0, 0.0]).unwrap();
    let scaled = invert_signature(&sig.graded_scale(alpha), &[0.0, 0.0]).unwrap();
    for (a, b) in base.slopes.iter().zip(&scaled.slopes) {
        for (x, y) in a.iter().zip(b) {
            assert!((alpha * x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn theorem_bound_right_angle_value() {
    let b = theorem_bound(&TheoremBoundInput {
        times: vec![0.0, 0.5, 1.0],
        segment: 1,
        ell: 1.0,
        omega: PI / 2.0,
        depth: 16,
        k_n: Some(16),
    })
    .unwrap();
    assert!((b.value - 91.71229763323517).abs() < 1e-10);
    assert!(!b.precondition_met);
}

#[test]
fn insertion_residuals_within_bound() {
    let two = constant_speed_reparam(
        &PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![0.5, 0.5]]).unwrap(),
    )
    .unwrap();
    for seg in 1..=2 {
        let (res, _) = insertion_residual(&two, 12, seg).unwrap();
        assert!(res <= residual_bound(1.0, 0.5, 12));
    }

    let mut rng = rng(20);
    for _ in 0..10 {
        let lengths = [
            rng.random_range(1.0..1.5),
            rng.random_range(1.0..1.5),
            rng.random_range(1.0..1.5),
        ];
        let total: f64 = lengths.iter().sum();
        let lengths = lengths.map(|l| l / total);
        let turns = [rng.random_range(0.5..2.5), -rng.random_range(0.5..2.5)];
        let path = constant_speed_reparam(&turning_path(&lengths, &turns, 0.3)).unwrap();
        let times = path.times().to_vec();
        for seg in 1..=3 {
            let delta = times[seg] - times[seg - 1];
            for n in (2.0 / delta).ceil() as usize..=14 {
                let (res, _) = insertion_residual(&path, n, seg).unwrap();
                assert!(res <= residual_bound(1.0, delta, n), "n = {n}");
            }
        }
    }
}

#[test]
fn residual_bound_decreasing() {
    for delta in [0.25, 0.4, 0.5, 0.75, 1.0] {
        let start = (2.0f64 / delta).ceil() as usize;
        let values: Vec<f64> = (start..start + 30)
            .map(|n| residual_bound(1.0, delta, n))
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}

#[test]
fn recovery_errors_shrink() {
    let right =
        PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    // The floor in p makes single steps jitter; the trend must go down.
    let rows = compare_recovery(&right, &[8, 12, 16]).unwrap();
    for seg in 1..=2 {
        let errs: Vec<f64> = rows
            .iter()
            .filter(|r| r.segment == seg)
            .map(|r| r.measured)
            .collect();
        assert!(errs[2] < errs[0], "segment {seg}: {errs:?}");
    }

    let scan: Vec<usize> = (8..=20).collect();
    let rows = compare_recovery(&right, &scan).unwrap();
    for seg in 1..=2 {
        let errs: Vec<f64> = rows
            .iter()
            .filter(|r| r.segment == seg)
            .map(|r| r.measured)
            .collect();
        assert!(errs.last().unwrap() < errs.first().unwrap());
        let xs: Vec<f64> = (8..=20).map(|n| n as f64).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = errs.iter().sum::<f64>() / errs.len() as f64;
        let cov: f64 = xs.iter().zip(&errs).map(|(x, y)| (x - mx) * (y - my)).sum();
        assert!(cov < 0.0);
    }

    let line = PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![2.0, 1.0]]).unwrap();
    for r in compare_recovery(&line, &[3, 6]).unwrap() {
        assert!(r.measured < 1e-10);
        assert!(r.bound >= 0.0);
    }
}

#[test]
fn single_segment_development_is_geodesic() {
    let mut rng = rng(21);
    for dim in 1..=4 {
        let v = random_vec(&mut rng, dim, 2.0);
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let g = develop(&PiecewiseLinearPath::new(vec![vec![0.0; dim], v]).unwrap());
        let d = hyperbolic_distance(&base_point(dim), &g.developed_point());
        assert!((d - len).abs() < 1e-9);
    }
}

#[test]
fn right_angle_preserved_by_development() {
    let path =
        PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
    let angles = geodesic_turning_angles(&path);
    assert_eq!(angles.len(), 1);
    assert!((angles[0] - PI / 2.0).abs() < 1e-9);

    let skew =
        PiecewiseLinearPath::new(vec![vec![0.0, 0.0], vec![0.4, 0.1], vec![0.2, 0.9]]).unwrap();
    let euclid = siginv::segment_geometry(&skew).unwrap().angles[0];
    assert!((geodesic_turning_angles(&skew)[0] - euclid).abs() < 1e-9);
}
