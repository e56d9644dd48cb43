mod common;

use common::*;
use wdvv_core::algebra::{int, Poly};
use wdvv_core::frobenius::structure_constants;
use wdvv_core::realization::*;

type Mat = Vec<Vec<f64>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `exp(k)` by scaling and squaring with a truncated Taylor series.
fn expm(k: &Mat) -> Mat {
    let n = k.len();
    let norm: f64 = k.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let s = (norm / 0.25).log2().ceil().max(0.0) as i32;
    let scale = 0.5f64.powi(s);
    let a: Mat = k.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut result: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut term = result.clone();
    for q in 1..=24 {
        term = mat_mul(&term, &a);
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x /= q as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        result = mat_mul(&result, &result);
    }
    result
}

/// For a cubic potential the frame equations along a straight segment have
/// constant coefficients. Each ambient coordinate evolves independently with
/// unknowns `(r, n, R_1..R_N, Nn_1..Nn_N)`.
fn oracle_frame(e: &EmbeddingProblem, d: &[f64]) -> Vec<Vec<f64>> {
    let n = e.n();
    let c = e.c().to_string().parse::<f64>().unwrap();
    let sc = structure_constants(e.potential());
    let at0 = |p: &Poly| p.to_float().eval(&vec![0.0; n]);
    // b[i][l] = Σ_j d_j c^l_ij
    let b: Mat = (0..n)
        .map(|i| (0..n).map(|l| (0..n).map(|j| d[j] * at0(sc.get(&[l, i, j]))).sum()).collect())
        .collect();
    let size = 2 + 2 * n;
    let mut k = vec![vec![0.0; size]; size];
    for i in 0..n {
        k[0][2 + i] = d[i];
        k[1][2 + n + i] = d[i];
        for l in 0..n {
            k[2 + i][2 + n + l] = c * b[i][l];
            k[2 + n + i][2 + l] = -b[i][l];
        }
    }
    let ex = expm(&k);
    let base = e.base();
    let m = 2 * n;
    (0..m)
        .map(|a| {
            let mut z = vec![base.r()[a], base.n()[a]];
            z.extend((0..n).map(|i| base.r_col(i)[a]));
            z.extend((0..n).map(|i| base.n_col(i)[a]));
            (0..size).map(|p| (0..size).map(|q| ex[p][q] * z[q]).sum()).collect()
        })
        .collect()
}

#[test]
fn rk4_matches_matrix_exponential() {
    let e = default_initial_frame(&potential("0"), &int(1), &[0.0; 3]).unwrap();
    let s = 1.0 / 3f64.sqrt();
    for d in [vec![s, s, s], vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]] {
        let frame = e.integrate_along_path(std::slice::from_ref(&d), 1e-3).unwrap().pop().unwrap();
        let oracle = oracle_frame(&e, &d);
        let n = 3;
        let mut worst = 0.0f64;
        for (a, z) in oracle.iter().enumerate() {
            worst = worst.max((frame.r()[a] - z[0]).abs()).max((frame.n()[a] - z[1]).abs());
            for i in 0..n {
                worst = worst.max((frame.r_col(i)[a] - z[2 + i]).abs());
                worst = worst.max((frame.n_col(i)[a] - z[2 + n + i]).abs());
            }
        }
        assert!(worst < 1e-8, "{d:?}: {worst:e}");
    }
}

#[test]
fn endpoint_is_path_independent_for_solutions() {
    let e = default_initial_frame(&potential(SOL1), &int(-1), &[0.0; 3]).unwrap();
    let target = vec![0.2, 0.3, 0.4];
    let straight = e.integrate_along_path(std::slice::from_ref(&target), 1e-3).unwrap().pop().unwrap();
    let axes = vec![vec![0.2, 0.0, 0.0], vec![0.2, 0.3, 0.0], target.clone()];
    let staircase = e.integrate_along_path(&axes, 1e-3).unwrap().pop().unwrap();
    let gap = straight.state.iter().zip(&staircase.state).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-9, "{gap:e}");
    assert!(e.gram_residuals(&straight).iter().all(|r| *r < 1e-10));
}

#[test]
fn loops_detect_wdvv_failure() {
    let good = default_initial_frame(&potential(SOL1), &int(1), &[0.0; 3]).unwrap();
    let bad = default_initial_frame(&potential("1/4*u2^2*u3^2 + 1/30*u3^5"), &int(1), &[0.0; 3]).unwrap();
    let lp = square_loop(&[0.0; 3], 1, 2, 0.1);
    let g = loop_closure_test(&good, &lp, 1e-3).unwrap();
    let b = loop_closure_test(&bad, &lp, 1e-3).unwrap();
    assert!(g < 1e-7, "{g:e}");
    assert!(b > 100.0 * g.max(1e-12), "{b:e}");
    assert!(loop_closure_test(&good, &lp[..3], 1e-3).is_err());
}

#[test]
fn small_grid_satisfies_fundamental_forms() {
    let e = default_initial_frame(&potential(SOL1), &int(1), &[0.0; 3]).unwrap();
    let grid = GridSpec { origin: vec![0.0; 3], spacing: 0.05, count: 2 };
    let sample = e.sample_grid(&grid, 1e-2).unwrap();
    assert_eq!(sample.frames.len(), 8);
    let report = verify_fundamental_forms(&e, &sample, 1e-6, 1e-4);
    assert!(report.passes(), "{:?}", report.worst);
}
