mod common;

use common::{dense_from_bands, dense_solve, dominant_system, rel_err};
use obstring_core::trisolve::assemble_step_matrix;
use obstring_core::{thomas_solve, Grid1D, Physics, SolverError, TimeGrid, Tridiagonal};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn system_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..=16, any::<u64>()).prop_map(|(n, seed)| dominant_system(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn thomas_matches_dense_elimination((lower, diag, upper, rhs) in system_strategy()) {
        let dense = dense_solve(dense_from_bands(&lower, &diag, &upper), rhs.clone());
        let m = Tridiagonal::new(lower, diag, upper).unwrap();
        let x = thomas_solve(&m, &rhs).unwrap();
        prop_assert!(rel_err(&x, &dense) <= 1e-12);
    }

    #[test]
    fn solution_reproduces_rhs((lower, diag, upper, rhs) in system_strategy()) {
        let m = Tridiagonal::new(lower, diag, upper).unwrap();
        let x = thomas_solve(&m, &rhs).unwrap();
        prop_assert!(rel_err(&m.mul_vec(&x), &rhs) <= 1e-12);
    }

    #[test]
    fn factor_is_reusable((lower, diag, upper, rhs) in system_strategy(), c in -5.0f64..5.0) {
        let m = Tridiagonal::new(lower, diag, upper).unwrap();
        let f = m.factor().unwrap();
        let x = f.solve(&rhs).unwrap();
        let scaled: Vec<f64> = rhs.iter().map(|r| c * r).collect();
        let y = f.solve(&scaled).unwrap();
        let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
        prop_assert!(y.iter().zip(&cx).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs())));
    }

    #[test]
    fn step_matrix_is_symmetric_and_dominant(cells in 2usize..200, steps in 1usize..500, alpha in 0.0f64..2.0) {
        let g = Grid1D::new(1.0, cells).unwrap();
        let t = TimeGrid::new(0.3, steps).unwrap();
        let m = assemble_step_matrix(&g, &t, &Physics::new(alpha, 0.001).unwrap());
        prop_assert_eq!(m.len(), cells - 1);
        prop_assert_eq!(&m.lower, &m.upper);
        prop_assert!(m.dominance_ratio() > 1.0);
    }
}

#[test]
fn seeded_thousand_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b5);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let n = 1 + k % 16;
        let (lower, diag, upper, rhs) = dominant_system(&mut rng, n);
        let dense = dense_solve(dense_from_bands(&lower, &diag, &upper), rhs.clone());
        let x = thomas_solve(&Tridiagonal::new(lower, diag, upper).unwrap(), &rhs).unwrap();
        worst = worst.max(rel_err(&x, &dense));
    }
    assert!(worst <= 1e-12, "worst relative error {worst}");
}

#[test]
fn singular_system_reports_pivot() {
    let m = Tridiagonal::new(vec![1.0], vec![1.0, 1.0], vec![1.0]).unwrap();
    assert!(matches!(thomas_solve(&m, &[1.0, 2.0]), Err(SolverError::ZeroPivot { index: 1 })));
}

#[test]
fn mismatched_rhs_rejected() {
    let m = Tridiagonal::constant(3, -1.0, 4.0, -1.0);
    assert!(matches!(
        thomas_solve(&m, &[1.0]),
        Err(SolverError::Dimension { expected: 3, got: 1 })
    ));
}
