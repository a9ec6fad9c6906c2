use obstring_core::diagnostics::contact::{contact_mask_row, crossings, Side};
use obstring_core::diagnostics::{
    local_energy_residual, mollify, renormalized_residual, weak_momentum_residual, BumpTestFn, MollifierKernel,
    Renormalization,
};
use obstring_core::fd::penalty_force;
use obstring_core::galerkin::ModalBasis;
use obstring_core::{run, Grid1D, InitialData, Physics, RunOutput, SimConfig, TimeGrid};
use proptest::prelude::*;

const CELLS: usize = 40;

/// Node vector that is exactly mirror symmetric: the left half is built and reflected.
fn mirrored(half: &[f64]) -> Vec<f64> {
    let mut v = half.to_vec();
    v.extend(half.iter().rev().skip(1));
    v
}

/// Nonnegative symmetric displacement and symmetric velocity on `CELLS + 1` nodes.
fn symmetric_data() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-0.5f64..1.5, CELLS / 2 + 1),
        prop::collection::vec(-20.0f64..5.0, CELLS / 2 + 1),
    )
        .prop_map(|(e, v)| {
            let eta: Vec<f64> = e.into_iter().map(|x| x.max(0.0)).collect();
            (mirrored(&eta), mirrored(&v))
        })
}

fn run_tabulated(eta0: Vec<f64>, v0: Vec<f64>, alpha: f64, eps: f64) -> (SimConfig, RunOutput) {
    let cfg = SimConfig::new(
        Grid1D::new(1.0, CELLS).unwrap(),
        TimeGrid::new(0.2, 40).unwrap(),
        Physics::new(alpha, eps).unwrap(),
        InitialData::Tabulated { eta0, v0 },
        Some(1),
    )
    .unwrap();
    let out = run(&cfg).unwrap();
    (cfg, out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_data_stays_symmetric((eta0, v0) in symmetric_data(), alpha in 0.0f64..0.5, eps in 1e-3f64..1e-1) {
        let (_, out) = run_tabulated(eta0, v0, alpha, eps);
        let eta = out.series.eta();
        let scale = eta.data().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for row in eta.iter_rows() {
            for j in 0..=CELLS {
                prop_assert!((row[j] - row[CELLS - j]).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn ledger_balances_with_numerical_dissipation((eta0, v0) in symmetric_data(), alpha in 0.0f64..0.5, eps in 1e-3f64..1e-1) {
        let (_, out) = run_tabulated(eta0, v0, alpha, eps);
        let ledger = &out.ledger;
        prop_assert!(ledger.balance_defect() <= 1e-9 * ledger.reference_energy().max(1.0));
        for row in &ledger.rows {
            prop_assert!(row.visc_dissip_cum >= 0.0);
            prop_assert!(row.num_dissip_cum >= 0.0);
        }
    }

    #[test]
    fn penalty_acts_only_on_downward_penetration((eta0, v0) in symmetric_data(), eps in 1e-3f64..1e-1) {
        let (_, out) = run_tabulated(eta0, v0, 0.05, eps);
        let s = &out.series;
        for r in 1..s.len() {
            for j in 0..=CELLS {
                let f = s.penalty().get(r, j);
                prop_assert!(f >= 0.0);
                if f > 0.0 {
                    prop_assert!(s.eta().get(r, j) < 0.0 && s.velocity().get(r, j) < 0.0);
                    prop_assert!(j > 0 && j < CELLS);
                }
            }
        }
    }

    #[test]
    fn boundary_values_are_pinned((eta0, v0) in symmetric_data()) {
        let (cfg, out) = run_tabulated(eta0.clone(), v0, 0.01, 0.01);
        prop_assert_eq!(out.series.eta().row(0), &eta0[..]);
        for row in out.series.eta().iter_rows() {
            prop_assert_eq!(row[0], cfg.boundary_left());
            prop_assert_eq!(row[CELLS], cfg.boundary_right());
        }
    }

    #[test]
    fn penalty_formula(eta in -1.0f64..1.0, prev in -1.0f64..1.0, dt in 1e-4f64..1e-1, eps in 1e-4f64..1.0) {
        let f = penalty_force(&[0.0, eta, 0.0], &[0.0, prev, 0.0], dt, eps)[1];
        let v = (eta - prev) / dt;
        let expected = if eta < 0.0 { (-v).max(0.0) / eps } else { 0.0 };
        prop_assert!((f - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn modal_projection_inverts_synthesis(coeffs in prop::collection::vec(-1.0f64..1.0, 1..16)) {
        let k = coeffs.len();
        let basis = ModalBasis::new(1.0, 4 * k + 3, k);
        let back = basis.project(&basis.synthesize(&coeffs));
        for (a, b) in back.iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn mask_edges_alternate(bits in prop::collection::vec(any::<bool>(), 3..60)) {
        let eta: Vec<f64> = bits.iter().map(|&b| if b { -0.1 } else { 0.5 }).collect();
        let mask = contact_mask_row(&eta, &vec![0.0; eta.len()]);
        prop_assert!(!mask[0] && !mask[mask.len() - 1]);
        let cs = crossings(&mask, 0.1);
        prop_assert_eq!(cs.len() % 2, 0);
        for (k, c) in cs.iter().enumerate() {
            prop_assert_eq!(c.side, if k % 2 == 0 { Side::Right } else { Side::Left });
        }
    }

    #[test]
    fn residuals_scale_with_the_test_function(c in 0.01f64..100.0, tc in 0.05f64..0.15, xc in 0.3f64..0.7) {
        let (eta0, v0) = {
            let g = Grid1D::new(1.0, CELLS).unwrap();
            let e: Vec<f64> = (0..=CELLS).map(|j| 0.3 + 0.2 * (3.0 * g.x(j)).sin() * g.x(j) * (1.0 - g.x(j))).collect();
            let v: Vec<f64> = (0..=CELLS).map(|j| -2.0 * (std::f64::consts::PI * g.x(j)).sin()).collect();
            (e, v)
        };
        let (_, out) = run_tabulated(eta0, v0, 0.05, 0.01);
        let phi = BumpTestFn::new(1.0, tc, 0.05, xc, 0.25);
        let psi = phi.scaled(c);
        let pairs = [
            (weak_momentum_residual(&out.series, &phi).unwrap(), weak_momentum_residual(&out.series, &psi).unwrap()),
            (local_energy_residual(&out.series, &phi).unwrap(), local_energy_residual(&out.series, &psi).unwrap()),
            (
                renormalized_residual(&out.series, &phi, Renormalization::Square).unwrap(),
                renormalized_residual(&out.series, &psi, Renormalization::Square).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            prop_assert!((b.value - c * a.value).abs() <= 1e-12 * c * a.scale);
            prop_assert!((b.scale - c * a.scale).abs() <= 1e-12 * c * a.scale);
        }
    }

    #[test]
    fn mollification_is_linear_and_keeps_constants(k in 2.0f64..5.0, a in -3.0f64..3.0, shift in -3.0f64..3.0) {
        let (eta0, v0) = (vec![1.0; CELLS + 1], vec![0.0; CELLS + 1]);
        let (_, out) = run_tabulated(eta0, v0, 0.0, 1.0);
        let s = &out.series;
        let kernel = MollifierKernel::new(k / CELLS as f64).unwrap();
        // the flat string at rest stays exactly at one
        let m = mollify(s, s.eta(), &kernel).unwrap();
        let rt = (kernel.omega / s.dt()).ceil() as usize;
        let rx = k.ceil() as usize;
        for r in rt..s.len() - rt {
            for j in rx..=CELLS - rx {
                prop_assert!((m.get(r, j) - 1.0).abs() <= 1e-13);
            }
        }
        let mut affine = s.eta().clone();
        for r in 0..affine.rows() {
            for j in 0..affine.cols() {
                affine.set(r, j, a * affine.get(r, j) + shift * (r + j) as f64);
            }
        }
        let mut ramp = s.eta().clone();
        for r in 0..ramp.rows() {
            for j in 0..ramp.cols() {
                ramp.set(r, j, (r + j) as f64);
            }
        }
        let lhs = mollify(s, &affine, &kernel).unwrap();
        let rr = mollify(s, &ramp, &kernel).unwrap();
        for r in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                let rhs = a * m.get(r, j) + shift * rr.get(r, j);
                prop_assert!((lhs.get(r, j) - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }
}
