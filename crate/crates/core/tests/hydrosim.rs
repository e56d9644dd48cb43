mod common;

use common::*;
use std::f64::consts::PI;
use wdvv_core::algebra::{int, PolyMatrix};
use wdvv_core::hamop::{affinors_from_psi, structural_flows, HydroFlow};
use wdvv_core::hierarchy::build_hierarchy;
use wdvv_core::hydrosim::*;
use wdvv_core::submanifold::reduce_potential;

const PHASES: [f64; 3] = [0.0, 1.0, 2.0];

fn sol1_flows() -> (Vec<HydroFlow>, Vec<wdvv_core::algebra::Poly>) {
    let s = reduce_potential(&potential(SOL1), &int(1)).unwrap();
    let levels = build_hierarchy(&s, 2).unwrap();
    let flows = structural_flows(&affinors_from_psi(&s));
    (flows, vec![levels[0].h.clone(), levels[1].h.clone()])
}

#[test]
fn hamiltonians_are_conserved_and_drift_shrinks() {
    let (flows, dens) = sol1_flows();
    let mut previous = f64::INFINITY;
    for (m, dt) in [(64, 4e-3), (128, 2e-3), (256, 1e-3)] {
        let grid = Grid1D::new(m, 2.0 * PI).unwrap();
        let init = FieldState::sine(&grid, 0.01, &PHASES, &[]);
        let traj = simulate_flow(&flows[1], &init, &grid, &SimConfig::new(dt, 0.1)).unwrap();
        let drift = conservation_report(&traj, &dens, &grid);
        assert!(drift.iter().all(|d| *d < 1e-4), "{drift:?}");
        assert!(drift[0] < previous);
        previous = drift[0];
    }
}

#[test]
fn translation_round_trip() {
    let grid = Grid1D::new(256, 2.0 * PI).unwrap();
    let init = FieldState::sine(&grid, 0.01, &PHASES, &[]);
    let flow = HydroFlow::new(PolyMatrix::identity(3, 3)).unwrap();
    let mut cfg = SimConfig::new(1e-2, 2.0 * PI);
    cfg.record_every = 1000;
    let end = simulate_flow(&flow, &init, &grid, &cfg).unwrap().pop().unwrap();
    assert!((end.time - 2.0 * PI).abs() < 1e-12);
    assert!(end.max_abs_diff(&init) < 1e-4);
}

#[test]
fn zero_flow_is_identity() {
    let grid = Grid1D::new(32, 1.0).unwrap();
    let init = FieldState::sine(&grid, 0.3, &[0.1, 0.2], &[1.0, -1.0]);
    let flow = HydroFlow::new(PolyMatrix::zeros(2, 2, 2)).unwrap();
    let traj = simulate_flow(&flow, &init, &grid, &SimConfig::new(0.01, 0.5)).unwrap();
    assert!(traj.iter().all(|s| s.values == init.values));
}

/// At fixed resolution the discrete flows commute only up to `O(dx⁴)`, so the
/// splitting defect is `δt²·O(dx⁴)`: order two in `δt`, vanishing as the
/// grid is refined.
#[test]
fn structural_flows_approximately_commute() {
    let (flows, _) = sol1_flows();
    let defect = |m: usize, tau: f64| {
        let grid = Grid1D::new(m, 2.0 * PI).unwrap();
        let init = FieldState::sine(&grid, 0.01, &PHASES, &[]);
        let cfg = SimConfig::new(tau / 8.0, tau);
        let run = |a: &HydroFlow, b: &HydroFlow| {
            let mut x = simulate_flow(a, &init, &grid, &cfg).unwrap().pop().unwrap();
            x.time = 0.0;
            simulate_flow(b, &x, &grid, &cfg).unwrap().pop().unwrap()
        };
        run(&flows[1], &flows[2]).max_abs_diff(&run(&flows[2], &flows[1]))
    };
    let order = (defect(64, 0.04) / defect(64, 0.02)).log2();
    assert!(order >= 1.9, "{order}");
    let refinement = defect(32, 0.04) / defect(64, 0.04);
    assert!(refinement >= 12.0, "{refinement}");
}

#[test]
fn blow_up_is_detected() {
    let grid = Grid1D::new(64, 2.0 * PI).unwrap();
    let init = FieldState::sine(&grid, 1.0, &[0.0], &[]);
    let burgers = HydroFlow::new(PolyMatrix::from_rows(vec![vec![wdvv_core::algebra::Poly::var(1, 0)]]).unwrap()).unwrap();
    let mut cfg = SimConfig::new(1e-2, 5.0);
    cfg.blowup_threshold = 1.5;
    assert!(matches!(simulate_flow(&burgers, &init, &grid, &cfg), Err(SimError::BlowUp { .. })));
}

#[test]
fn smoothing_damps_grid_scale_noise() {
    let grid = Grid1D::new(32, 1.0).unwrap();
    let mut init = FieldState::constant(&grid, &[0.0]);
    for (k, v) in init.values.iter_mut().enumerate() {
        v[0] = if k % 2 == 0 { 1.0 } else { -1.0 };
    }
    let flow = HydroFlow::new(PolyMatrix::zeros(1, 1, 1)).unwrap();
    let mut cfg = SimConfig::new(0.1, 0.1);
    cfg.smoothing = Some(0.5);
    let end = simulate_flow(&flow, &init, &grid, &cfg).unwrap().pop().unwrap();
    assert!((end.values[0][0] - 0.5).abs() < 1e-12);
}

#[test]
fn mismatched_state_is_rejected() {
    let grid = Grid1D::new(16, 1.0).unwrap();
    let flow = HydroFlow::new(PolyMatrix::identity(2, 2)).unwrap();
    let init = FieldState::constant(&grid, &[0.0; 3]);
    assert!(matches!(
        simulate_flow(&flow, &init, &grid, &SimConfig::new(0.1, 1.0)),
        Err(SimError::Dimension { expected: 2, got: 3 })
    ));
    assert!(matches!(
        simulate_flow(&flow, &FieldState::constant(&grid, &[0.0; 2]), &grid, &SimConfig::new(-1.0, 1.0)),
        Err(SimError::BadTime)
    ));
}
