//! Cross-module behavior on full solver runs.

use std::f64::consts::TAU;
use std::sync::Arc;

use nonkp::diagnostics::{fit_plane_wave_frequency, log_log_slope, mass_wave_residual};
use nonkp::diagonal::{from_diagonal, omega_pair, Branch, StateW, SymbolTable};
use nonkp::field::SpectralField;
use nonkp::grid::Grid2D;
use nonkp::integrate::{run, RunConfig, Scheme};
use nonkp::model::StateUV;
use nonkp::Complex64;

fn grid(n: usize) -> Arc<Grid2D> {
    Grid2D::shared(n, n, TAU, TAU).unwrap()
}

/// Real state carrying one branch-1 wave at the given mode and amplitude.
fn branch_one_wave(g: &Arc<Grid2D>, tab: &SymbolTable, mode: (i64, i64), amp: f64) -> StateUV {
    let mut w = StateW::zeros(g.clone());
    w.w1.set_mode(mode.0, mode.1, Complex64::new(amp, 0.0));
    // reality: w1(-m) = conj(w2(m))
    w.w2.set_mode(-mode.0, -mode.1, Complex64::new(amp, 0.0));
    from_diagonal(&w, tab)
}

#[test]
fn nonlinear_frequency_shift_is_second_order_in_amplitude() {
    // a single branch-1 wave self-interacts through the quadratic term; the
    // measured frequency departs from the linear branch value at O(eps^2)
    let g = grid(16);
    let tab = SymbolTable::build(g.clone());
    let mode = (1i64, 1i64);
    let (omega_lin, _) = omega_pair(1.0, 1.0);

    let mut points = Vec::new();
    for eps in [0.01, 0.02, 0.04] {
        let initial = branch_one_wave(&g, &tab, mode, eps);
        let cfg = RunConfig {
            t_end: 200.0,
            dt: 0.05,
            scheme: Scheme::DiagonalIfrk4,
            snapshot_stride: 4,
            diagnostics_stride: 100_000,
        };
        let traj = run(&cfg, &initial).unwrap();
        let measured = fit_plane_wave_frequency(&traj, mode, Branch::One).unwrap();
        points.push((eps, (measured - omega_lin).abs()));
    }
    let slope = log_log_slope(&points);
    assert!(
        (slope - 2.0).abs() <= 0.3,
        "frequency-shift slope {slope:.3} (shifts {:?})",
        points
    );
}

#[test]
fn nonlinear_run_breaks_the_mass_wave_identity() {
    // sentinel: the m_tt = m_yy identity belongs to the linearized flow;
    // at finite amplitude the reported residual is far above the linear one
    let g = grid(32);
    let lx = g.lx();
    let shape = g.sample(|x, y| y.cos() * (1.0 + x.cos()) / lx);
    let state_of = |scale: f64| {
        let scaled: Vec<f64> = shape.iter().map(|v| scale * v).collect();
        StateUV::new(
            SpectralField::from_physical(g.clone(), &scaled).unwrap(),
            SpectralField::zeros(g.clone()),
            0.0,
        )
    };
    let cfg_linear = RunConfig {
        t_end: 1.0,
        dt: 0.05,
        scheme: Scheme::LinearExact,
        snapshot_stride: 100,
        diagnostics_stride: 1,
    };
    let linear = mass_wave_residual(&run(&cfg_linear, &state_of(0.4)).unwrap()).unwrap();
    let cfg_nonlinear = RunConfig {
        scheme: Scheme::DiagonalIfrk4,
        ..cfg_linear
    };
    let nonlinear = mass_wave_residual(&run(&cfg_nonlinear, &state_of(0.4)).unwrap()).unwrap();
    assert!(linear.relative < 1e-5, "linear {:.3e}", linear.relative);
    assert!(
        nonlinear.relative > 100.0 * linear.relative,
        "nonlinear {:.3e} vs linear {:.3e}",
        nonlinear.relative,
        linear.relative
    );
}

#[test]
fn snapshots_from_diagonal_runs_reconstruct_real_fields() {
    let g = grid(16);
    let s = nonkp::init::smooth_random_state(&g, 0.1, 4, 64);
    let cfg = RunConfig {
        t_end: 1.0,
        dt: 0.05,
        scheme: Scheme::DiagonalIfrk4,
        snapshot_stride: 4,
        diagnostics_stride: 5,
    };
    let traj = run(&cfg, &s).unwrap();
    for (_, snap) in &traj.snapshots {
        assert!(snap.u.hermitian_defect() < 1e-12);
        assert!(snap.v.hermitian_defect() < 1e-12);
    }
    // l2 histories recorded and finite
    for r in &traj.records {
        assert!(r.l2_u.is_finite() && r.l2_v.is_finite() && r.hamiltonian.is_finite());
    }
}
