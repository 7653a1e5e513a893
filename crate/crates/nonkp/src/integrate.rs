//! Time stepping: the exact free propagator, integrating-factor RK4 on the
//! diagonal form, and classical RK4 on the physical form.
//!
//! The free linear evolution multiplies each branch mode by the unimodular
//! phase `exp(-i omega_i dt)`, so the integrating-factor (Lawson) scheme
//! needs no phi functions: the linear part is advanced exactly and only the
//! nonlinear forcing is integrated by RK4 in the interaction picture.

use num_complex::Complex64;
use thiserror::Error;

use crate::diagnostics::DiagnosticsRecord;
use crate::diagonal::{from_diagonal, nonlinear_rhs, to_diagonal, StateW, SymbolTable};
use crate::field::SpectralField;
use crate::model::{hamiltonian, mass_profile, rhs_physical, StateUV};

/// Sup-norm threshold beyond which a run is declared blown up.
pub const BLOWUP_SUP_NORM: f64 = 1e6;

#[derive(Debug, Error, PartialEq)]
pub enum IntegrationError {
    #[error("solution blew up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },
    #[error("initial data contains non-finite values")]
    BadInitialData,
    #[error("invalid run configuration: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Integrating-factor RK4 on the diagonal variables.
    DiagonalIfrk4,
    /// Classical RK4 on the physical variables; the cross-validation route.
    PhysicalRk4,
    /// Exact propagation of the linearized system.
    LinearExact,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::DiagonalIfrk4 => "diagonal-ifrk4",
            Scheme::PhysicalRk4 => "physical-rk4",
            Scheme::LinearExact => "linear-exact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    /// Record a snapshot every this many steps (>= 1); the initial and final
    /// states are always recorded.
    pub snapshot_stride: usize,
    /// Record diagnostics every this many steps (>= 1).
    pub diagnostics_stride: usize,
}

impl RunConfig {
    fn validate(&self) -> Result<(), IntegrationError> {
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(IntegrationError::BadConfig(format!(
                "t_end = {} must be finite and >= 0",
                self.t_end
            )));
        }
        if self.t_end > 0.0 && !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(IntegrationError::BadConfig(format!(
                "dt = {} must be finite and positive",
                self.dt
            )));
        }
        if self.snapshot_stride == 0 || self.diagnostics_stride == 0 {
            return Err(IntegrationError::BadConfig(
                "strides must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// CFL-like default step for nonlinear runs.
pub fn default_dt(grid: &crate::grid::Grid2D) -> f64 {
    0.25 * (grid.lx() / grid.nx() as f64).min(grid.ly() / grid.ny() as f64)
}

/// Exact free evolution by `dt` (negative allowed): mode-wise phase
/// `exp(-i omega_i dt)`.
pub fn free_propagate(w: &StateW, dt: f64, tab: &SymbolTable) -> StateW {
    let mut out = w.clone();
    apply_phases(&mut out, dt, tab);
    out.t = w.t + dt;
    out
}

fn apply_phases(w: &mut StateW, dt: f64, tab: &SymbolTable) {
    let n = tab.grid().len();
    for idx in 0..n {
        let p1 = Complex64::from_polar(1.0, -tab.omega1()[idx] * dt);
        let p2 = Complex64::from_polar(1.0, -tab.omega2()[idx] * dt);
        w.w1.coeffs_mut()[idx] *= p1;
        w.w2.coeffs_mut()[idx] *= p2;
    }
}

fn phased(w: &StateW, dt: f64, tab: &SymbolTable) -> StateW {
    let mut out = w.clone();
    apply_phases(&mut out, dt, tab);
    out
}

fn axpy(w: &StateW, a: f64, d: &(SpectralField, SpectralField)) -> StateW {
    let s = Complex64::new(a, 0.0);
    StateW::new(&w.w1 + &d.0.scale(s), &w.w2 + &d.1.scale(s), w.t)
}

/// One integrating-factor RK4 step of size `dt > 0` on the diagonal form.
pub fn step_ifrk4(w: &StateW, dt: f64, tab: &SymbolTable) -> StateW {
    let h = dt;
    let n1 = nonlinear_rhs(w, tab);
    let n2 = nonlinear_rhs(&phased(&axpy(w, 0.5 * h, &n1), 0.5 * h, tab), tab);
    let n3 = nonlinear_rhs(&axpy(&phased(w, 0.5 * h, tab), 0.5 * h, &n2), tab);
    let half_n3 = phased(&StateW::new(n3.0.clone(), n3.1.clone(), 0.0), 0.5 * h, tab);
    let n4 = nonlinear_rhs(
        &axpy(&phased(w, h, tab), h, &(half_n3.w1.clone(), half_n3.w2.clone())),
        tab,
    );

    // u_{n+1} = E(h) u_n + h/6 [E(h) n1 + 2 E(h/2) n2 + 2 E(h/2) n3 + n4]
    let e1_n1 = phased(&StateW::new(n1.0, n1.1, 0.0), h, tab);
    let eh_n2 = phased(&StateW::new(n2.0, n2.1, 0.0), 0.5 * h, tab);
    let eh_n3 = half_n3;

    let mut out = phased(w, h, tab);
    let c = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    out.w1 = &out.w1
        + &(&(&e1_n1.w1 + &eh_n2.w1.scale(two)) + &(&eh_n3.w1.scale(two) + &n4.0)).scale(c);
    out.w2 = &out.w2
        + &(&(&e1_n1.w2 + &eh_n2.w2.scale(two)) + &(&eh_n3.w2.scale(two) + &n4.1)).scale(c);
    out.t = w.t + dt;
    out
}

/// One classical RK4 step on the physical variables.
pub fn step_rk4_physical(s: &StateUV, dt: f64) -> StateUV {
    let add = |a: &StateUV, c: f64, d: &(SpectralField, SpectralField)| -> StateUV {
        let sc = Complex64::new(c, 0.0);
        StateUV::new(&a.u + &d.0.scale(sc), &a.v + &d.1.scale(sc), a.t)
    };
    let k1 = rhs_physical(s);
    let k2 = rhs_physical(&add(s, 0.5 * dt, &k1));
    let k3 = rhs_physical(&add(s, 0.5 * dt, &k2));
    let k4 = rhs_physical(&add(s, dt, &k3));
    let sixth = dt / 6.0;
    let mut out = add(s, sixth, &k1);
    out = add(&out, 2.0 * sixth, &k2);
    out = add(&out, 2.0 * sixth, &k3);
    out = add(&out, sixth, &k4);
    out.t = s.t + dt;
    out
}

/// Time series of states and diagnostics produced by [`run`].
#[derive(Debug)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, StateUV)>,
    pub records: Vec<DiagnosticsRecord>,
    pub scheme: Scheme,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateUV {
        &self.snapshots.last().expect("at least one snapshot").1
    }
}

fn record_diagnostics(records: &mut Vec<DiagnosticsRecord>, t: f64, s: &StateUV) {
    records.push(DiagnosticsRecord {
        t,
        hamiltonian: hamiltonian(s),
        l2_u: s.u.l2_norm(),
        l2_v: s.v.l2_norm(),
        mass: mass_profile(s),
    });
}

fn check_state(s: &StateUV, t: f64) -> Result<(), IntegrationError> {
    if !s.is_finite() {
        return Err(IntegrationError::BlowUp {
            t,
            detail: "non-finite coefficient".into(),
        });
    }
    let sup = s.u.to_physical().iter().map(|v| v.abs()).fold(0.0, f64::max);
    if sup > BLOWUP_SUP_NORM {
        return Err(IntegrationError::BlowUp {
            t,
            detail: format!("sup-norm {sup:.3e} exceeds {BLOWUP_SUP_NORM:.0e}"),
        });
    }
    Ok(())
}

/// Deterministic time integration with snapshots and diagnostics at the
/// configured strides. Identical inputs produce bitwise identical output.
pub fn run(cfg: &RunConfig, initial: &StateUV) -> Result<Trajectory, IntegrationError> {
    cfg.validate()?;
    if !initial.is_finite() {
        return Err(IntegrationError::BadInitialData);
    }

    let grid = initial.u.grid().clone();
    let tab = SymbolTable::build(grid);
    let n_steps = if cfg.t_end == 0.0 {
        0
    } else {
        (cfg.t_end / cfg.dt - 1e-9).ceil().max(1.0) as usize
    };

    let mut snapshots = Vec::new();
    let mut records = Vec::new();
    let mut state = initial.clone();
    state.t = 0.0;
    snapshots.push((0.0, state.clone()));
    record_diagnostics(&mut records, 0.0, &state);

    // diagonal schemes carry the state in w-space between records
    let mut w = match cfg.scheme {
        Scheme::PhysicalRk4 => None,
        _ => Some(to_diagonal(&state, &tab)),
    };

    for step in 1..=n_steps {
        let t0 = (step - 1) as f64 * cfg.dt;
        let t1 = (step as f64 * cfg.dt).min(cfg.t_end);
        let h = t1 - t0;
        match cfg.scheme {
            Scheme::DiagonalIfrk4 => {
                let next = step_ifrk4(w.as_ref().unwrap(), h, &tab);
                state = from_diagonal(&next, &tab);
                w = Some(next);
            }
            Scheme::LinearExact => {
                let next = free_propagate(w.as_ref().unwrap(), h, &tab);
                state = from_diagonal(&next, &tab);
                w = Some(next);
            }
            Scheme::PhysicalRk4 => {
                state = step_rk4_physical(&state, h);
            }
        }
        state.t = t1;
        check_state(&state, t1)?;

        let last = step == n_steps;
        if last || step % cfg.snapshot_stride == 0 {
            snapshots.push((t1, state.clone()));
        }
        if last || step % cfg.diagnostics_stride == 0 {
            record_diagnostics(&mut records, t1, &state);
        }
    }

    Ok(Trajectory {
        snapshots,
        records,
        scheme: cfg.scheme,
    })
}
