//! Trajectory analysis: conservation drift, the wave equation satisfied by
//! the transverse mass profile, and plane-wave frequency measurement.

use num_complex::Complex64;
use thiserror::Error;

use crate::diagonal::{to_diagonal, Branch, SymbolTable};
use crate::grid::wavenumbers;
use crate::integrate::Trajectory;

#[derive(Debug, Error, PartialEq)]
pub enum DiagnosticsError {
    #[error("need at least {need} records, trajectory has {got}")]
    TooFewRecords { need: usize, got: usize },
    #[error("records are not uniformly spaced in time")]
    NonUniformSpacing,
    #[error("mode amplitude {0:.3e} below 1e-12; nothing to fit")]
    ModeTooSmall(f64),
}

/// Scalar diagnostics at one instant.
#[derive(Debug, Clone)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub hamiltonian: f64,
    pub l2_u: f64,
    pub l2_v: f64,
    /// Transverse mass profile, one entry per y grid row.
    pub mass: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct DriftReport {
    pub drift: f64,
    /// False when `H(0)` vanished and the drift is absolute.
    pub relative: bool,
}

/// Maximum Hamiltonian drift over the trajectory, relative to `H(0)`.
pub fn hamiltonian_drift(traj: &Trajectory) -> Result<DriftReport, DiagnosticsError> {
    drift_of(traj.records.iter().map(|r| r.hamiltonian))
}

/// Drift of an arbitrary conserved-quantity history.
pub fn drift_of(values: impl IntoIterator<Item = f64>) -> Result<DriftReport, DiagnosticsError> {
    let vals: Vec<f64> = values.into_iter().collect();
    if vals.len() < 2 {
        return Err(DiagnosticsError::TooFewRecords {
            need: 2,
            got: vals.len(),
        });
    }
    let h0 = vals[0];
    let max_dev = vals
        .iter()
        .map(|h| (h - h0).abs())
        .fold(0.0f64, f64::max);
    if h0.abs() < 1e-300 {
        Ok(DriftReport {
            drift: max_dev,
            relative: false,
        })
    } else {
        Ok(DriftReport {
            drift: max_dev / h0.abs(),
            relative: true,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MassWaveReport {
    /// Max over interior times of `||m_tt - m_yy||_2 / ||m_yy||_2`, the
    /// ratio guarded to the absolute residual when the denominator is tiny.
    pub relative: f64,
    /// Max over interior times of `||m_tt - m_yy||_2`.
    pub absolute: f64,
}

/// Residual of `m_tt = m_yy` along a trajectory: `m_tt` by 4th-order
/// centered differences over five uniformly spaced records, `m_yy` spectral
/// in y, maximized over interior times.
pub fn mass_wave_residual(traj: &Trajectory) -> Result<MassWaveReport, DiagnosticsError> {
    let recs = &traj.records;
    if recs.len() < 5 {
        return Err(DiagnosticsError::TooFewRecords {
            need: 5,
            got: recs.len(),
        });
    }
    let dt = recs[1].t - recs[0].t;
    for w in recs.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs().max(1.0) {
            return Err(DiagnosticsError::NonUniformSpacing);
        }
    }

    let grid = traj.final_state().u.grid().clone();
    let ny = grid.ny();
    let mu = wavenumbers(ny, grid.ly());

    let mut worst_rel = 0.0f64;
    let mut worst_abs = 0.0f64;
    for i in 2..recs.len() - 2 {
        // m_tt: (-m[i-2] + 16 m[i-1] - 30 m[i] + 16 m[i+1] - m[i+2]) / (12 dt^2)
        let mut mtt = vec![0.0f64; ny];
        for q in 0..ny {
            mtt[q] = (-recs[i - 2].mass[q] + 16.0 * recs[i - 1].mass[q]
                - 30.0 * recs[i].mass[q]
                + 16.0 * recs[i + 1].mass[q]
                - recs[i + 2].mass[q])
                / (12.0 * dt * dt);
        }
        // m_yy spectrally: multiply the y transform by -mu^2
        let mut hat: Vec<Complex64> = recs[i].mass.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        grid.fft_y().process(&mut hat);
        for (k, c) in hat.iter_mut().enumerate() {
            *c *= Complex64::new(-mu[k] * mu[k] / ny as f64, 0.0);
        }
        grid.ifft_y().process(&mut hat);
        let myy: Vec<f64> = hat.iter().map(|c| c.re).collect();

        let res_sq: f64 = mtt
            .iter()
            .zip(&myy)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let norm_sq: f64 = myy.iter().map(|b| b * b).sum();
        let absolute = res_sq.sqrt();
        let relative = if norm_sq.sqrt() < 1e-14 {
            absolute
        } else {
            absolute / norm_sq.sqrt()
        };
        worst_rel = worst_rel.max(relative);
        worst_abs = worst_abs.max(absolute);
    }
    Ok(MassWaveReport {
        relative: worst_rel,
        absolute: worst_abs,
    })
}

/// Least-squares frequency of one diagonal mode along a trajectory.
///
/// Extracts `w_branch` at the signed mode `(j, k)` from every snapshot,
/// unwraps the phase by cumulative nearest-branch selection and fits its
/// slope; the frequency convention is `w ~ exp(-i omega t)`.
pub fn fit_plane_wave_frequency(
    traj: &Trajectory,
    mode: (i64, i64),
    branch: Branch,
) -> Result<f64, DiagnosticsError> {
    let grid = traj.final_state().u.grid().clone();
    let tab = SymbolTable::build(grid);
    let series: Vec<(f64, Complex64)> = traj
        .snapshots
        .iter()
        .map(|(t, s)| {
            let w = to_diagonal(s, &tab);
            let field = match branch {
                Branch::One => &w.w1,
                Branch::Two => &w.w2,
            };
            (*t, field.mode(mode.0, mode.1))
        })
        .collect();
    fit_frequency_series(&series)
}

/// Frequency fit of a complex time series `z ~ exp(-i omega t)`.
pub fn fit_frequency_series(series: &[(f64, Complex64)]) -> Result<f64, DiagnosticsError> {
    if series.len() < 2 {
        return Err(DiagnosticsError::TooFewRecords {
            need: 2,
            got: series.len(),
        });
    }
    let min_amp = series.iter().map(|(_, z)| z.norm()).fold(f64::MAX, f64::min);
    if min_amp < 1e-12 {
        return Err(DiagnosticsError::ModeTooSmall(min_amp));
    }

    // cumulative nearest-branch unwrapping
    let mut phases = Vec::with_capacity(series.len());
    let mut prev = series[0].1.arg();
    phases.push(prev);
    for (_, z) in &series[1..] {
        let raw = z.arg();
        let mut delta = raw - prev;
        while delta > std::f64::consts::PI {
            delta -= 2.0 * std::f64::consts::PI;
        }
        while delta < -std::f64::consts::PI {
            delta += 2.0 * std::f64::consts::PI;
        }
        prev += delta;
        phases.push(prev);
    }

    // least-squares slope of phase(t)
    let n = series.len() as f64;
    let mean_t = series.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_p = phases.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for ((t, _), p) in series.iter().zip(&phases) {
        num += (t - mean_t) * (p - mean_p);
        den += (t - mean_t) * (t - mean_t);
    }
    Ok(-num / den)
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in &logs {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}
