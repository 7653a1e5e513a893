//! Scenario implementations. Each one reads its parameters, runs the
//! computation, writes its artifacts, and returns a structured failure when
//! an asserted tolerance is missed.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use nonkp::bourgain::{
    psi_t_norm_sweep, sample_forcings, verify_duhamel_scaling, verify_free_estimate, TimeLattice,
};
use nonkp::diagnostics::{
    fit_frequency_series, hamiltonian_drift, log_log_slope, mass_wave_residual,
};
use nonkp::diagonal::{from_diagonal, omega_pair, to_diagonal, Branch, StateW, SymbolTable};
use nonkp::dirichlet_neumann::{exact_trace_oracle, g0_apply, DnExpansion, Field1D, Grid1D};
use nonkp::field::SpectralField;
use nonkp::grid::Grid2D;
use nonkp::init;
use nonkp::integrate::{default_dt, run, IntegrationError, RunConfig, Scheme, Trajectory};
use nonkp::model::StateUV;

use crate::config::{ConfigError, ConfigReader};
use crate::output::{fmt_f64, parallel_map, write_snapshot, CsvWriter, Failure};

pub struct Ctx {
    pub out: PathBuf,
    pub seed_override: Option<u64>,
    pub threads: usize,
    pub build: &'static str,
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Io(std::io::Error),
    Failed(Failure),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn fail(scenario: &str, reason: &str, t: Option<f64>, detail: impl Into<String>) -> RunError {
    RunError::Failed(Failure::new(scenario, reason, t, detail))
}

fn integration_failure(scenario: &str, e: IntegrationError) -> RunError {
    match e {
        IntegrationError::BlowUp { t, detail } => fail(scenario, "blow-up", Some(t), detail),
        IntegrationError::BadInitialData => {
            fail(scenario, "bad-initial-data", None, "non-finite initial data")
        }
        IntegrationError::BadConfig(msg) => RunError::Config(ConfigError(msg)),
    }
}

fn grid_from(reader: &ConfigReader, default_n: Option<usize>) -> Result<Arc<Grid2D>, RunError> {
    let (nx, ny) = match default_n {
        Some(n) => (
            reader.usize_or("grid.nx", n)?,
            reader.usize_or("grid.ny", n)?,
        ),
        None => (
            reader.required_usize("grid.nx")?,
            reader.required_usize("grid.ny")?,
        ),
    };
    let lx = reader.f64_or("grid.lx", TAU)?;
    let ly = reader.f64_or("grid.ly", TAU)?;
    Grid2D::shared(nx, ny, lx, ly).map_err(|e| RunError::Config(ConfigError(e.to_string())))
}

fn run_config_from(
    reader: &ConfigReader,
    grid: &Grid2D,
    default_t_end: f64,
    default_scheme: Scheme,
    default_strides: (usize, usize),
) -> Result<RunConfig, RunError> {
    let cfg = RunConfig {
        t_end: reader.f64_or("run.t_end", default_t_end)?,
        dt: reader.f64_or("run.dt", default_dt(grid))?,
        scheme: reader.scheme_or("run.scheme", default_scheme)?,
        snapshot_stride: reader.usize_or("run.snapshot_stride", default_strides.0)?,
        diagnostics_stride: reader.usize_or("run.diagnostics_stride", default_strides.1)?,
    };
    if cfg.dt <= 0.0 || !cfg.dt.is_finite() {
        return Err(RunError::Config(ConfigError(format!(
            "key `run.dt`: {} must be positive",
            cfg.dt
        ))));
    }
    Ok(cfg)
}

fn write_diagnostics_csv(dir: &Path, traj: &Trajectory) -> std::io::Result<()> {
    let mut csv = CsvWriter::create(
        &dir.join("diagnostics.csv"),
        &["t", "hamiltonian", "l2_u", "l2_v"],
    )?;
    for r in &traj.records {
        csv.row(&[
            fmt_f64(r.t),
            fmt_f64(r.hamiltonian),
            fmt_f64(r.l2_u),
            fmt_f64(r.l2_v),
        ])?;
    }
    csv.finish()?;

    let ny = traj.records.first().map_or(0, |r| r.mass.len());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..ny).map(|k| format!("m{k:03}")))
        .collect();
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut csv = CsvWriter::create(&dir.join("mass.csv"), &header_refs)?;
    for r in &traj.records {
        let mut row = vec![fmt_f64(r.t)];
        row.extend(r.mass.iter().map(|&v| fmt_f64(v)));
        csv.row(&row)?;
    }
    csv.finish()
}

pub fn simulate(reader: ConfigReader, ctx: &Ctx) -> Result<(), RunError> {
    let name = "simulate";
    let grid = grid_from(&reader, None)?;
    let cfg = run_config_from(&reader, &grid, 1.0, Scheme::DiagonalIfrk4, (10, 1))?;
    let amplitude = reader.f64_or("scenario.amplitude", 0.05)?;
    let max_mode = reader.usize_or("scenario.max_mode", 6)?;
    let seed = ctx
        .seed_override
        .unwrap_or(reader.u64_or("scenario.seed", 1)?);
    reader.finish()?;

    let initial = init::smooth_random_state(&grid, amplitude, max_mode, seed);
    let traj = run(&cfg, &initial).map_err(|e| integration_failure(name, e))?;

    let snap_dir = ctx.out.join("snapshots");
    std::fs::create_dir_all(&snap_dir)?;
    for (i, (t, s)) in traj.snapshots.iter().enumerate() {
        write_snapshot(&snap_dir, i, s, *t, cfg.scheme.name(), ctx.build)?;
    }
    write_diagnostics_csv(&ctx.out, &traj)?;
    println!(
        "simulate: {} snapshots, {} diagnostics records, final t = {}",
        traj.snapshots.len(),
        traj.records.len(),
        traj.snapshots.last().map(|(t, _)| *t).unwrap_or(0.0)
    );
    Ok(())
}

pub fn conservation(reader: ConfigReader, ctx: &Ctx) -> Result<(), RunError> {
    let name = "conservation";
    let grid = grid_from(&reader, Some(128))?;
    let cfg = run_config_from(&reader, &grid, 10.0, Scheme::DiagonalIfrk4, (100_000, 10))?;
    let amplitude = reader.f64_or("scenario.amplitude", 0.05)?;
    let max_mode = reader.usize_or("scenario.max_mode", 6)?;
    let tolerance = reader.f64_or("scenario.tolerance", 1e-6)?;
    let seed = ctx
        .seed_override
        .unwrap_or(reader.u64_or("scenario.seed", 12345)?);
    reader.finish()?;

    let initial = init::smooth_random_state(&grid, amplitude, max_mode, seed);
    let traj = run(&cfg, &initial).map_err(|e| integration_failure(name, e))?;
    let drift = hamiltonian_drift(&traj)
        .map_err(|e| fail(name, "diagnostics-error", None, e.to_string()))?;

    let mut csv = CsvWriter::create(&ctx.out.join("conservation.csv"), &["t", "hamiltonian"])?;
    for r in &traj.records {
        csv.row(&[fmt_f64(r.t), fmt_f64(r.hamiltonian)])?;
    }
    csv.finish()?;

    println!(
        "conservation: relative drift {:.3e} over t in [0, {}] (tolerance {:.1e})",
        drift.drift, cfg.t_end, tolerance
    );
    if !(drift.relative && drift.drift <= tolerance) {
        return Err(fail(
            name,
            "drift-exceeds-tolerance",
            Some(cfg.t_end),
            format!("relative drift {:.3e} > {:.1e}", drift.drift, tolerance),
        ));
    }
    Ok(())
}

pub fn dispersion_table(reader: ConfigReader, ctx: &Ctx) -> Result<(), RunError> {
    let name = "dispersion-table";
    let grid = grid_from(&reader, Some(64))?;
    let mode_range = reader.usize_or("scenario.mode_range", 10)? as i64;
    let t_end = reader.f64_or("run.t_end", 2.0)?;
    let dt = reader.f64_or("run.dt", 0.1)?;
    let tolerance = reader.f64_or("scenario.tolerance", 1e-10)?;
    reader.finish()?;

    let tab = SymbolTable::build(grid.clone());
    let mut w0 = StateW::zeros(grid.clone());
    for c in w0.w1.coeffs_mut().iter_mut() {
        *c = Complex64::ONE;
    }
    for c in w0.w2.coeffs_mut().iter_mut() {
        *c = Complex64::ONE;
    }
    let initial = from_diagonal(&w0, &tab);
    let cfg = RunConfig {
        t_end,
        dt,
        scheme: Scheme::LinearExact,
        snapshot_stride: 1,
        diagnostics_stride: usize::MAX / 2,
    };
    let traj = run(&cfg, &initial).map_err(|e| integration_failure(name, e))?;
    let diag: Vec<(f64, StateW)> = traj
        .snapshots
        .iter()
        .map(|(t, s)| (*t, to_diagonal(s, &tab)))
        .collect();

    let mut tasks = Vec::new();
    for k in -mode_range..=mode_range {
        for j in -mode_range..=mode_range {
            for branch in Branch::BOTH {
                tasks.push((j, k, branch));
            }
        }
    }
    let diag_ref = &diag;
    let rows = parallel_map(tasks, ctx.threads, move |(j, k, branch)| {
        let (xi, mu) = (
            TAU * j as f64 / diag_ref[0].1.w1.grid().lx(),
            TAU * k as f64 / diag_ref[0].1.w1.grid().ly(),
        );
        let (w1, w2) = omega_pair(xi, mu);
        let analytic = match branch {
            Branch::One => w1,
            Branch::Two => w2,
        };
        let series: Vec<(f64, Complex64)> = diag_ref
            .iter()
            .map(|(t, w)| {
                let f = match branch {
                    Branch::One => &w.w1,
                    Branch::Two => &w.w2,
                };
                (*t, f.mode(j, k))
            })
            .collect();
        let measured = fit_frequency_series(&series).expect("unit amplitude everywhere");
        (xi, mu, branch, analytic, measured)
    });

    let mut csv = CsvWriter::create(
        &ctx.out.join("dispersion.csv"),
        &["xi", "mu", "branch", "omega_analytic", "omega_measured", "abs_error"],
    )?;
    let mut worst = 0.0f64;
    for (xi, mu, branch, analytic, measured) in rows {
        let err = (measured - analytic).abs();
        worst = worst.max(err);
        csv.row(&[
            fmt_f64(xi),
            fmt_f64(mu),
            format!("{}", branch.index() + 1),
            fmt_f64(analytic),
            fmt_f64(measured),
            fmt_f64(err),
        ])?;
    }
    csv.finish()?;

    println!("dispersion-table: worst |measured - analytic| = {worst:.3e} (tolerance {tolerance:.1e})");
    if worst > tolerance {
        return Err(fail(
            name,
            "dispersion-error-exceeds-tolerance",
            None,
            format!("worst error {worst:.3e} > {tolerance:.1e}"),
        ));
    }
    Ok(())
}

pub fn mass_wave(reader: ConfigReader, ctx: &Ctx) -> Result<(), RunError> {
    let name = "mass-wave";
    let grid = grid_from(&reader, Some(32))?;
    let eps_list = reader.f64_list_or("scenario.eps", &[0.01, 0.02, 0.04])?;
    let linear_tolerance = reader.f64_or("scenario.linear_tolerance", 1e-4)?;
    let record_dt = reader.f64_or("run.dt", 0.05)?;
    reader.finish()?;

    let lx = grid.lx();
    let shape = grid.sample(|x, y| y.cos() * (1.0 + x.cos()) / lx);
    let make_state = |scale: f64| -> Result<StateUV, RunError> {
        let scaled: Vec<f64> = shape.iter().map(|v| scale * v).collect();
        Ok(StateUV::new(
            SpectralField::from_physical(grid.clone(), &scaled)
                .map_err(|e| fail(name, "internal", None, e.to_string()))?,
            SpectralField::zeros(grid.clone()),
            0.0,
        ))
    };

    let linear_cfg = RunConfig {
        t_end: 2.0,
        dt: record_dt,
        scheme: Scheme::LinearExact,
        snapshot_stride: 1000,
        diagnostics_stride: 1,
    };
    let linear_traj =
        run(&linear_cfg, &make_state(1.0)?).map_err(|e| integration_failure(name, e))?;
    let linear = mass_wave_residual(&linear_traj)
        .map_err(|e| fail(name, "diagnostics-error", None, e.to_string()))?;

    let mut csv = CsvWriter::create(
        &ctx.out.join("mass_wave.csv"),
        &["case", "eps", "relative_residual", "absolute_deviation"],
    )?;
    csv.row(&[
        "linearized".into(),
        fmt_f64(1.0),
        fmt_f64(linear.relative),
        fmt_f64(linear.absolute),
    ])?;

    let mut points = Vec::new();
    for &eps in &eps_list {
        let cfg = RunConfig {
            t_end: 1.0,
            dt: record_dt,
            scheme: Scheme::DiagonalIfrk4,
            snapshot_stride: 1000,
            diagnostics_stride: 1,
        };
        let traj = run(&cfg, &make_state(eps)?).map_err(|e| integration_failure(name, e))?;
        let res = mass_wave_residual(&traj)
            .map_err(|e| fail(name, "diagnostics-error", None, e.to_string()))?;
        csv.row(&[
            "nonlinear".into(),
            fmt_f64(eps),
            fmt_f64(res.relative),
            fmt_f64(res.absolute),
        ])?;
        points.push((eps, res.absolute));
    }
    csv.finish()?;

    let slope = log_log_slope(&points);
    println!(
        "mass-wave: linearized relative residual {:.3e} (tolerance {:.1e}), nonlinear deviation slope {:.3}",
        linear.relative, linear_tolerance, slope
    );
    if linear.relative > linear_tolerance {
        return Err(fail(
            name,
            "linearized-residual-exceeds-tolerance",
            None,
            format!("{:.3e} > {:.1e}", linear.relative, linear_tolerance),
        ));
    }
    if (slope - 2.0).abs() > 0.3 {
        return Err(fail(
            name,
            "nonlinear-trend-out-of-tolerance",
            None,
            format!("fitted slope {slope:.3}, want 2 +- 0.3"),
        ));
    }
    Ok(())
}

pub fn bourgain_scaling(reader: ConfigReader, ctx: &Ctx) -> Result<(), RunError> {
    let name = "bourgain-scaling";
    let b = reader.f64_or("scenario.b", 0.6)?;
    let s = reader.f64_or("scenario.s", 1.0)?;
    let eps = reader.f64_or("scenario.eps", 0.1)?;
    let samples = reader.usize_or("scenario.samples", 100)?;
    let seed = ctx
        .seed_override
        .unwrap_or(reader.u64_or("scenario.seed", 2024)?);
    reader.finish()?;
    let internal = |e: nonkp::bourgain::BourgainError| fail(name, "internal", None, e.to_string());

    // cutoff-norm sweep over the stated range, each T on its own lattice
    let stated: Vec<f64> = (0..=16).map(|i| 0.1 * 10f64.powf(i as f64 / 8.0)).collect();
    let (points, slope) = psi_t_norm_sweep(&stated, b, 8192).map_err(internal)?;
    let mut csv = CsvWriter::create(&ctx.out.join("psi_scaling.csv"), &["T", "norm_hb"])?;
    for (t, n) in &points {
        csv.row(&[fmt_f64(*t), fmt_f64(*n)])?;
    }
    csv.finish()?;
    // the small-T asymptotic measurement, where the decay law lives
    let small: Vec<f64> = (0..7).map(|i| 0.002 * 2f64.powf(i as f64 * 0.5)).collect();
    let (small_points, small_slope) = psi_t_norm_sweep(&small, b, 32768).map_err(internal)?;
    let mut csv = CsvWriter::create(
        &ctx.out.join("psi_scaling_asymptotic.csv"),
        &["T", "norm_hb"],
    )?;
    for (t, n) in &small_points {
        csv.row(&[fmt_f64(*t), fmt_f64(*n)])?;
    }
    csv.finish()?;

    // free-evolution estimate: ratio constancy across random data
    use rand::{RngExt, SeedableRng};
    let g16 = Grid2D::shared(16, 16, TAU, TAU)
        .map_err(|e| fail(name, "internal", None, e.to_string()))?;
    let lattice = TimeLattice::new(1024, 16.0).map_err(internal)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<StateW> = (0..samples)
        .map(|_| {
            let mut w = StateW::zeros(g16.clone());
            for c in w.w1.coeffs_mut().iter_mut() {
                *c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            for c in w.w2.coeffs_mut().iter_mut() {
                *c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
            w
        })
        .collect();
    let free = verify_free_estimate(&data, b, s, &lattice).map_err(internal)?;
    let mut csv = CsvWriter::create(&ctx.out.join("free_estimate.csv"), &["index", "ratio"])?;
    for (i, r) in free.ratios.iter().enumerate() {
        csv.row(&[i.to_string(), fmt_f64(*r)])?;
    }
    csv.finish()?;

    // Duhamel sweep for the shipped sample forcings, both branches
    let g8 = Grid2D::shared(8, 8, TAU, TAU)
        .map_err(|e| fail(name, "internal", None, e.to_string()))?;
    let lt = 40.0;
    let duh_lattice = TimeLattice::new(4096, lt).map_err(internal)?;
    let sweep: Vec<f64> = (0..=12)
        .map(|i| 0.05 * 10f64.powf(i as f64 / 6.0))
        .collect();
    let mut jobs = Vec::new();
    for branch in Branch::BOTH {
        for forcing in sample_forcings(&g8, &duh_lattice, branch) {
            jobs.push((branch, forcing));
        }
    }
    let sweep_ref = &sweep;
    let reports = parallel_map(jobs, ctx.threads, move |(branch, forcing)| {
        verify_duhamel_scaling(&forcing, branch, eps, s, sweep_ref, lt)
    });
    let mut csv = CsvWriter::create(
        &ctx.out.join("duhamel.csv"),
        &["forcing", "branch", "T", "lhs", "rhs", "ratio", "fitted_slope"],
    )?;
    let mut worst_spread = 0.0f64;
    let mut min_slope = f64::MAX;
    for report in reports {
        let report = report.map_err(internal)?;
        for row in &report.rows {
            csv.row(&[
                report.forcing.clone(),
                format!("{}", report.branch.index() + 1),
                fmt_f64(row.t_scale),
                fmt_f64(row.lhs),
                fmt_f64(report.rhs),
                fmt_f64(row.ratio),
                fmt_f64(report.slope),
            ])?;
        }
        worst_spread = worst_spread.max(report.ratio_spread());
        min_slope = min_slope.min(report.slope);
    }
    csv.finish()?;

    println!(
        "bourgain-scaling: psi_T slope {slope:+.3} over [0.1, 10] (asymptotic {small_slope:+.3}), \
         free-estimate spread {:.2e}, Duhamel worst spread {worst_spread:.2}x / min slope {min_slope:+.2}",
        free.spread()
    );

    if free.spread() > 0.05 || !free.passes() {
        return Err(fail(
            name,
            "free-estimate-out-of-tolerance",
            None,
            format!(
                "spread {:.3e} (tol 5e-2), max ratio {:.4} vs C0 {:.4}",
                free.spread(),
                free.max_ratio,
                free.c0
            ),
        ));
    }
    if worst_spread > 10.0 || min_slope < eps - 0.1 {
        return Err(fail(
            name,
            "duhamel-scaling-out-of-tolerance",
            None,
            format!("spread {worst_spread:.2} (tol 10x), min slope {min_slope:+.3}"),
        ));
    }
    if (slope + 0.1).abs() > 0.05 {
        return Err(fail(
            name,
            "psi-scaling-slope-out-of-tolerance",
            None,
            format!(
                "fitted slope {slope:+.4} over T in [0.1, 10], want -0.1 +- 0.05; the decay law \
                 is the small-T asymptote (measured {small_slope:+.4} on [0.002, 0.016]) and the \
                 H^b norm grows like sqrt(T) past T ~ 1, so the stated range mixes regimes"
            ),
        ));
    }
    Ok(())
}

pub fn dn_verify(reader: ConfigReader, ctx: &Ctx) -> Result<(), RunError> {
    let name = "dn-verify";
    let n = reader.usize_or("scenario.n", 64)?;
    let h0 = reader.f64_or("scenario.h0", 1.0)?;
    let mode = reader.usize_or("scenario.mode", 2)? as i64;
    let amps = reader.f64_list_or("scenario.amplitudes", &[0.01, 0.02, 0.04])?;
    let seed = ctx
        .seed_override
        .unwrap_or(reader.u64_or("scenario.seed", 5150)?);
    reader.finish()?;

    let g = Grid1D::shared(n, TAU).map_err(|e| RunError::Config(ConfigError(e.to_string())))?;
    let dn_err = |e: nonkp::dirichlet_neumann::DnError| fail(name, "internal", None, e.to_string());

    // (a) plane-wave eigenvalue of the flat-bottom operator
    let mut worst_eig = 0.0f64;
    for m in [1i64, 2, -3, 7] {
        let mut phi = Field1D::zeros(g.clone());
        phi.set_mode(m, Complex64::ONE);
        let out = g0_apply(&phi, h0);
        let k = m as f64;
        let want = k.abs() * (k.abs() * h0).tanh();
        worst_eig = worst_eig.max((out.mode(m) - Complex64::new(want, 0.0)).norm());
    }

    // (b) recursion against the closed forms on random inputs
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut eta_field = Field1D::zeros(g.clone());
    for j in 1..=5i64 {
        let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        eta_field.set_mode(j, c);
        eta_field.set_mode(-j, c.conj());
    }
    let eta_raw = eta_field.to_physical();
    let sup = eta_raw.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let eta: Vec<f64> = eta_raw.iter().map(|c| 0.04 * c.re / sup).collect();
    let eta_f = Field1D::from_physical_real(g.clone(), &eta).map_err(dn_err)?;
    let exp = DnExpansion::new(g.clone(), &eta, h0, 2).map_err(dn_err)?;
    let mut phi = Field1D::zeros(g.clone());
    for j in -8i64..=8 {
        phi.set_mode(
            j,
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        );
    }
    let d = |f: &Field1D| f.apply_symbol(|k| Complex64::new(k, 0.0));
    let d2 = |f: &Field1D| f.apply_symbol(|k| Complex64::new(k * k, 0.0));
    let g1_closed = d(&eta_f.multiply(&d(&phi))).sub(&g0_apply(
        &eta_f.multiply(&g0_apply(&phi, h0)),
        h0,
    ));
    let eta2 = eta_f.multiply(&eta_f);
    let g2_closed = d2(&eta2.multiply(&g0_apply(&phi, h0)))
        .add(&g0_apply(&eta2.multiply(&d2(&phi)), h0))
        .sub(
            &g0_apply(
                &eta_f.multiply(&g0_apply(&eta_f.multiply(&g0_apply(&phi, h0)), h0)),
                h0,
            )
            .scale(Complex64::new(2.0, 0.0)),
        )
        .scale(Complex64::new(-0.5, 0.0));
    let gap1 = exp.apply_term(1, &phi).map_err(dn_err)?.sub(&g1_closed).l2_norm()
        / g1_closed.l2_norm();
    let gap2 = exp.apply_term(2, &phi).map_err(dn_err)?.sub(&g2_closed).l2_norm()
        / g2_closed.l2_norm();
    let worst_closed = gap1.max(gap2);

    // (c) exact-trace convergence at order J + 1
    let mut csv = CsvWriter::create(
        &ctx.out.join("dn_verify.csv"),
        &["order", "amplitude", "rel_error", "fitted_slope"],
    )?;
    let mut worst_gap = 0.0f64;
    for order in [1usize, 2, 3] {
        let mut points = Vec::new();
        for &amp in &amps {
            let eta: Vec<f64> = (0..g.n()).map(|i| amp * g.point(i).cos()).collect();
            let exp = DnExpansion::new(g.clone(), &eta, h0, order).map_err(dn_err)?;
            let (datum, exact) = exact_trace_oracle(&g, &eta, mode, h0).map_err(dn_err)?;
            let err = exp.apply(&datum).sub(&exact).l2_norm() / exact.l2_norm();
            points.push((amp, err));
        }
        let slope = log_log_slope(&points);
        for (amp, err) in &points {
            csv.row(&[
                order.to_string(),
                fmt_f64(*amp),
                fmt_f64(*err),
                fmt_f64(slope),
            ])?;
        }
        worst_gap = worst_gap.max((slope - (order + 1) as f64).abs());
    }
    csv.finish()?;

    println!(
        "dn-verify: G0 eigenvalue defect {worst_eig:.3e}, closed-form gap {worst_closed:.3e}, worst order gap {worst_gap:.2}"
    );
    if worst_eig > 1e-12 {
        return Err(fail(name, "g0-eigenvalue-out-of-tolerance", None, format!("{worst_eig:.3e} > 1e-12")));
    }
    if worst_closed > 1e-10 {
        return Err(fail(name, "closed-form-mismatch", None, format!("{worst_closed:.3e} > 1e-10")));
    }
    if worst_gap > 0.3 {
        return Err(fail(name, "convergence-order-out-of-tolerance", None, format!("order gap {worst_gap:.2} > 0.3")));
    }
    Ok(())
}
