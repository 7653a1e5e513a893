//! Deterministic initial data generators.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::SpectralField;
use crate::grid::Grid2D;
use crate::model::StateUV;

/// Random real field supported on modes `|j|, |k| <= max_mode` with a smooth
/// Gaussian spectral envelope, rescaled to the requested sup-norm amplitude.
///
/// Fully determined by `(grid, amplitude, max_mode, seed)`.
pub fn smooth_random_field(
    grid: &Arc<Grid2D>,
    amplitude: f64,
    max_mode: usize,
    seed: u64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid.clone());
    let m = max_mode as i64;
    let sigma2 = (max_mode as f64 / 2.0).powi(2).max(1.0);
    for k in -m..=m {
        for j in -m..=m {
            let re = rng.random::<f64>() - 0.5;
            let im = rng.random::<f64>() - 0.5;
            let envelope = (-((j * j + k * k) as f64) / sigma2).exp();
            f.set_mode(j, k, Complex64::new(re, im) * envelope);
        }
    }
    f.symmetrize_hermitian();
    // zero the mean so the state carries no constant offset
    f.set_mode(0, 0, Complex64::ZERO);
    let sup = f
        .to_physical()
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if sup > 0.0 {
        f.scale(Complex64::new(amplitude / sup, 0.0))
    } else {
        f
    }
}

/// Random smooth real state `(u, v)` at `t = 0`, both components at the
/// requested sup-norm amplitude.
pub fn smooth_random_state(
    grid: &Arc<Grid2D>,
    amplitude: f64,
    max_mode: usize,
    seed: u64,
) -> StateUV {
    let u = smooth_random_field(grid, amplitude, max_mode, seed.wrapping_mul(2).wrapping_add(1));
    let v = smooth_random_field(grid, amplitude, max_mode, seed.wrapping_mul(2).wrapping_add(2));
    StateUV::new(u, v, 0.0)
}

/// Real plane-wave pair concentrated on one signed mode and its conjugate:
/// `u = 2 re(a e^{i(xi x + mu y)})`, `v = 2 re(b e^{i(xi x + mu y)})`.
pub fn plane_wave_state(
    grid: &Arc<Grid2D>,
    mode: (i64, i64),
    a: Complex64,
    b: Complex64,
) -> StateUV {
    let mut u = SpectralField::zeros(grid.clone());
    let mut v = SpectralField::zeros(grid.clone());
    let (j, k) = mode;
    u.set_mode(j, k, a);
    u.set_mode(-j, -k, a.conj());
    v.set_mode(j, k, b);
    v.set_mode(-j, -k, b.conj());
    StateUV::new(u, v, 0.0)
}
