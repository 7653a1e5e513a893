//! Complex Fourier coefficient arrays of real 2D fields, plus the multiplier
//! algebra built on them.
//!
//! Normalization: the forward transform carries the `1/(Nx*Ny)` factor, so a
//! coefficient is the amplitude of its mode directly and
//! `u(x, y) = sum_{j,k} coeff[j,k] * exp(i(xi_j x + mu_k y))`.

use std::ops::{Add, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::grid::Grid2D;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("physical array has {got} samples, grid expects {want}")]
    ShapeMismatch { got: usize, want: usize },
    #[error("symbol is not finite at mode (xi={xi}, mu={mu})")]
    NonFiniteSymbol { xi: f64, mu: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
}

/// Fourier coefficients of a 2D field, FFT mode order, row-major (k outer).
#[derive(Clone)]
pub struct SpectralField {
    grid: Arc<Grid2D>,
    coeff: Vec<Complex64>,
}

impl std::fmt::Debug for SpectralField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralField")
            .field("grid", &self.grid)
            .field("max_abs_coeff", &self.max_abs_coeff())
            .finish()
    }
}

impl SpectralField {
    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        let n = grid.len();
        Self {
            grid,
            coeff: vec![Complex64::ZERO; n],
        }
    }

    pub fn from_coeffs(grid: Arc<Grid2D>, coeff: Vec<Complex64>) -> Result<Self, FieldError> {
        if coeff.len() != grid.len() {
            return Err(FieldError::ShapeMismatch {
                got: coeff.len(),
                want: grid.len(),
            });
        }
        Ok(Self { grid, coeff })
    }

    /// Forward transform of a real sample array (row-major, y outer).
    pub fn from_physical(grid: Arc<Grid2D>, samples: &[f64]) -> Result<Self, FieldError> {
        if samples.len() != grid.len() {
            return Err(FieldError::ShapeMismatch {
                got: samples.len(),
                want: grid.len(),
            });
        }
        let mut coeff: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        forward_2d(&grid, &mut coeff);
        Ok(Self { grid, coeff })
    }

    /// Inverse transform; returns real samples (row-major, y outer).
    pub fn to_physical(&self) -> Vec<f64> {
        self.to_physical_complex().iter().map(|c| c.re).collect()
    }

    pub fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut buf = self.coeff.clone();
        inverse_2d(&self.grid, &mut buf);
        buf
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeff
    }

    /// Coefficient of the signed mode pair `(j, k)`.
    pub fn mode(&self, j: i64, k: i64) -> Complex64 {
        self.coeff[self.grid.mode_index(j, k)]
    }

    pub fn set_mode(&mut self, j: i64, k: i64, value: Complex64) {
        let idx = self.grid.mode_index(j, k);
        self.coeff[idx] = value;
    }

    /// Multiply every coefficient by `sigma(xi, mu)`.
    pub fn apply_symbol(
        &self,
        sigma: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self, FieldError> {
        let mut out = self.clone();
        let g = &self.grid;
        for k in 0..g.ny() {
            let mu = g.mu(k);
            for j in 0..g.nx() {
                let xi = g.xi(j);
                let s = sigma(xi, mu);
                if !(s.re.is_finite() && s.im.is_finite()) {
                    return Err(FieldError::NonFiniteSymbol { xi, mu });
                }
                out.coeff[k * g.nx() + j] *= s;
            }
        }
        Ok(out)
    }

    /// `d/dx`: symbol `i*xi`, Nyquist column zeroed (odd symbol).
    pub fn derivative_x(&self) -> Self {
        let mut out = self.clone();
        let g = &self.grid;
        for k in 0..g.ny() {
            for j in 0..g.nx() {
                let idx = k * g.nx() + j;
                if 2 * j == g.nx() {
                    out.coeff[idx] = Complex64::ZERO;
                } else {
                    out.coeff[idx] *= Complex64::new(0.0, g.xi(j));
                }
            }
        }
        out
    }

    /// `d/dy`: symbol `i*mu`, Nyquist row zeroed.
    pub fn derivative_y(&self) -> Self {
        let mut out = self.clone();
        let g = &self.grid;
        for k in 0..g.ny() {
            for j in 0..g.nx() {
                let idx = k * g.nx() + j;
                if 2 * k == g.ny() {
                    out.coeff[idx] = Complex64::ZERO;
                } else {
                    out.coeff[idx] *= Complex64::new(0.0, g.mu(k));
                }
            }
        }
        out
    }

    /// `Q = (1 - d^2/dx^2)^{-1}`: multiplies mode `(xi, mu)` by `1/(1+xi^2)`.
    pub fn helmholtz_inverse(&self) -> Self {
        let mut out = self.clone();
        let g = &self.grid;
        for k in 0..g.ny() {
            for j in 0..g.nx() {
                let xi = g.xi(j);
                out.coeff[k * g.nx() + j] /= 1.0 + xi * xi;
            }
        }
        out
    }

    /// Two-thirds rule: zeroes every mode with `3|j| > Nx` or `3|k| > Ny`.
    pub fn dealias_two_thirds(&self) -> Self {
        let mut out = self.clone();
        let g = &self.grid;
        for k in 0..g.ny() {
            let km = g.signed_y(k).unsigned_abs() as usize;
            for j in 0..g.nx() {
                let jm = g.signed_x(j).unsigned_abs() as usize;
                if 3 * jm > g.nx() || 3 * km > g.ny() {
                    out.coeff[k * g.nx() + j] = Complex64::ZERO;
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeff {
            *c *= factor;
        }
        out
    }

    /// Largest coefficient deviation from Hermitian symmetry
    /// `coeff[-j,-k] = conj(coeff[j,k])`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for k in 0..g.ny() {
            let kc = (g.ny() - k) % g.ny();
            for j in 0..g.nx() {
                let jc = (g.nx() - j) % g.nx();
                let a = self.coeff[k * g.nx() + j];
                let b = self.coeff[kc * g.nx() + jc].conj();
                worst = worst.max((a - b).norm());
            }
        }
        worst
    }

    /// Project onto the Hermitian-symmetric part (the real part of the field).
    pub fn symmetrize_hermitian(&mut self) {
        let g = self.grid.clone();
        let old = self.coeff.clone();
        for k in 0..g.ny() {
            let kc = (g.ny() - k) % g.ny();
            for j in 0..g.nx() {
                let jc = (g.nx() - j) % g.nx();
                let a = old[k * g.nx() + j];
                let b = old[kc * g.nx() + jc].conj();
                self.coeff[k * g.nx() + j] = 0.5 * (a + b);
            }
        }
    }

    /// `sqrt(sum |coeff|^2)`; equals `||u||_{L^2} / sqrt(Lx*Ly)` by Parseval.
    pub fn coeff_l2(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L2 norm over the periodic cell, computed spectrally.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.lx() * self.grid.ly()).sqrt() * self.coeff_l2()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeff
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid.same_grid(&other.grid)
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: &SpectralField) -> SpectralField {
        assert!(self.same_grid(rhs), "grid mismatch");
        let coeff = self
            .coeff
            .iter()
            .zip(&rhs.coeff)
            .map(|(a, b)| a + b)
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeff,
        }
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: &SpectralField) -> SpectralField {
        assert!(self.same_grid(rhs), "grid mismatch");
        let coeff = self
            .coeff
            .iter()
            .zip(&rhs.coeff)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField {
            grid: self.grid.clone(),
            coeff,
        }
    }
}

/// In-place unnormalized FFT along x then y, then the `1/(Nx*Ny)` factor.
fn forward_2d(grid: &Grid2D, data: &mut [Complex64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    for row in data.chunks_exact_mut(nx) {
        grid.fft_x().process(row);
    }
    let mut col = vec![Complex64::ZERO; ny];
    for j in 0..nx {
        for k in 0..ny {
            col[k] = data[k * nx + j];
        }
        grid.fft_y().process(&mut col);
        for k in 0..ny {
            data[k * nx + j] = col[k];
        }
    }
    let scale = 1.0 / (nx * ny) as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
}

/// In-place unnormalized inverse FFT; exact inverse of `forward_2d`.
fn inverse_2d(grid: &Grid2D, data: &mut [Complex64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut col = vec![Complex64::ZERO; ny];
    for j in 0..nx {
        for k in 0..ny {
            col[k] = data[k * nx + j];
        }
        grid.ifft_y().process(&mut col);
        for k in 0..ny {
            data[k * nx + j] = col[k];
        }
    }
    for row in data.chunks_exact_mut(nx) {
        grid.ifft_x().process(row);
    }
}

/// Pointwise product of two real fields, transformed and dealiased.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    assert!(a.same_grid(b), "grid mismatch");
    let pa = a.to_physical();
    let pb = b.to_physical();
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    SpectralField::from_physical(a.grid().clone(), &prod)
        .expect("shape preserved")
        .dealias_two_thirds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use proptest::prelude::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize) -> Arc<Grid2D> {
        Grid2D::shared(n, n, TAU, TAU).unwrap()
    }

    fn random_real_field(g: &Arc<Grid2D>, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random::<f64>() - 0.5).collect();
        SpectralField::from_physical(g.clone(), &samples).unwrap()
    }

    #[test]
    fn constant_field_has_single_coefficient() {
        let g = grid(8);
        let f = SpectralField::from_physical(g.clone(), &vec![3.25; g.len()]).unwrap();
        assert!((f.mode(0, 0) - Complex64::new(3.25, 0.0)).norm() < 1e-14);
        for k in 0..8i64 - 4 {
            for j in 0..4i64 {
                if (j, k) != (0, 0) {
                    assert!(f.mode(j, k).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn cosine_splits_into_half_amplitudes() {
        let g = grid(8);
        let f = SpectralField::from_physical(g.clone(), &g.sample(|x, _| x.cos())).unwrap();
        assert!((f.mode(1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((f.mode(-1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!(f.mode(2, 0).norm() < 1e-14);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random::<f64>() - 0.5).collect();
        let back = SpectralField::from_physical(g, &samples).unwrap().to_physical();
        let err = samples
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = samples.iter().map(|a| a.abs()).fold(0.0, f64::max);
        assert!(err / scale < 1e-12, "round-trip error {err}");
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = grid(8);
        let err = SpectralField::from_physical(g, &[0.0; 7]).unwrap_err();
        assert_eq!(err, FieldError::ShapeMismatch { got: 7, want: 64 });
    }

    #[test]
    fn identity_symbol_is_identity() {
        let g = grid(8);
        let f = random_real_field(&g, 1);
        let out = f.apply_symbol(|_, _| Complex64::ONE).unwrap();
        for (a, b) in f.coeffs().iter().zip(out.coeffs()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn derivative_of_cosine_is_minus_sine() {
        let g = grid(16);
        let f = SpectralField::from_physical(g.clone(), &g.sample(|x, _| x.cos())).unwrap();
        let d = f.derivative_x().to_physical();
        let want = g.sample(|x, _| -x.sin());
        for (a, b) in d.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn helmholtz_inverse_on_cosine() {
        // 1/(1+xi^2) at |xi| = 1 is 1/2
        let g = grid(16);
        let f = SpectralField::from_physical(g.clone(), &g.sample(|x, _| x.cos())).unwrap();
        let q = f.helmholtz_inverse().to_physical();
        let want = g.sample(|x, _| 0.5 * x.cos());
        for (a, b) in q.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn helmholtz_inverse_fixes_constants_and_scales_sin2x() {
        let g = grid(16);
        let c = SpectralField::from_physical(g.clone(), &vec![1.5; g.len()]).unwrap();
        let qc = c.helmholtz_inverse().to_physical();
        for v in qc {
            assert!((v - 1.5).abs() < 1e-13);
        }
        let s = SpectralField::from_physical(g.clone(), &g.sample(|x, _| (2.0 * x).sin())).unwrap();
        let qs = s.helmholtz_inverse().to_physical();
        let want = g.sample(|x, _| (2.0 * x).sin() / 5.0);
        for (a, b) in qs.iter().zip(&want) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn helmholtz_inverse_inverts_helmholtz() {
        let g = grid(16);
        let f = random_real_field(&g, 7);
        // (1 - d^2/dx^2) Q f = f
        let q = f.helmholtz_inverse();
        let back = q.apply_symbol(|xi, _| Complex64::new(1.0 + xi * xi, 0.0)).unwrap();
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn helmholtz_inverse_is_contraction() {
        let g = grid(16);
        let f = random_real_field(&g, 9);
        let q = f.helmholtz_inverse();
        for (a, b) in q.coeffs().iter().zip(f.coeffs()) {
            assert!(a.norm() <= b.norm() + 1e-16);
        }
    }

    #[test]
    fn symbol_application_composes_pointwise() {
        let g = grid(8);
        let f = random_real_field(&g, 3);
        let s1 = |xi: f64, mu: f64| Complex64::new(xi * mu, 1.0);
        let s2 = |xi: f64, _: f64| Complex64::new(0.25, -xi);
        let chained = f.apply_symbol(s1).unwrap().apply_symbol(s2).unwrap();
        let fused = f.apply_symbol(|xi, mu| s1(xi, mu) * s2(xi, mu)).unwrap();
        for (a, b) in chained.coeffs().iter().zip(fused.coeffs()) {
            // identical up to the non-associativity of complex products
            assert!((a - b).norm() <= 1e-15 * b.norm().max(1.0));
        }
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let g = grid(8);
        let f = random_real_field(&g, 4);
        let err = f.apply_symbol(|xi, _| Complex64::new(1.0 / xi, 0.0)).unwrap_err();
        assert_eq!(err, FieldError::NonFiniteSymbol { xi: 0.0, mu: 0.0 });
    }

    #[test]
    fn dealias_keeps_retained_band_and_kills_nyquist() {
        let g = grid(12);
        let mut f = SpectralField::zeros(g.clone());
        // supported on |j|,|k| <= Nx/3 = 4: unchanged
        for k in -4..=4 {
            for j in -4..=4 {
                f.set_mode(j, k, Complex64::new(1.0, -1.0));
            }
        }
        let d = f.dealias_two_thirds();
        for (a, b) in d.coeffs().iter().zip(f.coeffs()) {
            assert_eq!(a, b);
        }

        let mut nyq = SpectralField::zeros(g);
        nyq.set_mode(-6, 0, Complex64::ONE);
        nyq.set_mode(0, -6, Complex64::ONE);
        assert_eq!(nyq.dealias_two_thirds().max_abs_coeff(), 0.0);
    }

    #[test]
    fn parseval_holds_for_random_fields() {
        let g = grid(16);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<f64> = (0..g.len()).map(|_| rng.random::<f64>() - 0.5).collect();
        let f = SpectralField::from_physical(g.clone(), &samples).unwrap();
        let physical: f64 =
            samples.iter().map(|v| v * v).sum::<f64>() * g.lx() * g.ly() / g.len() as f64;
        let spectral = g.lx() * g.ly() * f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((physical - spectral).abs() / physical.abs() < 1e-12);
    }

    #[test]
    fn transform_of_real_field_is_hermitian() {
        let g = grid(12);
        let f = random_real_field(&g, 5);
        assert!(f.hermitian_defect() < 1e-13);
    }

    #[test]
    fn nyquist_aware_plane_wave_synthesis() {
        // sin(2x)cos(y) through analysis and synthesis, PI domain scaling
        let g = Grid2D::shared(16, 16, PI, TAU).unwrap();
        let f =
            SpectralField::from_physical(g.clone(), &g.sample(|x, y| (4.0 * x).sin() * y.cos()))
                .unwrap();
        // xi = 4 at signed mode 2 when Lx = PI
        assert!((f.mode(2, 1) - Complex64::new(0.0, -0.25)).norm() < 1e-13);
        assert!((f.mode(-2, -1) - Complex64::new(0.0, 0.25)).norm() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn dealias_is_idempotent(seed in 0u64..1024) {
            let g = grid(12);
            let f = random_real_field(&g, seed);
            let once = f.dealias_two_thirds();
            let twice = once.dealias_two_thirds();
            for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn round_trip_random_sizes(seed in 0u64..1024) {
            let g = Grid2D::shared(8, 12, 1.0, 3.0).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<f64> = (0..g.len()).map(|_| rng.random::<f64>() - 0.5).collect();
            let back = SpectralField::from_physical(g, &samples).unwrap().to_physical();
            for (a, b) in samples.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
