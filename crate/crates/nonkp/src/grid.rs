//! Periodic rectangular grids and their integer wavenumber lattices.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid size {0} must be even and at least 4")]
    BadSize(usize),
    #[error("domain length {0} must be positive and finite")]
    BadLength(f64),
}

/// Periodic grid on `[0, Lx) x [0, Ly)` with `Nx x Ny` points.
///
/// Wavenumbers are stored in FFT order: index `j` maps to the signed mode
/// `j` for `j < N/2` and `j - N` otherwise, scaled by `2*pi/L`. The single
/// Nyquist entry `-N/2` has no positive partner.
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    xi: Vec<f64>,
    mu: Vec<f64>,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        if nx < 4 || nx % 2 != 0 {
            return Err(GridError::BadSize(nx));
        }
        if ny < 4 || ny % 2 != 0 {
            return Err(GridError::BadSize(ny));
        }
        if !(lx.is_finite() && lx > 0.0) {
            return Err(GridError::BadLength(lx));
        }
        if !(ly.is_finite() && ly > 0.0) {
            return Err(GridError::BadLength(ly));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            nx,
            ny,
            lx,
            ly,
            xi: wavenumbers(nx, lx),
            mu: wavenumbers(ny, ly),
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y: planner.plan_fft_forward(ny),
            ifft_y: planner.plan_fft_inverse(ny),
        })
    }

    pub fn shared(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Self>, GridError> {
        Self::new(nx, ny, lx, ly).map(Arc::new)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Wavenumber `xi` of FFT-order index `j`.
    pub fn xi(&self, j: usize) -> f64 {
        self.xi[j]
    }

    /// Wavenumber `mu` of FFT-order index `k`.
    pub fn mu(&self, k: usize) -> f64 {
        self.mu[k]
    }

    pub fn xi_slice(&self) -> &[f64] {
        &self.xi
    }

    pub fn mu_slice(&self) -> &[f64] {
        &self.mu
    }

    /// Signed integer mode of FFT-order index `j` along x.
    pub fn signed_x(&self, j: usize) -> i64 {
        signed_index(j, self.nx)
    }

    pub fn signed_y(&self, k: usize) -> i64 {
        signed_index(k, self.ny)
    }

    /// Flat index of the signed mode pair `(j, k)`.
    ///
    /// Panics if the mode is outside `[-N/2, N/2)` in either direction.
    pub fn mode_index(&self, j: i64, k: i64) -> usize {
        let jj = fft_index(j, self.nx);
        let kk = fft_index(k, self.ny);
        kk * self.nx + jj
    }

    /// Physical coordinates of grid point `(ix, iy)`.
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.lx * ix as f64 / self.nx as f64,
            self.ly * iy as f64 / self.ny as f64,
        )
    }

    /// Sample a function on the grid, row-major (y outer, x inner).
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let (x, y) = self.point(ix, iy);
                out.push(f(x, y));
            }
        }
        out
    }

    pub fn same_grid(&self, other: &Grid2D) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }

    pub(crate) fn fft_x(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_x
    }

    pub(crate) fn ifft_x(&self) -> &Arc<dyn Fft<f64>> {
        &self.ifft_x
    }

    pub(crate) fn fft_y(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft_y
    }

    pub(crate) fn ifft_y(&self) -> &Arc<dyn Fft<f64>> {
        &self.ifft_y
    }
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other)
    }
}

pub(crate) fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let scale = 2.0 * std::f64::consts::PI / l;
    (0..n).map(|j| scale * signed_index(j, n) as f64).collect()
}

pub(crate) fn signed_index(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

pub(crate) fn fft_index(j: i64, n: usize) -> usize {
    let half = (n / 2) as i64;
    assert!(
        j >= -half && j < half,
        "mode {} out of range for size {}",
        j,
        n
    );
    j.rem_euclid(n as i64) as usize
}
