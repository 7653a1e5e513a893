//! Taylor expansion of the Dirichlet-Neumann operator on a periodic strip
//! of depth `h0`, one horizontal dimension.
//!
//! `G(eta)` maps the trace of the potential at the free surface
//! `y = eta(x)` to the normal fluid velocity there. Each Taylor term
//! `G_j(eta)` is homogeneous of degree `j` in the surface profile and is
//! produced by a recursion seeded with `G_0 = |D| tanh(|D| h0)`. The exact
//! harmonic family `phi_k = e^{ikx} cosh(|k|(y + h0))` provides an
//! independent oracle for the truncated sum.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::grid::{fft_index, signed_index, wavenumbers};

#[derive(Debug, Error, PartialEq)]
pub enum DnError {
    #[error("grid size {0} must be even and at least 4")]
    BadSize(usize),
    #[error("domain length {0} must be positive and finite")]
    BadLength(f64),
    #[error("depth h0 = {0} must be positive and finite")]
    BadDepth(f64),
    #[error("surface amplitude {amp} reaches the bottom at depth {h0}")]
    SurfaceTooSteep { amp: f64, h0: f64 },
    #[error("order {got} exceeds the expansion order {max}")]
    OrderTooHigh { got: usize, max: usize },
    #[error("sample count {got} does not match grid size {want}")]
    ShapeMismatch { got: usize, want: usize },
}

/// Periodic 1D grid with wavenumbers `2 pi j / L` in FFT order.
pub struct Grid1D {
    n: usize,
    length: f64,
    k: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    fft_fine: Arc<dyn Fft<f64>>,
    ifft_fine: Arc<dyn Fft<f64>>,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self, DnError> {
        if n < 4 || n % 2 != 0 {
            return Err(DnError::BadSize(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(DnError::BadLength(length));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            length,
            k: wavenumbers(n, length),
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            fft_fine: planner.plan_fft_forward(2 * n),
            ifft_fine: planner.plan_fft_inverse(2 * n),
        })
    }

    pub fn shared(n: usize, length: f64) -> Result<Arc<Self>, DnError> {
        Self::new(n, length).map(Arc::new)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.k[j]
    }

    pub fn point(&self, i: usize) -> f64 {
        self.length * i as f64 / self.n as f64
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        (0..self.n).map(|i| f(self.point(i))).collect()
    }
}

impl fmt::Debug for Grid1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid1D")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

/// Complex 1D field in mode amplitudes, same normalization as the 2D fields.
#[derive(Clone)]
pub struct Field1D {
    grid: Arc<Grid1D>,
    coeff: Vec<Complex64>,
}

impl fmt::Debug for Field1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field1D")
            .field("grid", &self.grid)
            .field("l2", &self.l2_norm())
            .finish()
    }
}

impl Field1D {
    pub fn zeros(grid: Arc<Grid1D>) -> Self {
        let n = grid.n();
        Self {
            grid,
            coeff: vec![Complex64::ZERO; n],
        }
    }

    pub fn from_physical(grid: Arc<Grid1D>, samples: &[Complex64]) -> Result<Self, DnError> {
        if samples.len() != grid.n() {
            return Err(DnError::ShapeMismatch {
                got: samples.len(),
                want: grid.n(),
            });
        }
        let mut coeff = samples.to_vec();
        grid.fft.process(&mut coeff);
        let scale = 1.0 / grid.n() as f64;
        for c in &mut coeff {
            *c *= scale;
        }
        Ok(Self { grid, coeff })
    }

    pub fn from_physical_real(grid: Arc<Grid1D>, samples: &[f64]) -> Result<Self, DnError> {
        let complex: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_physical(grid, &complex)
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut buf = self.coeff.clone();
        self.grid.ifft.process(&mut buf);
        buf
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn mode(&self, j: i64) -> Complex64 {
        self.coeff[fft_index(j, self.grid.n())]
    }

    pub fn set_mode(&mut self, j: i64, value: Complex64) {
        let idx = fft_index(j, self.grid.n());
        self.coeff[idx] = value;
    }

    pub fn apply_symbol(&self, sigma: impl Fn(f64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (j, c) in out.coeff.iter_mut().enumerate() {
            *c *= sigma(self.grid.k[j]);
        }
        out
    }

    pub fn derivative(&self) -> Self {
        let n = self.grid.n();
        let mut out = self.clone();
        for (j, c) in out.coeff.iter_mut().enumerate() {
            if 2 * j == n {
                *c = Complex64::ZERO;
            } else {
                *c *= Complex64::new(0.0, self.grid.k[j]);
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

    pub fn add(&self, other: &Self) -> Self {
        let coeff = self
            .coeff
            .iter()
            .zip(&other.coeff)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            grid: self.grid.clone(),
            coeff,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeff = self
            .coeff
            .iter()
            .zip(&other.coeff)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            grid: self.grid.clone(),
            coeff,
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sesquilinear pairing `sum_modes a conj(b)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeff
            .iter()
            .zip(&other.coeff)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Pointwise product with aliasing removed by zero-padding to twice the
    /// resolution before multiplying.
    pub fn multiply(&self, other: &Self) -> Self {
        let n = self.grid.n();
        let fine = 2 * n;
        let mut a = vec![Complex64::ZERO; fine];
        let mut b = vec![Complex64::ZERO; fine];
        for j in 0..n {
            let signed = signed_index(j, n);
            let dst = signed.rem_euclid(fine as i64) as usize;
            a[dst] = self.coeff[j];
            b[dst] = other.coeff[j];
        }
        self.grid.ifft_fine.process(&mut a);
        self.grid.ifft_fine.process(&mut b);
        let mut prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        self.grid.fft_fine.process(&mut prod);
        let scale = 1.0 / fine as f64;
        let mut coeff = vec![Complex64::ZERO; n];
        for (j, c) in coeff.iter_mut().enumerate() {
            let signed = signed_index(j, n);
            let src = signed.rem_euclid(fine as i64) as usize;
            *c = prod[src] * scale;
        }
        Self {
            grid: self.grid.clone(),
            coeff,
        }
    }
}

/// Flat-bottom symbol `|k| tanh(|k| h0)` applied to the trace datum.
pub fn g0_apply(phi: &Field1D, h0: f64) -> Field1D {
    phi.apply_symbol(|k| Complex64::new(k.abs() * (k.abs() * h0).tanh(), 0.0))
}

/// Truncated Taylor expansion of the Dirichlet-Neumann operator for one
/// surface profile.
#[derive(Debug)]
pub struct DnExpansion {
    grid: Arc<Grid1D>,
    h0: f64,
    order: usize,
    /// Spectral powers `eta^p` for `p = 0..=order`, products dealiased.
    eta_pow: Vec<Field1D>,
}

impl DnExpansion {
    pub fn new(
        grid: Arc<Grid1D>,
        eta: &[f64],
        h0: f64,
        order: usize,
    ) -> Result<Self, DnError> {
        if !(h0.is_finite() && h0 > 0.0) {
            return Err(DnError::BadDepth(h0));
        }
        let amp = eta.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if amp >= h0 {
            return Err(DnError::SurfaceTooSteep { amp, h0 });
        }
        let eta_field = Field1D::from_physical_real(grid.clone(), eta)?;
        let mut eta_pow = Vec::with_capacity(order + 1);
        let mut ones = Field1D::zeros(grid.clone());
        ones.set_mode(0, Complex64::ONE);
        eta_pow.push(ones);
        for p in 1..=order {
            let next = eta_pow[p - 1].multiply(&eta_field);
            eta_pow.push(next);
        }
        Ok(Self {
            grid,
            h0,
            order,
            eta_pow,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    fn tanh_h0(&self, k: f64) -> f64 {
        (k.abs() * self.h0).tanh()
    }

    /// `|k|^p`, optionally with the `tanh(|k| h0)` factor.
    fn abs_pow(&self, p: u32, with_tanh: bool) -> impl Fn(f64) -> Complex64 + '_ {
        move |k: f64| {
            let mut v = k.abs().powi(p as i32);
            if with_tanh {
                v *= self.tanh_h0(k);
            }
            Complex64::new(v, 0.0)
        }
    }

    /// `k |k|^{p}` (the `D |D|^{j-1}` factor), optionally with tanh.
    fn signed_pow(&self, p: u32, with_tanh: bool) -> impl Fn(f64) -> Complex64 + '_ {
        move |k: f64| {
            let mut v = k * k.abs().powi(p as i32);
            if with_tanh {
                v *= self.tanh_h0(k);
            }
            Complex64::new(v, 0.0)
        }
    }

    /// The degree-`j` Taylor term applied to a trace datum.
    pub fn apply_term(&self, j: usize, phi: &Field1D) -> Result<Field1D, DnError> {
        if j > self.order {
            return Err(DnError::OrderTooHigh {
                got: j,
                max: self.order,
            });
        }
        Ok(self.term_inner(j, phi))
    }

    fn term_inner(&self, j: usize, phi: &Field1D) -> Field1D {
        if j == 0 {
            return g0_apply(phi, self.h0);
        }
        let even = j % 2 == 0;
        let inv_fact = 1.0 / factorial(j);

        // leading bracket: eta^j |D|^{j+1} [tanh] Phi - i (eta^j)_x D |D|^{j-1} [tanh] Phi
        let lead_a = self.eta_pow[j]
            .multiply(&phi.apply_symbol(self.abs_pow(j as u32 + 1, even)))
            .scale(Complex64::new(inv_fact, 0.0));
        let lead_b = self.eta_pow[j]
            .derivative()
            .multiply(&phi.apply_symbol(self.signed_pow(j as u32 - 1, even)))
            .scale(Complex64::new(0.0, -inv_fact));
        let mut result = lead_a.add(&lead_b);

        // tails: -(1/(j-nu)!) G_nu (eta^{j-nu} |D|^{j-nu} [tanh] Phi), where
        // the tanh factor attaches to the opposite parity of j
        for nu in 0..j {
            let p = (j - nu) as u32;
            let with_tanh = if even { nu % 2 == 1 } else { nu % 2 == 0 };
            let arg = self.eta_pow[j - nu].multiply(&phi.apply_symbol(self.abs_pow(p, with_tanh)));
            let term = self.term_inner(nu, &arg);
            result = result.sub(&term.scale(Complex64::new(1.0 / factorial(j - nu), 0.0)));
        }
        result
    }

    /// `sum_{j=0}^{J} G_j(eta) Phi`.
    pub fn apply(&self, phi: &Field1D) -> Field1D {
        self.apply_truncated(self.order, phi)
            .expect("order bounded by construction")
    }

    pub fn apply_truncated(&self, j_max: usize, phi: &Field1D) -> Result<Field1D, DnError> {
        if j_max > self.order {
            return Err(DnError::OrderTooHigh {
                got: j_max,
                max: self.order,
            });
        }
        let mut acc = Field1D::zeros(self.grid.clone());
        for j in 0..=j_max {
            acc = acc.add(&self.term_inner(j, phi));
        }
        Ok(acc)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Exact harmonic-family oracle: for `phi_k = e^{ikx} cosh(|k|(y + h0))`
/// returns the trace datum `Phi_k(x) = e^{ikx} cosh(|k|(eta + h0))` and the
/// exact surface value
/// `G(eta) Phi_k = |k| e^{ikx} sinh(|k|(eta + h0)) - eta_x ik e^{ikx} cosh(|k|(eta + h0))`.
pub fn exact_trace_oracle(
    grid: &Arc<Grid1D>,
    eta: &[f64],
    mode: i64,
    h0: f64,
) -> Result<(Field1D, Field1D), DnError> {
    if eta.len() != grid.n() {
        return Err(DnError::ShapeMismatch {
            got: eta.len(),
            want: grid.n(),
        });
    }
    let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length();
    let eta_field = Field1D::from_physical_real(grid.clone(), eta)?;
    let eta_x = eta_field.derivative().to_physical();

    let mut datum = Vec::with_capacity(grid.n());
    let mut exact = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let x = grid.point(i);
        let carrier = Complex64::from_polar(1.0, k * x);
        let depth = k.abs() * (eta[i] + h0);
        datum.push(carrier * depth.cosh());
        let normal = Complex64::new(k.abs() * depth.sinh(), 0.0)
            - eta_x[i] * Complex64::new(0.0, k) * depth.cosh();
        exact.push(carrier * normal);
    }
    Ok((
        Field1D::from_physical(grid.clone(), &datum)?,
        Field1D::from_physical(grid.clone(), &exact)?,
    ))
}
