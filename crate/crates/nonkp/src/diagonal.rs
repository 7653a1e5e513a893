//! Eigen-structure of the linear part and the diagonalized evolution.
//!
//! Per Fourier mode the linear symbol is
//!
//! ```text
//! A(xi, mu) = i [ -xi/(1+xi^2)  -mu ]
//!               [ -mu/(1+xi^2)   0  ]
//! ```
//!
//! with eigenvalues `-i omega_1, -i omega_2` for the two dispersion branches
//!
//! ```text
//! omega_{1,2} = (xi +- sqrt(xi^2 + 4 mu^2 (1+xi^2))) / (2 (1+xi^2)).
//! ```
//!
//! The change of variables `(u, v) -> (w1, w2)` diagonalizes the linear part;
//! the quadratic nonlinearity becomes a pair of Fourier multipliers `M1, M2`
//! acting on the transform of `u^2`.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{SpectralField};
use crate::grid::Grid2D;
use crate::model::StateUV;

#[derive(Debug, Error, PartialEq)]
pub enum DispersionError {
    #[error("symbol evaluation is not finite at (xi={xi}, mu={mu})")]
    NonFinite { xi: f64, mu: f64 },
}

/// Both dispersion branches at one mode, `omega_1 >= omega_2`.
///
/// The smaller-magnitude root is recovered from the product identity
/// `omega_1 * omega_2 = -mu^2/(1+xi^2)` instead of the subtractive formula,
/// which cancels catastrophically for `|xi| >> |mu|`.
pub fn omega_pair(xi: f64, mu: f64) -> (f64, f64) {
    let one_xi2 = 1.0 + xi * xi;
    let disc = xi * xi + 4.0 * mu * mu * one_xi2;
    let s = disc.sqrt();
    if s == 0.0 {
        return (0.0, 0.0);
    }
    if xi >= 0.0 {
        let w1 = (xi + s) / (2.0 * one_xi2);
        let w2 = -2.0 * mu * mu / (xi + s);
        (w1, w2)
    } else {
        let w2 = (xi - s) / (2.0 * one_xi2);
        let w1 = 2.0 * mu * mu / (s - xi);
        (w1, w2)
    }
}

/// One dispersion branch; branch 1 carries the `+` sign.
pub fn omega(branch: Branch, xi: f64, mu: f64) -> f64 {
    let (w1, w2) = omega_pair(xi, mu);
    match branch {
        Branch::One => w1,
        Branch::Two => w2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    One,
    Two,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::One, Branch::Two];

    pub fn index(self) -> usize {
        match self {
            Branch::One => 0,
            Branch::Two => 1,
        }
    }
}

/// Nonlinear multipliers `M1 = i (xi w1 + mu^2) / (2 sqrt(disc))` and
/// `M2 = -i (xi w2 + mu^2) / (2 sqrt(disc))`; the origin takes the limit 0.
pub fn multiplier_pair(xi: f64, mu: f64) -> (Complex64, Complex64) {
    let s = (xi * xi + 4.0 * mu * mu * (1.0 + xi * xi)).sqrt();
    if s == 0.0 {
        return (Complex64::ZERO, Complex64::ZERO);
    }
    let (w1, w2) = omega_pair(xi, mu);
    let m1 = Complex64::new(0.0, (xi * w1 + mu * mu) / (2.0 * s));
    let m2 = Complex64::new(0.0, -(xi * w2 + mu * mu) / (2.0 * s));
    (m1, m2)
}

pub fn multiplier(branch: Branch, xi: f64, mu: f64) -> Complex64 {
    let (m1, m2) = multiplier_pair(xi, mu);
    match branch {
        Branch::One => m1,
        Branch::Two => m2,
    }
}

/// Precomputed per-mode eigen data for one grid.
///
/// On non-degenerate modes the eigenvector matrix is
/// `P = [[1, 1], [mu/((1+xi^2) w1), mu/((1+xi^2) w2)]]` with the inverse
/// `P^{-1} = [[w1, mu], [-w2, -mu]] / (w1 - w2)`.
///
/// On `mu = 0` rows `A` is already diagonal and `P` degenerates; there the
/// pairing is the identity for `xi >= 0` and the swap for `xi < 0`, so that
/// the branch whose frequency equals `xi/(1+xi^2)` carries the `u` component
/// and the other branch carries `v` with frequency 0.
pub struct SymbolTable {
    grid: Arc<Grid2D>,
    omega1: Vec<f64>,
    omega2: Vec<f64>,
    sqrt_disc: Vec<f64>,
    m1: Vec<Complex64>,
    m2: Vec<Complex64>,
    /// Row-major 2x2 entries `[p11, p12, p21, p22]` per mode.
    p: Vec<[f64; 4]>,
    pinv: Vec<[f64; 4]>,
    degenerate: Vec<bool>,
}

impl SymbolTable {
    pub fn build(grid: Arc<Grid2D>) -> Self {
        let n = grid.len();
        let mut omega1 = Vec::with_capacity(n);
        let mut omega2 = Vec::with_capacity(n);
        let mut sqrt_disc = Vec::with_capacity(n);
        let mut m1 = Vec::with_capacity(n);
        let mut m2 = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let mut pinv = Vec::with_capacity(n);
        let mut degenerate = Vec::with_capacity(n);
        for k in 0..grid.ny() {
            let mu = grid.mu(k);
            for j in 0..grid.nx() {
                let xi = grid.xi(j);
                let (w1, w2) = omega_pair(xi, mu);
                let (mm1, mm2) = multiplier_pair(xi, mu);
                omega1.push(w1);
                omega2.push(w2);
                sqrt_disc.push((xi * xi + 4.0 * mu * mu * (1.0 + xi * xi)).sqrt());
                m1.push(mm1);
                m2.push(mm2);
                if mu == 0.0 {
                    degenerate.push(true);
                    if xi >= 0.0 {
                        p.push([1.0, 0.0, 0.0, 1.0]);
                        pinv.push([1.0, 0.0, 0.0, 1.0]);
                    } else {
                        p.push([0.0, 1.0, 1.0, 0.0]);
                        pinv.push([0.0, 1.0, 1.0, 0.0]);
                    }
                } else {
                    degenerate.push(false);
                    let one_xi2 = 1.0 + xi * xi;
                    let dw = w1 - w2;
                    p.push([1.0, 1.0, mu / (one_xi2 * w1), mu / (one_xi2 * w2)]);
                    pinv.push([w1 / dw, mu / dw, -w2 / dw, -mu / dw]);
                }
            }
        }
        Self {
            grid,
            omega1,
            omega2,
            sqrt_disc,
            m1,
            m2,
            p,
            pinv,
            degenerate,
        }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn omega1(&self) -> &[f64] {
        &self.omega1
    }

    pub fn omega2(&self) -> &[f64] {
        &self.omega2
    }

    pub fn omega_of(&self, branch: Branch, idx: usize) -> f64 {
        match branch {
            Branch::One => self.omega1[idx],
            Branch::Two => self.omega2[idx],
        }
    }

    pub fn sqrt_disc(&self) -> &[f64] {
        &self.sqrt_disc
    }

    pub fn multipliers(&self) -> (&[Complex64], &[Complex64]) {
        (&self.m1, &self.m2)
    }

    pub fn p_entries(&self, idx: usize) -> [f64; 4] {
        self.p[idx]
    }

    pub fn pinv_entries(&self, idx: usize) -> [f64; 4] {
        self.pinv[idx]
    }

    pub fn is_degenerate(&self, idx: usize) -> bool {
        self.degenerate[idx]
    }
}

/// The diagonal pair `(w1, w2)` at one time instant.
///
/// For data reconstructing a real `(u, v)` the coefficients satisfy the
/// cross relation `w1(-xi, -mu) = conj(w2(xi, mu))` away from the origin.
#[derive(Clone, Debug)]
pub struct StateW {
    pub w1: SpectralField,
    pub w2: SpectralField,
    pub t: f64,
}

impl StateW {
    pub fn new(w1: SpectralField, w2: SpectralField, t: f64) -> Self {
        assert!(w1.same_grid(&w2), "w1 and w2 must share a grid");
        Self { w1, w2, t }
    }

    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        Self {
            w1: SpectralField::zeros(grid.clone()),
            w2: SpectralField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w1.is_finite() && self.w2.is_finite()
    }
}

/// Modewise `w = P^{-1} (u, v)`.
pub fn to_diagonal(state: &StateUV, tab: &SymbolTable) -> StateW {
    assert!(state.u.grid().same_grid(tab.grid()), "grid mismatch");
    let mut w1 = SpectralField::zeros(tab.grid().clone());
    let mut w2 = SpectralField::zeros(tab.grid().clone());
    for idx in 0..tab.grid().len() {
        let [a, b, c, d] = tab.pinv[idx];
        let uh = state.u.coeffs()[idx];
        let vh = state.v.coeffs()[idx];
        w1.coeffs_mut()[idx] = a * uh + b * vh;
        w2.coeffs_mut()[idx] = c * uh + d * vh;
    }
    StateW::new(w1, w2, state.t)
}

/// Modewise `(u, v) = P w`.
pub fn from_diagonal(w: &StateW, tab: &SymbolTable) -> StateUV {
    assert!(w.w1.grid().same_grid(tab.grid()), "grid mismatch");
    let mut u = SpectralField::zeros(tab.grid().clone());
    let mut v = SpectralField::zeros(tab.grid().clone());
    for idx in 0..tab.grid().len() {
        let [a, b, c, d] = tab.p[idx];
        let w1 = w.w1.coeffs()[idx];
        let w2 = w.w2.coeffs()[idx];
        u.coeffs_mut()[idx] = a * w1 + b * w2;
        v.coeffs_mut()[idx] = c * w1 + d * w2;
    }
    StateUV::new(u, v, w.t)
}

/// The `u` component of `P w` alone (first row of the reconstruction).
pub fn reconstruct_u(w: &StateW, tab: &SymbolTable) -> SpectralField {
    let mut u = SpectralField::zeros(tab.grid().clone());
    for idx in 0..tab.grid().len() {
        let [a, b, _, _] = tab.p[idx];
        u.coeffs_mut()[idx] = a * w.w1.coeffs()[idx] + b * w.w2.coeffs()[idx];
    }
    u
}

/// Transform of the dealiased square of the reconstructed `u`.
pub fn nonlinear_square(w: &StateW, tab: &SymbolTable) -> SpectralField {
    let u = reconstruct_u(w, tab);
    let up = u.to_physical();
    let sq: Vec<f64> = up.iter().map(|x| x * x).collect();
    SpectralField::from_physical(tab.grid().clone(), &sq)
        .expect("shape preserved")
        .dealias_two_thirds()
}

/// Right-hand side of the diagonal system:
/// `dw_i = -i omega_i w_i - M_i * F[(u)^2]`.
pub fn rhs_diagonal(w: &StateW, tab: &SymbolTable) -> (SpectralField, SpectralField) {
    let lambda = nonlinear_square(w, tab);
    let mut d1 = SpectralField::zeros(tab.grid().clone());
    let mut d2 = SpectralField::zeros(tab.grid().clone());
    for idx in 0..tab.grid().len() {
        let lam = lambda.coeffs()[idx];
        d1.coeffs_mut()[idx] =
            Complex64::new(0.0, -tab.omega1[idx]) * w.w1.coeffs()[idx] - tab.m1[idx] * lam;
        d2.coeffs_mut()[idx] =
            Complex64::new(0.0, -tab.omega2[idx]) * w.w2.coeffs()[idx] - tab.m2[idx] * lam;
    }
    (d1, d2)
}

/// The nonlinear forcing alone, `(-M1 lambda, -M2 lambda)`.
pub(crate) fn nonlinear_rhs(w: &StateW, tab: &SymbolTable) -> (SpectralField, SpectralField) {
    let lambda = nonlinear_square(w, tab);
    let mut d1 = SpectralField::zeros(tab.grid().clone());
    let mut d2 = SpectralField::zeros(tab.grid().clone());
    for idx in 0..tab.grid().len() {
        let lam = lambda.coeffs()[idx];
        d1.coeffs_mut()[idx] = -tab.m1[idx] * lam;
        d2.coeffs_mut()[idx] = -tab.m2[idx] * lam;
    }
    (d1, d2)
}

/// Operator family selection for the generalized two-branch dispersion
/// relation of the broader model class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorFamily {
    /// `K1 = 1 - d^2/dX^2`, `K2 = L1 = L2 = 1`.
    Kp,
    /// `K1 = (1 + 1/6 d^2/dX^2) / (1 - 1/6 d^2/dX^2)`, `K2 = L1 = 1`,
    /// `L2 = sqrt(1 - 1/6 d^2/dX^2)`.
    Bbm,
}

impl OperatorFamily {
    fn k1_hat(self, xi: f64) -> f64 {
        match self {
            OperatorFamily::Kp => 1.0 + xi * xi,
            OperatorFamily::Bbm => (1.0 - xi * xi / 6.0) / (1.0 + xi * xi / 6.0),
        }
    }

    fn k2_hat(self, _xi: f64) -> f64 {
        1.0
    }

    fn l1_hat(self, _xi: f64) -> f64 {
        1.0
    }
}

/// Both roots of
/// `4 omega = xi (-2U L1 + L1^2 + K1) +- sqrt(xi^2 (-2U L1 + L1^2 + K1)^2
///  + 4 mu^2 K2 (L1^2 + K1))`, symbols evaluated at `xi`.
pub fn generalized_dispersion(
    family: OperatorFamily,
    u_speed: f64,
    xi: f64,
    mu: f64,
) -> Result<(f64, f64), DispersionError> {
    let l1 = family.l1_hat(xi);
    let k1 = family.k1_hat(xi);
    let k2 = family.k2_hat(xi);
    let drift = -2.0 * u_speed * l1 + l1 * l1 + k1;
    let disc = xi * xi * drift * drift + 4.0 * mu * mu * k2 * (l1 * l1 + k1);
    let root = disc.sqrt();
    let plus = (xi * drift + root) / 4.0;
    let minus = (xi * drift - root) / 4.0;
    if !(plus.is_finite() && minus.is_finite()) {
        return Err(DispersionError::NonFinite { xi, mu });
    }
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init;
    use crate::model::{rhs_physical, StateUV};
    use std::f64::consts::TAU;

    fn grid(n: usize) -> Arc<Grid2D> {
        Grid2D::shared(n, n, TAU, TAU).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn omega_closed_values() {
        assert_eq!(omega_pair(0.0, 0.0), (0.0, 0.0));
        let (w1, w2) = omega_pair(1.0, 0.0);
        assert!((w1 - 0.5).abs() < 1e-15);
        assert_eq!(w2, 0.0);
        let (w1, w2) = omega_pair(0.0, 3.0);
        assert!((w1 - 3.0).abs() < 1e-12);
        assert!((w2 + 3.0).abs() < 1e-12);
        let (w1, w2) = omega_pair(-1.0, 0.0);
        assert_eq!(w1, 0.0);
        assert!((w2 + 0.5).abs() < 1e-15);
    }

    #[test]
    fn omega_trace_and_determinant_identities() {
        let g = grid(32);
        for k in 0..32 {
            for j in 0..32 {
                let (xi, mu) = (g.xi(j), g.mu(k));
                let (w1, w2) = omega_pair(xi, mu);
                assert!(w1 >= w2);
                let one_xi2 = 1.0 + xi * xi;
                assert!(
                    (w1 + w2 - xi / one_xi2).abs() < 1e-12 * (1.0 + w1.abs() + w2.abs()),
                    "trace identity at ({xi}, {mu})"
                );
                assert!(
                    (w1 * w2 + mu * mu / one_xi2).abs() < 1e-12 * (1.0 + mu * mu),
                    "determinant identity at ({xi}, {mu})"
                );
            }
        }
    }

    #[test]
    fn omega_roots_solve_characteristic_polynomial() {
        let g = grid(32);
        for k in 0..32 {
            for j in 0..32 {
                let (xi, mu) = (g.xi(j), g.mu(k));
                let one_xi2 = 1.0 + xi * xi;
                for br in Branch::BOTH {
                    let lambda = c(0.0, -omega(br, xi, mu));
                    let residual = lambda * lambda
                        + c(0.0, xi / one_xi2) * lambda
                        + c(mu * mu / one_xi2, 0.0);
                    assert!(
                        residual.norm() < 1e-12 * (1.0 + lambda.norm_sqr()),
                        "characteristic polynomial at ({xi}, {mu})"
                    );
                }
            }
        }
    }

    #[test]
    fn omega_is_cancellation_safe_at_high_xi() {
        // at |xi| >> |mu| the small root is -mu^2/xi + O(xi^-3); the naive
        // subtractive formula loses most of its digits here
        let (xi, mu) = (800.0, 1e-3);
        let (_, w2) = omega_pair(xi, mu);
        let exact_product = -mu * mu / (1.0 + xi * xi);
        let (w1, _) = omega_pair(xi, mu);
        assert!(((w1 * w2 - exact_product) / exact_product).abs() < 1e-13);
    }

    #[test]
    fn multiplier_closed_values() {
        let (m1, m2) = multiplier_pair(1.0, 0.0);
        assert!((m1 - c(0.0, 0.25)).norm() < 1e-15);
        assert!(m2.norm() < 1e-15);
        let (m1, m2) = multiplier_pair(-1.0, 0.0);
        assert!(m1.norm() < 1e-15);
        assert!((m2 - c(0.0, -0.25)).norm() < 1e-15);
        assert_eq!(multiplier_pair(0.0, 0.0), (Complex64::ZERO, Complex64::ZERO));
    }

    #[test]
    fn multiplier_sum_identity() {
        // M1 + M2 = i xi / (2 (1 + xi^2)) everywhere defined
        let g = grid(24);
        for k in 0..24 {
            for j in 0..24 {
                let (xi, mu) = (g.xi(j), g.mu(k));
                let (m1, m2) = multiplier_pair(xi, mu);
                if xi == 0.0 && mu == 0.0 {
                    continue;
                }
                let want = c(0.0, xi / (2.0 * (1.0 + xi * xi)));
                assert!(
                    (m1 + m2 - want).norm() < 1e-13,
                    "sum identity at ({xi}, {mu}): {:?}",
                    m1 + m2
                );
            }
        }
    }

    fn symbol_matrix(xi: f64, mu: f64) -> [Complex64; 4] {
        let one_xi2 = 1.0 + xi * xi;
        [
            c(0.0, -xi / one_xi2),
            c(0.0, -mu),
            c(0.0, -mu / one_xi2),
            Complex64::ZERO,
        ]
    }

    #[test]
    fn eigen_identity_at_every_mode() {
        let g = grid(16);
        let tab = SymbolTable::build(g.clone());
        for idx in 0..g.len() {
            let (j, k) = (idx % 16, idx / 16);
            let (xi, mu) = (g.xi(j), g.mu(k));
            let a = symbol_matrix(xi, mu);
            if tab.is_degenerate(idx) {
                // A is already diagonal on mu = 0 rows
                assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
                continue;
            }
            let p = tab.p_entries(idx);
            let pinv = tab.pinv_entries(idx);
            let d = [
                c(0.0, -tab.omega1()[idx]),
                Complex64::ZERO,
                Complex64::ZERO,
                c(0.0, -tab.omega2()[idx]),
            ];
            // P D P^{-1}
            let pd = [p[0] * d[0], p[1] * d[3], p[2] * d[0], p[3] * d[3]];
            let pdp = [
                pd[0] * pinv[0] + pd[1] * pinv[2],
                pd[0] * pinv[1] + pd[1] * pinv[3],
                pd[2] * pinv[0] + pd[3] * pinv[2],
                pd[2] * pinv[1] + pd[3] * pinv[3],
            ];
            let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (got, want) in pdp.iter().zip(&a) {
                assert!(
                    (got - want).norm() < 1e-12 * scale,
                    "A = P D P^-1 fails at ({xi}, {mu}): {got:?} vs {want:?}"
                );
            }
            // P^{-1} P = I
            let prod = [
                pinv[0] * p[0] + pinv[1] * p[2],
                pinv[0] * p[1] + pinv[1] * p[3],
                pinv[2] * p[0] + pinv[3] * p[2],
                pinv[2] * p[1] + pinv[3] * p[3],
            ];
            assert!((prod[0] - 1.0).abs() < 1e-12);
            assert!(prod[1].abs() < 1e-12);
            assert!(prod[2].abs() < 1e-12);
            assert!((prod[3] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn change_of_variables_round_trips() {
        let g = grid(16);
        let tab = SymbolTable::build(g.clone());
        let s = init::smooth_random_state(&g, 0.5, 5, 31);
        let w = to_diagonal(&s, &tab);
        let back = from_diagonal(&w, &tab);
        let scale = s.u.max_abs_coeff().max(s.v.max_abs_coeff());
        assert!((&back.u - &s.u).max_abs_coeff() < 1e-12 * scale);
        assert!((&back.v - &s.v).max_abs_coeff() < 1e-12 * scale);
    }

    #[test]
    fn zero_round_trips_to_zero() {
        let g = grid(8);
        let tab = SymbolTable::build(g.clone());
        let w = to_diagonal(&StateUV::zeros(g), &tab);
        assert_eq!(w.w1.max_abs_coeff(), 0.0);
        assert_eq!(w.w2.max_abs_coeff(), 0.0);
    }

    #[test]
    fn eigenvector_data_lands_on_single_branch() {
        // (u, v) proportional to E1 at one mode: w2 vanishes there
        let g = grid(16);
        let tab = SymbolTable::build(g.clone());
        let (j, k) = (2i64, 3i64);
        let (xi, mu) = (2.0, 3.0);
        let (w1, _) = omega_pair(xi, mu);
        let amp = c(0.3, -0.7);
        let e1_v = mu / ((1.0 + xi * xi) * w1);
        let s = init::plane_wave_state(&g, (j, k), amp, amp * e1_v);
        let w = to_diagonal(&s, &tab);
        assert!(w.w2.mode(j, k).norm() < 1e-14);
        assert!((w.w1.mode(j, k) - amp).norm() < 1e-13);
    }

    #[test]
    fn reconstruction_of_diagonal_data_is_real() {
        let g = grid(16);
        let tab = SymbolTable::build(g.clone());
        let s = init::smooth_random_state(&g, 0.4, 5, 77);
        let w = to_diagonal(&s, &tab);
        let back = from_diagonal(&w, &tab);
        assert!(back.u.hermitian_defect() < 1e-13);
        assert!(back.v.hermitian_defect() < 1e-13);
    }

    #[test]
    fn diagonal_rhs_of_zero_is_zero() {
        let g = grid(8);
        let tab = SymbolTable::build(g.clone());
        let (d1, d2) = rhs_diagonal(&StateW::zeros(g), &tab);
        assert_eq!(d1.max_abs_coeff(), 0.0);
        assert_eq!(d2.max_abs_coeff(), 0.0);
    }

    #[test]
    fn conjugation_equivalence_with_physical_rhs() {
        // to_diagonal(rhs_physical(s)) = rhs_diagonal(to_diagonal(s)).
        // This is the check that pins both the 1/2 factor on M_i and the
        // -i omega sign of the linear term.
        let g = grid(24);
        let tab = SymbolTable::build(g.clone());
        for seed in [1u64, 2, 3, 4, 5] {
            let s = init::smooth_random_state(&g, 0.2, 7, seed);
            let (du, dv) = rhs_physical(&s);
            let expected = to_diagonal(&StateUV::new(du, dv, 0.0), &tab);
            let (d1, d2) = rhs_diagonal(&to_diagonal(&s, &tab), &tab);
            let scale = expected
                .w1
                .max_abs_coeff()
                .max(expected.w2.max_abs_coeff())
                .max(1e-30);
            let e1 = (&d1 - &expected.w1).max_abs_coeff() / scale;
            let e2 = (&d2 - &expected.w2).max_abs_coeff() / scale;
            assert!(e1 < 1e-10 && e2 < 1e-10, "seed {seed}: {e1:.2e} {e2:.2e}");
        }
    }

    #[test]
    fn generalized_dispersion_bbm_values() {
        let (plus, minus) = generalized_dispersion(OperatorFamily::Bbm, 0.0, 0.0, 1.0).unwrap();
        let root = 2.0f64.sqrt() / 2.0;
        assert!((plus - root).abs() < 1e-14);
        assert!((minus + root).abs() < 1e-14);
        assert_eq!(
            generalized_dispersion(OperatorFamily::Bbm, 0.0, 0.0, 0.0).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn generalized_dispersion_bbm_reduces_to_closed_form() {
        // (xi +- sqrt(xi^2 + 2 mu^2 (1 + xi^2/6))) / (2 (1 + xi^2/6))
        for (xi, mu) in [(0.5, 1.0), (2.0, 0.25), (-3.0, 1.5), (4.0, 4.0)] {
            let (plus, minus) = generalized_dispersion(OperatorFamily::Bbm, 0.0, xi, mu).unwrap();
            let q = 1.0 + xi * xi / 6.0;
            let root = (xi * xi + 2.0 * mu * mu * q).sqrt();
            assert!((plus - 0.5 * (xi + root) / q).abs() < 1e-13);
            assert!((minus - 0.5 * (xi - root) / q).abs() < 1e-13);
        }
    }

    #[test]
    fn generalized_dispersion_kp_on_axis() {
        // mu = 0: 4 omega = xi (2 + xi^2) +- |xi| (2 + xi^2),
        // roots {xi (2 + xi^2) / 2, 0} for xi > 0
        let (plus, minus) = generalized_dispersion(OperatorFamily::Kp, 0.0, 2.0, 0.0).unwrap();
        assert!((plus - 2.0 * (2.0 + 4.0) / 2.0).abs() < 1e-13);
        assert_eq!(minus, 0.0);
    }
}
