//! The coupled system in physical variables `(u, v)`.
//!
//! Operator form, with `Q = (1 - d^2/dx^2)^{-1}`:
//!
//! ```text
//! u_t = -d/dx Q(u + u^2/2) - v_y
//! v_t = -d/dy Q(u + u^2/2)
//! ```
//!
//! This is the Hamiltonian flow `eta_t = J grad H(eta)` for
//! `H = integral of (v_x^2/2 + v^2/2 + u^2/2 + u^3/6)` and the skew map
//! `J = [[-Q d/dx, -Q d/dy], [-Q d/dy, 0]]`.

use num_complex::Complex64;

use crate::field::{dealiased_product, SpectralField};

/// The physical pair `(u, v)` at one time instant. Both fields share a grid
/// and represent real functions.
#[derive(Clone, Debug)]
pub struct StateUV {
    pub u: SpectralField,
    pub v: SpectralField,
    pub t: f64,
}

impl StateUV {
    pub fn new(u: SpectralField, v: SpectralField, t: f64) -> Self {
        assert!(u.same_grid(&v), "u and v must share a grid");
        Self { u, v, t }
    }

    pub fn zeros(grid: std::sync::Arc<crate::grid::Grid2D>) -> Self {
        Self {
            u: SpectralField::zeros(grid.clone()),
            v: SpectralField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// `u + u^2/2` with the quadratic term formed pointwise and dealiased.
fn gradient_u(u: &SpectralField) -> SpectralField {
    let sq = dealiased_product(u, u).scale(Complex64::new(0.5, 0.0));
    u + &sq
}

/// Right-hand side of the full nonlinear system.
pub fn rhs_physical(state: &StateUV) -> (SpectralField, SpectralField) {
    rhs_inner(state, true)
}

/// Right-hand side with the quadratic terms dropped.
pub fn rhs_linearized(state: &StateUV) -> (SpectralField, SpectralField) {
    rhs_inner(state, false)
}

fn rhs_inner(state: &StateUV, nonlinear: bool) -> (SpectralField, SpectralField) {
    let q = if nonlinear {
        gradient_u(&state.u)
    } else {
        state.u.clone()
    };
    let qx = q.helmholtz_inverse().derivative_x();
    let qy = q.helmholtz_inverse().derivative_y();
    let vy = state.v.derivative_y();
    let du = &qx.scale(-Complex64::ONE) - &vy;
    let dv = qy.scale(-Complex64::ONE);
    (du, dv)
}

/// Conserved energy `integral of (v_x^2/2 + v^2/2 + u^2/2 + u^3/6)`.
///
/// Quadrature is the grid mean times the cell area, exact for trigonometric
/// polynomials below the aliasing limit. The cubic term uses the dealiased
/// field.
pub fn hamiltonian(state: &StateUV) -> f64 {
    let g = state.u.grid();
    let vx = state.v.derivative_x().to_physical();
    let vp = state.v.to_physical();
    let up = state.u.to_physical();
    let ud = state.u.dealias_two_thirds().to_physical();
    let mut acc = 0.0;
    for i in 0..g.len() {
        acc += 0.5 * vx[i] * vx[i] + 0.5 * vp[i] * vp[i] + 0.5 * up[i] * up[i]
            + ud[i] * ud[i] * ud[i] / 6.0;
    }
    acc * g.lx() * g.ly() / g.len() as f64
}

/// The quadratic part of the energy, conserved exactly by the linear flow.
pub fn hamiltonian_quadratic(state: &StateUV) -> f64 {
    let g = state.u.grid();
    let vx = state.v.derivative_x().to_physical();
    let vp = state.v.to_physical();
    let up = state.u.to_physical();
    let mut acc = 0.0;
    for i in 0..g.len() {
        acc += 0.5 * (vx[i] * vx[i] + vp[i] * vp[i] + up[i] * up[i]);
    }
    acc * g.lx() * g.ly() / g.len() as f64
}

/// L2 gradient of the Hamiltonian: `(u + u^2/2, (1 - d^2/dx^2) v)`.
pub fn grad_h(state: &StateUV) -> (SpectralField, SpectralField) {
    let gu = gradient_u(&state.u);
    let gv = state
        .v
        .apply_symbol(|xi, _| Complex64::new(1.0 + xi * xi, 0.0))
        .expect("polynomial symbol is finite");
    (gu, gv)
}

/// Structure map `J = [[-Q d/dx, -Q d/dy], [-Q d/dy, 0]]` applied to a pair.
pub fn apply_j(g1: &SpectralField, g2: &SpectralField) -> (SpectralField, SpectralField) {
    assert!(g1.same_grid(g2), "grid mismatch");
    let a = g1.helmholtz_inverse().derivative_x();
    let b = g2.helmholtz_inverse().derivative_y();
    let out1 = &a.scale(-Complex64::ONE) - &b;
    let out2 = g1.helmholtz_inverse().derivative_y().scale(-Complex64::ONE);
    (out1, out2)
}

/// Transverse mass profile `m(y) = integral of u dx`, one value per y row.
pub fn mass_profile(state: &StateUV) -> Vec<f64> {
    let g = state.u.grid();
    // The zero-xi column synthesized along y; all other columns integrate
    // to zero over the x period.
    let mut col: Vec<Complex64> = (0..g.ny())
        .map(|k| state.u.coeffs()[k * g.nx()])
        .collect();
    g.ifft_y().process(&mut col);
    col.iter().map(|c| g.lx() * c.re).collect()
}

/// L2 inner product of two pairs over the periodic cell.
pub fn pair_inner(
    a: &(SpectralField, SpectralField),
    b: &(SpectralField, SpectralField),
) -> f64 {
    field_inner(&a.0, &b.0) + field_inner(&a.1, &b.1)
}

/// `integral of f*g dx dy` for real fields, computed spectrally.
pub fn field_inner(f: &SpectralField, g: &SpectralField) -> f64 {
    assert!(f.same_grid(g), "grid mismatch");
    let area = f.grid().lx() * f.grid().ly();
    let s: Complex64 = f
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| a * b.conj())
        .sum();
    area * s.re
}
