//! Pseudospectral solver and verification toolkit for a coupled KP-type
//! dispersive system on the periodic plane:
//!
//! ```text
//! u_t + u_x + u u_x - u_xxt + v_y - v_xxy = 0
//! v_t - v_xxt + u_y + u u_y = 0
//! ```
//!
//! The crate evolves the system in physical variables and in diagonalized
//! form, and checks the structural properties of the model numerically:
//! the two-branch dispersion relation, Hamiltonian conservation, the wave
//! equation satisfied by the transverse mass profile, space-time norm
//! estimates for the time-localized Duhamel operator, and the Taylor
//! expansion of the Dirichlet-Neumann operator against exact solutions.

pub mod bourgain;
pub mod diagnostics;
pub mod diagonal;
pub mod dirichlet_neumann;
pub mod field;
pub mod grid;
pub mod init;
pub mod integrate;
pub mod model;

pub use field::{FieldError, SpectralField};
pub use grid::{Grid2D, GridError};
pub use num_complex::Complex64;
