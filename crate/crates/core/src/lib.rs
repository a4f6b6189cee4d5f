//! Ground-state numerics for bosons in a one-dimensional double well.
//!
//! The crate is `no_std` (with `alloc`) and covers the whole numerical
//! pipeline:
//!
//! - [`grid`]: uniform symmetric grid, double-well potential, interaction
//!   kernel, quadrature and convolution.
//! - [`schrodinger`]: finite-difference one-body operator and parity-resolved
//!   eigensolver.
//! - [`meanfield`]: Hartree minimisation, mean-field spectrum, localized modes
//!   and tunneling diagnostics.
//! - [`twomode`]: two-mode coefficients, the projected two-mode Hamiltonian in
//!   the occupation basis, the Bose-Hubbard dimer and gaussian trial states.
//! - [`bogoliubov`]: right/left excited-sector blocks and the Bogoliubov
//!   energy computed by two independent routes.
//! - [`oracle`]: brute-force many-body diagonalization on a truncated mode set
//!   and the excitation map.
//!
//! File formats, configuration and scans live in the `twowell` crate.

#![no_std]
// `!(x > 0.0)` rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bogoliubov;
mod error;
pub mod grid;
pub mod linalg;
pub(crate) mod math;
pub mod meanfield;
pub mod oracle;
pub mod schrodinger;
pub mod twomode;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;
