//! Wave fields of a square mass lattice driven at a single site near its
//! resonant frequency.
//!
//! Three independent routes to the same field live here:
//!
//! * [`lattice`]: direct leapfrog simulation of the equations of motion;
//! * [`transforms`]: the Laplace–Fourier solution and its resonant integral
//!   representation, evaluated with [`quadrature`];
//! * [`asymptotics`]: closed-form leading-order behaviour as `s -> 0+`
//!   (equivalently `t -> infinity`), together with the boundary-layer
//!   decomposition that produces it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod lattice;
pub mod quadrature;
pub mod transforms;

pub use num_complex::Complex64;
