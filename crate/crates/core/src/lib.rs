//! Relational quantum frames at desk scale.
//!
//! The crate is split by subsystem:
//!
//! - [`hilbert`]: dense state vectors, operators, tensor products, projective
//!   measurement and partial traces.
//! - [`measurement`]: the system/apparatus/environment measurement chain, the
//!   change-of-basis rewrite, pointer-basis projection and dephasing.
//! - [`relations`]: frame graphs, equivalence-class checks, the intransitivity
//!   detector, reciprocal superpositions and per-frame local clocks.
//! - [`transforms`]: mass-ratio length dilation, de Broglie products, the
//!   quantum interval and the γ/δ factors.
//! - [`wavepacket`]: spectral free-particle propagation on a periodic grid and
//!   a double-slit screen readout.
//! - [`nested`]: chains of relative amplitudes between nested frames.

pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod nested;
pub mod relations;
pub mod transforms;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;
