//! Lumped-element simulation of two-dimensional lattices of re-entrant
//! microwave posts.
//!
//! Every post with a finite gap is an LC oscillator: the post body is an
//! inductor, the gap a parallel-plate capacitor. Neighbouring posts share
//! mutual inductance. On top of the eigenmode solver this crate provides
//! current-pattern classification, mechanical gap sweeps, a doublet-mode
//! optomechanics steady-state solver and driven transmission through
//! programmable post arrays.

pub mod analysis;
pub mod cli;
pub mod designs;
pub mod error;
pub mod lattice;
pub mod optomech;
pub mod pca;
pub mod service;
pub mod tuning;

pub use error::{Error, ErrorKind};
pub use lattice::{CouplingModel, LatticeModel, ModeSolution, Post};
