//! Classification of lattice modes: current sign patterns, degeneracy,
//! frustration, ring mode orders, polarization branches and localization.

mod groups;
mod participation;
mod pattern;
mod polarization;
mod report;
mod ring;

use thiserror::Error;

use crate::lattice::LatticeError;

pub use groups::{group_degenerate, DegeneracyGroups, DEFAULT_DEGENERACY_TOL};
pub use participation::participation;
pub use pattern::{classify_sign_pattern, SignPattern, Symbol, DEFAULT_ZERO_THRESHOLD};
pub use polarization::{
    cell_primitives, classify_polarization, extract_dispersion, DispersionCurve, DispersionPoint, Polarization,
    MIN_POLARIZATION_SCORE,
};
pub use report::{
    analyze, analyze_solution, perturbed_model, resolved_patterns, AnalysisOptions, ModeEntry, ModeReport,
    SYMMETRY_BREAKING,
};
pub use ring::{count_families, describe_ring, is_frustrated, ring_mode_numbers, RingModeDescriptor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("eigenvector has no component above the zero threshold")]
    DegenerateVector,
    #[error("threshold {0} out of range")]
    Threshold(f64),
    #[error("invalid sign pattern: {0}")]
    Pattern(String),
    #[error("invalid ring order: {0}")]
    RingOrder(String),
    #[error("invalid cell layout: {0}")]
    CellSize(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
