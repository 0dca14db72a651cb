//! Doublet-mode cavity optomechanics: linearization around a strong drive
//! and the steady-state phonon occupation of the membrane under local
//! Lindblad damping.
//!
//! The linearized Hamiltonian acting on the fluctuations is
//!
//! ```text
//! H = Δ(a_R†a_R + a_L†a_L) + ω_m b†b + G(a_R†a_L + a_R a_L†)
//!   + F(b + b†) + αg[(G/Δ)(a_L + a_L†) − (a_R + a_R†)](b + b†)
//! ```
//!
//! with `Δ = ω_c − ω_d`, `α = AΔ/(Δ² − G²)` and `F = α²g(Δ² + G²)/Δ²`.

mod curve;
mod liouvillian;
mod operators;
mod steady;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curve::{
    occupation_curve, occupation_csv, steady_occupation, CoolingRequest, CurveAxis, CurveGrid, Occupation,
    CurvePoint, OccupationCurve, OccupationMinimum, CONVERGENCE_TOL,
};
pub use liouvillian::{build_liouvillian, Liouvillian, DEFAULT_DIMENSION_CAP};
pub use operators::FockSpace;
pub use steady::{propagate, steady_state, DensityMatrix, SolverReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptomechError {
    #[error("detuning equals the doublet coupling (|Δ| = G = {0}): coherent amplitude diverges")]
    DetuningAtDoubletCoupling(f64),
    #[error("zero detuning (Δ = 0): linearized couplings diverge")]
    ZeroDetuning,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("Hilbert dimension {dim} exceeds the cap {cap}; reduce the Fock cutoffs")]
    DimensionCap { dim: usize, cap: usize },
    #[error("steady-state solve did not converge: {0}")]
    Solver(String),
    #[error(
        "occupation not converged in Fock cutoff: n_b = {n_b} at {cutoffs:?}, {n_b_plus} with every cutoff + 1 ({rel_change:.3e} relative)"
    )]
    NotConverged { n_b: f64, n_b_plus: f64, rel_change: f64, cutoffs: (usize, usize, usize) },
}

/// Parameters of the driven doublet Hamiltonian, all in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptomechParams {
    pub cavity_frequency: f64,
    pub mechanical_frequency: f64,
    /// Single-photon electromechanical coupling.
    pub electromechanical_coupling: f64,
    /// Coupling between the two doublet modes.
    pub doublet_coupling: f64,
    pub drive_amplitude: f64,
    pub drive_frequency: f64,
}

impl OptomechParams {
    pub fn detuning(&self) -> f64 {
        self.cavity_frequency - self.drive_frequency
    }

    /// Sets the drive frequency so that `ω_c − ω_d = detuning`.
    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.drive_frequency = self.cavity_frequency - detuning;
        self
    }

    fn validate(&self) -> Result<(), OptomechError> {
        let fields = [
            ("cavity_frequency", self.cavity_frequency),
            ("mechanical_frequency", self.mechanical_frequency),
            ("electromechanical_coupling", self.electromechanical_coupling),
            ("doublet_coupling", self.doublet_coupling),
            ("drive_amplitude", self.drive_amplitude),
            ("drive_frequency", self.drive_frequency),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(OptomechError::Parameter(format!("{name} is not finite")));
        }
        if !(self.cavity_frequency > 0.0 && self.mechanical_frequency > 0.0) {
            return Err(OptomechError::Parameter("cavity and mechanical frequencies must be positive".into()));
        }
        if self.electromechanical_coupling < 0.0 || self.doublet_coupling < 0.0 || self.drive_amplitude < 0.0 {
            return Err(OptomechError::Parameter("couplings and drive amplitude must be non-negative".into()));
        }
        Ok(())
    }
}

/// Coefficients of the linearized Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedParams {
    pub detuning: f64,
    /// Coherent amplitude `α = AΔ/(Δ² − G²)`.
    pub amplitude: f64,
    /// `αg`, coupling of the driven mode quadrature to the membrane.
    pub right_coupling: f64,
    /// `αgG/Δ`, coupling of the undriven mode quadrature to the membrane.
    pub left_coupling: f64,
    /// `α²g(Δ² + G²)/Δ²`, the constant force on the membrane.
    pub static_force: f64,
    pub doublet_coupling: f64,
    pub mechanical_frequency: f64,
}

impl LinearizedParams {
    /// Same couplings with the constant force removed.
    pub fn without_force(mut self) -> Self {
        self.static_force = 0.0;
        self
    }
}

pub fn linearize(p: &OptomechParams) -> Result<LinearizedParams, OptomechError> {
    p.validate()?;
    let delta = p.detuning();
    let big_g = p.doublet_coupling;
    if delta == 0.0 {
        return Err(OptomechError::ZeroDetuning);
    }
    if delta.abs() == big_g {
        return Err(OptomechError::DetuningAtDoubletCoupling(big_g));
    }
    let g = p.electromechanical_coupling;
    let amplitude = p.drive_amplitude * delta / (delta * delta - big_g * big_g);
    Ok(LinearizedParams {
        detuning: delta,
        amplitude,
        right_coupling: amplitude * g,
        left_coupling: amplitude * g * big_g / delta,
        static_force: amplitude * amplitude * g * (delta * delta + big_g * big_g) / (delta * delta),
        doublet_coupling: big_g,
        mechanical_frequency: p.mechanical_frequency,
    })
}

/// Cavity and membrane damping, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DissipationSpec {
    /// Energy decay rate of each doublet mode.
    pub cavity_decay: f64,
    pub mechanical_decay: f64,
    /// Thermal phonon number of the membrane bath.
    pub thermal_occupation: f64,
}

impl DissipationSpec {
    fn validate(&self) -> Result<(), OptomechError> {
        if !(self.cavity_decay > 0.0 && self.mechanical_decay > 0.0) {
            return Err(OptomechError::Parameter("decay rates must be positive".into()));
        }
        if !(self.thermal_occupation >= 0.0 && self.thermal_occupation.is_finite()) {
            return Err(OptomechError::Parameter("thermal occupation must be non-negative".into()));
        }
        Ok(())
    }
}

impl Default for DissipationSpec {
    /// `κ = 0.1`, `γ = 1e-4`, `n_th = 10` in units of the mechanical frequency.
    fn default() -> Self {
        Self { cavity_decay: 0.1, mechanical_decay: 1e-4, thermal_occupation: 10.0 }
    }
}

/// Number of Fock levels kept for each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    pub right: usize,
    pub left: usize,
    pub mechanics: usize,
}

impl TruncationSpec {
    pub fn new(right: usize, left: usize, mechanics: usize) -> Self {
        Self { right, left, mechanics }
    }

    pub fn dimension(&self) -> usize {
        self.right * self.left * self.mechanics
    }

    pub fn incremented(&self) -> Self {
        Self::new(self.right + 1, self.left + 1, self.mechanics + 1)
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.right, self.left, self.mechanics)
    }

    fn validate(&self) -> Result<(), OptomechError> {
        if self.right < 2 || self.left < 2 || self.mechanics < 2 {
            return Err(OptomechError::Parameter("every Fock cutoff must be at least 2".into()));
        }
        Ok(())
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self::new(3, 3, 12)
    }
}
