//! Post geometry, the coupling law and the re-entrant eigenmode solver.
//!
//! Each active post `i` contributes an elastance `1/C_i` (gap capacitor) and
//! a self inductance `L0`; post pairs share a mutual inductance `M(d)`. The
//! mode frequencies solve the symmetric-definite generalized problem
//!
//! ```text
//! C⁻¹ v = ω² L v
//! ```
//!
//! where `v` is the vector of post currents.

mod assemble;
mod solve;
pub mod shapes;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assemble::{assemble_matrices, gap_capacitance, mutual_inductance, LatticeMatrices};
pub use solve::{solve_modes, ModeSolution};

/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("post {id} is not an oscillator (gap {gap} m, height {height} m)")]
    NotAnOscillator { id: u32, gap: f64, height: f64 },
    #[error("invalid post {id}: {reason}")]
    InvalidPost { id: u32, reason: String },
    #[error("posts {a} and {b} occupy the same position")]
    CoincidentPosts { a: u32, b: u32 },
    #[error("duplicate post id {0}")]
    DuplicateId(u32),
    #[error("invalid coupling model: {0}")]
    InvalidCoupling(String),
    #[error("lattice has no active posts")]
    NoActivePosts,
    #[error(
        "inductance matrix is not positive definite (strongest pair {a}-{b}, M/L0 = {ratio:.6}); reduce kappa0"
    )]
    NotPositiveDefinite { a: u32, b: u32, ratio: f64 },
    #[error("eigen solver failed: {0}")]
    Solver(String),
}

/// Oscillator state of a post, decided by its gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PostState {
    /// `gap = 0`: the post touches the wall and acts as a screen.
    Shorted,
    /// `0 < gap < height`: a resonating post.
    Active,
    /// `gap = height`: no post at all.
    Absent,
}

/// One re-entrant post. All lengths in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Post {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub height: f64,
    pub gap: f64,
}

impl Post {
    pub fn new(id: u32, x: f64, y: f64, radius: f64, height: f64, gap: f64) -> Self {
        Self { id, x, y, radius, height, gap }
    }

    pub fn state(&self) -> PostState {
        if self.gap <= 0.0 {
            PostState::Shorted
        } else if self.gap >= self.height {
            PostState::Absent
        } else {
            PostState::Active
        }
    }

    pub fn is_active(&self) -> bool {
        self.state() == PostState::Active
    }

    pub fn distance(&self, other: &Post) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn validate(&self) -> Result<(), LatticeError> {
        let bad = |reason: &str| LatticeError::InvalidPost { id: self.id, reason: reason.to_owned() };
        if ![self.x, self.y, self.radius, self.height, self.gap].iter().all(|v| v.is_finite()) {
            return Err(bad("non-finite geometry"));
        }
        if self.radius <= 0.0 {
            return Err(bad("radius must be positive"));
        }
        if self.height <= 0.0 {
            return Err(bad("height must be positive"));
        }
        if self.gap < 0.0 || self.gap > self.height {
            return Err(bad("gap must lie in [0, height]"));
        }
        Ok(())
    }
}

/// Mutual-inductance law `M(d) = kappa0 · L0 · exp(-d / d0)`.
///
/// `cutoff`, when set, zeroes the coupling of pairs farther apart than the
/// given distance (nearest-neighbour chains).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingModel {
    #[serde(rename = "L0")]
    pub base_inductance: f64,
    #[serde(rename = "kappa0")]
    pub coupling_strength: f64,
    #[serde(rename = "d0")]
    pub decay_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl CouplingModel {
    pub fn new(base_inductance: f64, coupling_strength: f64, decay_length: f64) -> Self {
        Self { base_inductance, coupling_strength, decay_length, cutoff: None }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let err = |s: &str| Err(LatticeError::InvalidCoupling(s.to_owned()));
        if !(self.base_inductance.is_finite() && self.base_inductance > 0.0) {
            return err("L0 must be positive");
        }
        if !(self.coupling_strength.is_finite() && (0.0..0.5).contains(&self.coupling_strength)) {
            return err("kappa0 must lie in [0, 0.5)");
        }
        if !(self.decay_length.is_finite() && self.decay_length > 0.0) {
            return err("d0 must be positive");
        }
        if let Some(c) = self.cutoff {
            if !(c.is_finite() && c > 0.0) {
                return err("cutoff must be positive");
            }
        }
        Ok(())
    }

    /// Coupling at center-to-center distance `d`.
    pub fn at_distance(&self, d: f64) -> f64 {
        if let Some(c) = self.cutoff {
            if d > c {
                return 0.0;
            }
        }
        self.coupling_strength * self.base_inductance * (-d / self.decay_length).exp()
    }
}

/// A collection of posts plus the coupling law between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeModel {
    #[serde(default)]
    pub label: String,
    pub coupling: CouplingModel,
    pub posts: Vec<Post>,
    /// Shorted posts sever the coupling of any active pair whose connecting
    /// segment passes closer than this to the screen center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen_clearance: Option<f64>,
}

impl LatticeModel {
    pub fn new(label: impl Into<String>, coupling: CouplingModel, posts: Vec<Post>) -> Self {
        Self { label: label.into(), coupling, posts, screen_clearance: None }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice serializes")
    }

    pub fn active_posts(&self) -> impl Iterator<Item = &Post> {
        self.posts.iter().filter(|p| p.is_active())
    }

    pub fn active_count(&self) -> usize {
        self.active_posts().count()
    }

    pub fn post(&self, id: u32) -> Option<&Post> {
        self.posts.iter().find(|p| p.id == id)
    }

    pub fn post_mut(&mut self, id: u32) -> Option<&mut Post> {
        self.posts.iter_mut().find(|p| p.id == id)
    }

    /// Checks geometry and coupling parameters; does not require active posts.
    pub fn validate(&self) -> Result<(), LatticeError> {
        self.coupling.validate()?;
        for p in &self.posts {
            p.validate()?;
        }
        for (i, a) in self.posts.iter().enumerate() {
            for b in &self.posts[i + 1..] {
                if a.id == b.id {
                    return Err(LatticeError::DuplicateId(a.id));
                }
                if a.x == b.x && a.y == b.y {
                    return Err(LatticeError::CoincidentPosts { a: a.id, b: b.id });
                }
            }
        }
        if let Some(c) = self.screen_clearance {
            if !(c.is_finite() && c >= 0.0) {
                return Err(LatticeError::InvalidCoupling("screen_clearance must be non-negative".into()));
            }
        }
        Ok(())
    }
}
