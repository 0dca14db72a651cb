//! Mechanical gap sweeps: branch tracking, crossings and tuning coefficients.

mod coefficients;
mod crossings;
mod output;
mod track;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{solve_modes, LatticeError, LatticeModel};

pub use coefficients::{tuning_coefficients, BranchCoefficients};
pub use crossings::{find_avoided_crossings, CrossingAnnotation, CrossingKind, DEFAULT_CROSSING_TOL};
pub use output::{sweep_csv, SweepSidecar};

/// Overlap below which consecutive samples of a branch count as a jump.
pub const CONTINUITY_OVERLAP: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TuningError {
    #[error("invalid tuning spec: {0}")]
    Spec(String),
    #[error("post {post} gap {gap} m leaves (0, {height}) at t = {t}")]
    Range { post: u32, gap: f64, height: f64, t: f64 },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapTarget {
    pub post: u32,
    /// Gap change per unit of the sweep parameter, m.
    pub weight: f64,
}

/// Sweep of `gap_i(t) = gap_i0 + weight_i · t` over `steps` evenly spaced
/// values of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningSpec {
    pub targets: Vec<GapTarget>,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TuningSpec {
    pub fn new(targets: Vec<GapTarget>, t_start: f64, t_end: f64, steps: usize) -> Self {
        Self { targets, t_start, t_end, steps }
    }

    pub fn single(post: u32, weight: f64, t_start: f64, t_end: f64, steps: usize) -> Self {
        Self::new(vec![GapTarget { post, weight }], t_start, t_end, steps)
    }

    pub fn parameter(&self, step: usize) -> f64 {
        if step + 1 == self.steps {
            return self.t_end;
        }
        self.t_start + (self.t_end - self.t_start) * step as f64 / (self.steps - 1) as f64
    }

    fn validate(&self, m: &LatticeModel) -> Result<(), TuningError> {
        let bad = |s: String| Err(TuningError::Spec(s));
        if self.steps < 2 {
            return bad(format!("need at least 2 steps, got {}", self.steps));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return bad("t range must be finite".into());
        }
        for (i, t) in self.targets.iter().enumerate() {
            if !t.weight.is_finite() {
                return bad(format!("weight of post {} is not finite", t.post));
            }
            if m.post(t.post).is_none() {
                return bad(format!("post {} not in lattice", t.post));
            }
            if self.targets[..i].iter().any(|o| o.post == t.post) {
                return bad(format!("post {} listed twice", t.post));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    /// Gap closed: the post shorts and its branch falls towards 0 Hz.
    NoGap,
    /// Gap equals the post height: the post is gone.
    NoPost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEvent {
    pub step: usize,
    pub post: u32,
    pub kind: LimitKind,
    /// Branch that ends here; its last finite sample is `step - 1`.
    pub branch: Option<usize>,
    pub last_finite_step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    pub step: usize,
    pub branch: usize,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub target_ids: Vec<u32>,
    pub t: Vec<f64>,
    /// Gap of every target at every step, `gaps[step][target]`.
    pub gaps: Vec<Vec<f64>>,
    /// Sorted mode frequencies per step.
    pub frequencies: Vec<Vec<f64>>,
    /// Tracked branch frequencies, `branches[branch][step]`; `None` once a
    /// branch has ended.
    pub branches: Vec<Vec<Option<f64>>>,
    /// Smallest overlap of any branch with its previous sample.
    pub overlap_min: Vec<f64>,
    pub discontinuities: Vec<Discontinuity>,
    pub limits: Vec<LimitEvent>,
    /// Unit current vectors in lattice post order, `vectors[branch][step]`.
    #[serde(skip)]
    pub vectors: Vec<Vec<Option<Vec<f64>>>>,
    /// Weight of the first moving target, used for logarithmic coefficients.
    #[serde(skip)]
    pub(crate) reference_target: Option<usize>,
}

impl SweepResult {
    pub fn steps(&self) -> usize {
        self.t.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }
}

fn classify_gap(post: u32, gap: f64, height: f64, t: f64, last: bool) -> Result<Option<LimitKind>, TuningError> {
    let eps = 1e-12 * height;
    if gap > eps && gap < height - eps {
        return Ok(None);
    }
    if last && gap.abs() <= eps {
        return Ok(Some(LimitKind::NoGap));
    }
    if last && (gap - height).abs() <= eps {
        return Ok(Some(LimitKind::NoPost));
    }
    Err(TuningError::Range { post, gap, height, t })
}

pub fn sweep(model: &LatticeModel, spec: &TuningSpec) -> Result<SweepResult, TuningError> {
    model.validate()?;
    spec.validate(model)?;
    let mut t_values = Vec::with_capacity(spec.steps);
    let mut gaps = Vec::with_capacity(spec.steps);
    let mut solutions = Vec::with_capacity(spec.steps);
    let mut limits = Vec::new();
    for step in 0..spec.steps {
        let t = spec.parameter(step);
        let last = step + 1 == spec.steps;
        let mut m = model.clone();
        let mut row = Vec::with_capacity(spec.targets.len());
        for target in &spec.targets {
            let p = m.post_mut(target.post).unwrap();
            let gap = p.gap + target.weight * t;
            match classify_gap(p.id, gap, p.height, t, last)? {
                None => p.gap = gap,
                Some(kind) => {
                    p.gap = if kind == LimitKind::NoGap { 0.0 } else { p.height };
                    limits.push(LimitEvent { step, post: p.id, kind, branch: None, last_finite_step: step - 1 });
                }
            }
            row.push(p.gap);
        }
        let solution = if m.active_count() == 0 { None } else { Some(solve_modes(&m)?) };
        t_values.push(t);
        gaps.push(row);
        solutions.push(solution);
    }
    let ids: Vec<u32> = model.posts.iter().map(|p| p.id).collect();
    let tracked = track::track_branches(&ids, &solutions);
    for event in &mut limits {
        event.branch = tracked.ended_branch(event.step, event.post, &ids);
    }
    Ok(SweepResult {
        target_ids: spec.targets.iter().map(|t| t.post).collect(),
        t: t_values,
        gaps,
        frequencies: solutions.iter().map(|s| s.as_ref().map(|s| s.frequencies.clone()).unwrap_or_default()).collect(),
        branches: tracked.frequencies,
        overlap_min: tracked.overlap_min,
        discontinuities: tracked.discontinuities,
        limits,
        vectors: tracked.vectors,
        reference_target: spec.targets.iter().position(|t| t.weight != 0.0),
    })
}

/// Drives two posts in opposition: `gap_a = gap_a0 + δ`, `gap_b = gap_b0 − δ`
/// for δ evenly spaced over `[-delta_max, delta_max]`.
pub fn antisymmetric_sweep(
    model: &LatticeModel,
    pair: (u32, u32),
    delta_max: f64,
    steps: usize,
) -> Result<SweepResult, TuningError> {
    for id in [pair.0, pair.1] {
        let p = model.post(id).ok_or_else(|| TuningError::Spec(format!("post {id} not in lattice")))?;
        if !p.is_active() {
            return Err(TuningError::Spec(format!("post {id} is not active")));
        }
        for gap in [p.gap - delta_max, p.gap + delta_max] {
            if !(gap > 0.0 && gap < p.height) {
                return Err(TuningError::Range { post: id, gap, height: p.height, t: delta_max });
            }
        }
    }
    if pair.0 == pair.1 {
        return Err(TuningError::Spec("antisymmetric pair needs two distinct posts".into()));
    }
    let spec = TuningSpec::new(
        vec![GapTarget { post: pair.0, weight: 1.0 }, GapTarget { post: pair.1, weight: -1.0 }],
        -delta_max,
        delta_max,
        steps,
    );
    sweep(model, &spec)
}
