use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::groups::{group_degenerate, DEFAULT_DEGENERACY_TOL};
use super::participation::participation;
use super::pattern::{classify_sign_pattern, SignPattern, DEFAULT_ZERO_THRESHOLD};
use super::ring::{count_families, describe_ring, ring_slots, RingModeDescriptor};
use super::AnalysisError;
use crate::lattice::{solve_modes, LatticeModel, ModeSolution};

/// Relative gap change applied to one post to pick a basis inside
/// degenerate subspaces.
pub const SYMMETRY_BREAKING: f64 = 1e-6;

/// Copy of `model` whose first active post has its gap scaled by
/// `1 + SYMMETRY_BREAKING`.
pub fn perturbed_model(model: &LatticeModel) -> LatticeModel {
    let mut m = model.clone();
    if let Some(p) = m.posts.iter_mut().find(|p| p.is_active()) {
        p.gap *= 1.0 + SYMMETRY_BREAKING;
    }
    m
}

/// Sign patterns of every mode. Members of degenerate groups are read from
/// the perturbed lattice, where the degeneracy is lifted deterministically.
pub fn resolved_patterns(
    model: &LatticeModel,
    s: &ModeSolution,
    eta: f64,
    rel_tol: f64,
) -> Result<Vec<SignPattern>, AnalysisError> {
    let groups = group_degenerate(s, rel_tol);
    let broken = if groups.has_degeneracy() { Some(solve_modes(&perturbed_model(model))?) } else { None };
    (0..s.len())
        .map(|k| {
            let source = match &broken {
                Some(b) if groups.groups[groups.group_of(k)].len() > 1 => b,
                _ => s,
            };
            classify_sign_pattern(&source.unit_vector(k), eta)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub eta: f64,
    pub rel_tol: f64,
    /// Cyclic post order for ring analysis; lattice order when absent.
    pub ring_order: Option<Vec<u32>>,
    /// Post id → group name for participation fractions.
    pub partition: Option<BTreeMap<u32, String>>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { eta: DEFAULT_ZERO_THRESHOLD, rel_tol: DEFAULT_DEGENERACY_TOL, ring_order: None, partition: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeEntry {
    pub f_hz: f64,
    pub pattern: SignPattern,
    pub group: usize,
    /// Member of a degenerate group whose half-wavelength does not tile the ring.
    pub frustrated: bool,
    pub ring: RingModeDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub participation: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub label: String,
    pub active_posts: usize,
    pub degenerate: bool,
    pub frustrated_groups: usize,
    /// Distinct expansions of the ring size among all modes.
    pub families: usize,
    pub modes: Vec<ModeEntry>,
}

impl ModeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn analyze(model: &LatticeModel, opts: &AnalysisOptions) -> Result<ModeReport, AnalysisError> {
    let s = solve_modes(model)?;
    analyze_solution(model, &s, opts)
}

pub fn analyze_solution(
    model: &LatticeModel,
    s: &ModeSolution,
    opts: &AnalysisOptions,
) -> Result<ModeReport, AnalysisError> {
    if !(opts.rel_tol > 0.0) {
        return Err(AnalysisError::Threshold(opts.rel_tol));
    }
    let groups = group_degenerate(s, opts.rel_tol);
    let mut patterns = resolved_patterns(model, s, opts.eta, opts.rel_tol)?;
    let ring_order = opts.ring_order.clone().unwrap_or_else(|| s.post_ids.clone());
    let slots = ring_slots(s, &ring_order)?;
    let rings: Vec<RingModeDescriptor> = patterns
        .iter()
        .map(|p| describe_ring(&slots.iter().map(|&i| p.symbols[i]).collect::<Vec<_>>()))
        .collect::<Result<_, _>>()?;
    let fractions = match &opts.partition {
        Some(part) => Some(participation(s, part)?),
        None => None,
    };

    let mut frustrated_groups = 0;
    let mut frustrated = vec![false; s.len()];
    for g in &groups.groups {
        if g.len() > 1 && g.iter().any(|&k| rings[k].frustrated) {
            frustrated_groups += 1;
            for &k in g {
                frustrated[k] = true;
                patterns[k].mark_frustrated();
            }
        }
    }
    let families = count_families(&rings);
    let modes = patterns
        .into_iter()
        .zip(rings)
        .enumerate()
        .map(|(k, (pattern, ring))| ModeEntry {
            f_hz: s.frequencies[k],
            pattern,
            group: groups.group_of(k),
            frustrated: frustrated[k],
            ring,
            participation: fractions.as_ref().map(|f| f[k].clone()),
        })
        .collect();
    Ok(ModeReport {
        label: model.label.clone(),
        active_posts: s.len(),
        degenerate: groups.has_degeneracy(),
        frustrated_groups,
        families,
        modes,
    })
}
