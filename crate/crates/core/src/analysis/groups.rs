use serde::Serialize;

use crate::lattice::ModeSolution;

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-6;

/// Partition of mode indices into (near-)degenerate groups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyGroups {
    pub groups: Vec<Vec<usize>>,
    pub rel_tol: f64,
}

impl DegeneracyGroups {
    pub fn group_of(&self, mode: usize) -> usize {
        self.groups.iter().position(|g| g.contains(&mode)).expect("mode index out of range")
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn has_degeneracy(&self) -> bool {
        self.groups.iter().any(|g| g.len() > 1)
    }
}

/// Groups sorted frequencies; neighbours within `rel_tol` chain together.
pub fn group_degenerate(s: &ModeSolution, rel_tol: f64) -> DegeneracyGroups {
    group_frequencies(&s.frequencies, rel_tol)
}

pub(crate) fn group_frequencies(freqs: &[f64], rel_tol: f64) -> DegeneracyGroups {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, f) in freqs.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (f - freqs[*g.last().unwrap()]).abs() <= rel_tol * f.abs() => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    DegeneracyGroups { groups, rel_tol }
}
