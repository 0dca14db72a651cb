use std::collections::BTreeSet;

use serde::Serialize;

use super::pattern::{classify_sign_pattern, Symbol};
use super::AnalysisError;
use crate::lattice::ModeSolution;

/// Mode order and wavelengths of a mode on a closed ring of posts.
///
/// `lambda_a` lists the length of every sign domain around the ring in
/// posts (`2n` domains, or the whole ring for `n = 0`). A post whose current
/// vanishes is split evenly between its neighbouring domains, so entries
/// may be half-integers. The lengths always add up to the ring size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RingModeDescriptor {
    pub n: usize,
    /// `N / n`; `None` stands for the infinite wavelength of `n = 0`.
    pub lambda: Option<f64>,
    pub lambda_a: Vec<f64>,
    pub frustrated: bool,
}

impl RingModeDescriptor {
    /// Domain lengths in half-post units, sorted; the identity of an expansion.
    pub fn expansion_key(&self) -> (usize, Vec<u32>) {
        let mut halves: Vec<u32> = self.lambda_a.iter().map(|l| (2.0 * l).round() as u32).collect();
        halves.sort_unstable();
        (self.n, halves)
    }
}

/// Half a wavelength fails to tile a ring of `ring_size` posts.
pub fn is_frustrated(ring_size: usize, n: usize) -> bool {
    n > 0 && ring_size % (2 * n) != 0
}

/// Reads a ring descriptor off signs given in ring order.
pub fn describe_ring(symbols: &[Symbol]) -> Result<RingModeDescriptor, AnalysisError> {
    let ring = symbols.len();
    let nz: Vec<usize> = (0..ring).filter(|&i| symbols[i].sign() != 0).collect();
    if nz.is_empty() {
        return Err(AnalysisError::DegenerateVector);
    }
    let sign = |i: usize| symbols[i].sign();
    let m = nz.len();
    let changes = (0..m).filter(|&k| sign(nz[k]) != sign(nz[(k + 1) % m])).count();
    let n = changes / 2;
    if n == 0 {
        return Ok(RingModeDescriptor { n, lambda: None, lambda_a: vec![ring as f64], frustrated: false });
    }

    // Label domains starting from the one holding the first non-zero post.
    let first_start = (0..m).find(|&k| sign(nz[k]) != sign(nz[(k + m - 1) % m])).unwrap();
    let mut domain = vec![usize::MAX; ring];
    let mut id = 0;
    for step in 0..m {
        let k = (first_start + step) % m;
        if step > 0 && sign(nz[k]) != sign(nz[(k + m - 1) % m]) {
            id += 1;
        }
        domain[nz[k]] = id;
    }
    let domains = id + 1;
    let mut halves = vec![0u32; domains];
    for i in 0..ring {
        if sign(i) != 0 {
            halves[domain[i]] += 2;
        } else {
            let prev = (1..ring).map(|d| (i + ring - d) % ring).find(|&j| sign(j) != 0).unwrap();
            let next = (1..ring).map(|d| (i + d) % ring).find(|&j| sign(j) != 0).unwrap();
            halves[domain[prev]] += 1;
            halves[domain[next]] += 1;
        }
    }
    let lead = domain[nz[0]];
    let lambda_a = (0..domains).map(|d| halves[(lead + d) % domains] as f64 / 2.0).collect();
    Ok(RingModeDescriptor {
        n,
        lambda: Some(ring as f64 / n as f64),
        lambda_a,
        frustrated: is_frustrated(ring, n),
    })
}

/// Checks that `ring_order` is a permutation of the solution's posts and
/// returns the eigenvector slot of each ring position.
pub fn ring_slots(s: &ModeSolution, ring_order: &[u32]) -> Result<Vec<usize>, AnalysisError> {
    if ring_order.len() != s.post_ids.len() {
        return Err(AnalysisError::RingOrder(format!(
            "ring lists {} posts, lattice has {} active",
            ring_order.len(),
            s.post_ids.len()
        )));
    }
    let mut seen = BTreeSet::new();
    ring_order
        .iter()
        .map(|&id| {
            if !seen.insert(id) {
                return Err(AnalysisError::RingOrder(format!("post {id} repeated")));
            }
            s.slot_of(id).ok_or_else(|| AnalysisError::RingOrder(format!("post {id} is not active")))
        })
        .collect()
}

/// Ring descriptors for every mode of `s`, signs taken directly from its
/// eigenvectors.
pub fn ring_mode_numbers(
    s: &ModeSolution,
    ring_order: &[u32],
    eta: f64,
) -> Result<Vec<RingModeDescriptor>, AnalysisError> {
    let slots = ring_slots(s, ring_order)?;
    (0..s.len())
        .map(|k| {
            let p = classify_sign_pattern(&s.unit_vector(k), eta)?;
            let ordered: Vec<Symbol> = slots.iter().map(|&i| p.symbols[i]).collect();
            describe_ring(&ordered)
        })
        .collect()
}

/// Number of distinct expansions of the ring size among `modes`.
pub fn count_families(modes: &[RingModeDescriptor]) -> usize {
    modes.iter().map(RingModeDescriptor::expansion_key).collect::<BTreeSet<_>>().len()
}
