use std::f64::consts::PI;

use serde::Serialize;

use super::pattern::SignPattern;
use super::report::resolved_patterns;
use super::AnalysisError;
use crate::lattice::{solve_modes, LatticeModel, ModeSolution};

/// Minimum overlap score for a branch assignment.
pub const MIN_POLARIZATION_SCORE: f64 = 0.5;

/// Branch assignment of one chain mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polarization {
    /// Index into the primitive list, `None` when unclassifiable.
    pub branch: Option<usize>,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub f_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionCurve {
    pub branch: SignPattern,
    pub points: Vec<DispersionPoint>,
    /// `Δf/Δk` between the two smallest wavenumbers, in Hz·cells.
    pub speed: Option<f64>,
}

fn check_cells(s: &ModeSolution, cell_size: usize) -> Result<usize, AnalysisError> {
    if cell_size == 0 || s.post_ids.len() % cell_size != 0 {
        return Err(AnalysisError::CellSize(format!(
            "{} active posts do not split into cells of {cell_size}",
            s.post_ids.len()
        )));
    }
    Ok(s.post_ids.len() / cell_size)
}

/// Projection of each cell's slice of `v` on the unit vector `p`.
fn cell_amplitudes(v: &[f64], p: &[f64]) -> Vec<f64> {
    v.chunks(p.len()).map(|c| c.iter().zip(p).map(|(a, b)| a * b).sum()).collect()
}

fn cell_norms(v: &[f64], cell_size: usize) -> f64 {
    v.chunks(cell_size).map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).sum()
}

/// Assigns every chain mode to the primitive whose pattern best matches
/// its per-cell currents.
///
/// Cells are consecutive runs of `cell_size` eigenvector slots, each listing
/// its posts in the same order as the primitive patterns.
pub fn classify_polarization(
    chain: &ModeSolution,
    cell_size: usize,
    primitives: &[SignPattern],
) -> Result<Vec<Polarization>, AnalysisError> {
    check_cells(chain, cell_size)?;
    if let Some(p) = primitives.iter().find(|p| p.len() != cell_size) {
        return Err(AnalysisError::CellSize(format!("primitive {p} does not match cell size {cell_size}")));
    }
    let units: Vec<Vec<f64>> = primitives.iter().map(SignPattern::unit_vector).collect();
    Ok((0..chain.len())
        .map(|k| {
            let v = chain.unit_vector(k);
            let total = cell_norms(&v, cell_size);
            let mut best = Polarization { branch: None, score: 0.0 };
            for (b, p) in units.iter().enumerate() {
                let score = cell_amplitudes(&v, p).iter().map(|a| a.abs()).sum::<f64>() / total;
                if score > best.score {
                    best = Polarization { branch: Some(b), score };
                }
            }
            if best.score < MIN_POLARIZATION_SCORE {
                best.branch = None;
            }
            best
        })
        .collect())
}

/// Index of the strongest orthonormal DCT-II component of `x`.
pub(crate) fn dominant_cosine_index(x: &[f64]) -> usize {
    let p = x.len();
    let mut best = (0, f64::NEG_INFINITY);
    for m in 0..p {
        let c: f64 = x
            .iter()
            .enumerate()
            .map(|(j, v)| v * (PI * m as f64 * (j as f64 + 0.5) / p as f64).cos())
            .sum();
        let weight = if m == 0 { (1.0 / p as f64).sqrt() } else { (2.0 / p as f64).sqrt() };
        let power = (weight * c).abs();
        if power > best.1 + 1e-12 {
            best = (m, power);
        }
    }
    best.0
}

/// Dispersion curves of a chain of identical cells, one per primitive that
/// owns at least one mode.
///
/// Each mode gets `k = mπ/P` from the dominant standing-wave index `m` of
/// its per-cell amplitudes over the `P` cells.
pub fn extract_dispersion(
    chain: &ModeSolution,
    cell_size: usize,
    primitives: &[SignPattern],
) -> Result<Vec<DispersionCurve>, AnalysisError> {
    let cells = check_cells(chain, cell_size)?;
    if cells < 2 {
        return Ok(Vec::new());
    }
    let labels = classify_polarization(chain, cell_size, primitives)?;
    let units: Vec<Vec<f64>> = primitives.iter().map(SignPattern::unit_vector).collect();
    let mut curves: Vec<DispersionCurve> = primitives
        .iter()
        .map(|p| DispersionCurve { branch: p.clone(), points: Vec::new(), speed: None })
        .collect();
    for (mode, label) in labels.iter().enumerate() {
        let Some(b) = label.branch else { continue };
        let amps = cell_amplitudes(&chain.unit_vector(mode), &units[b]);
        let m = dominant_cosine_index(&amps);
        curves[b].points.push(DispersionPoint { k: m as f64 * PI / cells as f64, f_hz: chain.frequencies[mode] });
    }
    curves.retain(|c| !c.points.is_empty());
    for c in &mut curves {
        c.points.sort_by(|a, b| a.k.total_cmp(&b.k).then(a.f_hz.total_cmp(&b.f_hz)));
        let first = c.points[0];
        c.speed = c
            .points
            .iter()
            .find(|p| p.k > first.k)
            .map(|p| (p.f_hz - first.f_hz) / (p.k - first.k));
    }
    Ok(curves)
}

/// Patterns and frequencies of the isolated first cell of a chain,
/// ascending in frequency.
pub fn cell_primitives(
    chain: &LatticeModel,
    cell_size: usize,
    eta: f64,
) -> Result<Vec<(SignPattern, f64)>, AnalysisError> {
    let posts: Vec<_> = chain.active_posts().take(cell_size).cloned().collect();
    if posts.len() != cell_size || cell_size == 0 {
        return Err(AnalysisError::CellSize(format!("chain has fewer than {cell_size} active posts")));
    }
    let mut cell = LatticeModel::new("cell", chain.coupling.clone(), posts);
    cell.screen_clearance = chain.screen_clearance;
    let s = solve_modes(&cell)?;
    let patterns = resolved_patterns(&cell, &s, eta, super::DEFAULT_DEGENERACY_TOL)?;
    Ok(patterns.into_iter().zip(s.frequencies).collect())
}
