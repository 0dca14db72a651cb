use std::cmp::Ordering;
use std::f64::consts::PI;

use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::{assemble_matrices, LatticeError, LatticeMatrices, LatticeModel};

/// Modes of a lattice, sorted by ascending frequency.
///
/// `eigenvectors[k]` holds post currents normalized so that `vᵀ L v = 1`;
/// use [`ModeSolution::unit_vector`] for the Euclidean unit-norm form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub frequencies: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// Post id of every eigenvector component.
    pub post_ids: Vec<u32>,
}

impl ModeSolution {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn unit_vector(&self, mode: usize) -> Vec<f64> {
        let v = &self.eigenvectors[mode];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / norm).collect()
    }

    /// Eigenvector slot of a post id.
    pub fn slot_of(&self, id: u32) -> Option<usize> {
        self.post_ids.iter().position(|&p| p == id)
    }
}

/// Relative frequency difference treated as an exact tie when ordering.
const TIE_TOL: f64 = 1e-12;
/// Largest accepted residual `‖(C⁻¹ − ω²L)v‖ / (‖C⁻¹‖‖v‖)`.
const RESIDUAL_TOL: f64 = 1e-9;

pub fn solve_modes(model: &LatticeModel) -> Result<ModeSolution, LatticeError> {
    let mats = assemble_matrices(model)?;
    solve_matrices(&mats)
}

pub(crate) fn solve_matrices(mats: &LatticeMatrices) -> Result<ModeSolution, LatticeError> {
    let n = mats.len();
    let s: Vec<f64> = mats.capacitance.iter().map(|c| c.sqrt()).collect();
    // Symmetric form: diag(s) L diag(s) w = μ w with ω² = 1/μ.
    let a = Mat::from_fn(n, n, |i, j| s[i] * mats.inductance[(i, j)] * s[j]);
    let eig = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| LatticeError::Solver(format!("{e:?}")))?;
    let mu = eig.S().column_vector();
    let w = eig.U();

    let mu_min = (0..n).map(|k| mu[k]).fold(f64::INFINITY, f64::min);
    let mu_max = (0..n).map(|k| mu[k]).fold(0.0, f64::max);
    let condition = mu_max / mu_min;
    if !(mu_min > 0.0) {
        return Err(LatticeError::Solver(format!(
            "non-positive generalized eigenvalue {mu_min:e} (condition {condition:e})"
        )));
    }

    let mut modes: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let scale = 1.0 / mu[k].sqrt();
            let mut v: Vec<f64> = (0..n).map(|i| s[i] * w[(i, k)] * scale).collect();
            canonicalize_sign(&mut v);
            (1.0 / (2.0 * PI * mu[k].sqrt()), v)
        })
        .collect();
    order_modes(&mut modes);

    let solution = ModeSolution {
        frequencies: modes.iter().map(|m| m.0).collect(),
        eigenvectors: modes.into_iter().map(|m| m.1).collect(),
        post_ids: mats.post_ids.clone(),
    };
    let worst = max_residual(mats, &solution);
    if !(worst < RESIDUAL_TOL) {
        return Err(LatticeError::Solver(format!(
            "eigenpair residual {worst:e} exceeds {RESIDUAL_TOL:e} (condition {condition:e})"
        )));
    }
    Ok(solution)
}

/// Flips `v` so that its first non-negligible component is positive.
pub(crate) fn canonicalize_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-9 * max) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.partial_cmp(x) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

/// Ascending frequency; within a tie the canonical vectors are ordered
/// lexicographically (larger leading component first).
fn order_modes(modes: &mut [(f64, Vec<f64>)]) {
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut start = 0;
    while start < modes.len() {
        let mut end = start + 1;
        while end < modes.len() && (modes[end].0 - modes[end - 1].0).abs() <= TIE_TOL * modes[end].0 {
            end += 1;
        }
        if end - start > 1 {
            let freqs: Vec<f64> = modes[start..end].iter().map(|m| m.0).collect();
            modes[start..end].sort_by(|a, b| lexicographic(&a.1, &b.1));
            for (m, f) in modes[start..end].iter_mut().zip(freqs) {
                m.0 = f;
            }
        }
        start = end;
    }
}

/// Largest residual of the returned eigenpairs relative to `‖C⁻¹‖‖v‖`.
pub(crate) fn max_residual(mats: &LatticeMatrices, s: &ModeSolution) -> f64 {
    let n = mats.len();
    let elastance: Vec<f64> = mats.capacitance.iter().map(|c| 1.0 / c).collect();
    let scale = elastance.iter().fold(0.0f64, |m, x| m.max(*x));
    let mut worst = 0.0f64;
    for (f, v) in s.frequencies.iter().zip(&s.eigenvectors) {
        let w2 = (2.0 * PI * f).powi(2);
        let mut r2 = 0.0;
        for i in 0..n {
            let lv: f64 = (0..n).map(|j| mats.inductance[(i, j)] * v[j]).sum();
            r2 += (elastance[i] * v[i] - w2 * lv).powi(2);
        }
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        worst = worst.max(r2.sqrt() / (scale * vn));
    }
    worst
}
