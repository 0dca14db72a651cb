use serde::{Deserialize, Serialize};

use super::SweepResult;

/// Relative splitting below which a minimum is a true crossing.
pub const DEFAULT_CROSSING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Avoided,
    True,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingAnnotation {
    pub branches: (usize, usize),
    /// Sweep parameter at the minimum splitting.
    pub t: f64,
    /// Sample index nearest to `t`.
    pub step: usize,
    pub splitting_hz: f64,
    pub kind: CrossingKind,
}

/// Vertex of the parabola through three equally spaced samples, as an
/// offset in steps from the middle one, and its value.
fn parabola_vertex(a: f64, b: f64, c: f64) -> (f64, f64) {
    let curvature = a - 2.0 * b + c;
    if curvature <= 0.0 {
        return (0.0, b);
    }
    let x = (0.5 * (a - c) / curvature).clamp(-1.0, 1.0);
    (x, b + 0.5 * (c - a) * x + 0.5 * curvature * x * x)
}

/// Local minima of the splitting between branches that are neighbours in
/// frequency, refined by quadratic interpolation.
pub fn find_avoided_crossings(r: &SweepResult, rel_tol: f64) -> Vec<CrossingAnnotation> {
    let steps = r.steps();
    let mut out = Vec::new();
    if steps < 3 {
        return out;
    }
    let nb = r.branch_count();
    let adjacent = |i: usize, j: usize, s: usize| -> bool {
        let (Some(fi), Some(fj)) = (r.branches[i][s], r.branches[j][s]) else { return false };
        let (lo, hi) = if fi <= fj { (fi, fj) } else { (fj, fi) };
        !(0..nb).filter(|&b| b != i && b != j).any(|b| r.branches[b][s].is_some_and(|f| f > lo && f < hi))
    };
    for i in 0..nb {
        for j in i + 1..nb {
            let diff: Vec<Option<f64>> = (0..steps)
                .map(|s| Some(r.branches[j][s]? - r.branches[i][s]?))
                .collect();
            for s in 1..steps - 1 {
                let (Some(a), Some(b), Some(c)) = (diff[s - 1], diff[s], diff[s + 1]) else { continue };
                let (da, db, dc) = (a.abs(), b.abs(), c.abs());
                if !(db < da && db <= dc) || !adjacent(i, j, s) {
                    continue;
                }
                let sign_flip = a.signum() != b.signum() || b.signum() != c.signum() || b == 0.0;
                let (x, d) = parabola_vertex(da, db, dc);
                let d = d.max(0.0);
                let h = r.t[s + 1] - r.t[s];
                let f_mid = 0.5 * (r.branches[i][s].unwrap() + r.branches[j][s].unwrap());
                let kind = if sign_flip || d <= rel_tol * f_mid { CrossingKind::True } else { CrossingKind::Avoided };
                out.push(CrossingAnnotation {
                    branches: (i, j),
                    t: r.t[s] + x * h,
                    step: s,
                    splitting_hz: if kind == CrossingKind::True { d.min(db) } else { d },
                    kind,
                });
            }
        }
    }
    out
}
