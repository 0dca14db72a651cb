use faer::{Mat, Side};

use super::{CouplingModel, LatticeError, LatticeModel, Post, PostState, EPSILON_0};

/// Parallel-plate gap capacitance `ε0·π·r²/gap` (no fringing).
pub fn gap_capacitance(post: &Post) -> Result<f64, LatticeError> {
    if post.state() != PostState::Active {
        return Err(LatticeError::NotAnOscillator { id: post.id, gap: post.gap, height: post.height });
    }
    Ok(EPSILON_0 * std::f64::consts::PI * post.radius * post.radius / post.gap)
}

pub fn mutual_inductance(a: &Post, b: &Post, coupling: &CouplingModel) -> Result<f64, LatticeError> {
    let d = a.distance(b);
    if d == 0.0 {
        return Err(LatticeError::CoincidentPosts { a: a.id, b: b.id });
    }
    Ok(coupling.at_distance(d))
}

/// Inductance and capacitance matrices restricted to the active posts.
#[derive(Debug, Clone)]
pub struct LatticeMatrices {
    /// Post id of every matrix row, in lattice order.
    pub post_ids: Vec<u32>,
    pub inductance: Mat<f64>,
    /// Diagonal of the capacitance matrix.
    pub capacitance: Vec<f64>,
}

impl LatticeMatrices {
    pub fn len(&self) -> usize {
        self.post_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.post_ids.is_empty()
    }

    pub fn capacitance_matrix(&self) -> Mat<f64> {
        let n = self.len();
        Mat::from_fn(n, n, |i, j| if i == j { self.capacitance[i] } else { 0.0 })
    }
}

/// Distance from point `p` to the segment `a`–`b`.
fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    (p.0 - cx).hypot(p.1 - cy)
}

fn screened(a: &Post, b: &Post, screens: &[&Post], clearance: f64) -> bool {
    screens
        .iter()
        .any(|s| point_segment_distance((s.x, s.y), (a.x, a.y), (b.x, b.y)) < clearance)
}

pub fn assemble_matrices(model: &LatticeModel) -> Result<LatticeMatrices, LatticeError> {
    model.validate()?;
    let active: Vec<&Post> = model.active_posts().collect();
    if active.is_empty() {
        return Err(LatticeError::NoActivePosts);
    }
    let screens: Vec<&Post> = match model.screen_clearance {
        Some(_) => model.posts.iter().filter(|p| p.state() == PostState::Shorted).collect(),
        None => Vec::new(),
    };
    let clearance = model.screen_clearance.unwrap_or(0.0);

    let n = active.len();
    let l0 = model.coupling.base_inductance;
    let mut inductance = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        inductance[(i, i)] = l0;
        for j in i + 1..n {
            let m = if screened(active[i], active[j], &screens, clearance) {
                0.0
            } else {
                mutual_inductance(active[i], active[j], &model.coupling)?
            };
            inductance[(i, j)] = m;
            inductance[(j, i)] = m;
        }
    }
    let post_ids: Vec<u32> = active.iter().map(|p| p.id).collect();
    check_positive_definite(&post_ids, &inductance)?;
    let capacitance = active.iter().map(|p| gap_capacitance(p)).collect::<Result<_, _>>()?;
    Ok(LatticeMatrices { post_ids, inductance, capacitance })
}

/// Cholesky test; on failure names the pair with the largest coupling.
pub(crate) fn check_positive_definite(ids: &[u32], l: &Mat<f64>) -> Result<(), LatticeError> {
    if l.llt(Side::Lower).is_ok() {
        return Ok(());
    }
    let n = l.nrows();
    let (mut a, mut b, mut ratio) = (ids[0], ids[0], 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let r = l[(i, j)] / l[(i, i)].min(l[(j, j)]);
            if r >= ratio {
                (a, b, ratio) = (ids[i], ids[j], r);
            }
        }
    }
    Err(LatticeError::NotPositiveDefinite { a, b, ratio })
}
