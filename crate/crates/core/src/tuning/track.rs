use crate::analysis::group_degenerate;
use crate::lattice::ModeSolution;

use super::{Discontinuity, CONTINUITY_OVERLAP};

/// Frequencies closer than this are rotated as one subspace when tracking.
const ALIGN_TOL: f64 = 1e-9;

pub(crate) struct Tracked {
    pub frequencies: Vec<Vec<Option<f64>>>,
    pub vectors: Vec<Vec<Option<Vec<f64>>>>,
    pub overlap_min: Vec<f64>,
    pub discontinuities: Vec<Discontinuity>,
}

impl Tracked {
    /// Branch that stops at `step` with the most weight on `post` just before.
    pub fn ended_branch(&self, step: usize, post: u32, ids: &[u32]) -> Option<usize> {
        let slot = ids.iter().position(|&p| p == post)?;
        (0..self.frequencies.len())
            .filter(|&b| step > 0 && self.frequencies[b][step - 1].is_some() && self.frequencies[b][step].is_none())
            .max_by(|&a, &b| {
                let w = |br: usize| self.vectors[br][step - 1].as_ref().unwrap()[slot].abs();
                w(a).total_cmp(&w(b))
            })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit mode vectors scattered into full lattice post order.
fn embedded(ids: &[u32], s: &ModeSolution) -> Vec<Vec<f64>> {
    let slots: Vec<usize> = s.post_ids.iter().map(|id| ids.iter().position(|p| p == id).unwrap()).collect();
    (0..s.len())
        .map(|k| {
            let mut v = vec![0.0; ids.len()];
            for (x, &i) in s.unit_vector(k).iter().zip(&slots) {
                v[i] = *x;
            }
            v
        })
        .collect()
}

/// Rotates `basis` (orthonormal) towards the previous branch vectors.
fn align_subspace(basis: &[Vec<f64>], previous: &[&Vec<f64>]) -> Vec<Vec<f64>> {
    let project = |p: &Vec<f64>| -> Vec<f64> {
        let mut q = vec![0.0; p.len()];
        for u in basis {
            let c = dot(u, p);
            q.iter_mut().zip(u).for_each(|(qi, ui)| *qi += c * ui);
        }
        q
    };
    let mut candidates: Vec<Vec<f64>> = previous.iter().map(|p| project(p)).collect();
    candidates.sort_by(|a, b| dot(b, b).total_cmp(&dot(a, a)));
    candidates.extend(basis.iter().cloned());
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for mut c in candidates {
        if out.len() == basis.len() {
            break;
        }
        for o in &out {
            let d = dot(o, &c);
            c.iter_mut().zip(o).for_each(|(ci, oi)| *ci -= d * oi);
        }
        let n = dot(&c, &c).sqrt();
        if n > 1e-6 {
            out.push(c.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

pub(crate) fn track_branches(ids: &[u32], solutions: &[Option<ModeSolution>]) -> Tracked {
    let steps = solutions.len();
    let mut t = Tracked {
        frequencies: Vec::new(),
        vectors: Vec::new(),
        overlap_min: vec![1.0; steps],
        discontinuities: Vec::new(),
    };
    let new_branch = |t: &mut Tracked, step: usize, f: f64, v: Vec<f64>| {
        let mut fr = vec![None; steps];
        let mut ve = vec![None; steps];
        fr[step] = Some(f);
        ve[step] = Some(v);
        t.frequencies.push(fr);
        t.vectors.push(ve);
    };
    if let Some(s) = &solutions[0] {
        for (k, v) in embedded(ids, s).into_iter().enumerate() {
            new_branch(&mut t, 0, s.frequencies[k], v);
        }
    }
    for step in 1..steps {
        let Some(s) = &solutions[step] else { continue };
        let live: Vec<usize> = (0..t.frequencies.len()).filter(|&b| t.vectors[b][step - 1].is_some()).collect();
        let previous_owned: Vec<Vec<f64>> = live.iter().map(|&b| t.vectors[b][step - 1].clone().unwrap()).collect();
        let previous: Vec<&Vec<f64>> = previous_owned.iter().collect();
        let mut current = embedded(ids, s);
        for g in group_degenerate(s, ALIGN_TOL).groups.iter().filter(|g| g.len() > 1) {
            let basis: Vec<Vec<f64>> = g.iter().map(|&k| current[k].clone()).collect();
            for (&k, v) in g.iter().zip(align_subspace(&basis, &previous)) {
                current[k] = v;
            }
        }

        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(live.len() * current.len());
        for (i, p) in previous.iter().enumerate() {
            for (k, v) in current.iter().enumerate() {
                pairs.push((dot(p, v).abs(), i, k));
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut branch_done = vec![false; live.len()];
        let mut mode_done = vec![false; current.len()];
        let mut worst = 1.0f64;
        for (o, i, k) in pairs {
            if branch_done[i] || mode_done[k] {
                continue;
            }
            branch_done[i] = true;
            mode_done[k] = true;
            let b = live[i];
            let mut v = current[k].clone();
            if dot(previous[i], &v) < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            t.frequencies[b][step] = Some(s.frequencies[k]);
            t.vectors[b][step] = Some(v);
            worst = worst.min(o);
            if o < CONTINUITY_OVERLAP {
                t.discontinuities.push(Discontinuity { step, branch: b, overlap: o });
            }
        }
        t.overlap_min[step] = worst;
        for k in (0..current.len()).filter(|&k| !mode_done[k]) {
            new_branch(&mut t, step, s.frequencies[k], current[k].clone());
        }
    }
    t
}
