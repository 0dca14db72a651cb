use super::{DissipationSpec, LinearizedParams, TruncationSpec};

/// Product basis of the two doublet modes and the membrane, index
/// `(n_R · N_L + n_L) · N_b + n_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    pub right: usize,
    pub left: usize,
    pub mechanics: usize,
}

impl FockSpace {
    pub fn new(t: &TruncationSpec) -> Self {
        Self { right: t.right, left: t.left, mechanics: t.mechanics }
    }

    pub fn dim(&self) -> usize {
        self.right * self.left * self.mechanics
    }

    pub fn index(&self, r: usize, l: usize, m: usize) -> usize {
        (r * self.left + l) * self.mechanics + m
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.right).flat_map(move |r| (0..self.left).flat_map(move |l| (0..self.mechanics).map(move |m| (r, l, m))))
    }
}

/// Real sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Csr {
    pub n: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl Csr {
    fn from_entries(n: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, v) in entries {
            match rows[i].last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => rows[i].push((j, v)),
            }
        }
        for r in &mut rows {
            r.retain(|e| e.1 != 0.0);
        }
        Self { n, rows }
    }

    pub fn transpose(&self) -> Self {
        let entries = self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (j, i, v))).collect();
        Self::from_entries(self.n, entries)
    }

    #[cfg(test)]
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }
}

/// Lowering operator of one mode, `mode` ∈ {0: right, 1: left, 2: membrane}.
pub(crate) fn lowering(space: &FockSpace, mode: usize) -> Csr {
    let mut entries = Vec::new();
    for (r, l, m) in space.states() {
        let (n, to) = match mode {
            0 if r > 0 => (r, space.index(r - 1, l, m)),
            1 if l > 0 => (l, space.index(r, l - 1, m)),
            2 if m > 0 => (m, space.index(r, l, m - 1)),
            _ => continue,
        };
        entries.push((to, space.index(r, l, m), (n as f64).sqrt()));
    }
    Csr::from_entries(space.dim(), entries)
}

/// Linearized Hamiltonian in the truncated product basis (real symmetric).
pub(crate) fn hamiltonian(space: &FockSpace, lp: &LinearizedParams) -> Csr {
    let s = *space;
    let mut e = Vec::new();
    let sq = |n: usize| (n as f64).sqrt();
    for (r, l, m) in s.states() {
        let i = s.index(r, l, m);
        e.push((i, i, lp.detuning * (r + l) as f64 + lp.mechanical_frequency * m as f64));
        // G (a_R† a_L + h.c.)
        if r + 1 < s.right && l > 0 {
            let v = lp.doublet_coupling * sq(r + 1) * sq(l);
            let j = s.index(r + 1, l - 1, m);
            e.push((j, i, v));
            e.push((i, j, v));
        }
        // F (b + b†)
        if m + 1 < s.mechanics {
            let v = lp.static_force * sq(m + 1);
            let j = s.index(r, l, m + 1);
            e.push((j, i, v));
            e.push((i, j, v));
        }
        // quadrature couplings (a + a†)(b + b†), raising the cavity mode;
        // the lowering half is added by symmetry
        for dm in [-1i64, 1] {
            let m2 = m as i64 + dm;
            if m2 < 0 || m2 as usize >= s.mechanics {
                continue;
            }
            let m2 = m2 as usize;
            let mech = sq(m.max(m2));
            if r + 1 < s.right {
                let v = -lp.right_coupling * sq(r + 1) * mech;
                let j = s.index(r + 1, l, m2);
                e.push((j, i, v));
                e.push((i, j, v));
            }
            if l + 1 < s.left {
                let v = lp.left_coupling * sq(l + 1) * mech;
                let j = s.index(r, l + 1, m2);
                e.push((j, i, v));
                e.push((i, j, v));
            }
        }
    }
    Csr::from_entries(s.dim(), e)
}

/// Collapse operators: cavity decay on both modes, thermal membrane bath.
pub(crate) fn collapse_operators(space: &FockSpace, d: &DissipationSpec) -> Vec<Csr> {
    let scale = |c: Csr, k: f64| Csr { n: c.n, rows: c.rows.into_iter().map(|r| r.into_iter().map(|(j, v)| (j, v * k)).collect()).collect() };
    let b = lowering(space, 2);
    let mut ops = vec![
        scale(lowering(space, 0), d.cavity_decay.sqrt()),
        scale(lowering(space, 1), d.cavity_decay.sqrt()),
        scale(b.clone(), (d.mechanical_decay * (d.thermal_occupation + 1.0)).sqrt()),
    ];
    if d.thermal_occupation > 0.0 {
        ops.push(scale(b.transpose(), (d.mechanical_decay * d.thermal_occupation).sqrt()));
    }
    ops
}
