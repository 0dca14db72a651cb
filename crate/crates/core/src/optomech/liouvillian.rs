use faer::c64;

use super::operators::{collapse_operators, hamiltonian, Csr, FockSpace};
use super::{DissipationSpec, LinearizedParams, OptomechError, OptomechParams, TruncationSpec};

pub const DEFAULT_DIMENSION_CAP: usize = 512;

/// Lindblad generator `L(ρ) = −i[H, ρ] + Σ_k (C_k ρ C_k† − ½{C_k†C_k, ρ})`
/// stored through its sparse ingredients and applied matrix-free.
///
/// Density matrices are flattened column-major: `ρ[i + j·d]`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    pub space: FockSpace,
    pub(crate) hamiltonian: Csr,
    pub(crate) collapse: Vec<Csr>,
    /// Diagonal of `Σ_k C_k†C_k` (every collapse operator is a ladder
    /// operator, so the sum is diagonal in the Fock basis).
    pub(crate) damping: Vec<f64>,
    pub(crate) thermal_occupation: f64,
}

pub fn build_liouvillian(
    lp: &LinearizedParams,
    _p: &OptomechParams,
    d: &DissipationSpec,
    t: &TruncationSpec,
) -> Result<Liouvillian, OptomechError> {
    Liouvillian::with_cap(lp, d, t, DEFAULT_DIMENSION_CAP)
}

impl Liouvillian {
    pub fn with_cap(
        lp: &LinearizedParams,
        d: &DissipationSpec,
        t: &TruncationSpec,
        cap: usize,
    ) -> Result<Self, OptomechError> {
        t.validate()?;
        d.validate()?;
        if t.dimension() > cap {
            return Err(OptomechError::DimensionCap { dim: t.dimension(), cap });
        }
        let space = FockSpace::new(t);
        let collapse = collapse_operators(&space, d);
        let mut damping = vec![0.0; space.dim()];
        for c in &collapse {
            for row in &c.rows {
                for &(j, v) in row {
                    damping[j] += v * v;
                }
            }
        }
        Ok(Self {
            space,
            hamiltonian: hamiltonian(&space, lp),
            collapse,
            damping,
            thermal_occupation: d.thermal_occupation,
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `out = L(rho)`.
    pub fn apply(&self, rho: &[c64], out: &mut [c64]) {
        let d = self.dim();
        debug_assert_eq!(rho.len(), d * d);
        let minus_i = c64::new(0.0, -1.0);
        out.iter_mut().for_each(|x| *x = c64::new(0.0, 0.0));
        for j in 0..d {
            let col = &rho[j * d..(j + 1) * d];
            let dst = &mut out[j * d..(j + 1) * d];
            // −i H ρ − ½ D ρ − ½ ρ D on column j
            for i in 0..d {
                let mut acc = c64::new(0.0, 0.0);
                for &(k, h) in &self.hamiltonian.rows[i] {
                    acc += col[k] * h;
                }
                dst[i] += acc * minus_i - col[i] * (0.5 * (self.damping[i] + self.damping[j]));
            }
        }
        // +i ρ H: column j of ρH is Σ_k ρ[:, k] H[k, j]
        let plus_i = c64::new(0.0, 1.0);
        for j in 0..d {
            for &(k, h) in &self.hamiltonian.rows[j] {
                let f = plus_i * h;
                let (src, dst) = (k * d, j * d);
                for i in 0..d {
                    out[dst + i] += rho[src + i] * f;
                }
            }
        }
        // jumps C ρ Cᵀ (real operators)
        let mut tmp = vec![c64::new(0.0, 0.0); d];
        for c in &self.collapse {
            for j in 0..d {
                if c.rows[j].is_empty() {
                    continue;
                }
                tmp.iter_mut().for_each(|x| *x = c64::new(0.0, 0.0));
                for &(l, v) in &c.rows[j] {
                    for k in 0..d {
                        tmp[k] += rho[k + l * d] * v;
                    }
                }
                for i in 0..d {
                    let mut acc = c64::new(0.0, 0.0);
                    for &(k, v) in &c.rows[i] {
                        acc += tmp[k] * v;
                    }
                    out[i + j * d] += acc;
                }
            }
        }
    }

    /// Explicit superoperator as `(row, col, value)` triplets over
    /// column-major vectorized density matrices.
    pub fn to_triplets(&self) -> Vec<(usize, usize, c64)> {
        let d = self.dim();
        let mut out = Vec::new();
        let h = &self.hamiltonian;
        // vec(Hρ) = (I ⊗ H) vec ρ, vec(ρH) = (Hᵀ ⊗ I) vec ρ
        for j in 0..d {
            for i in 0..d {
                for &(k, v) in &h.rows[i] {
                    out.push((i + j * d, k + j * d, c64::new(0.0, -v)));
                }
                for &(k, v) in &h.rows[j] {
                    out.push((i + j * d, i + k * d, c64::new(0.0, v)));
                }
                out.push((i + j * d, i + j * d, c64::new(-0.5 * (self.damping[i] + self.damping[j]), 0.0)));
            }
        }
        // vec(CρCᵀ) = (C ⊗ C) vec ρ
        for c in &self.collapse {
            for j in 0..d {
                for &(l, cj) in &c.rows[j] {
                    for i in 0..d {
                        for &(k, ci) in &c.rows[i] {
                            out.push((i + j * d, k + l * d, c64::new(ci * cj, 0.0)));
                        }
                    }
                }
            }
        }
        out
    }

    /// `K = −iH − ½ Σ C†C` as a dense matrix.
    pub(crate) fn effective_generator(&self) -> faer::Mat<c64> {
        let d = self.dim();
        let mut k = faer::Mat::<c64>::zeros(d, d);
        for i in 0..d {
            for &(j, v) in &self.hamiltonian.rows[i] {
                k[(i, j)] = c64::new(0.0, -v);
            }
            k[(i, i)] += c64::new(-0.5 * self.damping[i], 0.0);
        }
        k
    }

    /// Diagonal of the membrane number operator.
    pub(crate) fn phonon_numbers(&self) -> Vec<f64> {
        self.space.states().map(|(_, _, m)| m as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Liouvillian {
        let lp = LinearizedParams {
            detuning: 1.0,
            amplitude: 0.1,
            right_coupling: 0.05,
            left_coupling: 0.02,
            static_force: 0.01,
            doublet_coupling: 0.3,
            mechanical_frequency: 1.0,
        };
        let d = DissipationSpec { cavity_decay: 0.1, mechanical_decay: 0.01, thermal_occupation: 2.0 };
        Liouvillian::with_cap(&lp, &d, &TruncationSpec::new(2, 2, 3), 512).unwrap()
    }

    #[test]
    fn matrix_free_apply_matches_triplets() {
        let l = small();
        let d = l.dim();
        let rho: Vec<c64> = (0..d * d).map(|k| c64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let mut a = vec![c64::new(0.0, 0.0); d * d];
        l.apply(&rho, &mut a);
        let mut b = vec![c64::new(0.0, 0.0); d * d];
        for (r, c, v) in l.to_triplets() {
            b[r] += v * rho[c];
        }
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn trace_is_preserved() {
        let l = small();
        let d = l.dim();
        let mut column_sums = vec![c64::new(0.0, 0.0); d * d];
        for (r, c, v) in l.to_triplets() {
            if r % d == r / d {
                column_sums[c] += v;
            }
        }
        assert!(column_sums.iter().all(|s| s.norm() < 1e-12));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let lp = LinearizedParams {
            detuning: 1.0,
            amplitude: 0.0,
            right_coupling: 0.0,
            left_coupling: 0.0,
            static_force: 0.0,
            doublet_coupling: 0.0,
            mechanical_frequency: 1.0,
        };
        let err = Liouvillian::with_cap(&lp, &DissipationSpec::default(), &TruncationSpec::new(8, 8, 9), 512).unwrap_err();
        assert_eq!(err, OptomechError::DimensionCap { dim: 576, cap: 512 });
    }
}
