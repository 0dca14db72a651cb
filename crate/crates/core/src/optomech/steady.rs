use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, Side};

use super::liouvillian::Liouvillian;
use super::OptomechError;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };

/// Density matrix stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub dim: usize,
    pub data: Vec<c64>,
}

impl DensityMatrix {
    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.data[i + j * self.dim]
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Cavities in vacuum, membrane in its (truncated) thermal state.
    pub fn thermal_product(l: &Liouvillian) -> Self {
        let d = l.dim();
        let n = l.thermal_occupation;
        let ratio = if n > 0.0 { n / (n + 1.0) } else { 0.0 };
        let weights: Vec<f64> = (0..l.space.mechanics).map(|m| ratio.powi(m as i32)).collect();
        let norm: f64 = weights.iter().sum();
        let mut data = vec![ZERO; d * d];
        for (m, w) in weights.iter().enumerate() {
            let i = l.space.index(0, 0, m);
            data[i + i * d] = c64::new(w / norm, 0.0);
        }
        Self { dim: d, data }
    }

    /// `Σ_i x_i ρ_ii` for a diagonal observable.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> f64 {
        diag.iter().enumerate().map(|(i, x)| x * self.get(i, i).re).sum()
    }

    /// Mean phonon number `⟨b†b⟩`.
    pub fn phonon_number(&self, l: &Liouvillian) -> f64 {
        self.expectation_diagonal(&l.phonon_numbers())
    }

    /// Membrane amplitude `⟨b⟩ = tr(b ρ)`.
    pub fn phonon_amplitude(&self, l: &Liouvillian) -> c64 {
        let s = l.space;
        let mut acc = ZERO;
        for (r, lft, m) in s.states() {
            if m > 0 {
                let lower = s.index(r, lft, m - 1);
                acc += self.get(s.index(r, lft, m), lower) * (m as f64).sqrt();
            }
        }
        acc
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim;
        let m = Mat::from_fn(d, d, |i, j| (self.get(i, j) + self.get(j, i).conj()) * 0.5);
        m.self_adjoint_eigenvalues(Side::Lower).expect("hermitian eigenvalues")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// `‖L(ρ)‖ / ‖L‖₁`-style scale-free residual of the returned state.
    pub residual: f64,
    pub trace_error: f64,
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Exact inverse of `X ↦ KX + XK†` via the eigendecomposition of `K`.
struct SylvesterPreconditioner {
    v: Mat<c64>,
    v_inv: Mat<c64>,
    denominators: Mat<c64>,
}

impl SylvesterPreconditioner {
    fn new(l: &Liouvillian) -> Result<Self, OptomechError> {
        let k = l.effective_generator();
        let eig = k.eigen().map_err(|e| OptomechError::Solver(format!("eigendecomposition failed: {e:?}")))?;
        let v = eig.U().to_owned();
        let lambda: Vec<c64> = (0..l.dim()).map(|i| eig.S().column_vector()[i]).collect();
        let v_inv = v.partial_piv_lu().inverse();
        // a slight extra damping keeps undamped directions invertible
        let min_rate = l.damping.iter().cloned().filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
        let shift = if min_rate.is_finite() { 1e-3 * min_rate } else { 1e-12 };
        let d = l.dim();
        let denominators = Mat::from_fn(d, d, |i, j| lambda[i] + lambda[j].conj() - c64::new(shift, 0.0));
        Ok(Self { v, v_inv, denominators })
    }

    fn apply(&self, r: &[c64], out: &mut [c64]) {
        let d = self.v.nrows();
        let rm = faer::MatRef::from_column_major_slice(r, d, d);
        let mut y = &self.v_inv * rm * self.v_inv.adjoint();
        for j in 0..d {
            for i in 0..d {
                y[(i, j)] = y[(i, j)] / self.denominators[(i, j)];
            }
        }
        let x = &self.v * &y * self.v.adjoint();
        for j in 0..d {
            out[j * d..(j + 1) * d].copy_from_slice(x.col_as_slice(j));
        }
    }
}

struct GmresOutcome {
    x: Vec<c64>,
    iterations: usize,
    relative_residual: f64,
}

/// Right-preconditioned restarted GMRES.
fn gmres(
    apply: &dyn Fn(&[c64], &mut [c64]),
    precondition: &dyn Fn(&[c64], &mut [c64]),
    b: &[c64],
    tol: f64,
    restart: usize,
    max_iterations: usize,
) -> GmresOutcome {
    let n = b.len();
    let b_norm = norm(b);
    let mut x = vec![ZERO; n];
    let mut iterations = 0;
    let mut work = vec![ZERO; n];
    let mut z = vec![ZERO; n];
    let mut relative = 1.0;
    while iterations < max_iterations {
        apply(&x, &mut work);
        let r: Vec<c64> = b.iter().zip(&work).map(|(b, ax)| b - ax).collect();
        let beta = norm(&r);
        relative = beta / b_norm;
        if relative <= tol {
            break;
        }
        let mut basis: Vec<Vec<c64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h: Vec<Vec<c64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<c64> = Vec::new();
        let mut g = vec![c64::new(beta, 0.0)];
        for j in 0..restart {
            iterations += 1;
            precondition(&basis[j], &mut z);
            apply(&z, &mut work);
            let mut col = vec![ZERO; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let c = inner(v, &work);
                col[i] = c;
                work.iter_mut().zip(v).for_each(|(w, vi)| *w -= c * vi);
            }
            let w_norm = norm(&work);
            col[j + 1] = c64::new(w_norm, 0.0);
            for i in 0..j {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = a * cs[i] + sn[i] * bb;
                col[i + 1] = -sn[i].conj() * a + bb * cs[i];
            }
            let (a, bb) = (col[j], col[j + 1]);
            let r = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            let (c, s) = if a.norm() == 0.0 {
                (0.0, c64::new(1.0, 0.0))
            } else {
                let phase = a / a.norm();
                (a.norm() / r, phase * bb.conj() / r)
            };
            col[j] = c * a + s * bb;
            col[j + 1] = ZERO;
            cs.push(c);
            sn.push(s);
            let gj = g[j];
            g[j] = gj * c;
            g.push(-s.conj() * gj);
            h.push(col);
            relative = g[j + 1].norm() / b_norm;
            if w_norm > 0.0 {
                basis.push(work.iter().map(|v| v / w_norm).collect());
            }
            if relative <= tol || w_norm == 0.0 || iterations >= max_iterations {
                break;
            }
        }
        let m = h.len();
        let mut y = vec![ZERO; m];
        for i in (0..m).rev() {
            let mut acc = g[i];
            for k in i + 1..m {
                acc -= h[k][i] * y[k];
            }
            y[i] = acc / h[i][i];
        }
        let mut combo = vec![ZERO; n];
        for (yi, v) in y.iter().zip(&basis) {
            combo.iter_mut().zip(v).for_each(|(c, vi)| *c += yi * vi);
        }
        precondition(&combo, &mut z);
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi += zi);
    }
    GmresOutcome { x, iterations, relative_residual: relative }
}

const GMRES_TOL: f64 = 1e-13;
const GMRES_RESTART: usize = 80;
const GMRES_MAX_ITERATIONS: usize = 2000;

/// Unique steady state from `L(ρ) + tr(ρ)·I/d = I/d`, whose solution has
/// `L(ρ) = 0` and unit trace.
pub fn steady_state(l: &Liouvillian) -> Result<(DensityMatrix, SolverReport), OptomechError> {
    let d = l.dim();
    let pre = SylvesterPreconditioner::new(l)?;
    let target = c64::new(1.0 / d as f64, 0.0);
    let mut rhs = vec![ZERO; d * d];
    (0..d).for_each(|i| rhs[i + i * d] = target);
    let augmented = |x: &[c64], out: &mut [c64]| {
        l.apply(x, out);
        let tr: c64 = (0..d).map(|i| x[i + i * d]).sum();
        (0..d).for_each(|i| out[i + i * d] += tr * target);
    };
    let outcome = gmres(&augmented, &|r, o| pre.apply(r, o), &rhs, GMRES_TOL, GMRES_RESTART, GMRES_MAX_ITERATIONS);
    if !(outcome.relative_residual <= 1e3 * GMRES_TOL) {
        return Err(OptomechError::Solver(format!(
            "GMRES stalled at relative residual {:.3e} after {} iterations",
            outcome.relative_residual, outcome.iterations
        )));
    }
    let rho = DensityMatrix { dim: d, data: outcome.x };
    let mut lr = vec![ZERO; d * d];
    l.apply(&rho.data, &mut lr);
    let report = SolverReport {
        iterations: outcome.iterations,
        residual: norm(&lr) / norm(&rho.data),
        trace_error: (rho.trace() - c64::new(1.0, 0.0)).norm(),
    };
    Ok((rho, report))
}

/// Fourth-order Runge–Kutta integration of `dρ/dt = L(ρ)`.
pub fn propagate(l: &Liouvillian, rho: &DensityMatrix, duration: f64, dt: f64) -> DensityMatrix {
    let n = rho.data.len();
    let steps = (duration / dt).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let mut y = rho.data.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
    let mut tmp = vec![ZERO; n];
    for _ in 0..steps {
        l.apply(&y, &mut k1);
        tmp.iter_mut().zip(&y).zip(&k1).for_each(|((t, y), k)| *t = y + k * (0.5 * h));
        l.apply(&tmp, &mut k2);
        tmp.iter_mut().zip(&y).zip(&k2).for_each(|((t, y), k)| *t = y + k * (0.5 * h));
        l.apply(&tmp, &mut k3);
        tmp.iter_mut().zip(&y).zip(&k3).for_each(|((t, y), k)| *t = y + k * h);
        l.apply(&tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    DensityMatrix { dim: rho.dim, data: y }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optomech::{DissipationSpec, LinearizedParams, TruncationSpec};

    fn lp(coupling: f64) -> LinearizedParams {
        LinearizedParams {
            detuning: 1.0,
            amplitude: 0.3,
            right_coupling: coupling,
            left_coupling: 0.5 * coupling,
            static_force: 0.01,
            doublet_coupling: 0.2,
            mechanical_frequency: 1.0,
        }
    }

    #[test]
    fn gmres_solves_a_small_system() {
        let a = [c64::new(4.0, 1.0), c64::new(1.0, 0.0), c64::new(0.5, -0.5), c64::new(3.0, 0.0)];
        let apply = |x: &[c64], o: &mut [c64]| {
            o[0] = a[0] * x[0] + a[1] * x[1];
            o[1] = a[2] * x[0] + a[3] * x[1];
        };
        let b = [c64::new(1.0, 0.0), c64::new(0.0, 2.0)];
        let out = gmres(&apply, &|r, o| o.copy_from_slice(r), &b, 1e-14, 5, 20);
        let mut check = [ZERO; 2];
        apply(&out.x, &mut check);
        assert!((check[0] - b[0]).norm() < 1e-13 && (check[1] - b[1]).norm() < 1e-13);
    }

    #[test]
    fn steady_state_is_a_physical_fixed_point() {
        let d = DissipationSpec { cavity_decay: 0.2, mechanical_decay: 0.02, thermal_occupation: 1.0 };
        let l = Liouvillian::with_cap(&lp(0.05), &d, &TruncationSpec::new(2, 2, 8), 512).unwrap();
        let (rho, report) = steady_state(&l).unwrap();
        assert!(report.residual < 1e-10, "{report:?}");
        assert!(report.trace_error < 1e-10);
        assert!(rho.hermiticity_defect() < 1e-10);
        assert!(rho.eigenvalues()[0] > -1e-8);
        let later = propagate(&l, &rho, 5.0, 0.02);
        assert!((later.phonon_number(&l) - rho.phonon_number(&l)).abs() < 1e-9);
    }
}
