#![allow(dead_code)]

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlattice::lattice::shapes::PostTemplate;
use rlattice::optomech::{DissipationSpec, LinearizedParams};
use rlattice::pca::{GridPort, PcaGrid, PortRole, PortSide};
use rlattice::{CouplingModel, LatticeModel, Post};

pub const PITCH: f64 = 4e-3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn template() -> PostTemplate {
    PostTemplate { radius: 1e-3, height: 5e-3, gap: 1e-5 }
}

pub fn coupling() -> CouplingModel {
    CouplingModel::new(1e-9, 0.2, PITCH)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j].powi(2)).sum();
        let scale: f64 = (0..n).map(|i| m[i][i].powi(2)).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Mode frequencies (Hz, ascending) from inductance and capacitance
/// matrices: ω² are the eigenvalues of `C^{-1/2} L^{-1} C^{-1/2}`, i.e.
/// reciprocals of the eigenvalues of `C^{1/2} L C^{1/2}`.
pub fn brute_force_frequencies(l: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    let n = l.len();
    let s: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| c[i].sqrt() * l[i][j] * c[j].sqrt()).collect()).collect();
    let mut f: Vec<f64> = jacobi_eigenvalues(&s).iter().map(|mu| 1.0 / (2.0 * std::f64::consts::PI * mu.sqrt())).collect();
    f.sort_by(f64::total_cmp);
    f
}

/// Inductance matrix and capacitances assembled by hand from the posts.
pub fn hand_matrices(m: &LatticeModel) -> (Vec<Vec<f64>>, Vec<f64>) {
    let active: Vec<&Post> = m.active_posts().collect();
    let k = &m.coupling;
    let l = active
        .iter()
        .map(|a| {
            active
                .iter()
                .map(|b| {
                    if a.id == b.id {
                        k.base_inductance
                    } else {
                        k.coupling_strength * k.base_inductance * (-a.distance(b) / k.decay_length).exp()
                    }
                })
                .collect()
        })
        .collect();
    let c = active.iter().map(|p| rlattice::lattice::EPSILON_0 * std::f64::consts::PI * p.radius * p.radius / p.gap).collect();
    (l, c)
}

/// `n` posts scattered in a square with at least 1.5 pitch between
/// neighbours and gaps between 5 and 20 μm; roughly one in eight shorted.
pub fn random_lattice(rng: &mut impl Rng, n: usize, allow_shorted: bool) -> LatticeModel {
    let side = PITCH * 2.0 * (n as f64).sqrt().max(2.0);
    let mut posts: Vec<Post> = Vec::with_capacity(n);
    while posts.len() < n {
        let (x, y) = (rng.gen_range(0.0..side), rng.gen_range(0.0..side));
        if posts.iter().any(|p| (p.x - x).hypot(p.y - y) < 1.5 * PITCH) {
            continue;
        }
        let gap = if allow_shorted && rng.gen_bool(0.125) { 0.0 } else { rng.gen_range(5e-6..20e-6) };
        posts.push(Post::new(posts.len() as u32, x, y, 1e-3, 5e-3, gap));
    }
    if posts.iter().all(|p| p.gap == 0.0) {
        posts[0].gap = 1e-5;
    }
    LatticeModel::new("random", CouplingModel::new(1e-9, 0.15, PITCH / 2.0), posts)
}

pub fn grid(bits: Vec<Vec<u8>>, ports: Vec<GridPort>) -> PcaGrid {
    PcaGrid { bits, pitch_m: PITCH, post: template(), ports, coupling: None, drive: None }
}

pub fn port(side: PortSide, row: usize, role: PortRole) -> GridPort {
    GridPort { side, row, role }
}

pub fn random_bits(rng: &mut impl Rng, rows: usize, cols: usize, density: f64) -> Vec<Vec<u8>> {
    (0..rows).map(|_| (0..cols).map(|_| u8::from(rng.gen_bool(density))).collect()).collect()
}

/// Dense single-cavity oracle: `H = Δa†a + ω_m b†b + F(b + b†) − λ(a + a†)(b + b†)`
/// with cavity decay κ and a thermal membrane bath, solved as a dense linear
/// system with the trace condition replacing one row.
pub fn single_mode_occupation(lp: &LinearizedParams, d: &DissipationSpec, na: usize, nb: usize) -> f64 {
    let n = na * nb;
    let idx = |a: usize, b: usize| a * nb + b;
    let mut ann_a = Mat::<f64>::zeros(n, n);
    let mut ann_b = Mat::<f64>::zeros(n, n);
    for a in 0..na {
        for b in 0..nb {
            if a > 0 {
                ann_a[(idx(a - 1, b), idx(a, b))] = (a as f64).sqrt();
            }
            if b > 0 {
                ann_b[(idx(a, b - 1), idx(a, b))] = (b as f64).sqrt();
            }
        }
    }
    let cre_a = ann_a.transpose().to_owned();
    let cre_b = ann_b.transpose().to_owned();
    let xa = &ann_a + &cre_a;
    let xb = &ann_b + &cre_b;
    let h: Mat<f64> = lp.detuning * (&cre_a * &ann_a) + lp.mechanical_frequency * (&cre_b * &ann_b)
        + lp.static_force * &xb
        - lp.right_coupling * (&xa * &xb);
    let collapse = [
        d.cavity_decay.sqrt() * &ann_a,
        (d.mechanical_decay * (d.thermal_occupation + 1.0)).sqrt() * &ann_b,
        (d.mechanical_decay * d.thermal_occupation).sqrt() * &cre_b,
    ];
    // vec(AρB) = (Bᵀ ⊗ A) vec(ρ), column-major
    let kron = |p: &Mat<f64>, q: &Mat<f64>, r: usize, c: usize| p[(r / n, c / n)] * q[(r % n, c % n)];
    let eye = Mat::<f64>::identity(n, n);
    let ht = h.transpose().to_owned();
    let mut sup: Mat<c64> =
        Mat::from_fn(n * n, n * n, |r, c| c64::new(0.0, kron(&ht, &eye, r, c) - kron(&eye, &h, r, c)));
    for l in &collapse {
        let ldl = l.transpose() * l;
        let ldlt = ldl.transpose().to_owned();
        for c in 0..n * n {
            for r in 0..n * n {
                let v = kron(l, l, r, c) - 0.5 * kron(&eye, &ldl, r, c) - 0.5 * kron(&ldlt, &eye, r, c);
                sup[(r, c)] += c64::new(v, 0.0);
            }
        }
    }
    let mut rhs = Mat::<c64>::zeros(n * n, 1);
    for c in 0..n * n {
        sup[(0, c)] = c64::new(0.0, 0.0);
    }
    for k in 0..n {
        sup[(0, k + k * n)] = c64::new(1.0, 0.0);
    }
    rhs[(0, 0)] = c64::new(1.0, 0.0);
    let rho = sup.partial_piv_lu().solve(&rhs);
    (0..na).flat_map(|a| (0..nb).map(move |b| (a, b))).map(|(a, b)| b as f64 * rho[(idx(a, b) * (n + 1), 0)].re).sum()
}
