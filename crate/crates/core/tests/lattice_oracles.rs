mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use rlattice::lattice::shapes::{line, regular_polygon};
use rlattice::lattice::{assemble_matrices, gap_capacitance, mutual_inductance, solve_modes};
use rlattice::{LatticeModel, Post};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn hand_evaluated_constants() {
    let p = Post::new(0, 0.0, 0.0, 1e-3, 5e-3, 1e-5);
    assert!(rel(gap_capacitance(&p).unwrap(), 2.781e-12) < 1e-3);
    let q = Post::new(1, 4e-3, 0.0, 1e-3, 5e-3, 1e-5);
    assert!(rel(mutual_inductance(&p, &q, &coupling()).unwrap(), 7.358e-11) < 1e-3);
    let single = LatticeModel::new("one", coupling(), vec![p]);
    assert!(rel(solve_modes(&single).unwrap().frequencies[0], 3.018e9) < 1e-3);
}

#[test]
fn pair_matches_closed_form() {
    let m = LatticeModel::new("pair", coupling(), line(2, PITCH, template()));
    let s = solve_modes(&m).unwrap();
    let c = gap_capacitance(&m.posts[0]).unwrap();
    let mutual = 0.2e-9 * (-1.0f64).exp();
    let f = |l: f64| 1.0 / (2.0 * PI * (c * l).sqrt());
    assert!(rel(s.frequencies[0], f(1e-9 + mutual)) < 1e-12);
    assert!(rel(s.frequencies[1], f(1e-9 - mutual)) < 1e-12);
    let v = s.unit_vector(0);
    assert!(v[0] * v[1] > 0.0, "lower mode is the in-phase one");
}

#[test]
fn triangle_matches_circulant() {
    let m = LatticeModel::new("tri", coupling(), regular_polygon(3, PITCH, template()));
    let s = solve_modes(&m).unwrap();
    let c = gap_capacitance(&m.posts[0]).unwrap();
    let mutual = 0.2e-9 * (-1.0f64).exp();
    let f = |l: f64| 1.0 / (2.0 * PI * (c * l).sqrt());
    assert!(rel(s.frequencies[0], f(1e-9 + 2.0 * mutual)) < 1e-12);
    assert!(rel(s.frequencies[1], f(1e-9 - mutual)) < 1e-12);
    assert!(rel(s.frequencies[2], f(1e-9 - mutual)) < 1e-12);
}

fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut d = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    d
}

/// Roots in ω² of `det(C⁻¹ − ω²L)`, bracketed on a log grid and bisected.
fn characteristic_roots(l: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    let n = l.len();
    let p = |x: f64| {
        det((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 / c[i] } else { 0.0 } - x * l[i][j]).collect()).collect())
    };
    let (lo, hi) = (1e18f64, 1e22f64);
    let steps = 20000;
    let xs: Vec<f64> = (0..=steps).map(|k| lo * (hi / lo).powf(k as f64 / steps as f64)).collect();
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut pa, pb) = (p(a), p(b));
        if pa.signum() == pb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            let pm = p(m);
            if pm.signum() == pa.signum() {
                a = m;
                pa = pm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

#[test]
fn small_lattices_match_characteristic_polynomial() {
    let mut r = rng(11);
    for n in 1..=4 {
        for _ in 0..5 {
            let m = random_lattice(&mut r, n, false);
            let (l, c) = hand_matrices(&m);
            let roots = characteristic_roots(&l, &c);
            assert_eq!(roots.len(), n, "distinct roots for random geometry");
            let s = solve_modes(&m).unwrap();
            for (f, w2) in s.frequencies.iter().zip(&roots) {
                assert!(rel(*f, w2.sqrt() / (2.0 * PI)) < 1e-9);
            }
        }
    }
}

#[test]
fn rigid_motions_leave_frequencies_unchanged() {
    let mut r = rng(12);
    for _ in 0..10 {
        let m = random_lattice(&mut r, 8, true);
        let base = solve_modes(&m).unwrap().frequencies;
        let (theta, dx, dy) = (0.7f64, 3.1e-2, -1.7e-2);
        let mut moved = m.clone();
        for p in &mut moved.posts {
            let (x, y) = (p.x, p.y);
            p.x = x * theta.cos() - y * theta.sin() + dx;
            p.y = x * theta.sin() + y * theta.cos() + dy;
        }
        let f = solve_modes(&moved).unwrap().frequencies;
        for (a, b) in f.iter().zip(&base) {
            assert!(rel(*a, *b) < 1e-12);
        }
    }
}

#[test]
fn stronger_single_coupling_never_raises_the_lowest_mode() {
    let mut r = rng(13);
    for n in 3..=6 {
        for _ in 0..20 {
            let m = random_lattice(&mut r, n, false);
            let (mut l, c) = hand_matrices(&m);
            let lowest = solve_modes(&m).unwrap().frequencies[0];
            let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
            if i == j {
                continue;
            }
            let bump = r.gen_range(0.0..0.05) * l[i][i];
            l[i][j] += bump;
            l[j][i] += bump;
            let bumped = brute_force_frequencies(&l, &c)[0];
            assert!(bumped <= lowest * (1.0 + 1e-12), "{bumped} > {lowest}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mode_count_and_residuals(seed in any::<u64>(), n in 1usize..=30) {
        let m = random_lattice(&mut rng(seed), n, true);
        let s = solve_modes(&m).unwrap();
        prop_assert_eq!(s.len(), m.active_count());
        let mats = assemble_matrices(&m).unwrap();
        let k = s.len();
        let cinv_norm = mats.capacitance.iter().map(|c| 1.0 / c).fold(0.0, f64::max);
        for (mode, f) in s.frequencies.iter().enumerate() {
            let v = &s.eigenvectors[mode];
            let w2 = (2.0 * PI * f).powi(2);
            let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let res = (0..k)
                .map(|i| {
                    let lv: f64 = (0..k).map(|j| mats.inductance[(i, j)] * v[j]).sum();
                    (v[i] / mats.capacitance[i] - w2 * lv).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            prop_assert!(res / (cinv_norm * vnorm) < 1e-9, "residual {}", res / (cinv_norm * vnorm));
        }
        let brute = brute_force_frequencies(&hand_matrices(&m).0, &hand_matrices(&m).1);
        for (a, b) in s.frequencies.iter().zip(&brute) {
            prop_assert!(rel(*a, *b) < 1e-9);
        }
    }
}
