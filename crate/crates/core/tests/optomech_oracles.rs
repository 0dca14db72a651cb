mod common;

use common::single_mode_occupation;
use faer::c64;
use rlattice::optomech::{
    build_liouvillian, linearize, occupation_curve, propagate, steady_occupation, steady_state, CoolingRequest,
    CurveAxis, CurveGrid, DensityMatrix, DissipationSpec, OptomechParams, TruncationSpec,
};

fn params(g: f64, big_g: f64, detuning: f64) -> OptomechParams {
    OptomechParams {
        cavity_frequency: 20.0,
        mechanical_frequency: 1.0,
        electromechanical_coupling: g,
        doublet_coupling: big_g,
        drive_amplitude: 0.1,
        drive_frequency: 20.0,
    }
    .with_detuning(detuning)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn library_occupation(p: &OptomechParams, d: &DissipationSpec, t: TruncationSpec) -> (f64, DensityMatrix, f64) {
    let lp = linearize(p).unwrap();
    let l = build_liouvillian(&lp, p, d, &t).unwrap();
    let (rho, _) = steady_state(&l).unwrap();
    let amp = rho.phonon_amplitude(&l).norm_sqr();
    (rho.phonon_number(&l), rho, amp)
}

#[test]
fn zero_doublet_coupling_matches_single_mode_oracle() {
    let d = DissipationSpec::default();
    for (g, detuning) in [(0.3, 1.0), (0.5, 0.8), (0.2, 1.3)] {
        let p = params(g, 0.0, detuning);
        let (n_b, _, _) = library_occupation(&p, &d, TruncationSpec::new(3, 3, 12));
        let oracle = single_mode_occupation(&linearize(&p).unwrap(), &d, 3, 12);
        assert!(rel(n_b, oracle) < 1e-6, "g = {g}, Δ = {detuning}: {n_b} vs {oracle}");
    }
}

#[test]
fn weak_coupling_reaches_the_sideband_cooling_limit() {
    let d = DissipationSpec::default();
    let p = params(0.05, 0.0, 1.0);
    let lp = linearize(&p).unwrap();
    let (n_b, _, _) = library_occupation(&p, &d, TruncationSpec::new(3, 2, 16));
    let lam2 = lp.right_coupling.powi(2);
    let k = d.cavity_decay;
    let rate = |x: f64| lam2 * k / (k * k / 4.0 + x * x);
    let (cool, heat) = (rate(lp.detuning - 1.0), rate(lp.detuning + 1.0));
    let gamma = d.mechanical_decay;
    let formula = (gamma * d.thermal_occupation + heat) / (gamma + cool - heat);
    assert!(n_b < d.thermal_occupation);
    assert!(rel(n_b, formula) < 0.2, "{n_b} vs {formula}");
}

#[test]
fn uncoupled_membrane_is_thermal() {
    let d = DissipationSpec::default();
    let levels = 12;
    let (n_b, _, _) = library_occupation(&params(0.0, 0.3, 1.0), &d, TruncationSpec::new(2, 2, levels));
    // truncated geometric distribution with ratio n/(n+1)
    let r = d.thermal_occupation / (d.thermal_occupation + 1.0);
    let z: f64 = (0..levels).map(|k| r.powi(k as i32)).sum();
    let mean: f64 = (0..levels).map(|k| k as f64 * r.powi(k as i32)).sum::<f64>() / z;
    assert!(rel(n_b, mean) < 1e-9, "{n_b} vs {mean}");
}

#[test]
fn static_force_only_displaces_the_membrane() {
    let d = DissipationSpec::default();
    let p = OptomechParams { drive_amplitude: 0.3, ..params(0.5, 0.0, 1.0) };
    let lp = linearize(&p).unwrap();
    let t = TruncationSpec::new(4, 2, 20);
    let with = build_liouvillian(&lp, &p, &d, &t).unwrap();
    let without = build_liouvillian(&lp.without_force(), &p, &d, &t).unwrap();
    let (rho_f, _) = steady_state(&with).unwrap();
    let (rho_0, _) = steady_state(&without).unwrap();
    let beta = rho_f.phonon_amplitude(&with);
    assert!(beta.norm() > 1e-2, "force displaces the membrane");
    assert!(rho_0.phonon_amplitude(&without).norm() < 1e-9);
    let fluct = rho_f.phonon_number(&with) - beta.norm_sqr();
    assert!(rel(fluct, rho_0.phonon_number(&without)) < 1e-3);
}

#[test]
fn steady_states_are_physical() {
    let d = DissipationSpec::default();
    for (big_g, detuning) in [(0.0, 1.0), (0.2, 0.8), (0.2, 1.2), (0.5, 1.5)] {
        let (_, rho, _) = library_occupation(&params(0.5, big_g, detuning), &d, TruncationSpec::new(3, 3, 12));
        assert!(rho.hermiticity_defect() < 1e-10);
        assert!((rho.trace() - c64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(rho.eigenvalues()[0] > -1e-8);
    }
}

#[test]
fn null_space_agrees_with_time_propagation() {
    let d = DissipationSpec { cavity_decay: 0.1, mechanical_decay: 1e-4, thermal_occupation: 1.0 };
    let t = TruncationSpec::new(2, 2, 10);
    for (big_g, detuning) in [(0.0, 1.0), (0.2, 0.8), (0.2, 1.2)] {
        let p = params(0.5, big_g, detuning);
        let lp = linearize(&p).unwrap();
        let l = build_liouvillian(&lp, &p, &d, &t).unwrap();
        let (rho, _) = steady_state(&l).unwrap();
        let target = rho.phonon_number(&l);
        let mut state = DensityMatrix::thermal_product(&l);
        let mut n = state.phonon_number(&l);
        for _ in 0..40 {
            state = propagate(&l, &state, 50.0, 0.05);
            let next = state.phonon_number(&l);
            let settled = (next - n).abs() < 1e-7 * next;
            n = next;
            if settled {
                break;
            }
        }
        assert!(rel(n, target) < 1e-4, "G = {big_g}, Δ = {detuning}: {n} vs {target}");
    }
}

#[test]
fn vanishing_doublet_coupling_is_continuous() {
    let d = DissipationSpec::default();
    let t = TruncationSpec::new(3, 3, 12);
    for detuning in [0.9, 1.0, 1.1] {
        let zero = steady_occupation(&linearize(&params(0.5, 0.0, detuning)).unwrap(), &params(0.5, 0.0, detuning), &d, &t).unwrap();
        let p = params(0.5, 1e-6, detuning);
        let tiny = steady_occupation(&linearize(&p).unwrap(), &p, &d, &t).unwrap();
        assert!(rel(tiny.n_b, zero.n_b) < 5e-3);
    }
}

fn detuning_request(big_g: f64, lo: f64, hi: f64, points: usize, t: TruncationSpec) -> CoolingRequest {
    CoolingRequest {
        params: params(0.5, big_g, 1.0),
        dissipation: DissipationSpec::default(),
        truncation: t,
        axis: CurveAxis::Detuning,
        grid: CurveGrid::Linear { start: lo, end: hi, points },
    }
}

#[test]
fn without_doublet_coupling_one_minimum_near_the_mechanical_frequency() {
    let req = CoolingRequest { params: params(0.3, 0.0, 1.0), ..detuning_request(0.0, 0.6, 1.4, 17, TruncationSpec::new(3, 3, 16)) };
    let curve = occupation_curve(&req).unwrap();
    assert_eq!(curve.minima.len(), 1);
    assert!((curve.minima[0].x - 1.0).abs() < 0.05, "{:?}", curve.minima);
}

#[test]
fn minimum_splitting_grows_with_doublet_coupling() {
    let mut separations = Vec::new();
    for big_g in [0.1, 0.2, 0.3] {
        let req = CoolingRequest {
            params: params(0.4, big_g, 1.0),
            ..detuning_request(big_g, 0.6, 1.4, 33, TruncationSpec::new(3, 3, 12))
        };
        let curve = occupation_curve(&req).unwrap();
        assert_eq!(curve.minima.len(), 2, "G = {big_g}: {:?}", curve.minima);
        separations.push(curve.minima[1].x - curve.minima[0].x);
    }
    assert!(separations.windows(2).all(|w| w[1] > w[0]), "{separations:?}");
}
