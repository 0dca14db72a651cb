mod common;

use std::f64::consts::PI;

use common::*;
use faer::c64;
use rand::Rng;
use rlattice::designs;
use rlattice::lattice::solve_modes;
use rlattice::pca::{
    compile_grid, driven_response, field_map, spectrum_csv, transmission_spectrum, Band, DriveSettings, PcaGrid,
    PortRole, PortSide, ResponseSystem,
};

fn system(g: &PcaGrid) -> ResponseSystem {
    ResponseSystem::from_grid(g).unwrap()
}

fn outputs(g: &PcaGrid, f_hz: f64, inputs: Option<Vec<[f64; 2]>>) -> Vec<c64> {
    let sys = system(g);
    let drive = DriveSettings { inputs, ..DriveSettings::default() };
    let r = driven_response(&sys, &drive.at(2.0 * PI * f_hz, sys.source_count()).unwrap()).unwrap();
    r.outputs.into_iter().map(|(_, y)| y).collect()
}

fn bare_hz(g: &PcaGrid) -> f64 {
    let one = PcaGrid { bits: vec![vec![1]], ports: vec![], ..g.clone() };
    solve_modes(&compile_grid(&one).unwrap()).unwrap().frequencies[0]
}

#[test]
fn transmission_is_reciprocal() {
    let mut r = rng(21);
    for _ in 0..20 {
        let mut bits = random_bits(&mut r, 8, 15, 0.6);
        let (a, b) = (r.gen_range(0..8), r.gen_range(0..8));
        bits[a][0] = 1;
        bits[b][14] = 1;
        let forward = grid(bits.clone(), vec![port(PortSide::Left, a, PortRole::Source), port(PortSide::Right, b, PortRole::Sink)]);
        let backward = grid(bits, vec![port(PortSide::Right, b, PortRole::Source), port(PortSide::Left, a, PortRole::Sink)]);
        let f0 = bare_hz(&forward);
        for f in [0.9 * f0, f0, 1.05 * f0] {
            let (x, y) = (outputs(&forward, f, None)[0], outputs(&backward, f, None)[0]);
            let scale = x.norm_sqr().max(y.norm_sqr());
            assert!((x.norm_sqr() - y.norm_sqr()).abs() <= 1e-9 * scale, "{x} vs {y}");
        }
    }
}

#[test]
fn transmitted_power_never_exceeds_input() {
    let mut r = rng(22);
    for _ in 0..10 {
        let mut bits = random_bits(&mut r, 6, 10, 0.7);
        for row in &mut bits {
            row[0] = 1;
            row[9] = 1;
        }
        let ports = vec![
            port(PortSide::Left, 1, PortRole::Source),
            port(PortSide::Right, 0, PortRole::Sink),
            port(PortSide::Right, 3, PortRole::Sink),
            port(PortSide::Left, 5, PortRole::Sink),
        ];
        let g = grid(bits, ports);
        let f0 = bare_hz(&g);
        let s = transmission_spectrum(&system(&g), &Band::new(0.8 * f0, 1.2 * f0, 81).unwrap(), &DriveSettings::default())
            .unwrap();
        for i in 0..s.frequencies_hz.len() {
            let total: f64 = s.sinks.iter().map(|k| k.s21_sq[i]).sum();
            assert!(total <= 1.0 + 1e-12, "{total}");
        }
    }
}

#[test]
fn outputs_are_linear_in_the_inputs() {
    let g = designs::grid("coupler").unwrap();
    let f = 1.02 * bare_hz(&g);
    let (x1, x2) = ([0.7, -0.2], [-0.3, 1.1]);
    let both = outputs(&g, f, Some(vec![x1, x2]));
    let one = outputs(&g, f, Some(vec![x1, [0.0, 0.0]]));
    let two = outputs(&g, f, Some(vec![[0.0, 0.0], x2]));
    for k in 0..both.len() {
        let sum = one[k] + two[k];
        assert!((both[k] - sum).norm() <= 1e-12 * both[k].norm().max(1e-300), "sink {k}");
    }
}

#[test]
fn a_screen_across_a_single_path_blocks_it() {
    let mut r = rng(23);
    for _ in 0..10 {
        let row = r.gen_range(0..8);
        let mut bits = vec![vec![0u8; 15]; 8];
        bits[row] = vec![1; 15];
        let ports = vec![port(PortSide::Left, row, PortRole::Source), port(PortSide::Right, row, PortRole::Sink)];
        let open = grid(bits.clone(), ports.clone());
        bits[row][r.gen_range(1..14)] = 0;
        let cut = grid(bits, ports);
        let f0 = bare_hz(&open);
        let band = Band::new(0.8 * f0, 1.3 * f0, 301).unwrap();
        let peak = |g: &PcaGrid| {
            let s = transmission_spectrum(&system(g), &band, &DriveSettings::default()).unwrap();
            s.sinks[0].s21_sq.iter().copied().fold(0.0, f64::max)
        };
        let (through, blocked) = (peak(&open), peak(&cut));
        assert!(through > 1e-3, "open path transmits: {through}");
        assert!(blocked < 1e-12, "cut path transmits {blocked}");
    }
}

#[test]
fn disconnected_designs_transmit_nothing() {
    let mut bits = vec![vec![1u8; 15]; 8];
    for row in &mut bits {
        row[7] = 0;
    }
    let g = grid(bits, vec![port(PortSide::Left, 2, PortRole::Source), port(PortSide::Right, 5, PortRole::Sink)]);
    let f0 = bare_hz(&g);
    let s = transmission_spectrum(&system(&g), &Band::new(0.5 * f0, 1.5 * f0, 201).unwrap(), &DriveSettings::default())
        .unwrap();
    assert!(s.sinks[0].s21_sq.iter().all(|&v| v < 1e-12));
}

#[test]
fn spectra_are_deterministic() {
    let g = designs::grid("interferometer").unwrap();
    let band = Band::new(2e9, 4e9, 201).unwrap();
    let once = || spectrum_csv(&transmission_spectrum(&system(&g), &band, &DriveSettings::default()).unwrap());
    assert_eq!(once(), once());
}

/// Location of the transmission maximum in a narrow window around `f_hz`.
fn local_peak(g: &PcaGrid, drive: &DriveSettings, f_hz: f64, half_width: f64) -> f64 {
    let band = Band::new(f_hz - half_width, f_hz + half_width, 2001).unwrap();
    let s = transmission_spectrum(&system(g), &band, drive).unwrap();
    let y = &s.sinks[0].s21_sq;
    let i = (0..y.len()).max_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap();
    s.frequencies_hz[i]
}

#[test]
fn weakly_loaded_chain_peaks_at_its_eigenfrequencies() {
    let g = grid(vec![vec![1; 5]], vec![port(PortSide::Left, 0, PortRole::Source), port(PortSide::Right, 0, PortRole::Sink)]);
    let modes = solve_modes(&compile_grid(&g).unwrap()).unwrap().frequencies;
    let loaded = |kp: f64| DriveSettings { port_coupling: 2.0 * PI * kp, intrinsic_loss: 2.0 * PI * kp / 10.0, inputs: None };
    for f in &modes {
        let coarse = (local_peak(&g, &loaded(2e6), *f, 2e6) - f).abs();
        let fine = (local_peak(&g, &loaded(2e4), *f, 2e4) - f).abs();
        assert!(fine / f < 1e-6, "{f}: off by {fine}");
        assert!(fine <= coarse, "{f}: {fine} vs {coarse}");
    }
}

#[test]
fn interferometer_field_is_mirror_symmetric() {
    let g = designs::grid("interferometer").unwrap();
    let sys = system(&g);
    let f = 2.0 * PI * 3.0e9;
    let r = driven_response(&sys, &g.drive_settings().at(f, 1).unwrap()).unwrap();
    let map = field_map(&g, &sys, &r);
    let max = map.intensity.iter().flatten().copied().fold(0.0, f64::max);
    assert!(max > 0.0);
    for row in 0..=6 {
        for col in 0..map.cols {
            let (a, b) = (map.intensity[row][col], map.intensity[6 - row][col]);
            assert!((a - b).abs() <= 1e-9 * max, "({row}, {col})");
        }
    }
}

#[test]
fn single_loaded_post_has_the_expected_linewidth() {
    let g = grid(vec![vec![1]], vec![port(PortSide::Left, 0, PortRole::Source)]);
    let sys = system(&g);
    let drive = DriveSettings::default();
    let w0 = 2.0 * PI * bare_hz(&g);
    let power = |w: f64| driven_response(&sys, &drive.at(w, 1).unwrap()).unwrap().amplitudes[0].norm_sqr();
    let peak = power(w0);
    let (mut lo, mut hi) = (w0, w0 + 100.0 * drive.port_coupling);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if power(mid) > 0.5 * peak {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let expected = 0.5 * (drive.intrinsic_loss + drive.port_coupling);
    assert!(((lo - w0) - expected).abs() / expected < 0.01, "{} vs {expected}", lo - w0);
}

#[test]
fn two_channel_routes_to_distinct_passbands() {
    let g = designs::grid("two_channel").unwrap();
    let s = transmission_spectrum(&system(&g), &Band::new(2.8e9, 3.3e9, 1001).unwrap(), &DriveSettings::default()).unwrap();
    let argmax = |y: &[f64]| (0..y.len()).max_by(|&a, &b| y[a].total_cmp(&y[b])).unwrap();
    let (a, b) = (&s.sinks[0].s21_sq, &s.sinks[1].s21_sq);
    let (ia, ib) = (argmax(a), argmax(b));
    assert_ne!(ia, ib);
    assert!(b[ia] < 0.1 * a[ia], "sink 1 leaks at sink 0's passband");
    assert!(a[ib] < 0.1 * b[ib], "sink 0 leaks at sink 1's passband");
}
