use std::f64::consts::PI;
use std::str::FromStr;

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{c64, Mat, Side};
use serde::{Deserialize, Serialize};

use super::{PcaError, PcaGrid, PortRole};
use crate::lattice::{assemble_matrices, LatticeError, LatticeModel};

/// Port attached to one post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortBinding {
    pub post: u32,
    pub role: PortRole,
    pub label: String,
}

/// Drive frequency (rad/s), source amplitudes and damping rates (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub frequency: f64,
    pub inputs: Vec<c64>,
    pub port_coupling: f64,
    pub intrinsic_loss: f64,
}

impl DriveSpec {
    pub fn validate(&self) -> Result<(), PcaError> {
        if !(self.port_coupling > 0.0 && self.intrinsic_loss > 0.0) {
            return Err(PcaError::Drive("port coupling and intrinsic loss must be positive".into()));
        }
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(PcaError::Drive("drive frequency must be positive".into()));
        }
        if self.inputs.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(PcaError::Drive("input amplitudes must be finite".into()));
        }
        Ok(())
    }
}

/// Coupled-mode description of a lattice with ports: the symmetric
/// frequency matrix `Ω = (C^{-1/2} L⁻¹ C^{-1/2})^{1/2}` over active posts.
#[derive(Debug, Clone)]
pub struct ResponseSystem {
    pub post_ids: Vec<u32>,
    omega: Mat<f64>,
    ports: Vec<PortBinding>,
    /// Slot of every port post, `None` when the post does not resonate.
    port_slots: Vec<Option<usize>>,
}

impl ResponseSystem {
    pub fn new(model: &LatticeModel, ports: Vec<PortBinding>) -> Result<Self, PcaError> {
        for p in &ports {
            if model.post(p.post).is_none() {
                return Err(PcaError::Port(format!("port {} names unknown post {}", p.label, p.post)));
            }
        }
        let (post_ids, omega) = match assemble_matrices(model) {
            Ok(m) => {
                let n = m.len();
                let l_inv = m
                    .inductance
                    .llt(Side::Lower)
                    .map_err(|e| PcaError::Lattice(LatticeError::Solver(format!("{e:?}"))))?
                    .inverse();
                let k: Vec<f64> = m.capacitance.iter().map(|c| 1.0 / c.sqrt()).collect();
                let s = Mat::from_fn(n, n, |i, j| k[i] * l_inv[(i, j)] * k[j]);
                let eig = s.self_adjoint_eigen(Side::Lower).map_err(|e| LatticeError::Solver(format!("{e:?}")))?;
                let q = eig.U();
                let w: Vec<f64> = (0..n).map(|i| eig.S().column_vector()[i].max(0.0).sqrt()).collect();
                let omega = Mat::from_fn(n, n, |i, j| (0..n).map(|k| q[(i, k)] * w[k] * q[(j, k)]).sum::<f64>());
                // exact symmetry keeps the response reciprocal to rounding
                let omega = Mat::from_fn(n, n, |i, j| 0.5 * (omega[(i, j)] + omega[(j, i)]));
                (m.post_ids, omega)
            }
            Err(LatticeError::NoActivePosts) => (Vec::new(), Mat::zeros(0, 0)),
            Err(e) => return Err(e.into()),
        };
        let port_slots = ports.iter().map(|p| post_ids.iter().position(|&id| id == p.post)).collect();
        Ok(Self { post_ids, omega, ports, port_slots })
    }

    pub fn from_grid(grid: &PcaGrid) -> Result<Self, PcaError> {
        let model = super::compile_grid(grid)?;
        Self::new(&model, grid.port_bindings())
    }

    pub fn len(&self) -> usize {
        self.post_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.post_ids.is_empty()
    }

    pub fn ports(&self) -> &[PortBinding] {
        &self.ports
    }

    fn role_indices(&self, role: PortRole) -> Vec<usize> {
        (0..self.ports.len()).filter(|&i| self.ports[i].role == role).collect()
    }

    pub fn source_count(&self) -> usize {
        self.role_indices(PortRole::Source).len()
    }
}

/// Steady-state amplitudes at one drive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub frequency: f64,
    /// Amplitude of every active post, in [`ResponseSystem::post_ids`] order.
    pub amplitudes: Vec<c64>,
    /// `(label, Y)` for every sink port.
    pub outputs: Vec<(String, c64)>,
    pub input_power: f64,
}

/// Solves `(i(Ω − ωI) + Γ/2) a = i√κ_p X` and reads `Y = √κ_p a` at the
/// sinks. `Γ` holds the intrinsic loss on every post plus `κ_p` on port posts.
pub fn driven_response(sys: &ResponseSystem, d: &DriveSpec) -> Result<Response, PcaError> {
    d.validate()?;
    let sources = sys.role_indices(PortRole::Source);
    if d.inputs.len() != sources.len() {
        return Err(PcaError::Drive(format!("{} inputs for {} source ports", d.inputs.len(), sources.len())));
    }
    let input_power = d.inputs.iter().map(|x| x.norm_sqr()).sum();
    let sqrt_kp = d.port_coupling.sqrt();
    let n = sys.len();
    let sink_labels = sys.role_indices(PortRole::Sink).into_iter().map(|i| (i, sys.ports[i].label.clone()));
    if n == 0 {
        return Ok(Response {
            frequency: d.frequency,
            amplitudes: Vec::new(),
            outputs: sink_labels.map(|(_, l)| (l, c64::new(0.0, 0.0))).collect(),
            input_power,
        });
    }
    let mut gamma = vec![d.intrinsic_loss; n];
    for slot in sys.port_slots.iter().flatten() {
        gamma[*slot] += d.port_coupling;
    }
    let m = Mat::from_fn(n, n, |i, j| {
        let mut v = c64::new(0.0, sys.omega[(i, j)]);
        if i == j {
            v += c64::new(0.5 * gamma[i], -d.frequency);
        }
        v
    });
    let mut rhs = Mat::<c64>::zeros(n, 1);
    for (x, &p) in d.inputs.iter().zip(&sources) {
        if let Some(slot) = sys.port_slots[p] {
            rhs[(slot, 0)] += c64::new(0.0, sqrt_kp) * x;
        }
    }
    let a = m.partial_piv_lu().solve(&rhs);
    let amplitudes: Vec<c64> = (0..n).map(|i| a[(i, 0)]).collect();
    if amplitudes.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return Err(PcaError::Drive("response matrix is singular".into()));
    }
    let outputs = sink_labels
        .map(|(i, l)| (l, sys.port_slots[i].map_or(c64::new(0.0, 0.0), |s| amplitudes[s] * sqrt_kp)))
        .collect();
    Ok(Response { frequency: d.frequency, amplitudes, outputs, input_power })
}

/// Frequency band in Hz, `count` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo_hz: f64,
    pub hi_hz: f64,
    pub count: usize,
}

impl Band {
    pub fn new(lo_hz: f64, hi_hz: f64, count: usize) -> Result<Self, PcaError> {
        if !(lo_hz > 0.0 && hi_hz > lo_hz && hi_hz.is_finite()) {
            return Err(PcaError::Band(format!("need 0 < lo < hi, got {lo_hz}..{hi_hz}")));
        }
        if count < 2 {
            return Err(PcaError::Band("at least 2 points".into()));
        }
        Ok(Self { lo_hz, hi_hz, count })
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.lo_hz + (self.hi_hz - self.lo_hz) * i as f64 / (self.count - 1) as f64).collect()
    }
}

impl FromStr for Band {
    type Err = PcaError;

    /// `lo:hi:count`, e.g. `2e9:4e9:201`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || PcaError::Band(format!("expected lo:hi:count, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        Band::new(lo, hi, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub sink: usize,
    pub f_hz: f64,
    pub height: f64,
    /// Full width at half maximum, absent when a half-height crossing
    /// falls outside the band.
    pub width_hz: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinkSeries {
    pub label: String,
    /// `|Y|² / Σ|X|²` at every band frequency.
    pub s21_sq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub frequencies_hz: Vec<f64>,
    pub sinks: Vec<SinkSeries>,
    pub peaks: Vec<Peak>,
}

pub fn transmission_spectrum(
    sys: &ResponseSystem,
    band: &Band,
    drive: &super::DriveSettings,
) -> Result<Spectrum, PcaError> {
    let sinks = sys.role_indices(PortRole::Sink);
    if sys.source_count() == 0 || sinks.is_empty() {
        return Err(PcaError::Port("transmission needs at least one source and one sink".into()));
    }
    let frequencies_hz = band.frequencies_hz();
    let mut series: Vec<SinkSeries> = sinks
        .iter()
        .map(|&i| SinkSeries { label: sys.ports[i].label.clone(), s21_sq: Vec::with_capacity(band.count) })
        .collect();
    for &f in &frequencies_hz {
        let r = driven_response(sys, &drive.at(2.0 * PI * f, sys.source_count())?)?;
        for (s, (_, y)) in series.iter_mut().zip(&r.outputs) {
            s.s21_sq.push(y.norm_sqr() / r.input_power.max(f64::MIN_POSITIVE));
        }
    }
    let peaks = series.iter().enumerate().flat_map(|(k, s)| find_peaks(k, &frequencies_hz, &s.s21_sq)).collect();
    Ok(Spectrum { frequencies_hz, sinks: series, peaks })
}

fn half_crossing(f: &[f64], y: &[f64], from: usize, step: isize, half: f64) -> Option<f64> {
    let mut i = from as isize;
    loop {
        let j = i + step;
        if j < 0 || j as usize >= y.len() {
            return None;
        }
        let (a, b) = (i as usize, j as usize);
        if y[b] <= half {
            let t = (y[a] - half) / (y[a] - y[b]);
            return Some(f[a] + t * (f[b] - f[a]));
        }
        i = j;
    }
}

/// Interior local maxima of a sampled curve, refined by the parabola
/// through the maximum and its neighbours.
pub fn find_peaks(sink: usize, f: &[f64], y: &[f64]) -> Vec<Peak> {
    let mut out = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) || y[i] <= 0.0 {
            continue;
        }
        let denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
        let (shift, height) = if denom < 0.0 {
            let s = 0.5 * (y[i - 1] - y[i + 1]) / denom;
            (s, y[i] - 0.25 * (y[i - 1] - y[i + 1]) * s)
        } else {
            (0.0, y[i])
        };
        let df = f[i + 1] - f[i];
        let half = 0.5 * height;
        let width_hz = match (half_crossing(f, y, i, -1, half), half_crossing(f, y, i, 1, half)) {
            (Some(lo), Some(hi)) => Some(hi - lo),
            _ => None,
        };
        out.push(Peak { sink, f_hz: f[i] + shift * df, height, width_hz });
    }
    out
}

/// `f_hz,s21_sq_<sink>...` with one row per band frequency.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["f_hz".to_string()];
    header.extend(s.sinks.iter().map(|k| format!("s21_sq_{}", k.label)));
    w.write_record(&header).expect("in-memory write");
    for (i, f) in s.frequencies_hz.iter().enumerate() {
        let mut row = vec![f.to_string()];
        row.extend(s.sinks.iter().map(|k| k.s21_sq[i].to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
}

/// Field of a grid at one frequency: `|a|²` and `[re, im]` per cell, zero on
/// screens.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldMap {
    pub rows: usize,
    pub cols: usize,
    pub frequency_hz: f64,
    pub intensity: Vec<Vec<f64>>,
    pub amplitude: Vec<Vec<[f64; 2]>>,
}

pub fn field_map(grid: &PcaGrid, sys: &ResponseSystem, r: &Response) -> FieldMap {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut intensity = vec![vec![0.0; cols]; rows];
    let mut amplitude = vec![vec![[0.0, 0.0]; cols]; rows];
    for (id, a) in sys.post_ids.iter().zip(&r.amplitudes) {
        let (row, col) = (*id as usize / cols, *id as usize % cols);
        intensity[row][col] = a.norm_sqr();
        amplitude[row][col] = [a.re, a.im];
    }
    FieldMap { rows, cols, frequency_hz: r.frequency / (2.0 * PI), intensity, amplitude }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::tests::grid;
    use crate::pca::{DriveSettings, GridPort, PortSide};

    fn through(bits: Vec<Vec<u8>>, row: usize) -> PcaGrid {
        grid(
            bits,
            vec![
                GridPort { side: PortSide::Left, row, role: PortRole::Source },
                GridPort { side: PortSide::Right, row, role: PortRole::Sink },
            ],
        )
    }

    #[test]
    fn single_post_is_a_lorentzian() {
        let g = through(vec![vec![1]], 0);
        let sys = ResponseSystem::from_grid(&g).unwrap();
        let w0 = sys.omega[(0, 0)];
        let s = DriveSettings::default();
        let total = s.intrinsic_loss + 2.0 * s.port_coupling;
        let power = |dw: f64| {
            let r = driven_response(&sys, &s.at(w0 + dw, 1).unwrap()).unwrap();
            r.amplitudes[0].norm_sqr()
        };
        let peak = power(0.0);
        let ratio = power(total / 2.0) / peak;
        assert!((ratio - 0.5).abs() < 1e-9, "{ratio}");
        assert!(power(total / 50.0) < peak);
    }

    #[test]
    fn empty_grid_transmits_nothing() {
        let g = through(vec![vec![0; 3]; 2], 0);
        let sys = ResponseSystem::from_grid(&g).unwrap();
        let s = transmission_spectrum(&sys, &Band::new(2e9, 4e9, 5).unwrap(), &DriveSettings::default()).unwrap();
        assert!(s.sinks[0].s21_sq.iter().all(|&v| v == 0.0));
        assert!(s.peaks.is_empty());
    }

    #[test]
    fn band_parsing() {
        let b: Band = "2e9:4e9:201".parse().unwrap();
        assert_eq!(b.frequencies_hz().len(), 201);
        assert_eq!(b.frequencies_hz()[100], 3e9);
        assert!("2e9:4e9".parse::<Band>().is_err());
        assert!("4e9:2e9:10".parse::<Band>().is_err());
        assert!("2e9:4e9:1".parse::<Band>().is_err());
    }

    #[test]
    fn peak_refinement_and_width() {
        let f: Vec<f64> = (0..401).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = f.iter().map(|x| 1.0 / (1.0 + ((x - 2.003) / 0.1).powi(2))).collect();
        let p = find_peaks(0, &f, &y);
        assert_eq!(p.len(), 1);
        assert!((p[0].f_hz - 2.003).abs() < 1e-3);
        assert!((p[0].width_hz.unwrap() - 0.2).abs() < 2e-3);
    }
}
