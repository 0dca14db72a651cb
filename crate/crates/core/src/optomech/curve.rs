use serde::{Deserialize, Serialize};

use super::liouvillian::{Liouvillian, DEFAULT_DIMENSION_CAP};
use super::steady::{steady_state, SolverReport};
use super::{linearize, DissipationSpec, LinearizedParams, OptomechError, OptomechParams, TruncationSpec};

/// Largest relative change of `n_b` accepted when every cutoff grows by one.
pub const CONVERGENCE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupation {
    pub n_b: f64,
    /// Occupation with every cutoff incremented by one.
    pub n_b_incremented: f64,
    pub rel_change: f64,
    pub truncation: TruncationSpec,
    #[serde(skip)]
    pub report: SolverReport,
}

fn solve_occupation(lp: &LinearizedParams, d: &DissipationSpec, t: &TruncationSpec, cap: usize) -> Result<(f64, SolverReport), OptomechError> {
    let l = Liouvillian::with_cap(lp, d, t, cap)?;
    let (rho, report) = steady_state(&l)?;
    Ok((rho.phonon_number(&l), report))
}

/// Steady-state `⟨b†b⟩`, checked against a solve with every cutoff + 1.
pub fn steady_occupation(
    lp: &LinearizedParams,
    _p: &OptomechParams,
    d: &DissipationSpec,
    t: &TruncationSpec,
) -> Result<Occupation, OptomechError> {
    let (n_b, report) = solve_occupation(lp, d, t, DEFAULT_DIMENSION_CAP)?;
    // the cap guards the requested truncation; the check may exceed it
    let bigger = t.incremented();
    let (n_b_incremented, _) = solve_occupation(lp, d, &bigger, bigger.dimension().max(DEFAULT_DIMENSION_CAP))?;
    let rel_change = (n_b_incremented - n_b).abs() / n_b.abs().max(f64::MIN_POSITIVE);
    if !(rel_change < CONVERGENCE_TOL) {
        return Err(OptomechError::NotConverged { n_b, n_b_plus: n_b_incremented, rel_change, cutoffs: t.as_tuple() });
    }
    Ok(Occupation { n_b, n_b_incremented, rel_change, truncation: *t, report })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveAxis {
    /// `Δ = ω_c − ω_d`.
    Detuning,
    /// Single-photon coupling `g`.
    Coupling,
    /// Doublet coupling `G`.
    DoubletCoupling,
}

impl CurveAxis {
    pub fn apply(&self, p: &OptomechParams, x: f64) -> OptomechParams {
        match self {
            CurveAxis::Detuning => p.with_detuning(x),
            CurveAxis::Coupling => OptomechParams { electromechanical_coupling: x, ..*p },
            CurveAxis::DoubletCoupling => OptomechParams { doublet_coupling: x, ..*p },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveGrid {
    Linear { start: f64, end: f64, points: usize },
    Values { values: Vec<f64> },
}

impl CurveGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            CurveGrid::Linear { start, end, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (end - start) * i as f64 / (*n - 1) as f64).collect(),
            },
            CurveGrid::Values { values } => values.clone(),
        }
    }
}

/// Input of the `cool` verb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolingRequest {
    pub params: OptomechParams,
    #[serde(default)]
    pub dissipation: DissipationSpec,
    #[serde(default)]
    pub truncation: TruncationSpec,
    pub axis: CurveAxis,
    pub grid: CurveGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub n_b: f64,
    pub rel_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupationMinimum {
    /// Grid index of the discrete minimum.
    pub index: usize,
    /// Vertex of the parabola through the minimum and its neighbours.
    pub x: f64,
    pub n_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationCurve {
    pub axis: CurveAxis,
    pub points: Vec<CurvePoint>,
    pub minima: Vec<OccupationMinimum>,
}

fn check_grid(req: &CoolingRequest, xs: &[f64]) -> Result<(), OptomechError> {
    if xs.is_empty() {
        return Err(OptomechError::Parameter("empty grid".into()));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(OptomechError::Parameter(format!("grid value {x} is not finite")));
    }
    for &x in xs {
        let p = req.axis.apply(&req.params, x);
        let delta = p.detuning();
        if delta == 0.0 {
            return Err(OptomechError::ZeroDetuning);
        }
        if delta.abs() == p.doublet_coupling {
            return Err(OptomechError::DetuningAtDoubletCoupling(p.doublet_coupling));
        }
    }
    Ok(())
}

fn local_minima(points: &[CurvePoint]) -> Vec<OccupationMinimum> {
    let mut out = Vec::new();
    for i in 1..points.len().saturating_sub(1) {
        let (a, b, c) = (points[i - 1], points[i], points[i + 1]);
        if !(b.n_b < a.n_b && b.n_b <= c.n_b) {
            continue;
        }
        // parabola through three (possibly unevenly spaced) samples
        let d1 = (a.n_b - b.n_b) / (a.x - b.x);
        let d2 = (c.n_b - b.n_b) / (c.x - b.x);
        let curvature = (d2 - d1) / (c.x - a.x);
        let (x, n_b) = if curvature > 0.0 {
            let slope_at_b = d1 + curvature * (b.x - a.x);
            let x = (b.x - slope_at_b / (2.0 * curvature)).clamp(a.x.min(c.x), a.x.max(c.x));
            let n = b.n_b + slope_at_b * (x - b.x) + curvature * (x - b.x) * (x - b.x);
            (x, n)
        } else {
            (b.x, b.n_b)
        };
        out.push(OccupationMinimum { index: i, x, n_b });
    }
    out
}

/// Steady-state occupation along one parameter axis. Points are solved
/// concurrently when more than one core is available.
pub fn occupation_curve(req: &CoolingRequest) -> Result<OccupationCurve, OptomechError> {
    let xs = req.grid.values();
    check_grid(req, &xs)?;
    let solve = |x: f64| -> Result<CurvePoint, OptomechError> {
        let p = req.axis.apply(&req.params, x);
        let lp = linearize(&p)?;
        let o = steady_occupation(&lp, &p, &req.dissipation, &req.truncation)?;
        Ok(CurvePoint { x, n_b: o.n_b, rel_change: o.rel_change })
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(xs.len());
    let results: Vec<Result<CurvePoint, OptomechError>> = if workers <= 1 {
        xs.iter().map(|&x| solve(x)).collect()
    } else {
        let chunk = xs.len().div_ceil(workers);
        std::thread::scope(|s| {
            let handles: Vec<_> =
                xs.chunks(chunk).map(|c| s.spawn(move || c.iter().map(|&x| solve(x)).collect::<Vec<_>>())).collect();
            handles.into_iter().flat_map(|h| h.join().expect("curve worker panicked")).collect()
        })
    };
    let points = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let minima = local_minima(&points);
    Ok(OccupationCurve { axis: req.axis, points, minima })
}

/// `axis_value,n_b` table preceded by a `# {json}` line echoing the request
/// and the refined minima.
pub fn occupation_csv(req: &CoolingRequest, curve: &OccupationCurve) -> String {
    let header = serde_json::json!({ "request": req, "minima": curve.minima });
    let mut out = format!("# {header}\naxis_value,n_b\n");
    for p in &curve.points {
        out.push_str(&format!("{},{}\n", p.x, p.n_b));
    }
    out
}
