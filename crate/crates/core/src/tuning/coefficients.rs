use serde::Serialize;

use super::SweepResult;

/// Tuning slopes of one branch at every step; `None` where the branch is
/// undefined or has a single neighbouring sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchCoefficients {
    pub branch: usize,
    /// Hz per unit of the sweep parameter.
    pub df_dt: Vec<Option<f64>>,
    /// Logarithmic sensitivity to the gap of the first moving target.
    pub dlogf_dloggap: Vec<Option<f64>>,
}

/// Central differences in the interior, one-sided at the ends of each
/// branch's defined range.
fn derivative(x: &[f64], y: &[Option<f64>]) -> Vec<Option<f64>> {
    let n = y.len();
    (0..n)
        .map(|s| {
            y[s]?;
            let prev = (s > 0).then(|| y[s - 1]).flatten().map(|v| (x[s - 1], v));
            let next = (s + 1 < n).then(|| y[s + 1]).flatten().map(|v| (x[s + 1], v));
            let ((x0, y0), (x1, y1)) = match (prev, next) {
                (Some(p), Some(q)) => (p, q),
                (Some(p), None) => (p, (x[s], y[s]?)),
                (None, Some(q)) => ((x[s], y[s]?), q),
                (None, None) => return None,
            };
            if x1 == x0 {
                Some(0.0)
            } else {
                Some((y1 - y0) / (x1 - x0))
            }
        })
        .collect()
}

pub fn tuning_coefficients(r: &SweepResult) -> Vec<BranchCoefficients> {
    let log_gap: Option<Vec<f64>> = r.reference_target.map(|k| r.gaps.iter().map(|g| g[k].ln()).collect());
    r.branches
        .iter()
        .enumerate()
        .map(|(b, f)| {
            let df_dt = derivative(&r.t, f);
            let dlogf_dloggap = match &log_gap {
                Some(lg) => {
                    // samples at a closed gap have no logarithm
                    let lf: Vec<Option<f64>> = f
                        .iter()
                        .zip(lg)
                        .map(|(v, g)| v.filter(|_| g.is_finite()).map(f64::ln))
                        .collect();
                    derivative(lg, &lf)
                }
                None => f.iter().map(|v| v.map(|_| 0.0)).collect(),
            };
            BranchCoefficients { branch: b, df_dt, dlogf_dloggap }
        })
        .collect()
}
