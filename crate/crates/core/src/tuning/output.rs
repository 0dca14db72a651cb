use serde::Serialize;

use super::{CrossingAnnotation, Discontinuity, LimitEvent, SweepResult, TuningSpec};

/// Sweep table: `t, gap_<id>..., f_branch_<k>_hz..., overlap_min`, one row
/// per step. Ended branches leave empty cells.
pub fn sweep_csv(r: &SweepResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend(r.target_ids.iter().map(|id| format!("gap_{id}")));
    header.extend((1..=r.branch_count()).map(|k| format!("f_branch_{k}_hz")));
    header.push("overlap_min".into());
    w.write_record(&header).expect("in-memory write");
    for s in 0..r.steps() {
        let mut row = vec![r.t[s].to_string()];
        row.extend(r.gaps[s].iter().map(f64::to_string));
        row.extend(r.branches.iter().map(|b| b[s].map(|f| f.to_string()).unwrap_or_default()));
        row.push(r.overlap_min[s].to_string());
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
}

/// JSON annotations written next to the sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSidecar {
    pub spec: TuningSpec,
    pub crossings: Vec<CrossingAnnotation>,
    pub limits: Vec<LimitEvent>,
    pub discontinuities: Vec<Discontinuity>,
}

impl SweepSidecar {
    pub fn new(spec: &TuningSpec, r: &SweepResult, crossings: Vec<CrossingAnnotation>) -> Self {
        Self {
            spec: spec.clone(),
            crossings,
            limits: r.limits.clone(),
            discontinuities: r.discontinuities.clone(),
        }
    }
}
