use std::collections::BTreeMap;

use super::AnalysisError;
use crate::lattice::ModeSolution;

/// Energy fraction of every mode carried by each named group of posts.
///
/// Fractions use the squared components of the inductance-normalized
/// eigenvector and sum to one per mode.
pub fn participation(
    s: &ModeSolution,
    partition: &BTreeMap<u32, String>,
) -> Result<Vec<BTreeMap<String, f64>>, AnalysisError> {
    let labels: Vec<&String> = s
        .post_ids
        .iter()
        .map(|id| partition.get(id).ok_or_else(|| AnalysisError::Partition(format!("post {id} has no group"))))
        .collect::<Result<_, _>>()?;
    Ok(s.eigenvectors
        .iter()
        .map(|v| {
            let total: f64 = v.iter().map(|x| x * x).sum();
            let mut out: BTreeMap<String, f64> = labels.iter().map(|l| ((*l).clone(), 0.0)).collect();
            for (x, l) in v.iter().zip(&labels) {
                *out.get_mut(*l).unwrap() += x * x / total;
            }
            out
        })
        .collect())
}
