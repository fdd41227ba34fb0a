use alloc::vec::Vec;

use super::Objective;
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThinStep {
    /// Index of the removed antenna in the dense array.
    pub removed: usize,
    /// Objective of the array remaining after this removal.
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThinOutcome {
    pub geometry: ArrayGeometry,
    /// Dense-array indices of the surviving antennas, ascending.
    pub kept: Vec<usize>,
    pub trace: Vec<ThinStep>,
}

/// Greedy backward elimination: repeatedly drop the antenna whose removal
/// leaves the best objective, ties going to the lowest index.
///
/// With `gain_parity` every candidate gets `G = M_dense·G_dense / M` so the
/// product `M·G` stays that of the dense array.
pub fn greedy_thin<O: Objective + ?Sized>(
    dense: &ArrayGeometry,
    target: usize,
    objective: &O,
    gain_parity: bool,
) -> Result<ThinOutcome> {
    if target == 0 || target >= dense.len() {
        return Err(Error::invalid("thinning target must be in 1..M_dense"));
    }
    let gain_for = |m: usize| {
        if gain_parity {
            dense.total_gain() / m as f64
        } else {
            dense.element_gain()
        }
    };
    let mut kept: Vec<usize> = (0..dense.len()).collect();
    let mut trace = Vec::with_capacity(dense.len() - target);
    while kept.len() > target {
        let gain = gain_for(kept.len() - 1);
        let candidates = (0..kept.len())
            .map(|drop| {
                let p = kept
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, &i)| dense.positions()[i])
                    .collect();
                ArrayGeometry::new(p, gain)
            })
            .collect::<Result<Vec<_>>>()?;
        let vals = objective.evaluate_batch(&candidates)?;
        let mut best = 0;
        for (j, &val) in vals.iter().enumerate() {
            if val > vals[best] {
                best = j;
            }
        }
        trace.push(ThinStep {
            removed: kept[best],
            objective: vals[best],
        });
        kept.remove(best);
    }
    let positions = kept.iter().map(|&i| dense.positions()[i]).collect();
    Ok(ThinOutcome {
        geometry: ArrayGeometry::new(positions, gain_for(target))?,
        kept,
        trace,
    })
}
