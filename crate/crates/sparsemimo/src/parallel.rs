use rayon::prelude::*;
use sparsemimo_core::optim::{Objective, SumRateObjective};
use sparsemimo_core::{ArrayGeometry, Result};

/// Mean sum rate evaluated on the rayon pool.
///
/// Per-drop rates are collected in drop order and summed sequentially, so the
/// value is bit-identical to [`SumRateObjective::evaluate`] for any thread count.
pub struct ParallelSumRate<'a>(pub &'a SumRateObjective);

impl Objective for ParallelSumRate<'_> {
    fn evaluate(&self, geometry: &ArrayGeometry) -> Result<f64> {
        let n = self.0.drops().len();
        let rates: Vec<f64> = (0..n).into_par_iter().map(|i| self.0.drop_rate(i, geometry)).collect();
        Ok(rates.iter().sum::<f64>() / n as f64)
    }

    fn evaluate_batch(&self, geometries: &[ArrayGeometry]) -> Result<Vec<f64>> {
        geometries.par_iter().map(|g| self.evaluate(g)).collect()
    }
}
