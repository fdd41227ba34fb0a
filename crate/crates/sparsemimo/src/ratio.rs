//! Sum rate versus antenna/user ratio under iid Rayleigh fading.

use rayon::prelude::*;
use sparsemimo_core::channel::{channel_iid_rayleigh, db_to_linear};
use sparsemimo_core::mimo::{interference_free_bound, mean_sum_rate};
use sparsemimo_core::rng::{stream_rng, Stream};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioRow {
    pub ratio: usize,
    pub users: usize,
    pub antennas: usize,
    pub rzf: f64,
    pub bound: f64,
}

impl RatioRow {
    /// `(bound − rzf) / bound`.
    pub fn relative_gap(&self) -> f64 {
        (self.bound - self.rzf) / self.bound
    }
}

/// One row per `(ratio, K)`, ratios outermost. Row `r`, drop `i` draws from
/// `stream_rng(seed, RatioSweep, r << 32 | i)`.
pub fn ratio_sweep(ratios: &[usize], users: &[usize], snr_db: f64, drops: usize, seed: u64) -> Result<Vec<RatioRow>> {
    if ratios.contains(&0) || users.contains(&0) {
        return Err(Error::Config("ratios and user counts must be at least 1".into()));
    }
    if drops == 0 || drops as u64 > u32::MAX as u64 {
        return Err(Error::Config("drops must be in 1..2^32".into()));
    }
    let rho = db_to_linear(snr_db);
    let grid: Vec<(usize, usize)> = ratios
        .iter()
        .flat_map(|&r| users.iter().map(move |&k| (r, k)))
        .collect();
    Ok(grid
        .par_iter()
        .enumerate()
        .map(|(row, &(ratio, k))| {
            let m = ratio * k;
            let snrs = vec![rho; k];
            let per_drop: Vec<(f64, f64)> = (0..drops as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream_rng(seed, Stream::RatioSweep, (row as u64) << 32 | i);
                    let ch = channel_iid_rayleigh(m, &snrs, &mut rng);
                    (mean_sum_rate(&ch), interference_free_bound(&ch))
                })
                .collect();
            let n = drops as f64;
            RatioRow {
                ratio,
                users: k,
                antennas: m,
                rzf: per_drop.iter().map(|p| p.0).sum::<f64>() / n,
                bound: per_drop.iter().map(|p| p.1).sum::<f64>() / n,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_and_errors() {
        let rows = ratio_sweep(&[4], &[3], 10.0, 20, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].antennas, 12);
        assert!(rows[0].rzf <= rows[0].bound);
        assert!(ratio_sweep(&[0], &[3], 10.0, 20, 1).is_err());
        assert!(ratio_sweep(&[1], &[3], 10.0, 0, 1).is_err());
    }
}
