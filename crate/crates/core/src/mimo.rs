//! Uplink multiuser MIMO: MMSE (RZF) combining, SINR and sum rate.
//!
//! Channel columns are noise-normalized (`h_k` already carries `√ρ_k`), so the
//! regularization of the RZF combiner is the identity.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::linalg::{dot, norm_sqr, CMatrix, Cholesky};

fn regularized_gram(h: &CMatrix) -> Cholesky {
    let mut a = h.gram();
    for i in 0..a.rows() {
        a[(i, i)] += 1.0;
    }
    // HᴴH + I is Hermitian with eigenvalues ≥ 1.
    Cholesky::factor(&a).expect("HᴴH + I is positive definite")
}

/// `v_k = (H Hᴴ + I)⁻¹ h_k` for every user, computed as `H (HᴴH + I)⁻¹`
/// so only a K×K system is factored.
pub fn rzf_combiners(h: &CMatrix) -> CMatrix {
    let k = h.cols();
    let chol = regularized_gram(h);
    let mut inv_cols = Vec::with_capacity(k);
    for j in 0..k {
        let mut e = alloc::vec![Complex64::new(0.0, 0.0); k];
        e[j] = Complex64::new(1.0, 0.0);
        chol.solve_in_place(&mut e);
        inv_cols.push(e);
    }
    h.mul(&CMatrix::from_columns(&inv_cols))
}

/// `SINR_k = |v_kᴴh_k|² / (Σ_{i≠k} |v_kᴴh_i|² + ‖v_k‖²)`; a zero combiner gives 0.
pub fn uplink_sinr(h: &CMatrix, v: &CMatrix) -> Vec<f64> {
    assert_eq!(h.rows(), v.rows(), "combiner and channel disagree on M");
    assert_eq!(h.cols(), v.cols(), "combiner and channel disagree on K");
    (0..h.cols())
        .map(|k| {
            let vk = v.column(k);
            let noise = norm_sqr(vk);
            if noise == 0.0 {
                return 0.0;
            }
            let mut interference = 0.0;
            let mut signal = 0.0;
            for i in 0..h.cols() {
                let p = dot(vk, h.column(i)).norm_sqr();
                if i == k {
                    signal = p;
                } else {
                    interference += p;
                }
            }
            signal / (interference + noise)
        })
        .collect()
}

/// MMSE SINRs via `1 + SINR_k = 1 / [(I + HᴴH)⁻¹]_kk`.
pub fn mmse_sinrs(h: &CMatrix) -> Vec<f64> {
    regularized_gram(h)
        .inverse_diagonal()
        .into_iter()
        .map(|d| (1.0 / d - 1.0).max(0.0))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubcarrierRate {
    pub sum_rate: f64,
    pub bound: f64,
}

/// Rates in bit/s/Hz, averaged over subcarriers.
#[derive(Clone, Debug, PartialEq)]
pub struct RateResult {
    pub per_user: Vec<f64>,
    pub sum_rate: f64,
    pub bound: f64,
    pub per_subcarrier: Vec<SubcarrierRate>,
}

fn bound_of(h: &CMatrix) -> f64 {
    (0..h.cols()).map(|k| libm::log2(1.0 + norm_sqr(h.column(k)))).sum()
}

/// MMSE sum rate `Σ_k log2(1 + SINR_k)` per subcarrier, plus the
/// interference-free bound on the same channels.
pub fn sum_rate(channels: &ChannelSet) -> RateResult {
    let s = channels.subcarriers() as f64;
    let mut per_user = alloc::vec![0.0; channels.users()];
    let per_subcarrier: Vec<SubcarrierRate> = channels
        .matrices
        .iter()
        .map(|h| {
            let mut total = 0.0;
            for (acc, sinr) in per_user.iter_mut().zip(mmse_sinrs(h)) {
                let r = libm::log2(1.0 + sinr);
                *acc += r / s;
                total += r;
            }
            SubcarrierRate {
                sum_rate: total,
                bound: bound_of(h),
            }
        })
        .collect();
    RateResult {
        sum_rate: per_subcarrier.iter().map(|r| r.sum_rate).sum::<f64>() / s,
        bound: per_subcarrier.iter().map(|r| r.bound).sum::<f64>() / s,
        per_user,
        per_subcarrier,
    }
}

/// `Σ_k log2(1 + ‖h_k‖²)` averaged over subcarriers.
pub fn interference_free_bound(channels: &ChannelSet) -> f64 {
    channels.matrices.iter().map(bound_of).sum::<f64>() / channels.subcarriers() as f64
}

/// Subcarrier-averaged MMSE sum rate without the per-user breakdown.
pub fn mean_sum_rate(channels: &ChannelSet) -> f64 {
    channels
        .matrices
        .iter()
        .map(|h| regularized_gram(h).inverse_diagonal().iter().map(|d| -libm::log2(d.min(1.0))).sum::<f64>())
        .sum::<f64>()
        / channels.subcarriers() as f64
}
