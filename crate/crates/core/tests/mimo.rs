use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use sparsemimo_core::channel::{channel_iid_rayleigh, channel_los, ChannelSet, UserDrop};
use sparsemimo_core::geometry::make_ula;
use sparsemimo_core::linalg::{dot, norm_sqr, CMatrix};
use sparsemimo_core::mimo::{interference_free_bound, mmse_sinrs, rzf_combiners, sum_rate, uplink_sinr};
use sparsemimo_core::wavefield::Direction;

fn cn<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn random_matrix<R: Rng>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cn(rng) * scale)
}

/// SINR of user `k` under combiner `v`, straight from the definition.
fn sinr(h: &CMatrix, v: &[Complex64], k: usize) -> f64 {
    let signal = dot(v, h.column(k)).norm_sqr();
    let interference: f64 = (0..h.cols()).filter(|&j| j != k).map(|j| dot(v, h.column(j)).norm_sqr()).sum();
    signal / (interference + norm_sqr(v))
}

/// Haar-ish unitary from Gram-Schmidt on a Gaussian matrix.
fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| cn(rng)).collect();
        for q in &cols {
            let p = dot(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
        let norm = norm_sqr(&v).sqrt();
        if norm > 1e-6 {
            cols.push(v.iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_columns(&cols)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mmse_beats_random_challengers(seed in any::<u64>(), m in 1usize..=4, k in 1usize..=4, snr_db in -5.0f64..25.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_matrix(m, k, 10f64.powf(snr_db / 20.0), &mut rng);
        let v = rzf_combiners(&h);
        let best = uplink_sinr(&h, &v);
        let fast = mmse_sinrs(&h);
        for u in 0..k {
            prop_assert!((best[u] - sinr(&h, v.column(u), u)).abs() <= 1e-9 * (1.0 + best[u]));
            prop_assert!((best[u] - fast[u]).abs() <= 1e-9 * (1.0 + best[u]));
            for _ in 0..1000 {
                let c: Vec<Complex64> = (0..m).map(|_| cn(&mut rng)).collect();
                prop_assert!(sinr(&h, &c, u) <= best[u] * (1.0 + 1e-9) + 1e-12);
            }
        }
    }

    #[test]
    fn rate_ignores_common_rotation(seed in any::<u64>(), m in 1usize..=8, k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_matrix(m, k, 3.0, &mut rng);
        let u = random_unitary(m, &mut rng);
        let a = sum_rate(&ChannelSet::narrowband(h.clone()));
        let b = sum_rate(&ChannelSet::narrowband(u.mul(&h)));
        prop_assert!((a.sum_rate - b.sum_rate).abs() <= 1e-9 * a.sum_rate.max(1.0));
        prop_assert!((a.bound - b.bound).abs() <= 1e-9 * a.bound.max(1.0));
    }

    #[test]
    fn appending_an_antenna_never_lowers_the_bound(seed in any::<u64>(), m in 1usize..=8, k in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_matrix(m + 1, k, 2.0, &mut rng);
        let shorter = CMatrix::from_fn(m, k, |r, c| h[(r, c)]);
        let before = interference_free_bound(&ChannelSet::narrowband(shorter));
        let after = interference_free_bound(&ChannelSet::narrowband(h));
        prop_assert!(after >= before);
    }

    #[test]
    fn bound_dominates_rate(seed in any::<u64>(), m in 1usize..=12, k in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = sum_rate(&channel_iid_rayleigh(m, &vec![10.0; k], &mut rng));
        prop_assert!(r.sum_rate <= r.bound * (1.0 + 1e-12));
    }
}

#[test]
fn orthogonal_users_attain_the_bound() {
    let g = make_ula(8, 0.5).unwrap();
    let dirs = [-0.5f64, -0.25, 0.0, 0.25, 0.5].map(|u| Direction::azimuth(u.asin()));
    let drop = UserDrop::new(dirs.to_vec(), None, vec![10.0; 5]).unwrap();
    let r = sum_rate(&channel_los(&g, &drop));
    assert!((r.sum_rate - r.bound).abs() <= 1e-9 * r.bound);
    assert!((r.bound - 5.0 * 81f64.log2()).abs() < 1e-9);
}

#[test]
fn identical_users_cannot_both_exceed_unit_sinr() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let col: Vec<Complex64> = (0..4).map(|_| cn(&mut rng) * 3.0).collect();
    let h = CMatrix::from_columns(&[col.clone(), col.clone()]);
    let other: Vec<Complex64> = (0..4).map(|_| cn(&mut rng)).collect();
    // sweep combiners v = h + t·e^{jθ}·w along gain and phase
    for ti in 0..200 {
        let t = ti as f64 * 0.05;
        for pi in 0..64 {
            let ph = Complex64::from_polar(t, pi as f64 * std::f64::consts::TAU / 64.0);
            let v: Vec<Complex64> = col.iter().zip(&other).map(|(a, b)| a + ph * b).collect();
            assert!(sinr(&h, &v, 0) < 1.0);
        }
    }
    assert!(mmse_sinrs(&h).iter().all(|&s| s < 1.0));
}

#[test]
fn square_rayleigh_leaves_a_wide_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut rate, mut bound) = (0.0, 0.0);
    for _ in 0..300 {
        let r = sum_rate(&channel_iid_rayleigh(8, &[10.0; 8], &mut rng));
        rate += r.sum_rate;
        bound += r.bound;
    }
    assert!(rate < 0.75 * bound);
}

#[test]
fn rayleigh_bound_matches_gamma_oracle() {
    // ‖h‖²/ρ ~ Gamma(M, 1)
    let (m, k, rho) = (64, 8, 10.0);
    let gamma = Gamma::new(m as f64, 1.0).unwrap();
    let mut orng = ChaCha8Rng::seed_from_u64(1234);
    let n_oracle = 200_000;
    let oracle = k as f64
        * (0..n_oracle)
            .map(|_| (1.0 + rho * gamma.sample(&mut orng)).log2())
            .sum::<f64>()
        / n_oracle as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 2000;
    let sim: f64 = (0..n)
        .map(|_| interference_free_bound(&channel_iid_rayleigh(m, &[rho; 8], &mut rng)))
        .sum::<f64>()
        / n as f64;
    assert!((sim / oracle - 1.0).abs() < 2e-3, "{sim} vs {oracle}");
}
