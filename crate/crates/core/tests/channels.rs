use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsemimo_core::channel::{
    channel_iid_rayleigh, channel_los, drop_linear, drop_sector, ChannelModel, ChannelSpec, DropLayout,
    RicianConfig, RicianRealization, SectorLayout, UserDrop,
};
use sparsemimo_core::geometry::{make_ula, make_upa};
use sparsemimo_core::linalg::{dot, norm_sqr};
use sparsemimo_core::rng::Stream;
use sparsemimo_core::wavefield::Direction;
use sparsemimo_core::{ArrayGeometry, Position};

#[test]
fn rayleigh_entry_power_matches_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let snrs = [1.0, 10.0, 100.0];
    let mut acc = [0.0; 3];
    let n = 4000;
    for _ in 0..n {
        let ch = channel_iid_rayleigh(16, &snrs, &mut rng);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += norm_sqr(ch.matrices[0].column(k)) / 16.0;
        }
    }
    for (a, s) in acc.iter().zip(snrs) {
        assert!((a / n as f64 / s - 1.0).abs() < 0.02);
    }
}

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[test]
fn rayleigh_columns_are_nearly_orthogonal() {
    // |cos|² of two iid complex Gaussian vectors in C^M is Beta(1, M−1),
    // so E|cos| = Γ(3/2)Γ(M)/Γ(M+1/2)
    let m = 64;
    let exact = (ln_gamma(1.5) + ln_gamma(m as f64) - ln_gamma(m as f64 + 0.5)).exp();
    assert!((exact - 0.111).abs() < 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut sum, mut count) = (0.0, 0);
    for _ in 0..1500 {
        let ch = channel_iid_rayleigh(m, &[10.0; 8], &mut rng);
        let h = &ch.matrices[0];
        for i in 0..8 {
            for j in i + 1..8 {
                let c = dot(h.column(i), h.column(j)).norm() / (norm_sqr(h.column(i)) * norm_sqr(h.column(j))).sqrt();
                sum += c;
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    assert!((mean - exact).abs() < 3e-3, "{mean} vs {exact}");
}

#[test]
fn linear_drop_range_and_reproducibility() {
    use std::f64::consts::FRAC_PI_4;
    let mut a = ChaCha8Rng::seed_from_u64(2);
    let mut b = ChaCha8Rng::seed_from_u64(2);
    let d = drop_linear(5, -FRAC_PI_4, FRAC_PI_4, 10.0, &mut a).unwrap();
    assert_eq!(d, drop_linear(5, -FRAC_PI_4, FRAC_PI_4, 10.0, &mut b).unwrap());
    assert!(d.directions.iter().all(|x| x.azimuth.abs() <= FRAC_PI_4));
    assert!(d.snrs.iter().all(|&s| (s - 10.0).abs() < 1e-12));
}

#[test]
fn sector_snr_window() {
    let layout = SectorLayout::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..500 {
        for s in drop_sector(10, &layout, &mut rng).unwrap().snrs {
            let db = 10.0 * s.log10();
            lo = lo.min(db);
            hi = hi.max(db);
        }
    }
    assert!(lo >= 6.9 && lo < 7.5, "{lo}");
    assert!(hi <= 22.0 && hi > 21.5, "{hi}");
}

fn sparse_upa() -> ArrayGeometry {
    make_upa(4, 4, 20.0 / 3.0, 20.0 / 3.0).unwrap().with_element_gain(4.0).unwrap()
}

#[test]
fn rician_power_and_frequency_stationarity() {
    let g = sparse_upa();
    let drop = UserDrop::new(vec![Direction::new(0.3, -0.2).unwrap()], None, vec![5.0]).unwrap();
    let cfg = RicianConfig::default();
    let subcarriers = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 10_000;
    let mut per_sc = vec![0.0; subcarriers];
    for _ in 0..n {
        let r = RicianRealization::draw(&drop, &cfg, subcarriers, 15e3 * 6.0, &mut rng).unwrap();
        let ch = r.channels(&g);
        for (s, acc) in per_sc.iter_mut().enumerate() {
            *acc += norm_sqr(ch.matrices[s].column(0));
        }
    }
    let expected = 16.0 * 4.0 * 5.0;
    let overall = per_sc.iter().sum::<f64>() / (n * subcarriers) as f64;
    assert!((overall / expected - 1.0).abs() < 0.02, "{overall}");
    for acc in per_sc {
        assert!((acc / n as f64 / expected - 1.0).abs() < 0.02);
    }
}

#[test]
fn spec_realizations_are_pure_functions_of_seed_and_index() {
    let spec = ChannelSpec {
        layout: DropLayout::Sector {
            users: 3,
            layout: SectorLayout::default(),
        },
        model: ChannelModel::Rician {
            config: RicianConfig::default(),
            subcarriers: 4,
            subcarrier_spacing: 15e3,
        },
    };
    let a = spec.realize(7, Stream::TestDrops, 12).unwrap();
    let b = spec.realize(7, Stream::TestDrops, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, spec.realize(7, Stream::TestDrops, 13).unwrap());
    assert_ne!(a, spec.realize(7, Stream::PiaDrops, 12).unwrap());
}

proptest! {
    #[test]
    fn los_norm_identity(
        points in proptest::collection::btree_set((0i32..40, 0i32..40), 1..16),
        az in proptest::collection::vec(-1.5f64..1.5, 1..6),
        snr in 0.1f64..100.0,
        gain in 1.0f64..8.0,
        scale in 1.0f64..4.0,
    ) {
        let p: Vec<Position> = points.iter().map(|&(x, y)| Position::new(x as f64 * 0.5, y as f64 * 0.5)).collect();
        let m = p.len() as f64;
        let g = ArrayGeometry::new(p, gain).unwrap();
        let dirs: Vec<Direction> = az.iter().map(|&a| Direction::new(a, -0.1).unwrap()).collect();
        let k = dirs.len();
        let drop = UserDrop::new(dirs, None, vec![snr; k]).unwrap();
        let ch = channel_los(&g, &drop);
        let scaled = channel_los(&g.with_element_gain(gain * scale).unwrap(), &drop);
        for c in 0..k {
            let n = norm_sqr(ch.matrices[0].column(c));
            prop_assert!((n - m * gain * snr).abs() <= 1e-10 * n);
            let ns = norm_sqr(scaled.matrices[0].column(c));
            prop_assert!((ns - scale * n).abs() <= 1e-10 * ns);
        }
    }
}

#[test]
fn dft_spaced_users_are_orthogonal() {
    let g = make_ula(8, 0.5).unwrap();
    let dirs = [-0.5f64, -0.25, 0.0, 0.25, 0.5].map(|u| Direction::azimuth(u.asin()));
    let drop = UserDrop::new(dirs.to_vec(), None, vec![10.0; 5]).unwrap();
    let ch = channel_los(&g, &drop);
    let h = &ch.matrices[0];
    for i in 0..5 {
        for j in i + 1..5 {
            assert!(dot(h.column(i), h.column(j)).norm() < 1e-9);
        }
    }
}
