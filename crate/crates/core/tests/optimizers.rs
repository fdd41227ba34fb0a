use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsemimo_core::channel::{ChannelModel, ChannelSpec, DropChannel, DropLayout, UserDrop};
use sparsemimo_core::geometry::{make_ula, validate, ApertureBox};
use sparsemimo_core::mimo::{interference_free_bound, mean_sum_rate};
use sparsemimo_core::optim::{
    greedy_thin, optimize_ma, optimize_pia, pso_optimize, MovableRegions, Objective, PsoParams, SumRateObjective,
};
use sparsemimo_core::rng::Stream;
use sparsemimo_core::wavefield::Direction;
use sparsemimo_core::{ArrayGeometry, Position};

fn los_spec(users: usize) -> ChannelSpec {
    ChannelSpec {
        layout: DropLayout::Linear {
            users,
            angle_lo: -PI / 4.0,
            angle_hi: PI / 4.0,
            snr_db: 10.0,
        },
        model: ChannelModel::Los,
    }
}

fn subset(dense: &ArrayGeometry, keep: &[usize]) -> ArrayGeometry {
    ArrayGeometry::new(keep.iter().map(|&i| dense.positions()[i]).collect(), dense.element_gain()).unwrap()
}

/// Best objective over all ways of keeping `target` of the dense antennas.
fn exhaustive_best(dense: &ArrayGeometry, target: usize, obj: &SumRateObjective) -> (f64, Vec<usize>) {
    let n = dense.len();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != target {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let v = obj.evaluate(&subset(dense, &keep)).unwrap();
        if v > best.0 {
            best = (v, keep);
        }
    }
    best
}

/// Exhaustive best single deletion from `kept`; ties go to the lowest index.
fn best_single_deletion(dense: &ArrayGeometry, kept: &[usize], obj: &SumRateObjective) -> (usize, f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for &i in kept {
        let rest: Vec<usize> = kept.iter().copied().filter(|&j| j != i).collect();
        let v = obj.evaluate(&subset(dense, &rest)).unwrap();
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

#[test]
fn thinning_matches_exhaustive_search() {
    for (case, n) in (3..=12).enumerate() {
        let dense = make_ula(n, 0.5).unwrap();
        let obj = SumRateObjective::from_spec(&los_spec(3), 40 + case as u64, Stream::ThinningDrops, 20).unwrap();
        for target in [n - 1, n - 2] {
            let out = greedy_thin(&dense, target, &obj, false).unwrap();
            let mut kept: Vec<usize> = (0..n).collect();
            for step in &out.trace {
                let (removed, value) = best_single_deletion(&dense, &kept, &obj);
                assert_eq!(step.removed, removed);
                assert_eq!(step.objective, value);
                kept.retain(|&i| i != removed);
            }
            assert_eq!(out.kept, kept);
            let (global, _) = exhaustive_best(&dense, target, &obj);
            let got = obj.evaluate(&out.geometry).unwrap();
            assert!(got <= global * (1.0 + 1e-12));
            if target == n - 1 {
                assert!((got - global).abs() <= 1e-9 * global, "n={n}: greedy {got} exhaustive {global}");
            }
            assert!(validate(&out.geometry, &ApertureBox::linear(0.5 * (n - 1) as f64)).is_empty());
        }
    }
}

#[test]
fn two_greedy_deletions_can_miss_the_best_pair() {
    let dense = make_ula(6, 0.5).unwrap();
    let obj = SumRateObjective::from_spec(&los_spec(5), 6, Stream::ThinningDrops, 10).unwrap();
    let out = greedy_thin(&dense, 4, &obj, false).unwrap();
    let (global, _) = exhaustive_best(&dense, 4, &obj);
    assert!(out.trace[1].objective < global - 1e-3);
}

#[test]
fn single_deletion_is_best_of_all() {
    let dense = make_ula(9, 0.5).unwrap();
    let obj = SumRateObjective::from_spec(&los_spec(4), 3, Stream::ThinningDrops, 30).unwrap();
    let out = greedy_thin(&dense, 8, &obj, false).unwrap();
    let scores: Vec<f64> = (0..9)
        .map(|drop_i| {
            let keep: Vec<usize> = (0..9).filter(|&i| i != drop_i).collect();
            obj.evaluate(&subset(&dense, &keep)).unwrap()
        })
        .collect();
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first_best = scores.iter().position(|&s| s == best).unwrap();
    assert_eq!(out.trace[0].removed, first_best);
}

fn toy_drop() -> DropChannel {
    let drop = UserDrop::new(
        vec![Direction::azimuth(PI / 8.0), Direction::azimuth(-PI / 8.0)],
        None,
        vec![10.0; 2],
    )
    .unwrap();
    DropChannel::Los(drop)
}

#[test]
fn swarm_beats_random_search_on_two_antenna_toy() {
    let regions = MovableRegions::linear_segments(2, 2.0).unwrap();
    let obj = SumRateObjective::new(vec![toy_drop()]).unwrap();
    let out = pso_optimize(&regions, &obj, &PsoParams::default(), 1.0, None).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut best = f64::NEG_INFINITY;
    let mut tried = 0;
    while tried < 10_000 {
        let a: f64 = rng.random_range(0.0..=1.0);
        let b: f64 = rng.random_range(1.0..=2.0);
        if b - a < 0.5 {
            continue;
        }
        tried += 1;
        let g = ArrayGeometry::new(vec![Position::new(a, 0.0), Position::new(b, 0.0)], 1.0).unwrap();
        best = best.max(obj.evaluate(&g).unwrap());
    }
    assert!(out.objective >= best - 1e-9, "pso {} random {}", out.objective, best);
    assert!(out.trace.windows(2).all(|w| w[1] >= w[0]));
    assert!(regions.contains(&out.geometry));
}

#[test]
fn single_user_attains_the_bound_anywhere() {
    let drop = UserDrop::new(vec![Direction::azimuth(0.4)], None, vec![10.0]).unwrap();
    let ch = DropChannel::Los(drop);
    let regions = MovableRegions::linear_segments(1, 5.0).unwrap();
    let out = optimize_ma(&regions, &ch, &PsoParams::movable(), None, 1.0).unwrap();
    let bound = interference_free_bound(&ch.channels(&out.geometry));
    assert!((out.objective - bound).abs() < 1e-12);
    let four = MovableRegions::linear_segments(4, 20.0).unwrap();
    let out = optimize_ma(&four, &ch, &PsoParams::movable(), None, 1.0).unwrap();
    assert!((out.objective - 4f64.mul_add(10.0, 1.0).log2()).abs() < 1e-9);
}

#[test]
fn zero_iterations_return_the_warm_start() {
    let regions = MovableRegions::linear_segments(2, 2.0).unwrap();
    let warm = ArrayGeometry::new(vec![Position::new(0.0, 0.0), Position::new(2.0, 0.0)], 1.0).unwrap();
    let params = PsoParams {
        iterations: 0,
        swarm_size: 2,
        ..PsoParams::default()
    };
    let obj = SumRateObjective::new(vec![toy_drop()]).unwrap();
    // make the warm start the best particle by scoring everything else lower
    let score = sparsemimo_core::optim::FnObjective(|g: &ArrayGeometry| if *g == warm { 1.0 } else { 0.0 });
    let out = pso_optimize(&regions, &score, &params, 1.0, Some(&warm)).unwrap();
    assert_eq!(out.geometry, warm);
    let out = optimize_ma(&regions, &toy_drop(), &params, Some(&warm), 1.0).unwrap();
    assert!(out.objective >= obj.evaluate(&warm).unwrap());
}

#[test]
fn movable_never_loses_to_its_warm_start() {
    let spec = los_spec(5);
    let regions = MovableRegions::linear_segments(8, 20.0).unwrap();
    let params = PsoParams {
        iterations: 15,
        swarm_size: 20,
        ..PsoParams::default()
    };
    let pia = optimize_pia(&regions, &spec, 20, 5, &params, 1.0).unwrap();
    assert!(validate(&pia.geometry, &ApertureBox::linear(20.0)).is_empty());
    assert!(regions.contains(&pia.geometry));
    let again = optimize_pia(&regions, &spec, 20, 5, &params, 1.0).unwrap();
    assert_eq!(pia, again);
    for i in 0..10 {
        let (_, ch) = spec.realize(9, Stream::TestDrops, i).unwrap();
        let ma = optimize_ma(&regions, &ch, &PsoParams { seed: i, ..params.clone() }, Some(&pia.geometry), 1.0).unwrap();
        let base = mean_sum_rate(&ch.channels(&pia.geometry));
        assert!(ma.objective >= base);
        assert!((mean_sum_rate(&ch.channels(&ma.geometry)) - ma.objective).abs() == 0.0);
        assert!(validate(&ma.geometry, &ApertureBox::linear(20.0)).is_empty());
    }
}

#[test]
fn one_training_drop_is_per_drop_optimization() {
    let spec = los_spec(3);
    let regions = MovableRegions::linear_segments(4, 10.0).unwrap();
    let params = PsoParams {
        iterations: 10,
        swarm_size: 10,
        ..PsoParams::default()
    };
    let pia = optimize_pia(&regions, &spec, 1, 2, &params, 1.0).unwrap();
    let (_, ch) = spec.realize(2, Stream::PiaDrops, 0).unwrap();
    let direct = pso_optimize(&regions, &SumRateObjective::new(vec![ch]).unwrap(), &params, 1.0, None).unwrap();
    assert_eq!(pia, direct);
}
