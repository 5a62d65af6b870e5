use std::f64::consts::TAU;

use proptest::prelude::*;
use ranch_core::geom::{orient, Orientation, Point2};
use ranch_core::oracle;
use ranch_core::par;
use ranch_core::rancher::{self, Rancher};
use ranch_core::rng::RandomStream;
use ranch_core::stats::{self, SampleRecord};

fn walk(seed: u64, steps: u64) -> Rancher {
    let mut s = RandomStream::new(seed);
    let mut r = Rancher::with_path();
    for _ in 0..steps {
        r.step(&mut s).unwrap();
    }
    r
}

#[test]
fn every_step_is_legal_on_200_walks() {
    let illegal: usize = par::map_indexed(200, |w| {
        let mut s = RandomStream::derive(100, w as u64);
        let mut r = Rancher::new();
        (0..1000)
            .filter(|_| {
                let before = r.hull().clone();
                let info = r.step(&mut s).unwrap();
                oracle::segment_hits_interior(&before, info.from, info.to)
            })
            .count()
    })
    .into_iter()
    .sum();
    assert_eq!(illegal, 0);
}

#[test]
fn incremental_hull_matches_scratch_hull() {
    for seed in 0..5 {
        let mut s = RandomStream::new(seed);
        let mut r = Rancher::with_path();
        for _ in 0..2000 {
            r.step(&mut s).unwrap();
            if r.n().is_multiple_of(7) || r.n() < 20 {
                let scratch = oracle::hull_of(r.path().unwrap()).unwrap();
                assert!(
                    oracle::same_vertex_set(r.hull(), &scratch, 1e-9),
                    "seed {seed} n {}",
                    r.n()
                );
            }
        }
    }
}

#[test]
fn hull_only_grows_and_holds_the_path() {
    let mut s = RandomStream::new(42);
    let mut r = Rancher::with_path();
    for _ in 0..3000 {
        let prev = r.hull().clone();
        r.step(&mut s).unwrap();
        assert!(prev.vertices().all(|v| r.hull().contains(v)));
    }
    assert!(r.path().unwrap().iter().all(|&p| r.hull().contains(p)));
    let (ins, rem) = r.hull().churn();
    assert!(rem <= ins);
}

#[test]
fn arc_directions_are_legal_and_cone_directions_are_not() {
    // 1000 states taken from 100 walks at assorted times
    let mut probe = RandomStream::new(7);
    let mut legal_fail = 0;
    let mut cone_pass = 0;
    for w in 0..100u64 {
        let mut s = RandomStream::derive(200, w);
        let mut r = Rancher::new();
        for _ in 0..10 {
            let extra = 1 + (probe.unit() * 200.0) as u64;
            for _ in 0..extra {
                r.step(&mut s).unwrap();
            }
            let arc = r.allowed_arc();
            let x = r.position();
            let t = arc.start + probe.unit() * arc.measure;
            if oracle::segment_hits_interior(r.hull(), x, x + Point2::from_angle(t)) {
                legal_fail += 1;
            }
            if r.hull().is_degenerate() {
                continue;
            }
            let excluded = TAU - arc.measure;
            let t = arc.start + arc.measure + excluded * (1e-3 + (1.0 - 2e-3) * probe.unit());
            if !oracle::segment_hits_interior(r.hull(), x, x + Point2::from_angle(t)) {
                cone_pass += 1;
            }
        }
    }
    assert_eq!(legal_fail, 0);
    assert_eq!(cone_pass, 0);
}

#[test]
fn step_angles_are_uniform_on_the_arc() {
    let base = walk(3, 500);
    let arc = base.allowed_arc();
    let mut s = RandomStream::new(99);
    let mut u: Vec<f64> = (0..10_000)
        .map(|_| {
            let mut r = base.clone();
            let info = r.step(&mut s).unwrap();
            (info.theta - arc.start).rem_euclid(TAU) / arc.measure
        })
        .collect();
    u.sort_by(f64::total_cmp);
    let k = u.len() as f64;
    let d = u
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / k).abs().max(((i + 1) as f64 / k - v).abs()))
        .fold(0.0, f64::max);
    // Kolmogorov critical value at significance 1e-3
    assert!(d < 1.9495 / k.sqrt(), "D = {d}");
}

#[test]
fn unit_steps() {
    let mut s = RandomStream::new(5);
    let mut r = Rancher::new();
    for _ in 0..20_000 {
        let info = r.step(&mut s).unwrap();
        assert!((info.from.dist(info.to) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn pooled_distance_gain_is_nonnegative() {
    let sums = par::map_indexed(10, |w| {
        let mut s = RandomStream::derive(300, w as u64);
        let mut r = Rancher::new();
        let mut total = 0.0;
        for _ in 0..100_000 {
            let info = r.step(&mut s).unwrap();
            total += info.to.norm() - info.from.norm();
        }
        total
    });
    let mean = sums.iter().sum::<f64>() / 1e6;
    assert!(mean > -1e-3, "pooled mean {mean}");
}

#[test]
fn speed_does_not_decay_when_doubling_steps() {
    let short = stats::speed_experiment(&stats::Model::Rancher, 50, 50_000, 11).unwrap();
    let long = stats::speed_experiment(&stats::Model::Rancher, 50, 100_000, 12).unwrap();
    assert!(
        long.mean >= short.mean - 0.02,
        "{} vs {}",
        short.mean,
        long.mean
    );
}

#[test]
fn direction_settles() {
    let cps = stats::geometric_checkpoints(100_000, 25);
    let settled = par::map_indexed(50, |w| {
        let recs = rancher::run(
            100_000,
            &mut RandomStream::derive(400, w as u64),
            &cps,
            false,
        )
        .unwrap();
        let samples: Vec<SampleRecord> = recs.iter().map(SampleRecord::from).collect();
        let series = stats::direction_series(&samples);
        let range = |lo: u64, hi: u64| {
            let window = series
                .iter()
                .filter(|(n, _)| (lo..=hi).contains(n))
                .map(|p| p.1);
            let max = window.clone().fold(f64::NEG_INFINITY, f64::max);
            let min = window.fold(f64::INFINITY, f64::min);
            max - min
        };
        range(10_000, 100_000) < range(100, 1000)
    });
    let frac = settled.iter().filter(|&&b| b).count() as f64 / 50.0;
    assert!(frac >= 0.8, "settled fraction {frac}");
}

#[test]
fn checkpoint_records_are_consistent() {
    let cps = stats::geometric_checkpoints(10_000, 25);
    let recs = rancher::run(10_000, &mut RandomStream::new(8), &cps, true).unwrap();
    assert_eq!(recs.len(), cps.len());
    assert!(recs.windows(2).all(|w| w[0].n < w[1].n));
    for r in &recs {
        assert!((r.position.norm() - r.norm).abs() < 1e-12);
        assert!(r.width.is_none_or(|w| w >= 0.0));
        if let (Some(a), Some(b)) = (r.alpha, r.alpha_prime) {
            assert!(a >= -1e-12 && b >= -1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_stays_strictly_convex(seed in any::<u64>(), steps in 1u64..400) {
        let r = walk(seed, steps);
        let h = r.hull().to_vec();
        let k = h.len();
        if k >= 3 {
            for i in 0..k {
                prop_assert_eq!(orient(h[i], h[(i + 1) % k], h[(i + 2) % k]), Orientation::Left);
            }
        }
        prop_assert!(r.path().unwrap().iter().all(|&p| r.hull().contains(p)));
    }

    #[test]
    fn reruns_are_identical(seed in any::<u64>(), steps in 0u64..300) {
        let a = walk(seed, steps);
        let b = walk(seed, steps);
        prop_assert_eq!(a.path(), b.path());
    }
}
