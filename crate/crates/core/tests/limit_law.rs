//! The simulated limit variable against exact distributions and a
//! brute-force upper-hull oracle.

use frontier_cone::inference::ks_against;
use frontier_cone::limit::{sample_region, simulate_replicates, z_n, RegionKind, RegionPoint, RegionSpec};
use frontier_cone::rng::SeedStream;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Upper hull height at 0 for one-dimensional `v`: best chord over pairs
/// straddling the origin.
fn upper_hull_at_zero(points: &[RegionPoint]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for a in points {
        for b in points {
            let (va, vb) = (a.v2[0], b.v2[0]);
            let h = if va == 0.0 {
                a.w
            } else if va < 0.0 && vb > 0.0 {
                a.w + (b.w - a.w) * (-va) / (vb - va)
            } else {
                continue;
            };
            best = Some(best.map_or(h, |x: f64| x.max(h)));
        }
    }
    best
}

#[test]
fn one_dimensional_rectangle_is_a_scaled_minimum_of_uniforms() {
    // −Z = t·min U_i with t = n/θ, so P(−Z ≤ z) = 1 − (1 − zθ/n)^n
    let (theta, n) = (6.0, 50);
    let spec = RegionSpec::new(RegionKind::Rectangle, 1, theta, n).unwrap();
    let reps = simulate_replicates(&spec, 4000, SeedStream::new(1), 0).unwrap();
    let cdf = |z: f64| 1.0 - (1.0 - (z * theta / n as f64).clamp(0.0, 1.0)).powi(n as i32);
    let neg: Vec<f64> = reps.values.iter().map(|v| -v).collect();
    let ks = ks_against(&neg, cdf).unwrap();
    assert!(ks < 0.03, "KS {ks}");
}

#[test]
fn lp_height_matches_chord_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for kind in [RegionKind::Paraboloid, RegionKind::Rectangle] {
        let spec = RegionSpec::new(kind, 2, 3.0, 40).unwrap();
        for _ in 0..50 {
            let pts = sample_region(&spec, 40, &mut rng);
            match (z_n(&pts, &[0.0]), upper_hull_at_zero(&pts)) {
                (Ok(z), Some(o)) => assert!((z - o).abs() < 1e-9 * (1.0 + o.abs()), "{z} vs {o}"),
                (Err(_), None) => {}
                (a, b) => panic!("coverage disagreement: {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn sampler_fills_the_stated_region() {
    let spec = RegionSpec::new(RegionKind::Paraboloid, 3, 2.0, 100).unwrap();
    assert!((spec.volume() - 50.0).abs() < 1e-9);
    let (h, t) = (spec.half_side(), spec.thickness());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts = sample_region(&spec, 20000, &mut rng);
    let mut band = 0.0;
    for p in &pts {
        let top = -p.v2.iter().map(|v| v * v).sum::<f64>();
        assert!(p.v2.iter().all(|v| v.abs() <= h));
        assert!(p.w <= top && p.w >= top - t);
        band += (top - p.w) / t;
    }
    // the band offset is uniform on [0, 1]
    assert!((band / pts.len() as f64 - 0.5).abs() < 0.01);
}

#[test]
fn replicates_depend_only_on_the_seed() {
    let spec = RegionSpec::new(RegionKind::Paraboloid, 3, 4.0, 150).unwrap();
    let a = simulate_replicates(&spec, 64, SeedStream::new(9), 1).unwrap();
    let b = simulate_replicates(&spec, 64, SeedStream::new(9), 4).unwrap();
    let c = simulate_replicates(&spec, 64, SeedStream::new(10), 1).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
    // a longer run extends the shorter one
    let longer = simulate_replicates(&spec, 80, SeedStream::new(9), 2).unwrap();
    assert_eq!(&longer.values[..64], &a.values[..]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn replicates_are_non_positive(dim in 1usize..=4, scale in 0.5f64..20.0, n in 20usize..200, seed in 0u64..1000) {
        for kind in [RegionKind::Paraboloid, RegionKind::Rectangle] {
            let spec = RegionSpec::new(kind, dim, scale, n).unwrap();
            let reps = simulate_replicates(&spec, 8, SeedStream::new(seed), 1).unwrap();
            prop_assert!(reps.values.iter().all(|&v| v <= 0.0));
        }
    }

    #[test]
    fn removing_points_never_raises_the_height(seed in 0u64..1000, keep in 0.5f64..0.95) {
        let spec = RegionSpec::new(RegionKind::Paraboloid, 3, 2.0, 60).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = sample_region(&spec, 60, &mut rng);
        let full = z_n(&pts, &[0.0, 0.0]);
        let cut = (keep * pts.len() as f64) as usize;
        if let (Ok(full), Ok(part)) = (full, z_n(&pts[..cut], &[0.0, 0.0])) {
            prop_assert!(part <= full + 1e-9);
        }
    }
}

#[test]
fn disjoint_seed_streams_agree_in_distribution() {
    let spec = RegionSpec::new(RegionKind::Paraboloid, 3, 2.0, 100).unwrap();
    let root = SeedStream::new(21);
    let a = simulate_replicates(&spec, 2000, root.child("left", 0), 0).unwrap();
    let b = simulate_replicates(&spec, 2000, root.child("right", 0), 0).unwrap();
    let ks = frontier_cone::inference::ecdf_compare(&a.values, &b.values).unwrap().ks_distance;
    assert!(ks < 0.05, "KS {ks}");
}
