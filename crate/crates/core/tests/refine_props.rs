mod common;

use hyperattr::dataset::{generate_synthetic, SyntheticSpec};
use hyperattr::experiment::recovery_stats;
use hyperattr::geometry::pairwise_distances_with;
use hyperattr::pipeline::{feature_graph, propagate_attributes, PropagationConfig};
use hyperattr::{
    build_graph, compute_edge_weights, embed_features, identify_and_refine, neighborhood_consistency,
    DistanceMatrix, ImageAttributeMatrix, Metric, NeighborhoodGraph, Topology,
};
use ndarray::{array, Array2, Axis};
use proptest::prelude::*;

fn random_graph(seed: u64, n: usize, topology: Topology) -> NeighborhoodGraph {
    let pts = common::random_ball_points(&mut common::rng(seed), n, 3);
    let set = hyperattr::PoincarePointSet::from_rows(pts).unwrap();
    build_graph(&pairwise_distances_with(&set, Metric::Hyperbolic).unwrap(), topology).unwrap()
}

fn scores(graph: &NeighborhoodGraph, attrs: &ImageAttributeMatrix, p: f64) -> hyperattr::Consistency {
    let w = compute_edge_weights(graph, p).unwrap();
    neighborhood_consistency(attrs, &w, graph).unwrap()
}

proptest! {
    #![proptest_config(common::cases(48))]

    #[test]
    fn weights_sum_to_one(seed in 0u64..1_000_000, n in 2usize..40, complete in any::<bool>()) {
        let topology = if complete { Topology::Complete } else { Topology::RelativeNeighborhood };
        let g = random_graph(seed, n, topology);
        for p in [0.5, 1.0, 2.0, 4.0] {
            let w = compute_edge_weights(&g, p).unwrap();
            for v in 0..n {
                let sum: f64 = w.of(v).iter().map(|&(_, x)| x).sum();
                prop_assert!((sum - 1.0).abs() <= 1e-12);
                prop_assert!(w.of(v).iter().all(|&(_, x)| x > 0.0));
            }
        }
    }

    #[test]
    fn scores_in_range_and_complement_symmetric(seed in 0u64..1_000_000, n in 2usize..40, m in 1usize..6) {
        let g = random_graph(seed, n, Topology::RelativeNeighborhood);
        let bits = common::random_binary(&mut common::rng(seed ^ 0xabc), m, n);
        let attrs = ImageAttributeMatrix::new(bits.clone()).unwrap();
        let flipped = ImageAttributeMatrix::new(bits.mapv(|b| 1 - b)).unwrap();
        let s = scores(&g, &attrs, 2.0);
        let c = scores(&g, &flipped, 2.0);
        prop_assert!(s.consistency.iter().all(|j| (0.0..=1.0).contains(j)));
        prop_assert!(s.expected.iter().all(|z| (0.0..=1.0).contains(z)));
        prop_assert_eq!(&s.consistency, &c.consistency);
        for ((z, zc), _) in s.expected.iter().zip(c.expected.iter()).zip(0..) {
            prop_assert!((z + zc - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn flips_grow_with_theta(seed in 0u64..1_000_000, n in 2usize..40) {
        let g = random_graph(seed, n, Topology::RelativeNeighborhood);
        let attrs = ImageAttributeMatrix::new(common::random_binary(&mut common::rng(seed + 1), 4, n)).unwrap();
        let s = scores(&g, &attrs, 2.0);
        let mut prev: Vec<(usize, usize)> = Vec::new();
        for k in 0..=20 {
            let (_, report) = identify_and_refine(&attrs, &s, k as f64 / 20.0).unwrap();
            prop_assert!(prev.iter().all(|c| report.flipped.contains(c)));
            prev = report.flipped;
        }
        let (refined, report) = identify_and_refine(&attrs, &s, 0.0).unwrap();
        prop_assert!(report.flipped.is_empty());
        prop_assert_eq!(refined, attrs);
    }

    #[test]
    fn attributes_refine_independently(seed in 0u64..1_000_000, n in 2usize..30) {
        let g = random_graph(seed, n, Topology::RelativeNeighborhood);
        let bits = common::random_binary(&mut common::rng(seed + 2), 5, n);
        let cfg = PropagationConfig::default();
        let attrs = ImageAttributeMatrix::new(bits.clone()).unwrap();
        let (batch, _) = hyperattr::pipeline::refine_on_graph(&g, &attrs, cfg.idw_p, cfg.theta).unwrap();
        for (a, row) in bits.axis_iter(Axis(0)).enumerate() {
            let single = ImageAttributeMatrix::new(row.to_owned().insert_axis(Axis(0))).unwrap();
            let (alone, _) = hyperattr::pipeline::refine_on_graph(&g, &single, cfg.idw_p, cfg.theta).unwrap();
            prop_assert_eq!(alone.values().row(0).to_owned(), batch.values().row(a).to_owned());
        }
    }

    #[test]
    fn sample_order_does_not_matter(seed in 0u64..1_000_000, n in 3usize..30) {
        use rand::seq::SliceRandom;
        let mut rng = common::rng(seed);
        let feats = common::random_ball_points(&mut rng, n, 3).mapv(|v| v * 10.0);
        let bits = common::random_binary(&mut rng, 3, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);

        let cfg = PropagationConfig::default();
        let out = propagate_attributes(feats.view(), &ImageAttributeMatrix::new(bits.clone()).unwrap(), &cfg).unwrap();
        let pf = feats.select(Axis(0), &perm);
        let pb = bits.select(Axis(1), &perm);
        let pout = propagate_attributes(pf.view(), &ImageAttributeMatrix::new(pb).unwrap(), &cfg).unwrap();

        for (new, &old) in perm.iter().enumerate() {
            for a in 0..3 {
                let (j, pj) = (out.report.consistency[[a, old]], pout.report.consistency[[a, new]]);
                prop_assert!((j - pj).abs() <= 1e-12);
                if (j - cfg.theta).abs() > 1e-9 {
                    prop_assert_eq!(out.refined.get(a, old), pout.refined.get(a, new));
                }
            }
        }
    }
}

#[test]
fn unanimous_neighborhoods_are_fixed_points() {
    let g = random_graph(4, 25, Topology::RelativeNeighborhood);
    for value in [0u8, 1] {
        let attrs = ImageAttributeMatrix::new(Array2::from_elem((3, 25), value)).unwrap();
        let s = scores(&g, &attrs, 2.0);
        assert!(s.consistency.iter().all(|&j| j == 1.0));
        assert!(s.expected.iter().all(|&z| z == f64::from(value)));
        let (refined, report) = identify_and_refine(&attrs, &s, 1.0).unwrap();
        assert!(report.flipped.is_empty());
        assert_eq!(refined, attrs);
    }
}

#[test]
fn lone_dissenter_is_flipped() {
    // star: center 0 disagrees with every leaf
    let dm = DistanceMatrix::new(
        array![
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 0.0, 1.5, 1.5],
            [1.0, 1.5, 0.0, 1.5],
            [1.0, 1.5, 1.5, 0.0]
        ],
        Metric::Euclidean,
    )
    .unwrap();
    let g = build_graph(&dm, Topology::RelativeNeighborhood).unwrap();
    assert_eq!(g.edge_count(), 3);
    let attrs = ImageAttributeMatrix::new(array![[1, 0, 0, 0]]).unwrap();
    let s = scores(&g, &attrs, 2.0);
    assert_eq!(s.consistency[[0, 0]], 0.0);
    assert_eq!(s.expected[[0, 0]], 0.0);
    let (refined, report) = identify_and_refine(&attrs, &s, 0.7).unwrap();
    // every leaf sees only the center, so it flips too
    assert_eq!(report.flipped, vec![(0, 0), (0, 1), (0, 2), (0, 3)]);
    assert_eq!(refined.values(), array![[0, 1, 1, 1]]);
}

#[test]
fn weights_follow_inverse_distance() {
    let dm = DistanceMatrix::new(array![[0.0, 1.0, 2.0], [1.0, 0.0, 2.0], [2.0, 2.0, 0.0]], Metric::Euclidean).unwrap();
    let g = build_graph(&dm, Topology::Complete).unwrap();
    let w = compute_edge_weights(&g, 2.0).unwrap();
    let of0: Vec<f64> = w.of(0).iter().map(|&(_, x)| x).collect();
    assert!((of0[0] - 0.8).abs() < 1e-15 && (of0[1] - 0.2).abs() < 1e-15);
    let w1 = compute_edge_weights(&g, 1.0).unwrap();
    assert!((w1.of(0)[0].1 - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn duplicate_points_share_weight() {
    let dm = DistanceMatrix::new(array![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]], Metric::Euclidean).unwrap();
    let g = build_graph(&dm, Topology::Complete).unwrap();
    for p in [0.5, 1.0, 2.0, 4.0] {
        let w = compute_edge_weights(&g, p).unwrap();
        assert_eq!(w.of(0), &[(1, 1.0), (2, 0.0)]);
        let sum: f64 = w.of(2).iter().map(|&(_, x)| x).sum();
        assert!((sum - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn pipeline_equals_manual_stages() {
    let data = generate_synthetic(&SyntheticSpec { seed: 11, ..Default::default() }).unwrap();
    let cfg = PropagationConfig::default();
    let out = propagate_attributes(data.features.rows(), &data.observed, &cfg).unwrap();

    let points = embed_features(data.features.rows(), cfg.target_max_norm).unwrap();
    let dm = pairwise_distances_with(&points, cfg.metric).unwrap();
    let graph = build_graph(&dm, cfg.topology).unwrap();
    let weights = compute_edge_weights(&graph, cfg.idw_p).unwrap();
    let s = neighborhood_consistency(&data.observed, &weights, &graph).unwrap();
    let (refined, report) = identify_and_refine(&data.observed, &s, cfg.theta).unwrap();

    assert_eq!(graph, out.graph);
    assert_eq!(graph, feature_graph(data.features.rows(), &cfg).unwrap());
    assert_eq!(refined, out.refined);
    assert_eq!(report, out.report);
}

#[test]
fn planted_noise_small_example() {
    let spec = SyntheticSpec {
        cluster_count: 3,
        points_per_cluster: 30,
        dimension: 8,
        cluster_spread: 0.5,
        attribute_count: 10,
        noise_rate: 0.1,
        seed: 42,
    };
    let data = generate_synthetic(&spec).unwrap();
    assert_eq!(data.noise_mask.len(), 90);
    let out = propagate_attributes(data.features.rows(), &data.observed, &PropagationConfig::default()).unwrap();
    let stats = recovery_stats(&data.observed, &out.refined, &data.noise_mask).unwrap();
    let errors_after = out.refined.differing_cells(&data.ground_truth).len();
    println!(
        "3x30 planted: reverted {}/{} ({:.3}), clean flipped {}/{} ({:.3}), errors {} -> {}",
        stats.reverted,
        stats.planted,
        stats.reverted_fraction(),
        stats.clean_flipped,
        stats.clean,
        stats.clean_flip_fraction(),
        data.noise_mask.len(),
        errors_after
    );
    // bounds frozen after the first calibration run (0.933 reverted, 0.156 clean flipped)
    assert!(stats.reverted_fraction() >= 0.90);
    assert!(stats.clean_flip_fraction() <= 0.16);
    assert_eq!(errors_after, stats.planted - stats.reverted + stats.clean_flipped);
}
