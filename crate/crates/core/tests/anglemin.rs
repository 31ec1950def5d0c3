mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use anglemin::anglemin::{
    angle, anglemin_classify, angleminplus_classify, angleminplus_subnetwork_classify, argmin_angle,
    build_projector, community_aggregates, insample_classify, project, FittedClassifier, InsampleMode, Projector,
    ProjectorStrategy,
};
use anglemin::bench::{run_simulation, Method, RunRecord, SimConfig};
use anglemin::bench::stats::{mean, standard_error};
use anglemin::{ClassifyError, DcbmParams, EdgeVector, Graph, Network, NewNodeParams, Seed};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng as _;

fn psi(u: &[f64], v: &[f64]) -> f64 {
    angle(u, v).unwrap().radians()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn angle_examples() {
    assert_eq!(psi(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), 0.0);
    assert!((psi(&[1.0, 0.0], &[0.0, 1.0]) - FRAC_PI_2).abs() < 1e-15);
    assert!((psi(&[1.0, 1.0], &[1.0, 0.0]) - FRAC_PI_4).abs() < 1e-15);
    assert_eq!(angle(&[0.0, 0.0], &[1.0, 0.0]), Err(ClassifyError::ZeroVector));
    assert!(matches!(angle(&[1.0], &[1.0, 0.0]), Err(ClassifyError::InvalidInput(_))));
}

/// The 5-node network with edges 0-2, 0-3, 1-3, 1-4, 2-3, labeled nodes
/// 0 (community 0) and 1 (community 1).
fn five_node() -> Network {
    let g = Graph::from_edges(5, vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 3)]).0;
    network(g, 2, vec![(0, 0), (1, 1)])
}

#[test]
fn aggregates_by_hand() {
    let agg = community_aggregates(&five_node()).unwrap();
    assert_eq!(agg[0], vec![0.0, 0.0, 1.0, 1.0, 0.0]);
    assert_eq!(agg[1], vec![0.0, 0.0, 0.0, 1.0, 1.0]);

    let g = Graph::from_edges(5, vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 3)]).0;
    let both = network(g.clone(), 2, vec![(0, 1), (1, 1), (2, 0)]);
    let agg = community_aggregates(&both).unwrap();
    assert_eq!(agg[1], vec![0.0, 0.0, 1.0, 2.0, 1.0]);
    assert_eq!(agg[0], g.row(2));

    let one_sided = network(g, 2, vec![(0, 0), (1, 0)]);
    assert_eq!(community_aggregates(&one_sided), Err(ClassifyError::MissingLabeledCommunity(1)));
}

#[test]
fn projection_examples() {
    let g = Graph::from_edges(4, vec![(0, 1)]).0;
    let net = network(g, 2, vec![(0, 0), (1, 1)]);
    let h = Projector::custom(DMatrix::identity(2, 2));
    let out = project(&[1.0, 2.0, 3.0, 4.0], net.layout(), &h).unwrap();
    assert_eq!(out, vec![1.0, 2.0, 3.0, 4.0]);
    assert_eq!(project(&[0.0; 4], net.layout(), &h).unwrap(), vec![0.0; 4]);
    assert!(project(&[1.0; 3], net.layout(), &h).is_err());
    let short = Projector::custom(DMatrix::identity(3, 2));
    assert!(project(&[1.0; 4], net.layout(), &short).is_err());
}

#[test]
fn projection_matches_matrix_formula() {
    for seed in 0..20 {
        let (_, layout) = random_instance(seed, 40, 3);
        let mut rng = Seed(seed).derive(1).rng();
        let x: Vec<f64> = (0..40).map(|_| rng.random_range(-2.0..2.0)).collect();
        let h = DMatrix::from_fn(layout.unlabeled().len(), 3, |_, _| rng.random_range(-1.0..1.0));

        let labeled = layout.labeled();
        let pi_l = DMatrix::from_fn(labeled.len(), 3, |r, c| if layout.labels()[r] == c { 1.0 } else { 0.0 });
        let x_l = nalgebra::DVector::from_iterator(labeled.len(), labeled.iter().map(|&v| x[v]));
        let x_u = nalgebra::DVector::from_iterator(layout.unlabeled().len(), layout.unlabeled().iter().map(|&v| x[v]));
        let mut expected: Vec<f64> = (pi_l.transpose() * x_l).iter().copied().collect();
        expected.extend((h.transpose() * x_u).iter());

        let got = project(&x, &layout, &Projector::custom(h)).unwrap();
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "seed {seed}");
        }
    }
}

#[test]
fn anglemin_exact_match_and_tie() {
    let net = five_node();
    let clf = FittedClassifier::anglemin(&net).unwrap();
    let agg = community_aggregates(&net).unwrap();
    let out = clf.classify_dense(&agg[1]).unwrap();
    assert_eq!(out.label, 1);
    assert_eq!(out.angles[1], 0.0);
    assert!(!out.tie);

    // Both labeled nodes see exactly nodes 2 and 3.
    let g = Graph::from_edges(4, vec![(0, 2), (0, 3), (1, 2), (1, 3)]).0;
    let net = network(g, 2, vec![(0, 0), (1, 1)]);
    let x = EdgeVector::from_neighbors(4, vec![2]).unwrap();
    let out = anglemin_classify(&net, &x).unwrap();
    assert_eq!(out.label, 0);
    assert!(out.tie);
    assert!(!out.fallback);
}

#[test]
fn zero_vector_falls_back_to_majority_neighbor() {
    let net = five_node();
    let out = anglemin_classify(&net, &EdgeVector::from_neighbors(5, vec![]).unwrap()).unwrap();
    assert!(out.fallback && out.tie);
    assert_eq!(out.label, 0);
    assert!(out.angles.iter().all(|a| a.is_nan()));

    // A new node linked only to labeled node 1: the subnetwork vector of
    // community 1 is zero, so it is excluded from the argmin.
    let x = EdgeVector::from_neighbors(5, vec![1]).unwrap();
    let out = angleminplus_subnetwork_classify(&net, &x).unwrap();
    assert!(out.fallback);
    assert_eq!(out.label, 1);
}

#[test]
fn subnetwork_hand_example() {
    // Labeled nodes 0, 1 in community 0 and 2, 3 in community 1; edges 0-1,
    // 0-2, 2-3 among them; node 4 is unlabeled.
    let g = Graph::from_edges(5, vec![(0, 1), (0, 2), (2, 3), (1, 4), (3, 4)]).0;
    let net = network(g, 2, vec![(0, 0), (1, 0), (2, 1), (3, 1)]);
    // Community vectors in the labeled block: A^(0) -> (2, 1), A^(1) -> (1, 2).
    let x = EdgeVector::from_neighbors(5, vec![0, 2, 3]).unwrap();
    let out = angleminplus_subnetwork_classify(&net, &x).unwrap();
    // f(x) = (1, 2): angle 0 to community 1.
    assert_eq!(out.label, 1);
    let expected0 = (4.0f64 / 5.0).acos();
    assert!((out.angles[0] - expected0).abs() < 1e-12);
    assert!(out.angles[1].abs() < 1e-12);
}

#[test]
fn subnetwork_ignores_links_outside_labeled_block() {
    for seed in 0..10 {
        let (params, layout) = random_instance(seed, 50, 3);
        let g = params.sample_network(Seed(seed));
        let x = params.sample_new_node(&NewNodeParams::new(0.8, 1), Seed(seed).derive(1)).unwrap();
        let net = Network::from_parts(g.clone(), layout.clone()).unwrap();
        let base = angleminplus_subnetwork_classify(&net, &x).unwrap();

        let mut rng = Seed(seed).derive(2).rng();
        let mut edges: Vec<(usize, usize)> =
            g.edges().filter(|&(a, b)| layout.is_labeled(a) && layout.is_labeled(b)).collect();
        for a in 0..50 {
            for b in (a + 1)..50 {
                if !(layout.is_labeled(a) && layout.is_labeled(b)) && rng.random_bool(0.3) {
                    edges.push((a, b));
                }
            }
        }
        let scrambled = Network::from_parts(Graph::from_edges(50, edges).0, layout.clone()).unwrap();
        let mut neighbors: Vec<usize> = x.neighbors().iter().copied().filter(|&v| layout.is_labeled(v)).collect();
        neighbors.extend(layout.unlabeled().iter().copied().filter(|_| rng.random_bool(0.5)));
        let x2 = EdgeVector::from_neighbors(50, neighbors).unwrap();
        let other = angleminplus_subnetwork_classify(&scrambled, &x2).unwrap();
        assert_eq!(base.label, other.label);
        for (a, b) in base.angles.iter().zip(&other.angles) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }
}

#[test]
fn noiseless_true_community_has_zero_angle() {
    for seed in 0..50 {
        let k = 2 + (seed as usize % 3);
        let (params, layout) = random_instance(seed, 60, k);
        let h = Projector::custom(true_indicator(&params, &layout));
        let aggregates: Vec<Vec<f64>> = expected_aggregates(&params, &layout)
            .iter()
            .map(|a| project(a, &layout, &h).unwrap())
            .collect();
        let target = seed as usize % k;
        let x = project(&expected_edges(&params, 0.7, target), &layout, &h).unwrap();
        let angles: Vec<f64> = aggregates.iter().map(|a| psi(a, &x)).collect();
        assert!(angles[target] <= 1e-10, "seed {seed}: {}", angles[target]);
        let (label, _) = argmin_angle(&angles).unwrap();
        assert_eq!(label, target);
    }
}

#[test]
fn degree_parameters_cancel_in_noiseless_columns() {
    for seed in 0..5 {
        let (params, _) = random_instance(seed, 40, 3);
        let omega = params.omega_matrix();
        let labels = params.labels();
        let mut by_pair: std::collections::BTreeMap<(usize, usize), Vec<f64>> = Default::default();
        for i in 0..40 {
            for j in (i + 1)..40 {
                let a = omega.column(i).iter().copied().collect::<Vec<_>>();
                let b = omega.column(j).iter().copied().collect::<Vec<_>>();
                let key = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                by_pair.entry(key).or_default().push(psi(&a, &b));
            }
        }
        for (pair, values) in by_pair {
            let spread = values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(spread <= 1e-10, "seed {seed} pair {pair:?}: spread {spread}");
        }
    }
}

#[test]
fn projector_column_permutation_leaves_prediction_unchanged() {
    for seed in 0..20 {
        let (params, layout) = random_instance(seed, 80, 4);
        let net = Network::from_parts(params.sample_network(Seed(seed)), layout.clone()).unwrap();
        let x = params.sample_new_node(&NewNodeParams::new(0.9, 2), Seed(seed).derive(3)).unwrap();
        let mut rng = Seed(seed).derive(4).rng();
        let h = DMatrix::from_fn(layout.unlabeled().len(), 4, |_, _| rng.random_range(0.0..1.0));
        let base = angleminplus_classify(&net, &x, &Projector::custom(h.clone())).unwrap();
        for perm in all_permutations(4) {
            let out = angleminplus_classify(&net, &x, &Projector::custom(permute_columns(&h, &perm))).unwrap();
            assert_eq!(out.label, base.label);
            for (a, b) in out.angles.iter().zip(&base.angles) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn angles_do_not_depend_on_edge_vector_scale() {
    let (params, layout) = random_instance(3, 60, 3);
    let net = Network::from_parts(params.sample_network(Seed(1)), layout).unwrap();
    let projector = build_projector(&net, ProjectorStrategy::PartitionIndicator, Seed(2)).unwrap();
    let clf = FittedClassifier::angleminplus(&net, projector).unwrap();
    let x = params.sample_new_node(&NewNodeParams::new(1.0, 0), Seed(5)).unwrap().to_dense();
    let base = clf.classify_dense(&x).unwrap();
    for c in [0.25, 3.0, 1e3] {
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        let out = clf.classify_dense(&scaled).unwrap();
        assert_eq!(out.label, base.label);
        for (a, b) in out.angles.iter().zip(&base.angles) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn indicator_projector_on_two_cliques() {
    // Labeled nodes 0 and 20; the remaining 38 nodes form the unlabeled set.
    let g = two_cliques(20);
    let net = network(g, 2, vec![(0, 0), (20, 1)]);
    let projector = build_projector(&net, ProjectorStrategy::PartitionIndicator, Seed(0)).unwrap();
    let h = projector.matrix();
    let first = h.row(0).iter().position(|&v| v == 1.0).unwrap();
    for (row, &v) in net.layout().unlabeled().iter().enumerate() {
        let col = if v < 20 { first } else { 1 - first };
        assert_eq!(h[(row, col)], 1.0);
        assert_eq!(h[(row, 1 - col)], 0.0);
    }
    let x = EdgeVector::from_neighbors(40, (20..30).collect()).unwrap();
    assert_eq!(angleminplus_classify(&net, &x, &projector).unwrap().label, 1);
}

#[test]
fn singleton_unlabeled_communities_give_permutation_matrix() {
    let g = Graph::from_edges(6, vec![(0, 3), (1, 4), (2, 5), (3, 4), (4, 5)]).0;
    let net = network(g, 3, vec![(0, 0), (1, 1), (2, 2)]);
    let h = build_projector(&net, ProjectorStrategy::PartitionIndicator, Seed(0)).unwrap();
    let m = h.matrix();
    for r in 0..3 {
        assert_eq!(m.row(r).sum(), 1.0);
        assert_eq!(m.column(r).sum(), 1.0);
    }
}

#[test]
fn every_strategy_respects_gram_bound() {
    for seed in 0..5 {
        let (params, layout) = random_instance(100 + seed, 150, 3);
        let net = Network::from_parts(params.sample_network(Seed(seed)), layout).unwrap();
        let u = net.layout().unlabeled().len() as f64;
        for strategy in [
            ProjectorStrategy::PartitionIndicator,
            ProjectorStrategy::DegreeWeightedPartition,
            ProjectorStrategy::SpectralEmbedding,
        ] {
            let h = build_projector(&net, strategy, Seed(seed)).unwrap();
            let gram = anglemin::spectral::gram_spectral_norm(h.matrix());
            assert!(gram <= u * (1.0 + 1e-8), "{strategy:?}: {gram} > {u}");
        }
    }
}

fn planted_two_block(seed: u64, n: usize) -> (DcbmParams, Network) {
    let mut rng = Seed(seed).rng();
    let mut labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    labels.shuffle(&mut rng);
    let theta = (0..n).map(|_| rng.random_range(0.5..0.9)).collect();
    let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 1.0]);
    let params = DcbmParams::new(theta, labels.clone(), p).unwrap();
    let g = params.sample_network(Seed(seed).derive(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let labeled = order[..n / 5].iter().map(|&v| (v, labels[v])).collect();
    (params, Network::new(g, 2, labeled).unwrap())
}

#[test]
fn insample_recovers_planted_communities() {
    let (mut correct, mut total) = (0usize, 0usize);
    for seed in 0..20 {
        let (params, net) = planted_two_block(seed, 200);
        let res = insample_classify(&net, ProjectorStrategy::PartitionIndicator, InsampleMode::Shared, Seed(seed)).unwrap();
        for (&v, &label) in res.partition.nodes().iter().zip(res.partition.assignment()) {
            correct += usize::from(label == params.labels()[v]);
            total += 1;
        }
    }
    let accuracy = correct as f64 / total as f64;
    assert!(accuracy >= 0.95, "accuracy {accuracy}");
}

#[test]
fn strict_and_shared_insample_agree() {
    for seed in 0..3 {
        let (_, net) = planted_two_block(50 + seed, 60);
        let shared = insample_classify(&net, ProjectorStrategy::PartitionIndicator, InsampleMode::Shared, Seed(seed)).unwrap();
        let strict = insample_classify(&net, ProjectorStrategy::PartitionIndicator, InsampleMode::Strict, Seed(seed)).unwrap();
        let agree = shared
            .partition
            .assignment()
            .iter()
            .zip(strict.partition.assignment())
            .filter(|(a, b)| a == b)
            .count() as f64
            / shared.partition.len() as f64;
        assert!(agree >= 0.95, "seed {seed}: agreement {agree}");
    }
}

#[test]
fn insample_isolated_node_uses_fallback() {
    let (_, net) = planted_two_block(8, 60);
    let mut edges: Vec<(usize, usize)> = net.graph().edges().collect();
    let isolated = *net.layout().unlabeled().last().unwrap();
    edges.retain(|&(a, b)| a != isolated && b != isolated);
    let g = Graph::from_edges(60, edges).0;
    let net = Network::from_parts(g, net.layout().clone()).unwrap();
    let res = insample_classify(&net, ProjectorStrategy::PartitionIndicator, InsampleMode::Shared, Seed(0)).unwrap();
    assert!(res.fallback_nodes.contains(&isolated));
    let pos = res.partition.nodes().iter().position(|&v| v == isolated).unwrap();
    assert_eq!(res.partition.assignment()[pos], 0);
}

/// Dense balanced configuration with uniformly drawn off-diagonal `P`.
fn random_p_config(methods: Vec<Method>) -> SimConfig {
    let mut cfg: SimConfig = serde_json::from_value(serde_json::json!({
        "config_id": "dense_random_p",
        "n": 500,
        "k": 3,
        "theta_law": "gamma_dense",
        "balance": "balanced",
        "n_labeled": [100],
        "repetitions": 100,
        "seed": 3
    }))
    .unwrap();
    cfg.methods = methods;
    cfg
}

fn mean_error(records: &[RunRecord], method: Method) -> (f64, f64) {
    let errors: Vec<f64> = records.iter().filter(|r| r.method == method).map(|r| r.error_rate).collect();
    assert_eq!(errors.len(), 100);
    (mean(&errors), standard_error(&errors))
}

#[test]
fn monte_carlo_method_ordering_with_random_connectivity() {
    let cfg = random_p_config(vec![
        Method::AngleMin,
        Method::AngleMinPlus,
        Method::AngleMinPlusSubnetwork,
        Method::ScorePlusOnly,
    ]);
    let outcome = run_simulation(&cfg).unwrap();
    assert!(outcome.failed_repetitions.is_empty());
    let (plus, _) = mean_error(&outcome.records, Method::AngleMinPlus);
    let (raw, _) = mean_error(&outcome.records, Method::AngleMin);
    let (sub, _) = mean_error(&outcome.records, Method::AngleMinPlusSubnetwork);
    let (score, _) = mean_error(&outcome.records, Method::ScorePlusOnly);
    assert!(plus < raw, "AngleMin+ {plus} vs AngleMin {raw}");
    assert!(plus < sub, "AngleMin+ {plus} vs subnetwork {sub}");
    assert!(raw < score, "AngleMin {raw} vs SCORE+ only {score}");
}

#[test]
fn sin_bounds() {
    for i in 0..=1000 {
        let x = FRAC_PI_2 * i as f64 / 1000.0;
        assert!(x.sin() <= x + 1e-15);
        assert!(x.sin() >= 2.0 / PI * x - 1e-15);
    }
}

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim).prop_filter("nonzero", |v| norm(v) > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn angle_is_symmetric_and_scale_free(u in vec_strategy(6), v in vec_strategy(6), c in 1e-3f64..1e3) {
        let a = psi(&u, &v);
        prop_assert_eq!(a, psi(&v, &u));
        let scaled: Vec<f64> = u.iter().map(|x| x * c).collect();
        prop_assert!((psi(&scaled, &v) - a).abs() < 1e-12);
        prop_assert!((0.0..=PI).contains(&a));
    }

    #[test]
    fn angle_triangle_inequality(x in vec_strategy(5), y in vec_strategy(5), z in vec_strategy(5)) {
        prop_assert!(psi(&x, &z) <= psi(&x, &y) + psi(&y, &z) + 1e-9);
    }

    #[test]
    fn perturbation_angle_bound(x in vec_strategy(5), dir in vec_strategy(5), share in 0.0f64..0.999) {
        let scale = share * norm(&x) / norm(&dir);
        let y: Vec<f64> = dir.iter().map(|d| d * scale).collect();
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assume!(norm(&sum) > 0.0);
        prop_assert!(psi(&x, &sum) <= (norm(&y) / norm(&x)).asin() + 1e-9);
    }
}
