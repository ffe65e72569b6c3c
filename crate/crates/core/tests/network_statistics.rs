use multicascade::graph::{generate_er_multiplex, validate, GenParams};
use proptest::prelude::*;

fn reference(seed: u64) -> GenParams {
    GenParams {
        nodes: 500,
        layers: 2,
        edge_prob: 0.1,
        rng_seed: seed,
    }
}

#[test]
fn mean_degree_matches_binomial_expectation() {
    let expected = 0.1 * 499.0;
    for seed in 0..30 {
        let net = generate_er_multiplex(&reference(seed)).unwrap();
        for layer in 0..2 {
            let d = net.mean_degree(layer);
            assert!(
                (d - expected).abs() <= 0.1 * expected,
                "seed {seed} layer {layer}: {d}"
            );
        }
    }
}

#[test]
fn edge_count_mean_within_three_standard_errors() {
    let pairs: f64 = 500.0 * 499.0 / 2.0;
    let expected = 0.1 * pairs; // 12475
    let sd = (pairs * 0.1 * 0.9).sqrt();
    let counts: Vec<f64> = (0..100)
        .map(|seed| {
            generate_er_multiplex(&reference(1000 + seed))
                .unwrap()
                .edge_count(0) as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let se = sd / (counts.len() as f64).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "mean {mean}, expected {expected} ± {}",
        3.0 * se
    );
}

#[test]
fn layers_are_uncorrelated() {
    // the two layers are independent draws: overlap is ~p of each edge set
    let net = generate_er_multiplex(&reference(3)).unwrap();
    let shared = net
        .edges(0)
        .filter(|&(u, v)| net.has_edge(1, u, v).unwrap())
        .count() as f64;
    let expected = net.edge_count(0) as f64 * 0.1;
    assert!(
        (shared - expected).abs() < 5.0 * expected.sqrt(),
        "{shared} vs {expected}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_networks_always_validate(
        nodes in 1usize..120,
        layers in 1usize..5,
        edge_prob in 0.0f64..=1.0,
        rng_seed in any::<u64>(),
    ) {
        let p = GenParams { nodes, layers, edge_prob, rng_seed };
        let net = generate_er_multiplex(&p).unwrap();
        prop_assert!(validate(&net).is_ok());
        prop_assert_eq!(net.layers(), layers);
        prop_assert_eq!(net, generate_er_multiplex(&p).unwrap());
    }
}
