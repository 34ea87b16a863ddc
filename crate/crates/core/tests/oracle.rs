mod common;

use beliefvar::oracle::{mc_estimates, mc_estimates_controlled, OracleConfig};
use beliefvar::Query;
use common::{random_net, random_query};

fn root_moments(alpha: &[f64], h: usize) -> (f64, f64) {
    let s: f64 = alpha.iter().sum();
    let pi = alpha[h] / s;
    (pi, pi * (1.0 - pi) / (s + 1.0))
}

#[test]
fn results_do_not_depend_on_chunking_or_threads() {
    let net = random_net(6, 5, 3, 2, 0.5, 3.0);
    let q = random_query(net.dag(), 61, 3);
    let base = OracleConfig {
        samples: 3000,
        seed: 11,
        chunk_size: 64,
        threads: Some(1),
    };
    let a = mc_estimates(&net, &q, &base).unwrap();
    for (chunk_size, threads) in [(1, Some(8)), (500, Some(8)), (4096, None), (17, Some(3))] {
        let b = mc_estimates(
            &net,
            &q,
            &OracleConfig {
                chunk_size,
                threads,
                ..base
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }
    let c1 = mc_estimates_controlled(&net, &q, &base).unwrap();
    let c8 = mc_estimates_controlled(
        &net,
        &q,
        &OracleConfig {
            threads: Some(8),
            chunk_size: 9,
            ..base
        },
    )
    .unwrap();
    assert_eq!(c1, c8);
}

#[test]
fn root_query_matches_dirichlet_moments() {
    let alpha = [2.0, 5.0, 1.5];
    let net = common::root(alpha.to_vec());
    for h in 0..3 {
        let (mean, var) = root_moments(&alpha, h);
        let q = Query::new(net.dag(), vec![(0, h)], vec![]).unwrap();
        let r = mc_estimates(&net, &q, &OracleConfig::new(100_000, h as u64)).unwrap();
        assert!(
            (r.q0 - mean).abs() < 4.0 * r.se_mean,
            "h {h}: {} vs {mean}",
            r.q0
        );
        assert!(
            (r.v0 - var).abs() < 4.0 * r.se_var,
            "h {h}: {} vs {var}",
            r.v0
        );
    }
}

#[test]
fn uniform_prior_has_mean_one_half() {
    let net = common::root(vec![1.0, 1.0]);
    let q = Query::new(net.dag(), vec![(0, 1)], vec![]).unwrap();
    let r = mc_estimates(&net, &q, &OracleConfig::new(50_000, 3)).unwrap();
    assert!((r.q0 - 0.5).abs() < 4.0 * r.se_mean);
    assert!((r.v0 - 1.0 / 12.0).abs() < 4.0 * r.se_var);
}

#[test]
fn hypothesis_implied_by_evidence_is_certain() {
    let net = random_net(2, 4, 3, 2, 0.5, 2.0);
    let q = Query::new(net.dag(), vec![(1, 0)], vec![(1, 0), (3, 1)]).unwrap();
    let r = mc_estimates(&net, &q, &OracleConfig::new(2000, 4)).unwrap();
    assert_eq!((r.q0, r.v0), (1.0, 0.0));
}

#[test]
fn variance_estimates_concentrate_across_seeds() {
    let alpha = [3.0, 7.0];
    let (_, var) = root_moments(&alpha, 0);
    let net = common::root(alpha.to_vec());
    let q = Query::new(net.dag(), vec![(0, 0)], vec![]).unwrap();
    let k = 4000;
    let inside = (0..50)
        .filter(|&seed| {
            let r = mc_estimates(&net, &q, &OracleConfig::new(k, seed)).unwrap();
            (r.v0 / var - 1.0).abs() < 2.0 * (2.0 / k as f64).sqrt()
        })
        .count();
    assert!(inside >= 45, "{inside} of 50 seeds inside the band");
}

#[test]
fn mean_is_unbiased_over_seeds() {
    let net = common::chain(4);
    let q = Query::new(net.dag(), vec![(2, 0)], vec![(0, 1)]).unwrap();
    let runs: Vec<_> = (0..50)
        .map(|seed| mc_estimates(&net, &q, &OracleConfig::new(2000, 1000 + seed)).unwrap())
        .collect();
    let pooled = runs.iter().map(|r| r.q0).sum::<f64>() / 50.0;
    let se = (runs.iter().map(|r| r.se_mean * r.se_mean).sum::<f64>()).sqrt() / 50.0;
    let exact = beliefvar::full_bundle(&net, &q).unwrap().q1;
    assert!(
        (pooled - exact).abs() < 3.0 * se,
        "{pooled} vs {exact} (se {se})"
    );
}

#[test]
fn control_variate_keeps_the_mean_and_shrinks_its_error() {
    for seed in 0..6 {
        let net = random_net(seed + 40, 5, 3, 2, 2.0, 8.0);
        let q = random_query(net.dag(), seed, 3);
        let cfg = OracleConfig::new(20_000, seed);
        let plain = mc_estimates(&net, &q, &cfg).unwrap();
        let cv = mc_estimates_controlled(&net, &q, &cfg).unwrap();
        assert_eq!(plain.v0, cv.v0);
        assert!(cv.se_mean <= plain.se_mean * 1.01, "seed {seed}");
        let sep = (plain.se_mean.powi(2) + cv.se_mean.powi(2)).sqrt();
        assert!((plain.q0 - cv.q0).abs() < 4.0 * sep, "seed {seed}");
    }
}
