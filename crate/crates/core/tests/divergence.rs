mod common;

use common::*;
use proptest::prelude::*;
use silsamp_core::stats::{js_divergence_slices, kl_divergence_slices};

#[test]
fn named_oracle_values() {
    let oracle = oracle_json("divergence.json");
    let kl = kl_divergence_slices(&[0.75, 0.25], &[0.5, 0.5]).unwrap();
    assert!((kl - oracle["named"]["kl_075_025_vs_half"].as_f64().unwrap()).abs() < 1e-12);
    let jsd = js_divergence_slices(&[0.5, 0.5], &[0.9, 0.1]).unwrap();
    assert!((jsd - oracle["named"]["jsd_half_vs_09_01"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn random_pairs_match_oracle() {
    let oracle = oracle_json("divergence.json");
    let pairs = oracle["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 100);
    for pair in pairs {
        let p = f64_vec(&pair["p"]);
        let q = f64_vec(&pair["q"]);
        let m = f64_vec(&pair["m"]);
        let jsd = js_divergence_slices(&p, &q).unwrap();
        assert!((jsd - pair["jsd"].as_f64().unwrap()).abs() < 1e-12, "{p:?} {q:?}");
        let kl = kl_divergence_slices(&p, &m).unwrap();
        assert!((kl - pair["kl_p_m"].as_f64().unwrap()).abs() < 1e-12);
    }
}

fn arb_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=9).prop_flat_map(|n| {
        let w = proptest::collection::vec(0.0f64..1.0, n);
        (w.clone(), w).prop_filter_map("non-zero mass", |(a, b)| {
            let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
            (sa > 0.0 && sb > 0.0).then(|| (a.iter().map(|x| x / sa).collect(), b.iter().map(|x| x / sb).collect()))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jsd_symmetric_and_bounded((p, q) in arb_pair()) {
        let a = js_divergence_slices(&p, &q).unwrap();
        let b = js_divergence_slices(&q, &p).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
        prop_assert!(js_divergence_slices(&p, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn kl_nonnegative_against_mixture((p, q) in arb_pair(), w in 0.01f64..0.99) {
        let m: Vec<f64> = p.iter().zip(&q).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        prop_assert!(kl_divergence_slices(&p, &m).unwrap() >= 0.0);
    }
}

#[test]
fn disjoint_supports_saturate() {
    for n in 2..=9 {
        for split in 1..n {
            let mut p = vec![0.0; n];
            let mut q = vec![0.0; n];
            for i in 0..split {
                p[i] = 1.0 / split as f64;
            }
            for i in split..n {
                q[i] = 1.0 / (n - split) as f64;
            }
            assert_eq!(js_divergence_slices(&p, &q).unwrap(), 1.0, "{p:?} {q:?}");
        }
    }
}
