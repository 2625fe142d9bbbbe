use forge_compile::learning::structured::{Example, StructuredModel};
use forge_hybrid::{crf_loglik_gradient, crf_negative_log_likelihood, Estimator};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bits_of(k: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((k >> (n - 1 - i)) & 1) as u8).collect()
}

fn energy(model: &StructuredModel, x: &[f64], z: &[u8]) -> f64 {
    let phi = model.joint_features(x, z).unwrap();
    phi.iter().zip(model.weights()).map(|(a, b)| a * b).sum()
}

/// `sum_d beta E(z_d) + ln sum_z exp(-beta E(z))` by direct enumeration.
fn nll(model: &StructuredModel, data: &[Example], beta: f64) -> f64 {
    let l = model.num_labels();
    data.iter()
        .map(|ex| {
            let z: f64 = (0..1usize << l)
                .map(|k| (-beta * energy(model, &ex.x, &bits_of(k, l))).exp())
                .sum();
            beta * energy(model, &ex.x, &ex.z) + z.ln()
        })
        .sum()
}

fn random_setup(
    labels: usize,
    features: usize,
    examples: usize,
    seed: u64,
) -> (StructuredModel, Vec<Example>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![];
    for i in 0..labels {
        edges.push((i, i));
        for j in i + 1..labels {
            if rng.gen::<f64>() < 0.5 {
                edges.push((i, j));
            }
        }
    }
    let base = StructuredModel::new(labels, &edges, features).unwrap();
    let w: Vec<f64> = (0..base.num_weights())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let model = base.with_weights(&w).unwrap();
    let data = (0..examples)
        .map(|_| Example {
            x: (0..features).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            z: (0..labels).map(|_| rng.gen_range(0..2)).collect(),
        })
        .collect();
    (model, data)
}

#[test]
fn closed_form_maximum_likelihood() {
    // With only the constant feature, two labels and all three weights the
    // model family is every distribution on four states, so the maximiser
    // reproduces the empirical frequencies.
    let counts = [
        (vec![0u8, 0], 3usize),
        (vec![1, 0], 1),
        (vec![0, 1], 2),
        (vec![1, 1], 4),
    ];
    let total: usize = counts.iter().map(|c| c.1).sum();
    let data: Vec<Example> = counts
        .iter()
        .flat_map(|(z, c)| {
            (0..*c).map(move |_| Example {
                x: vec![],
                z: z.clone(),
            })
        })
        .collect();
    let p = |z: &[u8]| counts.iter().find(|c| c.0 == z).unwrap().1 as f64 / total as f64;
    for beta in [0.5, 1.0, 2.0] {
        let e = |z: &[u8]| -(p(z) / p(&[0, 0])).ln() / beta;
        let mut m = StructuredModel::complete(2, 0).unwrap();
        m.set_weight(0, 0, 0, e(&[1, 0])).unwrap();
        m.set_weight(0, 1, 1, e(&[0, 1])).unwrap();
        m.set_weight(0, 0, 1, e(&[1, 1]) - e(&[1, 0]) - e(&[0, 1]))
            .unwrap();
        let g = crf_loglik_gradient(&data, &m, beta, Estimator::Exact).unwrap();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-8, "beta {beta}: {norm}");
        let nudged = m
            .with_weights(&m.weights().iter().map(|w| w + 0.01).collect::<Vec<_>>())
            .unwrap();
        assert!(nll(&m, &data, beta) < nll(&nudged, &data, beta));
    }
}

#[test]
fn self_consistent_data_has_small_gradient() {
    let (model, _) = random_setup(4, 2, 1, 11);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let x: Vec<f64> = vec![0.3, -0.7];
    let l = model.num_labels();
    let w: Vec<f64> = (0..1usize << l)
        .map(|k| (-energy(&model, &x, &bits_of(k, l))).exp())
        .collect();
    let z: f64 = w.iter().sum();
    let draws = 20_000;
    let data: Vec<Example> = (0..draws)
        .map(|_| {
            let mut u = rng.gen::<f64>() * z;
            let mut k = 0;
            while u > w[k] {
                u -= w[k];
                k += 1;
            }
            Example {
                x: x.clone(),
                z: bits_of(k.min(w.len() - 1), l),
            }
        })
        .collect();
    let g = crf_loglik_gradient(&data, &model, 1.0, Estimator::Exact).unwrap();
    // each per-example term is bounded by |psi| <= 1 in magnitude, so the
    // sum is a few standard deviations of sqrt(draws) at most
    for v in g {
        assert!(v.abs() < 5.0 * (draws as f64).sqrt() * 0.5, "{v}");
    }
}

#[test]
fn gibbs_estimate_tracks_exact() {
    let (model, data) = random_setup(5, 1, 3, 4);
    let exact = crf_loglik_gradient(&data, &model, 1.0, Estimator::Exact).unwrap();
    let gibbs = crf_loglik_gradient(
        &data,
        &model,
        1.0,
        Estimator::Gibbs {
            sweeps: 60_000,
            burn_in: 500,
            seed: 3,
        },
    )
    .unwrap();
    for (a, b) in exact.iter().zip(&gibbs) {
        assert!((a - b).abs() < 0.05, "{a} vs {b}");
    }
}

#[test]
fn library_likelihood_matches_enumeration() {
    let (model, data) = random_setup(5, 2, 4, 8);
    for beta in [0.3, 1.0, 2.5] {
        let a = crf_negative_log_likelihood(&data, &model, beta).unwrap();
        assert!((a - nll(&model, &data, beta)).abs() < 1e-9);
    }
}

#[test]
fn rejects_bad_labels() {
    let (model, _) = random_setup(3, 0, 1, 0);
    let bad = [Example {
        x: vec![],
        z: vec![0, 2, 1],
    }];
    assert!(crf_loglik_gradient(&bad, &model, 1.0, Estimator::Exact).is_err());
    let short = [Example {
        x: vec![],
        z: vec![0, 1],
    }];
    assert!(crf_loglik_gradient(&short, &model, 1.0, Estimator::Exact).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_finite_differences(
        seed in 0u64..10_000, labels in 2usize..9, features in 0usize..3, beta in 0.2f64..2.0,
    ) {
        let (model, data) = random_setup(labels, features, 3, seed);
        let g = crf_loglik_gradient(&data, &model, beta, Estimator::Exact).unwrap();
        let h = 1e-5;
        for k in 0..model.num_weights() {
            let mut w = model.weights().to_vec();
            w[k] += h;
            let up = nll(&model.with_weights(&w).unwrap(), &data, beta);
            w[k] -= 2.0 * h;
            let down = nll(&model.with_weights(&w).unwrap(), &data, beta);
            let fd = (up - down) / (2.0 * h);
            let rel = (g[k] - fd).abs() / fd.abs().max(1.0);
            prop_assert!(rel < 1e-4, "weight {}: {} vs {}", k, g[k], fd);
        }
    }
}
