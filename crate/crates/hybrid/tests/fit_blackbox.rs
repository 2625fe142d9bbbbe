use forge_core::{
    brute_force, chimera_graph, Assignment, Form, HardwareGraph, IsingBuilder, IsingModel,
};
use forge_hybrid::{
    blackbox_minimize, blackbox_minimize_with, fit_hardware_model, BlackboxOptions, FitOptions,
    HybridError, Population, Sampler,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_on_graph(g: &HardwareGraph, seed: u64) -> IsingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = IsingBuilder::new(g.num_nodes());
    for i in 0..g.num_nodes() {
        b.add_field(i, rng.gen_range(-1.0..1.0));
    }
    for &(i, j) in g.edges() {
        b.add_coupling(i, j, rng.gen_range(-1.0..1.0));
    }
    b.add_offset(rng.gen_range(-3.0..3.0));
    b.build()
}

fn random_population(
    n: usize,
    size: usize,
    seed: u64,
    mut g: impl FnMut(&[i8]) -> f64,
) -> Population {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs: Vec<Assignment> = (0..size)
        .map(|_| {
            let s: Vec<i8> = (0..n)
                .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
                .collect();
            Assignment::from_spins(&s).unwrap()
        })
        .collect();
    let values = configs.iter().map(|c| g(c.values())).collect();
    Population::new(configs, values, 0).unwrap()
}

#[test]
fn fit_recovers_generator() {
    let g = chimera_graph(1, 2, 3).unwrap();
    let p = 1 + g.num_nodes() + g.edges().len();
    for seed in 0..5 {
        let truth = random_on_graph(&g, seed);
        let pop = random_population(g.num_nodes(), 4 * p, 100 + seed, |s| truth.energy_spins(s));
        let fit = fit_hardware_model(&pop, &g, &FitOptions::default()).unwrap();
        assert!(!fit.fields_only);
        for i in 0..g.num_nodes() {
            assert!((fit.model.h()[i] - truth.h()[i]).abs() < 1e-6, "field {i}");
        }
        for &(i, j) in g.edges() {
            assert!(
                (fit.model.coupling(i, j) - truth.coupling(i, j)).abs() < 1e-6,
                "edge {i}-{j}"
            );
        }
        assert!(fit.rms < 1e-5);
    }
}

#[test]
fn two_configs_field_sign() {
    let g = chimera_graph(1, 1, 2).unwrap();
    for (ga, gb) in [(3.0, 1.0), (-2.0, 0.5)] {
        let a = Assignment::from_spins(&[1, 1, -1, 1]).unwrap();
        let b = Assignment::from_spins(&[1, -1, -1, 1]).unwrap();
        let pop = Population::new(vec![a, b], vec![ga, gb], 0).unwrap();
        let fit = fit_hardware_model(&pop, &g, &FitOptions::default()).unwrap();
        let a1 = fit.coefficients(&g)[2];
        assert_eq!(a1.signum(), (ga - gb as f64).signum());
    }
}

#[test]
fn degenerate_population_fits_fields_only() {
    let g = chimera_graph(1, 1, 2).unwrap();
    let a = Assignment::from_spins(&[1, -1, 1, 1]).unwrap();
    let pop = Population::new(vec![a.clone(), a], vec![2.0, 2.0], 0).unwrap();
    let fit = fit_hardware_model(&pop, &g, &FitOptions::default()).unwrap();
    assert!(fit.fields_only);
    assert_eq!(fit.model.couplings().len(), 0);
    assert!((fit.predict(&[1, -1, 1, 1]) - 2.0).abs() < 1e-6);
}

#[test]
fn ridge_shrinks_noise_fit() {
    let g = chimera_graph(1, 1, 4).unwrap();
    let p = 1 + g.num_nodes() + g.edges().len();
    for seed in 0..5 {
        let mut noise = ChaCha8Rng::seed_from_u64(seed);
        for size in [p / 2, 2 * p] {
            let pop = random_population(g.num_nodes(), size, seed, |_| noise.gen_range(-1.0..1.0));
            let norm = |f: &forge_hybrid::HardwareFit| {
                f.coefficients(&g)[1..].iter().map(|c| c * c).sum::<f64>()
            };
            let plain = fit_hardware_model(&pop, &g, &FitOptions { ridge: Some(0.0) }).unwrap();
            let ridge = fit_hardware_model(&pop, &g, &FitOptions::default()).unwrap();
            let strong = fit_hardware_model(&pop, &g, &FitOptions { ridge: Some(10.0) }).unwrap();
            assert!(norm(&ridge) <= norm(&plain) * (1.0 + 1e-9));
            assert!(norm(&strong) < norm(&plain));
        }
    }
}

#[test]
fn fit_rejects_wrong_size() {
    let g = chimera_graph(1, 1, 2).unwrap();
    let pop = random_population(3, 5, 0, |_| 0.0);
    assert!(fit_hardware_model(&pop, &g, &FitOptions::default()).is_err());
}

#[test]
fn in_model_oracle_finds_optimum() {
    let g = chimera_graph(1, 2, 3).unwrap();
    let mut hits = 0;
    for seed in 0..100 {
        let m = random_on_graph(&g, 1000 + seed);
        let opt = brute_force(&m).unwrap().best_energy;
        let r = blackbox_minimize(
            |s: &[i8]| Ok::<f64, String>(m.energy_spins(s)),
            &g,
            64,
            20,
            seed,
            Sampler::Tabu,
        )
        .unwrap();
        if r.best_value <= opt + 1e-9 {
            hits += 1;
        }
    }
    assert!(hits >= 90, "{hits}/100");
}

#[test]
fn count_of_up_spins() {
    let g = chimera_graph(2, 2, 4).unwrap();
    for seed in 0..5 {
        let r = blackbox_minimize(
            |s: &[i8]| Ok::<f64, String>(s.iter().filter(|&&v| v == 1).count() as f64),
            &g,
            64,
            10,
            seed,
            Sampler::Tabu,
        )
        .unwrap();
        assert_eq!(r.history[3], 0.0, "{:?}", r.history);
        assert!(r.best.values().iter().all(|&v| v == -1));
    }
}

#[test]
fn constant_oracle_runs_to_cap_or_stall() {
    let g = chimera_graph(1, 1, 4).unwrap();
    let r = blackbox_minimize(
        |_: &[i8]| Ok::<f64, String>(1.0),
        &g,
        16,
        3,
        0,
        Sampler::Tabu,
    )
    .unwrap();
    assert_eq!(r.iterations, 3);
    assert!(!r.stopped_on_stall);
    assert_eq!(r.best_value, 1.0);
    let r = blackbox_minimize(
        |_: &[i8]| Ok::<f64, String>(1.0),
        &g,
        16,
        50,
        0,
        Sampler::Tabu,
    )
    .unwrap();
    assert_eq!(r.iterations, 5);
    assert!(r.stopped_on_stall);
}

#[test]
fn oracle_error_carries_iteration() {
    let g = chimera_graph(1, 1, 4).unwrap();
    let mut calls = 0;
    let err = blackbox_minimize(
        |_: &[i8]| {
            calls += 1;
            if calls > 20 {
                Err("disk on fire")
            } else {
                Ok(0.0)
            }
        },
        &g,
        16,
        10,
        0,
        Sampler::Tabu,
    )
    .unwrap_err();
    match err {
        HybridError::Oracle {
            iteration,
            evaluation,
            message,
        } => {
            assert_eq!(iteration, 1);
            assert_eq!(evaluation, 20);
            assert!(message.contains("disk on fire"));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn anneal_sampler_works() {
    let g = chimera_graph(1, 1, 4).unwrap();
    let m = random_on_graph(&g, 7);
    let opt = brute_force(&m).unwrap().best_energy;
    let r = blackbox_minimize(
        |s: &[i8]| Ok::<f64, String>(m.energy_spins(s)),
        &g,
        16,
        20,
        3,
        Sampler::Anneal,
    )
    .unwrap();
    assert!((r.best_value - opt).abs() < 1e-9);
}

#[test]
fn seeded_runs_repeat() {
    let g = chimera_graph(1, 1, 4).unwrap();
    let m = random_on_graph(&g, 9);
    let run = || {
        blackbox_minimize(
            |s: &[i8]| Ok::<f64, String>(m.energy_spins(s)),
            &g,
            16,
            8,
            5,
            Sampler::Tabu,
        )
        .unwrap()
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn incumbent_never_lost(seed in 0u64..1000, pop in 4usize..24, keep in 0.2f64..1.0) {
        let g = chimera_graph(1, 1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table: Vec<f64> = (0..64).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let oracle = |s: &[i8]| table[Assignment::from_spins(s).unwrap().index() as usize];
        let mut evaluated = Vec::new();
        let opts = BlackboxOptions { keep_fraction: keep, ..BlackboxOptions::new(pop, 12) };
        let r = blackbox_minimize_with(
            |s: &[i8]| {
                let v = oracle(s);
                evaluated.push(v);
                Ok::<f64, String>(v)
            },
            &g,
            &opts,
            seed,
        )
        .unwrap();
        prop_assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        let min = evaluated.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.best_value, min);
        prop_assert_eq!(oracle(r.best.values()), min);
        prop_assert_eq!(r.evaluations, evaluated.len());
        prop_assert!(r.population.values().iter().any(|&v| v == min));
        let idx = Assignment::from_index(0, 6, Form::Spin);
        prop_assert_eq!(idx.len(), 6);
    }
}
