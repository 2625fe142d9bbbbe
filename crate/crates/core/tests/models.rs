use std::collections::BTreeSet;

use forge_core::assignment::index_to_bits;
use forge_core::{
    brute_force, check_compatible, chimera_graph, Assignment, Form, IsingBuilder, IsingModel,
    QuadraticModel, QuboBuilder, QuboModel,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dyadic coefficients keep every conversion exact.
fn dyadic() -> impl Strategy<Value = f64> {
    (-64i32..=64).prop_map(|k| k as f64 / 8.0)
}

fn qubo_strategy(max_n: usize) -> impl Strategy<Value = QuboModel> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(dyadic(), n),
            prop::collection::vec((0..n, 0..n, dyadic()), 0..3 * n),
            dyadic(),
        )
            .prop_map(move |(lin, quad, off)| {
                let mut b = QuboBuilder::new(n);
                for (i, a) in lin.into_iter().enumerate() {
                    b.add_linear(i, a);
                }
                for (i, j, c) in quad {
                    b.add_quadratic(i, j, c);
                }
                b.add_offset(off);
                b.build()
            })
    })
}

/// Dense symmetric-matrix evaluator, independent of the model's own loop.
fn dense_qubo_energy(q: &QuboModel, z: &[u8]) -> f64 {
    let n = q.num_vars();
    let mut mat = vec![vec![0.0; n]; n];
    for i in 0..n {
        mat[i][i] = q.linear()[i];
    }
    for (&(i, j), &c) in q.quadratic() {
        mat[i][j] += c / 2.0;
        mat[j][i] += c / 2.0;
    }
    let mut e = q.offset();
    for i in 0..n {
        for j in 0..n {
            e += mat[i][j] * z[i] as f64 * z[j] as f64;
        }
    }
    e
}

fn dense_ising_energy(m: &IsingModel, s: &[i8]) -> f64 {
    let mut e = m.offset();
    for i in 0..m.num_spins() {
        e -= m.h()[i] * s[i] as f64;
        for j in i + 1..m.num_spins() {
            e += m.coupling(i, j) * s[i] as f64 * s[j] as f64;
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_is_exact_exhaustively(q in qubo_strategy(12)) {
        let ising = q.to_ising();
        let back = ising.to_qubo();
        prop_assert_eq!(&back, &q);
        let n = q.num_vars();
        for k in 0..1u64 << n {
            let a = Assignment::from_index(k, n, Form::Bit);
            let eq = q.energy(&a).unwrap();
            let es = ising.energy(&a.to_form(Form::Spin)).unwrap();
            prop_assert_eq!(eq, es);
        }
    }

    #[test]
    fn round_trip_preserves_energy_on_samples(q in qubo_strategy(64), seed in any::<u64>()) {
        let ising = q.to_ising();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let z: Vec<u8> = (0..q.num_vars()).map(|_| rng.gen_range(0..2)).collect();
            let a = Assignment::from_bits(&z).unwrap();
            prop_assert_eq!(q.energy(&a).unwrap(), ising.energy(&a.to_form(Form::Spin)).unwrap());
        }
    }

    #[test]
    fn energy_is_permutation_equivariant(q in qubo_strategy(10), seed in any::<u64>()) {
        let n = q.num_vars();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let p = q.permuted(&perm);
        for _ in 0..50 {
            let z: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let mut zp = vec![0u8; n];
            for i in 0..n {
                zp[perm[i]] = z[i];
            }
            prop_assert_eq!(q.energy_bits(&z), p.energy_bits(&zp));
        }
    }

    #[test]
    fn argmin_invariant_under_offset_and_scaling(
        q in qubo_strategy(12),
        shift in dyadic(),
        scale in (1i32..=16).prop_map(|k| k as f64 / 4.0),
    ) {
        let base = brute_force(&q).unwrap();
        let shifted = brute_force(&q.with_offset(q.offset() + shift)).unwrap();
        let scaled = brute_force(&q.scaled(scale)).unwrap();
        prop_assert_eq!(&shifted.best_assignment, &base.best_assignment);
        prop_assert_eq!(&scaled.best_assignment, &base.best_assignment);
        prop_assert_eq!(shifted.optimal_count, base.optimal_count);
    }

    #[test]
    fn stored_quadratic_keys_are_ordered_and_nonzero(q in qubo_strategy(20)) {
        for (&(i, j), &c) in q.quadratic() {
            prop_assert!(i < j && j < q.num_vars());
            prop_assert!(c != 0.0);
        }
        let ising = q.to_ising();
        for (&(i, j), &c) in ising.couplings() {
            prop_assert!(i < j && j < ising.num_spins());
            prop_assert!(c != 0.0);
        }
    }
}

#[test]
fn energy_matches_dense_evaluator_on_random_n8() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut b = IsingBuilder::new(8);
    for i in 0..8 {
        b.add_field(i, rng.gen_range(-1.0..1.0));
        for j in i + 1..8 {
            if rng.gen_bool(0.5) {
                b.add_coupling(i, j, rng.gen_range(-1.0..1.0));
            }
        }
    }
    b.add_offset(0.75);
    let m = b.build();
    let q = m.to_qubo();
    for _ in 0..100 {
        let s: Vec<i8> = (0..8)
            .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
            .collect();
        let a = Assignment::from_spins(&s).unwrap();
        let e = m.energy(&a).unwrap();
        assert!((e - dense_ising_energy(&m, &s)).abs() <= 1e-12 * e.abs().max(1.0));
        let z = a.bits();
        assert!((e - dense_qubo_energy(&q, &z)).abs() <= 1e-12 * e.abs().max(1.0) * 10.0);
    }
}

#[test]
fn chimera_two_cells_has_36_edges_and_bipartite_cells() {
    let g = chimera_graph(2, 1, 4).unwrap();
    assert_eq!(g.num_nodes(), 16);
    let mut intra = 0;
    let mut inter = 0;
    for &(a, b) in g.edges() {
        let (pa, pb) = (g.cell_of(a).unwrap(), g.cell_of(b).unwrap());
        if (pa.row, pa.col) == (pb.row, pb.col) {
            assert_ne!(pa.side, pb.side, "intra-cell edge inside one side");
            intra += 1;
        } else {
            // vertical neighbours, same side and same position
            assert_eq!(pa.row.abs_diff(pb.row) + pa.col.abs_diff(pb.col), 1);
            assert_eq!((pa.side, pa.index), (pb.side, pb.index));
            inter += 1;
        }
    }
    assert_eq!((intra, inter), (32, 4));
    // each cell is a complete K4,4
    for cell in 0..2 {
        for a in 0..4 {
            for b in 0..4 {
                assert!(g.has_edge(cell * 8 + a, cell * 8 + 4 + b));
            }
        }
    }
}

#[test]
fn chimera_128_qubit_edge_count() {
    let g = chimera_graph(4, 4, 4).unwrap();
    assert_eq!(g.num_nodes(), 128);
    // 16 cells x 16 intra + 2 * (4 * 3) neighbouring cell pairs x 4
    assert_eq!(g.edges().len(), 16 * 16 + 24 * 4);
}

#[test]
fn model_on_native_edges_is_compatible() {
    let g = chimera_graph(1, 1, 4).unwrap();
    let mut b = IsingBuilder::new(8);
    for &(i, j) in g.edges() {
        b.add_coupling(i, j, 1.0);
    }
    assert!(check_compatible(&b.build(), &g).is_empty());
}

#[test]
fn incompatible_couplings_are_the_set_difference() {
    let g = chimera_graph(2, 2, 4).unwrap();
    let n = g.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut pairs = BTreeSet::new();
    while pairs.len() < 50 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    let mut b = IsingBuilder::new(n);
    for &(i, j) in &pairs {
        b.add_coupling(i, j, 1.0);
    }
    let expected: Vec<_> = pairs.difference(g.edges()).copied().collect();
    assert_eq!(check_compatible(&b.build(), &g), expected);
}

#[test]
fn exhaustive_dense_check_of_conversion_at_n5() {
    let mut b = QuboBuilder::new(5);
    b.add_linear(0, 1.0)
        .add_linear(3, -2.5)
        .add_quadratic(0, 4, 3.0)
        .add_quadratic(1, 2, -0.5)
        .add_offset(1.0);
    let q = b.build();
    let m = q.to_ising();
    for k in 0..32 {
        let z = index_to_bits(k, 5);
        let s: Vec<i8> = z.iter().map(|&b| 1 - 2 * b as i8).collect();
        assert_eq!(dense_qubo_energy(&q, &z), dense_ising_energy(&m, &s));
    }
}
