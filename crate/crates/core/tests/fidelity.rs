mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcheck::circuit::{Circuit, GateKind};
use stcheck::fidelity::{
    apply_cnots, estimate_fidelity, plan_fidelity, plan_fold, readout_fidelity_model, shot_parity,
    SampledStabilizer,
};
use stcheck::noise::DetectorSet;
use stcheck::state::Graph;
use stcheck::tableau::{StabilizerSim, StabilizerTableau};
use stcheck::wires::WireGraph;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StabilizerTableau {
    common::random_stabilizers(n, n, rng)
}

/// Output of a long random all-to-all Clifford circuit.
fn scrambled_state(n: usize, rng: &mut ChaCha8Rng) -> StabilizerTableau {
    let mut c = Circuit::new(n);
    for _ in 0..40 * n {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        c.gate([GateKind::H, GateKind::S][rng.gen_range(0..2)], &[a]).gate(GateKind::CX, &[a, b]);
    }
    let mut t = StabilizerTableau::zero_state(n);
    t.apply_circuit(&c).unwrap();
    t
}

fn random_connected_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut g = Graph::empty(n);
    for v in 1..n {
        g.add_edge(rng.gen_range(0..v), v);
    }
    for _ in 0..n / 2 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            g.add_edge(u, v);
        }
    }
    g
}

/// Measures `qubits` in Z on a copy of `sim` after `gates`.
fn sample_bits(sim: &StabilizerSim, c: &Circuit, qubits: &[usize], rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut s = sim.clone();
    s.apply_circuit(c).unwrap();
    qubits.iter().map(|&q| s.measure_z(q, rng).0).collect()
}

fn basis_circuit(n: usize, s: &SampledStabilizer) -> Circuit {
    let mut c = Circuit::new(n);
    for g in &s.basis {
        c.push(g.clone()).unwrap();
    }
    c
}

#[test]
fn samples_belong_to_the_group_and_repeat_per_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let t = random_state(7, &mut rng);
    let a = plan_fidelity(&t, 40, 9, false).unwrap();
    assert_eq!(a, plan_fidelity(&t, 40, 9, false).unwrap());
    assert_ne!(a, plan_fidelity(&t, 40, 10, false).unwrap());
    for s in &a.stabilizers {
        assert!(t.contains(&s.pauli));
        assert!(!s.pauli.is_scalar());
    }
    let json = serde_json::to_string(&a).unwrap();
    assert_eq!(serde_json::from_str::<stcheck::fidelity::FidelityPlan>(&json).unwrap(), a);
}

#[test]
fn basis_change_maps_to_z_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = random_state(6, &mut rng);
    for s in plan_fidelity(&t, 30, 1, false).unwrap().stabilizers {
        let mut p = s.pauli.clone();
        for g in &s.basis {
            stcheck::clifford::conjugate(&mut p, g, stcheck::clifford::Direction::Forward).unwrap();
        }
        assert!(p.x_bits().is_zero());
        assert_eq!(p.support(), s.support);
        assert_eq!(p.sign(), s.pauli.sign());
    }
}

#[test]
fn average_weight_is_three_quarters() {
    let n = 24;
    let t = scrambled_state(n, &mut ChaCha8Rng::seed_from_u64(8));
    let plan = plan_fidelity(&t, 4000, 3, false).unwrap();
    let w: Vec<f64> = plan.stabilizers.iter().map(|s| s.support.len() as f64).collect();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let sd = (w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt();
    let se = sd / (w.len() as f64).sqrt();
    assert!((mean - 0.75 * n as f64).abs() < 4.0 * se, "mean {mean} se {se}");
}

#[test]
fn readout_model_matches_odd_parity_sum() {
    for w in 0..=20usize {
        for &p in &[0.0f64, 0.003, 0.01, 0.07, 0.2, 0.5] {
            let mut odd = 0.0;
            let mut binom = 1.0f64;
            for k in 0..=w {
                if k > 0 {
                    binom = binom * (w - k + 1) as f64 / k as f64;
                }
                if k % 2 == 1 {
                    odd += binom * p.powi(k as i32) * (1.0 - p).powi((w - k) as i32);
                }
            }
            assert!((readout_fidelity_model(p, w).unwrap() - (1.0 - 2.0 * odd)).abs() < 1e-12);
        }
    }
}

#[test]
fn folding_preserves_parity_on_every_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 1..=6 {
        for trial in 0..6 {
            let g = if trial % 2 == 0 { Graph::path(n) } else { random_connected_graph(n, &mut rng) };
            let readout: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.05)).collect();
            let t = random_state(n, &mut rng);
            for k in 1..=n {
                let fold = plan_fold(&g, &readout, k).unwrap();
                assert!(fold.regions.iter().all(|r| !r.is_empty()));
                let mut covered: Vec<usize> = fold.regions.concat();
                covered.sort_unstable();
                assert_eq!(covered, (0..n).collect::<Vec<_>>());
                for s in plan_fidelity(&t, 8, rng.gen(), false).unwrap().stabilizers {
                    let folds = fold.schedule(&g, &s.support);
                    assert!(folds.len() <= k);
                    for f in &folds {
                        assert!(f.cnots.iter().all(|&[a, b]| g.has_edge(a, b)));
                    }
                    for x in 0..1u32 << n {
                        let mut bits: Vec<bool> = (0..n).map(|i| x >> i & 1 == 1).collect();
                        let full = s.support.iter().filter(|&&q| bits[q]).count() % 2;
                        for f in &folds {
                            apply_cnots(&mut bits, &f.cnots);
                        }
                        let roots = folds.iter().filter(|f| bits[f.root]).count() % 2;
                        assert_eq!(full, roots);
                    }
                }
            }
        }
    }
}

#[test]
fn folded_and_unfolded_shots_agree_noiselessly() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 2..=6 {
        let g = random_connected_graph(n, &mut rng);
        let readout: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.05)).collect();
        let t = random_state(n, &mut rng);
        let sim = StabilizerSim::from_tableau(&t);
        let fold = plan_fold(&g, &readout, 2.min(n)).unwrap();
        let all: Vec<usize> = (0..n).collect();
        for s in plan_fidelity(&t, 10, rng.gen(), false).unwrap().stabilizers {
            let (folded, roots) = fold.fold_circuit(&g, &Circuit::new(n), &s);
            let plain = basis_circuit(n, &s);
            for _ in 0..20 {
                let a = sample_bits(&sim, &plain, &all, &mut rng);
                let b = sample_bits(&sim, &folded, &roots, &mut rng);
                assert_eq!(shot_parity(&a, &s, &all).unwrap(), (1, false));
                assert_eq!(shot_parity(&b, &s, &roots).unwrap(), (1, false));
            }
        }
    }
}

#[test]
fn four_roots_span_sixteen_sectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let n = 20;
    let g = Graph::path(n);
    let readout: Vec<f64> = (0..n).map(|q| 0.005 + 0.002 * ((q * 7) % 11) as f64).collect();
    let fold = plan_fold(&g, &readout, 4).unwrap();
    assert_eq!(fold.roots.len(), 4);
    for (r, &root) in fold.regions.iter().zip(&fold.roots) {
        assert!(r.iter().all(|&q| readout[root] <= readout[q]));
    }
    let t = scrambled_state(n, &mut rng);
    let sim = StabilizerSim::from_tableau(&t);
    let plan = plan_fidelity(&t, 200, 5, false).unwrap();
    let s = plan
        .stabilizers
        .iter()
        .find(|s| fold.regions.iter().all(|r| r.iter().any(|q| s.support.contains(q))))
        .expect("a stabilizer touching every region");
    let (circuit, roots) = fold.fold_circuit(&g, &Circuit::new(n), s);
    assert_eq!(roots.len(), 4);
    let mut clean = HashSet::new();
    let mut noisy = HashSet::new();
    for _ in 0..600 {
        let bits = sample_bits(&sim, &circuit, &roots, &mut rng);
        assert_eq!(shot_parity(&bits, s, &roots).unwrap().0, 1);
        let flipped: Vec<bool> = bits.iter().map(|&b| b ^ rng.gen_bool(0.2)).collect();
        clean.insert(bits);
        noisy.insert(flipped);
    }
    // Noiseless shots fill the correct-parity half of the 2^4 sectors; readout flips reach the rest.
    assert_eq!(clean.len(), 8);
    assert_eq!(noisy.len(), 16);
}

#[test]
fn fold_gates_follow_every_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let (payload, dressed, s) = common::random_dressed(5, 30, 2, &mut rng);
    let mut out = s.clone();
    out.apply_circuit(&payload).unwrap();
    let g = Graph::path(5);
    let fold = plan_fold(&g, &[0.01; 5], 2).unwrap();
    let sampled = plan_fidelity(&out, 1, 1, false).unwrap().stabilizers.remove(0);
    let mut prefix = dressed.clone();
    let (folded, _) = fold.fold_circuit(&g, &prefix, &sampled.clone());
    prefix.n_qubits = folded.n_qubits;
    let first_fold = dressed.gates.len();
    assert!(folded.gates[first_fold..].iter().all(|gate| gate.qubits.iter().all(|&q| q < 5)));
    let wires = WireGraph::new(&folded);
    let detectors = DetectorSet::new(&folded, &[]);
    for cum in detectors.cumulants() {
        for i in cum.ops().support() {
            let producer = wires.producer(wires.wire_at(i));
            assert!(producer.is_none_or(|id| id < first_fold), "check covers a fold gate");
        }
    }
}

#[test]
fn depolarized_states_match_the_analytic_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(89);
    let n = 5;
    let (stabs, shots) = (8, 400);
    let mut misses = 0;
    for seed in 0..100u64 {
        let t = random_state(n, &mut rng);
        let sim = StabilizerSim::from_tableau(&t);
        let p = rng.gen_range(0.05..0.5);
        let all: Vec<usize> = (0..n).collect();
        let plan = plan_fidelity(&t, stabs, seed, false).unwrap();
        let mut shot_rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Vec<i8>> = plan
            .stabilizers
            .iter()
            .map(|s| {
                let basis = basis_circuit(n, s);
                (0..shots)
                    .map(|_| {
                        let bits = if shot_rng.gen_bool(p) {
                            (0..n).map(|_| shot_rng.gen()).collect()
                        } else {
                            sample_bits(&sim, &basis, &all, &mut shot_rng)
                        };
                        shot_parity(&bits, s, &all).unwrap().0
                    })
                    .collect()
            })
            .collect();
        let (f, se) = estimate_fidelity(&values).unwrap();
        if (f - (1.0 - p)).abs() > 3.0 * se {
            misses += 1;
        }
    }
    assert!(misses <= 3, "{misses} of 100 outside 3 SE");
}

#[test]
fn noise_sim_ler_predicts_measured_fidelity() {
    for seed in [144, 145] {
        let (predicted, measured, tol) = common::dfe_against_ler(seed, 20_000);
        assert!(predicted < 1.0, "noise should flip some stabilizers");
        assert!((predicted - measured).abs() < tol, "predicted {predicted} measured {measured} tol {tol}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_error_shrinks_with_shots(means in prop::collection::vec(-1.0f64..1.0, 1..6), k in 2usize..200) {
        let make = |shots: usize| -> Vec<Vec<i8>> {
            means.iter().map(|&m| {
                let plus = (((1.0 + m) / 2.0) * shots as f64).round() as usize;
                (0..shots).map(|i| if i < plus { 1 } else { -1 }).collect()
            }).collect()
        };
        // Squared SE minus the across-stabilizer part, which should vanish like 1/shots.
        let excess = |values: &[Vec<i8>]| {
            let (_, se) = estimate_fidelity(values).unwrap();
            let per: Vec<f64> = values.iter().map(|v| v.iter().map(|&x| f64::from(x)).sum::<f64>() / v.len() as f64).collect();
            let m = per.len() as f64;
            let mean = per.iter().sum::<f64>() / m;
            se * se - per.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m * m)
        };
        let small = excess(&make(k));
        let large = excess(&make(k * 100));
        prop_assert!(small >= -1e-12 && large >= -1e-12);
        prop_assert!(large <= small / 50.0 + 1e-12);
        prop_assert!(large * (k * 100) as f64 <= 1.0 / means.len() as f64 + 1e-9);
    }
}
