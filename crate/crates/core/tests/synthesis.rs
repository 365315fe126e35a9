mod common;

use common::{brute_force_checks, random_circuit, random_stabilizers, random_support, rotation_parities};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcheck::circuit::{Circuit, GateKind};
use stcheck::gf2::{BitVec, Gf2Matrix};
use stcheck::pauli::{Pauli, Phase};
use stcheck::synthesis::{greedy_decode, verify_check, Check, Member, RotationPolicy, Synthesizer};
use stcheck::tableau::StabilizerTableau;
use stcheck::wires::{Wire, WireGraph};

fn w(q: usize, s: usize) -> Wire {
    Wire::new(q, s)
}

#[test]
fn group_size_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..60 {
        let n = rng.gen_range(1..=5);
        let rotations = trial % 4;
        let c = random_circuit(n, rng.gen_range(2..12), rotations, &mut rng);
        let k = rng.gen_range(0..=n);
        let s = random_stabilizers(n, k, &mut rng);
        let support = random_support(&c, rng.gen_range(1..=6), &mut rng);
        let syn = Synthesizer::with_stabilizers(&c, s.clone());
        let dim = syn.group_dimension(&support, None);
        let found = brute_force_checks(&c, &support, &s, true);
        assert_eq!(found.len(), 1 << dim, "trial {trial}");
        let clifford_dim = syn.group_dimension(&support, Some(&[]));
        assert_eq!(brute_force_checks(&c, &support, &s, false).len(), 1 << clifford_dim, "trial {trial}");
    }
}

#[test]
fn planted_instances_decode_to_low_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut good = 0;
    let mut optimal = 0;
    for i in 0..1000u64 {
        let rows = (0..12).map(|_| BitVec::from_bools(&(0..8).map(|_| rng.gen()).collect::<Vec<_>>())).collect();
        let m = Gf2Matrix::from_rows(8, rows);
        let mut planted = Vec::new();
        while planted.len() < 3 {
            let r = rng.gen_range(0..12);
            if !planted.contains(&r) {
                planted.push(r);
            }
        }
        let target = m.left_mul(&BitVec::from_indices(12, planted));
        let sol = greedy_decode(&m, &target, i, 50).expect("planted solution exists");
        assert_eq!(m.left_mul(&BitVec::from_indices(12, sol.iter().copied())), target);
        let min = (0u32..1 << 12)
            .filter(|&mask| m.left_mul(&BitVec::from_indices(12, (0..12).filter(|b| mask >> b & 1 == 1))) == target)
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap();
        good += usize::from(sol.len() <= 5);
        optimal += usize::from(sol.len() == min);
        assert!(sol.len() >= min);
    }
    assert!(good >= 900, "{good}/1000 at weight ≤ 5");
    assert!(optimal >= 500, "{optimal}/1000 optimal");
}

fn rotation_figure() -> Circuit {
    let mut c = Circuit::new(2);
    c.gate(GateKind::CX, &[0, 1])
        .rot(Pauli::X, 0.7, 0)
        .rot(Pauli::Z, 0.7, 1)
        .gate(GateKind::SX, &[1])
        .gate(GateKind::CX, &[0, 1]);
    c
}

#[test]
fn rotation_table_of_the_two_rotation_example() {
    let c = rotation_figure();
    let syn = Synthesizer::new(&c);
    let support = [w(0, 0), w(0, 3), w(1, 4)];
    let table = syn.rotation_table(&support, &[]).unwrap();
    let expected = [
        (Pauli::X, w(0, 3), [false, true]),
        (Pauli::Y, w(0, 3), [true, true]),
        (Pauli::Z, w(0, 3), [true, false]),
        (Pauli::X, w(1, 4), [false, true]),
        (Pauli::Y, w(1, 4), [true, false]),
        (Pauli::Z, w(1, 4), [true, true]),
    ];
    for (p, wire, row) in expected {
        assert_eq!(table.get(p, wire, 1), Some(row[0]), "{p} {wire} first rotation");
        assert_eq!(table.get(p, wire, 2), Some(row[1]), "{p} {wire} second rotation");
    }
    for p in Pauli::NONTRIVIAL {
        assert_eq!(table.get(p, w(0, 0), 1), Some(false));
        assert_eq!(table.get(p, w(0, 0), 2), Some(false));
    }
    let half = Check::from_members([Member::new(Pauli::Y, w(0, 3)), Member::new(Pauli::Z, w(1, 4))]);
    assert!(table.column_sums(&half).is_zero());
    assert_eq!(rotation_parities(&c, &half.members), vec![false, false]);
}

#[test]
fn skip_requires_both_neighbours_in_support() {
    let c = rotation_figure();
    let syn = Synthesizer::new(&c);
    assert!(syn.rotation_table(&[w(0, 1), w(0, 2)], &[1]).is_ok());
    assert!(syn.rotation_table(&[w(0, 1)], &[1]).is_err());
}

#[test]
fn uniform_sampling_frequencies() {
    let mut c = Circuit::new(1);
    c.gate(GateKind::X, &[0]);
    let syn = Synthesizer::new(&c);
    let support = [w(0, 0), w(0, 1)];
    let group = brute_force_checks(&c, &support, &StabilizerTableau::empty(1), true);
    assert_eq!(group.len(), 4);
    let mut counts = vec![0usize; 4];
    let draws = 4000;
    for seed in 0..draws {
        let (mut ch, flagged) = syn.sample_uniform(&support, None, seed);
        assert!(!flagged);
        ch.phase = Phase::ONE;
        let idx = group.iter().position(|g| g.members == ch.members).expect("sample in group");
        counts[idx] += 1;
    }
    let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
    for k in counts {
        assert!((k as f64 - draws as f64 / 4.0).abs() < 4.0 * sigma, "{k}");
    }
}

#[test]
fn trivial_group_is_flagged() {
    let c = Circuit::new(2);
    let syn = Synthesizer::new(&c);
    let (ch, flagged) = syn.sample_uniform(&[w(0, 0)], None, 1);
    assert!(flagged && ch.is_empty());
}

#[test]
fn sampled_checks_verify_and_compose() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..40 {
        let n = rng.gen_range(1..=4);
        let c = random_circuit(n, 10, 0, &mut rng);
        let s = random_stabilizers(n, rng.gen_range(0..=n), &mut rng);
        let syn = Synthesizer::with_stabilizers(&c, s.clone());
        let support: Vec<Wire> = WireGraph::new(&c).wires().collect();
        let (a, _) = syn.sample_uniform(&support, None, trial);
        let (b, _) = syn.sample_uniform(&support, None, trial + 1000);
        assert!(verify_check(&c, &a, &s).unwrap(), "trial {trial}");
        assert!(verify_check(&c, &a.times(&b), &s).unwrap(), "trial {trial}");
    }
}

#[test]
fn corrupted_checks_fail() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rejected = 0;
    let mut total = 0;
    for trial in 0..40 {
        let c = random_circuit(3, 12, 0, &mut rng);
        let s = StabilizerTableau::empty(3);
        let syn = Synthesizer::with_stabilizers(&c, s.clone());
        let support: Vec<Wire> = WireGraph::new(&c).wires().collect();
        let (ch, _) = syn.sample_uniform(&support, None, trial);
        let Some(i) = ch.members.iter().position(|m| m.pauli == Pauli::X) else { continue };
        let mut bad = ch.clone();
        bad.members[i].pauli = Pauli::Y;
        total += 1;
        rejected += usize::from(!verify_check(&c, &bad, &s).unwrap());
    }
    assert!(total > 10);
    assert_eq!(rejected, total);
}

#[test]
fn completion_respects_partial() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..30 {
        let c = random_circuit(4, 16, 0, &mut rng);
        let syn = Synthesizer::with_stabilizers(&c, StabilizerTableau::zero_state(4));
        let support: Vec<Wire> = WireGraph::new(&c).wires().collect();
        let partial = [Member::new(Pauli::X, support[support.len() - 1])];
        if let Ok(ch) = syn.find_valid_check(&support, &partial, RotationPolicy::Enforce, trial, 20) {
            assert_eq!(ch.pauli_at(partial[0].wire), Pauli::X);
            assert!(verify_check(&c, &ch, &StabilizerTableau::zero_state(4)).unwrap());
        }
    }
}

#[test]
fn enforced_checks_commute_with_rotations_for_any_angle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut verified = 0;
    for trial in 0..25 {
        let n = rng.gen_range(2..=4);
        let c = random_circuit(n, 10, rng.gen_range(1..=3), &mut rng);
        let s = StabilizerTableau::zero_state(n);
        let syn = Synthesizer::with_stabilizers(&c, s.clone());
        let support: Vec<Wire> = WireGraph::new(&c).wires().collect();
        let (ch, flagged) = syn.sample_uniform(&support, None, trial);
        if flagged {
            continue;
        }
        assert!(syn.offending_rotations(&ch).is_empty());
        assert!(verify_check(&c, &ch, &s).unwrap(), "trial {trial}");
        verified += 1;
    }
    assert!(verified > 10);
}

#[test]
fn rotation_repair_single_rz() {
    let mut c = Circuit::new(1);
    c.gate(GateKind::H, &[0]).rot(Pauli::Z, 1.234, 0).gate(GateKind::H, &[0]);
    let syn = Synthesizer::new(&c);
    let broken = Check::from_members([Member::new(Pauli::Z, w(0, 0)), Member::new(Pauli::Z, w(0, 3))]);
    let empty = StabilizerTableau::empty(1);
    assert_eq!(syn.offending_rotations(&broken).len(), 1);
    assert!(!verify_check(&c, &broken, &empty).unwrap());
    let all: Vec<Wire> = (0..4).map(|s| w(0, s)).collect();
    let fixed = syn.fix_for_rotations(&broken, &all).unwrap();
    assert_eq!(fixed.pauli_at(w(0, 1)), Pauli::X);
    assert_eq!(fixed.pauli_at(w(0, 2)), Pauli::X);
    assert!(verify_check(&c, &fixed, &empty).unwrap());
    assert!(syn.fix_for_rotations(&broken, &[w(0, 0), w(0, 3)]).is_err());
    let compatible = syn.fix_for_rotations(&fixed, &all).unwrap();
    assert_eq!(compatible.members, fixed.members);
}

#[test]
fn skip_local_policy_repairs_afterwards() {
    let mut c = Circuit::new(1);
    c.gate(GateKind::H, &[0]).rot(Pauli::Z, 0.4, 0).gate(GateKind::H, &[0]);
    let syn = Synthesizer::new(&c);
    let all: Vec<Wire> = (0..4).map(|s| w(0, s)).collect();
    let partial = [Member::new(Pauli::Z, w(0, 0))];
    let ch = syn.find_valid_check(&all, &partial, RotationPolicy::SkipLocal, 3, 20).unwrap();
    assert!(syn.offending_rotations(&ch).is_empty());
    assert!(verify_check(&c, &ch, &StabilizerTableau::empty(1)).unwrap());
}

#[test]
fn yhy_check_is_deterministic() {
    let mut c = Circuit::new(1);
    c.gate(GateKind::H, &[0]);
    let ch = Check::from_members([Member::new(Pauli::Y, w(0, 0)), Member::new(Pauli::Y, w(0, 1))]);
    assert!(verify_check(&c, &ch, &StabilizerTableau::empty(1)).unwrap());
    assert!(verify_check(&c, &Check::empty(), &StabilizerTableau::empty(1)).unwrap());
}

#[test]
fn rotations_shrink_group_on_brickwork() {
    let base = stcheck::circuit::generate_brickwork(10, 20, 4);
    let mut c = Circuit::new(10);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for g in &base.gates {
        c.push(g.clone()).unwrap();
        if g.id % 11 == 5 && c.rotation_count() < 20 {
            c.rot(Pauli::Z, rng.gen_range(0.1..1.0), g.qubits[0]);
        }
    }
    assert_eq!(c.rotation_count(), 20);
    let wires = WireGraph::new(&c);
    let support: Vec<Wire> = wires.wires().filter(|w| (4..=5).contains(&w.qubit)).collect();
    let syn = Synthesizer::with_stabilizers(&c, StabilizerTableau::zero_state(10));
    let gates: Vec<usize> = syn.rotations().iter().map(|r| r.gate).collect();
    let dims: Vec<usize> = (0..=20).map(|k| syn.group_dimension(&support, Some(&gates[..k]))).collect();
    for pair in dims.windows(2) {
        assert!(pair[1] <= pair[0] && pair[0] <= pair[1] + 1, "{dims:?}");
    }
    assert!(dims[20] < dims[0], "{dims:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dimension_monotone_in_support(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(n, 10, 0, &mut rng);
        let s = random_stabilizers(n, rng.gen_range(0..=n), &mut rng);
        let syn = Synthesizer::with_stabilizers(&c, s);
        let support = random_support(&c, 6, &mut rng);
        let mut prev = 0;
        for k in 0..=support.len() {
            let d = syn.group_dimension(&support[..k], None);
            prop_assert!(d >= prev && d <= prev + 2);
            prev = d;
        }
    }

    #[test]
    fn each_rotation_costs_at_most_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(3, 12, 4, &mut rng);
        let syn = Synthesizer::new(&c);
        let support: Vec<Wire> = WireGraph::new(&c).wires().collect();
        let gates: Vec<usize> = syn.rotations().iter().map(|r| r.gate).collect();
        let mut prev = syn.group_dimension(&support, Some(&[]));
        for k in 1..=gates.len() {
            let d = syn.group_dimension(&support, Some(&gates[..k]));
            prop_assert!(d <= prev && d + 1 >= prev);
            prev = d;
        }
    }

    #[test]
    fn decoder_output_is_exact(seed in any::<u64>(), rows in 1usize..20, cols in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = Gf2Matrix::from_rows(cols, (0..rows).map(|_| BitVec::from_bools(&(0..cols).map(|_| rng.gen()).collect::<Vec<_>>())).collect());
        let x = BitVec::from_bools(&(0..rows).map(|_| rng.gen()).collect::<Vec<_>>());
        let t = m.left_mul(&x);
        if let Some(sol) = greedy_decode(&m, &t, seed, 5) {
            prop_assert_eq!(m.left_mul(&BitVec::from_indices(rows, sol)), t);
        }
    }
}
