//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use rand::Rng;
use stcheck::circuit::{Circuit, GateKind};
use stcheck::clifford::{conjugate, Direction};
use stcheck::pauli::{Pauli, PauliString};
use stcheck::propagate::{back_propagator, RotationMode};
use stcheck::synthesis::{Check, Member};
use stcheck::tableau::StabilizerTableau;
use stcheck::wires::{Wire, WireGraph};

/// Random circuit over H, S, SX, CX, CZ with `rotations` random-axis rotations mixed in.
pub fn random_circuit(n: usize, m: usize, rotations: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    let mut rot_at: Vec<usize> = (0..rotations).map(|_| rng.gen_range(0..=m)).collect();
    rot_at.sort_unstable();
    let mut r = 0;
    for i in 0..=m {
        while r < rot_at.len() && rot_at[r] == i {
            let axis = Pauli::NONTRIVIAL[rng.gen_range(0..3)];
            c.rot(axis, rng.gen_range(0.1..3.0), rng.gen_range(0..n));
            r += 1;
        }
        if i == m {
            break;
        }
        if n > 1 && rng.gen_bool(0.4) {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let kind = if rng.gen() { GateKind::CX } else { GateKind::CZ };
            c.gate(kind, &[a, b]);
        } else {
            let kind = [GateKind::H, GateKind::S, GateKind::SX][rng.gen_range(0..3)];
            c.gate(kind, &[rng.gen_range(0..n)]);
        }
    }
    c
}

/// `k` independent commuting generators: Z on the first `k` qubits scrambled by a random Clifford.
pub fn random_stabilizers(n: usize, k: usize, rng: &mut impl Rng) -> StabilizerTableau {
    let gens = (0..k).map(|q| PauliString::single(n, q, Pauli::Z)).collect();
    let mut t = StabilizerTableau::new(n, gens).unwrap();
    t.apply_circuit(&random_circuit(n, 4 * n, 0, rng)).unwrap();
    t
}

/// Every element of the group, phases dropped.
pub fn group_elements(s: &StabilizerTableau) -> Vec<PauliString> {
    let g = s.generators();
    (0..1usize << g.len())
        .map(|mask| {
            let mut p = PauliString::identity(s.num_qubits());
            for (i, gen) in g.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p.mul_assign_right(gen);
                }
            }
            p.with_phase(stcheck::pauli::Phase::ONE)
        })
        .collect()
}

/// Parity of anticommutations with each rotation, evaluated on the slice right after it.
pub fn rotation_parities(c: &Circuit, members: &[Member]) -> Vec<bool> {
    let wires = WireGraph::new(c);
    c.gates
        .iter()
        .filter(|g| g.kind == GateKind::Rot)
        .map(|rot| {
            let axis = rot.rotation.unwrap().axis;
            let mut odd = false;
            for m in members {
                let Some(prod) = wires.producer(m.wire) else { continue };
                if prod < rot.id {
                    continue;
                }
                let mut op = PauliString::single(c.n_qubits, m.wire.qubit, m.pauli);
                for g in c.gates[rot.id + 1..=prod].iter().rev() {
                    if g.kind != GateKind::Rot {
                        conjugate(&mut op, g, Direction::Backward).unwrap();
                    }
                }
                odd ^= op.get(rot.qubits[0]).anticommutes(axis);
            }
            odd
        })
        .collect()
}

/// All assignments of `{I,X,Y,Z}` to `support` forming valid checks, optionally also commuting
/// with every rotation.
pub fn brute_force_checks(c: &Circuit, support: &[Wire], s: &StabilizerTableau, rotations: bool) -> Vec<Check> {
    let wires = WireGraph::new(c);
    let group: std::collections::HashSet<_> = group_elements(s).iter().map(|p| p.symplectic()).collect();
    let props: Vec<[PauliString; 3]> = support
        .iter()
        .map(|&w| Pauli::NONTRIVIAL.map(|p| back_propagator(c, &wires, p, w, RotationMode::Skeleton).unwrap()))
        .collect();
    let mut out = Vec::new();
    for code in 0..4usize.pow(support.len() as u32) {
        let mut prod = PauliString::identity(c.n_qubits);
        let mut members = Vec::new();
        let mut x = code;
        for (i, &w) in support.iter().enumerate() {
            let d = x % 4;
            x /= 4;
            if d > 0 {
                prod.mul_assign_right(&props[i][d - 1]);
                members.push(Member::new(Pauli::NONTRIVIAL[d - 1], w));
            }
        }
        if !group.contains(&prod.symplectic()) {
            continue;
        }
        if rotations && rotation_parities(c, &members).iter().any(|&b| b) {
            continue;
        }
        out.push(Check::from_members(members));
    }
    out
}

/// `k` distinct wires of `c` in topological order.
pub fn random_support(c: &Circuit, k: usize, rng: &mut impl Rng) -> Vec<Wire> {
    let wires = WireGraph::new(c);
    let mut all: Vec<Wire> = wires.wires().collect();
    for i in (1..all.len()).rev() {
        all.swap(i, rng.gen_range(0..=i));
    }
    all.truncate(k.min(all.len()));
    all.sort_by_key(|&w| wires.topo_key(w));
    all
}

/// Random full-rank stabilizer payload with `k` valid checks attached on fresh ancillas.
pub fn random_dressed(
    n: usize,
    gates: usize,
    k: usize,
    rng: &mut impl Rng,
) -> (Circuit, Circuit, StabilizerTableau) {
    use stcheck::insertion::{insert_checks, PlacedCheck, Routing};
    use stcheck::synthesis::Synthesizer;
    let mut payload = random_circuit(n, gates, 0, rng);
    let s = random_stabilizers(n, n, rng);
    payload.set_stabilizers(s.generators().to_vec()).unwrap();
    let syn = Synthesizer::with_stabilizers(&payload, s.clone());
    let all: Vec<Wire> = WireGraph::new(&payload).wires().collect();
    let placed: Vec<PlacedCheck> = (0..k)
        .map(|j| {
            let support = random_support(&payload, rng.gen_range(2..=all.len().min(8)), rng);
            let (check, _) = syn.sample_uniform(&support, None, rng.gen());
            PlacedCheck { path: 0, position: j, check }
        })
        .collect();
    let plan = insert_checks(&syn, None, &placed, Routing::HalfSwap).unwrap();
    (payload, plan.circuit, s)
}

/// `(trigger bits, logical flag)` of a single Pauli injected on `w`, by stabilizer simulation.
pub fn tableau_injection(
    payload: &Circuit,
    dressed: &Circuit,
    s: &StabilizerTableau,
    w: Wire,
    p: Pauli,
) -> (Vec<bool>, bool) {
    use stcheck::tableau::StabilizerSim;
    let n = payload.n_qubits;
    let total = dressed.n_qubits;
    let wires = WireGraph::new(dressed);
    let input = StabilizerTableau::new(total, dressed.input_stabilizers.clone().unwrap()).unwrap();
    let mut sim = StabilizerSim::from_tableau(&input);
    let inject_after = wires.producer(w);
    let err = PauliString::single(total, w.qubit, p);
    let mut frame = err.clone();
    if inject_after.is_none() {
        sim.apply_pauli(&err);
    }
    for g in &dressed.gates {
        sim.apply_gate(g).unwrap();
        if inject_after == Some(g.id) {
            sim.apply_pauli(&err);
        }
        if inject_after.is_some_and(|a| g.id > a) {
            conjugate(&mut frame, g, Direction::Forward).unwrap();
        }
    }
    if inject_after.is_none() {
        frame = err.clone();
        for g in &dressed.gates {
            conjugate(&mut frame, g, Direction::Forward).unwrap();
        }
    }
    let triggers = dressed
        .ancillas
        .iter()
        .map(|&a| sim.expectation(&PauliString::single(total, a, Pauli::Z)).expect("deterministic ancilla") == -1)
        .collect();
    let mut out = s.clone();
    out.apply_circuit(payload).unwrap();
    let logical = !out.contains_up_to_phase(&frame.truncated(n));
    (triggers, logical)
}

/// Fidelity of a noisy dressed circuit two ways: `1 − 2·LER` from detector cumulants, and DFE on
/// shots from a tableau simulation with the sampled faults injected at their wires.
/// Returns `(predicted, measured, 3σ tolerance)`.
pub fn dfe_against_ler(seed: u64, shots: usize) -> (f64, f64, f64) {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use stcheck::fidelity::{estimate_fidelity, ler_to_fidelity, plan_fidelity, shot_parity, SampledStabilizer};
    use stcheck::noise::{logical_flip_rates, sample_error, DetectorSet, NoiseModel, NoiseParams};
    use stcheck::tableau::StabilizerSim;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (payload, dressed, s) = random_dressed(4, 24, 2, &mut rng);
    let n = payload.n_qubits;
    let mut out = s.clone();
    out.apply_circuit(&payload).unwrap();
    let plan = plan_fidelity(&out, 6, seed, false).unwrap();
    let logicals: Vec<PauliString> = plan.stabilizers.iter().map(|s| s.pauli.clone()).collect();
    let model = NoiseModel::for_circuit(&dressed, &NoiseParams { eps: 0.01, coherence: None, ..Default::default() }).unwrap();
    let detectors = DetectorSet::new(&dressed, &logicals);
    let (accepted, rates) = logical_flip_rates(&model, &detectors, shots, seed);
    let predicted = rates.iter().map(|&r| ler_to_fidelity(r).unwrap()).sum::<f64>() / rates.len() as f64;
    let se_pred = rates.iter().map(|r| 4.0 * r * (1.0 - r) / accepted as f64).sum::<f64>().sqrt() / rates.len() as f64;

    let total = dressed.n_qubits;
    let wires = WireGraph::new(&dressed);
    let input = StabilizerTableau::new(total, dressed.input_stabilizers.clone().unwrap()).unwrap();
    let data: Vec<usize> = (0..n).collect();
    let bases: Vec<Circuit> = plan
        .stabilizers
        .iter()
        .map(|st| {
            let mut c = Circuit::new(total);
            for g in SampledStabilizer::new(st.pauli.extended(total)).basis {
                c.push(g).unwrap();
            }
            c
        })
        .collect();
    let mut values = vec![Vec::new(); plan.stabilizers.len()];
    let mut shot_rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    for _ in 0..shots {
        let e = sample_error(&model, &wires, &mut shot_rng);
        let mut sim = StabilizerSim::from_tableau(&input);
        let inject = |sim: &mut StabilizerSim, q: usize, slot: usize| {
            for &(w, p) in e.errors.iter().filter(|(w, _)| w.qubit == q && w.slot == slot) {
                sim.apply_pauli(&PauliString::single(total, w.qubit, p));
            }
        };
        for q in 0..total {
            inject(&mut sim, q, 0);
        }
        let mut slot = vec![0usize; total];
        for gate in &dressed.gates {
            sim.apply_gate(gate).unwrap();
            for &q in &gate.qubits {
                slot[q] += 1;
                inject(&mut sim, q, slot[q]);
            }
        }
        let rejected = dressed.ancillas.iter().any(|&a| sim.measure(&PauliString::single(total, a, Pauli::Z), &mut shot_rng).0);
        if rejected {
            continue;
        }
        for (j, st) in plan.stabilizers.iter().enumerate() {
            let mut copy = sim.clone();
            copy.apply_circuit(&bases[j]).unwrap();
            let bits: Vec<bool> = data.iter().map(|&q| copy.measure_z(q, &mut shot_rng).0).collect();
            values[j].push(shot_parity(&bits, st, &data).unwrap().0);
        }
    }
    let (measured, se_meas) = estimate_fidelity(&values).unwrap();
    // The sample of stabilizers is shared, so only the shot noise separates the two numbers.
    let se_shot = values
        .iter()
        .map(|v| {
            let k = v.len() as f64;
            let m = v.iter().map(|&x| f64::from(x)).sum::<f64>() / k;
            (1.0 - m * m) / k
        })
        .sum::<f64>()
        .sqrt()
        / values.len() as f64;
    assert!(se_meas >= se_shot - 1e-15);
    (predicted, measured, 3.0 * se_pred.hypot(se_shot))
}
