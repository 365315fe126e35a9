//! Valid-check synthesis by syndrome decoding over GF(2).
//!
//! A check is a set of `(Pauli, wire)` pairs whose back-propagators multiply to a phase times an
//! element of the input stabilizer group. Writing each back-propagator in its `(x | z)` encoding,
//! the valid checks on a support `L` are the left kernel of `B·N`, where `B` stacks the X and Z
//! back-propagators of every wire in `L` and `N` spans the nullspace of the stabilizer matrix.
//! Rotations add one column each, recording anticommutation with the rotation axis.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind};
use crate::gf2::{BitVec, Gf2Matrix};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::propagate::{back_propagator, sweep_back, PropagationError, RotationMode};
use crate::rng;
use crate::tableau::StabilizerTableau;
use crate::wires::{Wire, WireGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error("wire {0} is not in the support")]
    OutsideSupport(Wire),
    #[error("wire {0} appears twice in the partial check")]
    DuplicateWire(Wire),
    #[error("no restart of the decoder reached the target syndrome")]
    DecoderFailed,
    #[error("product of back-propagators is not in the stabilizer group")]
    InvalidCheck,
    #[error("rotation gate {gate} needs wire {wire} which is not accessible")]
    Inaccessible { gate: usize, wire: Wire },
    #[error("rotation gate {0} cannot be skipped: its adjacent wires are not both in the support")]
    NotRemovable(usize),
    #[error("dense verification limited to {limit} qubits, circuit has {got}")]
    TooLarge { limit: usize, got: usize },
    #[error("check insertion failed: {0}")]
    Insertion(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Member {
    #[serde(flatten)]
    pub wire: Wire,
    pub pauli: Pauli,
}

impl Member {
    pub fn new(pauli: Pauli, wire: Wire) -> Member {
        Member { wire, pauli }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Check {
    pub ancilla: Option<usize>,
    pub phase: Phase,
    pub members: Vec<Member>,
}

impl Default for Check {
    fn default() -> Self {
        Check::empty()
    }
}

impl Check {
    pub fn empty() -> Check {
        Check { ancilla: None, phase: Phase::ONE, members: Vec::new() }
    }

    /// Builds a check, multiplying Paulis that share a wire and dropping identities.
    pub fn from_members(members: impl IntoIterator<Item = Member>) -> Check {
        let mut map: BTreeMap<Wire, Pauli> = BTreeMap::new();
        for m in members {
            let e = map.entry(m.wire).or_insert(Pauli::I);
            *e = e.times(m.pauli);
        }
        let members = map.into_iter().filter(|(_, p)| *p != Pauli::I).map(|(w, p)| Member::new(p, w)).collect();
        Check { ancilla: None, phase: Phase::ONE, members }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.members.len()
    }

    pub fn pauli_at(&self, w: Wire) -> Pauli {
        self.members.iter().find(|m| m.wire == w).map_or(Pauli::I, |m| m.pauli)
    }

    /// Pointwise product (group law on checks).
    pub fn times(&self, other: &Check) -> Check {
        Check::from_members(self.members.iter().chain(&other.members).copied())
    }

    /// Members in the order their controlled gates are emitted.
    pub fn temporal(&self, wires: &WireGraph) -> Vec<Member> {
        let mut ms = self.members.clone();
        ms.sort_by_key(|m| wires.topo_key(m.wire));
        ms
    }
}

/// Which rotation columns the decoder enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RotationPolicy {
    #[default]
    Enforce,
    /// Drop columns of rotations whose adjacent wires are both accessible, then repair.
    SkipLocal,
}

/// A rotation gate with the wires on either side of it.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationSite {
    pub gate: usize,
    pub axis: Pauli,
    pub before: Wire,
    pub after: Wire,
    /// Back-propagator of the axis at `before`.
    pub back: PauliString,
}

/// Stacked decoding problem `x · (B·N | R) = (q·N | r)` over the free rows.
#[derive(Clone, Debug)]
pub struct DecodingInstance {
    pub row_index: Vec<(Pauli, Wire)>,
    pub parity: Gf2Matrix,
    pub nullspace: Gf2Matrix,
    pub rotation: Gf2Matrix,
    pub rotation_gates: Vec<usize>,
    pub syndrome_target: BitVec,
    pub rotation_target: BitVec,
}

impl DecodingInstance {
    /// Reduced syndrome matrix `(B·N | R)` and its target.
    pub fn system(&self) -> (Gf2Matrix, BitVec) {
        let bn = self.parity.mul(&self.nullspace);
        let m = bn.hstack(&self.rotation);
        let q = self.nullspace.left_mul(&self.syndrome_target).concat(&self.rotation_target);
        (m, q)
    }
}

/// Commutation constraints between support rows and rotations.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationConstraintTable {
    pub rows: Vec<(Pauli, Wire)>,
    pub rotation_gates: Vec<usize>,
    pub entries: Vec<BitVec>,
}

impl RotationConstraintTable {
    pub fn get(&self, p: Pauli, w: Wire, gate: usize) -> Option<bool> {
        let r = self.rows.iter().position(|&x| x == (p, w))?;
        let c = self.rotation_gates.iter().position(|&g| g == gate)?;
        Some(self.entries[r].get(c))
    }

    /// Column sums of the rows selected by a check; zero means compatible.
    pub fn column_sums(&self, ch: &Check) -> BitVec {
        let mut out = BitVec::zeros(self.rotation_gates.len());
        for m in &ch.members {
            if let Some(r) = self.rows.iter().position(|&x| x == (m.pauli, m.wire)) {
                out.xor_assign(&self.entries[r]);
            }
        }
        out
    }
}

/// Shared state for synthesizing checks on one circuit.
pub struct Synthesizer<'c> {
    circuit: &'c Circuit,
    wires: WireGraph,
    stabilizers: StabilizerTableau,
    nullspace: Gf2Matrix,
    rotations: Vec<RotationSite>,
    cache: RwLock<HashMap<Wire, [PauliString; 2]>>,
}

impl<'c> Synthesizer<'c> {
    /// Uses the circuit's own input stabilizers (none if absent).
    pub fn new(c: &'c Circuit) -> Synthesizer<'c> {
        let s = match &c.input_stabilizers {
            Some(g) => StabilizerTableau::new(c.n_qubits, g.clone()).expect("validated stabilizers"),
            None => StabilizerTableau::empty(c.n_qubits),
        };
        Self::with_stabilizers(c, s)
    }

    pub fn with_stabilizers(c: &'c Circuit, stabilizers: StabilizerTableau) -> Synthesizer<'c> {
        let wires = WireGraph::new(c);
        let nullspace = build_stabilizer_nullspace(&stabilizers);
        let rotations = c
            .gates
            .iter()
            .filter(|g| g.kind == GateKind::Rot)
            .map(|g| {
                let q = g.qubits[0];
                let before = wires.input_of(g.id, q);
                let axis = g.rotation.expect("rotation data").axis;
                let back = back_propagator(c, &wires, axis, before, RotationMode::Skeleton).expect("valid wire");
                RotationSite { gate: g.id, axis, before, after: wires.output_of(g.id, q), back }
            })
            .collect();
        Synthesizer { circuit: c, wires, stabilizers, nullspace, rotations, cache: RwLock::new(HashMap::new()) }
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    pub fn wires(&self) -> &WireGraph {
        &self.wires
    }

    pub fn stabilizers(&self) -> &StabilizerTableau {
        &self.stabilizers
    }

    pub fn rotations(&self) -> &[RotationSite] {
        &self.rotations
    }

    /// `2n × k` matrix whose columns span the nullspace of the stabilizer matrix.
    pub fn nullspace(&self) -> &Gf2Matrix {
        &self.nullspace
    }

    fn xz(&self, w: Wire) -> [PauliString; 2] {
        if let Some(v) = self.cache.read().expect("cache lock").get(&w) {
            return v.clone();
        }
        let c = self.circuit;
        let x = back_propagator(c, &self.wires, Pauli::X, w, RotationMode::Skeleton).expect("valid wire");
        let z = back_propagator(c, &self.wires, Pauli::Z, w, RotationMode::Skeleton).expect("valid wire");
        let v = [x, z];
        self.cache.write().expect("cache lock").insert(w, v.clone());
        v
    }

    /// Back-propagator of `p` at `w`, with rotations treated as identity.
    pub fn propagator(&self, p: Pauli, w: Wire) -> PauliString {
        let [x, z] = self.xz(w);
        match p {
            Pauli::I => PauliString::identity(self.circuit.n_qubits),
            Pauli::X => x,
            Pauli::Z => z,
            Pauli::Y => {
                let mut y = x.try_mul(&z).expect("same size");
                y.mul_phase(Phase::I);
                y
            }
        }
    }

    fn is_after(&self, site: &RotationSite, w: Wire) -> bool {
        self.wires.producer(w).is_some_and(|p| self.wires.gate_leq(site.gate, p))
    }

    fn rotation_bits(&self, p: Pauli, w: Wire, sites: &[&RotationSite]) -> BitVec {
        let b = self.propagator(p, w);
        BitVec::from_bools(&sites.iter().map(|s| self.is_after(s, w) && !b.commutes(&s.back)).collect::<Vec<_>>())
    }

    fn sites(&self, gates: Option<&[usize]>) -> Vec<&RotationSite> {
        match gates {
            None => self.rotations.iter().collect(),
            Some(gs) => self.rotations.iter().filter(|s| gs.contains(&s.gate)).collect(),
        }
    }

    /// `2|L| × 2n` matrix of X and Z back-propagators, phases dropped.
    pub fn parity_matrix(&self, support: &[Wire]) -> (Gf2Matrix, Vec<(Pauli, Wire)>) {
        let mut rows = Vec::with_capacity(2 * support.len());
        let mut index = Vec::with_capacity(2 * support.len());
        for &w in support {
            let [x, z] = self.xz(w);
            rows.push(x.symplectic());
            rows.push(z.symplectic());
            index.push((Pauli::X, w));
            index.push((Pauli::Z, w));
        }
        (Gf2Matrix::from_rows(2 * self.circuit.n_qubits, rows), index)
    }

    /// Rotation table for every Pauli on every support wire, excluding skipped rotations.
    pub fn rotation_table(&self, support: &[Wire], skip: &[usize]) -> Result<RotationConstraintTable, SynthesisError> {
        for &g in skip {
            let site = self.rotations.iter().find(|s| s.gate == g).ok_or(SynthesisError::NotRemovable(g))?;
            if !(support.contains(&site.before) && support.contains(&site.after)) {
                return Err(SynthesisError::NotRemovable(g));
            }
        }
        let sites: Vec<&RotationSite> = self.rotations.iter().filter(|s| !skip.contains(&s.gate)).collect();
        let mut rows = Vec::new();
        let mut entries = Vec::new();
        for &w in support {
            for p in Pauli::NONTRIVIAL {
                rows.push((p, w));
                entries.push(self.rotation_bits(p, w, &sites));
            }
        }
        Ok(RotationConstraintTable { rows, rotation_gates: sites.iter().map(|s| s.gate).collect(), entries })
    }

    fn check_partial(&self, support: &[Wire], partial: &[Member]) -> Result<(), SynthesisError> {
        for (i, m) in partial.iter().enumerate() {
            self.wires.check(m.wire).map_err(PropagationError::from)?;
            if !support.contains(&m.wire) {
                return Err(SynthesisError::OutsideSupport(m.wire));
            }
            if partial[..i].iter().any(|o| o.wire == m.wire) {
                return Err(SynthesisError::DuplicateWire(m.wire));
            }
        }
        Ok(())
    }

    /// Decoding instance on `support` with the members of `partial` forced.
    pub fn instance(
        &self,
        support: &[Wire],
        partial: &[Member],
        rotation_gates: Option<&[usize]>,
    ) -> Result<DecodingInstance, SynthesisError> {
        self.check_partial(support, partial)?;
        let free: Vec<Wire> = support.iter().copied().filter(|w| partial.iter().all(|m| m.wire != *w)).collect();
        let (parity, row_index) = self.parity_matrix(&free);
        let sites = self.sites(rotation_gates);
        let rot_rows = row_index.iter().map(|&(p, w)| self.rotation_bits(p, w, &sites)).collect();
        let rotation = Gf2Matrix::from_rows(sites.len(), rot_rows);
        let mut q = BitVec::zeros(2 * self.circuit.n_qubits);
        let mut r = BitVec::zeros(sites.len());
        for m in partial {
            q.xor_assign(&self.propagator(m.pauli, m.wire).symplectic());
            r.xor_assign(&self.rotation_bits(m.pauli, m.wire, &sites));
        }
        Ok(DecodingInstance {
            row_index,
            parity,
            nullspace: self.nullspace.clone(),
            rotation,
            rotation_gates: sites.iter().map(|s| s.gate).collect(),
            syndrome_target: q,
            rotation_target: r,
        })
    }

    fn removable(&self, support: &[Wire]) -> Vec<usize> {
        self.rotations
            .iter()
            .filter(|s| support.contains(&s.before) && support.contains(&s.after))
            .map(|s| s.gate)
            .collect()
    }

    /// Completes `partial` into a valid check supported on `support`.
    pub fn find_valid_check(
        &self,
        support: &[Wire],
        partial: &[Member],
        policy: RotationPolicy,
        seed: u64,
        restarts: usize,
    ) -> Result<Check, SynthesisError> {
        let enforced: Vec<usize> = match policy {
            RotationPolicy::Enforce => self.rotations.iter().map(|s| s.gate).collect(),
            RotationPolicy::SkipLocal => {
                let skip = self.removable(support);
                self.rotations.iter().map(|s| s.gate).filter(|g| !skip.contains(g)).collect()
            }
        };
        let inst = self.instance(support, partial, Some(&enforced))?;
        let (m, target) = inst.system();
        let rows = greedy_decode(&m, &target, seed, restarts).ok_or(SynthesisError::DecoderFailed)?;
        let chosen = rows.iter().map(|&i| Member::new(inst.row_index[i].0, inst.row_index[i].1));
        let mut ch = Check::from_members(partial.iter().copied().chain(chosen));
        if policy == RotationPolicy::SkipLocal {
            ch = self.fix_for_rotations(&ch, support)?;
        }
        ch.phase = self.check_phase(&ch)?;
        Ok(ch)
    }

    /// `2|L| − rank(B·N | R)` for the given enforced rotations (`None`: all).
    pub fn group_dimension(&self, support: &[Wire], rotation_gates: Option<&[usize]>) -> usize {
        let inst = self.instance(support, &[], rotation_gates).expect("no partial");
        let (m, _) = inst.system();
        2 * support.len() - m.rank()
    }

    /// Uniform element of the valid-check group; the flag is set when the group is trivial.
    pub fn sample_uniform(&self, support: &[Wire], rotation_gates: Option<&[usize]>, seed: u64) -> (Check, bool) {
        let inst = self.instance(support, &[], rotation_gates).expect("no partial");
        let (m, _) = inst.system();
        let kernel = m.left_nullspace();
        if kernel.nrows() == 0 {
            return (Check::empty(), true);
        }
        let mut rng = rng::stream(seed, 0);
        let mut x = BitVec::zeros(m.nrows());
        for v in kernel.rows() {
            if rng.gen::<bool>() {
                x.xor_assign(v);
            }
        }
        let mut ch = Check::from_members(x.iter_ones().map(|i| Member::new(inst.row_index[i].0, inst.row_index[i].1)));
        ch.phase = self.check_phase(&ch).expect("kernel element is valid");
        (ch, false)
    }

    /// Product of member back-propagators in emission order, latest on the left.
    pub fn product(&self, ch: &Check) -> PauliString {
        let mut prod = PauliString::identity(self.circuit.n_qubits);
        for m in ch.temporal(&self.wires) {
            prod.mul_assign_left(&self.propagator(m.pauli, m.wire));
        }
        prod
    }

    /// The scalar `λ` with `∏ B(P_i, w_i) = λ·s`, `s` in the stabilizer group.
    pub fn check_phase(&self, ch: &Check) -> Result<Phase, SynthesisError> {
        let prod = self.product(ch);
        self.stabilizers.decompose(&prod).map(|(_, l)| l).ok_or(SynthesisError::InvalidCheck)
    }

    /// Rotations the check fails to commute with.
    pub fn offending_rotations(&self, ch: &Check) -> Vec<&RotationSite> {
        self.rotations
            .iter()
            .filter(|s| {
                let mut odd = false;
                for m in &ch.members {
                    if self.is_after(s, m.wire) && !self.propagator(m.pauli, m.wire).commutes(&s.back) {
                        odd = !odd;
                    }
                }
                odd
            })
            .collect()
    }

    /// Makes the check commute with every rotation by adding `(V, w−)` and `(V, w+)` around
    /// each offending one.
    pub fn fix_for_rotations(&self, ch: &Check, accessible: &[Wire]) -> Result<Check, SynthesisError> {
        let offending: Vec<RotationSite> = self.offending_rotations(ch).into_iter().cloned().collect();
        if offending.is_empty() {
            return Ok(ch.clone());
        }
        let mut extra = Vec::new();
        for s in &offending {
            for w in [s.before, s.after] {
                if !accessible.contains(&w) {
                    return Err(SynthesisError::Inaccessible { gate: s.gate, wire: w });
                }
            }
            let v = Pauli::NONTRIVIAL.into_iter().find(|v| v.anticommutes(s.axis)).expect("some Pauli anticommutes");
            extra.push(Member::new(v, s.before));
            extra.push(Member::new(v, s.after));
        }
        let mut fixed = Check::from_members(ch.members.iter().copied().chain(extra));
        fixed.ancilla = ch.ancilla;
        fixed.phase = self.check_phase(&fixed)?;
        debug_assert!(self.offending_rotations(&fixed).is_empty());
        Ok(fixed)
    }
}

/// Columns spanning `{v : T·v = 0}` for the stacked generator encodings `T`.
pub fn build_stabilizer_nullspace(s: &StabilizerTableau) -> Gf2Matrix {
    s.check_matrix().nullspace().transpose()
}

/// Randomized greedy decoder: returns row indices `x` with `x · m = target`, or `None`.
///
/// Each restart permutes the rows, brings the matrix to reduced column echelon form (replaying
/// the column operations on the target) and then repeatedly adds the row closest to the
/// remaining syndrome while that strictly lowers its weight. The lowest-weight solution wins;
/// ties go to the lexicographically smallest index set, so the output is independent of
/// scheduling.
pub fn greedy_decode(m: &Gf2Matrix, target: &BitVec, seed: u64, restarts: usize) -> Option<Vec<usize>> {
    if target.is_zero() {
        return Some(Vec::new());
    }
    let best = (0..restarts.max(1) as u64)
        .into_par_iter()
        .filter_map(|r| greedy_once(m, target, &mut rng::stream(seed, r)))
        .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    if let Some(sol) = &best {
        let x = BitVec::from_indices(m.nrows(), sol.iter().copied());
        assert_eq!(m.left_mul(&x), *target, "decoder produced an invalid solution");
    }
    best
}

fn greedy_once(m: &Gf2Matrix, target: &BitVec, rng: &mut impl Rng) -> Option<Vec<usize>> {
    let mut perm: Vec<usize> = (0..m.nrows()).collect();
    for i in (1..perm.len()).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let (echelon, mut q) = m.select_rows(&perm).col_echelon(target);
    let mut chosen = vec![false; perm.len()];
    while !q.is_zero() {
        let current = q.weight();
        let (i, w) = echelon
            .rows()
            .iter()
            .enumerate()
            .map(|(i, row)| (i, row.xor_weight(&q)))
            .min_by_key(|&(i, w)| (w, i))?;
        if w >= current {
            return None;
        }
        q.xor_assign(echelon.row(i));
        chosen[i] = !chosen[i];
    }
    let mut rows: Vec<usize> = chosen.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| perm[i]).collect();
    rows.sort_unstable();
    Some(rows)
}

pub fn build_parity_matrix(c: &Circuit, support: &[Wire]) -> (Gf2Matrix, Vec<(Pauli, Wire)>) {
    Synthesizer::new(c).parity_matrix(support)
}

pub fn find_valid_check(
    c: &Circuit,
    support: &[Wire],
    partial: &[Member],
    policy: RotationPolicy,
    seed: u64,
) -> Result<Check, SynthesisError> {
    Synthesizer::new(c).find_valid_check(support, partial, policy, seed, 50)
}

pub fn check_group_dimension(c: &Circuit, support: &[Wire], rotation_gates: Option<&[usize]>) -> usize {
    Synthesizer::new(c).group_dimension(support, rotation_gates)
}

pub fn compute_check_phase(c: &Circuit, ch: &Check) -> Result<Phase, SynthesisError> {
    Synthesizer::new(c).check_phase(ch)
}

/// Decides whether implementing `ch` on a state stabilized by `s` gives a deterministic ancilla.
///
/// Clifford circuits are decided exactly in the Heisenberg picture; circuits with rotations use
/// a dense simulation of a random code state.
pub fn verify_check(c: &Circuit, ch: &Check, s: &StabilizerTableau) -> Result<bool, SynthesisError> {
    let syn = Synthesizer::with_stabilizers(c, s.clone());
    if syn.check_phase(ch).is_err() {
        return Ok(false);
    }
    let dressed =
        crate::insertion::implement_with(&syn, ch, c.n_qubits).map_err(|e| SynthesisError::Insertion(e.to_string()))?;
    if c.is_clifford() {
        return Ok(ancillas_deterministic(&dressed, s));
    }
    const LIMIT: usize = 12;
    if dressed.n_qubits > LIMIT {
        return Err(SynthesisError::TooLarge { limit: LIMIT, got: dressed.n_qubits });
    }
    let mut psi = random_code_state(s, dressed.n_qubits, 0x5eed);
    psi.apply_circuit(&dressed);
    Ok(dressed.ancillas.iter().all(|&a| psi.prob_one(a) < 1e-9))
}

/// Every ancilla's measured Z, pulled to the input, lies in `+⟨S, Z_ancillas⟩`.
pub fn ancillas_deterministic(dressed: &Circuit, s: &StabilizerTableau) -> bool {
    let wires = WireGraph::new(dressed);
    let n = dressed.n_qubits;
    let mut gens: Vec<PauliString> = s.generators().iter().map(|g| g.extended(n)).collect();
    for q in s.num_qubits()..n {
        gens.push(PauliString::single(n, q, Pauli::Z));
    }
    let group = StabilizerTableau::new(n, gens).expect("independent generators");
    dressed.ancillas.iter().all(|&a| {
        let op = PauliString::single(n, a, Pauli::Z);
        let start = dressed.gates.len().checked_sub(1);
        match sweep_back(dressed, &wires, op, start, RotationMode::Reject, false) {
            Ok((back, _)) => group.contains(&back),
            Err(_) => false,
        }
    })
}

/// Random state in the joint +1 eigenspace of `s`, extended by `|0⟩` on qubits beyond `s`.
pub fn random_code_state(s: &StabilizerTableau, total: usize, seed: u64) -> crate::dense::StateVector {
    use num_complex::Complex64;
    let mut rng = rng::stream(seed, 0);
    let k = s.num_qubits();
    let amps: Vec<Complex64> = (0..1usize << total)
        .map(|i| if i >> k == 0 { Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) } else { Complex64::new(0.0, 0.0) })
        .collect();
    let mut psi = crate::dense::StateVector::from_amplitudes(amps);
    for g in s.generators() {
        let mut t = psi.clone();
        t.apply_pauli(&g.extended(total));
        let amps = psi.amplitudes().iter().zip(t.amplitudes()).map(|(a, b)| (a + b) * 0.5).collect();
        psi = crate::dense::StateVector::from_amplitudes(amps);
    }
    let norm = psi.inner(&psi).re.sqrt();
    crate::dense::StateVector::from_amplitudes(psi.amplitudes().iter().map(|a| a / norm).collect())
}
