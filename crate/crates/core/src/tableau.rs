//! Stabilizer groups and an exact stabilizer-state simulator with destabilizers.

use rand::Rng;

use crate::circuit::{validate_stabilizers, Circuit, CircuitError, Gate};
use crate::clifford::{conjugate, CliffordError, Direction};
use crate::gf2::{BitVec, Gf2Matrix};
use crate::pauli::{Pauli, PauliString, Phase};

/// Commuting, independent generators of a stabilizer group.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilizerTableau {
    n: usize,
    generators: Vec<PauliString>,
}

impl StabilizerTableau {
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self, CircuitError> {
        validate_stabilizers(n, &generators)?;
        Ok(StabilizerTableau { n, generators })
    }

    pub fn zero_state(n: usize) -> Self {
        StabilizerTableau { n, generators: Circuit::zero_state_stabilizers(n) }
    }

    pub fn empty(n: usize) -> Self {
        StabilizerTableau { n, generators: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// True when the group fixes a single state.
    pub fn is_full(&self) -> bool {
        self.generators.len() == self.n
    }

    /// `k × 2n` matrix of generator encodings.
    pub fn check_matrix(&self) -> Gf2Matrix {
        Gf2Matrix::from_rows(2 * self.n, self.generators.iter().map(PauliString::symplectic).collect())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), CliffordError> {
        for s in &mut self.generators {
            conjugate(s, g, Direction::Forward)?;
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<(), CliffordError> {
        for g in &c.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Writes `p = λ · ∏ g_i^{c_i}`; returns `(c, λ)` when `p` lies in the group up to a phase.
    pub fn decompose(&self, p: &PauliString) -> Option<(BitVec, Phase)> {
        let coeffs = self.check_matrix().solve_left(&p.symplectic())?;
        let mut prod = PauliString::identity(self.n);
        for i in coeffs.iter_ones() {
            prod.mul_assign_right(&self.generators[i]);
        }
        let lambda = Phase::from_exponent(p.phase().exponent() as i64 - prod.phase().exponent() as i64);
        Some((coeffs, lambda))
    }

    pub fn contains_up_to_phase(&self, p: &PauliString) -> bool {
        self.decompose(p).is_some()
    }

    /// Exact membership, sign included.
    pub fn contains(&self, p: &PauliString) -> bool {
        matches!(self.decompose(p), Some((_, l)) if l == Phase::ONE)
    }

    /// Generators of all Paulis commuting with every element of the group (phases dropped).
    pub fn normalizer(&self) -> Vec<PauliString> {
        let n = self.n;
        let swapped: Vec<BitVec> = self
            .generators
            .iter()
            .map(|g| g.z_bits().concat(g.x_bits()))
            .collect();
        Gf2Matrix::from_rows(2 * n, swapped)
            .nullspace()
            .into_rows()
            .iter()
            .map(PauliString::from_symplectic)
            .collect()
    }

    /// Same stabilizer group, signs included.
    pub fn same_group(&self, other: &StabilizerTableau) -> bool {
        self.n == other.n
            && self.len() == other.len()
            && other.generators.iter().all(|g| self.contains(g))
    }

    /// Stabilizer entanglement entropy (in bits) of a full tableau across `part` and its complement.
    pub fn entropy(&self, part: &[usize]) -> usize {
        let cols: Vec<usize> = part.iter().flat_map(|&q| [q, q + self.n]).collect();
        let rows = self
            .generators
            .iter()
            .map(|g| {
                let s = g.symplectic();
                BitVec::from_bools(&cols.iter().map(|&c| s.get(c)).collect::<Vec<_>>())
            })
            .collect();
        Gf2Matrix::from_rows(cols.len(), rows).rank() - part.len()
    }
}

/// Stabilizer simulator over `n` qubits keeping destabilizers, in the style of CHP.
#[derive(Clone, Debug)]
pub struct StabilizerSim {
    n: usize,
    destab: Vec<PauliString>,
    stab: Vec<PauliString>,
}

fn hermitian(mut p: PauliString) -> PauliString {
    if p.sign().is_none() {
        p.mul_phase(Phase::I);
    }
    p
}

impl StabilizerSim {
    pub fn zero(n: usize) -> Self {
        StabilizerSim {
            n,
            destab: (0..n).map(|q| PauliString::single(n, q, Pauli::X)).collect(),
            stab: (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect(),
        }
    }

    /// Simulator for the unique state fixed by a full tableau.
    pub fn from_tableau(t: &StabilizerTableau) -> Self {
        assert!(t.is_full(), "tableau must fix a unique state");
        let n = t.n;
        let swapped = Gf2Matrix::from_rows(
            2 * n,
            t.generators.iter().map(|g| g.z_bits().concat(g.x_bits())).collect(),
        );
        let system = swapped.transpose();
        let mut destab: Vec<PauliString> = Vec::with_capacity(n);
        for i in 0..n {
            let d = system.solve_left(&BitVec::unit(n, i)).expect("independent generators");
            let mut d = PauliString::from_symplectic(&d);
            for (j, prev) in destab.iter().enumerate() {
                if !d.commutes(prev) {
                    d.mul_assign_right(&t.generators[j]);
                }
            }
            destab.push(hermitian(d.with_phase(Phase::ONE)));
        }
        StabilizerSim { n, destab, stab: t.generators.clone() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn tableau(&self) -> StabilizerTableau {
        StabilizerTableau { n: self.n, generators: self.stab.clone() }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), CliffordError> {
        for p in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            conjugate(p, g, Direction::Forward)?;
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<(), CliffordError> {
        for g in &c.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Applies a Pauli error: flips the sign of every stabilizer it anticommutes with.
    pub fn apply_pauli(&mut self, e: &PauliString) {
        for s in &mut self.stab {
            if !s.commutes(e) {
                s.mul_phase(Phase::MINUS_ONE);
            }
        }
    }

    /// `⟨P⟩ ∈ {+1, −1}` when determined, `None` when the outcome is random.
    pub fn expectation(&self, p: &PauliString) -> Option<i8> {
        if self.stab.iter().any(|s| !s.commutes(p)) {
            return None;
        }
        let mut prod = PauliString::identity(self.n);
        for (i, d) in self.destab.iter().enumerate() {
            if !d.commutes(p) {
                prod.mul_assign_right(&self.stab[i]);
            }
        }
        debug_assert_eq!(prod.symplectic(), p.symplectic());
        let lambda = Phase::from_exponent(p.phase().exponent() as i64 - prod.phase().exponent() as i64);
        match lambda {
            Phase::ONE => Some(1),
            Phase::MINUS_ONE => Some(-1),
            _ => panic!("expectation of a non-Hermitian operator"),
        }
    }

    /// Measures `P` (Hermitian), collapsing the state; returns `(outcome bit, was_random)`.
    pub fn measure(&mut self, p: &PauliString, rng: &mut impl Rng) -> (bool, bool) {
        let forced = rng.gen_bool(0.5);
        self.measure_forced(p, forced)
    }

    /// Like [`measure`](Self::measure) but chooses `outcome` when the result is random.
    pub fn measure_forced(&mut self, p: &PauliString, outcome: bool) -> (bool, bool) {
        if let Some(v) = self.expectation(p) {
            return (v < 0, false);
        }
        let k = self.stab.iter().position(|s| !s.commutes(p)).expect("anticommuting stabilizer");
        let pivot = self.stab[k].clone();
        for i in 0..self.n {
            if i != k && !self.stab[i].commutes(p) {
                self.stab[i].mul_assign_right(&pivot);
            }
            if i != k && !self.destab[i].commutes(p) {
                let d = std::mem::replace(&mut self.destab[i], PauliString::identity(self.n));
                self.destab[i] = hermitian(d.try_mul(&pivot).expect("same size"));
            }
        }
        self.destab[k] = pivot;
        let mut new = p.clone();
        if outcome {
            new.mul_phase(Phase::MINUS_ONE);
        }
        self.stab[k] = new;
        (outcome, true)
    }

    pub fn measure_z(&mut self, q: usize, rng: &mut impl Rng) -> (bool, bool) {
        self.measure(&PauliString::single(self.n, q, Pauli::Z), rng)
    }
}
