//! Back-propagators and back-cumulants.

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::clifford::{conjugate, Direction};
use crate::pauli::{Pauli, PauliString};
use crate::wires::{UnknownWire, Wire, WireGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropagationError {
    #[error(transparent)]
    UnknownWire(#[from] UnknownWire),
    #[error("operator does not commute past non-Clifford gate {0}")]
    NonClifford(usize),
    #[error("expected a non-identity single-qubit Pauli")]
    IdentityPauli,
}

/// How rotation gates are treated while propagating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationMode {
    /// Fail when the operator anticommutes with a rotation axis.
    Reject,
    /// Treat rotations as identity.
    Skeleton,
}

fn step(op: &mut PauliString, g: &Gate, dir: Direction, mode: RotationMode) -> Result<(), PropagationError> {
    if g.kind == GateKind::Rot {
        let axis = g.rotation.expect("rotation data").axis;
        if mode == RotationMode::Reject && op.get(g.qubits[0]).anticommutes(axis) {
            return Err(PropagationError::NonClifford(g.id));
        }
        return Ok(());
    }
    conjugate(op, g, dir).expect("Clifford gate");
    Ok(())
}

/// Pauli over all wires of a circuit, stored as a string indexed by [`WireGraph::index`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpacetimePauli {
    ops: PauliString,
}

impl SpacetimePauli {
    pub fn identity(wires: &WireGraph) -> Self {
        SpacetimePauli { ops: PauliString::identity(wires.num_wires()) }
    }

    pub fn get(&self, wires: &WireGraph, w: Wire) -> Pauli {
        self.ops.get(wires.index(w))
    }

    pub fn set(&mut self, wires: &WireGraph, w: Wire, p: Pauli) {
        self.ops.set(wires.index(w), p);
    }

    pub fn ops(&self) -> &PauliString {
        &self.ops
    }

    /// Pointwise product.
    pub fn mul_assign(&mut self, other: &SpacetimePauli) {
        self.ops.mul_assign_right(&other.ops);
    }

    pub fn support(&self, wires: &WireGraph) -> Vec<(Wire, Pauli)> {
        self.ops.support().into_iter().map(|i| (wires.wire_at(i), self.ops.get(i))).collect()
    }

    /// Restriction to the spacelike slice just after gate `after` (or the input slice for `None`).
    pub fn slice(&self, c: &Circuit, wires: &WireGraph, after: Option<usize>) -> PauliString {
        let mut out = PauliString::identity(c.n_qubits);
        for q in 0..c.n_qubits {
            let gates = wires.gates_on(q);
            let slot = match after {
                None => 0,
                Some(g) => gates.partition_point(|&x| x <= g),
            };
            out.set(q, self.get(wires, Wire::new(q, slot)));
        }
        out
    }
}

/// Pulls `op`, located just after gate `start` (`None`: before all gates), back to the input.
/// Returns the input-slice operator and, if requested, the trace on every wire.
pub fn sweep_back(
    c: &Circuit,
    wires: &WireGraph,
    mut op: PauliString,
    start: Option<usize>,
    mode: RotationMode,
    record: bool,
) -> Result<(PauliString, Option<SpacetimePauli>), PropagationError> {
    let mut trace = record.then(|| SpacetimePauli::identity(wires));
    if let Some(last) = start {
        for g in c.gates[..=last].iter().rev() {
            if let Some(t) = trace.as_mut() {
                for w in wires.outputs(g.id) {
                    t.ops.set(wires.index(w), op.get(w.qubit));
                }
            }
            step(&mut op, g, Direction::Backward, mode)?;
        }
    }
    if let Some(t) = trace.as_mut() {
        for q in 0..c.n_qubits {
            t.ops.set(wires.index(Wire::new(q, 0)), op.get(q));
        }
    }
    Ok((op, trace))
}

fn seed(c: &Circuit, wires: &WireGraph, p: Pauli, w: Wire) -> Result<PauliString, PropagationError> {
    wires.check(w)?;
    if p == Pauli::I {
        return Err(PropagationError::IdentityPauli);
    }
    Ok(PauliString::single(c.n_qubits, w.qubit, p))
}

/// `B(P, w)`: `P` at wire `w` conjugated backward through every gate preceding it.
pub fn back_propagator(
    c: &Circuit,
    wires: &WireGraph,
    p: Pauli,
    w: Wire,
    mode: RotationMode,
) -> Result<PauliString, PropagationError> {
    let op = seed(c, wires, p, w)?;
    Ok(sweep_back(c, wires, op, wires.producer(w), mode, false)?.0)
}

/// The trace left on every wire while pulling `P` at `w` to the front of the circuit.
pub fn back_cumulant(
    c: &Circuit,
    wires: &WireGraph,
    p: Pauli,
    w: Wire,
    mode: RotationMode,
) -> Result<SpacetimePauli, PropagationError> {
    let op = seed(c, wires, p, w)?;
    Ok(sweep_back(c, wires, op, wires.producer(w), mode, true)?.1.expect("recorded"))
}

/// Cumulant of an operator placed on the output slice.
pub fn output_cumulant(
    c: &Circuit,
    wires: &WireGraph,
    op: PauliString,
    mode: RotationMode,
) -> Result<SpacetimePauli, PropagationError> {
    let start = c.gates.len().checked_sub(1);
    Ok(sweep_back(c, wires, op, start, mode, true)?.1.expect("recorded"))
}

/// Forward evolution `U P U†` through the whole circuit.
pub fn forward_through(c: &Circuit, mut op: PauliString, mode: RotationMode) -> Result<PauliString, PropagationError> {
    for g in &c.gates {
        step(&mut op, g, Direction::Forward, mode)?;
    }
    Ok(op)
}
