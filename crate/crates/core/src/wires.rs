//! Spacetime wires: the edges of the circuit DAG extended with dummy input and output gates.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::gf2::BitVec;

/// `(qubit, slot)`: slot 0 follows the dummy input, slot k follows the k-th gate on the qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wire {
    pub qubit: usize,
    pub slot: usize,
}

impl Wire {
    pub fn new(qubit: usize, slot: usize) -> Wire {
        Wire { qubit, slot }
    }
}

impl fmt::Display for Wire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.qubit, self.slot)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown wire {0}")]
pub struct UnknownWire(pub Wire);

#[derive(Clone, Debug)]
pub struct WireGraph {
    n_qubits: usize,
    n_gates: usize,
    /// Gate ids touching each qubit, in list order.
    qubit_gates: Vec<Vec<usize>>,
    /// Index of the first wire of each qubit.
    offsets: Vec<usize>,
    /// For each gate and each of its qubits, the slot of its output wire.
    out_slots: Vec<Vec<usize>>,
    gate_qubits: Vec<Vec<usize>>,
    ancestors: OnceLock<Vec<BitVec>>,
}

impl WireGraph {
    pub fn new(c: &Circuit) -> WireGraph {
        let n = c.n_qubits;
        let mut qubit_gates = vec![Vec::new(); n];
        let mut out_slots = Vec::with_capacity(c.gates.len());
        for (id, g) in c.gates.iter().enumerate() {
            let mut slots = Vec::with_capacity(g.qubits.len());
            for &q in &g.qubits {
                qubit_gates[q].push(id);
                slots.push(qubit_gates[q].len());
            }
            out_slots.push(slots);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut total = 0;
        for gates in &qubit_gates {
            offsets.push(total);
            total += gates.len() + 1;
        }
        offsets.push(total);
        WireGraph {
            n_qubits: n,
            n_gates: c.gates.len(),
            qubit_gates,
            offsets,
            out_slots,
            gate_qubits: c.gates.iter().map(|g| g.qubits.clone()).collect(),
            ancestors: OnceLock::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_gates(&self) -> usize {
        self.n_gates
    }

    pub fn num_wires(&self) -> usize {
        self.offsets[self.n_qubits]
    }

    pub fn contains(&self, w: Wire) -> bool {
        w.qubit < self.n_qubits && w.slot <= self.qubit_gates[w.qubit].len()
    }

    pub fn check(&self, w: Wire) -> Result<(), UnknownWire> {
        if self.contains(w) {
            Ok(())
        } else {
            Err(UnknownWire(w))
        }
    }

    /// Dense index in `0..num_wires()`.
    #[inline]
    pub fn index(&self, w: Wire) -> usize {
        debug_assert!(self.contains(w));
        self.offsets[w.qubit] + w.slot
    }

    pub fn wire_at(&self, index: usize) -> Wire {
        let q = self.offsets.partition_point(|&o| o <= index) - 1;
        Wire::new(q, index - self.offsets[q])
    }

    pub fn wires(&self) -> impl Iterator<Item = Wire> + '_ {
        (0..self.n_qubits).flat_map(move |q| (0..=self.qubit_gates[q].len()).map(move |s| Wire::new(q, s)))
    }

    pub fn gates_on(&self, q: usize) -> &[usize] {
        &self.qubit_gates[q]
    }

    pub fn input_wire(&self, q: usize) -> Wire {
        Wire::new(q, 0)
    }

    pub fn output_wire(&self, q: usize) -> Wire {
        Wire::new(q, self.qubit_gates[q].len())
    }

    /// Producing gate, `None` for the dummy input.
    pub fn producer(&self, w: Wire) -> Option<usize> {
        (w.slot > 0).then(|| self.qubit_gates[w.qubit][w.slot - 1])
    }

    /// Consuming gate, `None` for the dummy output.
    pub fn consumer(&self, w: Wire) -> Option<usize> {
        self.qubit_gates[w.qubit].get(w.slot).copied()
    }

    /// Output wires of gate `g`, in the gate's qubit order.
    pub fn outputs(&self, g: usize) -> impl Iterator<Item = Wire> + '_ {
        self.gate_qubits[g].iter().zip(&self.out_slots[g]).map(|(&q, &s)| Wire::new(q, s))
    }

    /// Input wires of gate `g`, in the gate's qubit order.
    pub fn inputs(&self, g: usize) -> impl Iterator<Item = Wire> + '_ {
        self.gate_qubits[g].iter().zip(&self.out_slots[g]).map(|(&q, &s)| Wire::new(q, s - 1))
    }

    pub fn output_of(&self, g: usize, q: usize) -> Wire {
        let pos = self.gate_qubits[g].iter().position(|&x| x == q).expect("gate acts on qubit");
        Wire::new(q, self.out_slots[g][pos])
    }

    pub fn input_of(&self, g: usize, q: usize) -> Wire {
        let w = self.output_of(g, q);
        Wire::new(q, w.slot - 1)
    }

    /// Position in the canonical topological order: inputs first, then by producer id and qubit.
    pub fn topo_key(&self, w: Wire) -> (usize, usize) {
        (self.producer(w).map_or(0, |g| g + 1), w.qubit)
    }

    pub fn topological_order(&self) -> Vec<Wire> {
        let mut ws: Vec<Wire> = self.wires().collect();
        ws.sort_by_key(|&w| self.topo_key(w));
        ws
    }

    fn ancestor_table(&self) -> &[BitVec] {
        self.ancestors.get_or_init(|| {
            let mut anc: Vec<BitVec> = Vec::with_capacity(self.n_gates);
            for g in 0..self.n_gates {
                let mut set = BitVec::unit(self.n_gates, g);
                for w in self.inputs(g) {
                    if let Some(p) = self.producer(w) {
                        set.or_assign(&anc[p]);
                    }
                }
                anc.push(set);
            }
            anc
        })
    }

    /// Reflexive reachability between gates in the DAG.
    pub fn gate_leq(&self, a: usize, b: usize) -> bool {
        a <= b && self.ancestor_table()[b].get(a)
    }

    /// Gates reachable from `g` (including `g`), by a single forward sweep.
    pub fn descendants(&self, g: usize) -> BitVec {
        let mut out = BitVec::unit(self.n_gates, g);
        for h in g + 1..self.n_gates {
            if self.inputs(h).any(|w| self.producer(w).is_some_and(|p| out.get(p))) {
                out.set(h, true);
            }
        }
        out
    }

    /// `a ≤ b`: a directed path from `a` to `b` exists in the line graph.
    pub fn causal_leq(&self, a: Wire, b: Wire) -> Result<bool, UnknownWire> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Ok(true);
        }
        match (self.consumer(a), self.producer(b)) {
            (Some(c), Some(p)) => Ok(self.gate_leq(c, p)),
            _ => Ok(false),
        }
    }

    /// Split at `w`: gates up to and including the producer of `w` in list order, and the rest.
    pub fn bipartition_at(&self, w: Wire) -> Result<(Vec<usize>, Vec<usize>), UnknownWire> {
        self.check(w)?;
        let cut = self.producer(w).map_or(0, |g| g + 1);
        Ok(((0..cut).collect(), (cut..self.n_gates).collect()))
    }
}
