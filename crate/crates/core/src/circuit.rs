//! Circuit representation and the line-oriented `.stc` text format.
//!
//! ```text
//! # comment
//! qubits 3
//! stab +ZZI
//! H 0
//! CX 0 1
//! ROT Z 0.7853981633974483 2
//! ancilla 2
//! ```
//!
//! `ancilla q` marks a qubit that is prepared in `|0⟩` and measured in the Z basis at the
//! end; it is emitted for dressed circuits.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clifford::single_qubit_cliffords;
use crate::gf2::Gf2Matrix;
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { line: usize, qubit: usize, n: usize },
    #[error("gate {kind} acts twice on qubit {qubit}")]
    RepeatedQubit { kind: GateKind, qubit: usize },
    #[error("gate {kind} expects {expected} qubits, got {got}")]
    Arity { kind: GateKind, expected: usize, got: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    OutOfRange { qubit: usize, n: usize },
    #[error("rotation angle must be finite")]
    BadAngle,
    #[error("stabilizers {0} and {1} do not commute")]
    NonCommutingStabilizers(usize, usize),
    #[error("stabilizer generators are not independent")]
    DependentStabilizers,
    #[error("stabilizer {0} has the wrong length or a non-real sign")]
    BadStabilizer(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    SX,
    CX,
    CZ,
    Swap,
    Rot,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::SX => "SX",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::Swap => "SWAP",
            GateKind::Rot => "ROT",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        Some(match s {
            "H" => GateKind::H,
            "S" => GateKind::S,
            "SDG" => GateKind::Sdg,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "Z" => GateKind::Z,
            "SX" => GateKind::SX,
            "CX" => GateKind::CX,
            "CZ" => GateKind::CZ,
            "SWAP" => GateKind::Swap,
            "ROT" => GateKind::Rot,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.arity() == 2
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axis and angle of `R_P(θ) = exp(-iθP/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub axis: Pauli,
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub rotation: Option<Rotation>,
    /// Position in the owning circuit's gate list.
    pub id: usize,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Gate {
        assert!(kind != GateKind::Rot, "use Gate::rotation");
        Gate { kind, qubits, rotation: None, id: 0 }
    }

    pub fn rotation(axis: Pauli, angle: f64, qubit: usize) -> Gate {
        Gate { kind: GateKind::Rot, qubits: vec![qubit], rotation: Some(Rotation { axis, angle }), id: 0 }
    }

    pub fn is_clifford(&self) -> bool {
        self.kind != GateKind::Rot
    }

    /// Z-diagonal gates (zero duration in the default schedule).
    pub fn is_diagonal(&self) -> bool {
        match self.kind {
            GateKind::S | GateKind::Sdg | GateKind::Z | GateKind::CZ => true,
            GateKind::Rot => self.rotation.map(|r| r.axis == Pauli::Z).unwrap_or(false),
            _ => false,
        }
    }

    fn validate(&self, n: usize) -> Result<(), CircuitError> {
        let expected = self.kind.arity();
        if self.qubits.len() != expected {
            return Err(CircuitError::Arity { kind: self.kind, expected, got: self.qubits.len() });
        }
        for &q in &self.qubits {
            if q >= n {
                return Err(CircuitError::OutOfRange { qubit: q, n });
            }
        }
        if expected == 2 && self.qubits[0] == self.qubits[1] {
            return Err(CircuitError::RepeatedQubit { kind: self.kind, qubit: self.qubits[0] });
        }
        match (self.kind, self.rotation) {
            (GateKind::Rot, Some(r)) if !r.angle.is_finite() => Err(CircuitError::BadAngle),
            (GateKind::Rot, Some(r)) if r.axis == Pauli::I => Err(CircuitError::BadAngle),
            (GateKind::Rot, None) => Err(CircuitError::BadAngle),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.rotation) {
            (GateKind::Rot, Some(r)) => write!(f, "ROT {} {} {}", r.axis, r.angle, self.qubits[0]),
            _ => {
                f.write_str(self.kind.name())?;
                for q in &self.qubits {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    /// Generators of the input stabilizer group, if any.
    pub input_stabilizers: Option<Vec<PauliString>>,
    /// Qubits prepared in `|0⟩` and measured in Z at the end (check ancillas, in check order).
    pub ancillas: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Circuit {
        Circuit { n_qubits, gates: Vec::new(), input_stabilizers: None, ancillas: Vec::new() }
    }

    pub fn push(&mut self, mut gate: Gate) -> Result<&mut Self, CircuitError> {
        gate.validate(self.n_qubits)?;
        gate.id = self.gates.len();
        self.gates.push(gate);
        Ok(self)
    }

    pub fn gate(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        self.push(Gate::new(kind, qubits.to_vec())).expect("valid gate")
    }

    pub fn rot(&mut self, axis: Pauli, angle: f64, qubit: usize) -> &mut Self {
        self.push(Gate::rotation(axis, angle, qubit)).expect("valid rotation")
    }

    /// Sets the input stabilizer group after validating it.
    pub fn set_stabilizers(&mut self, gens: Vec<PauliString>) -> Result<(), CircuitError> {
        validate_stabilizers(self.n_qubits, &gens)?;
        self.input_stabilizers = Some(gens);
        Ok(())
    }

    /// Input stabilizers of `|0…0⟩`.
    pub fn zero_state_stabilizers(n: usize) -> Vec<PauliString> {
        (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.is_two_qubit()).count()
    }

    pub fn rotation_count(&self) -> usize {
        self.count(GateKind::Rot)
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(Gate::is_clifford)
    }

    pub fn gates_on(&self, q: usize) -> usize {
        self.gates.iter().filter(|g| g.qubits.contains(&q)).count()
    }

    pub fn to_stc(&self) -> String {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.n_qubits).unwrap();
        for g in self.input_stabilizers.iter().flatten() {
            writeln!(s, "stab {}", g.to_literal()).unwrap();
        }
        for g in &self.gates {
            writeln!(s, "{g}").unwrap();
        }
        for a in &self.ancillas {
            writeln!(s, "ancilla {a}").unwrap();
        }
        s
    }
}

pub fn validate_stabilizers(n: usize, gens: &[PauliString]) -> Result<(), CircuitError> {
    for (i, g) in gens.iter().enumerate() {
        if g.num_qubits() != n || g.sign().is_none() {
            return Err(CircuitError::BadStabilizer(i));
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes(&gens[j]) {
                return Err(CircuitError::NonCommutingStabilizers(i, j));
            }
        }
    }
    let m = Gf2Matrix::from_rows(2 * n, gens.iter().map(PauliString::symplectic).collect());
    if m.rank() != gens.len() {
        return Err(CircuitError::DependentStabilizers);
    }
    Ok(())
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut circuit: Option<Circuit> = None;
    let mut stabs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| CircuitError::Syntax { line, message };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let head = tokens[0];
        if head == "qubits" {
            if circuit.is_some() {
                return Err(syntax("duplicate `qubits` header".into()));
            }
            if tokens.len() != 2 {
                return Err(syntax("expected `qubits N`".into()));
            }
            let n = tokens[1].parse::<usize>().map_err(|_| syntax(format!("bad qubit count `{}`", tokens[1])))?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let Some(c) = circuit.as_mut() else {
            return Err(syntax("missing `qubits N` header".into()));
        };
        let n = c.n_qubits;
        let qubit = |tok: &str| -> Result<usize, CircuitError> {
            let q = tok.parse::<usize>().map_err(|_| CircuitError::Syntax { line, message: format!("bad qubit index `{tok}`") })?;
            if q >= n {
                return Err(CircuitError::QubitOutOfRange { line, qubit: q, n });
            }
            Ok(q)
        };
        match head {
            "stab" => {
                if tokens.len() != 2 {
                    return Err(syntax("expected `stab <literal>`".into()));
                }
                let p = PauliString::from_literal(tokens[1]).map_err(|e| syntax(e.to_string()))?;
                if p.num_qubits() != n {
                    return Err(syntax(format!("stabilizer has {} qubits, expected {n}", p.num_qubits())));
                }
                stabs.push(p);
            }
            "ancilla" => {
                if tokens.len() != 2 {
                    return Err(syntax("expected `ancilla q`".into()));
                }
                c.ancillas.push(qubit(tokens[1])?);
            }
            "ROT" => {
                if tokens.len() != 4 {
                    return Err(syntax("expected `ROT <X|Y|Z> <angle> q`".into()));
                }
                let axis = match tokens[1] {
                    "X" => Pauli::X,
                    "Y" => Pauli::Y,
                    "Z" => Pauli::Z,
                    other => return Err(syntax(format!("bad rotation axis `{other}`"))),
                };
                let angle = tokens[2].parse::<f64>().map_err(|_| syntax(format!("bad angle `{}`", tokens[2])))?;
                if !angle.is_finite() {
                    return Err(syntax("angle must be finite".into()));
                }
                let q = qubit(tokens[3])?;
                c.push(Gate::rotation(axis, angle, q)).map_err(|e| syntax(e.to_string()))?;
            }
            name => {
                let kind = GateKind::from_name(name).ok_or_else(|| syntax(format!("unknown gate `{name}`")))?;
                if tokens.len() != kind.arity() + 1 {
                    return Err(syntax(format!("{name} expects {} qubit(s)", kind.arity())));
                }
                let qs = tokens[1..].iter().map(|t| qubit(t)).collect::<Result<Vec<_>, _>>()?;
                c.push(Gate::new(kind, qs)).map_err(|e| syntax(e.to_string()))?;
            }
        }
    }
    let mut c = circuit.ok_or(CircuitError::Syntax { line: 0, message: "missing `qubits N` header".into() })?;
    if !stabs.is_empty() {
        c.set_stabilizers(stabs)?;
    }
    Ok(c)
}

impl FromStr for Circuit {
    type Err = CircuitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_circuit(s)
    }
}

/// Path-connectivity brickwork: `depth` alternating even/odd CZ layers, each preceded by a
/// layer of uniformly random single-qubit Cliffords.
pub fn generate_brickwork(n: usize, depth: usize, seed: u64) -> Circuit {
    assert!(n >= 2 && depth >= 1, "brickwork needs n ≥ 2 and depth ≥ 1");
    let words = single_qubit_cliffords();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    for layer in 0..depth {
        for q in 0..n {
            for &k in &words[rng.gen_range(0..words.len())] {
                c.gate(k, &[q]);
            }
        }
        let mut a = layer % 2;
        while a + 1 < n {
            c.gate(GateKind::CZ, &[a, a + 1]);
            a += 2;
        }
    }
    c
}

/// Uniformly random gate list over all Clifford kinds, for tests and benchmarks.
pub fn random_clifford_circuit(n: usize, m: usize, rng: &mut impl Rng) -> Circuit {
    const ONE: [GateKind; 7] =
        [GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::Y, GateKind::Z, GateKind::SX];
    const TWO: [GateKind; 3] = [GateKind::CX, GateKind::CZ, GateKind::Swap];
    let mut c = Circuit::new(n);
    for _ in 0..m {
        if n >= 2 && rng.gen_bool(0.5) {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            c.gate(TWO[rng.gen_range(0..TWO.len())], &[a, b]);
        } else {
            c.gate(ONE[rng.gen_range(0..ONE.len())], &[rng.gen_range(0..n)]);
        }
    }
    c
}
