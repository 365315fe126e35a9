//! Conjugation of Pauli strings through Clifford gates, and the single-qubit Clifford group.

use std::collections::HashSet;
use std::sync::OnceLock;

use thiserror::Error;

use crate::circuit::{Gate, GateKind};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliffordError {
    #[error("gate {0} is not Clifford")]
    NonClifford(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `P ↦ g P g†`
    Forward,
    /// `P ↦ g† P g`
    Backward,
}

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn idx(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

type Image1 = [(Pauli, bool); 4];
type Image2 = [(Pauli, Pauli, bool); 16];

struct Tables {
    one: Vec<[Image1; 2]>,
    two: Vec<[Image2; 2]>,
}

const ONE_QUBIT: [GateKind; 7] =
    [GateKind::H, GateKind::S, GateKind::Sdg, GateKind::X, GateKind::Y, GateKind::Z, GateKind::SX];
const TWO_QUBIT: [GateKind; 3] = [GateKind::CX, GateKind::CZ, GateKind::Swap];

fn one_index(k: GateKind) -> usize {
    ONE_QUBIT.iter().position(|&g| g == k).expect("single-qubit Clifford")
}

fn two_index(k: GateKind) -> usize {
    TWO_QUBIT.iter().position(|&g| g == k).expect("two-qubit Clifford")
}

fn lit(s: &str) -> PauliString {
    PauliString::from_literal(s).expect("static literal")
}

/// Forward images of `X_q` and `Z_q` for each local qubit.
fn generator_images(kind: GateKind) -> Vec<(PauliString, PauliString)> {
    match kind {
        GateKind::H => vec![(lit("Z"), lit("X"))],
        GateKind::S => vec![(lit("Y"), lit("Z"))],
        GateKind::Sdg => vec![(lit("-Y"), lit("Z"))],
        GateKind::X => vec![(lit("X"), lit("-Z"))],
        GateKind::Y => vec![(lit("-X"), lit("-Z"))],
        GateKind::Z => vec![(lit("-X"), lit("Z"))],
        GateKind::SX => vec![(lit("X"), lit("-Y"))],
        GateKind::CX => vec![(lit("XX"), lit("ZI")), (lit("IX"), lit("ZZ"))],
        GateKind::CZ => vec![(lit("XZ"), lit("ZI")), (lit("ZX"), lit("IZ"))],
        GateKind::Swap => vec![(lit("IX"), lit("IZ")), (lit("XI"), lit("ZI"))],
        GateKind::Rot => unreachable!("rotations have no Clifford table"),
    }
}

/// Image of a local Pauli under the map defined by `gens`.
fn image(gens: &[(PauliString, PauliString)], local: &[Pauli]) -> PauliString {
    let k = local.len();
    let mut out = PauliString::identity(k);
    let mut ys = 0;
    for (q, &p) in local.iter().enumerate() {
        let (x, z) = p.bits();
        if x {
            out.mul_assign_right(&gens[q].0);
        }
        if z {
            out.mul_assign_right(&gens[q].1);
        }
        if x && z {
            ys += 1;
        }
    }
    out.mul_phase(crate::pauli::Phase::from_exponent(ys));
    out
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let one = ONE_QUBIT
            .iter()
            .map(|&kind| {
                let gens = generator_images(kind);
                let mut fwd = [(Pauli::I, false); 4];
                let mut bwd = [(Pauli::I, false); 4];
                for p in PAULIS {
                    let img = image(&gens, &[p]);
                    let neg = img.sign().expect("Hermitian image") < 0;
                    fwd[idx(p)] = (img.get(0), neg);
                    bwd[idx(img.get(0))] = (p, neg);
                }
                [fwd, bwd]
            })
            .collect();
        let two = TWO_QUBIT
            .iter()
            .map(|&kind| {
                let gens = generator_images(kind);
                let mut fwd = [(Pauli::I, Pauli::I, false); 16];
                let mut bwd = [(Pauli::I, Pauli::I, false); 16];
                for a in PAULIS {
                    for b in PAULIS {
                        let img = image(&gens, &[a, b]);
                        let neg = img.sign().expect("Hermitian image") < 0;
                        let (ia, ib) = (img.get(0), img.get(1));
                        fwd[idx(a) * 4 + idx(b)] = (ia, ib, neg);
                        bwd[idx(ia) * 4 + idx(ib)] = (a, b, neg);
                    }
                }
                [fwd, bwd]
            })
            .collect();
        Tables { one, two }
    })
}

/// Conjugates `p` in place through `g`.
pub fn conjugate(p: &mut PauliString, g: &Gate, dir: Direction) -> Result<(), CliffordError> {
    let d = match dir {
        Direction::Forward => 0,
        Direction::Backward => 1,
    };
    let t = tables();
    match g.kind {
        GateKind::Rot => return Err(CliffordError::NonClifford(g.id)),
        GateKind::CX | GateKind::CZ | GateKind::Swap => {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            let (ia, ib, neg) = t.two[two_index(g.kind)][d][idx(p.get(a)) * 4 + idx(p.get(b))];
            p.set(a, ia);
            p.set(b, ib);
            if neg {
                p.mul_phase(crate::pauli::Phase::MINUS_ONE);
            }
        }
        kind => {
            let q = g.qubits[0];
            let (img, neg) = t.one[one_index(kind)][d][idx(p.get(q))];
            p.set(q, img);
            if neg {
                p.mul_phase(crate::pauli::Phase::MINUS_ONE);
            }
        }
    }
    Ok(())
}

/// Conjugation that treats rotations as identity (the Clifford skeleton of a circuit).
pub fn conjugate_skeleton(p: &mut PauliString, g: &Gate, dir: Direction) {
    if g.kind != GateKind::Rot {
        conjugate(p, g, dir).expect("Clifford gate");
    }
}

/// Returns a conjugated copy.
pub fn conjugate_through(p: &PauliString, g: &Gate, dir: Direction) -> Result<PauliString, CliffordError> {
    let mut out = p.clone();
    conjugate(&mut out, g, dir)?;
    Ok(out)
}

/// The 24 single-qubit Cliffords (modulo phase) as shortest words over `{H, S}`, identity first.
pub fn single_qubit_cliffords() -> &'static [Vec<GateKind>] {
    static WORDS: OnceLock<Vec<Vec<GateKind>>> = OnceLock::new();
    WORDS.get_or_init(|| {
        let action = |word: &[GateKind]| {
            let mut x = PauliString::single(1, 0, Pauli::X);
            let mut z = PauliString::single(1, 0, Pauli::Z);
            for &k in word {
                let g = Gate::new(k, vec![0]);
                conjugate(&mut x, &g, Direction::Forward).expect("Clifford");
                conjugate(&mut z, &g, Direction::Forward).expect("Clifford");
            }
            (x, z)
        };
        let mut seen = HashSet::new();
        let mut words: Vec<Vec<GateKind>> = vec![Vec::new()];
        seen.insert(action(&[]));
        let mut head = 0;
        while head < words.len() {
            let base = words[head].clone();
            head += 1;
            for k in [GateKind::H, GateKind::S] {
                let mut w = base.clone();
                w.push(k);
                if seen.insert(action(&w)) {
                    words.push(w);
                }
            }
        }
        words
    })
}
