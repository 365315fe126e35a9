//! Small dense state vectors and unitaries, used as exact oracles and for circuits with rotations.
//!
//! Qubit `q` is bit `q` of the basis index.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::pauli::{Pauli, PauliString};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

type Mat2 = [[Complex64; 2]; 2];

fn single_qubit_matrix(g: &Gate) -> Mat2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = |x: f64| Complex64::new(x, 0.0);
    match g.kind {
        GateKind::H => [[r(h), r(h)], [r(h), r(-h)]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::SX => {
            let a = Complex64::new(0.5, 0.5);
            let b = Complex64::new(0.5, -0.5);
            [[a, b], [b, a]]
        }
        GateKind::Rot => {
            let rot = g.rotation.expect("rotation data");
            let (s, c) = (rot.angle / 2.0).sin_cos();
            let p = pauli_2x2(rot.axis);
            let mut m = [[ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let id = if i == j { ONE } else { ZERO };
                    m[i][j] = id * c - I * s * p[i][j];
                }
            }
            m
        }
        _ => unreachable!("two-qubit gate"),
    }
}

fn pauli_2x2(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// Dense state vector over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 24, "dense simulation limited to 24 qubits");
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        StateVector { n, amps }
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut s = Self::zero(n);
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        s
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        let n = amps.len().trailing_zeros() as usize;
        assert_eq!(1 << n, amps.len(), "length must be a power of two");
        StateVector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) {
        match g.kind {
            GateKind::CX => {
                let (c, t) = (1 << g.qubits[0], 1 << g.qubits[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::CZ => {
                let mask = (1 << g.qubits[0]) | (1 << g.qubits[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateKind::Swap => {
                let (a, b) = (1 << g.qubits[0], 1 << g.qubits[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amps.swap(i, (i & !a) | b);
                    }
                }
            }
            _ => self.apply_1q(g.qubits[0], &single_qubit_matrix(g)),
        }
    }

    pub fn apply_circuit(&mut self, c: &Circuit) {
        for g in &c.gates {
            self.apply_gate(g);
        }
    }

    /// Applies a Pauli operator including its phase.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let x = pauli_mask(p.x_bits());
        let z = pauli_mask(p.z_bits());
        let ys = (x & z).count_ones() as i64;
        let global = I.powi((p.phase().exponent() as i64 + ys).rem_euclid(4) as i32);
        let mut out = vec![ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let sign = if (i & z).count_ones() % 2 == 1 { -ONE } else { ONE };
            out[i ^ x] = global * sign * a;
        }
        self.amps = out;
    }

    /// `⟨ψ|P|ψ⟩`.
    pub fn expectation(&self, p: &PauliString) -> Complex64 {
        let mut t = self.clone();
        t.apply_pauli(p);
        self.inner(&t)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability that a Z measurement of `q` gives 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let bit = 1 << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Fidelity `|⟨a|b⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Projects onto `q = value` and renormalizes; returns the outcome probability.
    pub fn postselect(&mut self, q: usize, value: bool) -> f64 {
        let bit = 1 << q;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) != value {
                *a = ZERO;
            } else {
                norm += a.norm_sqr();
            }
        }
        if norm > 0.0 {
            let s = 1.0 / norm.sqrt();
            for a in &mut self.amps {
                *a *= s;
            }
        }
        norm
    }

    /// Reduced state on the qubits in `keep`, assuming the others are in a product basis state.
    pub fn restrict(&self, keep: &[usize]) -> StateVector {
        let k = keep.len();
        let (best, _) = self
            .amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
            .expect("non-empty");
        let keep_mask: usize = keep.iter().map(|&q| 1 << q).sum();
        let rest = best & !keep_mask;
        let mut amps = vec![ZERO; 1 << k];
        for (j, slot) in amps.iter_mut().enumerate() {
            let mut i = rest;
            for (b, &q) in keep.iter().enumerate() {
                if j >> b & 1 == 1 {
                    i |= 1 << q;
                }
            }
            *slot = self.amps[i];
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector { n: k, amps }
    }
}

fn pauli_mask(bits: &crate::gf2::BitVec) -> usize {
    bits.iter_ones().map(|q| 1usize << q).sum()
}

/// Square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Matrix { dim, data }
    }

    pub fn from_columns(cols: Vec<Vec<Complex64>>) -> Self {
        let dim = cols.len();
        let mut data = vec![ZERO; dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * dim + j] = v;
            }
        }
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Matrix { dim: d, data }
    }

    pub fn adjoint(&self) -> Matrix {
        let d = self.dim;
        let mut data = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        Matrix { dim: d, data }
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Equality up to a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &Matrix, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let Some(k) = self.data.iter().position(|a| a.norm() > 1e-9) else {
            return other.data.iter().all(|b| b.norm() <= tol);
        };
        if other.data[k].norm() <= 1e-9 {
            return false;
        }
        let phase = other.data[k] / self.data[k];
        if (phase.norm() - 1.0).abs() > tol {
            return false;
        }
        self.data.iter().zip(&other.data).all(|(a, b)| (a * phase - b).norm() <= tol)
    }
}

/// Matrix of a Pauli string including its phase.
pub fn pauli_matrix(p: &PauliString) -> Matrix {
    let dim = 1 << p.num_qubits();
    let cols = (0..dim)
        .map(|j| {
            let mut s = StateVector::basis(p.num_qubits(), j);
            s.apply_pauli(p);
            s.amps
        })
        .collect();
    Matrix::from_columns(cols)
}

pub fn circuit_unitary(c: &Circuit) -> Matrix {
    let dim = 1 << c.n_qubits;
    let cols = (0..dim)
        .map(|j| {
            let mut s = StateVector::basis(c.n_qubits, j);
            s.apply_circuit(c);
            s.amps
        })
        .collect();
    Matrix::from_columns(cols)
}
