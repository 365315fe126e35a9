//! Pauli noise on wires, cumulant-based detection and Monte Carlo estimation of the
//! postselection rate and logical error rate.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, GateKind};
use crate::gf2::BitVec;
use crate::pauli::{Pauli, PauliString};
use crate::propagate::{back_cumulant, forward_through, output_cumulant, RotationMode, SpacetimePauli};
use crate::rng;
use crate::schedule::{schedule_alap, GateTimes, Schedule};
use crate::tableau::StabilizerTableau;
use crate::wires::{Wire, WireGraph};

/// Shots per RNG stream.
pub const CHUNK: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("error rate {0} outside [0, 1)")]
    BadRate(f64),
    #[error("coherence time must be positive, got {0}")]
    BadCoherence(f64),
    #[error("negative idle time {tau} on wire {wire}")]
    NegativeIdle { wire: Wire, tau: f64 },
    #[error("wire {0} is not part of the circuit")]
    UnknownWire(Wire),
    #[error("at least one shot is required")]
    NoShots,
}

/// `1 − e^{−τ/T}`.
pub fn idle_error_probability(tau: f64, coherence: f64) -> f64 {
    -(-tau / coherence).exp_m1()
}

/// Per-Pauli probability of a depolarizing gate channel of rate `eps` merged with an idle channel of rate `eps_tau`.
pub fn merged_pauli_probability(eps: f64, eps_tau: f64) -> f64 {
    (eps + eps_tau - 4.0 * eps * eps_tau / 3.0) / 3.0
}

/// Base rate and idle model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub eps: f64,
    /// Coherence time in seconds; `None` disables idling noise.
    pub coherence: Option<f64>,
    pub gate_times: GateTimes,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams { eps: 8e-4, coherence: Some(100e-6), gate_times: GateTimes::default() }
    }
}

/// Independent Pauli channel per wire, `[pX, pY, pZ]` indexed like [`WireGraph::index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    probs: Vec<[f64; 3]>,
    noisy: Vec<usize>,
    p_max: f64,
}

impl NoiseModel {
    pub fn from_probabilities(probs: Vec<[f64; 3]>) -> NoiseModel {
        for p in &probs {
            assert!(p.iter().all(|&x| x >= 0.0) && p.iter().sum::<f64>() <= 1.0 + 1e-12, "invalid channel {p:?}");
        }
        let noisy: Vec<usize> = (0..probs.len()).filter(|&i| probs[i].iter().sum::<f64>() > 0.0).collect();
        let p_max = noisy.iter().map(|&i| probs[i].iter().sum::<f64>()).fold(0.0, f64::max);
        NoiseModel { probs, noisy, p_max }
    }

    /// Depolarizing `eps` on every wire after a 2-qubit gate, merged with ALAP idling.
    pub fn build(c: &Circuit, wires: &WireGraph, sched: &Schedule, eps: f64, coherence: Option<f64>) -> Result<NoiseModel, NoiseError> {
        if !(0.0..1.0).contains(&eps) {
            return Err(NoiseError::BadRate(eps));
        }
        if let Some(t) = coherence {
            if !(t > 0.0) {
                return Err(NoiseError::BadCoherence(t));
            }
        }
        let mut probs = vec![[0.0; 3]; wires.num_wires()];
        for g in c.gates.iter().filter(|g| g.kind.is_two_qubit()) {
            for w in wires.outputs(g.id) {
                let tau = sched.idle_of(wires, w);
                if tau < 0.0 {
                    return Err(NoiseError::NegativeIdle { wire: w, tau });
                }
                let eps_tau = coherence.map_or(0.0, |t| idle_error_probability(tau, t));
                probs[wires.index(w)] = [merged_pauli_probability(eps, eps_tau); 3];
            }
        }
        Ok(NoiseModel::from_probabilities(probs))
    }

    /// Model for `c` from parameters, scheduling it ALAP.
    pub fn for_circuit(c: &Circuit, params: &NoiseParams) -> Result<NoiseModel, NoiseError> {
        let wires = WireGraph::new(c);
        let sched = schedule_alap(c, &wires, &params.gate_times);
        NoiseModel::build(c, &wires, &sched, params.eps, params.coherence)
    }

    pub fn num_wires(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self, wire_index: usize) -> [f64; 3] {
        self.probs[wire_index]
    }

    pub fn is_noiseless(&self) -> bool {
        self.noisy.is_empty()
    }

    /// Draws one error, pushing `(wire index, Pauli)` pairs; returns `P(E)/P(∅)`.
    pub fn sample_into(&self, rng: &mut impl Rng, out: &mut Vec<(usize, Pauli)>) -> f64 {
        out.clear();
        let mut weight = 1.0;
        let mut push = |i: usize, u: f64, out: &mut Vec<(usize, Pauli)>| {
            let [px, py, pz] = self.probs[i];
            let total = px + py + pz;
            let p = if u < px {
                (Pauli::X, px)
            } else if u < px + py {
                (Pauli::Y, py)
            } else {
                (Pauli::Z, pz)
            };
            out.push((i, p.0));
            weight *= p.1 / (1.0 - total);
        };
        if self.p_max == 0.0 {
            return 1.0;
        }
        if self.p_max > 0.2 {
            for &i in &self.noisy {
                let u: f64 = rng.gen();
                if u < self.probs[i].iter().sum::<f64>() {
                    push(i, u, out);
                }
            }
            return weight;
        }
        let log_q = (-self.p_max).ln_1p();
        let mut pos = 0usize;
        loop {
            let u: f64 = rng.gen();
            let skip = ((1.0 - u).ln() / log_q).floor();
            if !skip.is_finite() || skip >= (self.noisy.len() - pos) as f64 {
                break;
            }
            pos += skip as usize;
            let i = self.noisy[pos];
            let u: f64 = rng.gen::<f64>() * self.p_max;
            if u < self.probs[i].iter().sum::<f64>() {
                push(i, u, out);
            }
            pos += 1;
            if pos >= self.noisy.len() {
                break;
            }
        }
        weight
    }
}

/// A sampled error with its probability relative to the error-free outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorSample {
    pub errors: Vec<(Wire, Pauli)>,
    pub weight: f64,
}

pub fn sample_error(m: &NoiseModel, wires: &WireGraph, rng: &mut impl Rng) -> ErrorSample {
    let mut raw = Vec::new();
    let weight = m.sample_into(rng, &mut raw);
    ErrorSample { errors: raw.into_iter().map(|(i, p)| (wires.wire_at(i), p)).collect(), weight }
}

/// Detector cumulants over the wires of a dressed circuit.
///
/// Bits are ordered: one per check ancilla, one per logical operator, one per rotation.
#[derive(Clone, Debug)]
pub struct DetectorSet {
    wires: WireGraph,
    cumulants: Vec<SpacetimePauli>,
    n_checks: usize,
    n_logical: usize,
    /// Detectors flipped by an X (resp. Z) error on each wire.
    flips_x: Vec<BitVec>,
    flips_z: Vec<BitVec>,
}

impl DetectorSet {
    /// `logicals` are output-slice operators on the data qubits; an error is logical when it
    /// anticommutes with any of them.
    pub fn new(dressed: &Circuit, logicals: &[PauliString]) -> DetectorSet {
        let wires = WireGraph::new(dressed);
        let n = dressed.n_qubits;
        let mut cumulants = Vec::new();
        for &a in &dressed.ancillas {
            let op = PauliString::single(n, a, Pauli::Z);
            cumulants.push(output_cumulant(dressed, &wires, op, RotationMode::Skeleton).expect("skeleton"));
        }
        for l in logicals {
            cumulants.push(output_cumulant(dressed, &wires, l.extended(n), RotationMode::Skeleton).expect("skeleton"));
        }
        for g in dressed.gates.iter().filter(|g| g.kind == GateKind::Rot) {
            let q = g.qubits[0];
            let axis = g.rotation.expect("rotation data").axis;
            cumulants.push(back_cumulant(dressed, &wires, axis, wires.input_of(g.id, q), RotationMode::Skeleton).expect("skeleton"));
        }
        let d = cumulants.len();
        let mut flips_x = vec![BitVec::zeros(d); wires.num_wires()];
        let mut flips_z = vec![BitVec::zeros(d); wires.num_wires()];
        for (k, cum) in cumulants.iter().enumerate() {
            let ops = cum.ops();
            for i in ops.z_bits().iter_ones() {
                flips_x[i].set(k, true);
            }
            for i in ops.x_bits().iter_ones() {
                flips_z[i].set(k, true);
            }
        }
        DetectorSet { wires, cumulants, n_checks: dressed.ancillas.len(), n_logical: logicals.len(), flips_x, flips_z }
    }

    /// Detectors for a dressed payload whose expected output group is `U S U†`.
    pub fn for_payload(dressed: &Circuit, payload: &Circuit, stabilizers: &StabilizerTableau) -> DetectorSet {
        DetectorSet::new(dressed, &logical_operators(payload, stabilizers))
    }

    pub fn wires(&self) -> &WireGraph {
        &self.wires
    }

    pub fn cumulants(&self) -> &[SpacetimePauli] {
        &self.cumulants
    }

    pub fn num_checks(&self) -> usize {
        self.n_checks
    }

    pub fn num_logical(&self) -> usize {
        self.n_logical
    }

    pub fn len(&self) -> usize {
        self.cumulants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulants.is_empty()
    }

    /// All detector bits flipped by an error given as `(wire index, Pauli)` pairs.
    pub fn flips(&self, errors: &[(usize, Pauli)]) -> BitVec {
        let mut out = BitVec::zeros(self.len());
        for &(i, p) in errors {
            let (x, z) = p.bits();
            if x {
                out.xor_assign(&self.flips_x[i]);
            }
            if z {
                out.xor_assign(&self.flips_z[i]);
            }
        }
        out
    }

    fn indices(&self, e: &ErrorSample) -> Result<Vec<(usize, Pauli)>, NoiseError> {
        e.errors
            .iter()
            .map(|&(w, p)| if self.wires.contains(w) { Ok((self.wires.index(w), p)) } else { Err(NoiseError::UnknownWire(w)) })
            .collect()
    }

    /// Per-check trigger bits.
    pub fn detect(&self, e: &ErrorSample) -> Result<BitVec, NoiseError> {
        Ok(self.flips(&self.indices(e)?).slice(0, self.n_checks))
    }

    pub fn is_logical_error(&self, e: &ErrorSample) -> Result<bool, NoiseError> {
        Ok(!self.flips(&self.indices(e)?).slice(self.n_checks, self.len()).is_zero())
    }

    fn classify(&self, flips: &BitVec) -> (bool, bool) {
        let triggered = (0..self.n_checks).any(|k| flips.get(k));
        let logical = (self.n_checks..self.len()).any(|k| flips.get(k));
        (triggered, logical)
    }
}

/// Generators of the normalizer of `S`, evolved to the output of the payload skeleton.
/// An output error lies in `U S U†` (up to phase) iff it commutes with all of them.
pub fn logical_operators(payload: &Circuit, stabilizers: &StabilizerTableau) -> Vec<PauliString> {
    stabilizers
        .normalizer()
        .into_iter()
        .map(|p| forward_through(payload, p, RotationMode::Skeleton).expect("skeleton"))
        .collect()
}

/// Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub shots: usize,
    pub accepted: usize,
    pub ps_rate: f64,
    pub ps_sigma: f64,
    pub ler_plain: Option<f64>,
    pub ler_weighted: Option<f64>,
    /// Binomial σ of the plain estimator.
    pub ler_sigma: Option<f64>,
    /// `sqrt(Σ w² (y − R)²) / Σ w` over accepted shots.
    pub ler_weighted_sigma: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Copy, Default)]
struct Tally {
    accepted: usize,
    logical: usize,
    weight: f64,
    weight_logical: f64,
}

struct ChunkResult {
    tally: Tally,
    /// `(weight, logical)` of accepted shots, for the weighted σ.
    accepted: Vec<(f64, bool)>,
}

fn run_chunk(m: &NoiseModel, d: &DetectorSet, seed: u64, chunk: usize, shots: usize) -> ChunkResult {
    let mut rng = rng::stream(seed, chunk as u64);
    let mut buf = Vec::new();
    let mut tally = Tally::default();
    let mut accepted = Vec::new();
    for _ in 0..shots {
        let w = m.sample_into(&mut rng, &mut buf);
        let (triggered, logical) = if buf.is_empty() { (false, false) } else { d.classify(&d.flips(&buf)) };
        if triggered {
            continue;
        }
        tally.accepted += 1;
        tally.weight += w;
        if logical {
            tally.logical += 1;
            tally.weight_logical += w;
        }
        accepted.push((w, logical));
    }
    ChunkResult { tally, accepted }
}

/// Estimates PS and LER with `shots` samples; chunk `k` of [`CHUNK`] shots uses stream `(seed, k)`.
pub fn estimate(m: &NoiseModel, d: &DetectorSet, shots: usize, seed: u64) -> Result<SimReport, NoiseError> {
    if shots == 0 {
        return Err(NoiseError::NoShots);
    }
    assert_eq!(m.num_wires(), d.wires.num_wires(), "noise model and detectors disagree on the wire set");
    let chunks = shots.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|k| run_chunk(m, d, seed, k, CHUNK.min(shots - k * CHUNK)))
        .collect();
    let mut t = Tally::default();
    for r in &results {
        t.accepted += r.tally.accepted;
        t.logical += r.tally.logical;
        t.weight += r.tally.weight;
        t.weight_logical += r.tally.weight_logical;
    }
    let ps = t.accepted as f64 / shots as f64;
    let ps_sigma = (ps * (1.0 - ps) / shots as f64).sqrt();
    let (ler_plain, ler_sigma, ler_weighted, ler_weighted_sigma) = if t.accepted == 0 {
        (None, None, None, None)
    } else {
        let r = t.logical as f64 / t.accepted as f64;
        let rw = t.weight_logical / t.weight;
        let var: f64 = results
            .iter()
            .flat_map(|c| c.accepted.iter())
            .map(|&(w, y)| (w * (f64::from(u8::from(y)) - rw)).powi(2))
            .sum();
        (Some(r), Some((r * (1.0 - r) / t.accepted as f64).sqrt()), Some(rw), Some(var.sqrt() / t.weight))
    };
    Ok(SimReport { shots, accepted: t.accepted, ps_rate: ps, ps_sigma, ler_plain, ler_weighted, ler_sigma, ler_weighted_sigma, seed })
}

/// Fraction of accepted shots in which each logical operator is flipped, in detector order.
pub fn logical_flip_rates(m: &NoiseModel, d: &DetectorSet, shots: usize, seed: u64) -> (usize, Vec<f64>) {
    let chunks = shots.div_ceil(CHUNK);
    let counts: Vec<(usize, Vec<usize>)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(seed, k as u64);
            let mut buf = Vec::new();
            let mut acc = 0;
            let mut flips = vec![0usize; d.n_logical];
            for _ in 0..CHUNK.min(shots - k * CHUNK) {
                m.sample_into(&mut rng, &mut buf);
                let f = d.flips(&buf);
                if (0..d.n_checks).any(|i| f.get(i)) {
                    continue;
                }
                acc += 1;
                for (j, c) in flips.iter_mut().enumerate() {
                    *c += usize::from(f.get(d.n_checks + j));
                }
            }
            (acc, flips)
        })
        .collect();
    let accepted: usize = counts.iter().map(|c| c.0).sum();
    let rates = (0..d.n_logical)
        .map(|j| counts.iter().map(|c| c.1[j]).sum::<usize>() as f64 / accepted.max(1) as f64)
        .collect();
    (accepted, rates)
}
