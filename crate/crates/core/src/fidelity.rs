//! Direct fidelity estimation, readout analytics and stabilizer folding.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::pauli::{Pauli, PauliString};
use crate::rng;
use crate::state::Graph;
use crate::tableau::StabilizerTableau;

/// Number of fold roots used by default.
pub const DEFAULT_FOLDS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FidelityError {
    #[error("at least one stabilizer sample is required")]
    NoSamples,
    #[error("stabilizer {0} has no shots")]
    NoShots(usize),
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{name} = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("cannot fold {n} qubits onto {k} roots")]
    BadFoldCount { n: usize, k: usize },
    #[error("support graph is disconnected")]
    Disconnected,
    #[error("readout map has {got} entries for {n} qubits")]
    ReadoutLength { n: usize, got: usize },
    #[error("the state has no non-identity stabilizers to sample")]
    TrivialGroup,
}

/// A sampled group element with the local basis change that maps it to `±Z` on its support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SampledStabilizer {
    pub pauli: PauliString,
    pub basis: Vec<Gate>,
    pub support: Vec<usize>,
}

impl SampledStabilizer {
    pub fn new(pauli: PauliString) -> SampledStabilizer {
        let mut basis = Vec::new();
        for q in pauli.support() {
            match pauli.get(q) {
                Pauli::X => basis.push(Gate::new(GateKind::H, vec![q])),
                Pauli::Y => {
                    basis.push(Gate::new(GateKind::Sdg, vec![q]));
                    basis.push(Gate::new(GateKind::H, vec![q]));
                }
                _ => {}
            }
        }
        let support = pauli.support();
        SampledStabilizer { pauli, basis, support }
    }

    pub fn sign(&self) -> i8 {
        self.pauli.sign().expect("stabilizers carry a real sign")
    }
}

impl From<SampledStabilizer> for String {
    fn from(s: SampledStabilizer) -> String {
        s.pauli.to_literal()
    }
}

impl TryFrom<String> for SampledStabilizer {
    type Error = crate::pauli::PauliError;

    fn try_from(lit: String) -> Result<Self, Self::Error> {
        Ok(SampledStabilizer::new(PauliString::from_literal(&lit)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityPlan {
    pub n: usize,
    pub stabilizers: Vec<SampledStabilizer>,
    pub seed: u64,
    pub include_identity: bool,
}

/// Draws `samples` group elements uniformly, with replacement.
pub fn plan_fidelity(t: &StabilizerTableau, samples: usize, seed: u64, include_identity: bool) -> Result<FidelityPlan, FidelityError> {
    if samples == 0 {
        return Err(FidelityError::NoSamples);
    }
    if t.is_empty() && !include_identity {
        return Err(FidelityError::TrivialGroup);
    }
    let n = t.num_qubits();
    let mut rng = rng::stream(seed, 0);
    let stabilizers = (0..samples)
        .map(|_| loop {
            let mask: Vec<bool> = (0..t.len()).map(|_| rng.gen()).collect();
            if !include_identity && !mask.contains(&true) {
                continue;
            }
            let mut p = PauliString::identity(n);
            for (g, _) in t.generators().iter().zip(&mask).filter(|(_, &b)| b) {
                p.mul_assign_right(g);
            }
            break SampledStabilizer::new(p);
        })
        .collect();
    Ok(FidelityPlan { n, stabilizers, seed, include_identity })
}

/// `±1` from the measured bits; `measured[i]` names the qubit behind `bits[i]`.
/// The second value flags a logically wrong shot.
pub fn shot_parity(bits: &[bool], s: &SampledStabilizer, measured: &[usize]) -> Result<(i8, bool), FidelityError> {
    if bits.len() != measured.len() {
        return Err(FidelityError::LengthMismatch { expected: measured.len(), got: bits.len() });
    }
    let odd = bits.iter().zip(measured).filter(|(&b, q)| b && s.support.contains(q)).count() % 2 == 1;
    let value = if odd { -s.sign() } else { s.sign() };
    Ok((value, value == -1))
}

/// Fidelity and its standard error from per-stabilizer shot values.
pub fn estimate_fidelity(values: &[Vec<i8>]) -> Result<(f64, f64), FidelityError> {
    if values.is_empty() {
        return Err(FidelityError::NoSamples);
    }
    let m = values.len() as f64;
    let mut means = Vec::with_capacity(values.len());
    let mut shot_term = 0.0;
    for (i, v) in values.iter().enumerate() {
        if v.is_empty() {
            return Err(FidelityError::NoShots(i));
        }
        let k = v.len() as f64;
        let mean = v.iter().map(|&x| f64::from(x)).sum::<f64>() / k;
        let var = v.iter().map(|&x| (f64::from(x) - mean).powi(2)).sum::<f64>() / k;
        shot_term += var / k;
        means.push(mean);
    }
    let f = means.iter().sum::<f64>() / m;
    let var_f = means.iter().map(|x| (x - f).powi(2)).sum::<f64>() / m;
    Ok((f, ((var_f + shot_term / m) / m).sqrt()))
}

pub fn ler_to_fidelity(ler: f64) -> Result<f64, FidelityError> {
    if !(0.0..=1.0).contains(&ler) {
        return Err(FidelityError::OutOfRange { name: "logical error rate", value: ler });
    }
    Ok(1.0 - 2.0 * ler)
}

/// `(1 − 2p)^w` for independent flips on `w` measured bits.
pub fn readout_fidelity_model(p: f64, weight: usize) -> Result<f64, FidelityError> {
    if !(0.0..=0.5).contains(&p) {
        return Err(FidelityError::OutOfRange { name: "readout error", value: p });
    }
    Ok((1.0 - 2.0 * p).powi(weight as i32))
}

/// Parity fold onto one root: CNOTs `(control, target)` in execution order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub root: usize,
    pub members: Vec<usize>,
    pub cnots: Vec<[usize; 2]>,
}

/// Partition of the support graph into connected regions with a preferred root each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub regions: Vec<Vec<usize>>,
    pub roots: Vec<usize>,
    pub readout: Vec<f64>,
}

/// Splits the graph into `k` connected regions and roots each at its best readout.
pub fn plan_fold(g: &Graph, readout: &[f64], k: usize) -> Result<FoldPlan, FidelityError> {
    let n = g.len();
    if k == 0 || k > n {
        return Err(FidelityError::BadFoldCount { n, k });
    }
    if readout.len() != n {
        return Err(FidelityError::ReadoutLength { n, got: readout.len() });
    }
    if bfs_distances(g, &[0]).contains(&usize::MAX) {
        return Err(FidelityError::Disconnected);
    }
    let regions = match path_order(g) {
        Some(order) => {
            let (base, extra) = (n / k, n % k);
            let mut out = Vec::with_capacity(k);
            let mut at = 0;
            for i in 0..k {
                let len = base + usize::from(i < extra);
                out.push(order[at..at + len].to_vec());
                at += len;
            }
            out
        }
        None => grow_regions(g, k),
    };
    let roots = regions.iter().map(|r| best_readout(r.iter().copied(), readout)).collect();
    Ok(FoldPlan { regions, roots, readout: readout.to_vec() })
}

fn best_readout(qubits: impl Iterator<Item = usize>, readout: &[f64]) -> usize {
    qubits.min_by(|&a, &b| readout[a].total_cmp(&readout[b]).then(a.cmp(&b))).expect("non-empty region")
}

fn bfs_distances(g: &Graph, sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Vertex order along the graph when it is a simple path.
fn path_order(g: &Graph) -> Option<Vec<usize>> {
    let n = g.len();
    if n == 1 {
        return Some(vec![0]);
    }
    let degrees: Vec<usize> = (0..n).map(|u| g.neighbors(u).count()).collect();
    if g.edges().len() != n - 1 || degrees.iter().any(|&d| d > 2) {
        return None;
    }
    let mut order = vec![degrees.iter().position(|&d| d == 1)?];
    let mut prev = usize::MAX;
    while order.len() < n {
        let cur = *order.last().unwrap();
        let next = g.neighbors(cur).find(|&v| v != prev)?;
        prev = cur;
        order.push(next);
    }
    Some(order)
}

/// Multi-source BFS growth from farthest-point seeds, smallest region first.
fn grow_regions(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut seeds = vec![0];
    while seeds.len() < k {
        let dist = bfs_distances(g, &seeds);
        let far = (0..n).filter(|v| !seeds.contains(v)).max_by_key(|&v| (dist[v], std::cmp::Reverse(v))).unwrap();
        seeds.push(far);
    }
    let mut owner = vec![usize::MAX; n];
    let mut regions: Vec<Vec<usize>> = seeds.iter().map(|&s| vec![s]).collect();
    for (i, &s) in seeds.iter().enumerate() {
        owner[s] = i;
    }
    let mut assigned = k;
    while assigned < n {
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| (regions[i].len(), i));
        let grown = order.into_iter().find_map(|i| {
            let v = regions[i].iter().flat_map(|&u| g.neighbors(u)).filter(|&v| owner[v] == usize::MAX).min()?;
            Some((i, v))
        });
        let (i, v) = grown.expect("connected graph");
        owner[v] = i;
        regions[i].push(v);
        assigned += 1;
    }
    for r in &mut regions {
        r.sort_unstable();
    }
    regions
}

impl FoldPlan {
    pub fn num_qubits(&self) -> usize {
        self.readout.len()
    }

    /// Fold schedule for one stabilizer support.
    ///
    /// Regions without support are skipped. A region whose preferred root is outside the support
    /// roots at its best-readout support qubit instead. Non-support qubits on the way relay parity
    /// with a CNOT before and after their subtree, which cancels their own bit.
    pub fn schedule(&self, g: &Graph, support: &[usize]) -> Vec<Fold> {
        let n = self.num_qubits();
        let mut in_support = vec![false; n];
        for &q in support {
            in_support[q] = true;
        }
        let mut folds = Vec::new();
        for (region, &preferred) in self.regions.iter().zip(&self.roots) {
            let mut inside = vec![false; n];
            for &q in region {
                inside[q] = true;
            }
            if !region.iter().any(|&q| in_support[q]) {
                continue;
            }
            let root = if in_support[preferred] {
                preferred
            } else {
                best_readout(region.iter().copied().filter(|&q| in_support[q]), &self.readout)
            };
            // BFS tree inside the region.
            let mut parent = vec![usize::MAX; n];
            let mut children = vec![Vec::new(); n];
            let mut seen = vec![false; n];
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let mut next: Vec<usize> = g.neighbors(u).filter(|&v| inside[v] && !seen[v]).collect();
                next.sort_unstable();
                for v in next {
                    seen[v] = true;
                    parent[v] = u;
                    children[u].push(v);
                    queue.push_back(v);
                }
            }
            let mut useful = vec![false; n];
            mark_useful(root, &children, &in_support, &mut useful);
            let mut cnots = Vec::new();
            emit(root, &parent, &children, &in_support, &useful, &mut cnots);
            let mut members: Vec<usize> = region.iter().copied().filter(|&q| useful[q]).collect();
            members.sort_unstable();
            folds.push(Fold { root, members, cnots });
        }
        folds
    }

    /// Basis change and fold gates for one stabilizer, appended after `prefix`.
    pub fn fold_circuit(&self, g: &Graph, prefix: &Circuit, s: &SampledStabilizer) -> (Circuit, Vec<usize>) {
        let mut c = prefix.clone();
        for gate in &s.basis {
            c.push(gate.clone()).expect("basis change fits");
        }
        let folds = self.schedule(g, &s.support);
        for f in &folds {
            for &[a, b] in &f.cnots {
                c.gate(GateKind::CX, &[a, b]);
            }
        }
        (c, folds.iter().map(|f| f.root).collect())
    }
}

fn mark_useful(v: usize, children: &[Vec<usize>], in_support: &[bool], useful: &mut [bool]) -> bool {
    let mut any = in_support[v];
    for &c in &children[v] {
        any |= mark_useful(c, children, in_support, useful);
    }
    useful[v] = any;
    any
}

fn emit(v: usize, parent: &[usize], children: &[Vec<usize>], in_support: &[bool], useful: &[bool], out: &mut Vec<[usize; 2]>) {
    let p = parent[v];
    let relay = p != usize::MAX && !in_support[v];
    if relay {
        out.push([v, p]);
    }
    for &c in children[v].iter().filter(|&&c| useful[c]) {
        emit(c, parent, children, in_support, useful, out);
    }
    if p != usize::MAX {
        out.push([v, p]);
    }
}

/// Applies CNOTs to a classical bit string.
pub fn apply_cnots(bits: &mut [bool], cnots: &[[usize; 2]]) {
    for &[c, t] in cnots {
        bits[t] ^= bits[c];
    }
}
