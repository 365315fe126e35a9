//! Structure of stabilizer states: graph-state form, cut-rank, entropy and rank-width.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::clifford::CliffordError;
use crate::gf2::{BitVec, Gf2Matrix};
use crate::pauli::{Pauli, PauliString};
use crate::rng;
use crate::tableau::StabilizerTableau;

/// Default size limit for exact rank-width.
pub const RANK_WIDTH_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error(transparent)]
    NonClifford(#[from] CliffordError),
    #[error("bipartition has an empty side")]
    EmptySide,
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("tableau has {got} generators on {n} qubits, a full set is required")]
    NotFull { n: usize, got: usize },
    #[error("graph of {n} vertices exceeds the exact rank-width limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("graph file line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Simple undirected graph as a symmetric adjacency bit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BitVec>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![BitVec::zeros(n); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>())
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n > 2 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "self loops are not allowed");
        self.adj[u].set(v, true);
        self.adj[v].set(u, true);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].get(v)
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter_ones()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|u| self.adj[u].iter_ones().filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }

    pub fn adjacency(&self) -> Gf2Matrix {
        Gf2Matrix::from_rows(self.len(), self.adj.clone())
    }

    /// Generators `X_u ∏_{v∼u} Z_v`.
    pub fn stabilizers(&self) -> StabilizerTableau {
        let n = self.len();
        let gens = (0..n)
            .map(|u| {
                let mut p = PauliString::single(n, u, Pauli::X);
                for v in self.neighbors(u) {
                    p.set(v, Pauli::Z);
                }
                p
            })
            .collect();
        StabilizerTableau::new(n, gens).expect("graph-state generators commute")
    }

    /// Parses `n <N>` followed by `e u v` lines.
    pub fn parse(text: &str) -> Result<Graph, StateError> {
        let mut g: Option<Graph> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| StateError::Syntax { line: i + 1, message: m.to_string() };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let nums: Vec<usize> = parts[1..].iter().map(|t| t.parse().map_err(|_| err("expected an integer"))).collect::<Result<_, _>>()?;
            match (parts[0], nums.as_slice(), g.as_mut()) {
                ("n", [n], None) => g = Some(Graph::empty(*n)),
                ("e", [u, v], Some(graph)) => {
                    if u == v || *u >= graph.len() || *v >= graph.len() {
                        return Err(err("bad edge"));
                    }
                    graph.add_edge(*u, *v);
                }
                ("e", _, None) => return Err(err("edge before vertex count")),
                _ => return Err(err("expected `n N` or `e u v`")),
            }
        }
        g.ok_or(StateError::Syntax { line: 0, message: "missing vertex count".into() })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.len());
        for (u, v) in self.edges() {
            writeln!(s, "e {u} {v}").unwrap();
        }
        s
    }
}

/// Output stabilizers of `c` applied to its input group (or `|0…0⟩`).
pub fn evolve_tableau(c: &Circuit) -> Result<StabilizerTableau, StateError> {
    let mut t = match &c.input_stabilizers {
        Some(g) => StabilizerTableau::new(c.n_qubits, g.clone()).expect("validated stabilizers"),
        None => StabilizerTableau::zero_state(c.n_qubits),
    };
    t.apply_circuit(c)?;
    Ok(t)
}

/// A graph state and the single-qubit layer turning it into the original state.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphForm {
    pub graph: Graph,
    /// Gates to apply to `|G⟩`, in order, to recover the state.
    pub local_cliffords: Vec<Gate>,
}

/// Rewrites a full stabilizer state as local Cliffords on a graph state.
pub fn stabilizer_to_graph_state(t: &StabilizerTableau) -> Result<GraphForm, StateError> {
    let n = t.num_qubits();
    if t.len() != n {
        return Err(StateError::NotFull { n, got: t.len() });
    }
    let mut gens: Vec<PauliString> = t.generators().to_vec();
    // Bring the X-block to echelon form to find the Z-only rows.
    let x_rank = eliminate(&mut gens, |p, c| p.x_bits().get(c), 0..n);
    let z_only: Vec<BitVec> = gens[x_rank..].iter().map(|g| g.z_bits().clone()).collect();
    let (_, hadamards) = Gf2Matrix::from_rows(n, z_only).rref();

    let mut forward = Vec::new();
    for &q in &hadamards {
        forward.push(Gate::new(GateKind::H, vec![q]));
    }
    apply_all(&mut gens, &forward);
    let full = eliminate(&mut gens, |p, c| p.x_bits().get(c), 0..n);
    assert_eq!(full, n, "H layer must make the X block invertible");
    // Rows are now X_i · Z^{A_i}; reorder so row i has its X on qubit i.
    gens.sort_by_key(|g| g.x_bits().first_one());
    let mut phase_layer = Vec::new();
    for (q, g) in gens.iter().enumerate() {
        if g.z_bits().get(q) {
            phase_layer.push(Gate::new(GateKind::Sdg, vec![q]));
        }
    }
    apply_all(&mut gens, &phase_layer);
    let mut sign_layer = Vec::new();
    for (q, g) in gens.iter().enumerate() {
        if g.sign() == Some(-1) {
            sign_layer.push(Gate::new(GateKind::Z, vec![q]));
        }
    }
    apply_all(&mut gens, &sign_layer);
    let adj: Vec<BitVec> = gens.iter().map(|g| g.z_bits().clone()).collect();
    let graph = Graph { adj };
    debug_assert!(graph.stabilizers().same_group(&StabilizerTableau::new(n, gens).expect("commuting")));

    let mut local_cliffords = sign_layer;
    local_cliffords.extend(phase_layer.into_iter().map(|g| Gate::new(GateKind::S, g.qubits)));
    local_cliffords.extend(forward);
    Ok(GraphForm { graph, local_cliffords })
}

fn apply_all(gens: &mut [PauliString], gates: &[Gate]) {
    for g in gens.iter_mut() {
        for gate in gates {
            crate::clifford::conjugate(g, gate, crate::clifford::Direction::Forward).expect("Clifford layer");
        }
    }
}

/// Gauss–Jordan elimination by generator multiplication; returns the rank.
fn eliminate(gens: &mut [PauliString], bit: impl Fn(&PauliString, usize) -> bool, cols: std::ops::Range<usize>) -> usize {
    let mut r = 0;
    for c in cols {
        let Some(p) = (r..gens.len()).find(|&i| bit(&gens[i], c)) else { continue };
        gens.swap(r, p);
        let pivot = gens[r].clone();
        for (i, g) in gens.iter_mut().enumerate() {
            if i != r && bit(g, c) {
                g.mul_assign_right(&pivot);
            }
        }
        r += 1;
    }
    r
}

fn check_bipartition(n: usize, part: &[usize]) -> Result<(), StateError> {
    if let Some(&v) = part.iter().find(|&&v| v >= n) {
        return Err(StateError::BadVertex(v));
    }
    let mut seen = BitVec::zeros(n);
    for &v in part {
        seen.set(v, true);
    }
    if seen.is_zero() || seen.weight() == n {
        return Err(StateError::EmptySide);
    }
    Ok(())
}

/// GF(2) rank of the adjacency block between `part` and its complement.
pub fn cut_rank(g: &Graph, part: &[usize]) -> Result<usize, StateError> {
    check_bipartition(g.len(), part)?;
    Ok(cut_rank_mask(g, &BitVec::from_indices(g.len(), part.iter().copied())))
}

fn cut_rank_mask(g: &Graph, inside: &BitVec) -> usize {
    let outside: Vec<usize> = (0..g.len()).filter(|&v| !inside.get(v)).collect();
    let rows = inside
        .iter_ones()
        .map(|u| BitVec::from_bools(&outside.iter().map(|&v| g.has_edge(u, v)).collect::<Vec<_>>()))
        .collect();
    Gf2Matrix::from_rows(outside.len(), rows).rank()
}

/// Entanglement entropy in bits across `part`.
pub fn entanglement_entropy(t: &StabilizerTableau, part: &[usize]) -> Result<usize, StateError> {
    let n = t.num_qubits();
    if t.len() != n {
        return Err(StateError::NotFull { n, got: t.len() });
    }
    check_bipartition(n, part)?;
    Ok(t.entropy(part))
}

/// Minimum over branch decompositions of the largest edge cut-rank.
pub fn rank_width_exact(g: &Graph, limit: usize) -> Result<usize, StateError> {
    let n = g.len();
    if n > limit || n > 20 {
        return Err(StateError::TooLarge { n, limit });
    }
    if n <= 1 {
        return Ok(0);
    }
    let full = (1usize << n) - 1;
    let cut: Vec<usize> = (0..=full)
        .into_par_iter()
        .map(|m| cut_rank_mask(g, &BitVec::from_indices(n, (0..n).filter(|b| m >> b & 1 == 1))))
        .collect();
    // best[X]: smallest width of a rooted decomposition of X, counting the edge above X.
    let mut best = vec![usize::MAX; full + 1];
    let mut masks: Vec<usize> = (1..full).collect();
    masks.sort_by_key(|m| m.count_ones());
    for m in masks {
        if m.count_ones() == 1 {
            best[m] = cut[m];
            continue;
        }
        let low = m & m.wrapping_neg();
        let mut inner = usize::MAX;
        // Enumerate splits with the lowest vertex on the left to visit each once.
        let mut sub = (m - 1) & m;
        while sub > 0 {
            if sub & low != 0 {
                inner = inner.min(best[sub].max(best[m ^ sub]));
            }
            sub = (sub - 1) & m;
        }
        best[m] = inner.max(cut[m]);
    }
    let low = 1;
    let mut answer = usize::MAX;
    let mut sub = (full - 1) & full;
    while sub > 0 {
        if sub & low != 0 {
            answer = answer.min(best[sub].max(best[full ^ sub]));
        }
        sub = (sub - 1) & full;
    }
    Ok(answer)
}

/// `⌈n/3⌉`.
pub fn rank_width_upper_bound(n: usize) -> usize {
    n.div_ceil(3)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EwBounds {
    pub n: usize,
    pub upper: usize,
    /// Exact rank-width when the state is small enough, otherwise unknown.
    pub exact_rw: Option<usize>,
    /// Entropies across random balanced cuts; descriptive only.
    pub balanced_cut_entropy_samples: Vec<usize>,
}

pub fn ew_bounds(t: &StabilizerTableau, samples: usize, seed: u64) -> Result<EwBounds, StateError> {
    let n = t.num_qubits();
    let exact_rw = if n <= RANK_WIDTH_LIMIT {
        Some(rank_width_exact(&stabilizer_to_graph_state(t)?.graph, RANK_WIDTH_LIMIT)?)
    } else {
        None
    };
    let mut balanced = Vec::new();
    if n >= 2 {
        let mut rng = rng::stream(seed, 0);
        for _ in 0..samples {
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            balanced.push(entanglement_entropy(t, &order[..n / 2])?);
        }
    }
    Ok(EwBounds { n, upper: rank_width_upper_bound(n), exact_rw, balanced_cut_entropy_samples: balanced })
}
