//! Check circuitry: ancilla preparation, controlled Paulis, phase compensation and routing of
//! ancilla paths with half-SWAPs.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::propagate::{sweep_back, RotationMode};
use crate::synthesis::{Check, Synthesizer};
use crate::wires::{UnknownWire, WireGraph};

/// Longest supported ancilla path.
pub const MAX_PATH_LEN: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InsertionError {
    #[error("check {0} is not valid on this circuit")]
    InvalidCheck(usize),
    #[error(transparent)]
    UnknownWire(#[from] UnknownWire),
    #[error("ancilla path of length {0} exceeds the supported maximum of {MAX_PATH_LEN}")]
    PathTooLong(usize),
    #[error("qubit {data} is not adjacent to ancilla {ancilla}")]
    NotAdjacent { data: usize, ancilla: usize },
    #[error("ancilla qubit {0} is already in use")]
    AncillaCollision(usize),
    #[error("no free position {position} on path {path}")]
    BadPlacement { path: usize, position: usize },
    #[error("checks {0} and {1} sit on different paths but need an odd number of CZs")]
    CrossPathParity(usize, usize),
    #[error("hardware graph line {line}: {message}")]
    GraphSyntax { line: usize, message: String },
    #[error("gate {gate} acts on {a},{b} which are not coupled")]
    Uncoupled { gate: usize, a: usize, b: usize },
}

/// Undirected coupling graph over physical qubits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardwareGraph {
    adjacency: BTreeMap<usize, BTreeSet<usize>>,
}

impl HardwareGraph {
    pub fn new() -> HardwareGraph {
        HardwareGraph::default()
    }

    pub fn add_node(&mut self, a: usize) {
        self.adjacency.entry(a).or_default();
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "self loops are not allowed");
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
    }

    pub fn contains(&self, a: usize) -> bool {
        self.adjacency.contains_key(&a)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.keys().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().flat_map(|(&a, s)| s.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.get(&a).into_iter().flatten().copied()
    }

    /// Hop distance, `None` when disconnected.
    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        let mut seen = BTreeSet::from([a]);
        let mut queue = VecDeque::from([(a, 0)]);
        while let Some((x, d)) = queue.pop_front() {
            if x == b {
                return Some(d);
            }
            for y in self.neighbors(x) {
                if seen.insert(y) {
                    queue.push_back((y, d + 1));
                }
            }
        }
        None
    }

    /// Parses `node a` / `edge a b` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<HardwareGraph, InsertionError> {
        let mut g = HardwareGraph::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| InsertionError::GraphSyntax { line: i + 1, message: message.to_string() };
            let mut parts = line.split_whitespace();
            let keyword = parts.next().unwrap_or("");
            let ids: Vec<usize> = parts.map(|t| t.parse().map_err(|_| err("expected a qubit id"))).collect::<Result<_, _>>()?;
            match (keyword, ids.as_slice()) {
                ("node", [a]) => g.add_node(*a),
                ("edge", [a, b]) if a != b => g.add_edge(*a, *b),
                ("edge", [_, _]) => return Err(err("self loop")),
                ("node" | "edge", _) => return Err(err("wrong number of qubit ids")),
                _ => return Err(err("expected `node` or `edge`")),
            }
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for a in self.nodes() {
            writeln!(s, "node {a}").unwrap();
        }
        for (a, b) in self.edges() {
            writeln!(s, "edge {a} {b}").unwrap();
        }
        s
    }

    /// Every 2-qubit gate of `c` acts on an edge.
    pub fn check_connectivity(&self, c: &Circuit) -> Result<(), InsertionError> {
        for g in c.gates.iter().filter(|g| g.kind.is_two_qubit()) {
            let (a, b) = (g.qubits[0], g.qubits[1]);
            if !self.has_edge(a, b) {
                return Err(InsertionError::Uncoupled { gate: g.id, a, b });
            }
        }
        Ok(())
    }
}

/// Ancilla qubits `a_1..a_k` hanging off a data qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AncillaPath {
    pub anchor: usize,
    pub qubits: Vec<usize>,
}

/// Coupling graph plus ancilla paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub graph: HardwareGraph,
    pub paths: Vec<AncillaPath>,
}

impl Layout {
    /// Data qubits on a line (plus every pair the payload couples), with one ancilla path of
    /// `path_len` qubits hanging off each anchor. Ancilla ids follow the data ids in path order.
    pub fn linear(c: &Circuit, anchors: &[usize], path_len: usize) -> Layout {
        let n = c.n_qubits;
        let mut graph = HardwareGraph::new();
        for q in 0..n {
            graph.add_node(q);
            if q + 1 < n {
                graph.add_edge(q, q + 1);
            }
        }
        for g in c.gates.iter().filter(|g| g.kind.is_two_qubit()) {
            graph.add_edge(g.qubits[0], g.qubits[1]);
        }
        let mut next = n;
        let paths = anchors
            .iter()
            .map(|&anchor| {
                let qubits: Vec<usize> = (next..next + path_len).collect();
                next += path_len;
                let mut prev = anchor;
                for &a in &qubits {
                    graph.add_edge(prev, a);
                    prev = a;
                }
                AncillaPath { anchor, qubits }
            })
            .collect();
        Layout { graph, paths }
    }

    /// Reads ancilla paths off a coupling graph: nodes `≥ n_data` are ancillas, each chain starts
    /// at an ancilla coupled to data (anchored at its smallest data neighbor) and follows unused
    /// ancilla neighbors for at most [`MAX_PATH_LEN`] qubits.
    pub fn from_graph(graph: HardwareGraph, n_data: usize) -> Layout {
        let mut used = BTreeSet::new();
        let mut paths = Vec::new();
        let ancillas: Vec<usize> = graph.nodes().filter(|&a| a >= n_data).collect();
        for &start in &ancillas {
            if used.contains(&start) {
                continue;
            }
            let Some(anchor) = graph.neighbors(start).filter(|&d| d < n_data).min() else { continue };
            let mut qubits = vec![start];
            used.insert(start);
            while qubits.len() < MAX_PATH_LEN {
                let last = *qubits.last().unwrap();
                let Some(next) = graph.neighbors(last).filter(|&a| a >= n_data && !used.contains(&a)).min() else { break };
                used.insert(next);
                qubits.push(next);
            }
            paths.push(AncillaPath { anchor, qubits });
        }
        Layout { graph, paths }
    }

    pub fn validate(&self) -> Result<(), InsertionError> {
        let mut used = BTreeSet::new();
        for p in &self.paths {
            if p.qubits.len() > MAX_PATH_LEN {
                return Err(InsertionError::PathTooLong(p.qubits.len()));
            }
            let mut prev = p.anchor;
            for &a in &p.qubits {
                if !used.insert(a) || a == p.anchor {
                    return Err(InsertionError::AncillaCollision(a));
                }
                if !self.graph.has_edge(prev, a) {
                    return Err(InsertionError::NotAdjacent { data: prev, ancilla: a });
                }
                prev = a;
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.graph.nodes().last().map_or(0, |m| m + 1)
    }

    /// Data qubits a path can probe: the anchor, or with `radius ≥ 1` every data qubit coupled to `a_1`.
    pub fn accessible_qubits(&self, path: usize, radius: usize, n_data: usize) -> Vec<usize> {
        let p = &self.paths[path];
        if radius == 0 || p.qubits.is_empty() {
            return vec![p.anchor];
        }
        self.graph.neighbors(p.qubits[0]).filter(|&q| q < n_data).collect()
    }
}

/// Anchors at odd data positions spaced by `stride` (qubit 0 for a single-qubit payload).
pub fn default_anchors(n: usize, stride: usize) -> Vec<usize> {
    if n <= 1 {
        return vec![0];
    }
    (1..n).step_by(stride.max(1)).collect()
}

/// Middle anchor first, then the middles of the left and right halves, breadth first.
pub fn order_ancillae_binary_tree(anchors: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(anchors.len());
    let mut queue = VecDeque::new();
    if !anchors.is_empty() {
        queue.push_back((0, anchors.len() - 1));
    }
    while let Some((lo, hi)) = queue.pop_front() {
        let mid = (lo + hi) / 2;
        out.push(anchors[mid]);
        if mid > lo {
            queue.push_back((lo, mid - 1));
        }
        if mid < hi {
            queue.push_back((mid + 1, hi));
        }
    }
    out
}

/// How ancillas are moved along a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Routing {
    /// SWAP followed by CZ, two entangling gates.
    #[default]
    HalfSwap,
    /// Plain SWAP, three entangling gates.
    Swap,
}

/// SWAP·CZ between `a` and `b` with two CZs.
pub fn half_swap_pair(a: usize, b: usize) -> Vec<Gate> {
    use GateKind::{CZ, H};
    vec![
        Gate::new(H, vec![a]),
        Gate::new(H, vec![b]),
        Gate::new(CZ, vec![a, b]),
        Gate::new(H, vec![b]),
        Gate::new(H, vec![a]),
        Gate::new(CZ, vec![a, b]),
        Gate::new(H, vec![a]),
        Gate::new(H, vec![b]),
    ]
}

/// SWAP between `a` and `b` as three CZ-conjugated CNOTs.
pub fn swap_pair(a: usize, b: usize) -> Vec<Gate> {
    use GateKind::{CZ, H};
    let mut out = Vec::new();
    for (c, t) in [(a, b), (b, a), (a, b)] {
        out.push(Gate::new(H, vec![t]));
        out.push(Gate::new(CZ, vec![c, t]));
        out.push(Gate::new(H, vec![t]));
    }
    out
}

/// Controlled-`P` with `control` as control, in the CZ-native gate set.
pub fn controlled_pauli(control: usize, target: usize, p: Pauli) -> Vec<Gate> {
    use GateKind::{Sdg, CZ, H, S};
    let cz = Gate::new(CZ, vec![control, target]);
    match p {
        Pauli::I => Vec::new(),
        Pauli::Z => vec![cz],
        Pauli::X => vec![Gate::new(H, vec![target]), cz, Gate::new(H, vec![target])],
        Pauli::Y => vec![
            Gate::new(Sdg, vec![target]),
            Gate::new(H, vec![target]),
            cz,
            Gate::new(H, vec![target]),
            Gate::new(S, vec![target]),
        ],
    }
}

/// Gate cancelling the phase `λ` picked up by the ancilla's `|1⟩` branch.
pub fn compensation_gate(phase: Phase) -> Option<GateKind> {
    match phase {
        Phase::ONE => None,
        Phase::MINUS_ONE => Some(GateKind::Z),
        Phase::I => Some(GateKind::Sdg),
        _ => Some(GateKind::S),
    }
}

/// One step of a correction sequence on positions `(position, position + 1)` of a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathMove {
    Cz(usize),
    HalfSwap(usize),
    Swap(usize),
}

impl PathMove {
    pub fn cost(self) -> usize {
        match self {
            PathMove::Cz(_) => 1,
            PathMove::HalfSwap(_) => 2,
            PathMove::Swap(_) => 3,
        }
    }
}

fn pair_bit(k: usize, a: usize, b: usize) -> u32 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    1 << (a * k + b)
}

/// Cheapest move sequence that flips the CZ parity of exactly the `odd` pairs of occupants.
///
/// `occupants[i]` is the label of the ancilla at position `i`; pairs are given by label.
pub fn correction_moves(occupants: &[usize], odd: &[(usize, usize)], routing: Routing) -> Vec<PathMove> {
    let k = occupants.len();
    assert!(k <= MAX_PATH_LEN + 1, "path too long for exhaustive correction search");
    let start_mask = odd.iter().fold(0u32, |m, &(a, b)| m ^ pair_bit(k, a, b));
    let start = (occupants.to_vec(), start_mask);
    let mut dist: BTreeMap<(Vec<usize>, u32), (usize, Option<((Vec<usize>, u32), PathMove)>)> = BTreeMap::new();
    dist.insert(start.clone(), (0, None));
    let mut heap = BinaryHeap::from([Reverse((0usize, start.clone()))]);
    while let Some(Reverse((d, state))) = heap.pop() {
        if dist.get(&state).is_some_and(|&(best, _)| best < d) {
            continue;
        }
        if state.1 == 0 {
            let mut moves = Vec::new();
            let mut cur = state;
            while let Some((_, Some((prev, mv)))) = dist.get(&cur).cloned() {
                moves.push(mv);
                cur = prev;
            }
            moves.reverse();
            return moves;
        }
        for i in 0..k.saturating_sub(1) {
            let candidates = match routing {
                Routing::HalfSwap => [PathMove::Cz(i), PathMove::HalfSwap(i)],
                Routing::Swap => [PathMove::Cz(i), PathMove::Swap(i)],
            };
            for mv in candidates {
                let (mut occ, mut mask) = state.clone();
                match mv {
                    PathMove::Cz(_) => mask ^= pair_bit(k, occ[i], occ[i + 1]),
                    PathMove::HalfSwap(_) => {
                        mask ^= pair_bit(k, occ[i], occ[i + 1]);
                        occ.swap(i, i + 1);
                    }
                    PathMove::Swap(_) => occ.swap(i, i + 1),
                }
                let next = (occ, mask);
                let nd = d + mv.cost();
                if dist.get(&next).is_none_or(|&(best, _)| nd < best) {
                    dist.insert(next.clone(), (nd, Some((state.clone(), mv))));
                    heap.push(Reverse((nd, next)));
                }
            }
        }
    }
    unreachable!("every parity pattern on a connected path is correctable")
}

/// A check placed at a position of an ancilla path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedCheck {
    pub path: usize,
    pub position: usize,
    pub check: Check,
}

/// Entangling gates attributed to one check.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOverhead {
    pub controlled: usize,
    pub routing: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InsertionPlan {
    pub circuit: Circuit,
    pub overhead: Vec<CheckOverhead>,
    /// Entangling gates spent moving ancillas.
    pub routing_entangling: usize,
    /// Entangling gates spent restoring even CZ parity.
    pub correction_entangling: usize,
    /// Half-SWAPs and SWAPs applied to each pair of checks (by check index).
    pub swap_ledger: BTreeMap<(usize, usize), usize>,
    /// CZ parity per check pair after corrections; every entry is even on success.
    pub parity: BTreeMap<(usize, usize), bool>,
    pub phases: Vec<Phase>,
}

impl InsertionPlan {
    pub fn entangling_overhead(&self, payload: &Circuit) -> usize {
        self.circuit.two_qubit_count() - payload.two_qubit_count()
    }
}

struct Builder {
    circuit: Circuit,
}

impl Builder {
    fn emit(&mut self, gates: Vec<Gate>) -> usize {
        let mut entangling = 0;
        for g in gates {
            entangling += usize::from(g.kind.is_two_qubit());
            self.circuit.push(g).expect("gate within dressed register");
        }
        entangling
    }

    fn one(&mut self, kind: GateKind, q: usize) {
        self.circuit.push(Gate::new(kind, vec![q])).expect("gate within dressed register");
    }
}

struct Event {
    after: Option<usize>,
    qubit: usize,
    check: usize,
    pauli: Pauli,
}

/// Dresses `syn`'s circuit with every placed check.
///
/// Without a layout each check gets its own ancilla (its `ancilla` field, or the next free
/// qubit) and no routing is needed. With a layout, the check's ancilla starts on its path
/// position and is moved to `a_1` whenever it has to act on data.
pub fn insert_checks(
    syn: &Synthesizer<'_>,
    layout: Option<&Layout>,
    placed: &[PlacedCheck],
    routing: Routing,
) -> Result<InsertionPlan, InsertionError> {
    let payload = syn.circuit();
    let wires = syn.wires();
    let n = payload.n_qubits;
    let phases = placed
        .iter()
        .enumerate()
        .map(|(j, p)| syn.check_phase(&p.check).map_err(|_| InsertionError::InvalidCheck(j)))
        .collect::<Result<Vec<_>, _>>()?;

    // Home qubit of every check, plus per-path occupancy.
    let mut home = Vec::with_capacity(placed.len());
    let mut occupancy: Vec<Vec<Option<usize>>> = Vec::new();
    let total;
    match layout {
        Some(l) => {
            l.validate()?;
            occupancy = l.paths.iter().map(|p| vec![None; p.qubits.len()]).collect();
            for (j, p) in placed.iter().enumerate() {
                let slot = occupancy
                    .get_mut(p.path)
                    .and_then(|o| o.get_mut(p.position))
                    .filter(|s| s.is_none())
                    .ok_or(InsertionError::BadPlacement { path: p.path, position: p.position })?;
                *slot = Some(j);
                home.push(l.paths[p.path].qubits[p.position]);
            }
            for (pi, occ) in occupancy.iter_mut().enumerate() {
                let used = occ.iter().take_while(|s| s.is_some()).count();
                if occ[used..].iter().any(Option::is_some) {
                    let position = occ.iter().position(Option::is_none).unwrap_or(0);
                    return Err(InsertionError::BadPlacement { path: pi, position });
                }
                occ.truncate(used);
            }
            total = l.num_qubits().max(n);
        }
        None => {
            let mut used: BTreeSet<usize> = (0..n).collect();
            let mut next = n;
            for p in placed {
                let a = match p.check.ancilla {
                    Some(a) => a,
                    None => {
                        while used.contains(&next) {
                            next += 1;
                        }
                        next
                    }
                };
                if !used.insert(a) {
                    return Err(InsertionError::AncillaCollision(a));
                }
                home.push(a);
            }
            total = used.iter().last().map_or(n, |m| m + 1);
        }
    }

    let mut events = Vec::new();
    for (j, p) in placed.iter().enumerate() {
        for m in &p.check.members {
            wires.check(m.wire)?;
            events.push(Event { after: wires.producer(m.wire), qubit: m.wire.qubit, check: j, pauli: m.pauli });
        }
    }
    events.sort_by_key(|e| (e.after.map_or(0, |g| g + 1), e.qubit, e.check));

    let mut b = Builder { circuit: Circuit::new(total) };
    let mut position: Vec<usize> = placed.iter().map(|p| p.position).collect();
    let mut overhead = vec![CheckOverhead::default(); placed.len()];
    let mut swap_ledger = BTreeMap::new();
    let mut routing_entangling = 0;
    for &a in &home {
        b.one(GateKind::H, a);
    }

    let mut fire = |b: &mut Builder, e: &Event, position: &mut Vec<usize>, occupancy: &mut Vec<Vec<Option<usize>>>| {
        let j = e.check;
        let control = match layout {
            None => home[j],
            Some(l) => {
                let path = &l.paths[placed[j].path];
                let occ = &mut occupancy[placed[j].path];
                while position[j] > 0 {
                    let i = position[j] - 1;
                    let other = occ[i].expect("prefix occupancy");
                    let (qa, qb) = (path.qubits[i], path.qubits[i + 1]);
                    let cost = b.emit(match routing {
                        Routing::HalfSwap => half_swap_pair(qa, qb),
                        Routing::Swap => swap_pair(qa, qb),
                    });
                    overhead[j].routing += cost;
                    routing_entangling += cost;
                    *swap_ledger.entry((j.min(other), j.max(other))).or_insert(0) += 1;
                    occ.swap(i, i + 1);
                    position[other] += 1;
                    position[j] -= 1;
                }
                if !l.graph.has_edge(path.qubits[0], e.qubit) {
                    return Err(InsertionError::NotAdjacent { data: e.qubit, ancilla: path.qubits[0] });
                }
                path.qubits[0]
            }
        };
        overhead[j].controlled += b.emit(controlled_pauli(control, e.qubit, e.pauli));
        Ok(())
    };

    let mut next_event = 0;
    while next_event < events.len() && events[next_event].after.is_none() {
        fire(&mut b, &events[next_event], &mut position, &mut occupancy)?;
        next_event += 1;
    }
    for g in &payload.gates {
        b.circuit.push(g.clone()).expect("payload gate");
        while next_event < events.len() && events[next_event].after == Some(g.id) {
            fire(&mut b, &events[next_event], &mut position, &mut occupancy)?;
            next_event += 1;
        }
    }
    drop(fire);

    let current = |j: usize, position: &[usize]| match layout {
        Some(l) => l.paths[placed[j].path].qubits[position[j]],
        None => home[j],
    };

    // Pairwise CZ parity seen by each ancilla's X observable.
    let parity = ancilla_parity(&b.circuit, &home, &(0..placed.len()).map(|j| current(j, &position)).collect::<Vec<_>>());
    let mut correction_entangling = 0;
    if let Some(l) = layout {
        for (pi, path) in l.paths.iter().enumerate() {
            let occ: Vec<usize> = occupancy[pi].iter().map(|s| s.expect("prefix occupancy")).collect();
            let odd: Vec<(usize, usize)> = parity.iter().filter(|(&(a, bb), &v)| v && occ.contains(&a) && occ.contains(&bb)).map(|(&k, _)| k).collect();
            if odd.is_empty() {
                continue;
            }
            let local = |j: usize| occ.iter().position(|&x| x == j).expect("occupant");
            let odd: Vec<(usize, usize)> = odd.iter().map(|&(a, bb)| (local(a), local(bb))).collect();
            let labels: Vec<usize> = (0..occ.len()).collect();
            let mut live = occ.clone();
            for mv in correction_moves(&labels, &odd, routing) {
                let (i, gates) = match mv {
                    PathMove::Cz(i) => (i, vec![Gate::new(GateKind::CZ, vec![path.qubits[i], path.qubits[i + 1]])]),
                    PathMove::HalfSwap(i) => (i, half_swap_pair(path.qubits[i], path.qubits[i + 1])),
                    PathMove::Swap(i) => (i, swap_pair(path.qubits[i], path.qubits[i + 1])),
                };
                correction_entangling += b.emit(gates);
                if !matches!(mv, PathMove::Cz(_)) {
                    let (x, y) = (live[i], live[i + 1]);
                    *swap_ledger.entry((x.min(y), x.max(y))).or_insert(0) += 1;
                    live.swap(i, i + 1);
                    position[x] += 1;
                    position[y] -= 1;
                }
            }
        }
        for (&(a, bb), &v) in &parity {
            if v && placed[a].path != placed[bb].path {
                return Err(InsertionError::CrossPathParity(a, bb));
            }
        }
    } else {
        for (&(a, bb), &v) in &parity {
            if v {
                correction_entangling += b.emit(vec![Gate::new(GateKind::CZ, vec![home[a], home[bb]])]);
            }
        }
    }

    let finals: Vec<usize> = (0..placed.len()).map(|j| current(j, &position)).collect();
    for (j, &a) in finals.iter().enumerate() {
        if let Some(kind) = compensation_gate(phases[j]) {
            b.one(kind, a);
        }
    }
    for &a in &finals {
        b.one(GateKind::H, a);
    }
    let mut circuit = b.circuit;
    circuit.ancillas = finals;
    let extra: Vec<PauliString> = (n..total).map(|q| PauliString::single(total, q, Pauli::Z)).collect();
    let mut gens: Vec<PauliString> = syn.stabilizers().generators().iter().map(|g| g.extended(total)).collect();
    gens.extend(extra);
    if !gens.is_empty() {
        circuit.input_stabilizers = Some(gens);
    }
    let parity = ancilla_parity_final(&circuit, &home);
    debug_assert!(parity.values().all(|v| !v));
    Ok(InsertionPlan { circuit, overhead, routing_entangling, correction_entangling, swap_ledger, parity, phases })
}

/// `(a, b) → true` when `a`'s X observable at `finals[a]` picks up an X on `b`'s home input.
fn ancilla_parity(c: &Circuit, home: &[usize], finals: &[usize]) -> BTreeMap<(usize, usize), bool> {
    let wires = WireGraph::new(c);
    let start = c.gates.len().checked_sub(1);
    let mut out = BTreeMap::new();
    let backs: Vec<PauliString> = finals
        .iter()
        .map(|&f| {
            let op = PauliString::single(c.n_qubits, f, Pauli::X);
            sweep_back(c, &wires, op, start, RotationMode::Skeleton, false).expect("skeleton propagation").0
        })
        .collect();
    for a in 0..home.len() {
        for b in a + 1..home.len() {
            let ab = backs[a].get(home[b]).bits().0;
            debug_assert_eq!(ab, backs[b].get(home[a]).bits().0, "parity must be symmetric");
            out.insert((a, b), ab);
        }
    }
    out
}

fn ancilla_parity_final(c: &Circuit, home: &[usize]) -> BTreeMap<(usize, usize), bool> {
    // After the closing H the measured Z is the pre-H X observable.
    let wires = WireGraph::new(c);
    let start = c.gates.len().checked_sub(1);
    let backs: Vec<PauliString> = c
        .ancillas
        .iter()
        .map(|&f| {
            let op = PauliString::single(c.n_qubits, f, Pauli::Z);
            sweep_back(c, &wires, op, start, RotationMode::Skeleton, false).expect("skeleton propagation").0
        })
        .collect();
    let mut out = BTreeMap::new();
    for a in 0..home.len() {
        for b in a + 1..home.len() {
            out.insert((a, b), backs[a].get(home[b]).bits().0);
        }
    }
    out
}

/// Dresses `c` with one check on qubit `ancilla`, compensating its phase.
pub fn implement_check(c: &Circuit, ch: &Check, ancilla: usize) -> Result<Circuit, InsertionError> {
    implement_with(&Synthesizer::new(c), ch, ancilla)
}

/// As [`implement_check`] with the phase computed against the synthesizer's stabilizers.
pub fn implement_with(syn: &Synthesizer<'_>, ch: &Check, ancilla: usize) -> Result<Circuit, InsertionError> {
    if ancilla < syn.circuit().n_qubits {
        return Err(InsertionError::AncillaCollision(ancilla));
    }
    let mut check = ch.clone();
    check.ancilla = Some(ancilla);
    let plan = insert_checks(syn, None, &[PlacedCheck { path: 0, position: 0, check }], Routing::HalfSwap)?;
    Ok(plan.circuit)
}

/// Routes the checks of one path; check `j` starts on position `j`.
pub fn route_ancilla_path(
    syn: &Synthesizer<'_>,
    graph: &HardwareGraph,
    path: &AncillaPath,
    checks: &[Check],
    routing: Routing,
) -> Result<InsertionPlan, InsertionError> {
    if path.qubits.len() > MAX_PATH_LEN {
        return Err(InsertionError::PathTooLong(path.qubits.len()));
    }
    let layout = Layout { graph: graph.clone(), paths: vec![path.clone()] };
    let placed: Vec<PlacedCheck> =
        checks.iter().enumerate().map(|(j, ch)| PlacedCheck { path: 0, position: j, check: ch.clone() }).collect();
    insert_checks(syn, Some(&layout), &placed, routing)
}
