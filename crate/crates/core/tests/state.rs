use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stcheck::circuit::{random_clifford_circuit, Circuit, GateKind};
use stcheck::state::{
    cut_rank, entanglement_entropy, evolve_tableau, rank_width_exact, rank_width_upper_bound, stabilizer_to_graph_state, Graph,
};
use stcheck::tableau::StabilizerTableau;

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StabilizerTableau {
    let depth = rng.gen_range(0..4 * n + 4);
    evolve_tableau(&random_clifford_circuit(n, depth, rng)).unwrap()
}

fn rebuild(graph: &Graph, gates: &[stcheck::circuit::Gate]) -> StabilizerTableau {
    let mut t = graph.stabilizers();
    for g in gates {
        t.apply_gate(g).unwrap();
    }
    t
}

/// Leaf sets below every edge of every unrooted binary tree on `n` labelled leaves.
fn all_branch_cuts(n: usize) -> Vec<Vec<u32>> {
    // Nodes 0..n are leaves; internal nodes are appended as edges get subdivided.
    fn grow(n: usize, next_leaf: usize, edges: &mut Vec<(usize, usize)>, nodes: usize, out: &mut Vec<Vec<u32>>) {
        if next_leaf == n {
            out.push(edge_cuts(n, edges, nodes));
            return;
        }
        for e in 0..edges.len() {
            let (a, b) = edges[e];
            let mid = nodes;
            edges[e] = (a, mid);
            edges.push((mid, b));
            edges.push((mid, next_leaf));
            grow(n, next_leaf + 1, edges, nodes + 1, out);
            edges.pop();
            edges.pop();
            edges[e] = (a, b);
        }
    }
    let mut out = Vec::new();
    match n {
        0 | 1 => out.push(Vec::new()),
        2 => out.push(vec![1]),
        _ => {
            let hub = n;
            let mut edges = vec![(hub, 0), (hub, 1), (hub, 2)];
            grow(n, 3, &mut edges, n + 1, &mut out);
        }
    }
    out
}

fn edge_cuts(n: usize, edges: &[(usize, usize)], nodes: usize) -> Vec<u32> {
    let mut adj = vec![Vec::new(); nodes];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    edges
        .iter()
        .map(|&(a, b)| {
            let mut mask = 0u32;
            let mut stack = vec![(b, a)];
            while let Some((v, from)) = stack.pop() {
                if v < n {
                    mask |= 1 << v;
                }
                stack.extend(adj[v].iter().filter(|&&w| w != from).map(|&w| (w, v)));
            }
            mask
        })
        .collect()
}

fn brute_rank_width(g: &Graph) -> usize {
    let n = g.len();
    all_branch_cuts(n)
        .iter()
        .map(|cuts| {
            cuts.iter()
                .map(|&m| {
                    let part: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
                    cut_rank(g, &part).unwrap()
                })
                .max()
                .unwrap_or(0)
        })
        .min()
        .unwrap()
}

#[test]
fn tree_enumeration_counts() {
    for (n, count) in [(3, 1), (4, 3), (5, 15), (6, 105), (7, 945)] {
        assert_eq!(all_branch_cuts(n).len(), count);
    }
}

#[test]
fn ghz_is_locally_a_complete_graph() {
    for n in 2..=8 {
        let mut c = Circuit::new(n);
        c.gate(GateKind::H, &[0]);
        for q in 1..n {
            c.gate(GateKind::CX, &[0, q]);
        }
        let t = evolve_tableau(&c).unwrap();
        let form = stabilizer_to_graph_state(&t).unwrap();
        assert!(rebuild(&form.graph, &form.local_cliffords).same_group(&t));
        assert_eq!(rank_width_exact(&form.graph, 8).unwrap(), 1);
        for part in 1..n {
            assert_eq!(cut_rank(&form.graph, &(0..part).collect::<Vec<_>>()).unwrap(), 1);
        }
    }
}

#[test]
fn graph_form_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let t = random_state(n, &mut rng);
        let form = stabilizer_to_graph_state(&t).unwrap();
        assert!(form.graph.edges().iter().all(|&(u, v)| u != v));
        assert!(rebuild(&form.graph, &form.local_cliffords).same_group(&t));
        assert!(form.local_cliffords.iter().all(|g| g.qubits.len() == 1));
    }
}

#[test]
fn cut_rank_equals_entropy_exhaustively() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 2..=10 {
        let t = random_state(n, &mut rng);
        let g = stabilizer_to_graph_state(&t).unwrap().graph;
        for mask in 1..(1u32 << n) - 1 {
            let part: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            assert_eq!(cut_rank(&g, &part).unwrap(), entanglement_entropy(&t, &part).unwrap());
        }
    }
}

#[test]
fn complete_graphs_and_trees_have_width_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=8 {
        assert_eq!(rank_width_exact(&Graph::complete(n), 8).unwrap(), 1);
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        assert_eq!(rank_width_exact(&Graph::from_edges(n, &edges), 8).unwrap(), 1);
    }
}

#[test]
fn exact_width_matches_tree_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for n in 2..=7 {
        for _ in 0..6 {
            let g = Graph::random(n, rng.gen_range(0.2..0.8), &mut rng);
            assert_eq!(rank_width_exact(&g, 8).unwrap(), brute_rank_width(&g), "{}", g.to_text());
        }
    }
    assert_eq!(brute_rank_width(&Graph::cycle(5)), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn width_within_upper_bound(n in 1usize..=8, p in 0.0f64..1.0, seed in any::<u64>()) {
        let g = Graph::random(n, p, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(rank_width_exact(&g, 8).unwrap() <= rank_width_upper_bound(n));
    }

    #[test]
    fn cut_rank_is_symmetric(n in 2usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Graph::random(n, 0.5, &mut rng);
        let part: Vec<usize> = (0..n).filter(|_| rng.gen()).collect();
        prop_assume!(!part.is_empty() && part.len() < n);
        let rest: Vec<usize> = (0..n).filter(|v| !part.contains(v)).collect();
        prop_assert_eq!(cut_rank(&g, &part).unwrap(), cut_rank(&g, &rest).unwrap());
    }
}
