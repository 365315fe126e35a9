//! As-late-as-possible scheduling and per-wire idle times.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::wires::{Wire, WireGraph};

/// Gate durations in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateTimes {
    pub entangling: f64,
    pub single: f64,
    pub diagonal: f64,
}

impl Default for GateTimes {
    fn default() -> Self {
        GateTimes { entangling: 60e-9, single: 50e-9, diagonal: 0.0 }
    }
}

impl GateTimes {
    pub fn duration(&self, g: &Gate) -> f64 {
        if g.kind.is_two_qubit() {
            self.entangling
        } else if g.is_diagonal() {
            self.diagonal
        } else {
            self.single
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub makespan: f64,
    /// Idle time per wire, indexed by [`WireGraph::index`].
    pub idle: Vec<f64>,
}

impl Schedule {
    pub fn idle_of(&self, g: &WireGraph, w: Wire) -> f64 {
        self.idle[g.index(w)]
    }
}

pub fn schedule_alap(c: &Circuit, wires: &WireGraph, times: &GateTimes) -> Schedule {
    let m = c.gates.len();
    let dur: Vec<f64> = c.gates.iter().map(|g| times.duration(g)).collect();
    let mut asap_end = vec![0.0f64; m];
    for g in 0..m {
        let ready = wires
            .inputs(g)
            .filter_map(|w| wires.producer(w))
            .map(|p| asap_end[p])
            .fold(0.0, f64::max);
        asap_end[g] = ready + dur[g];
    }
    let makespan = asap_end.iter().copied().fold(0.0, f64::max);
    let mut start = vec![0.0; m];
    let mut end = vec![0.0; m];
    for g in (0..m).rev() {
        let latest = wires
            .outputs(g)
            .filter_map(|w| wires.consumer(w))
            .map(|s| start[s])
            .fold(makespan, f64::min);
        end[g] = latest;
        start[g] = latest - dur[g];
    }
    let mut idle = vec![0.0; wires.num_wires()];
    for w in wires.wires() {
        let Some(p) = wires.producer(w) else { continue };
        let until = wires.consumer(w).map_or(makespan, |s| start[s]);
        idle[wires.index(w)] = (until - end[p]).max(0.0);
    }
    Schedule { start, end, makespan, idle }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{random_clifford_circuit, GateKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(c: &Circuit) -> (WireGraph, Schedule) {
        let g = WireGraph::new(c);
        let s = schedule_alap(c, &g, &GateTimes::default());
        (g, s)
    }

    #[test]
    fn lone_cz_has_no_slack() {
        let mut c = Circuit::new(2);
        c.gate(GateKind::CZ, &[0, 1]);
        let (g, s) = run(&c);
        assert_eq!(s.idle_of(&g, Wire::new(0, 0)), 0.0);
        assert_eq!(s.idle_of(&g, Wire::new(1, 0)), 0.0);
        assert_eq!(s.idle_of(&g, Wire::new(0, 1)), 0.0);
    }

    #[test]
    fn three_gate_instance() {
        let mut c = Circuit::new(4);
        c.gate(GateKind::CZ, &[0, 1]).gate(GateKind::CZ, &[2, 3]).gate(GateKind::CZ, &[1, 2]);
        let (g, s) = run(&c);
        assert!((s.end[0] - 60e-9).abs() < 1e-18 && (s.end[1] - 60e-9).abs() < 1e-18);
        assert!((s.idle_of(&g, Wire::new(0, 1)) - 60e-9).abs() < 1e-18);
        assert!((s.idle_of(&g, Wire::new(3, 1)) - 60e-9).abs() < 1e-18);
        assert_eq!(s.idle_of(&g, Wire::new(1, 1)), 0.0);
    }

    #[test]
    fn diagonal_gate_is_free() {
        let mut a = Circuit::new(4);
        a.gate(GateKind::CZ, &[0, 1]).gate(GateKind::CZ, &[2, 3]).gate(GateKind::CZ, &[1, 2]);
        let mut b = Circuit::new(4);
        b.gate(GateKind::CZ, &[0, 1]).gate(GateKind::S, &[0]).gate(GateKind::CZ, &[2, 3]).gate(GateKind::CZ, &[1, 2]);
        let (ga, sa) = run(&a);
        let (gb, sb) = run(&b);
        assert_eq!(sa.makespan, sb.makespan);
        assert_eq!(sa.idle_of(&ga, Wire::new(0, 1)), sb.idle_of(&gb, Wire::new(0, 1)) + sb.idle_of(&gb, Wire::new(0, 2)));
    }

    #[test]
    fn alap_is_locally_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let c = random_clifford_circuit(6, 40, &mut rng);
            let (g, s) = run(&c);
            for id in 0..c.gates.len() {
                let limit = g.outputs(id).filter_map(|w| g.consumer(w)).map(|x| s.start[x]).fold(s.makespan, f64::min);
                assert!(s.end[id] <= limit + 1e-18);
                assert!((s.end[id] - limit).abs() < 1e-18, "gate {id} could move later");
                for w in g.inputs(id) {
                    if let Some(p) = g.producer(w) {
                        assert!(s.end[p] <= s.start[id] + 1e-18);
                    }
                }
            }
            assert!(s.idle.iter().all(|&t| t >= 0.0));
        }
    }
}
