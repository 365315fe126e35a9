//! Window-forced candidate generation, scoring and the per-path commitment loop.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::insertion::{insert_checks, order_ancillae_binary_tree, InsertionError, InsertionPlan, Layout, PlacedCheck, Routing};
use crate::noise::{estimate, DetectorSet, NoiseError, NoiseModel, NoiseParams, SimReport};
use crate::pauli::Pauli;
use crate::rng;
use crate::synthesis::{Check, Member, RotationPolicy, Synthesizer};
use crate::wires::Wire;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PickError {
    #[error(transparent)]
    Insertion(#[from] InsertionError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("a noiseless scorer ranks every check equally; set allow_noiseless to proceed")]
    Noiseless,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PickConfig {
    /// Window bounds as fractions of the support size.
    pub window_min: f64,
    pub window_max: f64,
    pub trials: usize,
    pub restarts: usize,
    /// Shots per candidate score.
    pub shots: usize,
    pub radius: usize,
    pub routing: Routing,
    pub rotation_policy: RotationPolicy,
    pub max_checks: Option<usize>,
    pub noise: NoiseParams,
    pub allow_noiseless: bool,
}

impl Default for PickConfig {
    fn default() -> Self {
        PickConfig {
            window_min: 0.1,
            window_max: 0.3,
            trials: 15,
            restarts: 50,
            shots: 20_000,
            radius: 0,
            routing: Routing::HalfSwap,
            rotation_policy: RotationPolicy::Enforce,
            max_checks: None,
            noise: NoiseParams::default(),
            allow_noiseless: false,
        }
    }
}

/// A committed check and the score that got it in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub round: usize,
    pub path: usize,
    pub position: usize,
    pub check: Check,
    pub entangling_gate_overhead: usize,
    pub score: f64,
    pub score_sigma: f64,
    pub candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub path: usize,
    pub position: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct PickResult {
    pub rounds: Vec<Round>,
    pub skipped: Vec<Skipped>,
    pub committed: Vec<PlacedCheck>,
    /// Score of the configuration without any checks.
    pub baseline: f64,
}

/// Runs the dressed configuration through the Monte Carlo estimator.
pub fn simulate_configuration(
    syn: &Synthesizer<'_>,
    layout: &Layout,
    placed: &[PlacedCheck],
    routing: Routing,
    noise: &NoiseParams,
    shots: usize,
    seed: u64,
) -> Result<(InsertionPlan, SimReport), PickError> {
    let plan = insert_checks(syn, Some(layout), placed, routing)?;
    let model = NoiseModel::for_circuit(&plan.circuit, noise)?;
    let detectors = DetectorSet::for_payload(&plan.circuit, syn.circuit(), syn.stabilizers());
    let report = estimate(&model, &detectors, shots, seed)?;
    Ok((plan, report))
}

/// `−LER` (weighted) of the dressed circuit carrying `committed` plus `candidate`, with its σ.
pub fn score_check(
    syn: &Synthesizer<'_>,
    layout: &Layout,
    committed: &[PlacedCheck],
    candidate: Option<&PlacedCheck>,
    config: &PickConfig,
    seed: u64,
) -> Result<(f64, f64), PickError> {
    let mut placed = committed.to_vec();
    placed.extend(candidate.cloned());
    let (_, r) = simulate_configuration(syn, layout, &placed, config.routing, &config.noise, config.shots, seed)?;
    Ok(match (r.ler_weighted, r.ler_weighted_sigma) {
        (Some(l), Some(s)) => (-l, s),
        _ => (-1.0, 0.0),
    })
}

/// Wires produced by 2-qubit gates on `qubits`, in topological order.
pub fn candidate_support(syn: &Synthesizer<'_>, qubits: &[usize]) -> Vec<Wire> {
    let wires = syn.wires();
    let c = syn.circuit();
    let mut out: Vec<Wire> = c
        .gates
        .iter()
        .filter(|g| g.kind.is_two_qubit())
        .flat_map(|g| wires.outputs(g.id).collect::<Vec<_>>())
        .filter(|w| qubits.contains(&w.qubit))
        .collect();
    out.sort_by_key(|&w| wires.topo_key(w));
    out
}

/// Window size range `[ceil(lo·|L|), floor(hi·|L|)]`, clamped to at least 2 and at most `|L|`.
pub fn window_range(support: usize, config: &PickConfig) -> (usize, usize) {
    let lo = ((config.window_min * support as f64).ceil() as usize).max(2).min(support);
    let hi = ((config.window_max * support as f64).floor() as usize).max(lo).min(support);
    (lo, hi)
}

/// Up to `9 · trials` distinct checks with forced Paulis at both ends of random windows.
pub fn generate_candidates(syn: &Synthesizer<'_>, support: &[Wire], config: &PickConfig, seed: u64) -> Vec<Check> {
    if support.len() < 2 {
        return Vec::new();
    }
    let (lo, hi) = window_range(support.len(), config);
    let mut rng = rng::stream(seed, 0);
    let windows: Vec<&[Wire]> = (0..config.trials)
        .map(|_| {
            let k = rng.gen_range(lo..=hi);
            let start = rng.gen_range(0..=support.len() - k);
            &support[start..start + k]
        })
        .collect();
    let tasks: Vec<(usize, Pauli, Pauli)> = (0..windows.len())
        .flat_map(|t| Pauli::NONTRIVIAL.into_iter().flat_map(move |a| Pauli::NONTRIVIAL.into_iter().map(move |b| (t, a, b))))
        .collect();
    let found: Vec<Option<Check>> = tasks
        .par_iter()
        .enumerate()
        .map(|(i, &(t, a, b))| {
            let window = windows[t];
            let partial = [Member::new(a, window[0]), Member::new(b, window[window.len() - 1])];
            syn.find_valid_check(window, &partial, config.rotation_policy, rng::derive_seed(seed, i as u64 + 1), config.restarts)
                .ok()
        })
        .collect();
    let mut seen = HashSet::new();
    found.into_iter().flatten().filter(|c| seen.insert(c.members.clone())).collect()
}

/// Commits checks on one path position by position, stopping when the best candidate scores
/// worse than the previous commitment by more than its σ.
pub fn pick_checks_for_path(
    syn: &Synthesizer<'_>,
    layout: &Layout,
    path: usize,
    committed: &mut Vec<PlacedCheck>,
    previous: f64,
    config: &PickConfig,
    seed: u64,
    first_round: usize,
) -> Result<(Vec<Round>, Vec<Skipped>, f64), PickError> {
    let qubits = layout.accessible_qubits(path, config.radius, syn.circuit().n_qubits);
    let support = candidate_support(syn, &qubits);
    let mut rounds = Vec::new();
    let mut skipped = Vec::new();
    let mut prev = previous;
    for position in 0..layout.paths[path].qubits.len() {
        if config.max_checks.is_some_and(|m| committed.len() >= m) {
            break;
        }
        let round = first_round + rounds.len();
        let round_seed = rng::derive_seed(seed, round as u64);
        let checks = generate_candidates(syn, &support, config, round_seed);
        if checks.is_empty() {
            skipped.push(Skipped { path, position, reason: "no valid candidate".into() });
            break;
        }
        let score_seed = rng::derive_seed(round_seed, u64::MAX);
        let scored: Vec<Result<(f64, f64, PlacedCheck), PickError>> = checks
            .par_iter()
            .map(|ch| {
                let mut ch = ch.clone();
                ch.ancilla = Some(layout.paths[path].qubits[position]);
                let placed = PlacedCheck { path, position, check: ch };
                let (s, sigma) = score_check(syn, layout, committed, Some(&placed), config, score_seed)?;
                Ok((s, sigma, placed))
            })
            .collect();
        let mut best: Option<(f64, f64, PlacedCheck)> = None;
        for r in scored {
            let (s, sigma, placed) = match r {
                Ok(v) => v,
                Err(PickError::Insertion(_)) => continue,
                Err(e) => return Err(e),
            };
            if best.as_ref().is_none_or(|b| s > b.0) {
                best = Some((s, sigma, placed));
            }
        }
        let Some((score, sigma, placed)) = best else {
            skipped.push(Skipped { path, position, reason: "no candidate could be inserted".into() });
            break;
        };
        if score < prev - sigma {
            break;
        }
        let before = insert_checks(syn, Some(layout), committed, config.routing)?.circuit.two_qubit_count();
        committed.push(placed.clone());
        let after = insert_checks(syn, Some(layout), committed, config.routing)?.circuit.two_qubit_count();
        rounds.push(Round {
            round,
            path,
            position,
            check: placed.check,
            entangling_gate_overhead: after - before,
            score,
            score_sigma: sigma,
            candidates: checks.len(),
        });
        prev = score;
    }
    Ok((rounds, skipped, prev))
}

/// Picks checks on every path, visiting anchors in binary-tree order.
pub fn pick_all(syn: &Synthesizer<'_>, layout: &Layout, config: &PickConfig, seed: u64) -> Result<PickResult, PickError> {
    if config.noise.eps == 0.0 && !config.allow_noiseless {
        return Err(PickError::Noiseless);
    }
    let mut committed = Vec::new();
    let (baseline, _) = score_check(syn, layout, &committed, None, config, rng::derive_seed(seed, u64::MAX))?;
    let anchors: Vec<usize> = layout.paths.iter().map(|p| p.anchor).collect();
    let order = order_ancillae_binary_tree(&(0..anchors.len()).collect::<Vec<_>>());
    let mut rounds = Vec::new();
    let mut skipped = Vec::new();
    for path in order {
        if config.max_checks.is_some_and(|m| committed.len() >= m) {
            break;
        }
        let (r, s, _) = pick_checks_for_path(syn, layout, path, &mut committed, baseline, config, seed, rounds.len())?;
        rounds.extend(r);
        skipped.extend(s);
    }
    Ok(PickResult { rounds, skipped, committed, baseline })
}
