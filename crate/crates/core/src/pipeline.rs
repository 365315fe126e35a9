//! Run configuration and the end-to-end steps behind the command line.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError};
use crate::fidelity::{plan_fidelity, plan_fold, FidelityError, Fold, FoldPlan, SampledStabilizer, DEFAULT_FOLDS};
use crate::insertion::{default_anchors, insert_checks, HardwareGraph, InsertionError, Layout, PlacedCheck, Routing, MAX_PATH_LEN};
use crate::noise::{estimate, DetectorSet, NoiseError, NoiseModel, SimReport};
use crate::picking::{pick_all, PickConfig, PickError, Round, Skipped};
use crate::state::{ew_bounds, evolve_tableau, stabilizer_to_graph_state, EwBounds, Graph, StateError};
use crate::synthesis::Synthesizer;
use crate::tableau::StabilizerTableau;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Insertion(#[from] InsertionError),
    #[error(transparent)]
    Pick(#[from] PickError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Fidelity(#[from] FidelityError),
    #[error("statistic undefined: {0}")]
    Undefined(String),
}

impl PipelineError {
    /// 2 for bad input, 3 for internal failures, 4 when a statistic is undefined.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Io(_)
            | PipelineError::Circuit(_)
            | PipelineError::Config(_)
            | PipelineError::State(_)
            | PipelineError::Fidelity(_)
            | PipelineError::Insertion(InsertionError::GraphSyntax { .. } | InsertionError::Uncoupled { .. }) => 2,
            PipelineError::Pick(PickError::Noiseless) | PipelineError::Noise(NoiseError::BadRate(_) | NoiseError::BadCoherence(_)) => 2,
            PipelineError::Undefined(_) => 4,
            _ => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub circuit: Option<PathBuf>,
    /// Coupling graph in `node`/`edge` text form; ancillas are the nodes past the payload.
    pub hardware: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Shots per round of the sweep.
    pub shots: usize,
    /// Explicit anchors for a linear layout; `[]` runs without checks.
    pub anchors: Option<Vec<usize>>,
    pub anchor_stride: usize,
    pub path_len: usize,
    pub pick: PickConfig,
    pub fold_k: usize,
    pub dfe_samples: usize,
    pub include_identity: bool,
    /// Readout error per data qubit.
    pub readout: Option<Vec<f64>>,
    pub entropy_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            circuit: None,
            hardware: None,
            out: None,
            seed: 0,
            shots: 100_000,
            anchors: None,
            anchor_stride: 2,
            path_len: 1,
            pick: PickConfig::default(),
            fold_k: DEFAULT_FOLDS,
            dfe_samples: 5,
            include_identity: false,
            readout: None,
            entropy_samples: 16,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
        let (lo, hi) = (self.pick.window_min, self.pick.window_max);
        if !(lo > 0.0 && lo <= 1.0 && hi > 0.0 && hi <= 1.0) {
            return bad("window fractions must lie in (0, 1]");
        }
        if lo > hi {
            return bad("window_min exceeds window_max");
        }
        if self.shots == 0 || self.pick.shots == 0 {
            return bad("shots must be at least 1");
        }
        if self.pick.trials == 0 || self.pick.restarts == 0 {
            return bad("trials and restarts must be at least 1");
        }
        if self.path_len == 0 || self.path_len > MAX_PATH_LEN {
            return bad("path_len must be between 1 and 3");
        }
        if self.anchor_stride == 0 {
            return bad("anchor_stride must be at least 1");
        }
        if self.fold_k == 0 || self.dfe_samples == 0 {
            return bad("fold_k and dfe_samples must be at least 1");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<RunConfig, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }
}

/// Payload with zero-state stabilizers when the file names none.
pub fn prepare_payload(mut c: Circuit) -> Result<Circuit, PipelineError> {
    if c.input_stabilizers.is_none() {
        c.set_stabilizers(Circuit::zero_state_stabilizers(c.n_qubits))?;
    }
    Ok(c)
}

pub fn build_layout(c: &Circuit, cfg: &RunConfig, hardware: Option<HardwareGraph>) -> Result<Layout, PipelineError> {
    let layout = match hardware {
        Some(g) => {
            g.check_connectivity(c)?;
            Layout::from_graph(g, c.n_qubits)
        }
        None => {
            let anchors = cfg.anchors.clone().unwrap_or_else(|| default_anchors(c.n_qubits, cfg.anchor_stride));
            if let Some(&a) = anchors.iter().find(|&&a| a >= c.n_qubits) {
                return Err(PipelineError::Config(format!("anchor {a} is not a data qubit")));
            }
            Layout::linear(c, &anchors, cfg.path_len)
        }
    };
    layout.validate()?;
    Ok(layout)
}

/// Everything needed to rebuild the dressed circuit round by round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChecksFile {
    pub layout: Layout,
    pub routing: Routing,
    pub checks: Vec<PlacedCheck>,
    pub rounds: Vec<Round>,
    pub skipped: Vec<Skipped>,
    pub baseline_score: Option<f64>,
}

pub struct SynthOutput {
    pub dressed: Circuit,
    pub checks: ChecksFile,
}

pub fn run_synth(payload: &Circuit, cfg: &RunConfig, layout: Layout) -> Result<SynthOutput, PipelineError> {
    let stabilizers = stabilizers_of(payload)?;
    let syn = Synthesizer::with_stabilizers(payload, stabilizers);
    let routing = cfg.pick.routing;
    if layout.paths.is_empty() {
        let checks = ChecksFile { layout, routing, checks: Vec::new(), rounds: Vec::new(), skipped: Vec::new(), baseline_score: None };
        return Ok(SynthOutput { dressed: payload.clone(), checks });
    }
    let picked = pick_all(&syn, &layout, &cfg.pick, cfg.seed)?;
    let dressed = insert_checks(&syn, Some(&layout), &picked.committed, routing)?.circuit;
    let checks = ChecksFile {
        layout,
        routing,
        checks: picked.committed,
        rounds: picked.rounds,
        skipped: picked.skipped,
        baseline_score: Some(picked.baseline),
    };
    Ok(SynthOutput { dressed, checks })
}

fn stabilizers_of(c: &Circuit) -> Result<StabilizerTableau, PipelineError> {
    let gens = c.input_stabilizers.clone().unwrap_or_else(|| Circuit::zero_state_stabilizers(c.n_qubits));
    Ok(StabilizerTableau::new(c.n_qubits, gens)?)
}

/// One line of the round sweep; field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub round: usize,
    pub checks: usize,
    pub qubits: usize,
    pub entangling_gates: usize,
    pub ps_rate: f64,
    pub ler: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRound {
    pub row: SweepRow,
    pub report: SimReport,
    pub fidelity: f64,
}

/// Simulates the payload with the first `r` checks for every `r`.
pub fn run_sweep(payload: &Circuit, checks: &ChecksFile, cfg: &RunConfig) -> Result<Vec<SweepRound>, PipelineError> {
    let stabilizers = stabilizers_of(payload)?;
    let syn = Synthesizer::with_stabilizers(payload, stabilizers.clone());
    let n = payload.n_qubits;
    (0..=checks.checks.len())
        .map(|r| {
            let placed = &checks.checks[..r];
            let dressed =
                if r == 0 { payload.clone() } else { insert_checks(&syn, Some(&checks.layout), placed, checks.routing)?.circuit };
            let model = NoiseModel::for_circuit(&dressed, &cfg.pick.noise)?;
            let detectors = DetectorSet::for_payload(&dressed, payload, &stabilizers);
            let report = estimate(&model, &detectors, cfg.shots, cfg.seed)?;
            let (Some(ler), Some(sigma)) = (report.ler_plain, report.ler_sigma) else {
                return Err(PipelineError::Undefined(format!("round {r} accepted no shots")));
            };
            let row = SweepRow {
                round: r,
                checks: r,
                qubits: n + r,
                entangling_gates: dressed.two_qubit_count(),
                ps_rate: report.ps_rate,
                ler,
                sigma,
            };
            Ok(SweepRound { row, report, fidelity: 1.0 - 2.0 * ler })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub n: usize,
    pub gates: usize,
    pub entangling_gates: usize,
    pub graph_edges: Vec<(usize, usize)>,
    pub bounds: EwBounds,
    pub dfe: Vec<SampledStabilizer>,
}

pub fn run_analyze(payload: &Circuit, cfg: &RunConfig) -> Result<StateReport, PipelineError> {
    let t = evolve_tableau(payload)?;
    let form = stabilizer_to_graph_state(&t)?;
    let bounds = ew_bounds(&t, cfg.entropy_samples, cfg.seed)?;
    let dfe = plan_fidelity(&t, cfg.dfe_samples, cfg.seed, cfg.include_identity)?.stabilizers;
    Ok(StateReport {
        n: payload.n_qubits,
        gates: payload.len(),
        entangling_gates: payload.two_qubit_count(),
        graph_edges: form.graph.edges(),
        bounds,
        dfe,
    })
}

/// Measurement plan for DFE with folding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub stabilizers: Vec<SampledStabilizer>,
    /// Fold schedule per sampled stabilizer.
    pub folds: Vec<Vec<Fold>>,
    pub regions: FoldPlan,
}

/// Data-qubit coupling graph: the hardware graph restricted to the payload, or a line.
pub fn support_graph(n: usize, hardware: Option<&HardwareGraph>) -> Graph {
    match hardware {
        Some(h) => {
            let edges: Vec<(usize, usize)> = h.edges().filter(|&(a, b)| a < n && b < n && a != b).collect();
            Graph::from_edges(n, &edges)
        }
        None => Graph::path(n),
    }
}

pub fn run_fidelity_plan(payload: &Circuit, cfg: &RunConfig, hardware: Option<&HardwareGraph>) -> Result<MeasurementPlan, PipelineError> {
    let t = evolve_tableau(payload)?;
    let n = payload.n_qubits;
    let stabilizers = plan_fidelity(&t, cfg.dfe_samples, cfg.seed, cfg.include_identity)?.stabilizers;
    let graph = support_graph(n, hardware);
    let readout = cfg.readout.clone().unwrap_or_else(|| vec![0.0; n]);
    let regions = plan_fold(&graph, &readout, cfg.fold_k.min(n))?;
    let folds = stabilizers.iter().map(|s| regions.schedule(&graph, &s.support)).collect();
    Ok(MeasurementPlan { stabilizers, folds, regions })
}
