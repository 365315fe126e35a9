use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use stcheck::circuit::{generate_brickwork, parse_circuit, Circuit, GateKind};
use stcheck::fidelity::{estimate_fidelity, ler_to_fidelity, shot_parity};
use stcheck::insertion::HardwareGraph;
use stcheck::pipeline::{
    build_layout, prepare_payload, run_analyze, run_fidelity_plan, run_sweep, run_synth, ChecksFile, PipelineError, RunConfig,
};
use stcheck::wires::WireGraph;

#[derive(Parser)]
#[command(name = "stcheck", version, about = "Spacetime Pauli checks for Clifford circuits")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo shots per simulated round.
    #[arg(long, global = true)]
    shots: Option<usize>,
    /// Output file, or directory for `synth` and `simulate`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON run configuration; its entries override flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a circuit and print its counts.
    Validate {
        circuit: PathBuf,
        /// Also require every two-qubit gate to be a coupling of this graph.
        #[arg(long)]
        hardware: Option<PathBuf>,
    },
    /// List the wires of a circuit as JSON.
    Wires { circuit: PathBuf },
    /// Write a random brickwork circuit.
    Generate {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Pick checks and write the dressed circuit.
    Synth {
        circuit: Option<PathBuf>,
        #[arg(long)]
        hardware: Option<PathBuf>,
    },
    /// Simulate the payload round by round with the checks from `synth`.
    Simulate {
        circuit: Option<PathBuf>,
        #[arg(long)]
        checks: PathBuf,
    },
    /// Entanglement and graph-state report of the output state.
    Analyze { circuit: Option<PathBuf> },
    /// Direct fidelity estimation plan, shot ingestion or LER conversion.
    Fidelity {
        circuit: Option<PathBuf>,
        #[arg(long)]
        hardware: Option<PathBuf>,
        /// CSV with columns `stabilizer,bits`; bits list every data qubit in order.
        #[arg(long)]
        shots_csv: Option<PathBuf>,
        /// Convert a logical error rate to a fidelity and exit.
        #[arg(long)]
        ler: Option<f64>,
    },
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Prints to stdout unless `--out` names a file.
fn emit(out: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, PipelineError> {
    Ok(parse_circuit(&read(path)?)?)
}

fn load_hardware(path: Option<&Path>) -> Result<Option<HardwareGraph>, PipelineError> {
    path.map(|p| Ok(HardwareGraph::parse(&read(p)?)?)).transpose()
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, o) => *b = o,
    }
}

/// Flags first, then the config file on top.
fn resolve_config(g: &Global) -> Result<RunConfig, PipelineError> {
    let mut cfg = RunConfig::default();
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(s) = g.shots {
        cfg.shots = s;
    }
    cfg.out = g.out.clone();
    if let Some(path) = &g.config {
        let file: Value = serde_json::from_str(&read(path)?).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut base = serde_json::to_value(&cfg).expect("serializable");
        merge(&mut base, file);
        cfg = serde_json::from_value(base).map_err(|e| PipelineError::Config(e.to_string()))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn circuit_path(arg: Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf, PipelineError> {
    arg.or_else(|| cfg.circuit.clone()).ok_or_else(|| PipelineError::Config("no circuit given".into()))
}

fn hardware_path(arg: Option<PathBuf>, cfg: &RunConfig) -> Option<PathBuf> {
    arg.or_else(|| cfg.hardware.clone())
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    let cfg = resolve_config(&cli.global)?;
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| PipelineError::Config(e.to_string()))?;
    }
    let out = cfg.out.clone();
    match cli.command {
        Command::Validate { circuit, hardware } => {
            let c = load_circuit(&circuit)?;
            if let Some(h) = load_hardware(hardware.as_deref())? {
                h.check_connectivity(&c)?;
            }
            let wires = WireGraph::new(&c);
            let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
            for g in &c.gates {
                *kinds.entry(g.kind.name().to_string()).or_default() += 1;
            }
            let mut text = format!(
                "qubits {}\ngates {}\nentangling {}\nrotations {}\nwires {}\n",
                c.n_qubits,
                c.len(),
                c.two_qubit_count(),
                c.count(GateKind::Rot),
                wires.num_wires()
            );
            for (k, v) in kinds {
                text.push_str(&format!("{k} {v}\n"));
            }
            emit(out.as_deref(), &text)
        }
        Command::Wires { circuit } => {
            let c = load_circuit(&circuit)?;
            let wires = WireGraph::new(&c);
            let list: Vec<Value> = wires
                .wires()
                .map(|w| serde_json::json!({"qubit": w.qubit, "slot": w.slot, "producer": wires.producer(w), "consumer": wires.consumer(w)}))
                .collect();
            emit(out.as_deref(), &to_json(&list))
        }
        Command::Generate { qubits, depth } => {
            if qubits < 2 || depth == 0 {
                return Err(PipelineError::Config("brickwork needs at least 2 qubits and depth 1".into()));
            }
            emit(out.as_deref(), &generate_brickwork(qubits, depth, cfg.seed).to_stc())
        }
        Command::Synth { circuit, hardware } => {
            let payload = prepare_payload(load_circuit(&circuit_path(circuit, &cfg)?)?)?;
            let hw = load_hardware(hardware_path(hardware, &cfg).as_deref())?;
            let layout = build_layout(&payload, &cfg, hw)?;
            let result = run_synth(&payload, &cfg, layout)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("stcheck-out"));
            write(&dir.join("dressed.stc"), &result.dressed.to_stc())?;
            write(&dir.join("checks.json"), &to_json(&result.checks))?;
            let mut summary = format!(
                "checks {}\nqubits {}\nentangling {} (+{})\n",
                result.checks.checks.len(),
                result.dressed.n_qubits,
                result.dressed.two_qubit_count(),
                result.dressed.two_qubit_count() - payload.two_qubit_count()
            );
            for s in &result.checks.skipped {
                summary.push_str(&format!("skipped path {} position {}: {}\n", s.path, s.position, s.reason));
            }
            print!("{summary}");
            Ok(())
        }
        Command::Simulate { circuit, checks } => {
            let payload = prepare_payload(load_circuit(&circuit_path(circuit, &cfg)?)?)?;
            let file: ChecksFile =
                serde_json::from_str(&read(&checks)?).map_err(|e| PipelineError::Config(format!("{}: {e}", checks.display())))?;
            let sweep = run_sweep(&payload, &file, &cfg)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &sweep {
                w.serialize(&r.row).map_err(|e| PipelineError::Io(e.to_string()))?;
            }
            let csv_text = String::from_utf8(w.into_inner().map_err(|e| PipelineError::Io(e.to_string()))?).expect("utf-8");
            match out {
                Some(dir) => {
                    write(&dir.join("sweep.csv"), &csv_text)?;
                    write(&dir.join("report.json"), &to_json(&sweep))?;
                }
                None => print!("{csv_text}"),
            }
            Ok(())
        }
        Command::Analyze { circuit } => {
            let payload = load_circuit(&circuit_path(circuit, &cfg)?)?;
            emit(out.as_deref(), &to_json(&run_analyze(&payload, &cfg)?))
        }
        Command::Fidelity { circuit, hardware, shots_csv, ler } => {
            if let Some(l) = ler {
                return emit(out.as_deref(), &format!("{}\n", ler_to_fidelity(l)?));
            }
            let payload = load_circuit(&circuit_path(circuit, &cfg)?)?;
            let hw = load_hardware(hardware_path(hardware, &cfg).as_deref())?;
            let plan = run_fidelity_plan(&payload, &cfg, hw.as_ref())?;
            let Some(csv_path) = shots_csv else {
                return emit(out.as_deref(), &to_json(&plan));
            };
            let n = payload.n_qubits;
            let measured: Vec<usize> = (0..n).collect();
            let mut values = vec![Vec::new(); plan.stabilizers.len()];
            let mut reader = csv::Reader::from_path(&csv_path).map_err(|e| io_err(&csv_path, e))?;
            for rec in reader.records() {
                let rec = rec.map_err(|e| io_err(&csv_path, e))?;
                let bad = || PipelineError::Config(format!("{}: bad row {:?}", csv_path.display(), rec));
                let idx: usize = rec.get(0).and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
                let bits: Vec<bool> = rec.get(1).ok_or_else(bad)?.trim().chars().map(|c| c == '1').collect();
                let s = plan.stabilizers.get(idx).ok_or_else(bad)?;
                values[idx].push(shot_parity(&bits, s, &measured)?.0);
            }
            let (f, se) = estimate_fidelity(&values).map_err(|e| PipelineError::Undefined(e.to_string()))?;
            emit(out.as_deref(), &to_json(&serde_json::json!({"fidelity": f, "standard_error": se})))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
