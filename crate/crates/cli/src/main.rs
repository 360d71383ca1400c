//! `telepsim`: run simulations, reductions and learning experiments from the
//! command line. Every report is a JSON object that echoes the seed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use telepsim_core::circuits::{
    pcliff_distribution, pcliff_prob, pcliff_support, telep_distribution, telep_prob, CorrectionTable, PCliffInstance,
    TelepInstance, TelepOutcome,
};
use telepsim_core::group::Clifford1;
use telepsim_core::hashing::StableHasher;
use telepsim_core::lightcone::{select_embedding_params, BlockCircuit, Window};
use telepsim_core::oracle::{
    falsify_simulator, CountingPcliff, HonestPcliff, OracleRegistry, PcliffOracle, SupportCheckedPcliff,
    SupportCheckedTelep, TelepOracle,
};
use telepsim_core::reduction::{embed, EmbeddingParams, ReductionOracle};
use telepsim_core::tomography::{failure_bound, learn_stabilizer_pair};
use telepsim_core::verify;
use telepsim_core::word_problems::{parse_bits, solve_mod3, solve_parity};
use telepsim_core::{Error, Result};

#[derive(Parser)]
#[command(name = "telepsim", version, about = "Clifford gate-teleportation simulation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Query a Telep_n oracle, or print the exact outcome distribution.
    SimulateTelep {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Query a CliffP(Q)_L oracle, or print the exact outcome distribution.
    SimulatePcliff {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Lightcone statistics of a block circuit.
    AnalyzeLightcone {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = WindowArg::Counting)]
        window: WindowArg,
    },
    /// Solve a CliffP(Q)_L instance with one query to a Telep_n oracle.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Embedding parameters as {"n","L","m","J"}; chosen automatically if absent.
        #[arg(long)]
        params: Option<String>,
        /// Use a block circuit (JSON file) as the Telep_n oracle.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Learn two stabilizers of (I ⊗ ∏C)|Φ⟩ through a CliffP(Q)_L oracle.
    LearnStabilizers {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    SolveParity {
        #[arg(long)]
        bits: String,
        #[command(flatten)]
        common: Common,
    },
    SolveMod3 {
        #[arg(long)]
        bits: String,
        #[command(flatten)]
        common: Common,
    },
    /// Look for a zero-probability answer from a candidate Telep_n simulator.
    Falsify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Run the full property suite.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Input {
    /// Inline JSON input.
    #[arg(long, conflicts_with = "file")]
    instance: Option<String>,
    /// Path to a JSON input file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Oracle name from the registry, or table:<path> for a tabulated Q.
    #[arg(long, default_value = "honest")]
    oracle: String,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Counting,
    Embedding,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Window {
        match w {
            WindowArg::Counting => Window::Counting,
            WindowArg::Embedding => Window::Embedding,
        }
    }
}

const EXIT_INVALID: u8 = 1;
const EXIT_CONTRACT: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY_FAILED: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ContractViolation(_) | Error::Oracle(_) => EXIT_CONTRACT,
        Error::BudgetExhausted { .. } => EXIT_BUDGET,
        _ => EXIT_INVALID,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        EXIT_CONTRACT => "contract-violation",
        EXIT_BUDGET => "budget-exhausted",
        _ => "invalid-input",
    }
}

impl Input {
    fn read(&self) -> Result<String> {
        match (&self.instance, &self.file) {
            (Some(s), None) => Ok(s.clone()),
            (None, Some(p)) => Ok(fs::read_to_string(p)?),
            _ => Err(Error::InvalidInput("pass exactly one of --instance or --file".into())),
        }
    }

    fn parse<T: serde::de::DeserializeOwned>(&self) -> Result<T> {
        Ok(serde_json::from_str(&self.read()?)?)
    }

    /// The `cliffords` array of any instance-shaped object.
    fn cliffords(&self) -> Result<Vec<Clifford1>> {
        let v: Value = serde_json::from_str(&self.read()?)?;
        let arr = v
            .get("cliffords")
            .cloned()
            .ok_or_else(|| Error::InvalidInput("input has no \"cliffords\" field".into()))?;
        let cl: Vec<Clifford1> = serde_json::from_value(arr)?;
        if cl.is_empty() {
            return Err(Error::InvalidInput("need at least one clifford".into()));
        }
        Ok(cl)
    }
}

fn telep_oracle(common: &Common) -> Result<Box<dyn TelepOracle>> {
    OracleRegistry::default().telep(&common.oracle, common.seed)
}

fn pcliff_oracle(common: &Common) -> Result<Box<dyn PcliffOracle>> {
    match common.oracle.strip_prefix("table:") {
        Some(path) => {
            let table = CorrectionTable::from_json(&fs::read_to_string(path)?)?;
            Ok(Box::new(HonestPcliff::with_label(
                Arc::new(table),
                common.oracle.clone(),
            )))
        }
        None => OracleRegistry::default().pcliff(&common.oracle, common.seed),
    }
}

fn pauli_distribution(dist: &[f64], n: usize) -> Value {
    let map: serde_json::Map<String, Value> = dist
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| (TelepOutcome::from_index(i, n).to_string(), json!(p)))
        .collect();
    Value::Object(map)
}

fn simulate_telep(input: &Input, common: &Common, exhaustive: bool) -> Result<Value> {
    let inst: TelepInstance = input.parse()?;
    if exhaustive {
        let dist = telep_distribution(&inst)?;
        return Ok(json!({
            "command": "simulate-telep",
            "seed": common.seed,
            "instance": inst,
            "distribution": pauli_distribution(&dist, inst.n()),
        }));
    }
    let oracle = SupportCheckedTelep {
        inner: telep_oracle(common)?,
    };
    let out = oracle.query(&inst)?;
    Ok(json!({
        "command": "simulate-telep",
        "seed": common.seed,
        "oracle": common.oracle,
        "instance": inst,
        "outcome": out,
        "outcome_string": out.to_string(),
        "probability": telep_prob(&inst, &out)?,
    }))
}

fn simulate_pcliff(input: &Input, common: &Common, exhaustive: bool) -> Result<Value> {
    let inst: PCliffInstance = input.parse()?;
    let oracle = SupportCheckedPcliff {
        inner: pcliff_oracle(common)?,
    };
    let q = oracle
        .correction()
        .ok_or_else(|| Error::Oracle(format!("{} hides its correction", common.oracle)))?;
    let q_value = q.correction(&inst.cliffords);
    if exhaustive {
        let dist = pcliff_distribution(q, &inst);
        return Ok(json!({
            "command": "simulate-pcliff",
            "seed": common.seed,
            "oracle": common.oracle,
            "instance": inst,
            "q": q_value,
            "distribution": pauli_distribution(&dist, 1),
        }));
    }
    let p = oracle.query(&inst)?;
    let prob = pcliff_prob(q, &inst, p);
    Ok(json!({
        "command": "simulate-pcliff",
        "seed": common.seed,
        "oracle": common.oracle,
        "instance": inst,
        "q": q_value,
        "p": p,
        "probability": prob,
    }))
}

fn analyze_lightcone(input: &Input, common: &Common, window: WindowArg) -> Result<Value> {
    let circuit = BlockCircuit::from_json(&input.read()?)?;
    let report = circuit.report(window.into());
    let embedding = match select_embedding_params(&circuit) {
        Ok(p) => json!(p),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "command": "analyze-lightcone",
        "seed": common.seed,
        "report": report,
        "embedding": embedding,
    }))
}

fn reduce(input: &Input, common: &Common, params: Option<&str>, circuit: Option<&PathBuf>) -> Result<Value> {
    let inst: PCliffInstance = input.parse()?;
    let l = inst.len();
    let (oracle, params, oracle_name): (Arc<dyn TelepOracle>, EmbeddingParams, String) = match circuit {
        Some(path) => {
            let c = BlockCircuit::from_json(&fs::read_to_string(path)?)?;
            let chosen = select_embedding_params(&c)?;
            let p = match params {
                Some(s) => serde_json::from_str(s)?,
                None => chosen,
            };
            (Arc::new(c), p, format!("circuit:{}", path.display()))
        }
        None => {
            let p = match params {
                Some(s) => serde_json::from_str(s)?,
                // m > n/2 keeps the default shaped like a circuit embedding
                None => EmbeddingParams::causal(2 * l + 2, l, l + 2)?,
            };
            (Arc::from(telep_oracle(common)?), p, common.oracle.clone())
        }
    };
    let red = ReductionOracle::new(oracle.clone(), params.clone());
    let telep = embed(&inst, &params)?;
    let answer = oracle.query(&telep)?;
    let p = red.query(&inst)?;
    let q = red
        .correction()
        .expect("reduction exposes Q")
        .correction(&inst.cliffords);
    let mut table = CorrectionTable::new(l);
    table.insert(&inst.cliffords, q)?;
    let in_support = pcliff_support(&table, &inst, p);
    let report = json!({
        "command": "reduce",
        "seed": common.seed,
        "oracle": oracle_name,
        "params": params,
        "instance": inst,
        "telep_instance": telep,
        "telep_outcome": answer.to_string(),
        "p": p,
        "q": q,
        "in_support": in_support,
    });
    if !in_support {
        return Err(Error::ContractViolation(format!(
            "reduction answered {p} outside the support for Q = {q}: {report}"
        )));
    }
    Ok(report)
}

fn learn_stabilizers(input: &Input, common: &Common) -> Result<Value> {
    let cliffords = input.cliffords()?;
    let oracle = CountingPcliff::new(SupportCheckedPcliff {
        inner: pcliff_oracle(common)?,
    });
    let mut rng = StableHasher::new(common.seed).rng();
    let res = learn_stabilizer_pair(&oracle, &cliffords, common.budget, &mut rng)?;
    Ok(json!({
        "command": "learn-stabilizers",
        "seed": common.seed,
        "budget": common.budget,
        "oracle": common.oracle,
        "cliffords": cliffords,
        "stabilizers": res.pair,
        "draws": res.draws,
        "queries": oracle.count(),
        "failure_bound": failure_bound(common.budget),
    }))
}

fn solve_word(bits: &str, common: &Common, mod3: bool) -> Result<Value> {
    let x = parse_bits(bits)?;
    let oracle = SupportCheckedPcliff {
        inner: pcliff_oracle(common)?,
    };
    let mut rng = StableHasher::new(common.seed).rng();
    let (key, value) = if mod3 {
        ("mod3", solve_mod3(&oracle, &x, common.budget, &mut rng)?)
    } else {
        ("parity", solve_parity(&oracle, &x, common.budget, &mut rng)?)
    };
    let mut report = json!({
        "command": if mod3 { "solve-mod3" } else { "solve-parity" },
        "seed": common.seed,
        "budget": common.budget,
        "oracle": common.oracle,
        "bits": bits,
    });
    report[key] = json!(value);
    Ok(report)
}

fn falsify(common: &Common, n: usize, trials: usize) -> Result<Value> {
    let candidate = telep_oracle(common)?;
    let found = falsify_simulator(candidate.as_ref(), n, trials, common.seed)?;
    let counterexample = match &found {
        Some(c) => json!({
            "trial": c.trial,
            "instance": c.instance,
            "answer": c.answer.to_string(),
            "probability": telep_prob(&c.instance, &c.answer)?,
        }),
        None => Value::Null,
    };
    Ok(json!({
        "command": "falsify",
        "seed": common.seed,
        "candidate": common.oracle,
        "n": n,
        "trials": trials,
        "refuted": found.is_some(),
        "counterexample": counterexample,
    }))
}

fn emit(report: &Value, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, &text)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> (Result<Value>, &Common, &'static str) {
    match &cli.command {
        Command::SimulateTelep {
            input,
            common,
            exhaustive,
        } => (simulate_telep(input, common, *exhaustive), common, "simulate-telep"),
        Command::SimulatePcliff {
            input,
            common,
            exhaustive,
        } => (simulate_pcliff(input, common, *exhaustive), common, "simulate-pcliff"),
        Command::AnalyzeLightcone { input, common, window } => {
            (analyze_lightcone(input, common, *window), common, "analyze-lightcone")
        }
        Command::Reduce {
            input,
            common,
            params,
            circuit,
        } => (
            reduce(input, common, params.as_deref(), circuit.as_ref()),
            common,
            "reduce",
        ),
        Command::LearnStabilizers { input, common } => (learn_stabilizers(input, common), common, "learn-stabilizers"),
        Command::SolveParity { bits, common } => (solve_word(bits, common, false), common, "solve-parity"),
        Command::SolveMod3 { bits, common } => (solve_word(bits, common, true), common, "solve-mod3"),
        Command::Falsify { common, n, trials } => (falsify(common, *n, *trials), common, "falsify"),
        Command::Verify { common } => (Ok(json!(verify::run_all(common.seed))), common, "verify"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, common, command) = run(&cli);
    let (report, code) = match result {
        Ok(report) => {
            let failed = command == "verify" && report["all_passed"] == json!(false);
            (report, if failed { EXIT_VERIFY_FAILED } else { 0 })
        }
        Err(e) => {
            let mut report = json!({
                "command": command,
                "seed": common.seed,
                "error": error_kind(&e),
                "message": e.to_string(),
            });
            if let Error::BudgetExhausted { partial, .. } = &e {
                report["partial"] = json!(partial);
            }
            (report, exit_code(&e))
        }
    };
    if let Err(e) = emit(&report, common.json_out.as_ref()) {
        eprintln!("telepsim: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    ExitCode::from(code)
}
