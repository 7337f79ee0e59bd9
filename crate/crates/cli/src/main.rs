//! `bsfe` — scenario runner for the bounded-storage protocol library.
//!
//! Every subcommand resolves its parameters in the same order: command
//! line flag, then config file (flat `key=value` lines), then the
//! `BSFE_SEED` environment variable (seed only), then a built-in
//! default. Runs emit a JSONL transcript (`--out -` for stdout) and a
//! short summary table. Exit codes: 0 success, 1 usage error, 2 ledger
//! violation.

mod runners;

use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::process::ExitCode;

const ALLOWED_KEYS: &[&str] = &[
    "l", "s", "r", "n", "m", "lambda", "w", "ell", "trials", "seed", "strategy", "backend",
    "circuit", "input", "out", "store", "reveal",
];

#[derive(Parser)]
#[command(name = "bsfe", version, about = "bounded-storage protocol simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Common {
    /// Flat key=value config file; flags given here override it.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Transcript destination: a path, or `-` for stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Transferred string length / label bits.
    #[arg(long)]
    l: Option<usize>,
    /// Adversary memory bound.
    #[arg(long)]
    s: Option<usize>,
    /// Number of memory-bound applications.
    #[arg(long)]
    r: Option<usize>,
    /// Honest memory scale (streaming scenarios).
    #[arg(long)]
    n: Option<usize>,
    /// Qubits per transfer (overrides the derived value; undersized
    /// values are for attack demonstrations).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    w: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    strategy: Option<String>,
    /// Ciphertext backend where a scheme offers several.
    #[arg(long)]
    backend: Option<String>,
    /// Path to a circuit in the text format.
    #[arg(long)]
    circuit: Option<String>,
    /// Input bits, e.g. `0110`.
    #[arg(long)]
    input: Option<String>,
    /// Qubits an attack strategy may store.
    #[arg(long)]
    store: Option<usize>,
    /// Reveal the master key after the ciphertext window (IND game).
    #[arg(long)]
    reveal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One-out-of-two oblivious transfer round trips.
    RunOt(Common),
    /// One-time program: garble, transfer, evaluate once.
    RunOtp(Common),
    /// Quantum-ciphertext functional encryption round trip.
    RunBqsFe(Common),
    /// Classical-key functional encryption round trip.
    RunCbqsFe(Common),
    /// Streaming functional encryption, both decryption branches.
    RunBcsFe(Common),
    /// Obfuscation built on the streaming scheme.
    RunWgb(Common),
    /// Adversary experiments: ot-sender, cbqs-ind, bcs-forget.
    Attack {
        scenario: String,
        #[command(flatten)]
        common: Common,
    },
    /// Fast subset of the acceptance checks.
    Selftest(Common),
}

/// Merged view of config file and flags.
pub struct Cfg {
    map: BTreeMap<String, String>,
}

impl Cfg {
    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("bad value for `{key}`: {v}")),
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| format!("bad value for `{key}`: {v}")),
        }
    }

    pub fn str(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    pub fn opt(&self, key: &str) -> Option<String> {
        self.get(key).map(|s| s.to_string())
    }

    pub fn seed(&self) -> Result<u64, String> {
        if let Some(v) = self.get("seed") {
            return v.parse().map_err(|_| format!("bad value for `seed`: {v}"));
        }
        match std::env::var("BSFE_SEED") {
            Ok(v) => v.parse().map_err(|_| format!("bad BSFE_SEED: {v}")),
            Err(_) => Ok(0),
        }
    }
}

fn parse_config_file(path: &str) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let key = key.trim();
        if !ALLOWED_KEYS.contains(&key) {
            return Err(format!("{path}:{}: unknown key `{key}`", lineno + 1));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve(common: &Common) -> Result<Cfg, String> {
    let mut map = match &common.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    put("out", common.out.clone());
    put("seed", common.seed.map(|v| v.to_string()));
    put("trials", common.trials.map(|v| v.to_string()));
    put("l", common.l.map(|v| v.to_string()));
    put("s", common.s.map(|v| v.to_string()));
    put("r", common.r.map(|v| v.to_string()));
    put("n", common.n.map(|v| v.to_string()));
    put("m", common.m.map(|v| v.to_string()));
    put("lambda", common.lambda.map(|v| v.to_string()));
    put("w", common.w.map(|v| v.to_string()));
    put("ell", common.ell.map(|v| v.to_string()));
    put("strategy", common.strategy.clone());
    put("backend", common.backend.clone());
    put("circuit", common.circuit.clone());
    put("input", common.input.clone());
    put("store", common.store.map(|v| v.to_string()));
    if common.reveal {
        put("reveal", Some("1".to_string()));
    }
    Ok(Cfg { map })
}

/// What a runner hands back: summary rows and whether an honest ledger
/// was violated.
pub struct RunOutcome {
    pub summary: Vec<(String, String)>,
    pub violations: u64,
}

fn emit(cfg: &Cfg, transcript: &bsfe_core::Transcript, outcome: &RunOutcome) -> Result<(), String> {
    let jsonl = transcript.to_jsonl();
    match cfg.str("out", "-").as_str() {
        "-" => print!("{jsonl}"),
        path => std::fs::write(path, &jsonl).map_err(|e| format!("{path}: {e}"))?,
    }
    let width = outcome.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &outcome.summary {
        println!("{k:width$}  {v}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap reserves exit 2 for usage; this tool uses 1
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let (common, run): (&Common, runners::Runner) = match &cli.command {
        Command::RunOt(c) => (c, runners::run_ot),
        Command::RunOtp(c) => (c, runners::run_otp),
        Command::RunBqsFe(c) => (c, runners::run_bqs_fe),
        Command::RunCbqsFe(c) => (c, runners::run_cbqs_fe),
        Command::RunBcsFe(c) => (c, runners::run_bcs_fe),
        Command::RunWgb(c) => (c, runners::run_wgb),
        Command::Attack { scenario, common } => {
            return finish_run(common, |cfg, tr| runners::attack(scenario, cfg, tr));
        }
        Command::Selftest(c) => (c, runners::selftest),
    };
    finish_run(common, run)
}

fn finish_run<F>(common: &Common, run: F) -> ExitCode
where
    F: FnOnce(&Cfg, &mut bsfe_core::Transcript) -> Result<RunOutcome, String>,
{
    let cfg = match resolve(common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut transcript = bsfe_core::Transcript::new();
    match run(&cfg, &mut transcript) {
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Ok(outcome) => {
            if let Err(e) = emit(&cfg, &transcript, &outcome) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.violations > 0 {
                eprintln!("ledger violations: {}", outcome.violations);
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
