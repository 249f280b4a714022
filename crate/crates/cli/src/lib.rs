//! `airdrop-forge` command line: detection, profit, mechanism solving,
//! verification and synthetic data generation as reproducible batch runs.
//!
//! Exit codes: 0 on success, 1 on input or validation errors, 2 when a
//! solver runs but finds no answer. Failures print a `error_code=<CODE>`
//! line on stderr.

mod error;
mod output;
mod plots;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use airdrop_forge_core::detectors::{
    detect_group, DetectionReport, DetectorConfig, DEFAULT_TIMELINE_BUCKET,
};
use airdrop_forge_core::ledger::{
    load_groups, load_prices, load_transactions, write_groups, write_prices_csv,
    write_transactions, AttackerGroup, Ledger, LedgerFormat,
};
use airdrop_forge_core::mechanism::{
    end_to_end_solve, self_report_sweep, verify_mechanism, MechanismInput,
};
use airdrop_forge_core::profit::{group_profit_report, ProfitReport, RewardParams};
use airdrop_forge_core::synth::{generate, SynthSpec};
use airdrop_forge_core::Decimal;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde_json::json;

pub use error::CliError;
pub use output::{hash_input, InputHash, OutputDir, RunManifest};
pub use plots::{emit_plot_data, PlotSource, PLOT_KINDS};

#[derive(Debug, Parser)]
#[command(name = "airdrop-forge", version, about = "Airdrop hunter analytics and mechanism design")]
struct Cli {
    /// Worker threads for per-group and per-parameter-set work (0 = all cores).
    #[arg(long, global = true, env = "AIRDROP_FORGE_JOBS", default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Funder/receiver, sequential-transfer and uniformity detection per group.
    Detect(DetectArgs),
    /// Expected reward, fees and net profit per address and group.
    Profit(ProfitArgs),
    /// Solve the four-stage airdrop game for a parameter file.
    Solve(SolveArgs),
    /// Check every closed form of the game against its brute-force oracle.
    Verify(VerifyArgs),
    /// Generate a synthetic ledger with planted patterns.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

impl From<Format> for LedgerFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => LedgerFormat::Csv,
            Format::Jsonl => LedgerFormat::Jsonl,
        }
    }
}

#[derive(Debug, Args)]
struct LedgerInput {
    /// Transaction ledger (CSV or JSONL).
    #[arg(long)]
    ledger: PathBuf,
    /// Ledger format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Attacker groups JSON.
    #[arg(long)]
    groups: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: LedgerInput,
    /// Detector config JSON; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Largest relative value change per hop.
    #[arg(long)]
    value_tolerance: Option<Decimal>,
    /// Largest gap between hops, in seconds.
    #[arg(long)]
    time_window: Option<i64>,
    /// Count uniformity threshold, in transactions.
    #[arg(long)]
    count_threshold: Option<u64>,
    /// Volume uniformity threshold, in token units.
    #[arg(long)]
    volume_threshold: Option<Decimal>,
    /// Timeline bucket width in seconds.
    #[arg(long, default_value_t = DEFAULT_TIMELINE_BUCKET)]
    timeline_bucket: i64,
}

#[derive(Debug, Args)]
struct ProfitArgs {
    #[command(flatten)]
    input: LedgerInput,
    /// Daily close prices CSV (`token,date,close_usd`).
    #[arg(long)]
    prices: PathBuf,
    /// Reward parameter JSON; flags below override it.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Base airdrop amount per eligible address, in tokens.
    #[arg(long)]
    base_amount: Option<Decimal>,
    /// Token price in USD.
    #[arg(long)]
    token_price: Option<Decimal>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Parameter JSON: one object, or an array of objects solved in parallel.
    #[arg(long)]
    params: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Intervals of the self-report ratio sweep.
    #[arg(long, default_value_t = 100)]
    sweep_steps: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Mechanism parameter JSON.
    #[arg(long)]
    params: PathBuf,
    /// Also write `verify.json` here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Synth spec JSON; missing fields take defaults.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Overrides the seed in the spec file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Ledger output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if code != 0 {
                eprintln!("error_code=USAGE");
            }
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("error_code={}", e.code());
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Detect(a) => detect(a),
        Command::Profit(a) => profit(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen(a),
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn load_inputs(input: &LedgerInput) -> Result<(Ledger, Vec<AttackerGroup>), CliError> {
    let format = input
        .format
        .map(LedgerFormat::from)
        .unwrap_or_else(|| LedgerFormat::from_path(&input.ledger));
    let ledger = load_transactions(&input.ledger, format)?;
    let groups = load_groups(&input.groups)?;
    Ok((ledger, groups))
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialize")
}

fn detect(a: DetectArgs) -> Result<(), CliError> {
    let (ledger, groups) = load_inputs(&a.input)?;
    let mut cfg: DetectorConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => DetectorConfig::default(),
    };
    if let Some(v) = a.value_tolerance {
        cfg.value_tolerance = v;
    }
    if let Some(v) = a.time_window {
        cfg.time_window = v;
    }
    if let Some(v) = a.count_threshold {
        cfg.count_threshold = v;
    }
    if let Some(v) = a.volume_threshold {
        cfg.volume_threshold = v;
    }
    cfg.validate()?;
    if a.timeline_bucket <= 0 {
        return Err(CliError::Usage("--timeline-bucket must be positive".into()));
    }

    let reports = groups
        .par_iter()
        .map(|g| detect_group(&ledger, g, &cfg, a.timeline_bucket))
        .collect::<Result<Vec<DetectionReport>, _>>()?;

    let mut out = OutputDir::new(&a.input.out);
    for r in &reports {
        out.add_json(format!("{}.detection.json", r.group_id), r);
        let mut csv = String::from("bucket_start,chain_count,avg_value\n");
        for row in &r.timeline {
            csv.push_str(&format!("{},{},{}\n", row.bucket_start, row.chain_count, row.avg_value));
        }
        out.add(format!("{}.timeline.csv", r.group_id), csv);
    }
    let source = PlotSource::Detection(&reports);
    out.add("fig1.csv", emit_plot_data("fig1", &source)?);
    out.add("fig3.csv", emit_plot_data("fig3", &source)?);

    let mut inputs = vec![hash_input(&a.input.ledger)?, hash_input(&a.input.groups)?];
    if let Some(p) = &a.config {
        inputs.push(hash_input(p)?);
    }
    let params = json!({ "detector": to_value(&cfg), "timeline_bucket": a.timeline_bucket });
    RunManifest::new("detect", params, vec![], inputs).attach(&mut out);
    out.commit()
}

fn profit(a: ProfitArgs) -> Result<(), CliError> {
    let (ledger, groups) = load_inputs(&a.input)?;
    let prices = load_prices(&a.prices)?;
    let mut params: RewardParams = match &a.params {
        Some(p) => read_json(p)?,
        None => RewardParams::default(),
    };
    if let Some(v) = a.base_amount {
        params.base_amount = v;
    }
    if let Some(v) = a.token_price {
        params.token_price = v;
    }
    params.validate()?;

    let reports = groups
        .par_iter()
        .map(|g| group_profit_report(&ledger, g, &params, &prices))
        .collect::<Result<Vec<ProfitReport>, _>>()?;

    let mut out = OutputDir::new(&a.input.out);
    for r in &reports {
        out.add_json(format!("{}.profit.json", r.group_id), r);
        out.add(format!("{}.profit.csv", r.group_id), r.to_csv());
    }
    out.add("fig8.csv", emit_plot_data("fig8", &PlotSource::Profit(&reports))?);

    let mut inputs = vec![
        hash_input(&a.input.ledger)?,
        hash_input(&a.input.groups)?,
        hash_input(&a.prices)?,
    ];
    if let Some(p) = &a.params {
        inputs.push(hash_input(p)?);
    }
    RunManifest::new("profit", json!({ "reward": to_value(&params) }), vec![], inputs)
        .attach(&mut out);
    out.commit()
}

/// A parameter file holds one input or a list of them.
fn read_mechanism_inputs(path: &Path) -> Result<(Vec<MechanismInput>, bool), CliError> {
    let value: serde_json::Value = read_json(path)?;
    let json_err = |source| CliError::Json {
        path: path.to_path_buf(),
        source,
    };
    match value {
        serde_json::Value::Array(items) => {
            let inputs = items
                .into_iter()
                .map(serde_json::from_value)
                .collect::<Result<Vec<_>, _>>()
                .map_err(json_err)?;
            Ok((inputs, true))
        }
        other => Ok((vec![serde_json::from_value(other).map_err(json_err)?], false)),
    }
}

fn solve(a: SolveArgs) -> Result<(), CliError> {
    if a.sweep_steps == 0 {
        return Err(CliError::Usage("--sweep-steps must be positive".into()));
    }
    let (inputs, batch) = read_mechanism_inputs(&a.params)?;
    let results: Vec<_> = inputs
        .par_iter()
        .map(|input| {
            let solution = end_to_end_solve(input)?;
            let sweep = self_report_sweep(&input.organizer, input.mean_reward, a.sweep_steps)?;
            Ok::<_, CliError>((solution, sweep))
        })
        .collect();

    let mut out = OutputDir::new(&a.out);
    for (i, result) in results.into_iter().enumerate() {
        let (solution, sweep) = result?;
        let suffix = if batch { format!("_{i:03}") } else { String::new() };
        out.add_json(format!("solution{suffix}.json"), &solution);
        let mut csv = String::from("pi_s,sigma,U_o\n");
        for row in sweep {
            csv.push_str(&format!("{},{},{}\n", row.pi_s, row.sigma, row.organizer_utility));
        }
        out.add(format!("sweep{suffix}.csv"), csv);
    }
    let params = json!({ "inputs": to_value(&inputs), "sweep_steps": a.sweep_steps });
    RunManifest::new("solve", params, vec![], vec![hash_input(&a.params)?]).attach(&mut out);
    out.commit()
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let (inputs, _) = read_mechanism_inputs(&a.params)?;
    let reports = inputs
        .par_iter()
        .map(verify_mechanism)
        .collect::<Result<Vec<_>, _>>()?;
    let mut failed = 0;
    for (i, report) in reports.iter().enumerate() {
        for c in &report.checks {
            let status = match (c.applicable, c.passed) {
                (false, _) => "N/A ",
                (true, true) => "PASS",
                (true, false) => {
                    failed += 1;
                    "FAIL"
                }
            };
            println!("[{i}] {status} {}: {}", c.name, c.detail);
        }
    }
    if let Some(dir) = &a.out {
        let mut out = OutputDir::new(dir);
        out.add_json("verify.json", &reports);
        RunManifest::new(
            "verify",
            json!({ "inputs": to_value(&inputs) }),
            vec![],
            vec![hash_input(&a.params)?],
        )
        .attach(&mut out);
        out.commit()?;
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed });
    }
    Ok(())
}

fn gen(a: GenArgs) -> Result<(), CliError> {
    let mut spec: SynthSpec = match &a.spec {
        Some(p) => read_json(p)?,
        None => SynthSpec::default(),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let synth = generate(&spec)?;
    let mut out = OutputDir::new(&a.out);
    let (name, format) = match a.format {
        Format::Csv => ("ledger.csv", LedgerFormat::Csv),
        Format::Jsonl => ("ledger.jsonl", LedgerFormat::Jsonl),
    };
    let mut ledger_bytes = Vec::new();
    write_transactions(&synth.ledger, format, &mut ledger_bytes)?;
    out.add(name, ledger_bytes);
    out.add("groups.json", write_groups(&synth.groups));
    out.add("prices.csv", write_prices_csv(&synth.prices)?);
    out.add_json("truth.json", &synth.truth);
    out.add_json("metadata.json", &synth.metadata);

    let inputs = match &a.spec {
        Some(p) => vec![hash_input(p)?],
        None => vec![],
    };
    RunManifest::new("gen", json!({ "spec": to_value(&spec) }), vec![spec.seed], inputs)
        .attach(&mut out);
    out.commit()
}
