//! `wsnsim`: run single scenarios, protocol comparisons and the built-in
//! heterogeneity experiments.
//!
//! Exit status: 0 on success, 1 for usage or configuration errors, 2 when a
//! run or its output fails.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use wsnsim_core::config::{load_scenario_file, ScenarioFile};
use wsnsim_core::output::{format_comparison, write_comparison_csv, write_rounds_csv, write_summary_json};
use wsnsim_core::plot::plots_from_csvs;
use wsnsim_core::presets::{preset, DEFAULT_SEED_COUNT, PRESET_NAMES};
use wsnsim_core::{run_comparison, run_scenario, summarize_comparison, Execution, ProtocolKind, RunSummary, ScenarioConfig};

#[derive(Parser)]
#[command(name = "wsnsim", version, about = "Clustered wireless sensor network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its per-round CSV and summary.
    Run {
        /// Scenario file (TOML). Defaults apply for every missing key.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the file's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the file's protocol.
        #[arg(long)]
        protocol: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run several protocols over a seed list on one scenario.
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated protocols, e.g. LEACH,SEP,TSEP.
        #[arg(long, value_delimiter = ',', required = true)]
        protocols: Vec<String>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a built-in experiment: paper-case-1 (alpha=1, m=0.1) or
    /// paper-case-2 (alpha=3, m=0.2), both with b=0.3 and all five protocols.
    Preset {
        name: String,
        /// Number of seeds (1..=N).
        #[arg(long, default_value_t = DEFAULT_SEED_COUNT)]
        seeds: u64,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ExecArgs {
    /// Run ensemble members one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

impl ExecArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

type Outcome<T> = Result<T, Failure>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn load(config: Option<&Path>) -> Outcome<ScenarioFile> {
    match config {
        Some(path) => load_scenario_file(path).map_err(|e| usage(anyhow!("{}: {e}", path.display()))),
        None => Ok(ScenarioFile {
            scenario: ScenarioConfig::default(),
            reactive: Default::default(),
        }),
    }
}

fn parse_protocols(names: &[String]) -> Outcome<Vec<ProtocolKind>> {
    let protocols: Vec<ProtocolKind> = names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse().map_err(usage))
        .collect::<Outcome<_>>()?;
    if protocols.is_empty() {
        return Err(usage(anyhow!("at least one protocol is required")));
    }
    Ok(protocols)
}

fn create(path: &Path) -> Outcome<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(runtime)
}

fn write_run(dir: &Path, stem: &str, summary: &RunSummary) -> Outcome<PathBuf> {
    let csv = dir.join(format!("{stem}.csv"));
    write_rounds_csv(create(&csv)?, &summary.per_round)
        .with_context(|| format!("writing {}", csv.display()))
        .map_err(runtime)?;
    Ok(csv)
}

fn run_one(file: ScenarioFile, seed: Option<u64>, protocol: Option<&str>, out: &Path) -> Outcome<()> {
    let mut config = match protocol {
        Some(p) => file.for_protocol(p.parse().map_err(usage)?),
        None => file.scenario,
    };
    if let Some(seed) = seed {
        config.rng_seed = seed;
    }
    config.validate().map_err(usage)?;
    let summary = run_scenario(&config).map_err(runtime)?;
    fs::create_dir_all(out).map_err(runtime)?;
    write_run(out, "rounds", &summary)?;
    let path = out.join("summary.json");
    write_summary_json(create(&path)?, &summary).map_err(runtime)?;
    println!(
        "{} seed {}: stability {}, lifetime {}, packets {}",
        summary.protocol,
        summary.seed,
        summary.stability_period.map_or("-".to_owned(), |r| r.to_string()),
        summary.network_lifetime,
        summary.total_packets
    );
    Ok(())
}

/// Runs the comparison and writes one per-round CSV per protocol (first
/// seed), `comparison.csv` and `comparison.txt`. Returns the CSV paths.
fn compare(
    base: &ScenarioConfig,
    protocols: &[ProtocolKind],
    seeds: &[u64],
    exec: Execution,
    out: &Path,
) -> Outcome<Vec<(String, PathBuf)>> {
    if seeds.is_empty() {
        return Err(usage(anyhow!("at least one seed is required")));
    }
    for &p in protocols {
        base.for_protocol(p).validate().map_err(usage)?;
    }
    let runs: BTreeMap<ProtocolKind, Vec<RunSummary>> =
        run_comparison(base, protocols, seeds, exec).map_err(runtime)?;
    fs::create_dir_all(out).map_err(runtime)?;
    let mut csvs = Vec::new();
    for &p in protocols {
        let first = &runs[&p][0];
        csvs.push((p.name().to_owned(), write_run(out, p.name(), first)?));
    }
    let table = summarize_comparison(&runs).map_err(runtime)?;
    write_comparison_csv(create(&out.join("comparison.csv"))?, &table).map_err(runtime)?;
    let text = format_comparison(&table);
    fs::write(out.join("comparison.txt"), &text).map_err(runtime)?;
    print!("{text}");
    Ok(csvs)
}

fn execute(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Run { config, seed, protocol, out } => {
            run_one(load(config.as_deref())?, seed, protocol.as_deref(), &out)
        }
        Command::Compare { config, protocols, seeds, exec, out } => {
            let protocols = parse_protocols(&protocols)?;
            let file = load(config.as_deref())?;
            let mut base = file.scenario.clone();
            base.reactive = Some(file.reactive.clone());
            compare(&base, &protocols, &seeds, exec.execution(), &out).map(|_| ())
        }
        Command::Preset { name, seeds, exec, out } => {
            let preset = preset(&name).ok_or_else(|| {
                usage(anyhow!("unknown preset {name:?}; expected one of {}", PRESET_NAMES.join(", ")))
            })?;
            if seeds == 0 {
                return Err(usage(anyhow!("--seeds must be at least 1")));
            }
            let preset = preset.with_seed_count(seeds);
            let csvs = compare(&preset.base, &preset.protocols, &preset.seeds, exec.execution(), &out)?;
            for path in plots_from_csvs(&csvs, &out).map_err(runtime)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
