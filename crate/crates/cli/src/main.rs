//! `hetwsn`: run, compare and sweep heterogeneous WSN clustering experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hetwsn_core::{
    compare, protocol_configs, run_experiment, sweep, ComparisonResult, ExperimentConfig,
    MilestoneStats, ProtocolKind, ProtocolStats, SimError, SweepParam,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hetwsn",
    version,
    about = "Clustering simulator for three-level heterogeneous sensor networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one protocol over every seed.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// leach, eehc or easm (overrides the config file).
        #[arg(long)]
        protocol: Option<String>,
    },
    /// Run LEACH, EEHC and EASM on identical deployments.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Vary one heterogeneity parameter and compare protocols at each value.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// m, m0, alpha or beta.
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. `1,1.5,2`.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        /// Restrict to these protocols (repeatable); all three by default.
        #[arg(long)]
        protocol: Vec<String>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML experiment config; built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from built-in scenario 1 or 2 instead of a config file.
    #[arg(long, conflicts_with = "config")]
    scenario: Option<u8>,
    /// Replication seed (repeatable); replaces the config's seed list.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// Round budget per run.
    #[arg(long)]
    rounds: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn load(&self) -> Result<ExperimentConfig, SimError> {
        let mut cfg = match (&self.config, self.scenario) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(s)) => ExperimentConfig::scenario(s)?,
            (None, None) => ExperimentConfig::default(),
        };
        if !self.seeds.is_empty() {
            cfg.seeds = self.seeds.clone();
        }
        if let Some(rounds) = self.rounds {
            cfg.max_rounds = rounds;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn fmt_stat(s: &MilestoneStats) -> String {
    match (s.mean, s.std) {
        (Some(m), Some(sd)) if s.reached == s.runs => format!("{m:.1} ± {sd:.1}"),
        (Some(m), Some(sd)) => format!("{m:.1} ± {sd:.1} ({}/{})", s.reached, s.runs),
        _ => "not reached".to_string(),
    }
}

fn print_table<'a>(stats: impl IntoIterator<Item = &'a ProtocolStats>) {
    println!(
        "{:<8} {:>24} {:>24} {:>24}",
        "protocol", "FND", "HNA", "LND"
    );
    for s in stats {
        println!(
            "{:<8} {:>24} {:>24} {:>24}",
            s.protocol.to_string(),
            fmt_stat(&s.fnd),
            fmt_stat(&s.hna),
            fmt_stat(&s.lnd)
        );
    }
}

fn print_comparison(result: &ComparisonResult) {
    print_table(result.stats());
}

fn execute(command: Command) -> Result<(), SimError> {
    match command {
        Command::Run { common, protocol } => {
            let mut cfg = common.load()?;
            if let Some(p) = protocol {
                cfg.protocol = p.parse()?;
            }
            let result = run_experiment(&cfg)?;
            print_table([&result.stats]);
            println!("wrote results to {}", cfg.output_dir.display());
        }
        Command::Compare { common } => {
            let cfg = common.load()?;
            let result = compare(&protocol_configs(&cfg))?;
            print_comparison(&result);
            println!("wrote results to {}", cfg.output_dir.display());
        }
        Command::Sweep {
            common,
            param,
            values,
            protocol,
        } => {
            let cfg = common.load()?;
            let param: SweepParam = param.parse()?;
            let protocols = if protocol.is_empty() {
                ProtocolKind::ALL.to_vec()
            } else {
                protocol
                    .iter()
                    .map(|p| p.parse())
                    .collect::<Result<Vec<_>, _>>()?
            };
            for point in sweep(&cfg, param, &values, &protocols)? {
                println!("{param} = {}", point.value);
                print_comparison(&point.comparison);
            }
            println!("wrote results to {}", cfg.output_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, SimError::Io { .. } | SimError::Csv { .. }) {
                ExitCode::from(EXIT_IO)
            } else {
                ExitCode::from(EXIT_CONFIG)
            }
        }
    }
}
