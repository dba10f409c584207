//! Config-driven experiments: replicated runs, protocol comparisons,
//! parameter sweeps and CSV output.
//!
//! Output files (all comma-separated with a header row):
//!
//! * `<protocol>_seed<seed>_rounds.csv`: round, alive_normal, alive_advanced,
//!   alive_super, alive_total, ch_count, energy_remaining_j,
//!   energy_spent_cum_j, bs_messages_cum
//! * `<protocol>_summary.csv`: protocol, seed, fnd, hna, lnd
//! * `<protocol>_mean_series.csv`: round, alive_mean, energy_remaining_mean_j
//! * `comparison.csv`: protocol, fnd_mean, fnd_std, hna_mean, hna_std,
//!   lnd_mean, lnd_std
//! * `sweep.csv` (sweeps only): parameter, value, then the comparison columns
//!
//! Milestones not reached within the round budget are written as `NA`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{RoundSetup, Simulation};
use crate::error::{Result, SimError};
use crate::metrics::{fold, LifetimeSummary};
use crate::network::{deploy, HeterogeneityParams, NetworkConfig, Node, Position};
use crate::protocol::{ProtocolKind, ResetTrigger};
use crate::radio::RadioParams;
use crate::rng;

pub const DEFAULT_MAX_ROUNDS: u64 = 5000;
pub const DEFAULT_P_OPT: f64 = 0.1;

/// alpha = 1.5, m = 0.5, beta = 3, m0 = 0.4.
pub const SCENARIO_1: HeterogeneityParams = HeterogeneityParams {
    m: 0.5,
    m0: 0.4,
    alpha: 1.5,
    beta: 3.0,
};

/// alpha = 2, m = 0.3, beta = 5, m0 = 0.6.
pub const SCENARIO_2: HeterogeneityParams = HeterogeneityParams {
    m: 0.3,
    m0: 0.6,
    alpha: 2.0,
    beta: 5.0,
};

impl Default for NetworkConfig {
    /// 100 nodes on a 100 m square, base station at (50, 175), E0 = 0.5 J,
    /// scenario 1 heterogeneity.
    fn default() -> Self {
        NetworkConfig {
            n_nodes: 100,
            field_side: 100.0,
            bs_pos: Position::new(50.0, 175.0),
            het: SCENARIO_1,
            e0: 0.5,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: ProtocolKind,
    pub p_opt: f64,
    pub max_rounds: u64,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub reset_trigger: ResetTrigger,
    pub network: NetworkConfig,
    pub radio: RadioParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            protocol: ProtocolKind::Easm,
            p_opt: DEFAULT_P_OPT,
            max_rounds: DEFAULT_MAX_ROUNDS,
            seeds: vec![1],
            output_dir: PathBuf::from("out"),
            reset_trigger: ResetTrigger::default(),
            network: NetworkConfig::default(),
            radio: RadioParams::default(),
        }
    }
}

impl ExperimentConfig {
    /// Built-in configuration for scenario 1 or 2.
    pub fn scenario(index: u8) -> Result<Self> {
        let het = match index {
            1 => SCENARIO_1,
            2 => SCENARIO_2,
            other => {
                return Err(SimError::invalid(
                    "scenario",
                    format!("unknown scenario {other} (expected 1 or 2)"),
                ))
            }
        };
        let mut cfg = ExperimentConfig::default();
        cfg.network.het = het;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| SimError::ConfigParse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_opt > 0.0 && self.p_opt <= 1.0) {
            return Err(SimError::invalid(
                "p_opt",
                format!("{} is not in (0, 1]", self.p_opt),
            ));
        }
        if self.max_rounds == 0 {
            return Err(SimError::invalid("max_rounds", "must be >= 1"));
        }
        if self.seeds.is_empty() {
            return Err(SimError::invalid("seeds", "at least one seed is required"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(SimError::invalid(
                "seeds",
                format!("seed {} is listed twice", w[0]),
            ));
        }
        self.network.validate("network")?;
        self.radio.validate("radio")
    }

    fn round_setup(&self) -> RoundSetup {
        RoundSetup {
            protocol: self.protocol,
            p_opt: self.p_opt,
            het: self.network.het,
            reset_trigger: self.reset_trigger,
            radio: self.radio,
            bs_pos: self.network.bs_pos,
        }
    }

    fn sorted_seeds(&self) -> Vec<u64> {
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds
    }
}

/// One simulated replication.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub protocol: ProtocolKind,
    pub seed: u64,
    /// Population as deployed, before round 0.
    pub deployment: Vec<Node>,
    pub summary: LifetimeSummary,
}

/// Deploys the network for `seed` and plays rounds until every node is dead
/// or the budget runs out.
pub fn run_single(config: &ExperimentConfig, seed: u64) -> Result<RunOutcome> {
    let mut network = config.network.clone();
    network.rng_seed = seed;
    let deployment = deploy(&network)?;
    let mut sim = Simulation::new(
        deployment.clone(),
        config.round_setup(),
        rng::election_rng(seed),
    );
    let reports = sim.run(config.max_rounds)?;
    let summary = fold(&reports, network.n_nodes)?;
    Ok(RunOutcome {
        protocol: config.protocol,
        seed,
        deployment,
        summary,
    })
}

/// Mean and population standard deviation over the runs that reached a
/// milestone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MilestoneStats {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub reached: usize,
    pub runs: usize,
}

impl MilestoneStats {
    pub fn from_values(values: impl IntoIterator<Item = Option<u64>>) -> Self {
        let mut runs = 0;
        let mut xs = Vec::new();
        for v in values {
            runs += 1;
            if let Some(v) = v {
                xs.push(v as f64);
            }
        }
        if xs.is_empty() {
            return MilestoneStats {
                mean: None,
                std: None,
                reached: 0,
                runs,
            };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        MilestoneStats {
            mean: Some(mean),
            std: Some(var.sqrt()),
            reached: xs.len(),
            runs,
        }
    }
}

/// Per-protocol aggregate over all seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolStats {
    pub protocol: ProtocolKind,
    pub fnd: MilestoneStats,
    pub hna: MilestoneStats,
    pub lnd: MilestoneStats,
    /// Per-round means; runs that ended early hold their final value.
    pub mean_alive: Vec<f64>,
    pub mean_energy: Vec<f64>,
}

impl ProtocolStats {
    pub fn from_runs(protocol: ProtocolKind, runs: &[RunOutcome]) -> Self {
        let len = runs.iter().map(|r| r.summary.rounds()).max().unwrap_or(0);
        let mut mean_alive = vec![0.0; len];
        let mut mean_energy = vec![0.0; len];
        for run in runs {
            let s = &run.summary;
            for r in 0..len {
                let i = r.min(s.rounds().saturating_sub(1));
                if s.rounds() > 0 {
                    mean_alive[r] += s.alive_series[i] as f64;
                    mean_energy[r] += s.energy_series[i];
                }
            }
        }
        let n = runs.len().max(1) as f64;
        mean_alive.iter_mut().for_each(|v| *v /= n);
        mean_energy.iter_mut().for_each(|v| *v /= n);
        ProtocolStats {
            protocol,
            fnd: MilestoneStats::from_values(runs.iter().map(|r| r.summary.fnd)),
            hna: MilestoneStats::from_values(runs.iter().map(|r| r.summary.hna)),
            lnd: MilestoneStats::from_values(runs.iter().map(|r| r.summary.lnd)),
            mean_alive,
            mean_energy,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Sorted by seed.
    pub runs: Vec<RunOutcome>,
    pub stats: ProtocolStats,
}

/// Runs every seed of `config` (in parallel) without touching the disk.
pub fn simulate(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let runs = config
        .sorted_seeds()
        .into_par_iter()
        .map(|seed| run_single(config, seed))
        .collect::<Result<Vec<_>>>()?;
    let stats = ProtocolStats::from_runs(config.protocol, &runs);
    Ok(ExperimentResult {
        config: config.clone(),
        runs,
        stats,
    })
}

/// Simulates `config` and writes its rounds, summary, mean-series and
/// aggregate files into `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let result = simulate(config)?;
    let dir = &config.output_dir;
    create_dir(dir)?;
    write_protocol_files(dir, &result)?;
    write_comparison(
        &dir.join("comparison.csv"),
        std::slice::from_ref(&result.stats),
    )?;
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct ComparisonResult {
    /// One entry per protocol, in the order the configs were given.
    pub experiments: Vec<ExperimentResult>,
}

impl ComparisonResult {
    pub fn stats(&self) -> Vec<&ProtocolStats> {
        self.experiments.iter().map(|e| &e.stats).collect()
    }

    pub fn get(&self, protocol: ProtocolKind) -> Option<&ExperimentResult> {
        self.experiments
            .iter()
            .find(|e| e.config.protocol == protocol)
    }

    /// True when every protocol saw the same deployment for every seed.
    pub fn deployments_identical(&self) -> bool {
        let Some(first) = self.experiments.first() else {
            return true;
        };
        self.experiments.iter().all(|e| {
            e.runs.len() == first.runs.len()
                && e.runs
                    .iter()
                    .zip(&first.runs)
                    .all(|(a, b)| a.seed == b.seed && a.deployment == b.deployment)
        })
    }
}

/// Runs configs that differ only in protocol on identical seeds without
/// touching the disk.
pub fn compare_in_memory(configs: &[ExperimentConfig]) -> Result<ComparisonResult> {
    let Some(first) = configs.first() else {
        return Err(SimError::ComparisonMismatch("no configs given".into()));
    };
    for cfg in &configs[1..] {
        let mut normalized = cfg.clone();
        normalized.protocol = first.protocol;
        if normalized != *first {
            return Err(SimError::ComparisonMismatch(format!(
                "config for {} differs from config for {} in more than the protocol",
                cfg.protocol, first.protocol
            )));
        }
    }
    let mut protocols: Vec<_> = configs.iter().map(|c| c.protocol).collect();
    protocols.sort_unstable();
    protocols.dedup();
    if protocols.len() != configs.len() {
        return Err(SimError::ComparisonMismatch(
            "a protocol appears twice".into(),
        ));
    }
    let experiments = configs.iter().map(simulate).collect::<Result<Vec<_>>>()?;
    Ok(ComparisonResult { experiments })
}

/// [`compare_in_memory`] plus per-protocol files and `comparison.csv` under
/// the shared output directory.
pub fn compare(configs: &[ExperimentConfig]) -> Result<ComparisonResult> {
    let result = compare_in_memory(configs)?;
    let dir = &configs[0].output_dir;
    write_comparison_outputs(dir, &result)?;
    Ok(result)
}

/// One config per protocol, all copied from `base`.
pub fn protocol_configs(base: &ExperimentConfig) -> Vec<ExperimentConfig> {
    ProtocolKind::ALL
        .iter()
        .map(|&protocol| ExperimentConfig {
            protocol,
            ..base.clone()
        })
        .collect()
}

fn write_comparison_outputs(dir: &Path, result: &ComparisonResult) -> Result<()> {
    create_dir(dir)?;
    for e in &result.experiments {
        write_protocol_files(dir, e)?;
    }
    let stats: Vec<ProtocolStats> = result.stats().into_iter().cloned().collect();
    write_comparison(&dir.join("comparison.csv"), &stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    M,
    M0,
    Alpha,
    Beta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::M => "m",
            SweepParam::M0 => "m0",
            SweepParam::Alpha => "alpha",
            SweepParam::Beta => "beta",
        }
    }

    fn apply(self, het: &mut HeterogeneityParams, value: f64) {
        match self {
            SweepParam::M => het.m = value,
            SweepParam::M0 => het.m0 = value,
            SweepParam::Alpha => het.alpha = value,
            SweepParam::Beta => het.beta = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(SweepParam::M),
            "m0" => Ok(SweepParam::M0),
            "alpha" => Ok(SweepParam::Alpha),
            "beta" => Ok(SweepParam::Beta),
            other => Err(SimError::invalid(
                "sweep.param",
                format!("unknown parameter `{other}` (expected m, m0, alpha or beta)"),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub comparison: ComparisonResult,
}

/// Varies one heterogeneity parameter over `values`, comparing `protocols`
/// at each point. Point `v` is written to `<output_dir>/<param>_<v>/` and
/// the aggregate table to `<output_dir>/sweep.csv`.
pub fn sweep(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    protocols: &[ProtocolKind],
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(SimError::invalid(
            "sweep.values",
            "at least one value is required",
        ));
    }
    if protocols.is_empty() {
        return Err(SimError::invalid(
            "protocol",
            "at least one protocol is required",
        ));
    }
    let mut planned = Vec::with_capacity(values.len());
    for &value in values {
        let mut cfg = base.clone();
        param.apply(&mut cfg.network.het, value);
        cfg.output_dir = base.output_dir.join(format!("{}_{}", param.name(), value));
        cfg.validate()?;
        planned.push((value, cfg));
    }
    let mut points = Vec::with_capacity(planned.len());
    for (value, cfg) in planned {
        let configs: Vec<_> = protocols
            .iter()
            .map(|&protocol| ExperimentConfig {
                protocol,
                ..cfg.clone()
            })
            .collect();
        let comparison = compare(&configs)?;
        points.push(SweepPoint { value, comparison });
    }
    write_sweep(&base.output_dir.join("sweep.csv"), param, &points)?;
    Ok(points)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| SimError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|source| SimError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let wrap = |source| SimError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|source| SimError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

pub const ROUNDS_HEADER: [&str; 9] = [
    "round",
    "alive_normal",
    "alive_advanced",
    "alive_super",
    "alive_total",
    "ch_count",
    "energy_remaining_j",
    "energy_spent_cum_j",
    "bs_messages_cum",
];
pub const SUMMARY_HEADER: [&str; 5] = ["protocol", "seed", "fnd", "hna", "lnd"];
pub const COMPARISON_HEADER: [&str; 7] = [
    "protocol", "fnd_mean", "fnd_std", "hna_mean", "hna_std", "lnd_mean", "lnd_std",
];

pub fn write_rounds(path: &Path, summary: &LifetimeSummary) -> Result<()> {
    let rows = (0..summary.rounds()).map(|r| {
        let c = summary.alive_by_class_series[r];
        vec![
            r.to_string(),
            c.normal.to_string(),
            c.advanced.to_string(),
            c.super_.to_string(),
            summary.alive_series[r].to_string(),
            summary.ch_series[r].to_string(),
            summary.energy_series[r].to_string(),
            summary.spent_cumulative[r].to_string(),
            summary.bs_cumulative[r].to_string(),
        ]
    });
    write_rows(path, &ROUNDS_HEADER, rows)
}

fn write_protocol_files(dir: &Path, result: &ExperimentResult) -> Result<()> {
    let protocol = result.stats.protocol;
    for run in &result.runs {
        write_rounds(
            &dir.join(format!("{protocol}_seed{}_rounds.csv", run.seed)),
            &run.summary,
        )?;
    }
    let rows = result.runs.iter().map(|run| {
        vec![
            protocol.to_string(),
            run.seed.to_string(),
            run.summary.fnd().to_string(),
            run.summary.hna().to_string(),
            run.summary.lnd().to_string(),
        ]
    });
    write_rows(
        &dir.join(format!("{protocol}_summary.csv")),
        &SUMMARY_HEADER,
        rows,
    )?;
    let s = &result.stats;
    let rows = (0..s.mean_alive.len()).map(|r| {
        vec![
            r.to_string(),
            s.mean_alive[r].to_string(),
            s.mean_energy[r].to_string(),
        ]
    });
    write_rows(
        &dir.join(format!("{protocol}_mean_series.csv")),
        &["round", "alive_mean", "energy_remaining_mean_j"],
        rows,
    )
}

fn comparison_columns(s: &ProtocolStats) -> Vec<String> {
    vec![
        opt(s.fnd.mean),
        opt(s.fnd.std),
        opt(s.hna.mean),
        opt(s.hna.std),
        opt(s.lnd.mean),
        opt(s.lnd.std),
    ]
}

pub fn write_comparison(path: &Path, stats: &[ProtocolStats]) -> Result<()> {
    let rows = stats.iter().map(|s| {
        let mut row = vec![s.protocol.to_string()];
        row.extend(comparison_columns(s));
        row
    });
    write_rows(path, &COMPARISON_HEADER, rows)
}

fn write_sweep(path: &Path, param: SweepParam, points: &[SweepPoint]) -> Result<()> {
    let mut header = vec!["parameter", "value"];
    header.extend_from_slice(&COMPARISON_HEADER);
    let rows = points.iter().flat_map(|p| {
        p.comparison.experiments.iter().map(move |e| {
            let mut row = vec![
                param.to_string(),
                p.value.to_string(),
                e.stats.protocol.to_string(),
            ];
            row.extend(comparison_columns(&e.stats));
            row
        })
    });
    write_rows(path, &header, rows)
}
