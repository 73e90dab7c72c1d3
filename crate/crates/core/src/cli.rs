//! The `rough-aco` command line: `generate`, `run`, and `compare`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::aco::{optimize, AcoParams, EtaMode, OptimizeResult};
use crate::data_model::{ClipBounds, DecisionTable, SplitSpec};
use crate::discretization::{efb_cuts, CutSet};
use crate::evaluation::{evaluate_pipeline, EvaluationReport, PipelineOutcome};
use crate::synth::{self, GasProfile};

pub const REPORT_FILE: &str = "report.json";
pub const RULES_FILE: &str = "rules.json";
pub const CUTS_FILE: &str = "cuts.json";
pub const ROC_FILE: &str = "roc.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const COMPARE_JSON: &str = "compare.json";
pub const COMPARE_TABLE: &str = "compare.txt";

const CLIP_LOWER_PCT: f64 = 0.5;
const CLIP_UPPER_PCT: f64 = 99.5;

#[derive(Debug, Parser)]
#[command(
    name = "rough-aco",
    version,
    about = "Rough-set fault classifier with EFB or ant-colony discretization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic nine-gas DGA table as CSV.
    Generate(GenerateArgs),
    /// Train and evaluate one discretizer.
    Run(RunArgs),
    /// Train and evaluate both discretizers on the same split.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of objects.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Gas profile JSON; the bundled default profile when omitted.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discretizer {
    Efb,
    Aco,
}

impl Discretizer {
    pub fn name(self) -> &'static str {
        match self {
            Discretizer::Efb => "efb",
            Discretizer::Aco => "aco",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EtaArg {
    Uniform,
    PurityGain,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Input CSV (last column "label").
    #[arg(long, conflicts_with_all = ["synth_n", "profile"])]
    pub data: Option<PathBuf>,
    /// Size of the synthetic table used when --data is not given.
    #[arg(long, default_value_t = 2000)]
    pub synth_n: usize,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    /// Seeds data generation, the train/test split, and the ant colony.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Cuts per attribute.
    #[arg(long, default_value_t = 2)]
    pub cuts: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Clip each attribute to its [0.5, 99.5] percentile range on the
    /// training split.
    #[arg(long)]
    pub clip_outliers: bool,
    #[arg(long, default_value_t = 10)]
    pub ants: usize,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long, default_value_t = 0.09)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.09)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.9)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = EtaArg::Uniform)]
    pub eta: EtaArg,
}

impl CommonArgs {
    pub fn aco_params(&self) -> AcoParams {
        AcoParams {
            num_ants: self.ants,
            num_iterations: self.iters,
            alpha: self.alpha,
            beta: self.beta,
            rho: self.rho,
            q_deposit: self.q,
            num_cuts: self.cuts,
            seed: self.seed,
            eta_mode: match self.eta {
                EtaArg::Uniform => EtaMode::Uniform,
                EtaArg::PurityGain => EtaMode::PurityGain,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub discretizer: Discretizer,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub discretizer: Discretizer,
    #[serde(flatten)]
    pub report: EvaluationReport,
    pub seed: u64,
    pub cuts_file: String,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Run(args) => cmd_run(&args).map(|_| ()),
        Command::Compare(args) => cmd_compare(&args).map(|_| ()),
    }
}

fn load_profile(path: Option<&Path>) -> anyhow::Result<GasProfile> {
    Ok(match path {
        Some(p) => GasProfile::load(p)?,
        None => GasProfile::default(),
    })
}

pub fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let profile = load_profile(args.profile.as_deref())?;
    let table = synth::generate(&profile, args.n, args.seed)?;
    table
        .write_csv_file(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    let [healthy, faulty] = table.class_counts();
    println!(
        "wrote {} objects to {} (healthy {healthy}, faulty {faulty}, fault fraction {:.3})",
        table.len(),
        args.out.display(),
        faulty as f64 / table.len() as f64
    );
    Ok(())
}

/// Train/test tables shared by every arm of a run.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train: DecisionTable,
    pub test: DecisionTable,
}

pub fn prepare_data(args: &CommonArgs) -> anyhow::Result<PreparedData> {
    let table = match &args.data {
        Some(path) => {
            let loaded = DecisionTable::load_csv(path)?;
            if loaded.dropped > 0 {
                log::warn!(
                    "dropped {} rows with missing or non-numeric values",
                    loaded.dropped
                );
            }
            loaded.table
        }
        None => {
            let profile = load_profile(args.profile.as_deref())?;
            synth::generate(&profile, args.synth_n, args.seed)?
        }
    };
    let (train, test) = table.split(&SplitSpec::new(args.train_frac, args.seed))?;
    if args.clip_outliers {
        let clip = ClipBounds::fit(&train, CLIP_LOWER_PCT, CLIP_UPPER_PCT)?;
        return Ok(PreparedData {
            train: clip.apply(&train)?,
            test: clip.apply(&test)?,
        });
    }
    Ok(PreparedData { train, test })
}

/// Result of one discretizer arm.
#[derive(Debug, Clone)]
pub struct ArmOutcome {
    pub report: RunReport,
    pub cuts: CutSet,
    pub pipeline: PipelineOutcome,
    pub search: Option<OptimizeResult>,
}

/// Computes cuts with `discretizer` on the training table and evaluates them
/// on the test table.
pub fn run_arm(
    data: &PreparedData,
    discretizer: Discretizer,
    args: &CommonArgs,
) -> anyhow::Result<ArmOutcome> {
    let start = Instant::now();
    let (cuts, search) = match discretizer {
        Discretizer::Efb => (efb_cuts(&data.train, args.cuts)?, None),
        Discretizer::Aco => {
            let result = optimize(&data.train, &args.aco_params())?;
            (result.best.cuts.clone(), Some(result))
        }
    };
    let search_time: Duration = start.elapsed();
    let pipeline = evaluate_pipeline(&data.train, &data.test, &cuts, search_time)?;
    let report = RunReport {
        discretizer,
        report: pipeline.report.clone(),
        seed: args.seed,
        cuts_file: CUTS_FILE.to_owned(),
    };
    Ok(ArmOutcome {
        report,
        cuts,
        pipeline,
        search,
    })
}

/// Tracks files written for one command so they can be removed if a later
/// step fails.
#[derive(Debug, Default)]
struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    fn write(&mut self, path: PathBuf, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    fn discard(self) {
        for p in self.written {
            let _ = fs::remove_file(p);
        }
    }
}

fn write_arm(outputs: &mut Outputs, dir: &Path, arm: &ArmOutcome) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    outputs.write(
        dir.join(REPORT_FILE),
        pretty(&serde_json::to_value(&arm.report)?)?,
    )?;
    outputs.write(dir.join(RULES_FILE), pretty(&arm.pipeline.rules.to_json())?)?;
    outputs.write(dir.join(CUTS_FILE), pretty(&arm.cuts.to_json())?)?;
    outputs.write(dir.join(ROC_FILE), arm.pipeline.roc.to_csv())?;
    if let Some(search) = &arm.search {
        outputs.write(dir.join(CONVERGENCE_FILE), search.history_csv())?;
    }
    Ok(())
}

fn pretty(value: &Value) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> anyhow::Result<T> + Send,
) -> anyhow::Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            bail!("--workers must be positive");
        }
        builder = builder.num_threads(w);
    }
    builder.build()?.install(f)
}

fn guarded<T>(f: impl FnOnce(&mut Outputs) -> anyhow::Result<T>) -> anyhow::Result<T> {
    let mut outputs = Outputs::default();
    match f(&mut outputs) {
        Ok(v) => Ok(v),
        Err(e) => {
            outputs.discard();
            Err(e)
        }
    }
}

pub fn cmd_run(args: &RunArgs) -> anyhow::Result<ArmOutcome> {
    let common = &args.common;
    guarded(|outputs| {
        let arm = with_workers(common.workers, || {
            let data = prepare_data(common)?;
            run_arm(&data, args.discretizer, common)
        })?;
        write_arm(outputs, &common.out, &arm)?;
        print_summary(&arm.report);
        Ok(arm)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareDelta {
    pub accuracy: f64,
    pub auc: f64,
    pub num_rules: i64,
    pub train_time_s: f64,
}

impl CompareDelta {
    /// `aco - efb` for each compared field.
    pub fn between(efb: &EvaluationReport, aco: &EvaluationReport) -> Self {
        Self {
            accuracy: aco.accuracy - efb.accuracy,
            auc: aco.auc - efb.auc,
            num_rules: aco.num_rules as i64 - efb.num_rules as i64,
            train_time_s: aco.train_time_s - efb.train_time_s,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutcome {
    pub efb: ArmOutcome,
    pub aco: ArmOutcome,
    pub delta: CompareDelta,
}

pub fn cmd_compare(args: &CompareArgs) -> anyhow::Result<CompareOutcome> {
    let common = &args.common;
    guarded(|outputs| {
        let (efb, aco) = with_workers(common.workers, || {
            let data = prepare_data(common)?;
            let efb = run_arm(&data, Discretizer::Efb, common)?;
            let aco = run_arm(&data, Discretizer::Aco, common)?;
            Ok((efb, aco))
        })?;
        write_arm(outputs, &common.out.join("efb"), &efb)?;
        write_arm(outputs, &common.out.join("aco"), &aco)?;
        let delta = CompareDelta::between(&efb.report.report, &aco.report.report);
        let doc = json!({
            "efb": efb.report,
            "aco": aco.report,
            "delta": delta,
        });
        outputs.write(common.out.join(COMPARE_JSON), pretty(&doc)?)?;
        let table = comparison_table(&efb.report.report, &aco.report.report);
        outputs.write(common.out.join(COMPARE_TABLE), &table)?;
        print!("{table}");
        Ok(CompareOutcome { efb, aco, delta })
    })
}

fn print_summary(r: &RunReport) {
    let e = &r.report;
    println!(
        "{}: accuracy {:.4} auc {:.4} rules {} ({} certain) train {:.3}s test {:.4}s",
        r.discretizer.name(),
        e.accuracy,
        e.auc,
        e.num_rules,
        e.num_certain_rules,
        e.train_time_s,
        e.test_time_s
    );
}

/// Plain-text confusion matrix and summary per discretizer.
pub fn comparison_table(efb: &EvaluationReport, aco: &EvaluationReport) -> String {
    let mut out = String::new();
    for (title, r) in [("Equal Frequency Bin", efb), ("Ant Colony Optimized", aco)] {
        let m = &r.matrix;
        let _ = writeln!(out, "{title}");
        let _ = writeln!(
            out,
            "{:<4}{:>8}{:>8}{:>8}{:>10}{:>12}{:>14}{:>14}",
            "", "PP", "PN", "AUC", "# Rules", "Accuracy", "Train Time(s)", "Test Time(s)"
        );
        let _ = writeln!(
            out,
            "{:<4}{:>8}{:>8}{:>8.3}{:>10}{:>12.4}{:>14.3}{:>14.4}",
            "AP", m.tp, m.fn_, r.auc, r.num_rules, r.accuracy, r.train_time_s, r.test_time_s
        );
        let _ = writeln!(out, "{:<4}{:>8}{:>8}", "AN", m.fp, m.tn);
        out.push('\n');
    }
    out
}
