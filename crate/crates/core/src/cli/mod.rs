//! The `kstar-lab` command line: config loading, orchestration and report
//! emission.
//!
//! Exit status is 0 when every asserted check passes, 1 when one fails, and
//! 2 to 5 for configuration, budget-cap, I/O and snapshot errors.

pub mod config;
pub mod experiments;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::complexity::Estimator;
use crate::enumeration::WitnessCache;
use crate::error::{LabError, Result};
use crate::machine::MachineKind;
use crate::measures::Predictor;
use crate::nu::{NuContext, NuRow, MAX_CUT_DEPTH};
use crate::report::{emit_report, render_structured, render_tabular, BoundReport, ReportFormat, Value, Verdict};
use crate::strings;

pub use config::{ExperimentConfig, Selector};
pub use experiments::{run_selector, RunContext};

/// Environment variable overriding the witness cache directory.
pub const CACHE_DIR_ENV: &str = "KSTAR_LAB_CACHE_DIR";

pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_SNAPSHOT: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "kstar-lab", version, about = "Exact checks of posterior prediction bounds on a bounded reference machine")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,

    /// Experiment config (TOML). Built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for witness-set snapshots.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Program-length budget in bits.
    #[arg(long = "budget-L", global = true)]
    pub budget_l: Option<usize>,

    /// Step budget per run.
    #[arg(long = "budget-S", global = true)]
    pub budget_s: Option<u64>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format on stdout: tabular or structured.
    #[arg(long, global = true, default_value = "tabular")]
    pub format: ReportFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build (and cache) witness sets and check their Kraft sums.
    Enumerate {
        /// Machine kind; repeatable. Defaults to all four.
        #[arg(long = "kind")]
        kinds: Vec<MachineKind>,
        /// Condition string (hex digits, `e` for empty); repeatable.
        #[arg(long = "condition")]
        conditions: Vec<String>,
    },
    /// Run the selected experiments and keep the asserted checks.
    Verify,
    /// Run the selected experiments and keep the measured-only reports.
    Report,
    /// Run the selected experiments and keep everything.
    Run,
    /// Tabulate the level semimeasures over the configured window.
    Construct,
}

impl Args {
    pub fn resolve_config(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(l) = self.budget_l {
            config.budgets.program_len = l;
        }
        if let Some(s) = self.budget_s {
            config.budgets.steps = s;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
            config.output.cache_dir = Some(dir.into());
        }
        if let Some(dir) = &self.cache_dir {
            config.output.cache_dir = Some(dir.clone());
        }
        config.validate()?;
        Ok(config)
    }
}

pub fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::Config(_)
        | LabError::InvalidSpec(_)
        | LabError::InvalidArgument(_)
        | LabError::AlphabetMismatch { .. }
        | LabError::Unregistered(_)
        | LabError::NullCondition(_) => EXIT_CONFIG,
        LabError::BudgetCap { .. } => EXIT_CAP,
        LabError::Io { .. } => EXIT_IO,
        LabError::DigestMismatch { .. } | LabError::IsaVersion { .. } | LabError::MalformedSnapshot { .. } => {
            EXIT_SNAPSHOT
        }
    }
}

fn estimator(config: &ExperimentConfig) -> Result<Estimator> {
    let cache = match &config.output.cache_dir {
        Some(dir) => WitnessCache::with_dir(dir),
        None => WitnessCache::new(),
    };
    Ok(Estimator::with_cache(config.search_budget()?, Arc::new(cache)))
}

/// Runs every selected experiment in declared order.
pub fn run_experiments(config: &ExperimentConfig, est: &Estimator) -> Result<Vec<BoundReport>> {
    let registry = config.build_registry()?;
    let predictor = Predictor::new(&registry, est)?;
    let ctx = RunContext { config, registry: &registry, predictor: &predictor };
    let mut reports = Vec::new();
    for &sel in &config.experiments {
        reports.extend(run_selector(sel, &ctx)?);
    }
    Ok(reports)
}

fn parse_condition(s: &str) -> Result<Vec<u8>> {
    if s == "e" {
        Ok(Vec::new())
    } else {
        strings::parse(s)
    }
}

fn enumerate(est: &Estimator, kinds: &[MachineKind], conditions: &[String]) -> Result<Vec<BoundReport>> {
    let kinds = if kinds.is_empty() {
        vec![MachineKind::Prefix, MachineKind::Monotone, MachineKind::TwicePrefix, MachineKind::CondLengthAware]
    } else {
        kinds.to_vec()
    };
    let conditions: Vec<Vec<u8>> = if conditions.is_empty() {
        vec![vec![], vec![0], vec![1, 0]]
    } else {
        conditions.iter().map(|c| parse_condition(c)).collect::<Result<_>>()?
    };
    let b = est.budget();
    let mut out = Vec::new();
    for kind in kinds {
        let conds: Vec<Option<&[u8]>> = if kind.takes_condition() {
            conditions.iter().map(|c| Some(c.as_slice())).collect()
        } else {
            vec![None]
        };
        for cond in conds {
            let set = est.witnesses(kind, cond)?;
            let tag = format!(
                "kind={} condition={} witnesses={}",
                kind.name(),
                cond.map_or("-".into(), strings::show),
                set.witnesses.len()
            );
            out.push(
                BoundReport::asserted(format!("kraft.{}", kind.name()), Value::Exact(set.kraft_sum()), Value::int(1))
                    .budgets(b.max_len, b.max_steps)
                    .note(tag.clone()),
            );
            out.push(
                BoundReport::violations(format!("prefix_free.{}", kind.name()), usize::from(!set.is_prefix_free()))
                    .budgets(b.max_len, b.max_steps)
                    .note(tag),
            );
        }
    }
    Ok(out)
}

fn render_rows(rows: &[NuRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Structured => rows.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect(),
        ReportFormat::Tabular => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
    }
}

fn construct(config: &ExperimentConfig, est: &Estimator, format: ReportFormat) -> Result<(Vec<BoundReport>, String)> {
    let registry = config.build_registry()?;
    let predictor = Predictor::new(&registry, est)?;
    let nu = NuContext::new(&registry, &predictor, config.budgets.depth)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for d in config.budgets.d_min..=config.budgets.d_max {
        let table = nu.nu_fixup(d)?;
        reports.push(
            BoundReport::violations("semimeasure.nu_d", table.semimeasure_violations())
                .note(format!("d={d} depth={}", table.depth)),
        );
        rows.extend(table.rows());
        if table.depth <= MAX_CUT_DEPTH {
            reports.extend(nu.claim10_verify(d)?.report("claim10"));
        }
    }
    Ok((reports, render_rows(&rows, format)))
}

fn write_outputs(config: &ExperimentConfig, reports: &[BoundReport]) -> Result<()> {
    if let Some(path) = &config.output.structured {
        emit_report(reports, ReportFormat::Structured, path)?;
    }
    if let Some(path) = &config.output.tabular {
        emit_report(reports, ReportFormat::Tabular, path)?;
    }
    Ok(())
}

fn execute(args: &Args, stdout: &mut dyn Write) -> Result<bool> {
    let config = args.resolve_config()?;
    let est = estimator(&config)?;
    let (reports, text) = match &args.command {
        Command::Enumerate { kinds, conditions } => {
            let reports = enumerate(&est, kinds, conditions)?;
            (reports, None)
        }
        Command::Verify | Command::Report | Command::Run => {
            let mut reports = run_experiments(&config, &est)?;
            match args.command {
                Command::Verify => reports.retain(|r| r.verdict == Verdict::AssertedExact),
                Command::Report => reports.retain(|r| r.verdict == Verdict::MeasuredOnly),
                _ => {}
            }
            (reports, None)
        }
        Command::Construct => {
            let (reports, rows) = construct(&config, &est, args.format)?;
            if let Some(path) = &config.output.tables {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
                }
                std::fs::write(path, &rows).map_err(|e| LabError::io(path, e))?;
            }
            (reports, Some(rows))
        }
    };
    write_outputs(&config, &reports)?;
    let body = text.unwrap_or_else(|| match args.format {
        ReportFormat::Tabular => render_tabular(&reports),
        ReportFormat::Structured => render_structured(&reports),
    });
    stdout
        .write_all(body.as_bytes())
        .map_err(|e| LabError::io("<stdout>", e))?;
    let failed: Vec<&BoundReport> = reports.iter().filter(|r| r.failed()).collect();
    let asserted = reports.iter().filter(|r| r.passed().is_some()).count();
    eprintln!(
        "{} reports, {asserted} asserted, {} failed",
        reports.len(),
        failed.len()
    );
    for r in &failed {
        eprintln!("FAILED {}: lhs {} rhs {} ({})", r.name, r.lhs, r.rhs, r.notes.join("; "));
    }
    Ok(failed.is_empty())
}

/// Parses `args` and runs the command, writing reports to `stdout`.
/// Returns the process exit status.
pub fn run_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&args, stdout) {
        Ok(true) => 0,
        Ok(false) => EXIT_ASSERTION,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_args(args, &mut std::io::stdout().lock())
}
