//! Command-line driver: `gen`, `build`, `analyze`, `measure`, `verify`,
//! `roundtrip`, `export` and `series`.
//!
//! Settings come from defaults, then `--config` (a config file, or a saved
//! report whose echoed config is reused), then flags. `HYPFILL_SEED`
//! overrides the config seed and `--seed` overrides both.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hypfill::generate::SpaceKind;
use hypfill::report::{SeriesKind, VerificationReport};
use hypfill::{Error, NeighborRule, Result};

pub use config::{ExportFormat, RunConfig};

/// Exit status for a run whose hard checks failed.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for a run that stopped on an error.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hypfill", version, about = "Hyperbolic fillings of finite metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated space (and tree, for tree kinds).
    Gen(GenArgs),
    /// Build the filling and its uniformization.
    Build(Common),
    /// Filling and uniformization checks.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Run only these checks (repeatable).
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Lifted measure checks.
    Measure(Common),
    /// Trace and extension norm comparisons.
    Verify(Common),
    /// Trace of extension on random boundary functions.
    Roundtrip {
        #[command(flatten)]
        common: Common,
        /// Also extend this `id,value` boundary function and write the result.
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Export the filling as GraphML, DOT, JSON or the boundary metric as CSV.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long = "format", value_enum)]
        formats: Vec<ExportFormat>,
    },
    /// Tidy CSV from saved reports.
    Series {
        #[arg(long, value_enum)]
        kind: SeriesArg,
        /// Report files.
        reports: Vec<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum SeriesArg {
    HyperbolicityVsDepth,
    RatioVsTheta,
    CollapseDn,
    CodimBand,
}

impl From<SeriesArg> for SeriesKind {
    fn from(s: SeriesArg) -> Self {
        match s {
            SeriesArg::HyperbolicityVsDepth => SeriesKind::HyperbolicityVsDepth,
            SeriesArg::RatioVsTheta => SeriesKind::RatioVsTheta,
            SeriesArg::CollapseDn => SeriesKind::CollapseDn,
            SeriesArg::CodimBand => SeriesKind::CodimBand,
        }
    }
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum RuleArg {
    Witness,
    RadiusSum,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum GenKind {
    IntervalNet,
    Grid,
    Cantor,
    SlitExample,
    SlitFamily,
    RandomTree,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Option<GenKind>,
    /// Full generator description as JSON, instead of `--kind` and its parameters.
    #[arg(long, conflicts_with = "kind")]
    pub generator: Option<String>,
    #[arg(long, default_value_t = 9)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub ratio: f64,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [3u32, 4])]
    pub ns: Vec<u32>,
    #[arg(long, default_value_t = 50)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = 3)]
    pub max_children: usize,
    #[arg(long, env = "HYPFILL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2f64.ln())]
    pub eps: f64,
    #[arg(long, default_value_t = 1.5)]
    pub tau: f64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl GenArgs {
    pub fn space_kind(&self) -> Result<SpaceKind> {
        if let Some(text) = &self.generator {
            return serde_json::from_str(text).map_err(|e| Error::Malformed(format!("generator: {e}")));
        }
        Ok(match self.kind.ok_or_else(|| Error::BadParams("gen needs --kind or --generator".into()))? {
            GenKind::IntervalNet => SpaceKind::IntervalNet { k: self.k },
            GenKind::Grid => SpaceKind::Grid {
                dim: self.dim,
                k: self.k,
            },
            GenKind::Cantor => SpaceKind::Cantor {
                depth: self.depth,
                ratio: self.ratio,
            },
            GenKind::SlitExample => SpaceKind::SlitExample {
                n: self.n,
                rho: self.rho,
                tau: None,
            },
            GenKind::SlitFamily => SpaceKind::SlitFamily { ns: self.ns.clone() },
            GenKind::RandomTree => SpaceKind::RandomTree {
                max_vertices: self.max_vertices,
                max_children: self.max_children,
                seed: self.seed,
                eps: self.eps,
                tau: self.tau,
            },
        })
    }
}

/// Flags shared by the pipeline commands; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON config, or a saved report to re-run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Generator description as JSON, e.g. '{"kind":"cantor","depth":3,"ratio":0.333}'.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub tree: Option<PathBuf>,
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long)]
    pub target_diam: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n_trunc: Option<u32>,
    #[arg(long)]
    pub net_depth: Option<u32>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long)]
    pub allow_collapse: bool,
    #[arg(long)]
    pub counterexample: bool,
    #[arg(long, env = "HYPFILL_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub functions: Option<usize>,
    #[arg(long)]
    pub hyperbolicity_cap: Option<usize>,
    #[arg(long)]
    pub geodesic_budget: Option<u32>,
    #[arg(long)]
    pub alpha_hat: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add per-check wall-clock seconds to the report.
    #[arg(long)]
    pub timing: bool,
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(s) = &self.space {
            c.space = Some(s.clone());
            c.generator = None;
        }
        if let Some(g) = &self.generator {
            c.generator = Some(serde_json::from_str(g).map_err(|e| Error::Malformed(format!("generator: {e}")))?);
            c.space = None;
        }
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = &self.$field { c.$field = v.clone().into(); } )* };
        }
        set!(tree, measure, eps, beta, theta, p, n_trunc, alpha_hat);
        macro_rules! set_plain {
            ($($field:ident),*) => { $( if let Some(v) = self.$field.clone() { c.$field = v; } )* };
        }
        set_plain!(target_diam, alpha, tau, net_depth, seed, samples, functions, hyperbolicity_cap, geodesic_budget, out);
        if let Some(r) = self.rule {
            c.rule = match r {
                RuleArg::Witness => NeighborRule::Witness,
                RuleArg::RadiusSum => NeighborRule::RadiusSum,
            };
        }
        c.allow_collapse |= self.allow_collapse;
        c.counterexample |= self.counterexample;
        c.validate()?;
        Ok(c)
    }
}

/// What a run produced, printed on stdout.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub passed: bool,
    pub report: Option<PathBuf>,
    pub files: Vec<PathBuf>,
    pub checks: Vec<(String, hypfill::report::CheckStatus)>,
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
}

impl From<&Error> for ErrorRecord {
    fn from(e: &Error) -> Self {
        ErrorRecord {
            error: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

fn with_report(
    cfg: &RunConfig,
    report: VerificationReport,
    mut files: Vec<PathBuf>,
) -> Result<RunSummary> {
    let path = commands::write_file(&cfg.out, &format!("{}_report.json", report.command), &report.to_json())?;
    files.sort();
    Ok(RunSummary {
        command: report.command.clone(),
        passed: report.passed(),
        report: Some(path),
        files,
        checks: report.checks.iter().map(|c| (c.name.clone(), c.status)).collect(),
    })
}

fn files_only(command: &str, files: Vec<PathBuf>) -> RunSummary {
    RunSummary {
        command: command.into(),
        passed: true,
        report: None,
        files,
        checks: Vec::new(),
    }
}

pub fn run(cli: &Cli) -> Result<RunSummary> {
    match &cli.command {
        Command::Gen(a) => Ok(files_only("gen", commands::gen(&a.space_kind()?, &a.out)?)),
        Command::Build(common) => {
            let cfg = common.resolve()?;
            let (r, files) = commands::build(&cfg, common.timing)?;
            with_report(&cfg, r, files)
        }
        Command::Analyze { common, checks } => {
            let mut cfg = common.resolve()?;
            if !checks.is_empty() {
                cfg.checks = checks.clone();
            }
            let r = commands::analyze(&cfg, common.timing)?;
            with_report(&cfg, r, Vec::new())
        }
        Command::Measure(common) => {
            let cfg = common.resolve()?;
            let r = commands::measure(&cfg, common.timing)?;
            with_report(&cfg, r, Vec::new())
        }
        Command::Verify(common) => {
            let cfg = common.resolve()?;
            let (r, files) = commands::verify(&cfg, common.timing)?;
            with_report(&cfg, r, files)
        }
        Command::Roundtrip { common, function } => {
            let cfg = common.resolve()?;
            let (r, files) = commands::roundtrip(&cfg, function.as_deref(), common.timing)?;
            with_report(&cfg, r, files)
        }
        Command::Export { common, formats } => {
            let mut cfg = common.resolve()?;
            if !formats.is_empty() {
                cfg.formats = formats.clone();
            }
            Ok(files_only("export", commands::export_graph(&cfg)?))
        }
        Command::Series { kind, reports, output } => {
            let csv = commands::series((*kind).into(), reports)?;
            match output {
                Some(path) => {
                    hypfill::io::write(path, &csv)?;
                    Ok(files_only("series", vec![path.clone()]))
                }
                None => {
                    print!("{csv}");
                    Ok(files_only("series", Vec::new()))
                }
            }
        }
    }
}
