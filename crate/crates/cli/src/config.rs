//! Run configuration: defaults, JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hypfill::generate::SpaceKind;
use hypfill::NeighborRule;
use hypfill::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Graphml,
    Dot,
    Json,
    Csv,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Graphml => "graphml",
            ExportFormat::Dot => "dot",
            ExportFormat::Json => "json",
            ExportFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Space file (`.csv` points or `.json` points/matrix).
    pub space: Option<PathBuf>,
    /// Generator used when no space file is given.
    pub generator: Option<SpaceKind>,
    /// Rooted tree whose boundary the space is, for the isomorphism check.
    pub tree: Option<PathBuf>,
    /// Boundary measure weights as `id,value` CSV; counting measure if absent.
    pub measure: Option<PathBuf>,
    pub target_diam: f64,
    pub alpha: f64,
    pub tau: f64,
    /// Defaults to `ln alpha`.
    pub eps: Option<f64>,
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub n_trunc: Option<u32>,
    pub net_depth: u32,
    pub rule: NeighborRule,
    pub allow_collapse: bool,
    pub counterexample: bool,
    pub seed: u64,
    pub samples: usize,
    pub functions: usize,
    pub hyperbolicity_cap: usize,
    pub hyperbolicity_samples: usize,
    pub geodesic_budget: u32,
    pub geodesic_cap: usize,
    /// Net base for the rough-similarity check; defaults to `alpha`.
    pub alpha_hat: Option<f64>,
    /// Checks run by `analyze`; all when empty.
    pub checks: Vec<String>,
    pub out: PathBuf,
    pub formats: Vec<ExportFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            space: None,
            generator: None,
            tree: None,
            measure: None,
            target_diam: hypfill::metric::DEFAULT_TARGET_DIAM,
            alpha: 2.0,
            tau: 1.5,
            eps: None,
            beta: None,
            theta: None,
            p: None,
            n_trunc: None,
            net_depth: 8,
            rule: NeighborRule::default(),
            allow_collapse: false,
            counterexample: false,
            seed: 0,
            samples: 2000,
            functions: 100,
            hyperbolicity_cap: hypfill::hyperbolicity::DEFAULT_CAP,
            hyperbolicity_samples: hypfill::hyperbolicity::DEFAULT_SAMPLES,
            geodesic_budget: 8,
            geodesic_cap: hypfill::geodesic::DEFAULT_GEODESIC_CAP,
            alpha_hat: None,
            checks: Vec::new(),
            out: PathBuf::from("out"),
            formats: vec![ExportFormat::Json],
        }
    }
}

/// The measure and function-space exponents after validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub beta: f64,
    pub theta: Option<f64>,
    pub p: Option<f64>,
}

impl RunConfig {
    /// Reads a config file. A saved report is accepted too, in which case its
    /// echoed config is used.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        if value.get("tool").and_then(|t| t.as_str()) == Some("hypfill") {
            value = value
                .get("config")
                .cloned()
                .ok_or_else(|| Error::Malformed("report has no config".into()))?;
        }
        serde_json::from_value(value).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
    }

    pub fn eps(&self) -> f64 {
        self.eps.unwrap_or_else(|| self.alpha.ln())
    }

    pub fn alpha_hat(&self) -> f64 {
        self.alpha_hat.unwrap_or(self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return Err(Error::BadParams(format!("alpha {} must be > 1", self.alpha)));
        }
        let eps = self.eps();
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::BadParams(format!("eps {eps} must be positive")));
        }
        if eps > self.alpha.ln() && !self.allow_collapse {
            return Err(Error::EpsOutOfRange {
                eps,
                max: self.alpha.ln(),
            });
        }
        if self.space.is_some() && self.generator.is_some() {
            return Err(Error::BadParams("give either a space file or a generator, not both".into()));
        }
        if self.beta.is_some() && (self.theta.is_some() || self.p.is_some()) {
            return Err(Error::BadParams("give either beta or (theta, p), not both".into()));
        }
        if self.theta.is_some() != self.p.is_some() {
            return Err(Error::BadParams("theta and p must be given together".into()));
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::BadParams(format!("theta {t} must lie in (0, 1)")));
            }
        }
        if let Some(p) = self.p {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::BadParams(format!("p {p} must be at least 1")));
            }
        }
        Ok(())
    }

    /// `beta = eps p (1 - theta)` when `(theta, p)` is given.
    pub fn exponents(&self) -> Result<Exponents> {
        match (self.beta, self.theta, self.p) {
            (Some(beta), None, None) => Ok(Exponents {
                beta,
                theta: None,
                p: None,
            }),
            (None, Some(theta), Some(p)) => Ok(Exponents {
                beta: self.eps() * p * (1.0 - theta),
                theta: Some(theta),
                p: Some(p),
            }),
            _ => Err(Error::BadParams("this command needs beta or (theta, p)".into())),
        }
    }
}
