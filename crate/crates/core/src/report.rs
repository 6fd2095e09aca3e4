//! Verification reports and plot-ready series.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    pub numbers: BTreeMap<String, Value>,
    pub witnesses: Vec<String>,
}

impl CheckRecord {
    pub fn new(name: &str, status: CheckStatus) -> Self {
        CheckRecord {
            name: name.to_string(),
            status,
            numbers: BTreeMap::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.numbers
            .insert(key.to_string(), serde_json::to_value(value).expect("report values serialize"));
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witnesses.push(w.into());
        self
    }

    fn number(&self, key: &str) -> Option<f64> {
        self.numbers.get(key).and_then(Value::as_f64)
    }
}

/// Timing is left out unless asked for, so that identical runs give
/// identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool: String,
    pub version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub checks: Vec<CheckRecord>,
    /// Wall-clock seconds per check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<BTreeMap<String, f64>>,
}

impl VerificationReport {
    pub fn new(command: &str, config: Value) -> Self {
        VerificationReport {
            tool: "hypfill".into(),
            version: REPORT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            checks: Vec::new(),
            timing: None,
        }
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    /// No hard assertion failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    HyperbolicityVsDepth,
    RatioVsTheta,
    CollapseDn,
    CodimBand,
}

impl SeriesKind {
    fn check_name(self) -> &'static str {
        match self {
            SeriesKind::HyperbolicityVsDepth => "hyperbolicity",
            SeriesKind::RatioVsTheta => "trace_extension",
            SeriesKind::CollapseDn => "collapse",
            SeriesKind::CodimBand => "measure",
        }
    }

    fn header(self) -> &'static [&'static str] {
        match self {
            SeriesKind::HyperbolicityVsDepth => &["k", "c"],
            SeriesKind::RatioVsTheta => &[
                "theta",
                "p",
                "extension_seminorm_max",
                "extension_lp_max",
                "trace_seminorm_max",
                "trace_lp_max",
            ],
            SeriesKind::CollapseDn => &["n", "d"],
            SeriesKind::CodimBand => &["n_trunc", "beta", "codim_lo", "codim_hi"],
        }
    }
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Tidy CSV with one row per observation. Collapse series are stored in the
/// check under `series` as `[[n, D(n)], ...]`.
pub fn emit_series(reports: &[VerificationReport], kind: SeriesKind) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::MissingData("no reports".into()));
    }
    let header = kind.header();
    let mut rows: Vec<String> = Vec::new();
    for r in reports {
        for c in r.checks.iter().filter(|c| c.name == kind.check_name()) {
            if kind == SeriesKind::CollapseDn {
                if let Some(Value::Array(pts)) = c.numbers.get("series") {
                    for pt in pts {
                        let (n, d) = (pt.get(0).and_then(Value::as_f64), pt.get(1).and_then(Value::as_f64));
                        rows.push(format!("{},{}", fmt_cell(n), fmt_cell(d)));
                    }
                }
                continue;
            }
            rows.push(header.iter().map(|h| fmt_cell(c.number(h))).collect::<Vec<_>>().join(","));
        }
    }
    if rows.is_empty() {
        return Err(Error::MissingData(format!("no {} checks in the reports", kind.check_name())));
    }
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_set_is_missing_data() {
        assert!(matches!(emit_series(&[], SeriesKind::CollapseDn), Err(Error::MissingData(_))));
        let r = VerificationReport::new("analyze", Value::Null);
        assert!(matches!(emit_series(&[r], SeriesKind::CollapseDn), Err(Error::MissingData(_))));
    }

    #[test]
    fn series_rows() {
        let mut r = VerificationReport::new("analyze", Value::Null);
        r.push(
            CheckRecord::new("collapse", CheckStatus::Diagnostic).with("series", vec![(0u32, 1.5f64), (1, 0.75)]),
        );
        r.push(CheckRecord::new("hyperbolicity", CheckStatus::Diagnostic).with("k", 1).with("c", 1.5));
        assert_eq!(emit_series(&[r.clone()], SeriesKind::CollapseDn).unwrap(), "n,d\n0,1.5\n1,0.75\n");
        assert_eq!(emit_series(&[r], SeriesKind::HyperbolicityVsDepth).unwrap(), "k,c\n1,1.5\n");
    }

    #[test]
    fn report_round_trip_and_status() {
        let mut r = VerificationReport::new("verify", serde_json::json!({"seed": 3}));
        r.push(CheckRecord::new("a", CheckStatus::Pass).with("x", 1.25).witness("w"));
        assert!(r.passed());
        let back = VerificationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        r.push(CheckRecord::new("b", CheckStatus::Fail));
        assert!(!r.passed());
    }
}
