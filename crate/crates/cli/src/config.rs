//! Declarative experiment configuration (TOML).
//!
//! ```toml
//! operation = "ehi"
//! graph = "lattice:2:24"
//! R = [2, 4, 8]
//!
//! [output]
//! dir = "out"
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use harnack_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Gen,
    Ehi,
    Hg,
    Annulus,
    Oi,
    Thm1,
    Db,
    Couple,
    OscFail,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Gen => "gen",
            Operation::Ehi => "ehi",
            Operation::Hg => "hg",
            Operation::Annulus => "annulus",
            Operation::Oi => "oi",
            Operation::Thm1 => "thm1",
            Operation::Db => "db",
            Operation::Couple => "couple",
            Operation::OscFail => "osc-fail",
        }
    }

    /// Operations on the lamplighter chain itself rather than a graph.
    pub fn is_simulation(self) -> bool {
        matches!(self, Operation::Couple | Operation::OscFail)
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which Green-function domain to use: `B(x₀, 2R)` or `B(x₀, 4R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainSpec {
    #[serde(rename = "2R")]
    TwoR,
    #[serde(rename = "4R")]
    FourR,
}

impl DomainSpec {
    pub fn multiple(self) -> u32 {
        match self {
            DomainSpec::TwoR => 2,
            DomainSpec::FourR => 4,
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2R" | "2r" => Ok(DomainSpec::TwoR),
            "4R" | "4r" => Ok(DomainSpec::FourR),
            _ => Err(Error::Precondition(format!("D must be `2R` or `4R`, got `{s}`"))),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}R", self.multiple())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Also write the per-pair CSV for `db`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub csv: bool,
}

impl OutputConfig {
    fn is_empty(&self) -> bool {
        self.dir.is_none() && !self.csv
    }
}

/// One experiment: an operation, its graph and parameters, and a list of
/// radii to sweep. Absent parameters take the operation's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operation: Operation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
    #[serde(rename = "R", default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<u32>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Add the exact oracle to `osc-fail` (R ≤ 4 only).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
    #[serde(default, skip_serializing_if = "OutputConfig::is_empty")]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(operation: Operation) -> Self {
        Self {
            operation,
            graph: None,
            center: None,
            radii: Vec::new(),
            k: None,
            domain: None,
            eps: None,
            trials: None,
            seed: None,
            cap: None,
            exact: false,
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            Error::Parse { line, msg: e.message().to_string() }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
