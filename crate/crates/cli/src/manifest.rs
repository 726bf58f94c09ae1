//! Run manifest written next to every set of outputs.

use std::time::{SystemTime, UNIX_EPOCH};

use hcn_gauss::SimConfig;
use serde::{Deserialize, Serialize};

use crate::preset::ScenarioSource;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub source: ScenarioSource,
    pub subcommand: String,
    pub config: SimConfig,
    /// Files written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// SHA-256 of the canonical scenario JSON bound to `config.seed`.
    pub fingerprint: String,
    /// Canonical scenario JSON the run used.
    pub scenario: serde_json::Value,
}

impl RunManifest {
    pub fn new(source: ScenarioSource, subcommand: &str, config: SimConfig, scenario: &hcn_gauss::Scenario) -> Self {
        Self {
            source,
            subcommand: subcommand.to_string(),
            config,
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            fingerprint: scenario.fingerprint_with_seed(config.seed),
            scenario: serde_json::to_value(scenario).expect("scenario serialization is infallible"),
        }
    }
}
