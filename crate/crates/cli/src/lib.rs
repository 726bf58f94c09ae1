//! Command-line front end: scenario presets and files, run manifests, and the
//! CSV/JSON writers behind the `hcn-gauss` binary.

pub mod commands;
pub mod manifest;
pub mod output;
pub mod preset;

pub use commands::{run, Args, Command, ConstructionArg, Grid, RunOutcome, StandardizeArg};
pub use manifest::RunManifest;
pub use preset::{figure1, load_scenario, parse_preset, serialize_scenario, single, PresetDefaults, ScenarioSource};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HCN_GAUSS_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] hcn_gauss::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Model(e) => e.category(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "usage" => 2,
            "io" => 3,
            "parse" => 4,
            "validation" => 5,
            "domain" => 6,
            "parameter" => 7,
            "divergence" => 8,
            "degenerate" => 9,
            "quadrature" => 10,
            "empty" => 11,
            _ => 1,
        }
    }

    /// Single line `error category=<cat> message=<text>` for stderr.
    pub fn one_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error category={} message={msg}", self.category())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}
