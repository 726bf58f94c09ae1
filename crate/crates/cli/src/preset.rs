//! Built-in scenarios and scenario-file loading.

use std::path::Path;

use hcn_gauss::{FadingModel, PathLossModel, Scenario, TierConfig};

use crate::CliError;

/// Three tiers `(0.1 kappa, 4)`, `(kappa, 1)`, `(5 kappa, 0.25)` as `(lambda, P)`, Rayleigh with
/// unit mean power, `G(t) = 1/(1+t^alpha)`, homogeneous planar deployment.
pub fn figure1(kappa: f64, alpha: f64) -> Scenario {
    Scenario::new(
        [(0.1, 4.0), (1.0, 1.0), (5.0, 0.25)]
            .into_iter()
            .map(|(l, p)| {
                TierConfig::homogeneous(
                    p,
                    l * kappa,
                    PathLossModel::inverse_one_plus_power(alpha),
                    FadingModel::RayleighPower { mean_power: 1.0 },
                )
            })
            .collect(),
    )
}

/// One homogeneous Rayleigh tier.
pub fn single(lambda: f64, power: f64, alpha: f64) -> Scenario {
    Scenario::new(vec![TierConfig::homogeneous(
        power,
        lambda,
        PathLossModel::inverse_one_plus_power(alpha),
        FadingModel::RayleighPower { mean_power: 1.0 },
    )])
}

/// Values for preset parameters left out of the preset string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetDefaults {
    pub kappa: f64,
    pub alpha: f64,
}

impl Default for PresetDefaults {
    fn default() -> Self {
        Self { kappa: 1.0, alpha: 4.0 }
    }
}

/// Parses `figure1`, `figure1(kappa)`, `figure1(kappa, alpha)`, `single`,
/// `single(lambda, P)` or `single(lambda, P, alpha)`.
///
/// Returns `Ok(None)` when `text` does not look like a preset at all.
pub fn parse_preset(text: &str, defaults: PresetDefaults) -> Result<Option<Scenario>, CliError> {
    let text = text.trim();
    let (name, args) = match text.find('(') {
        Some(open) => {
            let Some(body) = text[open + 1..].strip_suffix(')') else {
                return Err(CliError::Usage(format!("unbalanced parentheses in preset '{text}'")));
            };
            (text[..open].trim(), parse_args(body, text)?)
        }
        None => (text, Vec::new()),
    };
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);
    let scenario = match name {
        "figure1" => {
            if args.len() > 2 {
                return Err(CliError::Usage(format!("figure1 takes at most (kappa, alpha), got '{text}'")));
            }
            figure1(arg(0, defaults.kappa), arg(1, defaults.alpha))
        }
        "single" => {
            if args.len() > 3 {
                return Err(CliError::Usage(format!("single takes at most (lambda, P, alpha), got '{text}'")));
            }
            single(arg(0, defaults.kappa), arg(1, 1.0), arg(2, defaults.alpha))
        }
        _ => return Ok(None),
    };
    Ok(Some(scenario))
}

fn parse_args(body: &str, whole: &str) -> Result<Vec<f64>, CliError> {
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number '{}' in preset '{whole}'", a.trim())))
        })
        .collect()
}

/// Where a scenario came from, as recorded in the run manifest.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioSource {
    Preset(String),
    File(String),
}

/// Resolves a preset name or a path to a scenario JSON file, then validates it.
pub fn load_scenario(path_or_preset: &str) -> Result<Scenario, CliError> {
    load_scenario_with(path_or_preset, PresetDefaults::default()).map(|(s, _)| s)
}

pub fn load_scenario_with(
    path_or_preset: &str,
    defaults: PresetDefaults,
) -> Result<(Scenario, ScenarioSource), CliError> {
    let (scenario, source) = match parse_preset(path_or_preset, defaults)? {
        Some(s) => (s, ScenarioSource::Preset(path_or_preset.trim().to_string())),
        None => (read_scenario_file(Path::new(path_or_preset))?, ScenarioSource::File(path_or_preset.to_string())),
    };
    Ok((scenario.validated()?, source))
}

/// Parses a scenario file without validating it.
pub fn read_scenario_file(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_scenario_json(&text).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_scenario_json(text: &str) -> Result<Scenario, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Canonical JSON text of a scenario; loading it back yields the same text.
pub fn serialize_scenario(s: &Scenario) -> String {
    s.canonical_json()
}
