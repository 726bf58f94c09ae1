//! Argument definitions and subcommand implementations.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use hcn_gauss::analytics::{
    campbell_mean, campbell_variance, envelope_crossover, laplace_transform, laplace_transform_within,
    lemma1_scaling_certificate, lemma2_lower_bound, xi_coefficient, Envelope, UNIFORM_CONSTANT,
};
use hcn_gauss::empirics::{convergence_diagnostic, empirical_cdf, envelope_report_with_xi};
use hcn_gauss::simulate::{construction_moments, monte_carlo, DEFAULT_RADIUS};
use hcn_gauss::{Construction, Scenario, SimConfig, StandardizeMode};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::output::{curve_csv, samples_csv, table_csv};
use crate::preset::{load_scenario_with, PresetDefaults, ScenarioSource};
use crate::{CliError, THREADS_ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    Poisson,
    Fixed,
}

impl From<ConstructionArg> for Construction {
    fn from(c: ConstructionArg) -> Self {
        match c {
            ConstructionArg::Poisson => Construction::PoissonField,
            ConstructionArg::Fixed => Construction::FixedCountIID,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StandardizeArg {
    Analytic,
    Construction,
    Empirical,
}

impl From<StandardizeArg> for StandardizeMode {
    fn from(m: StandardizeArg) -> Self {
        match m {
            StandardizeArg::Analytic => StandardizeMode::Analytic,
            StandardizeArg::Construction => StandardizeMode::Construction,
            StandardizeArg::Empirical => StandardizeMode::Empirical,
        }
    }
}

/// Evenly spaced evaluation points, written `MIN:MAX:POINTS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { min: -8.0, max: 8.0, points: 801 }
    }
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.max } else { self.min + step * i as f64 }).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, points] = parts[..] else {
            return Err(format!("grid must be MIN:MAX:POINTS, got '{s}'"));
        };
        let min: f64 = min.trim().parse().map_err(|_| format!("bad grid minimum '{min}'"))?;
        let max: f64 = max.trim().parse().map_err(|_| format!("bad grid maximum '{max}'"))?;
        let points: usize = points.trim().parse().map_err(|_| format!("bad grid point count '{points}'"))?;
        if !(min.is_finite() && max.is_finite()) || points == 0 || (points > 1 && max <= min) {
            return Err(format!("grid needs finite MIN < MAX and POINTS >= 1, got '{s}'"));
        }
        Ok(Grid { min, max, points })
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad number '{}'", v.trim()))).collect()
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "hcn-gauss",
    version,
    about = "Gaussian-approximation bounds for aggregate interference in K-tier cellular networks"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario JSON file.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Built-in scenario: figure1, figure1(kappa, alpha), single, single(lambda, P, alpha).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Density multiplier for presets that omit it (figure1 kappa, single lambda).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub kappa: f64,
    /// Path-loss exponent for presets that omit it.
    #[arg(long, global = true, default_value_t = 4.0)]
    pub alpha: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub replications: usize,
    /// Truncation radius of the simulated field.
    #[arg(long, global = true, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    #[arg(long, global = true, value_enum, default_value_t = ConstructionArg::Poisson)]
    pub construction: ConstructionArg,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// DKW confidence level for envelope violations.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub slack: f64,
    /// Curve grid MIN:MAX:POINTS.
    #[arg(long, global = true, default_value = "-8:8:801", allow_hyphen_values = true)]
    pub grid: Grid,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Xi, Campbell moments, lower bound and the envelope curve.
    Bound,
    /// Monte-Carlo interference samples.
    Simulate,
    /// Standardized samples against the envelope, with an empirical CDF curve.
    Compare {
        #[arg(long, value_enum, default_value_t = StandardizeArg::Construction)]
        standardize: StandardizeArg,
    },
    /// Laplace transform with a Monte-Carlo cross-check.
    Laplace {
        /// Comma-separated evaluation points.
        #[arg(long = "s", value_parser = parse_list, default_value = "0.1,1,10")]
        s: std::vec::Vec<f64>,
    },
    /// Xi under uniform density scaling.
    Scaling {
        #[arg(long, value_parser = parse_list, default_value = "1,4,25,100")]
        factors: std::vec::Vec<f64>,
    },
    /// Simulated versus analytic moments over truncation radii.
    Converge {
        #[arg(long, value_parser = parse_list, default_value = "10,50,200")]
        radii: std::vec::Vec<f64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bound => "bound",
            Command::Simulate => "simulate",
            Command::Compare { .. } => "compare",
            Command::Laplace { .. } => "laplace",
            Command::Scaling { .. } => "scaling",
            Command::Converge { .. } => "converge",
        }
    }
}

impl Args {
    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            radius: self.radius,
            replications: self.replications,
            seed: self.seed,
            construction: self.construction.into(),
        }
    }

    fn resolve_scenario(&self) -> Result<(Scenario, ScenarioSource), CliError> {
        let defaults = PresetDefaults { kappa: self.kappa, alpha: self.alpha };
        match (&self.scenario, &self.preset) {
            (Some(path), _) => {
                let text = path.to_str().ok_or_else(|| CliError::Usage("scenario path is not UTF-8".into()))?;
                let s = crate::preset::read_scenario_file(path)?.validated()?;
                Ok((s, ScenarioSource::File(text.to_string())))
            }
            (None, Some(p)) => match crate::preset::parse_preset(p, defaults)? {
                Some(_) => load_scenario_with(p, defaults),
                None => Err(CliError::Usage(format!("unknown preset '{p}'"))),
            },
            (None, None) => Err(CliError::Usage("one of --scenario or --preset is required".into())),
        }
    }
}

/// What a run produced: the manifest (already written) and a JSON summary for stdout.
#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub summary: String,
}

/// Worker count from the environment, if set.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs one subcommand, writing outputs and `manifest.json` under `args.out`.
pub fn run(args: &Args) -> Result<RunOutcome, CliError> {
    match thread_cap()? {
        Some(n) => {
            let pool = rayon_pool(n)?;
            pool.install(|| run_inner(args))
        }
        None => run_inner(args),
    }
}

fn rayon_pool(n: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))
}

fn run_inner(args: &Args) -> Result<RunOutcome, CliError> {
    let (scenario, source) = args.resolve_scenario()?;
    let cfg = args.sim_config();
    if !(args.slack > 0.0 && args.slack < 1.0) {
        return Err(hcn_gauss::Error::Domain { what: "slack level must lie in (0, 1)", value: args.slack }.into());
    }
    let mut manifest = RunManifest::new(source, args.command.name(), cfg, &scenario);
    let mut out = Outputs { dir: &args.out, written: Vec::new() };
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let fp = manifest.fingerprint.clone();

    let summary = match &args.command {
        Command::Bound => bound(&scenario, &fp, &args.grid, &mut out)?,
        Command::Simulate => {
            cfg.validate()?;
            let set = monte_carlo(&scenario, &cfg)?;
            out.write("samples.csv", &samples_csv(&set))?;
            json(&serde_json::json!({
                "fingerprint": fp,
                "replications": set.len(),
                "sample_mean": set.mean(),
                "sample_variance": if set.len() > 1 { set.variance() } else { 0.0 },
                "truncation_mean_gap": set.truncation_mean_gap,
            }))?
        }
        Command::Compare { standardize } => {
            compare(&scenario, &cfg, (*standardize).into(), args.slack, &fp, &args.grid, &mut out)?
        }
        Command::Laplace { s } => laplace(&scenario, &cfg, s, &fp, &mut out)?,
        Command::Scaling { factors } => {
            let cert = lemma1_scaling_certificate(&scenario, factors)?;
            let rows: Vec<Vec<f64>> = cert
                .rows
                .iter()
                .map(|r| vec![r.factor, r.lambda_norm, r.xi, r.xi_sqrt_factor, r.xi_sqrt_norm])
                .collect();
            out.write(
                "scaling.csv",
                &table_csv(&fp, &["factor", "lambda_norm", "xi", "xi_sqrt_factor", "xi_sqrt_norm"], &rows),
            )?;
            json(&serde_json::json!({ "fingerprint": fp, "certificate": cert }))?
        }
        Command::Converge { radii } => {
            cfg.validate()?;
            let rows = convergence_diagnostic(&scenario, radii, &cfg)?;
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.radius,
                        r.sample_mean,
                        r.sample_variance,
                        r.mean_std_error,
                        r.truncated_mean,
                        r.analytic_mean,
                        r.analytic_variance,
                        r.mean_gap,
                        r.variance_gap,
                        r.truncation_gap,
                    ]
                })
                .collect();
            out.write(
                "converge.csv",
                &table_csv(
                    &fp,
                    &[
                        "radius",
                        "sample_mean",
                        "sample_variance",
                        "mean_std_error",
                        "truncated_mean",
                        "analytic_mean",
                        "analytic_variance",
                        "mean_gap",
                        "variance_gap",
                        "truncation_gap",
                    ],
                    &table,
                ),
            )?;
            json(&serde_json::json!({ "fingerprint": fp, "rows": rows }))?
        }
    };

    manifest.outputs = out.written.clone();
    manifest.outputs.push("manifest.json".into());
    out.write_untracked("manifest.json", &json(&manifest)?)?;
    Ok(RunOutcome { manifest, summary })
}

struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        self.write_untracked(name, body)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_untracked(&self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize)]
struct BoundSummary {
    fingerprint: String,
    xi: f64,
    mean: f64,
    variance: f64,
    std_dev: f64,
    lower_bound: f64,
    uniform_bound: f64,
    uniform_constant: f64,
    crossover: f64,
    grid_points: usize,
}

fn bound(s: &Scenario, fp: &str, grid: &Grid, out: &mut Outputs) -> Result<String, CliError> {
    let b = xi_coefficient(s)?;
    let rows: Vec<Envelope> = grid.values().into_iter().map(|x| Envelope::new(b.xi, x)).collect();
    out.write("bound_curve.csv", &curve_csv(fp, &rows, None))?;
    let summary = BoundSummary {
        fingerprint: fp.to_string(),
        xi: b.xi,
        mean: b.mean,
        variance: b.variance,
        std_dev: b.std_dev(),
        lower_bound: lemma2_lower_bound(s)?,
        uniform_bound: b.uniform_bound(),
        uniform_constant: UNIFORM_CONSTANT,
        crossover: envelope_crossover(),
        grid_points: rows.len(),
    };
    let text = json(&summary)?;
    out.write("bound.json", &text)?;
    Ok(text)
}

fn compare(
    s: &Scenario,
    cfg: &SimConfig,
    mode: StandardizeMode,
    slack: f64,
    fp: &str,
    grid: &Grid,
    out: &mut Outputs,
) -> Result<String, CliError> {
    cfg.validate()?;
    let set = monte_carlo(s, cfg)?;
    let z = hcn_gauss::standardize(&set, s, mode)?;
    let xi = xi_coefficient(s)?.xi;
    let report = envelope_report_with_xi(&z, xi, slack)?;
    let xs = grid.values();
    let rows: Vec<Envelope> = xs.iter().map(|&x| Envelope::new(xi, x)).collect();
    let emp: Vec<f64> = xs.iter().map(|&x| empirical_cdf(&report.sorted, x)).collect::<Result<_, _>>()?;
    out.write("samples.csv", &samples_csv(&set))?;
    out.write("compare_curve.csv", &curve_csv(fp, &rows, Some(&emp)))?;
    let (m, v) = match mode {
        StandardizeMode::Analytic => (campbell_mean(s)?, campbell_variance(s)?),
        StandardizeMode::Construction => construction_moments(s, cfg.radius, cfg.construction)?,
        StandardizeMode::Empirical => (set.mean(), set.variance()),
    };
    let body = serde_json::json!({
        "fingerprint": fp,
        "standardize": mode,
        "standardize_mean": m,
        "standardize_variance": v,
        "report": report,
    });
    out.write("report.json", &json(&body)?)?;
    let mut brief = body;
    brief["report"]["sorted"] = serde_json::Value::Null;
    json(&brief)
}

fn laplace(s: &Scenario, cfg: &SimConfig, svals: &[f64], fp: &str, out: &mut Outputs) -> Result<String, CliError> {
    cfg.validate()?;
    let analytic = laplace_transform(s, svals)?;
    let truncated = laplace_transform_within(s, svals, cfg.radius)?;
    let set = monte_carlo(s, cfg)?;
    let n = set.len() as f64;
    let mut rows = Vec::with_capacity(svals.len());
    for (i, &sv) in svals.iter().enumerate() {
        let w: Vec<f64> = set.values.iter().map(|&x| (-sv * x).exp()).collect();
        let mean = w.iter().sum::<f64>() / n;
        let var = if n > 1.0 { w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        rows.push(vec![sv, analytic[i], truncated[i], mean, (var / n).sqrt()]);
    }
    let header = ["s", "analytic", "analytic_truncated", "mc_mean", "mc_std_error"];
    out.write("laplace.csv", &table_csv(fp, &header, &rows))?;
    let table: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| serde_json::json!({ "s": r[0], "analytic": r[1], "analytic_truncated": r[2], "mc_mean": r[3], "mc_std_error": r[4] }))
        .collect();
    json(&serde_json::json!({ "fingerprint": fp, "rows": table }))
}
