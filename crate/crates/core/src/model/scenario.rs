use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{FadingModel, PathLossModel, RadialIntensity};
use crate::error::{Error, Result};

/// One tier of base stations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierConfig {
    pub power: f64,
    pub lambda: f64,
    pub intensity: RadialIntensity,
    pub pathloss: PathLossModel,
    pub fading: FadingModel,
}

impl TierConfig {
    /// Homogeneous planar tier, the most common configuration.
    pub fn homogeneous(power: f64, lambda: f64, pathloss: PathLossModel, fading: FadingModel) -> Self {
        Self { power, lambda, intensity: RadialIntensity::Homogeneous2D, pathloss, fading }
    }

    fn violations(&self, tier: usize, out: &mut Vec<Violation>) {
        let mut push = |kind: ViolationKind, detail: String| out.push(Violation { tier: Some(tier), kind, detail });
        if !(self.power > 0.0 && self.power.is_finite()) {
            push(ViolationKind::Power, format!("power > 0 required (got {})", self.power));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            push(ViolationKind::Lambda, format!("lambda >= 0 required (got {})", self.lambda));
        }
        let alpha = self.pathloss.alpha;
        if !(alpha > 2.0 && alpha.is_finite()) {
            push(ViolationKind::Alpha, format!("alpha > 2 required (got {alpha})"));
        }
        if let Err(e) = self.fading.validate() {
            push(ViolationKind::Fading, e.to_string());
        }
        match self.intensity.check() {
            Err(msg) => push(ViolationKind::Intensity, msg),
            Ok(()) => {
                if let Some(p) = self.intensity.growth_exponent() {
                    // mu(t) = O(t^(alpha - 1 - eps)) for some eps > 0, i.e. p - 1 < alpha - 1.
                    if !(p < alpha) {
                        push(
                            ViolationKind::Growth,
                            format!("growth constraint: mu growth t^{} exceeds alpha-1 = {}", p - 1.0, alpha - 1.0),
                        );
                    }
                }
            }
        }
    }
}

/// An ordered collection of tiers; the complete input to analysis and simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub tiers: Vec<TierConfig>,
}

impl Scenario {
    pub fn new(tiers: Vec<TierConfig>) -> Self {
        Self { tiers }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_scenario(self)
    }

    /// Returns the scenario if it passes validation.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.is_pass() {
            Ok(self)
        } else {
            Err(Error::Invalid(report))
        }
    }

    /// Per-tier checks only; used by analytics, which accept all-zero `lambda`.
    pub(crate) fn check_tiers(&self) -> Result<()> {
        let mut v = Vec::new();
        for (k, tier) in self.tiers.iter().enumerate() {
            tier.violations(k, &mut v);
        }
        if let Some(first) = v.first() {
            if matches!(first.kind, ViolationKind::Growth | ViolationKind::Alpha) {
                return Err(Error::Divergent { tier: first.tier.unwrap_or(0), detail: first.detail.clone() });
            }
            return Err(Error::Invalid(ValidationReport { violations: v }));
        }
        Ok(())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.tiers.iter().map(|t| t.lambda).collect()
    }

    /// Copy with every `lambda_k` multiplied by `factor`.
    pub fn scale_lambdas(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.tiers {
            t.lambda *= factor;
        }
        out
    }

    /// Copy with every `P_k` multiplied by `factor`.
    pub fn scale_powers(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.tiers {
            t.power *= factor;
        }
        out
    }

    /// Canonical JSON rendering: fixed field order and shortest round-trip floats.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("scenario serialization is infallible")
    }

    /// SHA-256 over the canonical JSON, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex_digest(self.canonical_json().as_bytes(), None)
    }

    /// Fingerprint that also binds a simulation seed.
    pub fn fingerprint_with_seed(&self, seed: u64) -> String {
        hex_digest(self.canonical_json().as_bytes(), Some(seed))
    }
}

fn hex_digest(body: &[u8], seed: Option<u64>) -> String {
    let mut h = Sha256::new();
    h.update(body);
    if let Some(seed) = seed {
        h.update(b"\nseed=");
        h.update(seed.to_string().as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Power,
    Lambda,
    Alpha,
    Growth,
    Fading,
    Intensity,
    NoActiveTier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Offending tier, `None` for scenario-wide problems.
    pub tier: Option<usize>,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("pass");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match v.tier {
                Some(k) => write!(f, "tier {k}: {}", v.detail)?,
                None => f.write_str(&v.detail)?,
            }
        }
        Ok(())
    }
}

/// Checks every modeling assumption and reports all violations at once.
pub fn validate_scenario(s: &Scenario) -> ValidationReport {
    let mut violations = Vec::new();
    for (k, tier) in s.tiers.iter().enumerate() {
        tier.violations(k, &mut violations);
    }
    if !s.tiers.iter().any(|t| t.lambda > 0.0) {
        violations.push(Violation {
            tier: None,
            kind: ViolationKind::NoActiveTier,
            detail: "at least one tier with lambda > 0 required".into(),
        });
    }
    ValidationReport { violations }
}
