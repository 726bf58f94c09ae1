//! Empirical CDFs, Kolmogorov–Smirnov distances and envelope checks.

use serde::{Deserialize, Serialize};

use crate::analytics::{
    campbell_mean, campbell_mean_within, campbell_variance, envelope_c, std_normal_cdf, xi_coefficient,
};
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::simulate::{monte_carlo, SimConfig};

/// Fraction of `sorted` samples `<= x`.
pub fn empirical_cdf(sorted: &[f64], x: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::Empty("empirical CDF of an empty sample"));
    }
    Ok(sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64)
}

fn sorted_copy(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Largest gap between the step function and `Psi` around the `i`-th order statistic
/// (0-based): `max(|(i+1)/n - Psi(x)|, |Psi(x) - i/n|)`.
#[inline]
fn gap_at(i: usize, n: f64, psi: f64) -> f64 {
    let above = (i + 1) as f64 / n;
    let below = i as f64 / n;
    (above - psi).abs().max((psi - below).abs())
}

/// `sup_x |F_n(x) - Psi(x)|`, evaluated exactly at the jumps of `F_n`.
pub fn ks_distance_to_normal(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("Kolmogorov-Smirnov distance of an empty sample"));
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().map(|(i, &x)| gap_at(i, n, std_normal_cdf(x))).fold(0.0, f64::max))
}

/// Two-sample Kolmogorov–Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("two-sample Kolmogorov-Smirnov with an empty side"));
    }
    let (a, b) = (sorted_copy(a), sorted_copy(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic two-sample critical value at level `alpha`: `sqrt(-ln(alpha/2)/2) sqrt((n+m)/(nm))`.
pub fn ks_two_sample_critical(alpha: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (-(alpha / 2.0).ln() / 2.0).sqrt() * ((n + m) / (n * m)).sqrt()
}

/// Dvoretzky–Kiefer–Wolfowitz band half-width: with probability `1 - delta`,
/// `sup |F_n - F| <= sqrt(ln(2/delta) / (2n))`.
pub fn dkw_slack(delta: f64, n: usize) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// Comparison of standardized samples against the Berry–Esseen band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sorted: Vec<f64>,
    pub sample_count: usize,
    pub ks_distance: f64,
    pub xi: f64,
    /// `Xi * 0.4785`
    pub bound_uniform: f64,
    /// Sample points where `|F_n - Psi| > Xi c(x) + slack`.
    pub envelope_violations: usize,
    /// DKW confidence level `delta` used for the slack.
    pub slack_level: f64,
    pub slack: f64,
    /// `max_x (|F_n - Psi| - Xi c(x))` over the sample points; negative when the band holds strictly.
    pub max_excess: f64,
}

/// Checks standardized samples against the band of the scenario's `Xi`.
pub fn envelope_report(samples: &[f64], s: &Scenario, slack_level: f64) -> Result<EmpiricalReport> {
    let xi = xi_coefficient(s)?.xi;
    envelope_report_with_xi(samples, xi, slack_level)
}

/// Same as [`envelope_report`] with an explicit coefficient.
pub fn envelope_report_with_xi(samples: &[f64], xi: f64, slack_level: f64) -> Result<EmpiricalReport> {
    if samples.is_empty() {
        return Err(Error::Empty("envelope report of an empty sample"));
    }
    if !(slack_level > 0.0 && slack_level < 1.0) {
        return Err(Error::Domain { what: "slack level must lie in (0, 1)", value: slack_level });
    }
    let sorted = sorted_copy(samples);
    let n = sorted.len();
    let slack = dkw_slack(slack_level, n);
    let (mut ks, mut excess, mut violations) = (0.0f64, f64::NEG_INFINITY, 0usize);
    for (i, &x) in sorted.iter().enumerate() {
        let gap = gap_at(i, n as f64, std_normal_cdf(x));
        let band = xi * envelope_c(x);
        ks = ks.max(gap);
        excess = excess.max(gap - band);
        if gap > band + slack {
            violations += 1;
        }
    }
    Ok(EmpiricalReport {
        sorted,
        sample_count: n,
        ks_distance: ks,
        xi,
        bound_uniform: xi * crate::analytics::UNIFORM_CONSTANT,
        envelope_violations: violations,
        slack_level,
        slack,
        max_excess: excess,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub radius: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// Standard error of `sample_mean`.
    pub mean_std_error: f64,
    /// `lambda P E[H] int_0^n G mu` summed over tiers.
    pub truncated_mean: f64,
    pub analytic_mean: f64,
    pub analytic_variance: f64,
    /// `|sample_mean - analytic_mean|`
    pub mean_gap: f64,
    /// `|sample_variance - analytic_variance|`
    pub variance_gap: f64,
    /// `analytic_mean - truncated_mean`
    pub truncation_gap: f64,
}

/// Simulated versus analytic moments at each truncation radius (ascending).
pub fn convergence_diagnostic(s: &Scenario, radii: &[f64], cfg: &SimConfig) -> Result<Vec<ConvergenceRow>> {
    if radii.is_empty() {
        return Err(Error::Empty("no radii given"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("radii must be strictly ascending".into()));
    }
    let analytic_mean = campbell_mean(s)?;
    let analytic_variance = campbell_variance(s)?;
    radii
        .iter()
        .map(|&radius| {
            let set = monte_carlo(s, &SimConfig { radius, ..*cfg })?;
            let sample_mean = set.mean();
            let sample_variance = if set.len() > 1 { set.variance() } else { 0.0 };
            let truncated_mean = campbell_mean_within(s, radius)?;
            Ok(ConvergenceRow {
                radius,
                sample_mean,
                sample_variance,
                mean_std_error: (sample_variance / set.len() as f64).sqrt(),
                truncated_mean,
                analytic_mean,
                analytic_variance,
                mean_gap: (sample_mean - analytic_mean).abs(),
                variance_gap: (sample_variance - analytic_variance).abs(),
                truncation_gap: analytic_mean - truncated_mean,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::substream;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn step_function_values() {
        let s = [-1.0, 0.0, 1.0];
        assert!((empirical_cdf(&s, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(empirical_cdf(&s, -5.0).unwrap(), 0.0);
        assert_eq!(empirical_cdf(&s, 5.0).unwrap(), 1.0);
        assert_eq!(empirical_cdf(&s, 1.0).unwrap(), 1.0);
        let odd = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((empirical_cdf(&odd, 3.0).unwrap() - 6.0 / 10.0).abs() < 1e-15);
        assert!(empirical_cdf(&[], 0.0).is_err());
    }

    #[test]
    fn ks_small_samples() {
        let d = ks_distance_to_normal(&[-1.0, 0.0, 1.0]).unwrap();
        assert!((d - 0.174_678_079_401_876_3).abs() < 1e-12, "{d}");
        assert_eq!(ks_distance_to_normal(&[0.0]).unwrap(), 0.5);
        assert!(ks_distance_to_normal(&[]).is_err());
        // order does not matter
        assert_eq!(ks_distance_to_normal(&[1.0, -1.0, 0.0]).unwrap(), d);
    }

    #[test]
    fn ks_of_normal_draws_is_within_dkw() {
        let mut rng = substream(99, 0, 0);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let d = ks_distance_to_normal(&draws).unwrap();
        assert!(d < dkw_slack(0.01, n), "{d}");
        assert!(d < 0.01);
    }

    #[test]
    fn two_sample_statistic() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert!((ks_two_sample(&[1.0, 2.0, 3.0, 4.0], &[2.5]).unwrap() - 0.5).abs() < 1e-15);
        assert!((ks_two_sample_critical(0.01, 10_000, 10_000) - 1.627_7 * (2.0f64 / 10_000.0).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn envelope_detects_shift() {
        let mut rng = substream(7, 0, 0);
        let draws: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ok = envelope_report_with_xi(&draws, 0.05, 0.01).unwrap();
        assert_eq!(ok.envelope_violations, 0);
        assert!(ok.ks_distance <= ok.bound_uniform + ok.slack);
        let shifted: Vec<f64> = draws.iter().map(|x| x + 0.5).collect();
        let bad = envelope_report_with_xi(&shifted, 0.05, 0.01).unwrap();
        assert!(bad.envelope_violations > 0);
        assert!(bad.max_excess > 0.1);
        assert!(envelope_report_with_xi(&draws, 0.05, 1.0).is_err());
    }

    #[test]
    fn uniform_branch_at_origin() {
        // Single point at 0: |F_n - Psi| = 0.5 around the jump; band at x = 0 is xi * 0.4785.
        let r = envelope_report_with_xi(&[0.0], 1.0, 0.5).unwrap();
        assert!((r.max_excess - (0.5 - 0.4785)).abs() < 1e-15);
        assert_eq!(r.envelope_violations, 0); // slack sqrt(ln 4 / 2) ~ 0.83
    }
}
