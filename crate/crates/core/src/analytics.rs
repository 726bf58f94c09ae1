//! Analytical side: tier integrals, Campbell moments, the scaling coefficient
//! `Xi`, Berry–Esseen envelopes and the Laplace transform of the interference.

use std::f64::consts::PI;

use libm::{erfc, tgamma as gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{PathLossFamily, RadialIntensity, Scenario, TierConfig};
use crate::quadrature::{integrate_pieces, Integral, Tolerance};

/// Uniform Berry–Esseen constant.
pub const UNIFORM_CONSTANT: f64 = 0.4785;
/// Non-uniform Berry–Esseen constant.
pub const NONUNIFORM_CONSTANT: f64 = 31.935;

/// Relative accuracy requested from the radial quadrature.
const RADIAL_TOL: f64 = 1e-13;
/// Tail fraction below which the log substitution may stop early.
const TAIL_FRACTION: f64 = 1e-14;
/// Longest stretch `ln(T / s0)` covered by the log substitution.
const LOG_SPAN: f64 = 12.0;

/// `int_0^inf G^m(t) mu(t) dt` for `m = 1, 2, 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierIntegrals {
    pub first: f64,
    pub second: f64,
    pub third: f64,
    /// Quadrature error estimates (zero when a closed form was used).
    pub errors: [f64; 3],
}

impl TierIntegrals {
    pub fn get(&self, moment: u32) -> f64 {
        match moment {
            1 => self.first,
            2 => self.second,
            3 => self.third,
            _ => f64::NAN,
        }
    }
}

/// `Xi` together with the Campbell mean and variance it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBound {
    pub xi: f64,
    pub mean: f64,
    pub variance: f64,
}

impl GaussianBound {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `Xi * 0.4785`, the bound on the Kolmogorov–Smirnov distance.
    pub fn uniform_bound(&self) -> f64 {
        self.xi * UNIFORM_CONSTANT
    }

    pub fn envelope(&self, x: f64) -> Envelope {
        Envelope::new(self.xi, x)
    }
}

// ---------------------------------------------------------------------------
// Radial integration engine

/// Integrand of the form `phi(G(t)) * mu(t)` with `phi(g) ~ amplitude * g^power` as `g -> 0`.
struct RadialIntegrand<'a, F> {
    tier_index: usize,
    tier: &'a TierConfig,
    phi: F,
    power: u32,
    amplitude: f64,
}

impl<F: Fn(f64) -> f64> RadialIntegrand<'_, F> {
    fn eval(&self, t: f64) -> f64 {
        let mu = self.tier.intensity.density(t);
        if mu == 0.0 {
            return 0.0;
        }
        (self.phi)(self.tier.pathloss.gain(t)) * mu
    }

    /// Closed-form `int_T^inf amplitude * t^(-power*alpha) * law(t) dt` for the far field.
    fn tail_beyond(&self, t: f64) -> Result<f64> {
        let Some(law) = self.tier.intensity.far_field() else {
            return Ok(0.0);
        };
        if law.coeff == 0.0 || self.amplitude == 0.0 {
            return Ok(0.0);
        }
        let decay = self.power as f64 * self.tier.pathloss.alpha - law.exponent;
        if !(decay > 0.0) {
            return Err(Error::Divergent {
                tier: self.tier_index,
                detail: format!("integrand decays like t^{} which is not integrable at infinity", -decay - 1.0),
            });
        }
        if t.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.amplitude * law.coeff * t.powf(-decay) / decay)
    }

    fn integrate(&self, upper: Option<f64>) -> Result<Integral> {
        let intensity = &self.tier.intensity;
        let upper_t = upper.unwrap_or(f64::INFINITY);
        let tol = Tolerance::relative(RADIAL_TOL);

        // Split point beyond which both G and mu are smooth power-law like.
        let mut s0 = 1.0f64.max(intensity.far_field_start());
        for &k in self.tier.pathloss.kinks() {
            s0 = s0.max(k);
        }

        let near_end = s0.min(upper_t);
        let near = match intensity {
            RadialIntensity::PiecewiseTable { .. } => {
                let mut pts = vec![0.0];
                pts.extend(intensity.breakpoints().into_iter().filter(|&b| b > 0.0 && b < near_end));
                pts.extend(self.tier.pathloss.kinks().iter().copied().filter(|&b| b < near_end));
                pts.push(near_end);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                integrate_pieces(|t| self.eval(t), &pts, tol)?
            }
            _ => {
                // w = t^p turns c t^(p-1) dt into (c/p) dw, removing the origin singularity for p < 1.
                let law = intensity.far_field().expect("power-law intensity");
                if law.coeff == 0.0 {
                    Integral::ZERO
                } else {
                    let p = law.exponent;
                    let scale = law.coeff / p;
                    let mut pts = vec![0.0];
                    pts.extend(self.tier.pathloss.kinks().iter().filter(|&&b| b < near_end).map(|b| b.powf(p)));
                    pts.push(near_end.powf(p));
                    let r = integrate_pieces(|w| (self.phi)(self.tier.pathloss.gain(w.powf(1.0 / p))), &pts, tol)?;
                    Integral { value: scale * r.value, abs_error: scale * r.abs_error }
                }
            }
        };
        if upper_t <= s0 {
            return Ok(near);
        }

        let tail_s0 = self.tail_beyond(s0)?;
        if tail_s0 == 0.0 && intensity.far_field().map_or(true, |l| l.coeff == 0.0) {
            return Ok(near);
        }
        // Log substitution while the tail is still significant, then the compact tail.
        let decay = self.power as f64 * self.tier.pathloss.alpha - intensity.growth_exponent().unwrap_or(0.0);
        let estimate = near.value.abs() + tail_s0;
        let t_star = if tail_s0 > TAIL_FRACTION * estimate {
            s0 * (tail_s0 / (TAIL_FRACTION * estimate)).powf(1.0 / decay)
        } else {
            s0
        };
        let t1 = t_star.min(s0 * LOG_SPAN.exp()).min(upper_t);

        let span = (t1 / s0).ln();
        let chunks = (span / 2.0).ceil().max(1.0) as usize;
        let pts: Vec<f64> = (0..=chunks).map(|i| span * i as f64 / chunks as f64).collect();
        let far = integrate_pieces(
            |x| {
                let t = s0 * x.exp();
                self.eval(t) * t
            },
            &pts,
            tol,
        )?;
        if upper_t <= t1 {
            return Ok(near + far);
        }
        Ok(near + far + self.compact_tail(t1, upper_t, decay, tol)?)
    }

    /// `int_T^upper` through `u = (t/T)^(-decay)`, which maps the power-law tail to
    /// `tail_beyond(T)` times a bounded factor tending to 1 as `u -> 0`.
    fn compact_tail(&self, t1: f64, upper_t: f64, decay: f64, tol: Tolerance) -> Result<Integral> {
        let scale = self.tail_beyond(t1)?;
        if scale == 0.0 {
            return Ok(Integral::ZERO);
        }
        let u_lo = if upper_t.is_finite() { (upper_t / t1).powf(-decay) } else { 0.0 };
        let ratio = |u: f64| {
            let t = t1 * u.powf(-1.0 / decay);
            let shape = self.tier.pathloss.far_ratio(t).powi(self.power as i32);
            let g = self.tier.pathloss.gain(t);
            if !(g > 1e-100) {
                return shape;
            }
            shape * (self.phi)(g) / (self.amplitude * g.powi(self.power as i32))
        };
        let r = integrate_pieces(ratio, &[u_lo, 1.0], tol)?;
        Ok(Integral { value: scale * r.value, abs_error: scale * r.abs_error })
    }
}

/// `int_0^inf G^m mu` in closed form where one exists:
/// `G = 1/(1+t^a)`, `mu = c t^(p-1)`  =>  `(c/a) B(p/a, m - p/a)`.
fn closed_form_moment(tier: &TierConfig, moment: u32) -> Option<f64> {
    if tier.pathloss.family != PathLossFamily::InverseOnePlusPower {
        return None;
    }
    let law = match tier.intensity {
        RadialIntensity::Homogeneous2D | RadialIntensity::PowerRadial { .. } => tier.intensity.far_field()?,
        RadialIntensity::PiecewiseTable { .. } => return None,
    };
    let a = tier.pathloss.alpha;
    let m = moment as f64;
    let r = law.exponent / a;
    if !(r > 0.0 && m - r > 0.0) {
        return None;
    }
    Some(law.coeff / a * gamma(r) * gamma(m - r) / gamma(m))
}

fn check_moment(moment: u32) -> Result<()> {
    if !(1..=3).contains(&moment) {
        return Err(Error::Parameter(format!("tier integral moment must be 1, 2 or 3 (got {moment})")));
    }
    Ok(())
}

fn check_single_tier(tier: &TierConfig) -> Result<()> {
    Scenario::new(vec![tier.clone()]).check_tiers()
}

fn moment_integral(index: usize, tier: &TierConfig, moment: u32, upper: Option<f64>) -> Result<Integral> {
    let integrand = RadialIntegrand {
        tier_index: index,
        tier,
        phi: move |g: f64| g.powi(moment as i32),
        power: moment,
        amplitude: 1.0,
    };
    // The divergence check runs even when a closed form exists.
    integrand.tail_beyond(f64::INFINITY)?;
    if upper.is_none() {
        if let Some(v) = closed_form_moment(tier, moment) {
            return Ok(Integral { value: v, abs_error: 0.0 });
        }
    }
    integrand.integrate(upper)
}

/// `int_0^inf G^moment(t) mu(t) dt` for one tier (`moment` in 1..=3).
pub fn tier_integral(tier: &TierConfig, moment: u32) -> Result<f64> {
    check_moment(moment)?;
    check_single_tier(tier)?;
    Ok(moment_integral(0, tier, moment, None)?.value)
}

/// Same integral restricted to `[0, n]`.
pub fn tier_integral_within(tier: &TierConfig, moment: u32, n: f64) -> Result<f64> {
    check_moment(moment)?;
    check_radius(n)?;
    check_single_tier(tier)?;
    Ok(moment_integral(0, tier, moment, Some(n))?.value)
}

/// Forces the quadrature route even where a closed form exists.
pub fn tier_integral_quadrature(tier: &TierConfig, moment: u32) -> Result<Integral> {
    check_moment(moment)?;
    check_single_tier(tier)?;
    let integrand = RadialIntegrand {
        tier_index: 0,
        tier,
        phi: move |g: f64| g.powi(moment as i32),
        power: moment,
        amplitude: 1.0,
    };
    integrand.integrate(None)
}

pub fn tier_integrals(tier: &TierConfig) -> Result<TierIntegrals> {
    check_single_tier(tier)?;
    tier_integrals_at(0, tier, None)
}

fn tier_integrals_at(index: usize, tier: &TierConfig, upper: Option<f64>) -> Result<TierIntegrals> {
    let i1 = moment_integral(index, tier, 1, upper)?;
    let i2 = moment_integral(index, tier, 2, upper)?;
    let i3 = moment_integral(index, tier, 3, upper)?;
    Ok(TierIntegrals {
        first: i1.value,
        second: i2.value,
        third: i3.value,
        errors: [i1.abs_error, i2.abs_error, i3.abs_error],
    })
}

fn check_radius(n: f64) -> Result<()> {
    if !(n >= 0.0) {
        return Err(Error::Domain { what: "truncation radius must be >= 0", value: n });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Campbell moments and Xi

/// Per-tier `(lambda P m_H I1, lambda P^2 m_H2 I2, lambda P^3 m_H3 I3)`.
fn cumulant_terms(s: &Scenario, upper: Option<f64>) -> Result<Vec<[f64; 3]>> {
    s.check_tiers()?;
    let mut out = Vec::with_capacity(s.tiers.len());
    for (k, tier) in s.tiers.iter().enumerate() {
        if tier.lambda == 0.0 {
            out.push([0.0; 3]);
            continue;
        }
        let m = tier.fading.moments()?;
        let ints = tier_integrals_at(k, tier, upper)?;
        let (l, p) = (tier.lambda, tier.power);
        out.push([l * p * m.m1 * ints.first, l * p * p * m.m2 * ints.second, l * p.powi(3) * m.m3 * ints.third]);
    }
    Ok(out)
}

/// `E[I] = sum_k lambda_k P_k E[H_k] int G_k mu_k`.
pub fn campbell_mean(s: &Scenario) -> Result<f64> {
    Ok(cumulant_terms(s, None)?.iter().map(|t| t[0]).sum())
}

/// `Var[I] = sum_k lambda_k P_k^2 E[H_k^2] int G_k^2 mu_k`.
pub fn campbell_variance(s: &Scenario) -> Result<f64> {
    Ok(cumulant_terms(s, None)?.iter().map(|t| t[1]).sum())
}

/// Mean of the Poisson field restricted to base stations within distance `n`.
pub fn campbell_mean_within(s: &Scenario, n: f64) -> Result<f64> {
    check_radius(n)?;
    Ok(cumulant_terms(s, Some(n))?.iter().map(|t| t[0]).sum())
}

/// Variance of the Poisson field restricted to base stations within distance `n`.
pub fn campbell_variance_within(s: &Scenario, n: f64) -> Result<f64> {
    check_radius(n)?;
    Ok(cumulant_terms(s, Some(n))?.iter().map(|t| t[1]).sum())
}

fn assemble_xi(terms: &[[f64; 3]]) -> Result<GaussianBound> {
    let mean: f64 = terms.iter().map(|t| t[0]).sum();
    let variance: f64 = terms.iter().map(|t| t[1]).sum();
    let scale = terms.iter().map(|t| t[1]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::Degenerate("interference variance is zero".into()));
    }
    let num: f64 = terms.iter().map(|t| t[2] / scale).sum::<f64>() / scale.sqrt();
    let den: f64 = terms.iter().map(|t| t[1] / scale).sum();
    Ok(GaussianBound { xi: num / den.powf(1.5), mean, variance })
}

/// The scaling coefficient `Xi` with the Campbell mean and variance.
pub fn xi_coefficient(s: &Scenario) -> Result<GaussianBound> {
    assemble_xi(&cumulant_terms(s, None)?)
}

/// `Xi`, mean and variance for the field restricted to distances `<= n`.
///
/// The restricted field is itself a Poisson field with intensity `mu(t) 1{t <= n}`,
/// so the same Berry–Esseen bound applies to it with this coefficient.
pub fn xi_coefficient_within(s: &Scenario, n: f64) -> Result<GaussianBound> {
    check_radius(n)?;
    assemble_xi(&cumulant_terms(s, Some(n))?)
}

/// `Xi` for all-homogeneous scenarios, written with the `1/sqrt(2 pi)` prefactor and
/// `int G^m(t) t dt` integrals.
pub fn xi_homogeneous(s: &Scenario) -> Result<f64> {
    s.check_tiers()?;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, tier) in s.tiers.iter().enumerate() {
        if tier.intensity != RadialIntensity::Homogeneous2D {
            return Err(Error::Parameter(format!("tier {k} is not homogeneous")));
        }
        if tier.lambda == 0.0 {
            continue;
        }
        let m = tier.fading.moments()?;
        let (j2, j3) = linear_weight_integrals(k, tier)?;
        num += tier.lambda * tier.power.powi(3) * m.m3 * j3;
        den += tier.lambda * tier.power.powi(2) * m.m2 * j2;
    }
    if !(den > 0.0) {
        return Err(Error::Degenerate("interference variance is zero".into()));
    }
    Ok(num / den.powf(1.5) / (2.0 * PI).sqrt())
}

/// `(int G^2(t) t dt, int G^3(t) t dt)`.
fn linear_weight_integrals(k: usize, tier: &TierConfig) -> Result<(f64, f64)> {
    let mut unit = tier.clone();
    unit.intensity = RadialIntensity::power_radial(1.0, 2.0);
    Ok((moment_integral(k, &unit, 2, None)?.value, moment_integral(k, &unit, 3, None)?.value))
}

/// `Xi` for `k` identical homogeneous tiers collapsed to one:
/// `(1/sqrt(2 pi)) (1/sqrt(k lambda)) (m_H3 / m_H2^(3/2)) (int G^3 t / (int G^2 t)^(3/2))`.
pub fn xi_identical_tiers(tier: &TierConfig, k: usize) -> Result<f64> {
    check_single_tier(tier)?;
    if k == 0 || !(tier.lambda > 0.0) {
        return Err(Error::Degenerate("identical-tier formula needs k >= 1 and lambda > 0".into()));
    }
    if tier.intensity != RadialIntensity::Homogeneous2D {
        return Err(Error::Parameter("identical-tier formula needs a homogeneous tier".into()));
    }
    let m = tier.fading.moments()?;
    let (j2, j3) = linear_weight_integrals(0, tier)?;
    Ok((1.0 / (2.0 * PI).sqrt())
        * (1.0 / (k as f64 * tier.lambda).sqrt())
        * (m.m3 / m.m2.powf(1.5))
        * (j3 / j2.powf(1.5)))
}

// ---------------------------------------------------------------------------
// Envelopes

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `c(x) = min(0.4785, 31.935 / (1 + |x|^3))`.
pub fn envelope_c(x: f64) -> f64 {
    UNIFORM_CONSTANT.min(NONUNIFORM_CONSTANT / (1.0 + x.abs().powi(3)))
}

/// `|x|` where the two branches of [`envelope_c`] meet.
pub fn envelope_crossover() -> f64 {
    (NONUNIFORM_CONSTANT / UNIFORM_CONSTANT - 1.0).cbrt()
}

/// CDF band `Psi(x) -/+ Xi c(x)` at one point, clamped and unclamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub x: f64,
    pub psi: f64,
    pub lower_unclamped: f64,
    pub upper_unclamped: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Envelope {
    pub fn new(xi: f64, x: f64) -> Self {
        let psi = std_normal_cdf(x);
        let half = xi * envelope_c(x);
        let lower_unclamped = psi - half;
        let upper_unclamped = psi + half;
        Self {
            x,
            psi,
            lower_unclamped,
            upper_unclamped,
            lower: lower_unclamped.clamp(0.0, 1.0),
            upper: upper_unclamped.clamp(0.0, 1.0),
        }
    }

    /// Whether clamping changed either side.
    pub fn clamped(&self) -> bool {
        self.lower != self.lower_unclamped || self.upper != self.upper_unclamped
    }
}

pub fn cdf_envelope(s: &Scenario, x: f64) -> Result<Envelope> {
    Ok(Envelope::new(xi_coefficient(s)?.xi, x))
}

// ---------------------------------------------------------------------------
// Fading-alignment lower bound and scaling certificate

/// `(1 / (|c| |b|))^(3/2) sum_k a_k c_k^(3/2)` with `a_k = lambda_k I3_k`,
/// `b_k = lambda_k I2_k`, `c_k = P_k^2 E[H_k^2]`. Idle tiers are dropped.
pub fn lemma2_lower_bound(s: &Scenario) -> Result<f64> {
    s.check_tiers()?;
    let (mut b2, mut c2, mut sum) = (0.0, 0.0, 0.0);
    for (k, tier) in s.tiers.iter().enumerate() {
        if tier.lambda == 0.0 {
            continue;
        }
        let ints = tier_integrals_at(k, tier, None)?;
        let m = tier.fading.moments()?;
        let a = tier.lambda * ints.third;
        let b = tier.lambda * ints.second;
        let c = tier.power * tier.power * m.m2;
        b2 += b * b;
        c2 += c * c;
        sum += a * c.powf(1.5);
    }
    let norm = (b2.sqrt() * c2.sqrt()).powf(1.5);
    if !(norm > 0.0) {
        return Err(Error::Degenerate("interference variance is zero".into()));
    }
    Ok(sum / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub factor: f64,
    pub lambda_norm: f64,
    pub xi: f64,
    /// `Xi * sqrt(factor)`
    pub xi_sqrt_factor: f64,
    /// `Xi * sqrt(|lambda|_2)`
    pub xi_sqrt_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCertificate {
    pub rows: Vec<ScalingRow>,
    /// `(max - min) / max` of `Xi * sqrt(factor)` across rows.
    pub relative_spread: f64,
}

/// `Xi` under uniform scaling of the intensity vector by each factor.
pub fn lemma1_scaling_certificate(s: &Scenario, factors: &[f64]) -> Result<ScalingCertificate> {
    let all: Vec<usize> = (0..s.tiers.len()).collect();
    lemma1_scaling_certificate_tiers(s, factors, &all)
}

/// Like [`lemma1_scaling_certificate`] but scales only the listed tiers.
pub fn lemma1_scaling_certificate_tiers(s: &Scenario, factors: &[f64], tiers: &[usize]) -> Result<ScalingCertificate> {
    let mut rows = Vec::with_capacity(factors.len());
    for &factor in factors {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::Domain { what: "scaling factor must be > 0", value: factor });
        }
        let mut scaled = s.clone();
        for &k in tiers {
            let tier = scaled.tiers.get_mut(k).ok_or_else(|| Error::Parameter(format!("no tier with index {k}")))?;
            tier.lambda *= factor;
        }
        let xi = xi_coefficient(&scaled)?.xi;
        let lambda_norm = scaled.tiers.iter().map(|t| t.lambda * t.lambda).sum::<f64>().sqrt();
        rows.push(ScalingRow {
            factor,
            lambda_norm,
            xi,
            xi_sqrt_factor: xi * factor.sqrt(),
            xi_sqrt_norm: xi * lambda_norm.sqrt(),
        });
    }
    let max = rows.iter().map(|r| r.xi_sqrt_factor).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.xi_sqrt_factor).fold(f64::MAX, f64::min);
    let relative_spread = if rows.is_empty() { 0.0 } else { (max - min) / max };
    Ok(ScalingCertificate { rows, relative_spread })
}

// ---------------------------------------------------------------------------
// Laplace transform

fn laplace_at(s: &Scenario, sval: f64, upper: Option<f64>) -> Result<f64> {
    if !(sval >= 0.0) {
        return Err(Error::Domain { what: "Laplace argument must be >= 0", value: sval });
    }
    if sval == 0.0 {
        return Ok(1.0);
    }
    let mut exponent = 0.0;
    for (k, tier) in s.tiers.iter().enumerate() {
        if tier.lambda == 0.0 {
            continue;
        }
        let m1 = tier.fading.moments()?.m1;
        let fading = tier.fading;
        let sp = sval * tier.power;
        // Inner expectation over the fading is the closed-form fading transform.
        let integrand = RadialIntegrand {
            tier_index: k,
            tier,
            phi: move |g: f64| fading.one_minus_laplace(sp * g),
            power: 1,
            amplitude: sp * m1,
        };
        exponent += tier.lambda * integrand.integrate(upper)?.value;
    }
    Ok((-exponent).exp())
}

/// `E[exp(-s I)]` at each `s`.
pub fn laplace_transform(s: &Scenario, svals: &[f64]) -> Result<Vec<f64>> {
    s.check_tiers()?;
    svals.iter().map(|&v| laplace_at(s, v, None)).collect()
}

/// Laplace transform of the Poisson field restricted to distances `<= n`.
pub fn laplace_transform_within(s: &Scenario, svals: &[f64], n: f64) -> Result<Vec<f64>> {
    check_radius(n)?;
    s.check_tiers()?;
    svals.iter().map(|&v| laplace_at(s, v, Some(n))).collect()
}

/// Analytic bound on the mean contribution of base stations beyond distance `n`.
pub fn truncation_mean_gap(s: &Scenario, n: f64) -> Result<f64> {
    Ok(campbell_mean(s)? - campbell_mean_within(s, n)?)
}
