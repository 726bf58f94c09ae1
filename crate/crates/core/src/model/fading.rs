use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Distribution of the fading power gain `H` applied to one base station's signal.
///
/// Parameters describe the power gain directly; Rayleigh amplitude fading is an
/// exponential power gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FadingModel {
    Deterministic { gain: f64 },
    RayleighPower { mean_power: f64 },
    NakagamiPower { m: f64, mean_power: f64 },
    RicianPower { k_factor: f64, mean_power: f64 },
}

/// First three raw moments of the power gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingMoments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        match *self {
            FadingModel::Deterministic { gain } => {
                if !(gain > 0.0 && gain.is_finite()) {
                    return bad(format!("deterministic fading gain must be > 0 (got {gain})"));
                }
            }
            FadingModel::RayleighPower { mean_power } => check_mean_power(mean_power)?,
            FadingModel::NakagamiPower { m, mean_power } => {
                check_mean_power(mean_power)?;
                if !(m >= 0.5 && m.is_finite()) {
                    return bad(format!("Nakagami m must be >= 0.5 (got {m})"));
                }
            }
            FadingModel::RicianPower { k_factor, mean_power } => {
                check_mean_power(mean_power)?;
                if !(k_factor >= 0.0 && k_factor.is_finite()) {
                    return bad(format!("Rician K-factor must be >= 0 (got {k_factor})"));
                }
            }
        }
        Ok(())
    }

    /// `E[H]`, `E[H^2]`, `E[H^3]`. Closed form except for Rician fading, whose
    /// moments are integrated against the density.
    pub fn moments(&self) -> Result<FadingMoments> {
        self.validate()?;
        let m = match *self {
            FadingModel::Deterministic { gain } => FadingMoments { m1: gain, m2: gain * gain, m3: gain.powi(3) },
            FadingModel::RayleighPower { mean_power: w } => {
                FadingMoments { m1: w, m2: 2.0 * w * w, m3: 6.0 * w.powi(3) }
            }
            FadingModel::NakagamiPower { m, mean_power: w } => {
                // Gamma(shape m, scale w/m): E[H^k] = w^k * m(m+1)...(m+k-1) / m^k
                let r1 = 1.0;
                let r2 = (m + 1.0) / m;
                let r3 = r2 * (m + 2.0) / m;
                FadingMoments { m1: w * r1, m2: w * w * r2, m3: w.powi(3) * r3 }
            }
            FadingModel::RicianPower { k_factor, mean_power } => rician_moments(k_factor, mean_power)?,
        };
        Ok(m)
    }

    /// `1 - E[exp(-theta H)]`, computed without cancellation for small `theta`.
    pub fn one_minus_laplace(&self, theta: f64) -> f64 {
        match *self {
            FadingModel::Deterministic { gain } => -(-theta * gain).exp_m1(),
            FadingModel::RayleighPower { mean_power } => {
                let x = theta * mean_power;
                x / (1.0 + x)
            }
            FadingModel::NakagamiPower { m, mean_power } => -(-m * (theta * mean_power / m).ln_1p()).exp_m1(),
            FadingModel::RicianPower { k_factor, mean_power } => {
                let x = theta * mean_power;
                let e = (x / (k_factor + 1.0)).ln_1p() + k_factor * x / (k_factor + 1.0 + x);
                -(-e).exp_m1()
            }
        }
    }

    /// Builds a sampler. The model must already be valid.
    pub fn sampler(&self) -> Result<FadingSampler> {
        self.validate()?;
        let s = match *self {
            FadingModel::Deterministic { gain } => FadingSampler::Constant(gain),
            FadingModel::RayleighPower { mean_power } => FadingSampler::Exponential(mean_power),
            FadingModel::NakagamiPower { m, mean_power } => {
                FadingSampler::Gamma(Gamma::new(m, mean_power / m).map_err(|e| Error::Parameter(e.to_string()))?)
            }
            FadingModel::RicianPower { k_factor, mean_power } => FadingSampler::Rician {
                los: (k_factor * mean_power / (k_factor + 1.0)).sqrt(),
                sigma: (mean_power / (2.0 * (k_factor + 1.0))).sqrt(),
            },
        };
        Ok(s)
    }

    /// One draw of the power gain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sampler()?.sample(rng))
    }
}

fn check_mean_power(w: f64) -> Result<()> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::Parameter(format!("mean power must be > 0 (got {w})")));
    }
    Ok(())
}

/// Pre-built sampler for a [`FadingModel`].
#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    Constant(f64),
    Exponential(f64),
    Gamma(Gamma<f64>),
    Rician { los: f64, sigma: f64 },
}

impl FadingSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingSampler::Constant(h) => *h,
            FadingSampler::Exponential(w) => {
                let e: f64 = rng.sample(rand_distr::Exp1);
                e * w
            }
            FadingSampler::Gamma(g) => g.sample(rng),
            FadingSampler::Rician { los, sigma } => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                let re = los + sigma * x;
                let im = sigma * y;
                re * re + im * im
            }
        }
    }
}

/// `exp(-x) * I0(x)` for `x >= 0`.
fn bessel_i0_scaled(x: f64) -> f64 {
    if x < 30.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut j = 1.0;
        loop {
            term *= q / (j * j);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            j += 1.0;
        }
        sum * (-x).exp()
    } else {
        // Asymptotic expansion; terms shrink until k ~ 2x, so 20 terms are far inside that.
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..20 {
            let c = (2 * k - 1) as f64;
            term *= c * c / (k as f64 * 8.0 * x);
            sum += term;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// Rician power moments by integrating `h^k q(h)` in the normalized variable
/// `y = (K + 1) h / mean_power`, whose density is `exp(-(sqrt(K) - sqrt(y))^2) * I0e(2 sqrt(K y))`.
fn rician_moments(k: f64, w: f64) -> Result<FadingMoments> {
    let sk = k.sqrt();
    let density = move |y: f64| {
        let sy = y.sqrt();
        let d = sk - sy;
        (-d * d).exp() * bessel_i0_scaled(2.0 * sk * sy)
    };
    // Beyond (sqrt(K) + 9)^2 the density is below exp(-81).
    let upper = (sk + 9.0).powi(2);
    let mut points = vec![0.0];
    if k > 0.0 && k < upper {
        points.push(k);
    }
    points.push(upper);
    let tol = Tolerance::relative(1e-13);
    let scale = w / (k + 1.0);
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let p = (i + 1) as i32;
        let r = quadrature::integrate_pieces(|y| y.powi(p) * density(y), &points, tol)?;
        *slot = r.value * scale.powi(p);
    }
    Ok(FadingMoments { m1: out[0], m2: out[1], m3: out[2] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_form_moments() {
        let d = FadingModel::Deterministic { gain: 1.0 }.moments().unwrap();
        assert_eq!((d.m1, d.m2, d.m3), (1.0, 1.0, 1.0));
        let r = FadingModel::RayleighPower { mean_power: 1.0 }.moments().unwrap();
        assert_eq!((r.m1, r.m2, r.m3), (1.0, 2.0, 6.0));
        let n = FadingModel::NakagamiPower { m: 2.0, mean_power: 1.0 }.moments().unwrap();
        assert_eq!((n.m1, n.m2, n.m3), (1.0, 1.5, 3.0));
    }

    #[test]
    fn rician_moments_match_noncentral_chi_square_forms() {
        // E[H^k] of a Rician power gain with K-factor k and mean w.
        let oracle = |k: f64, w: f64| {
            let d = k + 1.0;
            (
                w,
                w * w * (2.0 + 4.0 * k + k * k) / (d * d),
                w.powi(3) * (6.0 + 18.0 * k + 9.0 * k * k + k.powi(3)) / d.powi(3),
            )
        };
        for (k, w) in [(0.0, 1.0), (0.5, 2.0), (3.0, 1.0), (10.0, 0.7), (60.0, 1.3)] {
            let m = FadingModel::RicianPower { k_factor: k, mean_power: w }.moments().unwrap();
            let (o1, o2, o3) = oracle(k, w);
            assert!(rel(m.m1, o1) < 1e-10, "K={k} m1 {} vs {o1}", m.m1);
            assert!(rel(m.m2, o2) < 1e-10, "K={k} m2 {} vs {o2}", m.m2);
            assert!(rel(m.m3, o3) < 1e-10, "K={k} m3 {} vs {o3}", m.m3);
        }
    }

    #[test]
    fn bessel_branches_agree_at_switch() {
        let lo = {
            let x: f64 = 30.0;
            let q = 0.25 * x * x;
            let (mut t, mut s) = (1.0, 1.0);
            for j in 1..200 {
                t *= q / ((j * j) as f64);
                s += t;
            }
            s * (-x).exp()
        };
        assert!(rel(bessel_i0_scaled(30.0), lo) < 1e-14);
    }

    #[test]
    fn parameter_errors() {
        assert!(FadingModel::RayleighPower { mean_power: 0.0 }.moments().is_err());
        assert!(FadingModel::NakagamiPower { m: 0.4, mean_power: 1.0 }.moments().is_err());
        assert!(FadingModel::RicianPower { k_factor: -1.0, mean_power: 1.0 }.moments().is_err());
        assert!(FadingModel::Deterministic { gain: 0.0 }.moments().is_err());
    }

    #[test]
    fn jensen_ordering_holds() {
        for f in [
            FadingModel::Deterministic { gain: 2.0 },
            FadingModel::RayleighPower { mean_power: 3.0 },
            FadingModel::NakagamiPower { m: 0.5, mean_power: 1.0 },
            FadingModel::NakagamiPower { m: 7.0, mean_power: 0.2 },
            FadingModel::RicianPower { k_factor: 4.0, mean_power: 1.0 },
        ] {
            let m = f.moments().unwrap();
            let slack = 1e-12 * m.m3;
            assert!(m.m3 + slack >= m.m2.powf(1.5), "{f:?}");
            assert!(m.m2.powf(1.5) + slack >= m.m1.powi(3), "{f:?}");
        }
    }

    #[test]
    fn laplace_complement_small_and_large_theta() {
        let ray = FadingModel::RayleighPower { mean_power: 1.0 };
        assert_eq!(ray.one_minus_laplace(0.0), 0.0);
        assert!(rel(ray.one_minus_laplace(1e-12), 1e-12) < 1e-9);
        assert!(rel(ray.one_minus_laplace(1.0), 0.5) < 1e-15);
        // Rician with K = 0 is Rayleigh.
        let ric = FadingModel::RicianPower { k_factor: 0.0, mean_power: 1.0 };
        assert!(rel(ric.one_minus_laplace(2.5), ray.one_minus_laplace(2.5)) < 1e-14);
        // Nakagami m = 1 is Rayleigh.
        let nak = FadingModel::NakagamiPower { m: 1.0, mean_power: 1.0 };
        assert!(rel(nak.one_minus_laplace(0.3), ray.one_minus_laplace(0.3)) < 1e-14);
    }

    #[test]
    fn deterministic_sampler_is_constant() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let f = FadingModel::Deterministic { gain: 2.5 };
        for _ in 0..10 {
            assert_eq!(f.sample(&mut rng).unwrap(), 2.5);
        }
    }

    #[test]
    fn sample_moments_converge() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x5eed);
        let n = 1_000_000;
        let ray = FadingModel::RayleighPower { mean_power: 1.0 }.sampler().unwrap();
        let mean = (0..n).map(|_| ray.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");

        let nak = FadingModel::NakagamiPower { m: 2.0, mean_power: 1.0 }.sampler().unwrap();
        let second = (0..n).map(|_| nak.sample(&mut rng).powi(2)).sum::<f64>() / n as f64;
        assert!((second - 1.5).abs() < 0.01, "{second}");

        let ric_model = FadingModel::RicianPower { k_factor: 3.0, mean_power: 2.0 };
        let ric = ric_model.sampler().unwrap();
        let m = ric_model.moments().unwrap();
        let draws: Vec<f64> = (0..n).map(|_| ric.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = m.m2 - m.m1 * m.m1;
        assert!((mean - m.m1).abs() < 4.0 * (var / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn moment_error_shrinks_like_inverse_sqrt_n() {
        // Average absolute error of the sample mean over independent batches
        // should drop by ~10x when n grows 100x.
        let ray = FadingModel::RayleighPower { mean_power: 1.0 }.sampler().unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(77);
        let mut avg_err = |n: usize| {
            let batches = 200;
            (0..batches)
                .map(|_| ((0..n).map(|_| ray.sample(&mut rng)).sum::<f64>() / n as f64 - 1.0).abs())
                .sum::<f64>()
                / batches as f64
        };
        let small = avg_err(100);
        let large = avg_err(10_000);
        let ratio = small / large;
        assert!((6.0..16.0).contains(&ratio), "ratio {ratio}");
    }
}
