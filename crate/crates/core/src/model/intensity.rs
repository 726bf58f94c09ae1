use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power-law radial intensity `mu(t) = coeff * t^(exponent - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerLaw {
    #[inline]
    pub fn density(&self, t: f64) -> f64 {
        if self.exponent == 2.0 {
            self.coeff * t
        } else {
            self.coeff * t.powf(self.exponent - 1.0)
        }
    }

    /// `int_a^b mu(t) dt`
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.coeff * (b.powf(self.exponent) - a.powf(self.exponent)) / self.exponent
    }

    /// Solves `mass(a, t) = v` for `t`.
    pub fn invert_from(&self, a: f64, v: f64) -> f64 {
        (a.powf(self.exponent) + v * self.exponent / self.coeff).powf(1.0 / self.exponent)
    }
}

/// Expected number of base stations per unit distance from the test point,
/// before scaling by the tier's intensity parameter `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialIntensity {
    /// Homogeneous planar process: `mu(t) = 2 pi t`.
    #[serde(rename = "homogeneous_2d")]
    Homogeneous2D,
    /// `mu(t) = c t^(p-1)`.
    PowerRadial { c: f64, p: f64 },
    /// Linear interpolation between `(t, mu)` knots; zero before the first knot and
    /// beyond the last one unless a power-law `tail` continues it.
    PiecewiseTable {
        knots: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<PowerLaw>,
    },
}

const HOMOGENEOUS: PowerLaw = PowerLaw { coeff: 2.0 * PI, exponent: 2.0 };

impl RadialIntensity {
    pub fn power_radial(c: f64, p: f64) -> Self {
        RadialIntensity::PowerRadial { c, p }
    }

    /// Structural problems with the parameters, independent of any path-loss model.
    pub fn check(&self) -> std::result::Result<(), String> {
        match self {
            RadialIntensity::Homogeneous2D => Ok(()),
            RadialIntensity::PowerRadial { c, p } => check_power(*c, *p),
            RadialIntensity::PiecewiseTable { knots, tail } => {
                if knots.is_empty() {
                    return Err("piecewise table needs at least one knot".into());
                }
                for (i, [t, mu]) in knots.iter().enumerate() {
                    if !(t.is_finite() && mu.is_finite()) {
                        return Err(format!("knot {i} is not finite"));
                    }
                    if *t < 0.0 {
                        return Err(format!("knot {i} has negative distance {t}"));
                    }
                    if *mu < 0.0 {
                        return Err(format!("knot {i} has negative intensity {mu}"));
                    }
                }
                if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err("piecewise table knots must be strictly ascending in t".into());
                }
                if let Some(tail) = tail {
                    check_power(tail.coeff, tail.exponent)?;
                }
                Ok(())
            }
        }
    }

    /// Exponent `p` such that `mu(t) ~ t^(p-1)` at infinity, or `None` for finite support.
    pub fn growth_exponent(&self) -> Option<f64> {
        self.far_field().map(|law| law.exponent)
    }

    /// Power law that `mu` equals beyond [`Self::far_field_start`], if any.
    pub fn far_field(&self) -> Option<PowerLaw> {
        match self {
            RadialIntensity::Homogeneous2D => Some(HOMOGENEOUS),
            RadialIntensity::PowerRadial { c, p } => Some(PowerLaw { coeff: *c, exponent: *p }),
            RadialIntensity::PiecewiseTable { tail, .. } => *tail,
        }
    }

    /// Distance beyond which `mu` is a pure power law (or zero).
    pub fn far_field_start(&self) -> f64 {
        match self {
            RadialIntensity::PiecewiseTable { knots, .. } => knots.last().map_or(0.0, |k| k[0]),
            _ => 0.0,
        }
    }

    /// Interior points where `mu` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RadialIntensity::PiecewiseTable { knots, .. } => knots.iter().map(|k| k[0]).collect(),
            _ => Vec::new(),
        }
    }

    /// `mu(t)` for `t >= 0`.
    pub fn density(&self, t: f64) -> f64 {
        match self {
            RadialIntensity::Homogeneous2D => HOMOGENEOUS.density(t),
            RadialIntensity::PowerRadial { c, p } => PowerLaw { coeff: *c, exponent: *p }.density(t),
            RadialIntensity::PiecewiseTable { knots, tail } => table_density(knots, tail.as_ref(), t),
        }
    }

    /// `int_0^n mu(t) dt`, exact for every family (the table is piecewise linear).
    pub fn cumulative(&self, n: f64) -> f64 {
        match self {
            RadialIntensity::Homogeneous2D => PI * n * n,
            RadialIntensity::PowerRadial { c, p } => PowerLaw { coeff: *c, exponent: *p }.mass(0.0, n),
            RadialIntensity::PiecewiseTable { knots, tail } => {
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let ([t0, m0], [t1, m1]) = (w[0], w[1]);
                    if n <= t0 {
                        return acc;
                    }
                    if n >= t1 {
                        acc += 0.5 * (m0 + m1) * (t1 - t0);
                    } else {
                        let m = m0 + (m1 - m0) * (n - t0) / (t1 - t0);
                        return acc + 0.5 * (m0 + m) * (n - t0);
                    }
                }
                let last = knots.last().expect("validated table")[0];
                match tail {
                    Some(law) if n > last => acc + law.mass(last, n),
                    _ => acc,
                }
            }
        }
    }

    /// Inverse of [`Self::cumulative`]: the smallest `t` with `cumulative(t) = v`,
    /// for `0 <= v <= cumulative(upper)`.
    pub fn inverse_cumulative(&self, v: f64) -> f64 {
        match self {
            RadialIntensity::Homogeneous2D => (v / PI).sqrt(),
            RadialIntensity::PowerRadial { c, p } => PowerLaw { coeff: *c, exponent: *p }.invert_from(0.0, v),
            RadialIntensity::PiecewiseTable { knots, tail } => {
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let ([t0, m0], [t1, m1]) = (w[0], w[1]);
                    let seg = 0.5 * (m0 + m1) * (t1 - t0);
                    if v <= acc + seg && seg > 0.0 {
                        return t0 + invert_trapezoid(m0, (m1 - m0) / (t1 - t0), v - acc);
                    }
                    acc += seg;
                }
                let last = knots.last().expect("validated table")[0];
                match tail {
                    Some(law) => law.invert_from(last, (v - acc).max(0.0)),
                    None => last,
                }
            }
        }
    }
}

/// Smallest `x >= 0` with `m0 x + slope x^2 / 2 = v`.
fn invert_trapezoid(m0: f64, slope: f64, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if slope.abs() <= 1e-300 {
        return v / m0;
    }
    // Rationalized root of slope/2 x^2 + m0 x - v = 0, stable for either sign of slope.
    let disc = (m0 * m0 + 2.0 * slope * v).max(0.0);
    2.0 * v / (m0 + disc.sqrt())
}

fn table_density(knots: &[[f64; 2]], tail: Option<&PowerLaw>, t: f64) -> f64 {
    let first = knots[0][0];
    let last = knots[knots.len() - 1][0];
    if t < first {
        return 0.0;
    }
    if t > last {
        return tail.map_or(0.0, |law| law.density(t));
    }
    let idx = knots.partition_point(|k| k[0] <= t);
    if idx == knots.len() {
        return knots[idx - 1][1];
    }
    let [t0, m0] = knots[idx - 1];
    let [t1, m1] = knots[idx];
    m0 + (m1 - m0) * (t - t0) / (t1 - t0)
}

fn check_power(c: f64, p: f64) -> std::result::Result<(), String> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(format!("power-law coefficient must be >= 0 (got {c})"));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(format!("power-law exponent p must be > 0 for local integrability (got {p})"));
    }
    Ok(())
}

/// Expected number of base stations within distance `n`: `lambda * int_0^n mu(t) dt`.
pub fn radial_measure(intensity: &RadialIntensity, lambda: f64, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::Domain { what: "radial measure radius must be >= 0", value: n });
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(lambda * intensity.cumulative(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_pieces, Tolerance};

    fn table() -> RadialIntensity {
        RadialIntensity::PiecewiseTable {
            knots: vec![[0.0, 0.0], [1.0, 3.0], [2.5, 1.0], [4.0, 1.0]],
            tail: Some(PowerLaw { coeff: 0.25, exponent: 2.0 }),
        }
    }

    #[test]
    fn documented_measures() {
        let h = radial_measure(&RadialIntensity::Homogeneous2D, 1.0, 10.0).unwrap();
        assert!((h - 100.0 * PI).abs() < 1e-12);
        assert_eq!(radial_measure(&RadialIntensity::Homogeneous2D, 0.0, 5.0).unwrap(), 0.0);
        let p = radial_measure(&RadialIntensity::power_radial(1.0, 3.0), 2.0, 2.0).unwrap();
        assert!((p - 16.0 / 3.0).abs() < 1e-14);
        assert!(radial_measure(&RadialIntensity::Homogeneous2D, 1.0, -1.0).is_err());
    }

    #[test]
    fn table_cumulative_matches_quadrature() {
        let tab = table();
        for n in [0.0, 0.4, 1.0, 2.0, 4.0, 7.5] {
            let mut pts = vec![0.0, 1.0, 2.5, 4.0, 7.5];
            pts.retain(|&p| p <= n);
            pts.push(n);
            let q = integrate_pieces(|t| tab.density(t), &pts, Tolerance::relative(1e-14)).unwrap();
            let c = tab.cumulative(n);
            assert!((q.value - c).abs() <= 1e-10 * c.max(1e-300), "n={n}: {} vs {c}", q.value);
        }
    }

    #[test]
    fn inverse_cumulative_round_trips() {
        for intensity in [RadialIntensity::Homogeneous2D, RadialIntensity::power_radial(0.7, 1.5), table()] {
            for t in [0.0, 0.2, 0.9, 1.0, 1.8, 3.3, 4.0, 6.0] {
                let v = intensity.cumulative(t);
                let back = intensity.inverse_cumulative(v);
                assert!((back - t).abs() < 1e-12 * t.max(1.0), "{intensity:?} t={t} back={back}");
            }
        }
    }

    #[test]
    fn table_without_tail_has_finite_support() {
        let tab = RadialIntensity::PiecewiseTable { knots: vec![[0.0, 1.0], [2.0, 1.0]], tail: None };
        assert_eq!(tab.density(3.0), 0.0);
        assert_eq!(tab.cumulative(10.0), 2.0);
        assert_eq!(tab.growth_exponent(), None);
        assert_eq!(tab.density(2.0), 1.0);
    }

    #[test]
    fn structural_checks() {
        assert!(RadialIntensity::power_radial(1.0, 0.0).check().is_err());
        assert!(RadialIntensity::power_radial(-1.0, 2.0).check().is_err());
        let unsorted = RadialIntensity::PiecewiseTable { knots: vec![[1.0, 1.0], [0.5, 1.0]], tail: None };
        assert!(unsorted.check().is_err());
        let negative = RadialIntensity::PiecewiseTable { knots: vec![[0.0, -1.0]], tail: None };
        assert!(negative.check().is_err());
        assert!(table().check().is_ok());
    }
}
