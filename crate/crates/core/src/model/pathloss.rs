use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a bounded, monotone non-increasing path-loss function `G(t)`.
///
/// All three families have `G(0) = 1` and decay like `t^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLossFamily {
    /// `G(t) = 1 / (1 + t^alpha)`
    InverseOnePlusPower,
    /// `G(t) = min(1, t^-alpha)`
    MinOneInversePower,
    /// `G(t) = (1 + t)^-alpha`
    ShiftedInversePower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub family: PathLossFamily,
    pub alpha: f64,
}

impl PathLossModel {
    pub fn new(family: PathLossFamily, alpha: f64) -> Self {
        Self { family, alpha }
    }

    pub fn inverse_one_plus_power(alpha: f64) -> Self {
        Self::new(PathLossFamily::InverseOnePlusPower, alpha)
    }

    pub fn min_one_inverse_power(alpha: f64) -> Self {
        Self::new(PathLossFamily::MinOneInversePower, alpha)
    }

    pub fn shifted_inverse_power(alpha: f64) -> Self {
        Self::new(PathLossFamily::ShiftedInversePower, alpha)
    }

    /// Evaluates `G(t)`, rejecting negative distances.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain { what: "path-loss distance must be >= 0", value: t });
        }
        Ok(self.gain(t))
    }

    /// Unchecked `G(t)` for `t >= 0`; the simulation hot loop calls this.
    #[inline]
    pub fn gain(&self, t: f64) -> f64 {
        match self.family {
            PathLossFamily::InverseOnePlusPower => 1.0 / (1.0 + self.pow_alpha(t)),
            PathLossFamily::MinOneInversePower => {
                if t <= 1.0 {
                    1.0
                } else {
                    1.0 / self.pow_alpha(t)
                }
            }
            PathLossFamily::ShiftedInversePower => 1.0 / self.pow_alpha(1.0 + t),
        }
    }

    /// `G(t)` given `t^2`, which avoids a square root when distances are sampled as squares.
    #[inline]
    pub fn gain_from_squared(&self, t2: f64) -> f64 {
        match self.family {
            PathLossFamily::InverseOnePlusPower if self.alpha == 4.0 => 1.0 / (1.0 + t2 * t2),
            PathLossFamily::MinOneInversePower if self.alpha == 4.0 => {
                if t2 <= 1.0 {
                    1.0
                } else {
                    1.0 / (t2 * t2)
                }
            }
            _ => self.gain(t2.sqrt()),
        }
    }

    #[inline]
    fn pow_alpha(&self, x: f64) -> f64 {
        let a = self.alpha;
        if a == 4.0 {
            let x2 = x * x;
            x2 * x2
        } else if a.fract() == 0.0 && a <= 32.0 {
            x.powi(a as i32)
        } else {
            x.powf(a)
        }
    }

    /// Value at the origin, which bounds `G` everywhere.
    pub fn peak(&self) -> f64 {
        1.0
    }

    /// `G(t) t^alpha` for `t >= 1`; tends to 1 and stays finite for huge `t`.
    pub fn far_ratio(&self, t: f64) -> f64 {
        match self.family {
            PathLossFamily::InverseOnePlusPower => 1.0 / (1.0 + t.powf(-self.alpha)),
            PathLossFamily::MinOneInversePower => {
                if t >= 1.0 {
                    1.0
                } else {
                    t.powf(self.alpha)
                }
            }
            PathLossFamily::ShiftedInversePower => (-self.alpha * (1.0 / t).ln_1p()).exp(),
        }
    }

    /// Interior points where `G` is not smooth, used as quadrature breakpoints.
    pub fn kinks(&self) -> &'static [f64] {
        match self.family {
            PathLossFamily::MinOneInversePower => &[1.0],
            _ => &[],
        }
    }
}
