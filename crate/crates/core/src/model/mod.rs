//! Network model: path loss, fading, radial base-station intensities, tiers and scenarios.
//!
//! Everything is expressed in radial coordinates around the test point, so a
//! tier's base stations form a Poisson process on `[0, inf)` with mean measure
//! `lambda * mu(t) dt`.

mod fading;
mod intensity;
mod pathloss;
mod scenario;

pub use fading::{FadingModel, FadingMoments, FadingSampler};
pub use intensity::{radial_measure, PowerLaw, RadialIntensity};
pub use pathloss::{PathLossFamily, PathLossModel};
pub use scenario::{validate_scenario, Scenario, TierConfig, ValidationReport, Violation, ViolationKind};

/// `G(t)` for a path-loss model.
pub fn path_loss_eval(model: &PathLossModel, t: f64) -> crate::Result<f64> {
    model.eval(t)
}

/// First three moments of a fading power gain.
pub fn fading_moments(model: &FadingModel) -> crate::Result<FadingMoments> {
    model.moments()
}

/// One fading power-gain draw.
pub fn fading_sample<R: rand::Rng + ?Sized>(model: &FadingModel, rng: &mut R) -> crate::Result<f64> {
    model.sample(rng)
}
