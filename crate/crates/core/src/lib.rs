//! Gaussian-approximation bounds for downlink aggregate interference in K-tier
//! heterogeneous cellular networks, and a Monte-Carlo engine to check them.
//!
//! The standardized interference `(I - E[I]) / sqrt(Var[I])` of a superposition
//! of Poisson base-station tiers is within `Xi * c(x)` of the standard normal
//! CDF at every `x`, where
//!
//! ```text
//! Xi   = sum_k lambda_k P_k^3 E[H_k^3] int G_k^3 mu_k  /  (sum_k lambda_k P_k^2 E[H_k^2] int G_k^2 mu_k)^(3/2)
//! c(x) = min(0.4785, 31.935 / (1 + |x|^3))
//! ```
//!
//! * [`model`]: tiers, path loss, fading, radial intensities, validation.
//! * [`analytics`]: tier integrals, Campbell moments, `Xi`, envelopes, Laplace transform.
//! * [`simulate`]: Poisson and fixed-count Monte-Carlo interference draws.
//! * [`empirics`]: empirical CDFs, Kolmogorov–Smirnov distances, envelope checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod empirics;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod simulate;

pub use analytics::{
    campbell_mean, campbell_variance, cdf_envelope, envelope_c, laplace_transform, lemma1_scaling_certificate,
    lemma2_lower_bound, std_normal_cdf, tier_integral, xi_coefficient, Envelope, GaussianBound, ScalingCertificate,
    TierIntegrals,
};
pub use empirics::{
    convergence_diagnostic, dkw_slack, empirical_cdf, envelope_report, ks_distance_to_normal, EmpiricalReport,
};
pub use error::{Error, Result};
pub use model::{
    fading_moments, fading_sample, path_loss_eval, radial_measure, validate_scenario, FadingModel, FadingMoments,
    PathLossFamily, PathLossModel, PowerLaw, RadialIntensity, Scenario, TierConfig, ValidationReport,
};
pub use simulate::{
    interference_realization, monte_carlo, sample_distances, standardize, Construction, SampleSet, SimConfig,
    StandardizeMode,
};
