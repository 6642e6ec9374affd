//! Stochastic truth-vs-onboard geo-model perturbation.
//!
//! The gravity and magnetic fields experienced by the simulated aircraft are
//! slightly different from the models available to the navigation side. The
//! difference is a constant per-run bias drawn from the GEO seed.

use crate::seedtree::StochasticSampler;
use nalgebra::Vector3;

/// Standard deviations for the per-run geo-model biases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPerturbationSpec {
    /// Horizontal gravity deflection std, per axis [m/s^2].
    pub gravity_horizontal_std: f64,
    /// Vertical gravity anomaly std [m/s^2].
    pub gravity_vertical_std: f64,
    /// Magnetic anomaly std, per NED axis [nT].
    pub magnetic_std: f64,
}

impl Default for GeoPerturbationSpec {
    fn default() -> Self {
        Self {
            gravity_horizontal_std: 1.0e-4,
            gravity_vertical_std: 5.0e-5,
            magnetic_std: 200.0,
        }
    }
}

impl GeoPerturbationSpec {
    pub fn zero() -> Self {
        Self {
            gravity_horizontal_std: 0.0,
            gravity_vertical_std: 0.0,
            magnetic_std: 0.0,
        }
    }
}

/// Additive bias applied to the truth-side gravity vector and magnetic field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPerturbation {
    pub gravity_bias_ned: Vector3<f64>,
    pub magnetic_bias_ned: Vector3<f64>,
}

impl GeoPerturbation {
    pub fn zero() -> Self {
        Self {
            gravity_bias_ned: Vector3::zeros(),
            magnetic_bias_ned: Vector3::zeros(),
        }
    }

    /// Draw the per-run biases from the GEO sampler.
    pub fn draw(spec: &GeoPerturbationSpec, sampler: &mut StochasticSampler) -> Self {
        let g = Vector3::new(
            sampler.sample_normal(0.0, spec.gravity_horizontal_std),
            sampler.sample_normal(0.0, spec.gravity_horizontal_std),
            sampler.sample_normal(0.0, spec.gravity_vertical_std),
        );
        let b = Vector3::new(
            sampler.sample_normal(0.0, spec.magnetic_std),
            sampler.sample_normal(0.0, spec.magnetic_std),
            sampler.sample_normal(0.0, spec.magnetic_std),
        );
        Self {
            gravity_bias_ned: g,
            magnetic_bias_ned: b,
        }
    }
}
