//! Fine alignment: the navigation side does not run its own alignment
//! filter; instead its initial state estimate is the truth corrupted by
//! normally distributed errors drawn from the ALIGN seed.

use nalgebra::{UnitQuaternion, Vector3};

use super::models::SensorSuite;
use super::spec::SensorSpec;
use crate::flight::TruthState;
use crate::seedtree::StochasticSampler;

/// Initial navigation estimate produced by fine alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct NavInit {
    /// Estimated body-to-NED attitude.
    pub att: UnitQuaternion<f64>,
    /// Estimated accelerometer bias (offset plus initial drift) [m/s^2].
    pub acc_bias: Vector3<f64>,
    /// Estimated gyroscope bias [rad/s].
    pub gyr_bias: Vector3<f64>,
}

/// Corrupt the truth attitude and the realized sensor biases with the
/// configured alignment error statistics.
pub fn fine_alignment(
    truth: &TruthState,
    suite: &SensorSuite,
    spec: &SensorSpec,
    sampler: &mut StochasticSampler,
) -> NavInit {
    let e = Vector3::new(
        sampler.sample_normal(0.0, spec.align_attitude_std.x),
        sampler.sample_normal(0.0, spec.align_attitude_std.y),
        sampler.sample_normal(0.0, spec.align_attitude_std.z),
    );
    let acc_err = Vector3::new(
        sampler.sample_normal(0.0, spec.align_acc_bias_std),
        sampler.sample_normal(0.0, spec.align_acc_bias_std),
        sampler.sample_normal(0.0, spec.align_acc_bias_std),
    );
    let gyr_err = Vector3::new(
        sampler.sample_normal(0.0, spec.align_gyr_bias_std),
        sampler.sample_normal(0.0, spec.align_gyr_bias_std),
        sampler.sample_normal(0.0, spec.align_gyr_bias_std),
    );
    NavInit {
        att: truth.att * UnitQuaternion::from_scaled_axis(e),
        acc_bias: suite.imu.acc.bias_offset + acc_err,
        gyr_bias: suite.imu.gyr.bias_offset + gyr_err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earth::geodesy::GeodeticPosition;
    use crate::seedtree::derive_module_seeds;
    use crate::sensors::initialize_sensor_errors;

    fn truth() -> TruthState {
        TruthState {
            t: 0.0,
            pos: GeodeticPosition::new(-1.6, 0.6, 2700.0),
            vel_body: Vector3::new(29.0, 0.0, 0.0),
            att: UnitQuaternion::from_euler_angles(0.02, 0.07, -1.2),
            omega_ib_body: Vector3::zeros(),
            fuel: 3.0,
        }
    }

    #[test]
    fn zero_std_is_perfect() {
        let spec = SensorSpec::zero();
        let seeds = derive_module_seeds(1, 5).module_seeds;
        let (suite, _) = initialize_sensor_errors(&spec, &seeds, 100.0);
        let init = fine_alignment(&truth(), &suite, &spec, &mut StochasticSampler::from_seed(1));
        assert_eq!(init.att, truth().att);
        assert_eq!(init.acc_bias, Vector3::zeros());
        assert_eq!(init.gyr_bias, Vector3::zeros());
    }

    #[test]
    fn same_seed_same_estimate() {
        let spec = SensorSpec::default();
        let seeds = derive_module_seeds(1, 5).module_seeds;
        let (suite, _) = initialize_sensor_errors(&spec, &seeds, 100.0);
        let a = fine_alignment(&truth(), &suite, &spec, &mut StochasticSampler::from_seed(8));
        let b = fine_alignment(&truth(), &suite, &spec, &mut StochasticSampler::from_seed(8));
        assert_eq!(a, b);
    }

    #[test]
    fn ensemble_attitude_error_std() {
        let spec = SensorSpec::default();
        let seeds = derive_module_seeds(1, 5).module_seeds;
        let (suite, _) = initialize_sensor_errors(&spec, &seeds, 100.0);
        let t = truth();
        let n = 10_000;
        let mut sum2 = 0.0;
        for k in 0..n {
            let init = fine_alignment(&t, &suite, &spec, &mut StochasticSampler::from_seed(k));
            // error rotation vector in body axes
            let err = (t.att.inverse() * init.att).scaled_axis();
            sum2 += err.z * err.z;
        }
        let std = (sum2 / n as f64).sqrt();
        let target = spec.align_attitude_std.z;
        assert!((std - target).abs() < 0.05 * target, "std {std}");
    }
}
