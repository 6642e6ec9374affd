//! Numeric sensor specifications.
//!
//! The default values describe a MEMS-grade tactical IMU, a consumer GNSS
//! receiver, and typical small-UAV air-data and magnetometer hardware. They
//! are repository defaults, not manufacturer data, and every number can be
//! overridden through the key-value spec file.

use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SensorSpecError {
    #[error("sensor spec: {0}")]
    Parse(String),
}

/// One inertial triad's error specification. White noise is a per-sample
/// standard deviation at the 100 Hz sensor rate; drift is a random-walk
/// density (per-root-second) integrated at sensor epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriadSpec {
    /// Scale-factor error std, per axis (dimensionless).
    pub scale_std: f64,
    /// Cross-coupling error std, per off-diagonal term (dimensionless).
    pub cross_std: f64,
    /// Run-to-run bias offset std, per axis.
    pub bias_offset_std: f64,
    /// In-run bias drift random-walk density, per axis [unit/sqrt(s)].
    pub drift_density: f64,
    /// White noise std per sample, per axis.
    pub noise_std: f64,
}

impl TriadSpec {
    pub fn zero() -> Self {
        Self {
            scale_std: 0.0,
            cross_std: 0.0,
            bias_offset_std: 0.0,
            drift_density: 0.0,
            noise_std: 0.0,
        }
    }
}

/// Bias-plus-noise channel (air data).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    /// Run-to-run bias offset std.
    pub bias_std: f64,
    /// White noise std per sample.
    pub noise_std: f64,
}

impl ChannelSpec {
    pub fn zero() -> Self {
        Self {
            bias_std: 0.0,
            noise_std: 0.0,
        }
    }
}

/// Complete sensor specification for one aircraft configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSpec {
    /// Accelerometer triad [m/s^2 units].
    pub acc: TriadSpec,
    /// Gyroscope triad [rad/s units].
    pub gyr: TriadSpec,
    /// Accelerometer lever arm from the cg, body axes [m] (deterministic).
    pub imu_lever_arm: Vector3<f64>,
    /// IMU platform mounting misalignment std, per axis [rad] (PLAT seed).
    pub imu_misalignment_std: f64,

    /// Magnetometer soft-iron scale std (diagonal, dimensionless).
    pub mag_scale_std: f64,
    /// Magnetometer soft-iron cross-coupling std (dimensionless).
    pub mag_cross_std: f64,
    /// Hard-iron offset std, per axis [nT].
    pub mag_hard_iron_std: f64,
    /// Magnetometer white noise std per sample [nT].
    pub mag_noise_std: f64,

    /// Static pressure [Pa].
    pub osp: ChannelSpec,
    /// Outside air temperature [K].
    pub oat: ChannelSpec,
    /// True airspeed [m/s].
    pub tas: ChannelSpec,
    /// Angle of attack [rad].
    pub aoa: ChannelSpec,
    /// Angle of sideslip [rad].
    pub aos: ChannelSpec,

    /// GNSS horizontal position white noise std, per axis [m].
    pub gnss_pos_noise_std: f64,
    /// GNSS vertical position white noise std [m].
    pub gnss_vert_noise_std: f64,
    /// Ionospheric bias offset std, per axis [m].
    pub gnss_iono_bias_std: f64,
    /// Ionospheric random-walk density, per axis [m/sqrt(s)].
    pub gnss_iono_walk_density: f64,
    /// Velocity white noise std, per axis [m/s].
    pub gnss_vel_noise_std: f64,

    /// Camera mounting position in body axes [m] (deterministic).
    pub camera_position: Vector3<f64>,
    /// Camera nominal mounting Euler angles (yaw, pitch, roll) [rad].
    pub camera_mount_euler: Vector3<f64>,
    /// Camera mounting misalignment std, per axis [rad] (CAM seed).
    pub camera_misalignment_std: f64,
    /// Pinhole focal length [px].
    pub camera_focal_px: f64,
    /// Principal point [px].
    pub camera_principal_px: (f64, f64),

    /// Fine-alignment attitude estimate error std (roll, pitch, yaw) [rad].
    pub align_attitude_std: Vector3<f64>,
    /// Fine-alignment accelerometer bias estimate error std [m/s^2].
    pub align_acc_bias_std: f64,
    /// Fine-alignment gyroscope bias estimate error std [rad/s].
    pub align_gyr_bias_std: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            acc: TriadSpec {
                scale_std: 5.0e-4,
                cross_std: 3.0e-4,
                bias_offset_std: 2.0e-2,
                drift_density: 5.0e-4,
                noise_std: 1.0e-2,
            },
            gyr: TriadSpec {
                scale_std: 5.0e-4,
                cross_std: 3.0e-4,
                bias_offset_std: 1.0e-4,
                drift_density: 2.0e-6,
                noise_std: 1.0e-3,
            },
            imu_lever_arm: Vector3::new(0.10, 0.02, -0.03),
            imu_misalignment_std: 5.0e-4,
            mag_scale_std: 1.0e-3,
            mag_cross_std: 5.0e-4,
            mag_hard_iron_std: 150.0,
            mag_noise_std: 50.0,
            osp: ChannelSpec {
                bias_std: 100.0,
                noise_std: 50.0,
            },
            oat: ChannelSpec {
                bias_std: 0.5,
                noise_std: 0.1,
            },
            tas: ChannelSpec {
                bias_std: 0.3,
                noise_std: 0.2,
            },
            aoa: ChannelSpec {
                bias_std: 2.0e-3,
                noise_std: 3.0e-3,
            },
            aos: ChannelSpec {
                bias_std: 2.0e-3,
                noise_std: 3.0e-3,
            },
            gnss_pos_noise_std: 1.0,
            gnss_vert_noise_std: 1.5,
            gnss_iono_bias_std: 2.0,
            gnss_iono_walk_density: 0.05,
            gnss_vel_noise_std: 0.05,
            camera_position: Vector3::new(0.15, 0.0, 0.05),
            // nose-mounted, pitched straight down
            camera_mount_euler: Vector3::new(0.0, -std::f64::consts::FRAC_PI_2, 0.0),
            camera_misalignment_std: 2.0e-3,
            camera_focal_px: 1000.0,
            camera_principal_px: (512.0, 384.0),
            align_attitude_std: Vector3::new(5.0e-4, 5.0e-4, 2.0e-3),
            align_acc_bias_std: 1.0e-2,
            align_gyr_bias_std: 5.0e-5,
        }
    }
}

impl SensorSpec {
    /// All error sources disabled: sensed values equal truth exactly.
    pub fn zero() -> Self {
        Self {
            acc: TriadSpec::zero(),
            gyr: TriadSpec::zero(),
            imu_lever_arm: Vector3::zeros(),
            imu_misalignment_std: 0.0,
            mag_scale_std: 0.0,
            mag_cross_std: 0.0,
            mag_hard_iron_std: 0.0,
            mag_noise_std: 0.0,
            osp: ChannelSpec::zero(),
            oat: ChannelSpec::zero(),
            tas: ChannelSpec::zero(),
            aoa: ChannelSpec::zero(),
            aos: ChannelSpec::zero(),
            gnss_pos_noise_std: 0.0,
            gnss_vert_noise_std: 0.0,
            gnss_iono_bias_std: 0.0,
            gnss_iono_walk_density: 0.0,
            gnss_vel_noise_std: 0.0,
            camera_position: Vector3::zeros(),
            camera_mount_euler: Vector3::zeros(),
            camera_misalignment_std: 0.0,
            camera_focal_px: 1000.0,
            camera_principal_px: (512.0, 384.0),
            align_attitude_std: Vector3::zeros(),
            align_acc_bias_std: 0.0,
            align_gyr_bias_std: 0.0,
        }
    }

    /// Parse overrides from a key-value file on top of the defaults.
    pub fn from_kv(text: &str) -> Result<Self, SensorSpecError> {
        let mut s = SensorSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SensorSpecError::Parse(format!("line {}: missing '='", lineno + 1))
            })?;
            let v: f64 = value.trim().parse().map_err(|_| {
                SensorSpecError::Parse(format!("line {}: bad number '{}'", lineno + 1, value.trim()))
            })?;
            s.set(key.trim(), v).map_err(|e| {
                SensorSpecError::Parse(format!("line {}: {e}", lineno + 1))
            })?;
        }
        Ok(s)
    }

    fn set(&mut self, key: &str, v: f64) -> Result<(), String> {
        match key {
            "acc_scale_std" => self.acc.scale_std = v,
            "acc_cross_std" => self.acc.cross_std = v,
            "acc_bias_offset_std" => self.acc.bias_offset_std = v,
            "acc_drift_density" => self.acc.drift_density = v,
            "acc_noise_std" => self.acc.noise_std = v,
            "gyr_scale_std" => self.gyr.scale_std = v,
            "gyr_cross_std" => self.gyr.cross_std = v,
            "gyr_bias_offset_std" => self.gyr.bias_offset_std = v,
            "gyr_drift_density" => self.gyr.drift_density = v,
            "gyr_noise_std" => self.gyr.noise_std = v,
            "imu_lever_arm_x" => self.imu_lever_arm.x = v,
            "imu_lever_arm_y" => self.imu_lever_arm.y = v,
            "imu_lever_arm_z" => self.imu_lever_arm.z = v,
            "imu_misalignment_std" => self.imu_misalignment_std = v,
            "mag_scale_std" => self.mag_scale_std = v,
            "mag_cross_std" => self.mag_cross_std = v,
            "mag_hard_iron_std" => self.mag_hard_iron_std = v,
            "mag_noise_std" => self.mag_noise_std = v,
            "osp_bias_std" => self.osp.bias_std = v,
            "osp_noise_std" => self.osp.noise_std = v,
            "oat_bias_std" => self.oat.bias_std = v,
            "oat_noise_std" => self.oat.noise_std = v,
            "tas_bias_std" => self.tas.bias_std = v,
            "tas_noise_std" => self.tas.noise_std = v,
            "aoa_bias_std" => self.aoa.bias_std = v,
            "aoa_noise_std" => self.aoa.noise_std = v,
            "aos_bias_std" => self.aos.bias_std = v,
            "aos_noise_std" => self.aos.noise_std = v,
            "gnss_pos_noise_std" => self.gnss_pos_noise_std = v,
            "gnss_vert_noise_std" => self.gnss_vert_noise_std = v,
            "gnss_iono_bias_std" => self.gnss_iono_bias_std = v,
            "gnss_iono_walk_density" => self.gnss_iono_walk_density = v,
            "gnss_vel_noise_std" => self.gnss_vel_noise_std = v,
            "camera_position_x" => self.camera_position.x = v,
            "camera_position_y" => self.camera_position.y = v,
            "camera_position_z" => self.camera_position.z = v,
            "camera_mount_yaw" => self.camera_mount_euler.x = v,
            "camera_mount_pitch" => self.camera_mount_euler.y = v,
            "camera_mount_roll" => self.camera_mount_euler.z = v,
            "camera_misalignment_std" => self.camera_misalignment_std = v,
            "camera_focal_px" => self.camera_focal_px = v,
            "camera_principal_x" => self.camera_principal_px.0 = v,
            "camera_principal_y" => self.camera_principal_px.1 = v,
            "align_roll_std" => self.align_attitude_std.x = v,
            "align_pitch_std" => self.align_attitude_std.y = v,
            "align_yaw_std" => self.align_attitude_std.z = v,
            "align_acc_bias_std" => self.align_acc_bias_std = v,
            "align_gyr_bias_std" => self.align_gyr_bias_std = v,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_overrides_defaults() {
        let s = SensorSpec::from_kv("acc_noise_std = 0.5\ngnss_iono_bias_std = 7 # m\n").unwrap();
        assert_eq!(s.acc.noise_std, 0.5);
        assert_eq!(s.gnss_iono_bias_std, 7.0);
        assert_eq!(s.gyr, SensorSpec::default().gyr);
    }

    #[test]
    fn kv_rejects_unknown_keys() {
        assert!(SensorSpec::from_kv("what = 1").is_err());
        assert!(SensorSpec::from_kv("acc_noise_std ~ 1").is_err());
        assert!(SensorSpec::from_kv("acc_noise_std = lots").is_err());
    }

    #[test]
    fn zero_spec_is_all_zero() {
        let z = SensorSpec::zero();
        assert_eq!(z.acc.noise_std, 0.0);
        assert_eq!(z.gnss_iono_walk_density, 0.0);
        assert_eq!(z.align_attitude_std, Vector3::zeros());
    }
}
