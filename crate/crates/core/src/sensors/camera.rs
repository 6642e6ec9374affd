//! Downward-looking camera as a 10 Hz pose stream.
//!
//! Image synthesis is delegated to an external renderer; this module emits
//! the camera's geodetic position and NED attitude at each camera epoch. The
//! mounting position is deterministic; the mounting attitude carries a
//! per-run misalignment drawn from the CAM seed. The pinhole intrinsics are
//! carried along for the renderer and are distortion-free.

use nalgebra::{UnitQuaternion, Vector3};

use super::spec::SensorSpec;
use crate::earth::geodesy::GeodeticPosition;
use crate::flight::TruthState;
use crate::seedtree::StochasticSampler;

/// Camera rig: realized mounting pose, the navigation-side estimate of it,
/// and intrinsics.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraRig {
    /// Mounting position in body axes [m].
    pub position: Vector3<f64>,
    /// Realized body-to-camera mounting attitude (nominal plus misalignment).
    pub mount: UnitQuaternion<f64>,
    /// Nominal mounting attitude known to the navigation side.
    pub mount_nominal: UnitQuaternion<f64>,
    /// Focal length [px].
    pub focal_px: f64,
    /// Principal point [px].
    pub principal_px: (f64, f64),
}

impl CameraRig {
    /// Draw the per-run mounting misalignment from the CAM sampler.
    pub fn draw(spec: &SensorSpec, sampler: &mut StochasticSampler) -> Self {
        let e = spec.camera_mount_euler;
        let nominal = UnitQuaternion::from_euler_angles(e.z, e.y, e.x);
        let mis = Vector3::new(
            sampler.sample_normal(0.0, spec.camera_misalignment_std),
            sampler.sample_normal(0.0, spec.camera_misalignment_std),
            sampler.sample_normal(0.0, spec.camera_misalignment_std),
        );
        Self {
            position: spec.camera_position,
            mount: nominal * UnitQuaternion::from_scaled_axis(mis),
            mount_nominal: nominal,
            focal_px: spec.camera_focal_px,
            principal_px: spec.camera_principal_px,
        }
    }
}

/// One camera pose record for the external renderer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPoseRecord {
    pub t: f64,
    /// Camera optical center, geodetic.
    pub pos: GeodeticPosition,
    /// Camera-to-NED attitude as Euler angles (yaw, pitch, roll) [rad].
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

/// Camera pose at one 10 Hz epoch: truth body pose composed with the rig
/// mounting pose.
pub fn camera_pose(state: &TruthState, rig: &CameraRig) -> CameraPoseRecord {
    let offset_ned = state.att * rig.position;
    let m = state.pos.meridian_radius() + state.pos.alt;
    let n = state.pos.prime_vertical_radius() + state.pos.alt;
    let pos = GeodeticPosition::new(
        state.pos.lon + offset_ned.y / (n * state.pos.lat.cos()),
        state.pos.lat + offset_ned.x / m,
        state.pos.alt - offset_ned.z,
    );
    let att = state.att * rig.mount;
    let (roll, pitch, yaw) = att.euler_angles();
    CameraPoseRecord {
        t: state.t,
        pos,
        yaw,
        pitch,
        roll,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> TruthState {
        TruthState {
            t: 12.3,
            pos: GeodeticPosition::new(-1.6, 0.6, 2700.0),
            vel_body: Vector3::new(29.0, 0.0, 0.0),
            att: UnitQuaternion::from_euler_angles(0.05, 0.1, 0.9),
            omega_ib_body: Vector3::zeros(),
            fuel: 2.0,
        }
    }

    #[test]
    fn identity_mounting_equals_body_pose() {
        let mut spec = SensorSpec::zero();
        spec.camera_position = Vector3::zeros();
        spec.camera_mount_euler = Vector3::zeros();
        let rig = CameraRig::draw(&spec, &mut StochasticSampler::from_seed(9));
        let s = state();
        let p = camera_pose(&s, &rig);
        let (roll, pitch, yaw) = s.att.euler_angles();
        assert_eq!(p.pos, s.pos);
        assert!((p.yaw - yaw).abs() < 1e-15);
        assert!((p.pitch - pitch).abs() < 1e-15);
        assert!((p.roll - roll).abs() < 1e-15);
    }

    #[test]
    fn same_seed_same_misalignment() {
        let spec = SensorSpec::default();
        let a = CameraRig::draw(&spec, &mut StochasticSampler::from_seed(31));
        let b = CameraRig::draw(&spec, &mut StochasticSampler::from_seed(31));
        assert_eq!(a, b);
        let c = CameraRig::draw(&spec, &mut StochasticSampler::from_seed(32));
        assert_ne!(a.mount, c.mount);
        assert_eq!(a.mount_nominal, c.mount_nominal);
    }

    #[test]
    fn down_mount_points_camera_down() {
        let mut spec = SensorSpec::default();
        spec.camera_misalignment_std = 0.0;
        let rig = CameraRig::draw(&spec, &mut StochasticSampler::from_seed(1));
        let mut s = state();
        s.att = UnitQuaternion::identity();
        let p = camera_pose(&s, &rig);
        // camera x axis (boresight) points along NED down
        assert!((p.pitch + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn lever_arm_shifts_position() {
        let mut spec = SensorSpec::zero();
        spec.camera_position = Vector3::new(0.0, 0.0, 1.0);
        let rig = CameraRig::draw(&spec, &mut StochasticSampler::from_seed(1));
        let mut s = state();
        s.att = UnitQuaternion::identity();
        let p = camera_pose(&s, &rig);
        assert!((p.pos.alt - (s.pos.alt - 1.0)).abs() < 1e-12);
    }
}
