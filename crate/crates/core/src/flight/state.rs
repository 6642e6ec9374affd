//! Truth state definition and trim-based initialization.

use nalgebra::{UnitQuaternion, Vector3};

use crate::airframe::TrimSolution;
use crate::earth::geodesy::GeodeticPosition;

/// Earth rotation rate [rad/s].
pub const EARTH_RATE: f64 = 7.292_115e-5;

/// Complete truth state of the aircraft.
///
/// Attitude is the rotation from body axes to the local NED frame; `vel_body`
/// is the ground velocity (relative to the Earth surface) expressed in body
/// axes; `omega_ib_body` is the inertial angular rate in body axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthState {
    /// Simulation time [s].
    pub t: f64,
    /// Geodetic position (lon, lat [rad], altitude [m]).
    pub pos: GeodeticPosition,
    /// Ground velocity in body axes [m/s].
    pub vel_body: Vector3<f64>,
    /// Body-to-NED attitude.
    pub att: UnitQuaternion<f64>,
    /// Inertial angular rate in body axes [rad/s].
    pub omega_ib_body: Vector3<f64>,
    /// Remaining fuel mass [kg].
    pub fuel: f64,
}

impl TruthState {
    /// Ground velocity in NED [m/s].
    pub fn vel_ned(&self) -> Vector3<f64> {
        self.att * self.vel_body
    }

    /// Ground speed bearing chi [rad], NED convention.
    pub fn ground_bearing(&self) -> f64 {
        let v = self.vel_ned();
        v.y.atan2(v.x)
    }

    /// Earth rotation rate in NED at the current latitude [rad/s].
    pub fn earth_rate_ned(&self) -> Vector3<f64> {
        Vector3::new(
            EARTH_RATE * self.pos.lat.cos(),
            0.0,
            -EARTH_RATE * self.pos.lat.sin(),
        )
    }

    /// Transport rate of the NED frame due to motion over the ellipsoid [rad/s].
    pub fn transport_rate_ned(&self) -> Vector3<f64> {
        let v = self.vel_ned();
        let n = self.pos.prime_vertical_radius() + self.pos.alt;
        let m = self.pos.meridian_radius() + self.pos.alt;
        Vector3::new(v.y / n, -v.x / m, -v.y * self.pos.lat.tan() / n)
    }

    /// Body angular rate relative to the NED frame [rad/s].
    pub fn omega_nb_body(&self) -> Vector3<f64> {
        self.omega_ib_body
            - self.att.inverse() * (self.earth_rate_ned() + self.transport_rate_ned())
    }

    /// Euler angles (roll, pitch, yaw) of the body-to-NED attitude [rad].
    pub fn euler_angles(&self) -> (f64, f64, f64) {
        self.att.euler_angles()
    }

    pub fn is_finite(&self) -> bool {
        self.pos.lon.is_finite()
            && self.pos.lat.is_finite()
            && self.pos.alt.is_finite()
            && self.vel_body.iter().all(|x| x.is_finite())
            && self.att.coords.iter().all(|x| x.is_finite())
            && self.omega_ib_body.iter().all(|x| x.is_finite())
            && self.fuel.is_finite()
    }
}

/// Build an initial truth state from a longitudinal trim solution: wings
/// level, heading `psi`, pitch alpha + gamma, air velocity from the trim
/// airspeed, ground velocity adding the low-frequency wind.
pub fn initial_state_from_trim(
    pos: GeodeticPosition,
    psi: f64,
    gamma: f64,
    airspeed: f64,
    trim: &TrimSolution,
    wind_ned: &Vector3<f64>,
    fuel: f64,
) -> TruthState {
    let att = UnitQuaternion::from_euler_angles(0.0, trim.alpha + gamma, psi);
    let v_air_body = Vector3::new(
        airspeed * trim.alpha.cos(),
        0.0,
        airspeed * trim.alpha.sin(),
    );
    let vel_ned = att * v_air_body + wind_ned;
    let mut state = TruthState {
        t: 0.0,
        pos,
        vel_body: att.inverse() * vel_ned,
        att,
        omega_ib_body: Vector3::zeros(),
        fuel,
    };
    // Steady flight relative to NED: inertial rate equals frame rotation.
    state.omega_ib_body = att.inverse() * (state.earth_rate_ned() + state.transport_rate_ned());
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_state() -> TruthState {
        TruthState {
            t: 0.0,
            pos: GeodeticPosition::new(-1.6, 0.6, 2700.0),
            vel_body: Vector3::new(29.0, 0.0, 1.5),
            att: UnitQuaternion::from_euler_angles(0.02, 0.05, 1.0),
            omega_ib_body: Vector3::zeros(),
            fuel: 3.0,
        }
    }

    #[test]
    fn ned_velocity_round_trip() {
        let s = sample_state();
        let back = s.att.inverse() * s.vel_ned();
        assert!((back - s.vel_body).norm() < 1e-12);
    }

    #[test]
    fn earth_rate_magnitude() {
        let s = sample_state();
        assert!((s.earth_rate_ned().norm() - EARTH_RATE).abs() < 1e-18);
    }

    #[test]
    fn transport_rate_zero_when_static() {
        let mut s = sample_state();
        s.vel_body = Vector3::zeros();
        assert_eq!(s.transport_rate_ned(), Vector3::zeros());
    }

    #[test]
    fn trim_state_has_zero_frame_relative_rate() {
        let trim = TrimSolution {
            alpha: 0.07,
            elevator: -0.07,
            throttle: 0.3,
            shaft_speed: 80.0,
            residual: 0.0,
        };
        let s = initial_state_from_trim(
            GeodeticPosition::new(-1.6, 0.6, 2700.0),
            0.8,
            0.0,
            29.0,
            &trim,
            &Vector3::new(4.0, -2.0, 0.0),
            2.5,
        );
        assert!(s.omega_nb_body().norm() < 1e-15);
        // ground velocity minus wind recovers the trim airspeed
        let v_air = s.vel_ned() - Vector3::new(4.0, -2.0, 0.0);
        assert!((v_air.norm() - 29.0).abs() < 1e-12);
    }
}
