//! Pluggable navigation: the interface that turns the 100 Hz sensed stream
//! into the estimated trajectory consumed by guidance and control, plus two
//! reference implementations.
//!
//! Implementations receive only sensor data and the fine-alignment estimate;
//! the sole exception is the truth pass-through, which exists to exercise
//! the control loop and to measure flight technical error in isolation.

use std::collections::BTreeMap;

use nalgebra::{UnitQuaternion, Vector3};
use thiserror::Error;

use crate::control::ControlFeedback;
use crate::earth::geodesy::GeodeticPosition;
use crate::earth::{normal_gravity_ned, pressure_altitude_from_pressure};
use crate::flight::EARTH_RATE;
use crate::guidance::GuidanceState;
use crate::sensors::{NavInit, SensedRecord};

/// Navigation solution at one 100 Hz epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedState {
    pub t: f64,
    /// Estimated geodetic position.
    pub pos: GeodeticPosition,
    /// Estimated ground velocity in NED [m/s].
    pub vel_ned: Vector3<f64>,
    /// Estimated body-to-NED attitude.
    pub att: UnitQuaternion<f64>,
    /// Estimated pressure altitude [m].
    pub hp: f64,
    /// Estimated true airspeed [m/s].
    pub vtas: f64,
    /// Estimated angle of attack [rad].
    pub alpha: f64,
    /// Estimated sideslip angle [rad].
    pub beta: f64,
}

impl EstimatedState {
    /// Estimated ground bearing chi [rad].
    pub fn ground_bearing(&self) -> f64 {
        self.vel_ned.y.atan2(self.vel_ned.x)
    }

    pub fn guidance_state(&self) -> GuidanceState {
        GuidanceState {
            t: self.t,
            chi: self.ground_bearing(),
            hp: self.hp,
        }
    }

    pub fn control_feedback(&self) -> ControlFeedback {
        let (phi, theta, _psi) = self.att.euler_angles();
        ControlFeedback {
            t: self.t,
            vtas: self.vtas,
            hp: self.hp,
            theta,
            alpha: self.alpha,
            phi,
            chi: self.ground_bearing(),
            beta: self.beta,
        }
    }
}

#[derive(Debug, Error)]
pub enum NavError {
    #[error("unknown navigation implementation `{0}`")]
    UnknownImplementation(String),
    #[error("navigation needs an initial position fix before the first step")]
    MissingInitialFix,
}

/// One navigation implementation driving one run.
pub trait NavigationAlgorithm {
    fn name(&self) -> &'static str;

    /// Install the fine-alignment attitude/bias estimate before the run.
    fn initialize(&mut self, init: &NavInit);

    /// Feed the truth-side state at the current epoch. Only the truth
    /// pass-through reference consumes this; real implementations must
    /// ignore it, and the default does.
    fn observe_truth(&mut self, _truth: &EstimatedState) {}

    /// Advance one 100 Hz epoch from the sensed record.
    fn step(&mut self, sensed: &SensedRecord, dt: f64) -> Result<EstimatedState, NavError>;
}

/// Truth pass-through: zero navigation error, so runs measure the flight
/// technical error of the guidance/control stack alone.
#[derive(Debug, Default)]
pub struct IdealNavigation {
    truth: Option<EstimatedState>,
}

impl NavigationAlgorithm for IdealNavigation {
    fn name(&self) -> &'static str {
        "ideal"
    }

    fn initialize(&mut self, _init: &NavInit) {}

    fn observe_truth(&mut self, truth: &EstimatedState) {
        self.truth = Some(*truth);
    }

    fn step(&mut self, _sensed: &SensedRecord, _dt: f64) -> Result<EstimatedState, NavError> {
        self.truth.ok_or(NavError::MissingInitialFix)
    }
}

/// Classical strapdown dead reckoning: attitude from bias-corrected gyros,
/// velocity and position from bias-corrected accelerometers and normal
/// gravity, with GNSS position/velocity resets while fixes last. Air data
/// channels pass through; pressure altitude comes from the static port.
#[derive(Debug, Default)]
pub struct StrapdownDeadReckoning {
    att: UnitQuaternion<f64>,
    acc_bias: Vector3<f64>,
    gyr_bias: Vector3<f64>,
    pos: Option<GeodeticPosition>,
    vel_ned: Vector3<f64>,
}

impl StrapdownDeadReckoning {
    fn frame_rates(pos: &GeodeticPosition, vel: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
        let omega_ie = Vector3::new(
            EARTH_RATE * pos.lat.cos(),
            0.0,
            -EARTH_RATE * pos.lat.sin(),
        );
        let n = pos.prime_vertical_radius() + pos.alt;
        let m = pos.meridian_radius() + pos.alt;
        let omega_en = Vector3::new(vel.y / n, -vel.x / m, -vel.y * pos.lat.tan() / n);
        (omega_ie, omega_en)
    }
}

impl NavigationAlgorithm for StrapdownDeadReckoning {
    fn name(&self) -> &'static str {
        "strapdown-dr"
    }

    fn initialize(&mut self, init: &NavInit) {
        self.att = init.att;
        self.acc_bias = init.acc_bias;
        self.gyr_bias = init.gyr_bias;
        self.pos = None;
        self.vel_ned = Vector3::zeros();
    }

    fn step(&mut self, sensed: &SensedRecord, dt: f64) -> Result<EstimatedState, NavError> {
        if let Some(fix) = &sensed.gnss {
            self.pos = Some(fix.pos);
            self.vel_ned = fix.vel_ned;
        }
        let pos = self.pos.ok_or(NavError::MissingInitialFix)?;
        let (omega_ie, omega_en) = Self::frame_rates(&pos, &self.vel_ned);

        let omega_nb =
            sensed.angular_rate - self.gyr_bias - self.att.inverse() * (omega_ie + omega_en);
        let next_att = self.att * UnitQuaternion::from_scaled_axis(omega_nb * dt);
        // specific force rotated at the half-step attitude to cut the
        // first-order commutation error of the explicit update
        let mid_att = self.att * UnitQuaternion::from_scaled_axis(omega_nb * (0.5 * dt));
        let f_ned = mid_att * (sensed.specific_force - self.acc_bias);
        let g = normal_gravity_ned(pos.lat, pos.alt);
        let accel = f_ned + g - (2.0 * omega_ie + omega_en).cross(&self.vel_ned);

        let m = pos.meridian_radius() + pos.alt;
        let n = pos.prime_vertical_radius() + pos.alt;
        let vel_mid = self.vel_ned + accel * (0.5 * dt);
        let next_pos = GeodeticPosition::new(
            pos.lon + vel_mid.y / ((n + 0.0) * pos.lat.cos()) * dt,
            pos.lat + vel_mid.x / m * dt,
            pos.alt - vel_mid.z * dt,
        );

        self.att = next_att;
        self.vel_ned += accel * dt;
        self.pos = Some(next_pos);

        Ok(EstimatedState {
            t: sensed.t,
            pos: next_pos,
            vel_ned: self.vel_ned,
            att: self.att,
            hp: pressure_altitude_from_pressure(sensed.pressure),
            vtas: sensed.vtas,
            alpha: sensed.alpha,
            beta: sensed.beta,
        })
    }
}

type Factory = Box<dyn Fn() -> Box<dyn NavigationAlgorithm> + Send + Sync>;

/// Name-indexed factory table for navigation implementations.
pub struct NavRegistry {
    factories: BTreeMap<String, Factory>,
}

impl NavRegistry {
    /// Registry pre-loaded with the two reference implementations.
    pub fn with_builtins() -> Self {
        let mut reg = Self {
            factories: BTreeMap::new(),
        };
        reg.register("ideal", || Box::<IdealNavigation>::default());
        reg.register("strapdown-dr", || Box::<StrapdownDeadReckoning>::default());
        reg
    }

    pub fn register(
        &mut self,
        name: &str,
        factory: impl Fn() -> Box<dyn NavigationAlgorithm> + Send + Sync + 'static,
    ) {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn NavigationAlgorithm>, NavError> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| NavError::UnknownImplementation(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::earth::atmosphere::pressure_from_pressure_altitude;
    use crate::sensors::GnssMeasurement;

    fn est(t: f64) -> EstimatedState {
        EstimatedState {
            t,
            pos: GeodeticPosition::new(-1.6, 0.6, 2700.0),
            vel_ned: Vector3::new(25.0, 10.0, -1.0),
            att: UnitQuaternion::from_euler_angles(0.03, 0.08, 0.4),
            hp: 2650.0,
            vtas: 29.0,
            alpha: 0.07,
            beta: 0.01,
        }
    }

    #[test]
    fn registry_builtins_and_unknown() {
        let reg = NavRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["ideal", "strapdown-dr"]);
        assert_eq!(reg.create("ideal").unwrap().name(), "ideal");
        assert!(matches!(
            reg.create("kalman"),
            Err(NavError::UnknownImplementation(_))
        ));
    }

    #[test]
    fn feedback_angles_come_from_attitude_and_velocity() {
        let e = est(3.0);
        let fb = e.control_feedback();
        assert!((fb.phi - 0.03).abs() < 1e-12);
        assert!((fb.theta - 0.08).abs() < 1e-12);
        assert!((fb.chi - (10.0f64).atan2(25.0)).abs() < 1e-12);
        assert_eq!(e.guidance_state().hp, 2650.0);
    }

    #[test]
    fn ideal_returns_observed_truth_exactly() {
        let mut nav = IdealNavigation::default();
        nav.initialize(&NavInit {
            att: UnitQuaternion::identity(),
            acc_bias: Vector3::zeros(),
            gyr_bias: Vector3::zeros(),
        });
        let truth = est(1.0);
        nav.observe_truth(&truth);
        let sensed = SensedRecord {
            t: 1.0,
            specific_force: Vector3::zeros(),
            angular_rate: Vector3::zeros(),
            magnetic_field: Vector3::zeros(),
            gnss: None,
            pressure: 1.0e5,
            temperature: 288.0,
            vtas: 0.0,
            alpha: 0.0,
            beta: 0.0,
        };
        assert_eq!(nav.step(&sensed, 0.01).unwrap(), truth);
    }

    /// Kinematic reference flight: constant NED attitude, velocity with a
    /// gentle sinusoidal north component. The exact specific force and
    /// angular rate follow from the navigation equation, so a perfect-sensor
    /// dead-reckoning pass isolates the mechanization truncation error.
    struct KinematicFlight {
        att: UnitQuaternion<f64>,
        pos: GeodeticPosition,
        vel: Vector3<f64>,
    }

    impl KinematicFlight {
        fn new() -> Self {
            Self {
                att: UnitQuaternion::from_euler_angles(0.0, 0.05, 0.3),
                pos: GeodeticPosition::new(-1.95, 0.56, 2700.0),
                vel: Vector3::new(25.0, 8.0, 0.0),
            }
        }

        fn accel(&self, t: f64) -> Vector3<f64> {
            Vector3::new(0.2 * (0.1 * t).cos(), 0.0, 0.0)
        }

        /// Advance truth by dt (small steps, midpoint rule) and return the
        /// exact sensed record at the *start* of the interval.
        fn sense(&self, t: f64) -> SensedRecord {
            let (omega_ie, omega_en) = StrapdownDeadReckoning::frame_rates(&self.pos, &self.vel);
            let g = normal_gravity_ned(self.pos.lat, self.pos.alt);
            let f_ned = self.accel(t) - g + (2.0 * omega_ie + omega_en).cross(&self.vel);
            SensedRecord {
                t,
                specific_force: self.att.inverse() * f_ned,
                angular_rate: self.att.inverse() * (omega_ie + omega_en),
                magnetic_field: Vector3::zeros(),
                gnss: Some(GnssMeasurement {
                    pos: self.pos,
                    vel_ned: self.vel,
                }),
                pressure: pressure_from_pressure_altitude(self.pos.alt),
                temperature: 288.15,
                vtas: self.vel.norm(),
                alpha: 0.0,
                beta: 0.0,
            }
        }

        fn advance(&mut self, t: f64, dt: f64) {
            let sub = 5;
            let h = dt / sub as f64;
            for k in 0..sub {
                let tk = t + k as f64 * h;
                let vel_mid = self.vel + self.accel(tk + 0.5 * h) * (0.5 * h);
                let m = self.pos.meridian_radius() + self.pos.alt;
                let n = self.pos.prime_vertical_radius() + self.pos.alt;
                self.pos = GeodeticPosition::new(
                    self.pos.lon + vel_mid.y / (n * self.pos.lat.cos()) * h,
                    self.pos.lat + vel_mid.x / m * h,
                    self.pos.alt - vel_mid.z * h,
                );
                self.vel += self.accel(tk + 0.5 * h) * h;
            }
        }
    }

    fn position_error_m(a: &GeodeticPosition, b: &GeodeticPosition) -> f64 {
        let m = a.meridian_radius() + a.alt;
        let n = a.prime_vertical_radius() + a.alt;
        let dn = (b.lat - a.lat) * m;
        let de = (b.lon - a.lon) * n * a.lat.cos();
        let dd = a.alt - b.alt;
        (dn * dn + de * de + dd * dd).sqrt()
    }

    #[test]
    fn dead_reckoning_on_perfect_sensors_stays_within_a_meter() {
        let mut flight = KinematicFlight::new();
        let mut nav = StrapdownDeadReckoning::default();
        nav.initialize(&NavInit {
            att: flight.att,
            acc_bias: Vector3::zeros(),
            gyr_bias: Vector3::zeros(),
        });
        let dt = 0.01;
        let mut worst = 0.0f64;
        for k in 0..10_000u32 {
            let t = k as f64 * dt;
            let mut sensed = flight.sense(t);
            // GNSS fixes at 1 Hz until the halfway denial; the last 50 s are
            // pure inertial propagation
            let keep_fix = k % 100 == 0 && t < 50.0;
            if !keep_fix {
                sensed.gnss = None;
            }
            flight.advance(t, dt);
            let est = nav.step(&sensed, dt).unwrap();
            let err = position_error_m(&flight.pos, &est.pos);
            worst = worst.max(err);
            assert!((est.hp - flight.pos.alt).abs() < 0.5);
        }
        assert!(worst < 1.0, "max position error {worst} m");
    }

    #[test]
    fn dead_reckoning_needs_a_first_fix() {
        let mut nav = StrapdownDeadReckoning::default();
        nav.initialize(&NavInit {
            att: UnitQuaternion::identity(),
            acc_bias: Vector3::zeros(),
            gyr_bias: Vector3::zeros(),
        });
        let mut sensed = KinematicFlight::new().sense(0.0);
        sensed.gnss = None;
        assert!(matches!(
            nav.step(&sensed, 0.01),
            Err(NavError::MissingInitialFix)
        ));
    }
}
