//! State derivative: forces, moments, and kinematics over the rotating
//! ellipsoid. The NED-frame navigation equation (specific force plus gravity
//! minus Coriolis and transport terms) is rotated into body axes where the
//! velocity state lives.

use nalgebra::{Quaternion, Vector3};

use super::state::TruthState;
use super::FlightError;
use crate::airframe::{AirframeModel, ControlInputs};
use crate::earth::atmosphere::{insa_state, pressure_altitude_from_geopotential, AtmosphericState};
use crate::earth::geodesy::geopotential_from_geodetic;
use crate::earth::gravity::normal_gravity_ned;

/// Environment inputs held constant across one integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEnvironment {
    /// Total wind velocity in NED, low-frequency plus turbulence [m/s].
    pub wind_ned: Vector3<f64>,
    /// Atmosphere temperature offset [K].
    pub delta_t: f64,
    /// Atmosphere pressure offset [Pa].
    pub delta_p: f64,
    /// Per-run gravity model bias in NED [m/s^2].
    pub gravity_bias_ned: Vector3<f64>,
}

impl LocalEnvironment {
    pub fn still_standard() -> Self {
        Self {
            wind_ned: Vector3::zeros(),
            delta_t: 0.0,
            delta_p: 0.0,
            gravity_bias_ned: Vector3::zeros(),
        }
    }
}

/// Air-relative flight condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirRelative {
    /// True airspeed [m/s].
    pub vtas: f64,
    /// Angle of attack [rad].
    pub alpha: f64,
    /// Angle of sideslip [rad].
    pub beta: f64,
}

/// Full state derivative plus quantities reused by the sensor models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub lon_dot: f64,
    pub lat_dot: f64,
    pub alt_dot: f64,
    pub vel_body_dot: Vector3<f64>,
    /// Quaternion derivative of the body-to-NED attitude.
    pub att_dot: Quaternion<f64>,
    pub omega_ib_dot: Vector3<f64>,
    pub fuel_dot: f64,
    /// Body angular rate relative to NED [rad/s] (drives the attitude).
    pub omega_nb_body: Vector3<f64>,
    /// Non-gravitational specific force at the cg, body axes [m/s^2].
    pub specific_force_body: Vector3<f64>,
    pub air: AirRelative,
    pub atmosphere: AtmosphericState,
    /// Shaft power delivered by the engine [W].
    pub engine_power: f64,
    /// Propeller shaft speed [rev/s].
    pub shaft_speed: f64,
}

/// Evaluate the state derivative at one truth epoch.
pub fn state_derivative(
    state: &TruthState,
    controls: &ControlInputs,
    airframe: &AirframeModel,
    env: &LocalEnvironment,
) -> Result<StateDerivative, FlightError> {
    let pos = &state.pos;

    // Atmosphere at the current geometric altitude.
    let big_h = geopotential_from_geodetic(pos.alt);
    let hp = pressure_altitude_from_geopotential(big_h, env.delta_t, env.delta_p);
    let atmos = insa_state(hp, env.delta_t, env.delta_p)?;
    let density = atmos.density();

    // Air-relative condition.
    let vel_ned = state.vel_ned();
    let v_air_body = state.att.inverse() * (vel_ned - env.wind_ned);
    let vtas = v_air_body.norm();
    let (alpha, beta) = if vtas > 1e-6 {
        (
            v_air_body.z.atan2(v_air_body.x),
            (v_air_body.y / vtas).asin(),
        )
    } else {
        (0.0, 0.0)
    };
    let qbar = 0.5 * density * vtas * vtas;

    // Forces and moments in body axes.
    let mp = airframe.mass_properties(state.fuel);
    let controls = controls.saturate(&airframe.surface_limits);
    let aero = airframe.aero_wrench(
        alpha,
        beta,
        &controls,
        &state.omega_nb_body(),
        vtas,
        qbar,
        &mp,
    )?;
    let engine_power = airframe.engine_power(controls.throttle, atmos.pressure, atmos.temperature);
    let shaft_speed = airframe.shaft_speed(engine_power, vtas, density);
    let (thrust, torque) = airframe.propeller_wrench(shaft_speed, vtas, density);
    let force_body = aero.force + Vector3::new(thrust, 0.0, 0.0);
    // Propeller reaction torque opposes the (positive-x) shaft rotation.
    let moment_body = aero.moment + Vector3::new(-torque, 0.0, 0.0);
    let specific_force_body = force_body / mp.mass;

    // Navigation equation in NED, then rotated to body axes.
    let gravity_ned = normal_gravity_ned(pos.lat, pos.alt) + env.gravity_bias_ned;
    let omega_ie_ned = state.earth_rate_ned();
    let omega_en_ned = state.transport_rate_ned();
    let accel_ned = state.att * specific_force_body + gravity_ned
        - (2.0 * omega_ie_ned + omega_en_ned).cross(&vel_ned);
    let omega_nb_body = state.omega_ib_body - state.att.inverse() * (omega_ie_ned + omega_en_ned);
    let vel_body_dot = state.att.inverse() * accel_ned - omega_nb_body.cross(&state.vel_body);

    // Position kinematics.
    let n = pos.prime_vertical_radius() + pos.alt;
    let m = pos.meridian_radius() + pos.alt;
    let lon_dot = vel_ned.y / (n * pos.lat.cos());
    let lat_dot = vel_ned.x / m;
    let alt_dot = -vel_ned.z;

    // Attitude and angular-rate kinetics.
    let att_dot =
        state.att.quaternion() * Quaternion::from_imag(omega_nb_body) * 0.5;
    let i = &mp.inertia;
    let omega = &state.omega_ib_body;
    let omega_ib_dot = i
        .try_inverse()
        .expect("inertia tensor invertible")
        * (moment_body - omega.cross(&(i * omega)));

    Ok(StateDerivative {
        lon_dot,
        lat_dot,
        alt_dot,
        vel_body_dot,
        att_dot,
        omega_ib_dot,
        fuel_dot: -airframe.fuel_flow(engine_power),
        omega_nb_body,
        specific_force_body,
        air: AirRelative { vtas, alpha, beta },
        atmosphere: atmos,
        engine_power,
        shaft_speed,
    })
}
