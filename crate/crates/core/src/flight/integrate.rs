//! Fourth-order Runge-Kutta truth propagation with two attitude treatments:
//!
//! * `R4Norm` integrates the quaternion as four real components and
//!   renormalizes, the textbook approach;
//! * `So3` integrates the body rotation vector relative to the step's start
//!   attitude (full rotation-vector kinematics, including the coning terms)
//!   and composes through the exponential map, so the attitude never leaves
//!   the unit sphere. This is the default.
//!
//! Controls and environment are held constant across the four stages.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use super::dynamics::{state_derivative, LocalEnvironment, StateDerivative};
use super::state::TruthState;
use super::FlightError;
use crate::airframe::{AirframeModel, ControlInputs};
use crate::earth::geodesy::GeodeticPosition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegratorKind {
    #[default]
    So3,
    R4Norm,
}

impl IntegratorKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "so3" => Some(Self::So3),
            "r4norm" => Some(Self::R4Norm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::So3 => "so3",
            Self::R4Norm => "r4norm",
        }
    }
}

/// Rotation-vector rate given the body angular rate (Bortz equation).
fn rotvec_rate(theta: &Vector3<f64>, omega: &Vector3<f64>) -> Vector3<f64> {
    let t2 = theta.norm_squared();
    // c(t) = (1 - t sin t / (2 (1 - cos t))) / t^2, series for small angles.
    let c = if t2 < 1e-6 {
        1.0 / 12.0 + t2 / 720.0
    } else {
        let t = t2.sqrt();
        (1.0 - t * t.sin() / (2.0 * (1.0 - t.cos()))) / t2
    };
    omega + 0.5 * theta.cross(omega) + c * theta.cross(&theta.cross(omega))
}

/// Per-stage increment of the integrable state components.
#[derive(Clone, Copy)]
struct Delta {
    lon: f64,
    lat: f64,
    alt: f64,
    vel_body: Vector3<f64>,
    /// R4 quaternion rate (R4Norm) -- zero quaternion when unused.
    att_r4: Quaternion<f64>,
    /// Rotation-vector rate (So3).
    rotvec: Vector3<f64>,
    omega: Vector3<f64>,
    fuel: f64,
}

fn stage_state(
    base: &TruthState,
    kind: IntegratorKind,
    delta: &Delta,
    h: f64,
) -> TruthState {
    let att = match kind {
        IntegratorKind::R4Norm => UnitQuaternion::from_quaternion(
            base.att.quaternion() + delta.att_r4 * h,
        ),
        IntegratorKind::So3 => base.att * UnitQuaternion::from_scaled_axis(delta.rotvec * h),
    };
    TruthState {
        t: base.t + h,
        pos: GeodeticPosition {
            lon: base.pos.lon + delta.lon * h,
            lat: base.pos.lat + delta.lat * h,
            alt: base.pos.alt + delta.alt * h,
        },
        vel_body: base.vel_body + delta.vel_body * h,
        att,
        omega_ib_body: base.omega_ib_body + delta.omega * h,
        fuel: base.fuel + delta.fuel * h,
    }
}

fn delta_from(kind: IntegratorKind, theta: &Vector3<f64>, d: &StateDerivative) -> Delta {
    Delta {
        lon: d.lon_dot,
        lat: d.lat_dot,
        alt: d.alt_dot,
        vel_body: d.vel_body_dot,
        att_r4: d.att_dot,
        rotvec: match kind {
            IntegratorKind::So3 => rotvec_rate(theta, &d.omega_nb_body),
            IntegratorKind::R4Norm => Vector3::zeros(),
        },
        omega: d.omega_ib_dot,
        fuel: d.fuel_dot,
    }
}

/// Advance the truth state by one step of length `dt`. Returns the new state
/// and the derivative evaluated at the step start (reused by sensor models).
pub fn rk4_step(
    kind: IntegratorKind,
    state: &TruthState,
    dt: f64,
    controls: &ControlInputs,
    airframe: &AirframeModel,
    env: &LocalEnvironment,
) -> Result<(TruthState, StateDerivative), FlightError> {
    let d1 = state_derivative(state, controls, airframe, env)?;
    let k1 = delta_from(kind, &Vector3::zeros(), &d1);

    let s2 = stage_state(state, kind, &k1, dt / 2.0);
    let d2 = state_derivative(&s2, controls, airframe, env)?;
    let k2 = delta_from(kind, &(k1.rotvec * (dt / 2.0)), &d2);

    let s3 = stage_state(state, kind, &k2, dt / 2.0);
    let d3 = state_derivative(&s3, controls, airframe, env)?;
    let k3 = delta_from(kind, &(k2.rotvec * (dt / 2.0)), &d3);

    let s4 = stage_state(state, kind, &k3, dt);
    let d4 = state_derivative(&s4, controls, airframe, env)?;
    let k4 = delta_from(kind, &(k3.rotvec * dt), &d4);

    let c = dt / 6.0;
    let combine3 =
        |a: &Vector3<f64>, b: &Vector3<f64>, cc: &Vector3<f64>, d: &Vector3<f64>| {
            (a + 2.0 * b + 2.0 * cc + d) * c
        };
    let att = match kind {
        IntegratorKind::R4Norm => UnitQuaternion::from_quaternion(
            state.att.quaternion() + (k1.att_r4 + k2.att_r4 * 2.0 + k3.att_r4 * 2.0 + k4.att_r4) * c,
        ),
        IntegratorKind::So3 => {
            let theta = combine3(&k1.rotvec, &k2.rotvec, &k3.rotvec, &k4.rotvec);
            state.att * UnitQuaternion::from_scaled_axis(theta)
        }
    };
    let next = TruthState {
        t: state.t + dt,
        pos: GeodeticPosition {
            lon: state.pos.lon + (k1.lon + 2.0 * k2.lon + 2.0 * k3.lon + k4.lon) * c,
            lat: state.pos.lat + (k1.lat + 2.0 * k2.lat + 2.0 * k3.lat + k4.lat) * c,
            alt: state.pos.alt + (k1.alt + 2.0 * k2.alt + 2.0 * k3.alt + k4.alt) * c,
        },
        vel_body: state.vel_body
            + combine3(&k1.vel_body, &k2.vel_body, &k3.vel_body, &k4.vel_body),
        att,
        omega_ib_body: state.omega_ib_body + combine3(&k1.omega, &k2.omega, &k3.omega, &k4.omega),
        fuel: state.fuel + (k1.fuel + 2.0 * k2.fuel + 2.0 * k3.fuel + k4.fuel) * c,
    };
    if !next.is_finite() {
        return Err(FlightError::NonFinite(next.t));
    }
    Ok((next, d1))
}
