//! Truth-state flight dynamics: six-degree-of-freedom rigid-body motion over
//! the rotating WGS84 ellipsoid, integrated at the truth rate with one of two
//! fourth-order Runge-Kutta variants that differ in how attitude is handled.

mod dynamics;
mod integrate;
mod state;

pub use dynamics::{state_derivative, AirRelative, LocalEnvironment, StateDerivative};
pub use integrate::{rk4_step, IntegratorKind};
pub use state::{initial_state_from_trim, TruthState, EARTH_RATE};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlightError {
    #[error(transparent)]
    Airframe(#[from] crate::airframe::AirframeError),
    #[error(transparent)]
    Atmosphere(#[from] crate::earth::InsaError),
    #[error("state became non-finite at t = {0} s")]
    NonFinite(f64),
}
