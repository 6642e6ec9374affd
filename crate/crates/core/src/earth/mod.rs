//! Environment models: WGS84 geodesy, normal gravity, INSA atmosphere,
//! low-frequency wind, Dryden turbulence, magnetic field, and the stochastic
//! truth-vs-onboard geo-model perturbation.

pub mod atmosphere;
pub mod geodesy;
pub mod gravity;
pub mod magnetic;
pub mod perturbation;
pub mod wind;

pub use atmosphere::{insa_state, pressure_altitude_from_pressure, AtmosphericState, InsaError};
pub use geodesy::{
    geodetic_from_geopotential, geopotential_from_geodetic, GeodeticPosition, EARTH_RADIUS,
};
pub use gravity::{normal_gravity, normal_gravity_ned};
pub use magnetic::magnetic_field_ned;
pub use perturbation::{GeoPerturbation, GeoPerturbationSpec};
pub use wind::{DrydenConfig, DrydenFilter, WindProfile};
