//! Somigliana normal gravity on the WGS84 ellipsoid with the standard
//! free-air altitude correction. The vector points along geodetic down;
//! deflection of the vertical enters only through the geo perturbation.

use super::geodesy::{WGS84_A, WGS84_E2, WGS84_F};
use nalgebra::Vector3;

/// Normal gravity at the equator on the ellipsoid surface [m/s^2].
const GAMMA_E: f64 = 9.780_325_335_9;
/// Somigliana constant k.
const SOMIGLIANA_K: f64 = 0.001_931_852_652_41;
/// Ratio of centrifugal to gravitational acceleration at the equator.
const M_RATIO: f64 = 0.003_449_786_506_84;

/// Normal gravity magnitude at geodetic latitude `lat` [rad] and altitude `h` [m].
pub fn normal_gravity(lat: f64, h: f64) -> f64 {
    let s2 = lat.sin().powi(2);
    let g0 = GAMMA_E * (1.0 + SOMIGLIANA_K * s2) / (1.0 - WGS84_E2 * s2).sqrt();
    // Second-order free-air correction (WGS84 Eq. 4-3).
    g0 * (1.0 - 2.0 / WGS84_A * (1.0 + WGS84_F + M_RATIO - 2.0 * WGS84_F * s2) * h
        + 3.0 * h * h / (WGS84_A * WGS84_A))
}

/// Normal gravity as a NED vector (directed along geodetic down).
pub fn normal_gravity_ned(lat: f64, h: f64) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, normal_gravity(lat, h))
}
