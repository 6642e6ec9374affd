//! WGS84 ellipsoid geometry and the geodetic/geopotential altitude ratio.

use std::f64::consts::PI;

/// WGS84 semi-major axis [m].
pub const WGS84_A: f64 = 6_378_137.0;
/// WGS84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257_223_563;
/// WGS84 first eccentricity squared.
pub const WGS84_E2: f64 = WGS84_F * (2.0 - WGS84_F);
/// Spherical Earth radius used for the geodetic/geopotential altitude ratio [m].
pub const EARTH_RADIUS: f64 = 6_356_766.0;

/// Geodetic position: longitude and latitude in radians, altitude in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodeticPosition {
    pub lon: f64,
    pub lat: f64,
    pub alt: f64,
}

impl GeodeticPosition {
    pub fn new(lon: f64, lat: f64, alt: f64) -> Self {
        let mut p = Self { lon, lat, alt };
        p.normalize();
        p
    }

    /// Wrap longitude to (-pi, pi] and clamp latitude to [-pi/2, pi/2].
    pub fn normalize(&mut self) {
        self.lon = wrap_angle(self.lon);
        self.lat = self.lat.clamp(-PI / 2.0, PI / 2.0);
    }

    /// Meridian radius of curvature M(lat) [m].
    pub fn meridian_radius(&self) -> f64 {
        let s = self.lat.sin();
        WGS84_A * (1.0 - WGS84_E2) / (1.0 - WGS84_E2 * s * s).powf(1.5)
    }

    /// Prime vertical radius of curvature N(lat) [m].
    pub fn prime_vertical_radius(&self) -> f64 {
        let s = self.lat.sin();
        WGS84_A / (1.0 - WGS84_E2 * s * s).sqrt()
    }
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Wrap an angle difference in degrees to (-180, 180].
pub fn wrap_deg(a: f64) -> f64 {
    let mut x = a.rem_euclid(360.0);
    if x > 180.0 {
        x -= 360.0;
    }
    x
}

/// Geopotential altitude H from geodetic altitude h: H = RE h / (RE + h).
pub fn geopotential_from_geodetic(h: f64) -> f64 {
    EARTH_RADIUS * h / (EARTH_RADIUS + h)
}

/// Inverse of [`geopotential_from_geodetic`].
pub fn geodetic_from_geopotential(big_h: f64) -> f64 {
    EARTH_RADIUS * big_h / (EARTH_RADIUS - big_h)
}
