//! INSA atmosphere: the ICAO standard atmosphere extended with temperature
//! and pressure offsets. Pressure altitude is defined purely by pressure
//! through the standard relation; the temperature offset shifts the profile
//! and the pressure offset shifts sea-level pressure, so geopotential and
//! pressure altitudes differ through hydrostatic integration.

use thiserror::Error;

/// Standard sea-level temperature [K].
pub const T0: f64 = 288.15;
/// Standard sea-level pressure [Pa].
pub const P0: f64 = 101_325.0;
/// Tropospheric temperature gradient [K/m].
pub const BETA: f64 = -6.5e-3;
/// Standard gravity for geopotential altitude [m/s^2].
pub const G0: f64 = 9.806_65;
/// Specific gas constant of air [J/(kg K)].
pub const R_AIR: f64 = 287.052_87;

/// Modeled pressure-altitude layer (troposphere, with a small margin below MSL).
pub const HP_MIN: f64 = -2_000.0;
pub const HP_MAX: f64 = 11_000.0;

const EXP_P: f64 = -G0 / (BETA * R_AIR);

#[derive(Debug, Error)]
pub enum InsaError {
    #[error("pressure altitude {0} m outside modeled layer [{HP_MIN}, {HP_MAX}]")]
    OutsideLayer(f64),
}

/// Atmospheric state at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphericState {
    /// Temperature [K].
    pub temperature: f64,
    /// Pressure [Pa].
    pub pressure: f64,
    /// Pressure altitude [m].
    pub pressure_altitude: f64,
    /// Geopotential altitude [m].
    pub geopotential_altitude: f64,
    /// Temperature offset [K].
    pub delta_t: f64,
    /// Pressure offset [Pa].
    pub delta_p: f64,
}

impl AtmosphericState {
    /// Air density from the ideal gas law [kg/m^3].
    pub fn density(&self) -> f64 {
        self.pressure / (R_AIR * self.temperature)
    }
}

/// Pressure from pressure altitude, standard relation.
pub fn pressure_from_pressure_altitude(hp: f64) -> f64 {
    P0 * (1.0 + BETA * hp / T0).powf(EXP_P)
}

/// Pressure altitude from pressure, exact inverse of the standard relation.
pub fn pressure_altitude_from_pressure(p: f64) -> f64 {
    T0 / BETA * ((p / P0).powf(1.0 / EXP_P) - 1.0)
}

/// Pressure altitude of the mean sea level surface given the pressure offset.
fn hp_at_msl(delta_p: f64) -> f64 {
    pressure_altitude_from_pressure(P0 + delta_p)
}

/// Geopotential altitude from pressure altitude under offsets.
///
/// dH/dHp = T/T_std along the hydrostatic column, anchored at H = 0 where
/// p = P0 + delta_p.
pub fn geopotential_from_pressure_altitude(hp: f64, delta_t: f64, delta_p: f64) -> f64 {
    let hp0 = hp_at_msl(delta_p);
    (hp - hp0) + delta_t / BETA * ((T0 + BETA * hp) / (T0 + BETA * hp0)).ln()
}

/// Pressure altitude from geopotential altitude under offsets (Newton inversion).
pub fn pressure_altitude_from_geopotential(big_h: f64, delta_t: f64, delta_p: f64) -> f64 {
    let mut hp = big_h; // good starting point: identity for zero offsets
    for _ in 0..50 {
        let f = geopotential_from_pressure_altitude(hp, delta_t, delta_p) - big_h;
        let slope = (T0 + delta_t + BETA * hp) / (T0 + BETA * hp);
        let step = f / slope;
        hp -= step;
        if step.abs() < 1e-12 {
            break;
        }
    }
    hp
}

/// Full INSA state at a given pressure altitude and offsets.
pub fn insa_state(hp: f64, delta_t: f64, delta_p: f64) -> Result<AtmosphericState, InsaError> {
    if !(HP_MIN..=HP_MAX).contains(&hp) {
        return Err(InsaError::OutsideLayer(hp));
    }
    Ok(AtmosphericState {
        temperature: T0 + delta_t + BETA * hp,
        pressure: pressure_from_pressure_altitude(hp),
        pressure_altitude: hp,
        geopotential_altitude: geopotential_from_pressure_altitude(hp, delta_t, delta_p),
        delta_t,
        delta_p,
    })
}
