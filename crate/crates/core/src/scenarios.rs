//! Scenario generation: stochastic mission plans, weather/wind ramps, and
//! terrain-zone presets for the two benchmark trajectories.
//!
//! All parameters are drawn in a fixed order from the MISSION, WEATHER, and
//! WIND samplers, with rejection resampling of the individual parameter when
//! a restriction fails, so the stream positions are reproducible. Bank and
//! climb path-angle signs are derived from the drawn values and consume no
//! stream entropy. Records keep the drawn units (deg, m, s, m/s); conversion
//! to radians happens when building the guidance plan.

use crate::earth::geodesy::wrap_deg;
use crate::earth::WindProfile;
use crate::guidance::{AileronTarget, ElevatorTarget, GuidanceTarget, MissionPlan, Trigger};
use crate::seedtree::{SamplerError, StochasticSampler};

/// GNSS signal loss time shared by both scenarios [s].
pub const T_GNSS: f64 = 100.0;
/// Duration of scenario #1 [s].
pub const SCENARIO1_T_END: f64 = 3800.0;
/// Duration of scenario #2 [s].
pub const SCENARIO2_T_END: f64 = 500.0;
/// Magnitude of the commanded turn bank angle [deg].
pub const TURN_BANK_DEG: f64 = 10.0;
/// Magnitude of the commanded climb/descent path angle [deg].
pub const CLIMB_PATH_DEG: f64 = 2.0;

/// Bank command for the shortest turn from one bearing to another [deg].
fn turn_bank_deg(from_deg: f64, to_deg: f64) -> f64 {
    if wrap_deg(to_deg - from_deg) < 0.0 {
        -TURN_BANK_DEG
    } else {
        TURN_BANK_DEG
    }
}

/// Long-range mission: straight GNSS-denied cruise, one turn, airspeed and
/// altitude changes, 3800 s total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario1Mission {
    /// Initial airspeed [m/s].
    pub vtas_ini: f64,
    /// Initial pressure altitude [m].
    pub hp_ini: f64,
    /// Initial bearing [deg].
    pub chi_ini_deg: f64,
    /// GNSS loss time [s].
    pub t_gnss: f64,
    /// Turn initiation time [s].
    pub t_turn: f64,
    /// Turn bank angle, sign from the shortest turn [deg].
    pub xi_turn_deg: f64,
    /// Bearing after the turn [deg].
    pub chi_end_deg: f64,
    /// Straight time at the initial airspeed after the turn [s].
    pub dt_op_tas: f64,
    /// Airspeed after the speed change [m/s].
    pub vtas_end: f64,
    /// Straight time at the final airspeed before the climb [s].
    pub dt_op_hp: f64,
    /// Climb/descent path angle, sign from the altitude change [deg].
    pub gamma_climb_deg: f64,
    /// Pressure altitude after the climb/descent [m].
    pub hp_end: f64,
    /// Scenario end time [s].
    pub t_end: f64,
}

pub fn sample_scenario1_mission(
    sampler: &mut StochasticSampler,
) -> Result<Scenario1Mission, SamplerError> {
    let vtas_ini = sampler.sample_constrained(
        |s| s.sample_normal(29.0, 1.5),
        |v| 24.0 < *v && *v < 34.0,
    )?;
    let hp_ini = sampler.sample_normal(2700.0, 200.0);
    let chi_ini_deg = sampler.sample_discrete_uniform(-179, 180) as f64;
    let t_turn = sampler.sample_constrained(
        |s| T_GNSS + s.sample_normal(30.0, 50.0),
        |t| *t > T_GNSS + 15.0,
    )?;
    let chi_end_deg = sampler.sample_constrained(
        |s| s.sample_discrete_uniform(-179, 180) as f64,
        |chi| wrap_deg(chi - chi_ini_deg).abs() > 10.0,
    )?;
    let dt_op_tas = sampler.sample_constrained(|s| s.sample_normal(500.0, 100.0), |t| *t > 150.0)?;
    let vtas_end = sampler.sample_constrained(
        |s| s.sample_normal(vtas_ini, 1.5),
        |v| 24.0 < *v && *v < 34.0 && (*v - vtas_ini).abs() > 0.5,
    )?;
    let dt_op_hp = sampler.sample_constrained(
        |s| s.sample_normal(500.0, 100.0),
        |t| *t > 150.0 && dt_op_tas + *t < 2500.0,
    )?;
    let hp_end = sampler.sample_constrained(
        |s| s.sample_normal(hp_ini, 300.0),
        |h| (*h - hp_ini).abs() > 100.0,
    )?;
    Ok(Scenario1Mission {
        vtas_ini,
        hp_ini,
        chi_ini_deg,
        t_gnss: T_GNSS,
        t_turn,
        xi_turn_deg: turn_bank_deg(chi_ini_deg, chi_end_deg),
        chi_end_deg,
        dt_op_tas,
        vtas_end,
        dt_op_hp,
        gamma_climb_deg: if hp_end > hp_ini {
            CLIMB_PATH_DEG
        } else {
            -CLIMB_PATH_DEG
        },
        hp_end,
        t_end: SCENARIO1_T_END,
    })
}

/// One piecewise-linear ramp: constant before `t_ini`, linear in between,
/// constant after `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    pub t_ini: f64,
    pub t_end: f64,
    pub v_ini: f64,
    pub v_end: f64,
}

impl Ramp {
    pub fn value(&self, t: f64) -> f64 {
        if t <= self.t_ini || self.t_end <= self.t_ini {
            self.v_ini
        } else if t >= self.t_end {
            self.v_end
        } else {
            let f = (t - self.t_ini) / (self.t_end - self.t_ini);
            self.v_ini + f * (self.v_end - self.v_ini)
        }
    }
}

/// Scenario #1 weather and wind field: temperature-offset, pressure-offset,
/// and wind ramps, each with its own window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario1WeatherWind {
    /// Temperature offset ramp [K].
    pub temperature: Ramp,
    /// Sea-level pressure offset ramp [Pa].
    pub pressure: Ramp,
    /// Wind ramp window start [s].
    pub t_ini_wind: f64,
    /// Wind ramp window end [s].
    pub t_end_wind: f64,
    /// Wind speed before/after the ramp [m/s].
    pub vwind_ini: f64,
    pub vwind_end: f64,
    /// Wind bearing before/after the ramp [deg].
    pub chi_wind_ini_deg: f64,
    pub chi_wind_end_deg: f64,
}

impl Scenario1WeatherWind {
    /// Temperature offset from the standard atmosphere at time `t` [K].
    pub fn delta_t(&self, t: f64) -> f64 {
        self.temperature.value(t)
    }

    /// Sea-level pressure offset at time `t` [Pa].
    pub fn delta_p(&self, t: f64) -> f64 {
        self.pressure.value(t)
    }

    /// Low-frequency wind profile for the truth propagation.
    pub fn wind_profile(&self) -> WindProfile {
        WindProfile {
            t_ini: self.t_ini_wind,
            t_end: self.t_end_wind,
            speed_ini: self.vwind_ini,
            speed_end: self.vwind_end,
            bearing_ini_deg: self.chi_wind_ini_deg,
            bearing_end_deg: self.chi_wind_end_deg,
        }
    }
}

pub fn sample_scenario1_weather(
    weather: &mut StochasticSampler,
    wind: &mut StochasticSampler,
) -> Result<Scenario1WeatherWind, SamplerError> {
    let t_ini_dt = weather.sample_constrained(|s| s.sample_normal(400.0, 600.0), |t| *t > 50.0)?;
    let t_end_dt = weather.sample_constrained(
        |s| s.sample_normal(t_ini_dt + 1200.0, 600.0),
        |t| *t > t_ini_dt + 600.0,
    )?;
    let dt_ini = weather.sample_normal(0.0, 10.0);
    let dt_end = weather.sample_normal(dt_ini, 3.0);
    let t_ini_dp = weather.sample_constrained(|s| s.sample_normal(400.0, 600.0), |t| *t > 50.0)?;
    let t_end_dp = weather.sample_constrained(
        |s| s.sample_normal(t_ini_dp + 1200.0, 600.0),
        |t| *t > t_ini_dp + 600.0,
    )?;
    let dp_ini = weather.sample_normal(0.0, 1500.0);
    let dp_end = weather.sample_normal(dp_ini, 300.0);

    let t_ini_wind = wind.sample_constrained(|s| s.sample_normal(400.0, 600.0), |t| *t > 50.0)?;
    // The ramp-end mean is anchored to the temperature window start; the
    // restriction is against the wind window start.
    let t_end_wind = wind.sample_constrained(
        |s| s.sample_normal(t_ini_dt + 1200.0, 600.0),
        |t| *t > t_ini_wind + 300.0,
    )?;
    let vwind_ini = wind.sample_normal(0.0, 7.0);
    let vwind_end = wind.sample_normal(vwind_ini, 3.0);
    let chi_wind_ini_deg = wind.sample_discrete_uniform(-179, 180) as f64;
    let chi_wind_end_deg = wind.sample_normal(chi_wind_ini_deg, 15.0);

    Ok(Scenario1WeatherWind {
        temperature: Ramp {
            t_ini: t_ini_dt,
            t_end: t_end_dt,
            v_ini: dt_ini,
            v_end: dt_end,
        },
        pressure: Ramp {
            t_ini: t_ini_dp,
            t_end: t_end_dp,
            v_ini: dp_ini,
            v_end: dp_end,
        },
        t_ini_wind,
        t_end_wind,
        vwind_ini,
        vwind_end,
        chi_wind_ini_deg,
        chi_wind_end_deg,
    })
}

/// Short mission: one initial straight leg, then eight back-to-back turns at
/// constant airspeed and altitude, 500 s total.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario2Mission {
    pub vtas_ini: f64,
    pub hp_ini: f64,
    /// Bearings chi_0..chi_8 [deg]; chi_0 is the initial bearing.
    pub chi_deg: [f64; 9],
    pub t_gnss: f64,
    /// Time of the first turn [s].
    pub t_turn1: f64,
    /// Straight-segment durations before turns 2..=8 [s] (integer-valued).
    pub dt_turn: [f64; 7],
    pub t_end: f64,
}

pub fn sample_scenario2_mission(
    sampler: &mut StochasticSampler,
) -> Result<Scenario2Mission, SamplerError> {
    // The first three draws replicate the long-range mission's initial
    // conditions when fed the same seed.
    let vtas_ini = sampler.sample_constrained(
        |s| s.sample_normal(29.0, 1.5),
        |v| 24.0 < *v && *v < 34.0,
    )?;
    let hp_ini = sampler.sample_normal(2700.0, 200.0);
    let mut chi_deg = [0.0; 9];
    chi_deg[0] = sampler.sample_discrete_uniform(-179, 180) as f64;
    for i in 1..9 {
        let prev = chi_deg[i - 1];
        chi_deg[i] = sampler.sample_constrained(
            |s| s.sample_discrete_uniform(-179, 180) as f64,
            |chi| wrap_deg(chi - prev).abs() > 10.0,
        )?;
    }
    let t_turn1 = sampler.sample_constrained(
        |s| T_GNSS + s.sample_normal(30.0, 50.0),
        |t| *t > T_GNSS + 15.0,
    )?;
    let mut dt_turn = [0.0; 7];
    for slot in dt_turn.iter_mut() {
        *slot = sampler.sample_discrete_uniform(10, 50) as f64;
    }
    Ok(Scenario2Mission {
        vtas_ini,
        hp_ini,
        chi_deg,
        t_gnss: T_GNSS,
        t_turn1,
        dt_turn,
        t_end: SCENARIO2_T_END,
    })
}

/// Scenario #2 weather and wind: constant values equal to the scenario #1
/// initial conditions under the same seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario2Weather {
    pub delta_t: f64,
    pub delta_p: f64,
    pub vwind: f64,
    pub chi_wind_deg: f64,
}

impl Scenario2Weather {
    pub fn wind_profile(&self) -> WindProfile {
        WindProfile::constant(self.vwind, self.chi_wind_deg)
    }
}

pub fn sample_scenario2_weather(
    weather: &mut StochasticSampler,
    wind: &mut StochasticSampler,
) -> Result<Scenario2Weather, SamplerError> {
    // Drawing the full ramp record and keeping only the initial values
    // guarantees the coincidence with the scenario #1 initial conditions.
    let w = sample_scenario1_weather(weather, wind)?;
    Ok(Scenario2Weather {
        delta_t: w.temperature.v_ini,
        delta_p: w.pressure.v_ini,
        vwind: w.vwind_ini,
        chi_wind_deg: w.chi_wind_ini_deg,
    })
}

/// Six-target guidance plan for the long-range mission.
pub fn build_scenario1_plan(m: &Scenario1Mission) -> MissionPlan {
    let chi_ini = m.chi_ini_deg.to_radians();
    let chi_end = m.chi_end_deg.to_radians();
    MissionPlan {
        targets: vec![
            GuidanceTarget {
                vtas: m.vtas_ini,
                elevator: ElevatorTarget::PressureAltitude(m.hp_ini),
                aileron: AileronTarget::Bearing(chi_ini),
                beta: 0.0,
                trigger: Trigger::AbsoluteTime(m.t_turn),
            },
            GuidanceTarget {
                vtas: m.vtas_ini,
                elevator: ElevatorTarget::PressureAltitude(m.hp_ini),
                aileron: AileronTarget::Bank(m.xi_turn_deg.to_radians()),
                beta: 0.0,
                trigger: Trigger::BearingCapture(chi_end),
            },
            GuidanceTarget {
                vtas: m.vtas_ini,
                elevator: ElevatorTarget::PressureAltitude(m.hp_ini),
                aileron: AileronTarget::Bearing(chi_end),
                beta: 0.0,
                trigger: Trigger::ElapsedTime(m.dt_op_tas),
            },
            GuidanceTarget {
                vtas: m.vtas_end,
                elevator: ElevatorTarget::PressureAltitude(m.hp_ini),
                aileron: AileronTarget::Bearing(chi_end),
                beta: 0.0,
                trigger: Trigger::ElapsedTime(m.dt_op_hp),
            },
            GuidanceTarget {
                vtas: m.vtas_end,
                elevator: ElevatorTarget::PathAngle(m.gamma_climb_deg.to_radians()),
                aileron: AileronTarget::Bearing(chi_end),
                beta: 0.0,
                trigger: Trigger::AltitudeCapture(m.hp_end),
            },
            GuidanceTarget {
                vtas: m.vtas_end,
                elevator: ElevatorTarget::PressureAltitude(m.hp_end),
                aileron: AileronTarget::Bearing(chi_end),
                beta: 0.0,
                trigger: Trigger::AbsoluteTime(m.t_end),
            },
        ],
    }
}

/// Seventeen-target guidance plan for the eight-turn mission.
pub fn build_scenario2_plan(m: &Scenario2Mission) -> MissionPlan {
    let hp = ElevatorTarget::PressureAltitude(m.hp_ini);
    let mut targets = vec![GuidanceTarget {
        vtas: m.vtas_ini,
        elevator: hp,
        aileron: AileronTarget::Bearing(m.chi_deg[0].to_radians()),
        beta: 0.0,
        trigger: Trigger::AbsoluteTime(m.t_turn1),
    }];
    for i in 1..9 {
        let xi = turn_bank_deg(m.chi_deg[i - 1], m.chi_deg[i]);
        let chi = m.chi_deg[i].to_radians();
        targets.push(GuidanceTarget {
            vtas: m.vtas_ini,
            elevator: hp,
            aileron: AileronTarget::Bank(xi.to_radians()),
            beta: 0.0,
            trigger: Trigger::BearingCapture(chi),
        });
        targets.push(GuidanceTarget {
            vtas: m.vtas_ini,
            elevator: hp,
            aileron: AileronTarget::Bearing(chi),
            beta: 0.0,
            trigger: if i < 8 {
                Trigger::ElapsedTime(m.dt_turn[i - 1])
            } else {
                Trigger::AbsoluteTime(m.t_end)
            },
        });
    }
    MissionPlan { targets }
}

/// Terrain-zone preset: launch coordinates and ground altitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrainZone {
    pub code: &'static str,
    /// Launch longitude [deg], 0..360 east.
    pub lon_deg: f64,
    /// Launch latitude [deg].
    pub lat_deg: f64,
    /// Ground altitude above MSL [m].
    pub ground_altitude: f64,
}

/// The six terrain-zone presets.
pub const TERRAIN_ZONES: [TerrainZone; 6] = [
    TerrainZone { code: "DS", lon_deg: 248.001185, lat_deg: 32.157903, ground_altitude: 661.0 },
    TerrainZone { code: "FM", lon_deg: 272.122371, lat_deg: 38.865625, ground_altitude: 144.0 },
    TerrainZone { code: "FR", lon_deg: 287.490805, lat_deg: 43.354486, ground_altitude: 200.0 },
    TerrainZone { code: "MX", lon_deg: 270.984538, lat_deg: 34.720636, ground_altitude: 133.0 },
    TerrainZone { code: "PR", lon_deg: 279.088834, lat_deg: 25.855172, ground_altitude: 10.0 },
    TerrainZone { code: "UR", lon_deg: 241.799731, lat_deg: 33.924426, ground_altitude: 26.0 },
];

impl TerrainZone {
    pub fn by_code(code: &str) -> Option<&'static TerrainZone> {
        TERRAIN_ZONES.iter().find(|z| z.code.eq_ignore_ascii_case(code))
    }

    /// Launch longitude wrapped to (-180, 180] [deg].
    pub fn lon_deg_signed(&self) -> f64 {
        wrap_deg(self.lon_deg)
    }
}
