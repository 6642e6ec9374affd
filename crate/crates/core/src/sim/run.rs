//! Single-run execution: seed derivation, scenario sampling, and the
//! interleaved propagation loop.
//!
//! Rates: truth at 500 Hz, sensing and navigation at 100 Hz, guidance and
//! control at 50 Hz, GNSS at 1 Hz, camera at 10 Hz. Within each control
//! frame the order is truth substeps, then sensing, then navigation, then
//! guidance/control; controls and environment are held constant across the
//! truth substeps in between.

use nalgebra::Vector3;

use crate::airframe::ControlInputs;
use crate::control::{ControlConfig, Controller};
use crate::earth::atmosphere::{
    geopotential_from_pressure_altitude, insa_state, pressure_altitude_from_geopotential,
};
use crate::earth::geodesy::{
    geodetic_from_geopotential, geopotential_from_geodetic, wrap_angle, wrap_deg, GeodeticPosition,
};
use crate::earth::{magnetic_field_ned, DrydenFilter, GeoPerturbation, WindProfile};
use crate::flight::{
    initial_state_from_trim, rk4_step, state_derivative, LocalEnvironment, TruthState,
};
use crate::guidance::{MissionPlan, MissionTracker};
use crate::metrics::RunningStats;
use crate::nav::{EstimatedState, NavRegistry};
use crate::scenarios::{
    build_scenario1_plan, build_scenario2_plan, sample_scenario1_mission, sample_scenario1_weather,
    sample_scenario2_mission, sample_scenario2_weather, Scenario1Mission, Scenario1WeatherWind,
    Scenario2Mission, Scenario2Weather, T_GNSS,
};
use crate::seedtree::{
    derive_module_seeds, derive_trajectory_seeds, MasterSeed, StochasticSampler, TrajectorySeedSet,
};
use crate::sensors::{
    camera_pose, fine_alignment, initialize_sensor_errors, sense_airdata, sense_gnss, sense_imu,
    sense_magnetometer, CameraRig, SensedRecord,
};

use super::config::RunConfig;
use super::trace::{fmt_f, TraceWriter};

/// Truth integration step [s].
pub const TRUTH_DT: f64 = 0.002;
/// Estimation (sensing/navigation) step [s].
pub const EST_DT: f64 = 0.01;
/// Guidance/control step [s].
pub const CTRL_DT: f64 = 0.02;

const EST_EVERY: u64 = 5; // truth steps per estimation epoch
const CTRL_EVERY: u64 = 10; // truth steps per control epoch
const CAM_EVERY: u64 = 50; // truth steps per camera frame
const GNSS_EVERY: u64 = 500; // truth steps per GNSS epoch

/// Error variables tracked for every run: name and angular-wrap flag.
pub const TRACKED_VARIABLES: [(&str, bool); 8] = [
    ("pos_north_m", false),
    ("pos_east_m", false),
    ("pos_down_m", false),
    ("hp_m", false),
    ("vtas_mps", false),
    ("chi_rad", true),
    ("theta_rad", true),
    ("phi_rad", true),
];

/// Materialized stochastic scenario of one run.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioRecord {
    LongRange {
        mission: Scenario1Mission,
        weather: Scenario1WeatherWind,
    },
    EightTurns {
        mission: Scenario2Mission,
        weather: Scenario2Weather,
    },
}

impl ScenarioRecord {
    pub fn plan(&self) -> MissionPlan {
        match self {
            Self::LongRange { mission, .. } => build_scenario1_plan(mission),
            Self::EightTurns { mission, .. } => build_scenario2_plan(mission),
        }
    }

    pub fn wind_profile(&self) -> WindProfile {
        match self {
            Self::LongRange { weather, .. } => weather.wind_profile(),
            Self::EightTurns { weather, .. } => weather.wind_profile(),
        }
    }

    pub fn delta_t(&self, t: f64) -> f64 {
        match self {
            Self::LongRange { weather, .. } => weather.delta_t(t),
            Self::EightTurns { weather, .. } => weather.delta_t,
        }
    }

    pub fn delta_p(&self, t: f64) -> f64 {
        match self {
            Self::LongRange { weather, .. } => weather.delta_p(t),
            Self::EightTurns { weather, .. } => weather.delta_p,
        }
    }

    pub fn vtas_ini(&self) -> f64 {
        match self {
            Self::LongRange { mission, .. } => mission.vtas_ini,
            Self::EightTurns { mission, .. } => mission.vtas_ini,
        }
    }

    pub fn hp_ini(&self) -> f64 {
        match self {
            Self::LongRange { mission, .. } => mission.hp_ini,
            Self::EightTurns { mission, .. } => mission.hp_ini,
        }
    }

    pub fn chi_ini_deg(&self) -> f64 {
        match self {
            Self::LongRange { mission, .. } => mission.chi_ini_deg,
            Self::EightTurns { mission, .. } => mission.chi_deg[0],
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            Self::LongRange { mission, .. } => mission.t_end,
            Self::EightTurns { mission, .. } => mission.t_end,
        }
    }
}

/// Record counts of the trace streams.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EpochCounts {
    pub truth: u64,
    pub estimated: u64,
    pub control: u64,
    pub camera: u64,
    /// GNSS epochs that produced a fix (pre-denial).
    pub gnss_fixes: u64,
}

/// Hex SHA-256 of each trace stream (empty when tracing is disabled).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceDigests {
    pub truth: String,
    pub sensed: String,
    pub estimated: String,
    pub controls: String,
    pub camera: String,
}

/// Per-variable error statistics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableResult {
    pub name: &'static str,
    pub angular: bool,
    pub metrics: crate::metrics::TrajectoryMetrics,
    /// Error at the final epoch.
    pub final_error: f64,
    /// Decimated error series, present when the config keeps series.
    pub series: Option<Vec<f64>>,
}

/// 1 Hz flight log for flight-technical-error inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightLogEntry {
    pub t: f64,
    /// Active guidance target index.
    pub target_index: usize,
    /// Truth airspeed [m/s].
    pub vtas: f64,
    /// Truth pressure altitude [m].
    pub hp: f64,
    /// Truth ground bearing [rad].
    pub chi: f64,
    /// Commanded airspeed of the active target [m/s].
    pub vtas_cmd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_index: u32,
    pub seeds: TrajectorySeedSet,
    pub config_hash: String,
    pub scenario: ScenarioRecord,
    pub counts: EpochCounts,
    pub digests: TraceDigests,
    pub variables: Vec<VariableResult>,
    /// Ground track length [m].
    pub total_distance_m: f64,
    /// Largest horizontal distance from the start point [m].
    pub max_range_m: f64,
    pub flight_log: Vec<FlightLogEntry>,
}

/// Machine-readable abort record; the batch continues without this run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub run_index: u32,
    pub t: f64,
    pub message: String,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run {} failed at t={:.3}: {}", self.run_index, self.t, self.message)
    }
}

/// Sample the configured scenario from the MISSION/WEATHER/WIND seeds.
pub fn sample_scenario(
    cfg: &RunConfig,
    seeds: &TrajectorySeedSet,
) -> Result<ScenarioRecord, crate::seedtree::SamplerError> {
    let mut mission = StochasticSampler::from_seed(seeds.module_seeds.mission);
    let mut weather = StochasticSampler::from_seed(seeds.module_seeds.weather);
    let mut wind = StochasticSampler::from_seed(seeds.module_seeds.wind);
    Ok(match cfg.scenario {
        2 => ScenarioRecord::EightTurns {
            mission: sample_scenario2_mission(&mut mission)?,
            weather: sample_scenario2_weather(&mut weather, &mut wind)?,
        },
        _ => ScenarioRecord::LongRange {
            mission: sample_scenario1_mission(&mut mission)?,
            weather: sample_scenario1_weather(&mut weather, &mut wind)?,
        },
    })
}

/// Derive the seed set of run `j` and execute it.
pub fn run_single(cfg: &RunConfig, run_index: u32) -> Result<RunResult, RunFailure> {
    let n = cfg.n_runs.max(run_index + 1);
    let traj = derive_trajectory_seeds(MasterSeed(cfg.master_seed), n);
    let seeds = derive_module_seeds(run_index, traj[run_index as usize]);
    run_single_with_seeds(cfg, &seeds)
}

struct Traces {
    truth: Option<TraceWriter>,
    sensed: Option<TraceWriter>,
    estimated: Option<TraceWriter>,
    controls: Option<TraceWriter>,
    camera: Option<TraceWriter>,
}

impl Traces {
    fn open(cfg: &RunConfig, run_index: u32, config_hash: &str) -> Result<Self, RunFailure> {
        if !cfg.trace {
            return Ok(Self {
                truth: None,
                sensed: None,
                estimated: None,
                controls: None,
                camera: None,
            });
        }
        let dir = match &cfg.output_dir {
            Some(root) => {
                let dir = root.join(format!("run_{run_index:03}"));
                std::fs::create_dir_all(&dir).map_err(|e| RunFailure {
                    run_index,
                    t: 0.0,
                    message: format!("cannot create {}: {e}", dir.display()),
                })?;
                Some(dir)
            }
            None => None,
        };
        let mk = |name: &str, columns: &str| -> Result<TraceWriter, RunFailure> {
            let mut w = match &dir {
                Some(d) => TraceWriter::to_file(&d.join(name)).map_err(|e| RunFailure {
                    run_index,
                    t: 0.0,
                    message: format!("cannot open {name}: {e}"),
                })?,
                None => TraceWriter::new(),
            };
            w.header(cfg.master_seed, run_index, config_hash, columns);
            Ok(w)
        };
        Ok(Self {
            truth: Some(mk(
                "truth.tsv",
                "t hp vtas lon lat alt vbx vby vbz qw qx qy qz wx wy wz fuel",
            )?),
            sensed: Some(mk(
                "sensed.tsv",
                "t fx fy fz wx wy wz bx by bz p T vtas alpha beta gnss lon lat alt vn ve vd",
            )?),
            estimated: Some(mk(
                "estimated.tsv",
                "t lon lat alt vn ve vd qw qx qy qz hp vtas alpha beta",
            )?),
            controls: Some(mk(
                "controls.tsv",
                "t target throttle elevator aileron rudder",
            )?),
            camera: Some(mk("camera.tsv", "t lon lat alt yaw pitch roll")?),
        })
    }

    fn finish(self) -> TraceDigests {
        let f = |w: Option<TraceWriter>| w.map(|w| w.finish().unwrap_or_default()).unwrap_or_default();
        TraceDigests {
            truth: f(self.truth),
            sensed: f(self.sensed),
            estimated: f(self.estimated),
            controls: f(self.controls),
            camera: f(self.camera),
        }
    }
}

fn truth_line(s: &TruthState, hp: f64, vtas: f64) -> String {
    let q = s.att.coords; // (x, y, z, w)
    [
        s.t,
        hp,
        vtas,
        s.pos.lon,
        s.pos.lat,
        s.pos.alt,
        s.vel_body.x,
        s.vel_body.y,
        s.vel_body.z,
        q.w,
        q.x,
        q.y,
        q.z,
        s.omega_ib_body.x,
        s.omega_ib_body.y,
        s.omega_ib_body.z,
        s.fuel,
    ]
    .map(fmt_f)
    .join(" ")
}

fn sensed_line(r: &SensedRecord) -> String {
    let mut cols: Vec<String> = [
        r.t,
        r.specific_force.x,
        r.specific_force.y,
        r.specific_force.z,
        r.angular_rate.x,
        r.angular_rate.y,
        r.angular_rate.z,
        r.magnetic_field.x,
        r.magnetic_field.y,
        r.magnetic_field.z,
        r.pressure,
        r.temperature,
        r.vtas,
        r.alpha,
        r.beta,
    ]
    .map(fmt_f)
    .to_vec();
    match &r.gnss {
        Some(fix) => {
            cols.push("1".to_string());
            for v in [
                fix.pos.lon,
                fix.pos.lat,
                fix.pos.alt,
                fix.vel_ned.x,
                fix.vel_ned.y,
                fix.vel_ned.z,
            ] {
                cols.push(fmt_f(v));
            }
        }
        None => {
            cols.push("0".to_string());
            for _ in 0..6 {
                cols.push("-".to_string());
            }
        }
    }
    cols.join(" ")
}

fn estimated_line(e: &EstimatedState) -> String {
    let q = e.att.coords;
    [
        e.t, e.pos.lon, e.pos.lat, e.pos.alt, e.vel_ned.x, e.vel_ned.y, e.vel_ned.z, q.w, q.x,
        q.y, q.z, e.hp, e.vtas, e.alpha, e.beta,
    ]
    .map(fmt_f)
    .join(" ")
}

/// Horizontal NED offset of `b` from `a` in meters.
fn horizontal_offset_m(a: &GeodeticPosition, b: &GeodeticPosition) -> (f64, f64) {
    let m = a.meridian_radius() + a.alt;
    let n = a.prime_vertical_radius() + a.alt;
    ((b.lat - a.lat) * m, (b.lon - a.lon) * n * a.lat.cos())
}

/// Execute one run from an explicit seed set.
pub fn run_single_with_seeds(
    cfg: &RunConfig,
    seeds: &TrajectorySeedSet,
) -> Result<RunResult, RunFailure> {
    let run_index = seeds.run_index;
    let fail = |t: f64, message: String| RunFailure {
        run_index,
        t,
        message,
    };
    let config_hash = cfg.config_hash();

    let zone = cfg.terrain_zone().map_err(|e| fail(0.0, e.to_string()))?;
    let (spec, airframe) = cfg.load_models().map_err(|e| fail(0.0, e.to_string()))?;
    let scenario = sample_scenario(cfg, seeds).map_err(|e| fail(0.0, e.to_string()))?;
    let plan = scenario.plan();
    let wind_profile = scenario.wind_profile();
    let mut geo_sampler = StochasticSampler::from_seed(seeds.module_seeds.geo);
    let geo = GeoPerturbation::draw(&cfg.geo_spec, &mut geo_sampler);

    // Initial condition: trim at the drawn airspeed and pressure altitude.
    let dt0 = scenario.delta_t(0.0);
    let dp0 = scenario.delta_p(0.0);
    let hp_ini = scenario.hp_ini();
    let atmos0 = insa_state(hp_ini, dt0, dp0).map_err(|e| fail(0.0, e.to_string()))?;
    let trim = airframe
        .trim(
            scenario.vtas_ini(),
            0.0,
            atmos0.pressure,
            atmos0.temperature,
            airframe.fuel_capacity,
        )
        .map_err(|e| fail(0.0, e.to_string()))?;
    let alt0 = geodetic_from_geopotential(geopotential_from_pressure_altitude(hp_ini, dt0, dp0));
    let pos0 = GeodeticPosition::new(
        wrap_deg(zone.lon_deg).to_radians(),
        zone.lat_deg.to_radians(),
        alt0,
    );
    let chi_ini = scenario.chi_ini_deg().to_radians();
    let wind0 = wind_profile.wind_ned(0.0);
    // Heading that makes the ground bearing match the drawn initial bearing
    // in the presence of wind.
    let mut psi = chi_ini;
    let mut state = initial_state_from_trim(
        pos0,
        psi,
        0.0,
        scenario.vtas_ini(),
        &trim,
        &wind0,
        airframe.fuel_capacity,
    );
    for _ in 0..32 {
        let err = wrap_angle(chi_ini - state.ground_bearing());
        if err.abs() < 1e-12 {
            break;
        }
        psi = wrap_angle(psi + err);
        state = initial_state_from_trim(
            pos0,
            psi,
            0.0,
            scenario.vtas_ini(),
            &trim,
            &wind0,
            airframe.fuel_capacity,
        );
    }

    // Sensors, camera, alignment, navigation.
    let (suite, mut streams) = initialize_sensor_errors(&spec, &seeds.module_seeds, T_GNSS);
    let mut cam_sampler = StochasticSampler::from_seed(seeds.module_seeds.cam);
    let rig = CameraRig::draw(&spec, &mut cam_sampler);
    let mut align_sampler = StochasticSampler::from_seed(seeds.module_seeds.align);
    let nav_init = fine_alignment(&state, &suite, &spec, &mut align_sampler);
    let registry = NavRegistry::with_builtins();
    let mut nav = registry
        .create(&cfg.nav_impl)
        .map_err(|e| fail(0.0, e.to_string()))?;
    nav.initialize(&nav_init);

    let mut controller = Controller::new(&ControlConfig::default(), &trim);
    let mut tracker: Option<MissionTracker> = None;
    let mut controls = ControlInputs {
        throttle: trim.throttle,
        elevator: trim.elevator,
        aileron: 0.0,
        rudder: 0.0,
    };

    // Turbulence.
    let dryden_cfg = cfg.dryden();
    let mut turb_sampler = StochasticSampler::from_seed(seeds.module_seeds.turb);
    let mut dryden = DrydenFilter::new();
    let mut gust_body = Vector3::zeros();
    let mut vtas_hold = scenario.vtas_ini();

    let mut traces = Traces::open(cfg, run_index, &config_hash)?;
    let mut stats = [RunningStats::default(); TRACKED_VARIABLES.len()];
    let mut series: Vec<Vec<f64>> = if cfg.keep_series {
        vec![Vec::new(); TRACKED_VARIABLES.len()]
    } else {
        Vec::new()
    };
    let mut counts = EpochCounts::default();
    let mut flight_log = Vec::new();
    let mut total_distance = 0.0f64;
    let mut max_range = 0.0f64;

    let n_truth = (scenario.t_end() / TRUTH_DT).round() as u64;
    for i in 0..=n_truth {
        let t = i as f64 * TRUTH_DT;
        if i > 0 {
            // advance truth across [t - dt, t] with frozen controls and
            // environment sampled at the substep start
            let t_prev = t - TRUTH_DT;
            let agl = state.pos.alt - zone.ground_altitude;
            gust_body = dryden.step(&dryden_cfg, TRUTH_DT, vtas_hold, agl, &mut turb_sampler);
            let env = LocalEnvironment {
                wind_ned: wind_profile.wind_ned(t_prev) + state.att * gust_body,
                delta_t: scenario.delta_t(t_prev),
                delta_p: scenario.delta_p(t_prev),
                gravity_bias_ned: geo.gravity_bias_ned,
            };
            let vh = state.vel_ned();
            total_distance += (vh.x * vh.x + vh.y * vh.y).sqrt() * TRUTH_DT;
            let (next, _d) = rk4_step(cfg.integrator, &state, TRUTH_DT, &controls, &airframe, &env)
                .map_err(|e| fail(t, e.to_string()))?;
            state = next;
            if !state.is_finite() || state.pos.alt < -1500.0 || state.pos.alt > 25_000.0 {
                return Err(fail(t, "truth state diverged".to_string()));
            }
        }
        if let Some(w) = &mut traces.truth {
            let hp = pressure_altitude_from_geopotential(
                geopotential_from_geodetic(state.pos.alt),
                scenario.delta_t(t),
                scenario.delta_p(t),
            );
            let v_air = state.vel_ned() - wind_profile.wind_ned(t) - state.att * gust_body;
            w.line(&truth_line(&state, hp, v_air.norm()));
        }
        counts.truth += 1;

        if i % EST_EVERY != 0 {
            continue;
        }
        // ---- 100 Hz sensing ----
        let env_now = LocalEnvironment {
            wind_ned: wind_profile.wind_ned(t) + state.att * gust_body,
            delta_t: scenario.delta_t(t),
            delta_p: scenario.delta_p(t),
            gravity_bias_ned: geo.gravity_bias_ned,
        };
        let d = state_derivative(&state, &controls, &airframe, &env_now)
            .map_err(|e| fail(t, e.to_string()))?;
        vtas_hold = d.air.vtas;
        let hp_truth = pressure_altitude_from_geopotential(
            geopotential_from_geodetic(state.pos.alt),
            env_now.delta_t,
            env_now.delta_p,
        );
        let truth_obs = EstimatedState {
            t,
            pos: state.pos,
            vel_ned: state.vel_ned(),
            att: state.att,
            hp: hp_truth,
            vtas: d.air.vtas,
            alpha: d.air.alpha,
            beta: d.air.beta,
        };

        let (f_meas, w_meas) = sense_imu(
            &suite,
            &mut streams,
            &d.specific_force_body,
            &state.omega_ib_body,
            &d.omega_ib_dot,
            EST_DT,
        );
        let field_body =
            state.att.inverse() * (magnetic_field_ned(&state.pos) + geo.magnetic_bias_ned);
        let b_meas = sense_magnetometer(&suite, &mut streams, &field_body);
        let (p_meas, t_meas, vtas_meas, alpha_meas, beta_meas) = sense_airdata(
            &suite,
            &mut streams,
            d.atmosphere.pressure,
            d.atmosphere.temperature,
            d.air.vtas,
            d.air.alpha,
            d.air.beta,
        );
        let gnss = if i % GNSS_EVERY == 0 {
            let fix = sense_gnss(&suite, &mut streams, t, &state.pos, &state.vel_ned(), 1.0);
            if fix.is_some() {
                counts.gnss_fixes += 1;
            }
            fix
        } else {
            None
        };
        let sensed = SensedRecord {
            t,
            specific_force: f_meas,
            angular_rate: w_meas,
            magnetic_field: b_meas,
            gnss,
            pressure: p_meas,
            temperature: t_meas,
            vtas: vtas_meas,
            alpha: alpha_meas,
            beta: beta_meas,
        };
        if let Some(w) = &mut traces.sensed {
            w.line(&sensed_line(&sensed));
        }

        // ---- 100 Hz navigation ----
        nav.observe_truth(&truth_obs);
        let est = nav
            .step(&sensed, EST_DT)
            .map_err(|e| fail(t, e.to_string()))?;
        if let Some(w) = &mut traces.estimated {
            w.line(&estimated_line(&est));
        }
        let est_epoch = counts.estimated;
        counts.estimated += 1;

        let (dn, de) = horizontal_offset_m(&state.pos, &est.pos);
        let errors = [
            dn,
            de,
            -(est.pos.alt - state.pos.alt),
            est.hp - truth_obs.hp,
            est.vtas - truth_obs.vtas,
            wrap_angle(est.ground_bearing() - truth_obs.ground_bearing()),
            wrap_angle(est.control_feedback().theta - truth_obs.control_feedback().theta),
            wrap_angle(est.control_feedback().phi - truth_obs.control_feedback().phi),
        ];
        for (acc, v) in stats.iter_mut().zip(errors) {
            acc.push(v);
        }
        if cfg.keep_series && est_epoch % cfg.series_stride as u64 == 0 {
            for (s, v) in series.iter_mut().zip(errors) {
                s.push(v);
            }
        }
        let (rn, re) = horizontal_offset_m(&pos0, &state.pos);
        max_range = max_range.max((rn * rn + re * re).sqrt());

        // ---- 50 Hz guidance and control ----
        if i % CTRL_EVERY == 0 {
            let gs = est.guidance_state();
            let tracker = tracker.get_or_insert_with(|| MissionTracker::new(plan.clone(), &gs));
            let target = tracker.step(&gs);
            controls = controller.step(&target, &est.control_feedback(), CTRL_DT);
            if let Some(w) = &mut traces.controls {
                w.line(&format!(
                    "{} {} {} {} {} {}",
                    fmt_f(t),
                    tracker.active_index(),
                    fmt_f(controls.throttle),
                    fmt_f(controls.elevator),
                    fmt_f(controls.aileron),
                    fmt_f(controls.rudder),
                ));
            }
            counts.control += 1;
            if i % GNSS_EVERY == 0 {
                flight_log.push(FlightLogEntry {
                    t,
                    target_index: tracker.active_index(),
                    vtas: truth_obs.vtas,
                    hp: truth_obs.hp,
                    chi: truth_obs.ground_bearing(),
                    vtas_cmd: target.vtas,
                });
            }
        }

        // ---- 10 Hz camera ----
        if i % CAM_EVERY == 0 {
            let pose = camera_pose(&state, &rig);
            if let Some(w) = &mut traces.camera {
                w.line(&format!(
                    "{} {} {} {} {} {} {}",
                    fmt_f(pose.t),
                    fmt_f(pose.pos.lon),
                    fmt_f(pose.pos.lat),
                    fmt_f(pose.pos.alt),
                    fmt_f(pose.yaw),
                    fmt_f(pose.pitch),
                    fmt_f(pose.roll),
                ));
            }
            counts.camera += 1;
        }
    }

    let variables = TRACKED_VARIABLES
        .iter()
        .enumerate()
        .map(|(k, (name, angular))| VariableResult {
            name,
            angular: *angular,
            metrics: stats[k].finish().expect("nonempty run"),
            final_error: stats[k].last(),
            series: if cfg.keep_series {
                Some(std::mem::take(&mut series[k]))
            } else {
                None
            },
        })
        .collect();

    Ok(RunResult {
        run_index,
        seeds: *seeds,
        config_hash,
        scenario,
        counts,
        digests: traces.finish(),
        variables,
        total_distance_m: total_distance,
        max_range_m: max_range,
        flight_log,
    })
}
