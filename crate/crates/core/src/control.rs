//! Cascaded PID control at 50 Hz.
//!
//! Channel cascades: pressure altitude (or path angle) -> pitch -> elevator;
//! bearing -> bank -> ailerons; airspeed -> throttle; sideslip -> rudder.
//! Each loop ramps its setpoint, low-pass filters the derivative term, and
//! uses conditional integration for anti-windup. Guidance and control carry
//! no seeds: the whole layer is deterministic.

use crate::airframe::{ControlInputs, TrimSolution};
use crate::earth::geodesy::wrap_angle;
use crate::guidance::{AileronTarget, ElevatorTarget, GuidanceTarget};

/// Gains and limits of one PID loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Derivative low-pass time constant [s].
    pub tau_d: f64,
    /// Setpoint ramp rate [unit/s]; 0 disables ramping.
    pub ramp_rate: f64,
    pub out_min: f64,
    pub out_max: f64,
    /// Wrap the tracking error to (-pi, pi] (angular loops).
    pub angular: bool,
}

/// One PID loop with ramped setpoint, filtered derivative, and anti-windup.
#[derive(Debug, Clone)]
pub struct PidLoop {
    pub cfg: PidConfig,
    /// Constant output offset (trim feedforward).
    pub feedforward: f64,
    integrator: f64,
    d_filtered: f64,
    prev_error: Option<f64>,
    setpoint: Option<f64>,
}

impl PidLoop {
    pub fn new(cfg: PidConfig) -> Self {
        Self {
            cfg,
            feedforward: 0.0,
            integrator: 0.0,
            d_filtered: 0.0,
            prev_error: None,
            setpoint: None,
        }
    }

    /// Current internal (ramped) setpoint, if the loop has run.
    pub fn internal_setpoint(&self) -> Option<f64> {
        self.setpoint
    }

    pub fn step(&mut self, requested: f64, measurement: f64, dt: f64) -> f64 {
        let sp = match self.setpoint {
            None => requested,
            Some(current) if self.cfg.ramp_rate > 0.0 => {
                let delta = if self.cfg.angular {
                    wrap_angle(requested - current)
                } else {
                    requested - current
                };
                let max_step = self.cfg.ramp_rate * dt;
                current + delta.clamp(-max_step, max_step)
            }
            Some(_) => requested,
        };
        self.setpoint = Some(sp);

        let mut error = sp - measurement;
        if self.cfg.angular {
            error = wrap_angle(error);
        }
        let d_raw = match self.prev_error {
            Some(prev) => {
                let de = if self.cfg.angular {
                    wrap_angle(error - prev)
                } else {
                    error - prev
                };
                de / dt
            }
            None => 0.0,
        };
        self.prev_error = Some(error);
        let alpha = dt / (self.cfg.tau_d + dt);
        self.d_filtered += alpha * (d_raw - self.d_filtered);

        let unclamped = self.feedforward
            + self.cfg.kp * error
            + self.cfg.ki * self.integrator
            + self.cfg.kd * self.d_filtered;
        let out = unclamped.clamp(self.cfg.out_min, self.cfg.out_max);
        // Conditional integration: freeze when pushing further into saturation.
        let saturated_high = unclamped > self.cfg.out_max && error * self.cfg.ki > 0.0;
        let saturated_low = unclamped < self.cfg.out_min && error * self.cfg.ki < 0.0;
        if !(saturated_high || saturated_low) {
            self.integrator += error * dt;
        }
        out
    }
}

/// Full controller gain/limit configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlConfig {
    pub throttle: PidConfig,
    /// Outer loop: pressure altitude error -> commanded path angle.
    pub altitude: PidConfig,
    /// Inner loop: pitch error -> elevator.
    pub pitch: PidConfig,
    /// Outer loop: bearing error -> commanded bank.
    pub bearing: PidConfig,
    /// Inner loop: bank error -> aileron.
    pub bank: PidConfig,
    pub sideslip: PidConfig,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            throttle: PidConfig {
                kp: 0.25,
                ki: 0.06,
                kd: 0.0,
                tau_d: 0.1,
                ramp_rate: 0.5,
                out_min: 0.0,
                out_max: 1.0,
                angular: false,
            },
            altitude: PidConfig {
                kp: 0.012,
                ki: 0.0008,
                kd: 0.02,
                tau_d: 0.2,
                ramp_rate: 0.0,
                out_min: -0.15,
                out_max: 0.15,
                angular: false,
            },
            pitch: PidConfig {
                kp: -2.0,
                ki: -1.0,
                kd: -0.25,
                tau_d: 0.05,
                ramp_rate: 0.0,
                out_min: -0.35,
                out_max: 0.35,
                angular: true,
            },
            bearing: PidConfig {
                kp: 1.2,
                ki: 0.0,
                kd: 0.0,
                tau_d: 0.1,
                ramp_rate: 0.0,
                out_min: -0.35,
                out_max: 0.35,
                angular: true,
            },
            bank: PidConfig {
                kp: 0.6,
                ki: 0.25,
                kd: 0.06,
                tau_d: 0.05,
                ramp_rate: 0.0,
                out_min: -0.35,
                out_max: 0.35,
                angular: true,
            },
            sideslip: PidConfig {
                kp: 1.5,
                ki: 0.5,
                kd: 0.1,
                tau_d: 0.05,
                ramp_rate: 0.0,
                out_min: -0.35,
                out_max: 0.35,
                angular: true,
            },
        }
    }
}

/// Estimated quantities the control layer consumes at each 50 Hz epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlFeedback {
    pub t: f64,
    /// Estimated true airspeed [m/s].
    pub vtas: f64,
    /// Estimated pressure altitude [m].
    pub hp: f64,
    /// Estimated body pitch [rad].
    pub theta: f64,
    /// Estimated angle of attack [rad].
    pub alpha: f64,
    /// Estimated bank angle [rad].
    pub phi: f64,
    /// Estimated ground bearing [rad].
    pub chi: f64,
    /// Estimated sideslip [rad].
    pub beta: f64,
}

/// The four cascaded channels.
#[derive(Debug, Clone)]
pub struct Controller {
    pub throttle: PidLoop,
    pub altitude: PidLoop,
    pub pitch: PidLoop,
    pub bearing: PidLoop,
    pub bank: PidLoop,
    pub sideslip: PidLoop,
    /// Low-pass time constant [s] for the angle-of-attack term that turns the
    /// path-angle command into a pitch command. Unfiltered alpha feeds back
    /// into the elevator with a destabilizing sign at the short-period
    /// frequency; filtering keeps the path-angle tracking at low frequency
    /// while leaving the fast mode to the airframe's own damping.
    pub alpha_tau: f64,
    alpha_lp: Option<f64>,
}

impl Controller {
    /// Build a controller with trim feedforward on the throttle and elevator
    /// channels so a perfectly trimmed aircraft sees unchanged inputs.
    pub fn new(cfg: &ControlConfig, trim: &TrimSolution) -> Self {
        let mut throttle = PidLoop::new(cfg.throttle);
        throttle.feedforward = trim.throttle;
        let mut pitch = PidLoop::new(cfg.pitch);
        pitch.feedforward = trim.elevator;
        Self {
            throttle,
            altitude: PidLoop::new(cfg.altitude),
            pitch,
            bearing: PidLoop::new(cfg.bearing),
            bank: PidLoop::new(cfg.bank),
            sideslip: PidLoop::new(cfg.sideslip),
            alpha_tau: 1.0,
            alpha_lp: None,
        }
    }

    pub fn step(&mut self, target: &GuidanceTarget, fb: &ControlFeedback, dt: f64) -> ControlInputs {
        let throttle = self.throttle.step(target.vtas, fb.vtas, dt);

        let alpha_lp = match self.alpha_lp {
            None => fb.alpha,
            Some(prev) => prev + dt / (self.alpha_tau + dt) * (fb.alpha - prev),
        };
        self.alpha_lp = Some(alpha_lp);

        let gamma_cmd = match target.elevator {
            ElevatorTarget::PressureAltitude(hp_t) => self.altitude.step(hp_t, fb.hp, dt),
            ElevatorTarget::PathAngle(gamma) => gamma,
            ElevatorTarget::Pitch(theta_t) => theta_t - alpha_lp,
        };
        let elevator = self.pitch.step(gamma_cmd + alpha_lp, fb.theta, dt);

        let phi_cmd = match target.aileron {
            AileronTarget::Bearing(chi_t) => self.bearing.step(chi_t, fb.chi, dt),
            AileronTarget::Bank(xi) => xi,
        };
        let aileron = self.bank.step(phi_cmd, fb.phi, dt);

        let rudder = self.sideslip.step(target.beta, fb.beta, dt);

        ControlInputs {
            throttle,
            elevator,
            aileron,
            rudder,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::Trigger;

    fn trim() -> TrimSolution {
        TrimSolution {
            alpha: 0.07,
            elevator: -0.06,
            throttle: 0.32,
            shaft_speed: 80.0,
            residual: 0.0,
        }
    }

    fn hold_target() -> GuidanceTarget {
        GuidanceTarget {
            vtas: 29.0,
            elevator: ElevatorTarget::PressureAltitude(2700.0),
            aileron: AileronTarget::Bearing(0.4),
            beta: 0.0,
            trigger: Trigger::AbsoluteTime(3800.0),
        }
    }

    fn on_target_feedback() -> ControlFeedback {
        ControlFeedback {
            t: 0.0,
            vtas: 29.0,
            hp: 2700.0,
            theta: 0.07,
            alpha: 0.07,
            phi: 0.0,
            chi: 0.4,
            beta: 0.0,
        }
    }

    #[test]
    fn zero_error_outputs_trim() {
        let mut c = Controller::new(&ControlConfig::default(), &trim());
        let out = c.step(&hold_target(), &on_target_feedback(), 0.02);
        assert!((out.throttle - 0.32).abs() < 1e-12);
        assert!((out.elevator - (-0.06)).abs() < 1e-12);
        assert!(out.aileron.abs() < 1e-12);
        assert!(out.rudder.abs() < 1e-12);
    }

    #[test]
    fn ramp_slope_is_exact() {
        let cfg = PidConfig {
            kp: 1.0,
            ki: 0.0,
            kd: 0.0,
            tau_d: 0.1,
            ramp_rate: 0.5,
            out_min: -10.0,
            out_max: 10.0,
            angular: false,
        };
        let mut pid = PidLoop::new(cfg);
        pid.step(29.0, 29.0, 0.02); // initializes the internal setpoint
        for k in 1..=50 {
            pid.step(34.0, 29.0, 0.02);
            let sp = pid.internal_setpoint().unwrap();
            let expect = 29.0 + 0.5 * 0.02 * k as f64;
            assert!((sp - expect).abs() < 1e-12, "step {k}: {sp} vs {expect}");
        }
    }

    #[test]
    fn outputs_always_within_limits() {
        let mut c = Controller::new(&ControlConfig::default(), &trim());
        let mut fb = on_target_feedback();
        fb.vtas = 5.0;
        fb.hp = 4000.0;
        fb.theta = -0.5;
        fb.phi = 1.0;
        fb.chi = -2.0;
        fb.beta = 0.4;
        for _ in 0..2000 {
            let out = c.step(&hold_target(), &fb, 0.02);
            assert!((0.0..=1.0).contains(&out.throttle));
            assert!(out.elevator.abs() <= 0.35);
            assert!(out.aileron.abs() <= 0.35);
            assert!(out.rudder.abs() <= 0.35);
        }
    }

    #[test]
    fn antiwindup_recovers_quickly() {
        // Saturate the throttle loop for a long time, then remove the error;
        // with conditional integration the output must unwind immediately.
        let mut c = Controller::new(&ControlConfig::default(), &trim());
        let mut fb = on_target_feedback();
        fb.vtas = 10.0;
        for _ in 0..10_000 {
            c.step(&hold_target(), &fb, 0.02);
        }
        fb.vtas = 29.0;
        let mut out = ControlInputs::default();
        for _ in 0..100 {
            out = c.step(&hold_target(), &fb, 0.02);
        }
        assert!(out.throttle < 0.99, "integrator wound up: {}", out.throttle);
    }

    use crate::airframe::AirframeModel;
    use crate::earth::geodesy::GeodeticPosition;
    use crate::earth::{geopotential_from_geodetic, insa_state};
    use crate::flight::{initial_state_from_trim, rk4_step, IntegratorKind, LocalEnvironment};
    use nalgebra::Vector3;

    /// Closed loop on the real airframe: truth at 500 Hz, control at 50 Hz,
    /// ideal feedback from truth. Returns the trajectory of (t, vtas, hp, chi).
    fn fly(
        target_fn: impl Fn(f64) -> GuidanceTarget,
        duration: f64,
    ) -> Vec<(f64, f64, f64, f64)> {
        let airframe = AirframeModel::default();
        let atm = insa_state(2700.0, 0.0, 0.0).unwrap();
        let trim = airframe
            .trim(29.0, 0.0, atm.pressure, atm.temperature, airframe.fuel_capacity)
            .unwrap();
        let pos = GeodeticPosition::new(-1.6, 0.6, 2700.0);
        let mut state = initial_state_from_trim(
            pos,
            0.4,
            0.0,
            29.0,
            &trim,
            &Vector3::zeros(),
            airframe.fuel_capacity,
        );
        let mut ctl = Controller::new(&ControlConfig::default(), &trim);
        let env = LocalEnvironment::still_standard();
        let dt = 0.002;
        let mut inputs = ControlInputs {
            throttle: trim.throttle,
            elevator: trim.elevator,
            ..Default::default()
        };
        let n = (duration / dt).round() as usize;
        let mut log = Vec::new();
        for k in 0..=n {
            let d = crate::flight::state_derivative(&state, &inputs, &airframe, &env).unwrap();
            let hp = geopotential_from_geodetic(state.pos.alt);
            if k % 10 == 0 {
                let (roll, pitch, _) = state.euler_angles();
                let fb = ControlFeedback {
                    t: state.t,
                    vtas: d.air.vtas,
                    hp,
                    theta: pitch,
                    alpha: d.air.alpha,
                    phi: roll,
                    chi: state.ground_bearing(),
                    beta: d.air.beta,
                };
                inputs = ctl.step(&target_fn(state.t), &fb, 0.02);
            }
            if k % 50 == 0 {
                log.push((state.t, d.air.vtas, hp, state.ground_bearing()));
            }
            state = rk4_step(IntegratorKind::So3, &state, dt, &inputs, &airframe, &env)
                .unwrap()
                .0;
        }
        log
    }

    fn hp0() -> f64 {
        geopotential_from_geodetic(2700.0)
    }

    #[test]
    fn closed_loop_holds_trim_condition() {
        let hp_t = hp0();
        let log = fly(
            |_| GuidanceTarget {
                vtas: 29.0,
                elevator: ElevatorTarget::PressureAltitude(hp_t),
                aileron: AileronTarget::Bearing(0.4),
                beta: 0.0,
                trigger: Trigger::AbsoluteTime(1.0e9),
            },
            120.0,
        );
        for &(t, v, hp, chi) in log.iter().filter(|r| r.0 > 60.0) {
            assert!((v - 29.0).abs() < 0.5, "t={t} vtas={v}");
            assert!((hp - hp_t).abs() < 5.0, "t={t} hp={hp}");
            assert!(wrap_angle(chi - 0.4).abs() < 0.05, "t={t} chi={chi}");
        }
        let _ = log;
    }

    #[test]
    fn closed_loop_airspeed_step_settles() {
        let hp_t = hp0();
        let log = fly(
            |t| GuidanceTarget {
                vtas: if t < 5.0 { 29.0 } else { 33.0 },
                elevator: ElevatorTarget::PressureAltitude(hp_t),
                aileron: AileronTarget::Bearing(0.4),
                beta: 0.0,
                trigger: Trigger::AbsoluteTime(1.0e9),
            },
            120.0,
        );
        for &(t, v, hp, _) in log.iter().filter(|r| r.0 > 65.0) {
            assert!((v - 33.0).abs() < 0.5, "t={t} vtas={v}");
            assert!((hp - hp_t).abs() < 5.0, "t={t} hp={hp}");
        }
    }

    #[test]
    fn closed_loop_bank_turn_changes_bearing() {
        let hp_t = hp0();
        let log = fly(
            |t| GuidanceTarget {
                vtas: 29.0,
                elevator: ElevatorTarget::PressureAltitude(hp_t),
                aileron: if t < 5.0 {
                    AileronTarget::Bearing(0.4)
                } else {
                    AileronTarget::Bank(10.0f64.to_radians())
                },
                beta: 0.0,
                trigger: Trigger::AbsoluteTime(1.0e9),
            },
            40.0,
        );
        let chi_end = log.last().unwrap().3;
        // standard-rate-ish turn: chi-dot = g tan(10 deg)/v ~ 3.4 deg/s
        let turned = wrap_angle(chi_end - 0.4).to_degrees();
        assert!(turned > 90.0, "turned only {turned} deg");
        for &(t, _, hp, _) in log.iter().filter(|r| r.0 > 30.0) {
            assert!((hp - hp_t).abs() < 5.0, "t={t} hp={hp} during turn");
        }
    }

    #[test]
    fn closed_loop_path_angle_climb() {
        let hp_t = hp0();
        let log = fly(
            |t| GuidanceTarget {
                vtas: 29.0,
                elevator: if t < 5.0 {
                    ElevatorTarget::PressureAltitude(hp_t)
                } else {
                    ElevatorTarget::PathAngle(2.0f64.to_radians())
                },
                aileron: AileronTarget::Bearing(0.4),
                beta: 0.0,
                trigger: Trigger::AbsoluteTime(1.0e9),
            },
            100.0,
        );
        let hp_end = log.last().unwrap().2;
        // 95 s at 29 m/s and 2 deg path angle is about 96 m of climb
        let climbed = hp_end - hp_t;
        assert!(climbed > 60.0 && climbed < 120.0, "climbed {climbed} m");
    }

    #[test]
    fn bank_command_follows_bearing_error_sign() {
        let mut c = Controller::new(&ControlConfig::default(), &trim());
        let mut fb = on_target_feedback();
        fb.chi = 0.0;
        let mut tgt = hold_target();
        tgt.aileron = AileronTarget::Bearing(0.5);
        let out = c.step(&tgt, &fb, 0.02);
        assert!(out.aileron > 0.0, "turn right requires positive aileron");
    }
}
