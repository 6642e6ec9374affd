//! Guidance: an ordered pipeline of control targets, each holding one
//! setpoint per control channel plus a trigger. The trigger is a signed
//! expression evaluated on the estimated trajectory at 50 Hz; when its sign
//! switches, the next target becomes active. A plan that runs out of targets
//! holds the last one.

use crate::earth::geodesy::wrap_angle;

/// Elevator-channel setpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElevatorTarget {
    /// Hold a pressure altitude [m].
    PressureAltitude(f64),
    /// Hold an airspeed path angle [rad] (climb/descent segments).
    PathAngle(f64),
    /// Hold a body pitch angle [rad].
    Pitch(f64),
}

/// Aileron-channel setpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AileronTarget {
    /// Track a ground bearing [rad] through the bank cascade.
    Bearing(f64),
    /// Hold a bank angle [rad] (turn segments); the bearing-capture trigger
    /// decides when to revert to bearing tracking.
    Bank(f64),
}

/// Condition that ends the active target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trigger {
    /// Fires at an absolute simulation time [s].
    AbsoluteTime(f64),
    /// Fires a fixed interval after the target became active [s].
    ElapsedTime(f64),
    /// Fires when the estimated ground bearing crosses a value [rad].
    BearingCapture(f64),
    /// Fires when the estimated pressure altitude crosses a value [m].
    AltitudeCapture(f64),
}

/// One guidance record: four setpoints and a trigger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceTarget {
    /// Airspeed setpoint for the throttle channel [m/s].
    pub vtas: f64,
    pub elevator: ElevatorTarget,
    pub aileron: AileronTarget,
    /// Sideslip setpoint for the rudder channel [rad].
    pub beta: f64,
    pub trigger: Trigger,
}

/// Ordered list of guidance targets.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionPlan {
    pub targets: Vec<GuidanceTarget>,
}

/// Estimated quantities the guidance layer consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceState {
    pub t: f64,
    /// Estimated ground bearing [rad].
    pub chi: f64,
    /// Estimated pressure altitude [m].
    pub hp: f64,
}

/// Signed trigger value; the sign switch relative to activation fires it.
pub fn evaluate_trigger(trigger: &Trigger, gs: &GuidanceState, activated_at: f64) -> f64 {
    match *trigger {
        Trigger::AbsoluteTime(t0) => gs.t - t0,
        Trigger::ElapsedTime(interval) => gs.t - activated_at - interval,
        Trigger::BearingCapture(chi_t) => wrap_angle(gs.chi - chi_t),
        Trigger::AltitudeCapture(hp_t) => gs.hp - hp_t,
    }
}

/// Walks a mission plan, advancing on trigger sign switches. The active
/// index never decreases; the last target is held once the plan is
/// exhausted.
#[derive(Debug, Clone)]
pub struct MissionTracker {
    plan: MissionPlan,
    index: usize,
    activated_at: f64,
    initial_sign: f64,
}

impl MissionTracker {
    pub fn new(plan: MissionPlan, gs0: &GuidanceState) -> Self {
        assert!(!plan.targets.is_empty(), "mission plan must be non-empty");
        let sign = evaluate_trigger(&plan.targets[0].trigger, gs0, gs0.t);
        Self {
            plan,
            index: 0,
            activated_at: gs0.t,
            initial_sign: if sign < 0.0 { -1.0 } else { 1.0 },
        }
    }

    pub fn active_index(&self) -> usize {
        self.index
    }

    /// Evaluate the active trigger at a 50 Hz epoch and return the target to
    /// control against.
    pub fn step(&mut self, gs: &GuidanceState) -> GuidanceTarget {
        let value = evaluate_trigger(&self.plan.targets[self.index].trigger, gs, self.activated_at);
        let sign = if value < 0.0 { -1.0 } else { 1.0 };
        if sign != self.initial_sign && self.index + 1 < self.plan.targets.len() {
            self.index += 1;
            self.activated_at = gs.t;
            let v = evaluate_trigger(&self.plan.targets[self.index].trigger, gs, self.activated_at);
            self.initial_sign = if v < 0.0 { -1.0 } else { 1.0 };
        }
        self.plan.targets[self.index]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hold(trigger: Trigger) -> GuidanceTarget {
        GuidanceTarget {
            vtas: 29.0,
            elevator: ElevatorTarget::PressureAltitude(2700.0),
            aileron: AileronTarget::Bearing(0.5),
            beta: 0.0,
            trigger,
        }
    }

    fn gs(t: f64, chi: f64, hp: f64) -> GuidanceState {
        GuidanceState { t, chi, hp }
    }

    #[test]
    fn absolute_time_trigger_sign_flip() {
        let trig = Trigger::AbsoluteTime(130.0);
        assert!(evaluate_trigger(&trig, &gs(129.9, 0.0, 0.0), 0.0) < 0.0);
        assert!(evaluate_trigger(&trig, &gs(130.1, 0.0, 0.0), 0.0) > 0.0);
    }

    #[test]
    fn elapsed_time_counts_from_activation() {
        let trig = Trigger::ElapsedTime(500.0);
        assert!(evaluate_trigger(&trig, &gs(600.0, 0.0, 0.0), 200.0) < 0.0);
        assert!(evaluate_trigger(&trig, &gs(701.0, 0.0, 0.0), 200.0) > 0.0);
    }

    #[test]
    fn bearing_capture_wraps() {
        let trig = Trigger::BearingCapture(3.1);
        // approaching +179 deg from the -179 deg side: difference wraps
        let v = evaluate_trigger(&trig, &gs(0.0, -3.1, 0.0), 0.0);
        assert!(v.abs() < 0.1, "wrapped value {v}");
    }

    #[test]
    fn tracker_advances_on_sign_switch_and_holds_last() {
        let plan = MissionPlan {
            targets: vec![
                hold(Trigger::AbsoluteTime(100.0)),
                hold(Trigger::AltitudeCapture(2800.0)),
                hold(Trigger::AbsoluteTime(400.0)),
            ],
        };
        let mut tr = MissionTracker::new(plan, &gs(0.0, 0.0, 2700.0));
        tr.step(&gs(50.0, 0.0, 2700.0));
        assert_eq!(tr.active_index(), 0);
        tr.step(&gs(100.02, 0.0, 2700.0));
        assert_eq!(tr.active_index(), 1);
        // climbing through the altitude
        tr.step(&gs(150.0, 0.0, 2750.0));
        assert_eq!(tr.active_index(), 1);
        tr.step(&gs(200.0, 0.0, 2800.5));
        assert_eq!(tr.active_index(), 2);
        // plan exhausted: index sticks even after the last trigger fires
        tr.step(&gs(500.0, 0.0, 2800.0));
        tr.step(&gs(600.0, 0.0, 2800.0));
        assert_eq!(tr.active_index(), 2);
    }

    #[test]
    fn tracker_index_nondecreasing() {
        let plan = MissionPlan {
            targets: vec![
                hold(Trigger::BearingCapture(1.0)),
                hold(Trigger::AbsoluteTime(1.0e9)),
            ],
        };
        let mut tr = MissionTracker::new(plan, &gs(0.0, 0.5, 2700.0));
        let mut last = 0;
        for k in 0..100 {
            // bearing oscillates through the capture value
            let chi = 1.0 + 0.3 * (k as f64 * 0.7).sin();
            tr.step(&gs(k as f64, chi, 2700.0));
            assert!(tr.active_index() >= last);
            last = tr.active_index();
        }
        assert_eq!(last, 1);
    }
}
