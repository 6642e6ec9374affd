//! Low-frequency wind field and Dryden turbulence.
//!
//! The wind field is a piecewise-linear ramp in speed and bearing between
//! initial and final values, constant outside the ramp window, with zero
//! vertical component. Turbulence uses the Dryden spectral model in its
//! low/medium-altitude military-specification form, realized as seeded
//! white noise through shaping filters at the truth rate.

use crate::seedtree::StochasticSampler;
use nalgebra::Vector3;

use super::geodesy::wrap_deg;

/// Low-frequency horizontal wind profile: linear ramps of speed and bearing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindProfile {
    /// Ramp start time [s].
    pub t_ini: f64,
    /// Ramp end time [s].
    pub t_end: f64,
    /// Speed before the ramp [m/s].
    pub speed_ini: f64,
    /// Speed after the ramp [m/s].
    pub speed_end: f64,
    /// Bearing of the wind velocity vector before the ramp [deg].
    pub bearing_ini_deg: f64,
    /// Bearing after the ramp [deg].
    pub bearing_end_deg: f64,
}

impl WindProfile {
    /// Constant wind (scenario #2 style).
    pub fn constant(speed: f64, bearing_deg: f64) -> Self {
        Self {
            t_ini: 0.0,
            t_end: 0.0,
            speed_ini: speed,
            speed_end: speed,
            bearing_ini_deg: bearing_deg,
            bearing_end_deg: bearing_deg,
        }
    }

    fn fraction(&self, t: f64) -> f64 {
        if t <= self.t_ini || self.t_end <= self.t_ini {
            0.0
        } else if t >= self.t_end {
            1.0
        } else {
            (t - self.t_ini) / (self.t_end - self.t_ini)
        }
    }

    /// Interpolated wind speed [m/s].
    pub fn speed(&self, t: f64) -> f64 {
        let f = self.fraction(t);
        self.speed_ini + f * (self.speed_end - self.speed_ini)
    }

    /// Interpolated wind bearing [deg], shortest-path wrap.
    pub fn bearing_deg(&self, t: f64) -> f64 {
        let f = self.fraction(t);
        let d = wrap_deg(self.bearing_end_deg - self.bearing_ini_deg);
        wrap_deg(self.bearing_ini_deg + f * d)
    }

    /// Low-frequency wind velocity in NED [m/s]; vertical component is zero.
    pub fn wind_ned(&self, t: f64) -> Vector3<f64> {
        let s = self.speed(t);
        let chi = self.bearing_deg(t).to_radians();
        Vector3::new(s * chi.cos(), s * chi.sin(), 0.0)
    }
}

/// Dryden turbulence configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrydenConfig {
    /// Severity knob: wind speed at 20 ft [m/s]. Zero disables turbulence
    /// (sigma_w = 0.1 * w20 per the low-altitude specification form).
    pub w20: f64,
}

impl DrydenConfig {
    pub fn off() -> Self {
        Self { w20: 0.0 }
    }

    pub fn light() -> Self {
        Self { w20: 7.72 }
    }

    /// Intensities (sigma_u, sigma_v, sigma_w) [m/s] at altitude-above-ground [m].
    pub fn intensities(&self, agl: f64) -> (f64, f64, f64) {
        let h_ft = (agl / 0.3048).clamp(10.0, 1000.0);
        let sigma_w = 0.1 * self.w20;
        let sigma_uv = sigma_w / (0.177 + 0.000_823 * h_ft).powf(0.4);
        (sigma_uv, sigma_uv, sigma_w)
    }

    /// Scale lengths (L_u, L_v, L_w) [m] at altitude-above-ground [m].
    pub fn scale_lengths(&self, agl: f64) -> (f64, f64, f64) {
        let h_ft = (agl / 0.3048).clamp(10.0, 1000.0);
        let l_w_ft = h_ft;
        let l_uv_ft = h_ft / (0.177 + 0.000_823 * h_ft).powf(1.2);
        (l_uv_ft * 0.3048, l_uv_ft * 0.3048, l_w_ft * 0.3048)
    }
}

/// Internal states of the three Dryden shaping filters.
///
/// The longitudinal channel is first order (exact discretization, stationary
/// variance sigma_u^2); the lateral and vertical channels are the second-order
/// forms with the sqrt(3) numerator zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrydenFilter {
    u: f64,
    v: [f64; 2],
    w: [f64; 2],
}

impl DrydenFilter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advance one truth step and return the gust velocity perturbation
    /// (u, v, w) in the body-adjacent frame [m/s].
    pub fn step(
        &mut self,
        cfg: &DrydenConfig,
        dt: f64,
        airspeed: f64,
        agl: f64,
        sampler: &mut StochasticSampler,
    ) -> Vector3<f64> {
        // The driving white-noise sequence is consumed unconditionally so the
        // TURB stream stays aligned whether or not turbulence is enabled.
        let eta_u = sampler.sample_normal(0.0, 1.0);
        let eta_v = sampler.sample_normal(0.0, 1.0);
        let eta_w = sampler.sample_normal(0.0, 1.0);
        if cfg.w20 <= 0.0 {
            return Vector3::zeros();
        }
        let v_air = airspeed.max(1.0);
        let (su, sv, sw) = cfg.intensities(agl);
        let (lu, lv, lw) = cfg.scale_lengths(agl);

        // First-order Gauss-Markov, exact discrete transition.
        let a = (-dt * v_air / lu).exp();
        self.u = a * self.u + su * (1.0 - a * a).sqrt() * eta_u;

        let out_v = Self::second_order(&mut self.v, dt, v_air / lv, sv, eta_v);
        let out_w = Self::second_order(&mut self.w, dt, v_air / lw, sw, eta_w);
        Vector3::new(self.u, out_v, out_w)
    }

    /// Euler-Maruyama step of the second-order shaping filter
    /// H(s) = sigma sqrt(L/(pi V)) (1 + sqrt(3) L/V s) / (1 + L/V s)^2.
    /// Noise gain sqrt(pi) makes the stationary output variance sigma^2.
    fn second_order(state: &mut [f64; 2], dt: f64, b: f64, sigma: f64, eta: f64) -> f64 {
        let (x1, x2) = (state[0], state[1]);
        state[0] = x1 + dt * x2;
        state[1] = x2 + dt * (-b * b * x1 - 2.0 * b * x2)
            + std::f64::consts::PI.sqrt() * dt.sqrt() * eta;
        sigma * (1.0 / (std::f64::consts::PI * b)).sqrt()
            * (b * b * state[0] + 3.0f64.sqrt() * b * state[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wind_constant_outside_ramp() {
        let p = WindProfile {
            t_ini: 100.0,
            t_end: 400.0,
            speed_ini: 5.0,
            speed_end: 9.0,
            bearing_ini_deg: 30.0,
            bearing_end_deg: 80.0,
        };
        assert_eq!(p.wind_ned(0.0), p.wind_ned(99.9));
        assert_eq!(p.wind_ned(400.0), p.wind_ned(4000.0));
        assert!((p.speed(250.0) - 7.0).abs() < 1e-12);
        assert!((p.bearing_deg(250.0) - 55.0).abs() < 1e-12);
    }

    #[test]
    fn wind_bearing_shortest_wrap() {
        let p = WindProfile {
            t_ini: 0.0,
            t_end: 100.0,
            speed_ini: 5.0,
            speed_end: 5.0,
            bearing_ini_deg: 170.0,
            bearing_end_deg: -170.0,
        };
        assert!((p.bearing_deg(50.0) - 180.0).abs() < 1e-9);
    }

    #[test]
    fn dryden_zero_intensity_is_zero() {
        let cfg = DrydenConfig::off();
        let mut f = DrydenFilter::new();
        let mut s = StochasticSampler::from_seed(1);
        for _ in 0..100 {
            assert_eq!(f.step(&cfg, 0.002, 29.0, 2000.0, &mut s), Vector3::zeros());
        }
    }

    #[test]
    fn dryden_deterministic() {
        let cfg = DrydenConfig::light();
        let mut f1 = DrydenFilter::new();
        let mut f2 = DrydenFilter::new();
        let mut s1 = StochasticSampler::from_seed(4);
        let mut s2 = StochasticSampler::from_seed(4);
        for _ in 0..1000 {
            assert_eq!(
                f1.step(&cfg, 0.002, 29.0, 500.0, &mut s1),
                f2.step(&cfg, 0.002, 29.0, 500.0, &mut s2)
            );
        }
    }

    #[test]
    fn dryden_longitudinal_variance() {
        let cfg = DrydenConfig::light();
        let (su, _, _) = cfg.intensities(500.0);
        let mut f = DrydenFilter::new();
        let mut s = StochasticSampler::from_seed(77);
        let dt = 0.002;
        let n = 1_900_000; // 3800 s at 500 hz
        let mut sum2 = 0.0;
        for _ in 0..n {
            let g = f.step(&cfg, dt, 29.0, 500.0, &mut s);
            sum2 += g.x * g.x;
        }
        let var = sum2 / n as f64;
        assert!(
            (var - su * su).abs() < 0.1 * su * su,
            "var {var} target {}",
            su * su
        );
    }
}
