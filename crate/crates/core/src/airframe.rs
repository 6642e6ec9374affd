//! Aircraft performance model: mass/inertia versus fuel load, aerodynamic
//! force and moment coefficients, engine power and fuel flow, propeller
//! thrust and torque. Everything here is deterministic; no seeds enter.
//!
//! The coefficient set is a documented stand-in stability-derivative model
//! for a 19.7 kg, 2.68 m span high-wing airframe, chosen to trim near
//! 29 m/s at 2700 m and to be statically stable in pitch and laterally.
//! Alternative airframes can be loaded from a key-value definition file.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

use crate::earth::atmosphere::{P0, R_AIR, T0};

#[derive(Debug, Error)]
pub enum AirframeError {
    #[error("aerodynamic angles outside model validity: alpha {alpha} rad, beta {beta} rad")]
    Envelope { alpha: f64, beta: f64 },
    #[error("trim solver did not converge (residual {0})")]
    TrimDiverged(f64),
    #[error("airframe file: {0}")]
    Parse(String),
}

/// Mass, center of gravity, and inertia at a given fuel load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassProperties {
    /// Total mass [kg].
    pub mass: f64,
    /// Center of gravity in the structural frame [m].
    pub cg: Vector3<f64>,
    /// Inertia tensor about the cg, body axes [kg m^2].
    pub inertia: Matrix3<f64>,
}

/// Aerodynamic coefficient set (stability-derivative model) plus geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct AeroModel {
    /// Wing reference area [m^2].
    pub s_ref: f64,
    /// Wing span [m].
    pub span: f64,
    /// Mean aerodynamic chord [m].
    pub chord: f64,

    pub cl0: f64,
    pub cl_alpha: f64,
    pub cl_q: f64,
    pub cl_de: f64,
    pub cd0: f64,
    pub cd_k: f64,
    pub cm0: f64,
    pub cm_alpha: f64,
    pub cm_q: f64,
    pub cm_de: f64,

    pub cy_beta: f64,
    pub cy_dr: f64,
    pub cl_roll_beta: f64,
    pub cl_roll_p: f64,
    pub cl_roll_r: f64,
    pub cl_roll_da: f64,
    pub cl_roll_dr: f64,
    pub cn_beta: f64,
    pub cn_p: f64,
    pub cn_r: f64,
    pub cn_da: f64,
    pub cn_dr: f64,

    /// Validity envelope for alpha and beta [rad].
    pub max_alpha: f64,
    pub max_beta: f64,
}

/// Engine power/fuel maps and propeller coefficient curves.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerplantModel {
    /// Maximum shaft power at sea-level standard conditions [W].
    pub max_power: f64,
    /// Specific fuel consumption [kg/(W s)].
    pub sfc: f64,
    /// Propeller diameter [m].
    pub diameter: f64,
    /// Thrust coefficient quadratic: ct0 + ct1 J + ct2 J^2.
    pub ct: [f64; 3],
    /// Power coefficient cubic: cp0 + cp1 J + cp2 J^2 + cp3 J^3.
    pub cp: [f64; 4],
}

/// Complete airframe definition.
#[derive(Debug, Clone, PartialEq)]
pub struct AirframeModel {
    /// Mass without fuel [kg].
    pub dry_mass: f64,
    /// Fuel capacity [kg].
    pub fuel_capacity: f64,
    /// cg in structural frame at zero fuel [m].
    pub cg_empty: Vector3<f64>,
    /// cg in structural frame at full fuel [m].
    pub cg_full: Vector3<f64>,
    /// Principal inertia (Ixx, Iyy, Izz) and Ixz at zero fuel [kg m^2].
    pub inertia_empty: [f64; 4],
    /// Same at full fuel.
    pub inertia_full: [f64; 4],
    pub aero: AeroModel,
    pub powerplant: PowerplantModel,
    /// Control surface saturation limits [rad] (elevator, aileron, rudder).
    pub surface_limits: [f64; 3],
}

/// Aerodynamic force and moment in body axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub moment: Vector3<f64>,
}

/// Throttle and surface deflections.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlInputs {
    /// Throttle fraction [0, 1].
    pub throttle: f64,
    /// Elevator [rad].
    pub elevator: f64,
    /// Aileron [rad].
    pub aileron: f64,
    /// Rudder [rad].
    pub rudder: f64,
}

impl ControlInputs {
    pub fn saturate(&self, limits: &[f64; 3]) -> Self {
        Self {
            throttle: self.throttle.clamp(0.0, 1.0),
            elevator: self.elevator.clamp(-limits[0], limits[0]),
            aileron: self.aileron.clamp(-limits[1], limits[1]),
            rudder: self.rudder.clamp(-limits[2], limits[2]),
        }
    }
}

impl Default for AirframeModel {
    fn default() -> Self {
        Self {
            dry_mass: 16.715,
            fuel_capacity: 3.0,
            cg_empty: Vector3::new(0.02, 0.0, 0.0),
            cg_full: Vector3::zeros(),
            inertia_empty: [1.45, 1.75, 2.95, 0.09],
            inertia_full: [1.60, 1.90, 3.20, 0.10],
            aero: AeroModel {
                s_ref: 0.75,
                span: 2.68,
                chord: 0.28,
                cl0: 0.28,
                cl_alpha: 5.2,
                cl_q: 7.0,
                cl_de: 0.35,
                cd0: 0.035,
                cd_k: 0.045,
                cm0: 0.06,
                cm_alpha: -1.8,
                cm_q: -16.0,
                cm_de: -1.1,
                cy_beta: -0.80,
                cy_dr: 0.19,
                cl_roll_beta: -0.12,
                cl_roll_p: -0.50,
                cl_roll_r: 0.25,
                cl_roll_da: 0.23,
                cl_roll_dr: 0.0024,
                cn_beta: 0.25,
                cn_p: -0.022,
                cn_r: -0.35,
                cn_da: -0.005,
                cn_dr: -0.12,
                max_alpha: 0.35,
                max_beta: 0.35,
            },
            powerplant: PowerplantModel {
                max_power: 4180.0,
                sfc: 1.1e-7,
                diameter: 0.51,
                ct: [0.110, -0.050, -0.060],
                cp: [0.050, 0.005, 0.0, -0.040],
            },
            surface_limits: [0.35, 0.35, 0.35],
        }
    }
}

impl AirframeModel {
    /// Maximum (full-fuel) mass [kg].
    pub fn max_mass(&self) -> f64 {
        self.dry_mass + self.fuel_capacity
    }

    /// Quasi-static mass properties at a given fuel load [kg].
    pub fn mass_properties(&self, fuel: f64) -> MassProperties {
        let fuel = fuel.clamp(0.0, self.fuel_capacity);
        let f = fuel / self.fuel_capacity;
        let lerp = |a: f64, b: f64| a + f * (b - a);
        let i = [
            lerp(self.inertia_empty[0], self.inertia_full[0]),
            lerp(self.inertia_empty[1], self.inertia_full[1]),
            lerp(self.inertia_empty[2], self.inertia_full[2]),
            lerp(self.inertia_empty[3], self.inertia_full[3]),
        ];
        MassProperties {
            mass: self.dry_mass + fuel,
            cg: self.cg_empty + f * (self.cg_full - self.cg_empty),
            inertia: Matrix3::new(
                i[0], 0.0, -i[3], //
                0.0, i[1], 0.0, //
                -i[3], 0.0, i[2],
            ),
        }
    }

    /// Aerodynamic wrench in body axes about the current cg.
    ///
    /// `rates` are body angular rates (p, q, r) [rad/s], `qbar` the dynamic
    /// pressure [Pa]. Incompressible flow only.
    pub fn aero_wrench(
        &self,
        alpha: f64,
        beta: f64,
        controls: &ControlInputs,
        rates: &Vector3<f64>,
        airspeed: f64,
        qbar: f64,
        mass_props: &MassProperties,
    ) -> Result<Wrench, AirframeError> {
        let a = &self.aero;
        if alpha.abs() > a.max_alpha || beta.abs() > a.max_beta {
            return Err(AirframeError::Envelope { alpha, beta });
        }
        if qbar <= 0.0 {
            return Ok(Wrench {
                force: Vector3::zeros(),
                moment: Vector3::zeros(),
            });
        }
        let v = airspeed.max(1.0);
        let p_hat = rates.x * a.span / (2.0 * v);
        let q_hat = rates.y * a.chord / (2.0 * v);
        let r_hat = rates.z * a.span / (2.0 * v);

        let cl = a.cl0 + a.cl_alpha * alpha + a.cl_q * q_hat + a.cl_de * controls.elevator;
        let cd = a.cd0 + a.cd_k * cl * cl;
        let cy = a.cy_beta * beta + a.cy_dr * controls.rudder;
        let c_roll = a.cl_roll_beta * beta
            + a.cl_roll_p * p_hat
            + a.cl_roll_r * r_hat
            + a.cl_roll_da * controls.aileron
            + a.cl_roll_dr * controls.rudder;
        let c_pitch = a.cm0 + a.cm_alpha * alpha + a.cm_q * q_hat + a.cm_de * controls.elevator;
        let c_yaw = a.cn_beta * beta
            + a.cn_p * p_hat
            + a.cn_r * r_hat
            + a.cn_da * controls.aileron
            + a.cn_dr * controls.rudder;

        // Stability-axes lift/drag rotated into body axes.
        let cx = -cd * alpha.cos() + cl * alpha.sin();
        let cz = -cd * alpha.sin() - cl * alpha.cos();

        let qs = qbar * a.s_ref;
        let force = Vector3::new(qs * cx, qs * cy, qs * cz);
        let moment_ref = Vector3::new(
            qs * a.span * c_roll,
            qs * a.chord * c_pitch,
            qs * a.span * c_yaw,
        );
        // Transfer the moment from the structural reference point to the cg.
        let moment = moment_ref + (-mass_props.cg).cross(&force);
        Ok(Wrench { force, moment })
    }

    /// Shaft power available at a throttle setting and ambient conditions [W].
    pub fn engine_power(&self, throttle: f64, pressure: f64, temperature: f64) -> f64 {
        let sigma = (pressure / P0) * (T0 / temperature);
        self.powerplant.max_power * throttle.clamp(0.0, 1.0) * sigma
    }

    /// Fuel mass flow at a given shaft power [kg/s].
    pub fn fuel_flow(&self, power: f64) -> f64 {
        self.powerplant.sfc * power.max(0.0)
    }

    fn ct(&self, j: f64) -> f64 {
        let c = &self.powerplant.ct;
        c[0] + c[1] * j + c[2] * j * j
    }

    fn cp(&self, j: f64) -> f64 {
        let c = &self.powerplant.cp;
        c[0] + c[1] * j + c[2] * j * j + c[3] * j * j * j
    }

    /// Propeller thrust [N] and shaft torque [N m] at shaft speed n [rev/s].
    pub fn propeller_wrench(&self, n: f64, airspeed: f64, density: f64) -> (f64, f64) {
        if n <= 0.0 {
            return (0.0, 0.0);
        }
        let d = self.powerplant.diameter;
        let j = (airspeed / (n * d)).clamp(0.0, 1.2);
        let thrust = density * n * n * d.powi(4) * self.ct(j).max(0.0);
        let power = density * n * n * n * d.powi(5) * self.cp(j).max(0.0);
        let torque = power / (std::f64::consts::TAU * n);
        (thrust, torque)
    }

    /// Shaft speed [rev/s] at which propeller power absorbs the engine power
    /// (fixed-point of the power balance, Newton iteration).
    pub fn shaft_speed(&self, engine_power: f64, airspeed: f64, density: f64) -> f64 {
        if engine_power <= 0.0 {
            return 0.0;
        }
        let d = self.powerplant.diameter;
        let d5 = d.powi(5);
        let mut n = (engine_power / (density * d5 * 0.04)).cbrt().max(5.0);
        for _ in 0..60 {
            let j = (airspeed / (n * d)).clamp(0.0, 1.2);
            let f = density * n * n * n * d5 * self.cp(j).max(1e-4) - engine_power;
            let dn = n * 1e-6;
            let jp = (airspeed / ((n + dn) * d)).clamp(0.0, 1.2);
            let fp = density * (n + dn).powi(3) * d5 * self.cp(jp).max(1e-4) - engine_power;
            let deriv = (fp - f) / dn;
            let step = f / deriv;
            n -= step;
            if n < 1.0 {
                n = 1.0;
            }
            if step.abs() < 1e-9 * n.max(1.0) {
                break;
            }
        }
        n
    }
}

/// Solution of the longitudinal trim problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimSolution {
    pub alpha: f64,
    pub elevator: f64,
    pub throttle: f64,
    /// Propeller shaft speed [rev/s].
    pub shaft_speed: f64,
    /// Residual force/moment norm [N, N m].
    pub residual: f64,
}

impl AirframeModel {
    /// Solve steady longitudinal trim at a given true airspeed, path angle,
    /// ambient state and fuel load. Newton iteration on (alpha, elevator,
    /// throttle) with a numeric Jacobian.
    pub fn trim(
        &self,
        airspeed: f64,
        gamma: f64,
        pressure: f64,
        temperature: f64,
        fuel: f64,
    ) -> Result<TrimSolution, AirframeError> {
        let density = pressure / (R_AIR * temperature);
        let qbar = 0.5 * density * airspeed * airspeed;
        let mp = self.mass_properties(fuel);
        let weight = mp.mass * 9.80665;

        let residual = |x: &[f64; 3]| -> Result<[f64; 3], AirframeError> {
            let (alpha, de, dt) = (x[0], x[1], x[2].clamp(0.0, 1.0));
            let controls = ControlInputs {
                throttle: dt,
                elevator: de,
                ..Default::default()
            };
            let w = self.aero_wrench(
                alpha,
                0.0,
                &controls,
                &Vector3::zeros(),
                airspeed,
                qbar,
                &mp,
            )?;
            let power = self.engine_power(dt, pressure, temperature);
            let n = self.shaft_speed(power, airspeed, density);
            let (thrust, _) = self.propeller_wrench(n, airspeed, density);
            let theta = alpha + gamma;
            Ok([
                w.force.x + thrust - weight * theta.sin(),
                w.force.z + weight * theta.cos(),
                w.moment.y,
            ])
        };

        let mut x = [0.05, -0.05, 0.2];
        let mut last_norm = f64::INFINITY;
        for _ in 0..100 {
            let f = residual(&x)?;
            last_norm = (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt();
            if last_norm < 1e-9 {
                break;
            }
            // Numeric Jacobian.
            let mut jac = [[0.0; 3]; 3];
            for c in 0..3 {
                let mut xp = x;
                let h = 1e-7;
                xp[c] += h;
                let fp = residual(&xp)?;
                for (r, row) in jac.iter_mut().enumerate() {
                    row[c] = (fp[r] - f[r]) / h;
                }
            }
            let j = Matrix3::from_fn(|r, c| jac[r][c]);
            let step = j
                .lu()
                .solve(&Vector3::new(f[0], f[1], f[2]))
                .ok_or(AirframeError::TrimDiverged(last_norm))?;
            x[0] -= step.x;
            x[1] -= step.y;
            x[2] -= step.z;
            x[2] = x[2].clamp(0.0, 1.0);
        }
        if last_norm > 1e-6 {
            return Err(AirframeError::TrimDiverged(last_norm));
        }
        let power = self.engine_power(x[2], pressure, temperature);
        let n = self.shaft_speed(power, airspeed, density);
        Ok(TrimSolution {
            alpha: x[0],
            elevator: x[1],
            throttle: x[2],
            shaft_speed: n,
            residual: last_norm,
        })
    }
}

// ---------------------------------------------------------------------------
// Airframe definition file (key = value, one per line, '#' comments).
// ---------------------------------------------------------------------------

impl AirframeModel {
    pub fn from_kv(text: &str) -> Result<Self, AirframeError> {
        let mut model = AirframeModel::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| AirframeError::Parse(format!("line {}: missing '='", lineno + 1)))?;
            let key = key.trim();
            let v: f64 = value.trim().parse().map_err(|_| {
                AirframeError::Parse(format!("line {}: bad number '{}'", lineno + 1, value.trim()))
            })?;
            match key {
                "dry_mass" => model.dry_mass = v,
                "fuel_capacity" => model.fuel_capacity = v,
                "s_ref" => model.aero.s_ref = v,
                "span" => model.aero.span = v,
                "chord" => model.aero.chord = v,
                "cl0" => model.aero.cl0 = v,
                "cl_alpha" => model.aero.cl_alpha = v,
                "cl_q" => model.aero.cl_q = v,
                "cl_de" => model.aero.cl_de = v,
                "cd0" => model.aero.cd0 = v,
                "cd_k" => model.aero.cd_k = v,
                "cm0" => model.aero.cm0 = v,
                "cm_alpha" => model.aero.cm_alpha = v,
                "cm_q" => model.aero.cm_q = v,
                "cm_de" => model.aero.cm_de = v,
                "cy_beta" => model.aero.cy_beta = v,
                "cy_dr" => model.aero.cy_dr = v,
                "cl_roll_beta" => model.aero.cl_roll_beta = v,
                "cl_roll_p" => model.aero.cl_roll_p = v,
                "cl_roll_r" => model.aero.cl_roll_r = v,
                "cl_roll_da" => model.aero.cl_roll_da = v,
                "cl_roll_dr" => model.aero.cl_roll_dr = v,
                "cn_beta" => model.aero.cn_beta = v,
                "cn_p" => model.aero.cn_p = v,
                "cn_r" => model.aero.cn_r = v,
                "cn_da" => model.aero.cn_da = v,
                "cn_dr" => model.aero.cn_dr = v,
                "max_power" => model.powerplant.max_power = v,
                "sfc" => model.powerplant.sfc = v,
                "diameter" => model.powerplant.diameter = v,
                _ => {
                    return Err(AirframeError::Parse(format!(
                        "line {}: unknown key '{key}'",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(model)
    }
}
