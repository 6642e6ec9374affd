//! Per-run sensor error instances and the sensing operations.
//!
//! Each seed channel owns one sampler: the fixed per-run terms are drawn
//! first, then the same stream continues at sensor epochs for drift and
//! noise. Changing one module seed therefore changes only that sensor's
//! outputs.

use nalgebra::{Matrix3, UnitQuaternion, Vector3};

use super::spec::{SensorSpec, TriadSpec};
use crate::earth::geodesy::GeodeticPosition;
use crate::seedtree::{ModuleSeeds, StochasticSampler};

/// One inertial triad's realized per-run errors.
#[derive(Debug, Clone, PartialEq)]
pub struct TriadErrors {
    /// Scale-factor / cross-coupling matrix (identity when error-free).
    pub scale_cross: Matrix3<f64>,
    /// Run-to-run constant bias offset.
    pub bias_offset: Vector3<f64>,
    pub drift_density: f64,
    pub noise_std: f64,
}

impl TriadErrors {
    fn draw(spec: &TriadSpec, sampler: &mut StochasticSampler) -> Self {
        let mut m = Matrix3::identity();
        for i in 0..3 {
            m[(i, i)] += sampler.sample_normal(0.0, spec.scale_std);
        }
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    m[(i, j)] += sampler.sample_normal(0.0, spec.cross_std);
                }
            }
        }
        let bias_offset = Vector3::new(
            sampler.sample_normal(0.0, spec.bias_offset_std),
            sampler.sample_normal(0.0, spec.bias_offset_std),
            sampler.sample_normal(0.0, spec.bias_offset_std),
        );
        Self {
            scale_cross: m,
            bias_offset,
            drift_density: spec.drift_density,
            noise_std: spec.noise_std,
        }
    }
}

/// Realized IMU error model: both triads plus platform geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuErrorModel {
    pub acc: TriadErrors,
    pub gyr: TriadErrors,
    /// Accelerometer lever arm from the cg, body axes [m].
    pub lever_arm: Vector3<f64>,
    /// Platform mounting misalignment (body to platform), shared by both triads.
    pub misalignment: UnitQuaternion<f64>,
}

/// Realized magnetometer error model (drift-free).
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetometerErrorModel {
    /// Soft-iron scale/cross-coupling matrix.
    pub soft_iron: Matrix3<f64>,
    /// Hard-iron offset [nT].
    pub hard_iron: Vector3<f64>,
    pub noise_std: f64,
}

/// Realized bias for one air-data channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelErrors {
    pub bias: f64,
    pub noise_std: f64,
}

/// Realized air-data error model: p, T, vtas, alpha, beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirDataErrorModel {
    pub osp: ChannelErrors,
    pub oat: ChannelErrors,
    pub tas: ChannelErrors,
    pub aoa: ChannelErrors,
    pub aos: ChannelErrors,
}

/// Realized GNSS error model.
#[derive(Debug, Clone, PartialEq)]
pub struct GnssErrorModel {
    /// Ionospheric bias offset, NED [m].
    pub iono_bias: Vector3<f64>,
    pub iono_walk_density: f64,
    pub pos_noise_std: f64,
    pub vert_noise_std: f64,
    pub vel_noise_std: f64,
    /// Denial time [s]; measurements at t >= this are lost permanently.
    pub denial_time: f64,
}

/// All realized per-run error models.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSuite {
    pub imu: ImuErrorModel,
    pub mag: MagnetometerErrorModel,
    pub airdata: AirDataErrorModel,
    pub gnss: GnssErrorModel,
}

/// Mutable per-run sensing state: the seed-channel samplers (continuing past
/// the initialization draws) and the drift/random-walk states.
#[derive(Debug, Clone)]
pub struct SensorStreams {
    acc: StochasticSampler,
    gyr: StochasticSampler,
    mag: StochasticSampler,
    osp: StochasticSampler,
    oat: StochasticSampler,
    tas: StochasticSampler,
    aoa: StochasticSampler,
    aos: StochasticSampler,
    gnss: StochasticSampler,
    pub acc_drift: Vector3<f64>,
    pub gyr_drift: Vector3<f64>,
    pub gnss_walk: Vector3<f64>,
}

/// One GNSS fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnssMeasurement {
    pub pos: GeodeticPosition,
    pub vel_ned: Vector3<f64>,
}

/// All sensor outputs at one sensing epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensedRecord {
    pub t: f64,
    /// Measured specific force, body axes [m/s^2].
    pub specific_force: Vector3<f64>,
    /// Measured inertial angular rate, body axes [rad/s].
    pub angular_rate: Vector3<f64>,
    /// Measured magnetic field, body axes [nT].
    pub magnetic_field: Vector3<f64>,
    /// GNSS fix, absent once denied.
    pub gnss: Option<GnssMeasurement>,
    /// Static pressure [Pa].
    pub pressure: f64,
    /// Outside air temperature [K].
    pub temperature: f64,
    /// True airspeed [m/s].
    pub vtas: f64,
    /// Angle of attack [rad].
    pub alpha: f64,
    /// Angle of sideslip [rad].
    pub beta: f64,
}

/// Draw every fixed per-run error term. The returned streams continue the
/// same per-channel sequences at sensor epochs.
pub fn initialize_sensor_errors(
    spec: &SensorSpec,
    seeds: &ModuleSeeds,
    gnss_denial_time: f64,
) -> (SensorSuite, SensorStreams) {
    let mut acc = StochasticSampler::from_seed(seeds.acc);
    let mut gyr = StochasticSampler::from_seed(seeds.gyr);
    let mut mag = StochasticSampler::from_seed(seeds.mag);
    let mut osp = StochasticSampler::from_seed(seeds.osp);
    let mut oat = StochasticSampler::from_seed(seeds.oat);
    let mut tas = StochasticSampler::from_seed(seeds.tas);
    let mut aoa = StochasticSampler::from_seed(seeds.aoa);
    let mut aos = StochasticSampler::from_seed(seeds.aos);
    let mut gnss = StochasticSampler::from_seed(seeds.gnss);
    let mut plat = StochasticSampler::from_seed(seeds.plat);

    let acc_errors = TriadErrors::draw(&spec.acc, &mut acc);
    let gyr_errors = TriadErrors::draw(&spec.gyr, &mut gyr);
    let mis = Vector3::new(
        plat.sample_normal(0.0, spec.imu_misalignment_std),
        plat.sample_normal(0.0, spec.imu_misalignment_std),
        plat.sample_normal(0.0, spec.imu_misalignment_std),
    );

    let mut soft_iron = Matrix3::identity();
    for i in 0..3 {
        soft_iron[(i, i)] += mag.sample_normal(0.0, spec.mag_scale_std);
    }
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                soft_iron[(i, j)] += mag.sample_normal(0.0, spec.mag_cross_std);
            }
        }
    }
    let hard_iron = Vector3::new(
        mag.sample_normal(0.0, spec.mag_hard_iron_std),
        mag.sample_normal(0.0, spec.mag_hard_iron_std),
        mag.sample_normal(0.0, spec.mag_hard_iron_std),
    );

    let channel = |s: &super::spec::ChannelSpec, sampler: &mut StochasticSampler| ChannelErrors {
        bias: sampler.sample_normal(0.0, s.bias_std),
        noise_std: s.noise_std,
    };
    let airdata = AirDataErrorModel {
        osp: channel(&spec.osp, &mut osp),
        oat: channel(&spec.oat, &mut oat),
        tas: channel(&spec.tas, &mut tas),
        aoa: channel(&spec.aoa, &mut aoa),
        aos: channel(&spec.aos, &mut aos),
    };

    let iono_bias = Vector3::new(
        gnss.sample_normal(0.0, spec.gnss_iono_bias_std),
        gnss.sample_normal(0.0, spec.gnss_iono_bias_std),
        gnss.sample_normal(0.0, spec.gnss_iono_bias_std),
    );

    let suite = SensorSuite {
        imu: ImuErrorModel {
            acc: acc_errors,
            gyr: gyr_errors,
            lever_arm: spec.imu_lever_arm,
            misalignment: UnitQuaternion::from_scaled_axis(mis),
        },
        mag: MagnetometerErrorModel {
            soft_iron,
            hard_iron,
            noise_std: spec.mag_noise_std,
        },
        airdata,
        gnss: GnssErrorModel {
            iono_bias,
            iono_walk_density: spec.gnss_iono_walk_density,
            pos_noise_std: spec.gnss_pos_noise_std,
            vert_noise_std: spec.gnss_vert_noise_std,
            vel_noise_std: spec.gnss_vel_noise_std,
            denial_time: gnss_denial_time,
        },
    };
    let streams = SensorStreams {
        acc,
        gyr,
        mag,
        osp,
        oat,
        tas,
        aoa,
        aos,
        gnss,
        acc_drift: Vector3::zeros(),
        gyr_drift: Vector3::zeros(),
        gnss_walk: Vector3::zeros(),
    };
    (suite, streams)
}

fn normal3(sampler: &mut StochasticSampler, std: f64) -> Vector3<f64> {
    Vector3::new(
        sampler.sample_normal(0.0, std),
        sampler.sample_normal(0.0, std),
        sampler.sample_normal(0.0, std),
    )
}

/// Measure specific force and angular rate at one 100 Hz epoch.
///
/// `specific_force_cg` and `omega`/`omega_dot` are the truth values at the
/// cg; the lever arm moves the accelerometer measurement to the IMU location.
pub fn sense_imu(
    suite: &SensorSuite,
    streams: &mut SensorStreams,
    specific_force_cg: &Vector3<f64>,
    omega: &Vector3<f64>,
    omega_dot: &Vector3<f64>,
    dt: f64,
) -> (Vector3<f64>, Vector3<f64>) {
    let imu = &suite.imu;
    let r = &imu.lever_arm;
    let f_imu = specific_force_cg + omega_dot.cross(r) + omega.cross(&omega.cross(r));

    streams.acc_drift += normal3(&mut streams.acc, imu.acc.drift_density * dt.sqrt());
    let acc_noise = normal3(&mut streams.acc, imu.acc.noise_std);
    let f = imu.acc.scale_cross * (imu.misalignment * f_imu)
        + imu.acc.bias_offset
        + streams.acc_drift
        + acc_noise;

    streams.gyr_drift += normal3(&mut streams.gyr, imu.gyr.drift_density * dt.sqrt());
    let gyr_noise = normal3(&mut streams.gyr, imu.gyr.noise_std);
    let w = imu.gyr.scale_cross * (imu.misalignment * omega)
        + imu.gyr.bias_offset
        + streams.gyr_drift
        + gyr_noise;
    (f, w)
}

/// Measure the magnetic field at one 100 Hz epoch.
pub fn sense_magnetometer(
    suite: &SensorSuite,
    streams: &mut SensorStreams,
    field_body: &Vector3<f64>,
) -> Vector3<f64> {
    let noise = normal3(&mut streams.mag, suite.mag.noise_std);
    suite.mag.soft_iron * field_body + suite.mag.hard_iron + noise
}

/// Measure the five air-data channels at one 100 Hz epoch.
/// Returns (pressure, temperature, vtas, alpha, beta).
pub fn sense_airdata(
    suite: &SensorSuite,
    streams: &mut SensorStreams,
    pressure: f64,
    temperature: f64,
    vtas: f64,
    alpha: f64,
    beta: f64,
) -> (f64, f64, f64, f64, f64) {
    let a = &suite.airdata;
    let one = |truth: f64, ch: &ChannelErrors, s: &mut StochasticSampler| {
        truth + ch.bias + s.sample_normal(0.0, ch.noise_std)
    };
    (
        one(pressure, &a.osp, &mut streams.osp),
        one(temperature, &a.oat, &mut streams.oat),
        one(vtas, &a.tas, &mut streams.tas),
        one(alpha, &a.aoa, &mut streams.aoa),
        one(beta, &a.aos, &mut streams.aos),
    )
}

/// Measure position and velocity at one 1 Hz GNSS epoch, or return the
/// denial marker once past the denial time.
pub fn sense_gnss(
    suite: &SensorSuite,
    streams: &mut SensorStreams,
    t: f64,
    pos: &GeodeticPosition,
    vel_ned: &Vector3<f64>,
    dt_gnss: f64,
) -> Option<GnssMeasurement> {
    let g = &suite.gnss;
    if t >= g.denial_time {
        return None;
    }
    streams.gnss_walk += normal3(&mut streams.gnss, g.iono_walk_density * dt_gnss.sqrt());
    let noise = Vector3::new(
        streams.gnss.sample_normal(0.0, g.pos_noise_std),
        streams.gnss.sample_normal(0.0, g.pos_noise_std),
        streams.gnss.sample_normal(0.0, g.vert_noise_std),
    );
    let err_ned = streams.gnss_walk + g.iono_bias + noise;
    let vel_err = normal3(&mut streams.gnss, g.vel_noise_std);

    let m = pos.meridian_radius() + pos.alt;
    let n = pos.prime_vertical_radius() + pos.alt;
    let measured = GeodeticPosition::new(
        pos.lon + err_ned.y / (n * pos.lat.cos()),
        pos.lat + err_ned.x / m,
        pos.alt - err_ned.z,
    );
    Some(GnssMeasurement {
        pos: measured,
        vel_ned: vel_ned + vel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seedtree::derive_module_seeds;

    fn seeds(trajectory_seed: u64) -> ModuleSeeds {
        derive_module_seeds(1, trajectory_seed).module_seeds
    }

    #[test]
    fn same_seeds_identical_models() {
        let spec = SensorSpec::default();
        let (a, _) = initialize_sensor_errors(&spec, &seeds(42), 100.0);
        let (b, _) = initialize_sensor_errors(&spec, &seeds(42), 100.0);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_spec_is_pass_through() {
        let spec = SensorSpec::zero();
        let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(7), 100.0);
        let f = Vector3::new(0.1, -0.2, -9.7);
        let w = Vector3::new(0.01, 0.02, -0.03);
        let wd = Vector3::new(0.5, -0.5, 0.2);
        let (fm, wm) = sense_imu(&suite, &mut st, &f, &w, &wd, 0.01);
        assert_eq!(fm, f);
        assert_eq!(wm, w);
        let b = Vector3::new(21000.0, 1500.0, 43000.0);
        assert_eq!(sense_magnetometer(&suite, &mut st, &b), b);
        let (p, t, v, al, be) = sense_airdata(&suite, &mut st, 72000.0, 270.0, 29.0, 0.07, 0.001);
        assert_eq!((p, t, v, al, be), (72000.0, 270.0, 29.0, 0.07, 0.001));
        let pos = GeodeticPosition::new(-1.6, 0.6, 2700.0);
        let vel = Vector3::new(20.0, 20.0, 0.0);
        let fix = sense_gnss(&suite, &mut st, 50.0, &pos, &vel, 1.0).unwrap();
        assert_eq!(fix.pos, pos);
        assert_eq!(fix.vel_ned, vel);
    }

    #[test]
    fn stationary_level_identity() {
        // With zero errors, an IMU on a stationary level platform reports the
        // reaction to gravity and the Earth rotation rate unchanged.
        let spec = SensorSpec::zero();
        let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(7), 100.0);
        let g = crate::earth::normal_gravity(0.6, 0.0);
        let f = Vector3::new(0.0, 0.0, -g);
        let lat: f64 = 0.6;
        let w = crate::flight::EARTH_RATE * Vector3::new(lat.cos(), 0.0, -lat.sin());
        let (fm, wm) = sense_imu(&suite, &mut st, &f, &w, &Vector3::zeros(), 0.01);
        assert_eq!(fm, f);
        assert_eq!(wm, w);
    }

    #[test]
    fn lever_arm_centripetal_term() {
        let mut spec = SensorSpec::zero();
        spec.imu_lever_arm = Vector3::new(0.2, -0.1, 0.05);
        let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(3), 100.0);
        let f = Vector3::new(0.0, 0.0, -9.8);
        let w = Vector3::new(0.3, -0.2, 0.5);
        let wd = Vector3::new(1.0, 0.5, -0.2);
        let (fm, _) = sense_imu(&suite, &mut st, &f, &w, &wd, 0.01);
        let expect = f + wd.cross(&spec.imu_lever_arm) + w.cross(&w.cross(&spec.imu_lever_arm));
        assert!((fm - expect).norm() < 1e-15);
    }

    #[test]
    fn bias_offsets_empirically_normal() {
        let spec = SensorSpec::default();
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for k in 0..n {
            let (suite, _) = initialize_sensor_errors(&spec, &seeds(k as u64), 100.0);
            let b = suite.imu.acc.bias_offset.x;
            sum += b;
            sum2 += b * b;
        }
        let mean = sum / n as f64;
        let std = (sum2 / n as f64 - mean * mean).sqrt();
        let target = spec.acc.bias_offset_std;
        assert!(mean.abs() < 0.05 * target, "mean {mean}");
        assert!((std - target).abs() < 0.05 * target, "std {std}");
    }

    #[test]
    fn white_noise_allan_slope() {
        // White-noise-only gyro: Allan deviation slope -1/2 in cluster time.
        let mut spec = SensorSpec::zero();
        spec.gyr.noise_std = 1.0e-3;
        let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(11), 100.0);
        let dt = 0.01;
        let n = 1 << 17;
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let (_, w) = sense_imu(
                &suite,
                &mut st,
                &Vector3::zeros(),
                &Vector3::zeros(),
                &Vector3::zeros(),
                dt,
            );
            samples.push(w.x);
        }
        let avar = |m: usize| {
            let clusters: Vec<f64> = samples
                .chunks_exact(m)
                .map(|c| c.iter().sum::<f64>() / m as f64)
                .collect();
            let mut s = 0.0;
            for w in clusters.windows(2) {
                s += (w[1] - w[0]).powi(2);
            }
            s / (2.0 * (clusters.len() - 1) as f64)
        };
        let (m1, m2) = (4, 64);
        let slope = (avar(m2) / avar(m1)).log10() / ((m2 as f64 / m1 as f64).log10()) / 2.0;
        assert!((slope + 0.5).abs() < 0.05, "Allan slope {slope}");
    }

    #[test]
    fn drift_random_walk_variance() {
        let mut spec = SensorSpec::zero();
        spec.acc.drift_density = 5.0e-4;
        let dt = 0.01;
        let steps = 100;
        let runs = 2000;
        let mut sum2 = 0.0;
        for k in 0..runs {
            let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(k as u64), 100.0);
            for _ in 0..steps {
                sense_imu(
                    &suite,
                    &mut st,
                    &Vector3::zeros(),
                    &Vector3::zeros(),
                    &Vector3::zeros(),
                    dt,
                );
            }
            sum2 += st.acc_drift.x * st.acc_drift.x;
        }
        let var = sum2 / runs as f64;
        let expect = spec.acc.drift_density.powi(2) * dt * steps as f64;
        assert!((var - expect).abs() < 0.1 * expect, "var {var} expect {expect}");
    }

    #[test]
    fn gnss_denial_boundary() {
        let spec = SensorSpec::default();
        let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(5), 100.0);
        let pos = GeodeticPosition::new(-1.6, 0.6, 2700.0);
        let vel = Vector3::zeros();
        assert!(sense_gnss(&suite, &mut st, 99.0, &pos, &vel, 1.0).is_some());
        assert!(sense_gnss(&suite, &mut st, 100.0, &pos, &vel, 1.0).is_none());
        assert!(sense_gnss(&suite, &mut st, 101.0, &pos, &vel, 1.0).is_none());
    }

    #[test]
    fn gnss_random_walk_grows_linearly() {
        let mut spec = SensorSpec::zero();
        spec.gnss_iono_walk_density = 0.05;
        let var_at = |epochs: usize| {
            let runs = 10_000;
            let mut sum2 = 0.0;
            for k in 0..runs {
                let (suite, mut st) = initialize_sensor_errors(&spec, &seeds(k as u64), 1.0e9);
                let pos = GeodeticPosition::new(-1.6, 0.6, 2700.0);
                for e in 0..epochs {
                    sense_gnss(&suite, &mut st, e as f64, &pos, &Vector3::zeros(), 1.0);
                }
                sum2 += st.gnss_walk.x * st.gnss_walk.x;
            }
            sum2 / runs as f64
        };
        let v10 = var_at(10);
        let v40 = var_at(40);
        assert!((v40 / v10 - 4.0).abs() < 0.4, "ratio {}", v40 / v10);
    }

    #[test]
    fn gnss_seed_isolation() {
        let spec = SensorSpec::default();
        let s1 = seeds(42);
        let mut s2 = seeds(42);
        s2.gnss = s2.gnss.wrapping_add(1);
        let (a, mut sta) = initialize_sensor_errors(&spec, &s1, 100.0);
        let (b, mut stb) = initialize_sensor_errors(&spec, &s2, 100.0);
        assert_eq!(a.imu, b.imu);
        assert_eq!(a.mag, b.mag);
        assert_eq!(a.airdata, b.airdata);
        assert_ne!(a.gnss, b.gnss);
        let f = Vector3::new(0.1, 0.2, -9.8);
        let w = Vector3::new(0.01, 0.0, 0.0);
        assert_eq!(
            sense_imu(&a, &mut sta, &f, &w, &Vector3::zeros(), 0.01),
            sense_imu(&b, &mut stb, &f, &w, &Vector3::zeros(), 0.01)
        );
    }
}
