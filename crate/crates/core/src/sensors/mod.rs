//! Sensor models: every onboard measurement is generated from truth at the
//! sensor's native rate with stochastic errors keyed to its own seed, so a
//! run's sensed trajectory is a pure function of the trajectory seed set.
//!
//! Rates: inertial, magnetic, and air-data channels at 100 Hz; GNSS at 1 Hz
//! until the denial time, then a permanent denial marker; camera poses at
//! 10 Hz. All epochs are exact multiples of the periods on the truth grid.

mod alignment;
mod camera;
mod models;
mod spec;

pub use alignment::{fine_alignment, NavInit};
pub use camera::{camera_pose, CameraPoseRecord, CameraRig};
pub use models::{
    initialize_sensor_errors, sense_airdata, sense_gnss, sense_imu, sense_magnetometer,
    AirDataErrorModel, GnssErrorModel, GnssMeasurement, ImuErrorModel, MagnetometerErrorModel,
    SensedRecord, SensorStreams, SensorSuite, TriadErrors,
};
pub use spec::{ChannelSpec, SensorSpec, SensorSpecError, TriadSpec};
