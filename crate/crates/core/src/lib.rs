//! Core library of the UAV flight simulation test bench: seeded stochastic
//! environment and sensor models, truth-state flight dynamics, guidance and
//! control, scenario generation, navigation plug-ins, Monte Carlo execution,
//! and the evaluation metrics.

pub mod airframe;
pub mod control;
pub mod earth;
pub mod flight;
pub mod guidance;
pub mod metrics;
pub mod nav;
pub mod scenarios;
pub mod seedtree;
pub mod sim;
pub mod sensors;
