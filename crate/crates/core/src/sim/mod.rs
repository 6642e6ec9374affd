//! Run orchestration: configuration, single-run execution, Monte Carlo
//! batches, and trace emission.

pub mod batch;
pub mod config;
pub mod run;
pub mod trace;

pub use batch::{run_monte_carlo, BatchReport, VariableReport};
pub use config::{ConfigError, RunConfig};
pub use run::{
    run_single, run_single_with_seeds, sample_scenario, EpochCounts, FlightLogEntry, RunFailure,
    RunResult, ScenarioRecord, TraceDigests, VariableResult, CTRL_DT, EST_DT, TRACKED_VARIABLES,
    TRUTH_DT,
};
pub use trace::TraceWriter;
