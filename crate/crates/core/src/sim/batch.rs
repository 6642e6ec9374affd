//! Monte Carlo batches: parallel execution of the per-run simulation and a
//! deterministic ordered reduction of the results into the aggregate report.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::metrics::{
    aggregate, aggregate_final_state, classify, time_aggregate, AggregatedMetrics, Classification,
    ClassifyConfig, ErrorSeries, FinalStateMetrics, TimeAggregatedMetrics,
};

use super::config::{ConfigError, RunConfig};
use super::run::{run_single, RunFailure, RunResult, EST_DT, TRACKED_VARIABLES};

/// Batch-level statistics of one tracked error variable.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableReport {
    pub name: &'static str,
    pub angular: bool,
    pub aggregated: AggregatedMetrics,
    pub final_state: FinalStateMetrics,
    /// Present when the config kept per-run series.
    pub time_aggregated: Option<TimeAggregatedMetrics>,
    pub classification: Option<Classification>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub master_seed: u64,
    pub config_hash: String,
    pub scenario: u8,
    pub runs: Vec<RunResult>,
    pub failures: Vec<RunFailure>,
    pub variables: Vec<VariableReport>,
}

/// Execute all runs of the batch and reduce them in run-index order.
pub fn run_monte_carlo(cfg: &RunConfig) -> Result<BatchReport, ConfigError> {
    // fail fast on broken references before burning CPU on runs
    cfg.load_models()?;
    cfg.terrain_zone()?;

    let indices: Vec<u32> = (0..cfg.n_runs).collect();
    let results: Vec<Result<RunResult, RunFailure>> = if cfg.parallelism == 1 {
        indices.iter().map(|&j| run_single(cfg, j)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .expect("thread pool");
        pool.install(|| indices.par_iter().map(|&j| run_single(cfg, j)).collect())
    };

    // par_iter collect preserves input order, so this reduction is already
    // ordered by run index regardless of worker scheduling
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(run) => runs.push(run),
            Err(f) => failures.push(f),
        }
    }

    let variables = TRACKED_VARIABLES
        .iter()
        .enumerate()
        .map(|(k, (name, angular))| {
            let per_run: Vec<_> = runs.iter().map(|r| r.variables[k].metrics).collect();
            let finals: Vec<f64> = runs.iter().map(|r| r.variables[k].final_error).collect();
            let aggregated = aggregate(&per_run).unwrap_or(AggregatedMetrics {
                mean_of_mean: 0.0,
                std_of_mean: 0.0,
                max_of_mean: 0.0,
                mean_of_std: 0.0,
                std_of_std: 0.0,
                max_of_std: 0.0,
                mean_of_max: 0.0,
                std_of_max: 0.0,
                max_of_max: 0.0,
            });
            let final_state = aggregate_final_state(&finals).unwrap_or(FinalStateMetrics {
                mean: 0.0,
                std: 0.0,
                max: 0.0,
            });
            let (time_aggregated, classification) = if cfg.keep_series && !runs.is_empty() {
                let series: Vec<ErrorSeries> = runs
                    .iter()
                    .map(|r| ErrorSeries {
                        values: r.variables[k].series.clone().unwrap_or_default(),
                        angular: *angular,
                    })
                    .collect();
                match time_aggregate(&series) {
                    Ok(ta) => {
                        let dt = EST_DT * cfg.series_stride as f64;
                        let c = classify(&ta, &final_state, dt, &ClassifyConfig::default()).ok();
                        (Some(ta), c)
                    }
                    Err(_) => (None, None),
                }
            } else {
                (None, None)
            };
            VariableReport {
                name,
                angular: *angular,
                aggregated,
                final_state,
                time_aggregated,
                classification,
            }
        })
        .collect();

    Ok(BatchReport {
        master_seed: cfg.master_seed,
        config_hash: cfg.config_hash(),
        scenario: cfg.scenario,
        runs,
        failures,
        variables,
    })
}

impl BatchReport {
    /// Human-readable summary table.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "batch: master_seed={} scenario={} runs={} failures={} config={}",
            self.master_seed,
            self.scenario,
            self.runs.len(),
            self.failures.len(),
            self.config_hash
        );
        for f in &self.failures {
            let _ = writeln!(s, "  FAILED {f}");
        }
        let _ = writeln!(
            s,
            "{:<12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "variable", "mean(mu)", "std(mu)", "mean(sig)", "max|max|", "mu_end", "sig_end"
        );
        for v in &self.variables {
            let _ = writeln!(
                s,
                "{:<12} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
                v.name,
                v.aggregated.mean_of_mean,
                v.aggregated.std_of_mean,
                v.aggregated.mean_of_std,
                v.aggregated.max_of_max,
                v.final_state.mean,
                v.final_state.std
            );
            if let Some(c) = &v.classification {
                let _ = writeln!(
                    s,
                    "{:<12} verdict: {:?}/{:?} (bias ratio {:.3}, drift slope {:.3e}/s)",
                    "", c.boundedness, c.bias, c.bias_ratio, c.drift_slope
                );
            }
        }
        s
    }

    /// Columnar machine form: `variable stat value` lines.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "master_seed {}", self.master_seed);
        let _ = writeln!(s, "config {}", self.config_hash);
        let _ = writeln!(s, "scenario {}", self.scenario);
        let _ = writeln!(s, "runs {}", self.runs.len());
        let _ = writeln!(s, "failures {}", self.failures.len());
        for v in &self.variables {
            let a = &v.aggregated;
            for (stat, value) in [
                ("mean_of_mean", a.mean_of_mean),
                ("std_of_mean", a.std_of_mean),
                ("max_of_mean", a.max_of_mean),
                ("mean_of_std", a.mean_of_std),
                ("std_of_std", a.std_of_std),
                ("max_of_std", a.max_of_std),
                ("mean_of_max", a.mean_of_max),
                ("std_of_max", a.std_of_max),
                ("max_of_max", a.max_of_max),
                ("final_mean", v.final_state.mean),
                ("final_std", v.final_state.std),
                ("final_max", v.final_state.max),
            ] {
                let _ = writeln!(s, "{} {} {:e}", v.name, stat, value);
            }
        }
        s
    }
}
