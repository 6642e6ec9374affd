//! Evaluation metrics: per-run error series, trajectory metrics, aggregated
//! and time-aggregated statistics over a Monte Carlo batch, and a
//! bounded/drift x biased/unbiased classification.
//!
//! All variances are population (divide by N) statistics. "Maximum" of a
//! signed series means the signed value of largest magnitude; aggregation of
//! per-run maximums always works on their absolute values.

use thiserror::Error;

use crate::earth::geodesy::wrap_angle;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("estimate and truth series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("series {0} has {1} epochs, expected {2}: all runs must share the epoch grid")]
    RaggedInput(usize, usize, usize),
}

/// Error history of one variable over one run at the estimation rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    /// Per-epoch error values (estimate minus truth).
    pub values: Vec<f64>,
    /// Whether differencing wrapped to (-pi, pi].
    pub angular: bool,
}

/// Difference an estimated history against truth, wrapping angular
/// variables to (-pi, pi].
pub fn error_series(
    estimate: &[f64],
    truth: &[f64],
    angular: bool,
) -> Result<ErrorSeries, MetricsError> {
    if estimate.len() != truth.len() {
        return Err(MetricsError::LengthMismatch(estimate.len(), truth.len()));
    }
    if estimate.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let values = estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| {
            if angular {
                wrap_angle(e - t)
            } else {
                e - t
            }
        })
        .collect();
    Ok(ErrorSeries { values, angular })
}

/// Signed value of largest magnitude; ties resolve to the earlier value.
pub fn signed_max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut best = 0.0f64;
    let mut found = false;
    for v in values {
        if !found || v.abs() > best.abs() {
            best = v;
            found = true;
        }
    }
    best
}

/// Mean, population standard deviation, and signed maximum of one run's
/// error series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMetrics {
    pub mean: f64,
    pub std: f64,
    /// Signed value of largest magnitude over the series.
    pub max: f64,
}

/// Welford accumulator for one error stream; numerically stable over 10^5+
/// epochs and usable without materializing the series.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
    max: f64,
    last: f64,
}

impl RunningStats {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
        if self.n == 1 || v.abs() > self.max.abs() {
            self.max = v;
        }
        self.last = v;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Most recently pushed value (the final-state error once the run ends).
    pub fn last(&self) -> f64 {
        self.last
    }

    pub fn finish(&self) -> Result<TrajectoryMetrics, MetricsError> {
        if self.n == 0 {
            return Err(MetricsError::EmptyInput);
        }
        Ok(TrajectoryMetrics {
            mean: self.mean,
            std: (self.m2 / self.n as f64).sqrt(),
            max: self.max,
        })
    }
}

pub fn trajectory_metrics(series: &ErrorSeries) -> Result<TrajectoryMetrics, MetricsError> {
    let mut acc = RunningStats::default();
    for &v in &series.values {
        acc.push(v);
    }
    acc.finish()
}

fn mean_std_max(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, var.sqrt(), max)
}

/// Mean / std / max over the runs of each per-run trajectory metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregatedMetrics {
    /// Statistics of the per-run means (max is of their absolute values).
    pub mean_of_mean: f64,
    pub std_of_mean: f64,
    pub max_of_mean: f64,
    /// Statistics of the per-run standard deviations.
    pub mean_of_std: f64,
    pub std_of_std: f64,
    pub max_of_std: f64,
    /// Statistics of the per-run |max| values.
    pub mean_of_max: f64,
    pub std_of_max: f64,
    pub max_of_max: f64,
}

pub fn aggregate(per_run: &[TrajectoryMetrics]) -> Result<AggregatedMetrics, MetricsError> {
    if per_run.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let means: Vec<f64> = per_run.iter().map(|m| m.mean).collect();
    let stds: Vec<f64> = per_run.iter().map(|m| m.std).collect();
    let maxes: Vec<f64> = per_run.iter().map(|m| m.max.abs()).collect();
    let (mean_of_mean, std_of_mean, _) = mean_std_max(&means);
    let max_of_mean = means.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let (mean_of_std, std_of_std, max_of_std) = mean_std_max(&stds);
    let (mean_of_max, std_of_max, max_of_max) = mean_std_max(&maxes);
    Ok(AggregatedMetrics {
        mean_of_mean,
        std_of_mean,
        max_of_mean,
        mean_of_std,
        std_of_std,
        max_of_std,
        mean_of_max,
        std_of_max,
        max_of_max,
    })
}

/// Statistics of the last-epoch error across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalStateMetrics {
    pub mean: f64,
    pub std: f64,
    /// Signed final error of largest magnitude across runs.
    pub max: f64,
}

pub fn aggregate_final_state(finals: &[f64]) -> Result<FinalStateMetrics, MetricsError> {
    if finals.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let (mean, std, _) = mean_std_max(finals);
    Ok(FinalStateMetrics {
        mean,
        std,
        max: signed_max_abs(finals.iter().copied()),
    })
}

/// Per-epoch mean and std across runs, for plotting the error evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeAggregatedMetrics {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn time_aggregate(series: &[ErrorSeries]) -> Result<TimeAggregatedMetrics, MetricsError> {
    let first = series.first().ok_or(MetricsError::EmptyInput)?;
    let n_epochs = first.values.len();
    if n_epochs == 0 {
        return Err(MetricsError::EmptyInput);
    }
    for (j, s) in series.iter().enumerate() {
        if s.values.len() != n_epochs {
            return Err(MetricsError::RaggedInput(j, s.values.len(), n_epochs));
        }
    }
    let n_runs = series.len() as f64;
    let mut mean = vec![0.0; n_epochs];
    let mut std = vec![0.0; n_epochs];
    for s in series {
        for (acc, v) in mean.iter_mut().zip(&s.values) {
            *acc += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n_runs;
    }
    for s in series {
        for ((acc, v), m) in std.iter_mut().zip(&s.values).zip(&mean) {
            *acc += (v - m) * (v - m);
        }
    }
    for v in std.iter_mut() {
        *v = (*v / n_runs).sqrt();
    }
    Ok(TimeAggregatedMetrics { mean, std })
}

/// Classification thresholds; repo policy, reported next to the raw values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    /// |mean final error| / std of final error below this reads as unbiased.
    pub bias_ratio: f64,
    /// Least-squares slope magnitude of |per-epoch mean| over the final half
    /// above this reads as drifting [units/s].
    pub drift_slope: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            bias_ratio: 0.3,
            drift_slope: 1.0e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bias {
    Unbiased,
    Biased,
}

/// Verdict plus the raw quantities it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub boundedness: Boundedness,
    pub bias: Bias,
    /// |mean final error| / std of final error (infinite if std is zero and
    /// the mean is not).
    pub bias_ratio: f64,
    /// Fitted slope of |per-epoch mean| over the final half [units/s].
    pub drift_slope: f64,
}

/// Least-squares slope of y over x.
fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn classify(
    time_agg: &TimeAggregatedMetrics,
    final_state: &FinalStateMetrics,
    dt: f64,
    config: &ClassifyConfig,
) -> Result<Classification, MetricsError> {
    let n = time_agg.mean.len();
    if n < 2 {
        return Err(MetricsError::EmptyInput);
    }
    let half = n / 2;
    let t: Vec<f64> = (half..n).map(|k| k as f64 * dt).collect();
    let y: Vec<f64> = time_agg.mean[half..].iter().map(|m| m.abs()).collect();
    let drift_slope = ls_slope(&t, &y);

    let bias_ratio = if final_state.std == 0.0 {
        if final_state.mean == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        final_state.mean.abs() / final_state.std
    };

    Ok(Classification {
        boundedness: if drift_slope.abs() > config.drift_slope {
            Boundedness::Drift
        } else {
            Boundedness::Bounded
        },
        bias: if bias_ratio < config.bias_ratio {
            Bias::Unbiased
        } else {
            Bias::Biased
        },
        bias_ratio,
        drift_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seedtree::StochasticSampler;

    fn series(values: &[f64]) -> ErrorSeries {
        ErrorSeries {
            values: values.to_vec(),
            angular: false,
        }
    }

    #[test]
    fn identical_streams_give_zero_errors() {
        let x = [1.0, 2.0, 3.5];
        let s = error_series(&x, &x, false).unwrap();
        assert!(s.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn angular_error_wraps() {
        let s = error_series(&[179f64.to_radians()], &[(-179f64).to_radians()], true).unwrap();
        assert!((s.values[0] - (-2f64).to_radians()).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_rejected() {
        assert_eq!(
            error_series(&[1.0], &[1.0, 2.0], false),
            Err(MetricsError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn hand_computed_trajectory_metrics() {
        let m = trajectory_metrics(&series(&[1.0, 2.0, 3.0])).unwrap();
        assert!((m.mean - 2.0).abs() < 1e-15);
        assert!((m.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(m.max, 3.0);
    }

    #[test]
    fn maximum_keeps_the_sign_of_the_largest_magnitude() {
        let m = trajectory_metrics(&series(&[-5.0, 2.0])).unwrap();
        assert_eq!(m.max, -5.0);
    }

    #[test]
    fn streaming_matches_two_pass_recomputation() {
        let mut s = StochasticSampler::from_seed(31);
        let values: Vec<f64> = (0..100_000).map(|_| s.sample_normal(0.3, 2.0)).collect();
        let m = trajectory_metrics(&series(&values)).unwrap();
        // independent two-pass recomputation
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mut max = 0.0f64;
        for &v in &values {
            if v.abs() > max.abs() {
                max = v;
            }
        }
        assert!((m.mean - mean).abs() <= 1e-12);
        assert!((m.std - var.sqrt()).abs() <= 1e-12);
        assert_eq!(m.max, max);
    }

    #[test]
    fn shift_moves_mean_not_std() {
        let base: Vec<f64> = (0..500).map(|k| (k as f64 * 0.1).sin()).collect();
        let shifted: Vec<f64> = base.iter().map(|v| v + 4.0).collect();
        let a = trajectory_metrics(&series(&base)).unwrap();
        let b = trajectory_metrics(&series(&shifted)).unwrap();
        assert!((b.mean - a.mean - 4.0).abs() < 1e-12);
        assert!((b.std - a.std).abs() < 1e-12);
    }

    #[test]
    fn single_run_aggregation_collapses() {
        let m = TrajectoryMetrics {
            mean: -1.5,
            std: 0.4,
            max: -2.5,
        };
        let a = aggregate(&[m]).unwrap();
        assert_eq!(a.mean_of_mean, -1.5);
        assert_eq!(a.std_of_mean, 0.0);
        assert_eq!(a.max_of_mean, 1.5);
        assert_eq!(a.mean_of_max, 2.5);
        assert_eq!(a.max_of_max, 2.5);
    }

    #[test]
    fn identical_runs_have_zero_spread() {
        let m = TrajectoryMetrics {
            mean: 0.7,
            std: 0.2,
            max: 1.1,
        };
        let a = aggregate(&[m; 8]).unwrap();
        // summation rounding leaves at most ~1 ulp of spread
        assert!(a.std_of_mean.abs() < 1e-12);
        assert!(a.std_of_std.abs() < 1e-12);
        assert!(a.std_of_max.abs() < 1e-12);
    }

    #[test]
    fn aggregation_against_brute_force_oracle() {
        let mut s = StochasticSampler::from_seed(9);
        let per_run: Vec<TrajectoryMetrics> = (0..100)
            .map(|_| TrajectoryMetrics {
                mean: s.sample_normal(0.0, 1.0),
                std: s.sample_normal(2.0, 0.3).abs(),
                max: s.sample_normal(0.0, 3.0),
            })
            .collect();
        let a = aggregate(&per_run).unwrap();
        let n = per_run.len() as f64;
        let mm = per_run.iter().map(|m| m.mean).sum::<f64>() / n;
        assert!((a.mean_of_mean - mm).abs() <= 1e-12);
        let vm = per_run.iter().map(|m| (m.mean - mm).powi(2)).sum::<f64>() / n;
        assert!((a.std_of_mean - vm.sqrt()).abs() <= 1e-12);
        let mx = per_run.iter().map(|m| m.max.abs()).fold(0.0, f64::max);
        assert_eq!(a.max_of_max, mx);
        let mam = per_run.iter().map(|m| m.max.abs()).sum::<f64>() / n;
        assert!((a.mean_of_max - mam).abs() <= 1e-12);
    }

    #[test]
    fn aggregation_commutes_with_run_permutation() {
        let mut s = StochasticSampler::from_seed(4);
        let mut per_run: Vec<TrajectoryMetrics> = (0..50)
            .map(|_| TrajectoryMetrics {
                mean: s.sample_normal(0.0, 1.0),
                std: s.sample_normal(1.0, 0.1).abs(),
                max: s.sample_normal(0.0, 2.0),
            })
            .collect();
        let a = aggregate(&per_run).unwrap();
        per_run.reverse();
        per_run.swap(3, 17);
        let b = aggregate(&per_run).unwrap();
        assert!((a.mean_of_mean - b.mean_of_mean).abs() < 1e-12);
        assert!((a.std_of_std - b.std_of_std).abs() < 1e-12);
        assert_eq!(a.max_of_max, b.max_of_max);
    }

    #[test]
    fn final_state_signed_maximum() {
        let f = aggregate_final_state(&[-3.0, 1.0, 2.5]).unwrap();
        assert_eq!(f.max, -3.0);
        assert!((f.mean - 0.5 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn time_aggregation_rejects_ragged_input() {
        let a = series(&[1.0, 2.0]);
        let b = series(&[1.0]);
        assert_eq!(
            time_aggregate(&[a, b]),
            Err(MetricsError::RaggedInput(1, 1, 2))
        );
    }

    #[test]
    fn time_aggregation_per_epoch_statistics() {
        let runs = [series(&[1.0, 4.0]), series(&[3.0, 8.0])];
        let ta = time_aggregate(&runs).unwrap();
        assert_eq!(ta.mean, vec![2.0, 6.0]);
        assert_eq!(ta.std, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_error_classifies_bounded_unbiased() {
        let runs = vec![series(&vec![0.0; 1000]); 10];
        let ta = time_aggregate(&runs).unwrap();
        let fs = aggregate_final_state(&vec![0.0; 10]).unwrap();
        let c = classify(&ta, &fs, 0.01, &ClassifyConfig::default()).unwrap();
        assert_eq!(c.boundedness, Boundedness::Bounded);
        assert_eq!(c.bias, Bias::Unbiased);
    }

    #[test]
    fn linear_growth_with_zero_mean_rate_is_drift_unbiased() {
        let mut s = StochasticSampler::from_seed(12);
        let dt = 0.1;
        let n = 1000;
        let runs: Vec<ErrorSeries> = (0..100)
            .map(|_| {
                let c = s.sample_normal(0.0, 1.0);
                series(&(0..n).map(|k| c * k as f64 * dt).collect::<Vec<_>>())
            })
            .collect();
        let ta = time_aggregate(&runs).unwrap();
        let finals: Vec<f64> = runs.iter().map(|r| *r.values.last().unwrap()).collect();
        let fs = aggregate_final_state(&finals).unwrap();
        let c = classify(&ta, &fs, dt, &ClassifyConfig::default()).unwrap();
        assert_eq!(c.boundedness, Boundedness::Drift);
        assert_eq!(c.bias, Bias::Unbiased);
    }

    #[test]
    fn constant_offset_with_large_mean_is_bounded_biased() {
        let mut s = StochasticSampler::from_seed(13);
        let runs: Vec<ErrorSeries> = (0..100)
            .map(|_| {
                let b = s.sample_normal(10.0, 0.5);
                series(&vec![b; 500])
            })
            .collect();
        let ta = time_aggregate(&runs).unwrap();
        let finals: Vec<f64> = runs.iter().map(|r| *r.values.last().unwrap()).collect();
        let fs = aggregate_final_state(&finals).unwrap();
        let c = classify(&ta, &fs, 0.01, &ClassifyConfig::default()).unwrap();
        assert_eq!(c.boundedness, Boundedness::Bounded);
        assert_eq!(c.bias, Bias::Biased);
    }
}
