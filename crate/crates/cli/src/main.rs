//! Command-line front end: single runs, Monte Carlo batches, seed-table
//! dumps, and metric recomputation from stored trace files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::{Quaternion, UnitQuaternion, Vector3};

use uavsim_core::earth::geodesy::{wrap_angle, GeodeticPosition};
use uavsim_core::flight::IntegratorKind;
use uavsim_core::metrics::{trajectory_metrics, ErrorSeries};
use uavsim_core::scenarios::TerrainZone;
use uavsim_core::seedtree::{
    derive_module_seeds, derive_trajectory_seeds, MasterSeed, MODULE_SEED_NAMES,
};
use uavsim_core::sim::{run_monte_carlo, run_single, RunConfig, RunResult, TRACKED_VARIABLES};

#[derive(Parser)]
#[command(
    name = "uavsim",
    version,
    about = "Seeded Monte Carlo test bench for fixed-wing UAV navigation in GNSS-denied flight"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a single run and print its summary.
    Run {
        #[command(flatten)]
        overrides: Overrides,
        /// Run index within the batch (selects the trajectory seed).
        #[arg(long, default_value_t = 0)]
        index: u32,
    },
    /// Execute a Monte Carlo batch and print the aggregate report.
    Mc {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the seed table: trajectory seed and module seeds per run.
    Seeds {
        #[arg(long, default_value_t = 1)]
        master_seed: u64,
        #[arg(long, default_value_t = 100)]
        n_runs: u32,
    },
    /// Recompute error metrics from the trace files of a stored run.
    Metrics {
        /// Run directory containing truth.tsv and estimated.tsv.
        dir: PathBuf,
    },
}

/// Config file plus command-line overrides; flags win over the file.
#[derive(Args, Default)]
struct Overrides {
    /// Key-value config file (one `key value` pair per line).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Scenario selector: 1 (long range) or 2 (eight turns).
    #[arg(long)]
    scenario: Option<u8>,
    /// Terrain zone code: DS, FM, FR, MX, PR, UR.
    #[arg(long)]
    zone: Option<String>,
    /// Navigation implementation name from the registry.
    #[arg(long)]
    nav: Option<String>,
    /// Attitude integration variant.
    #[arg(long)]
    integrator: Option<String>,
    /// Turbulence wind speed at 20 ft [m/s]; 0 disables turbulence.
    #[arg(long)]
    turbulence_w20: Option<f64>,
    #[arg(long)]
    n_runs: Option<u32>,
    /// Worker threads; 0 means one per core.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Output directory for trace files and batch reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Skip trace formatting entirely (digests come back empty).
    #[arg(long)]
    no_trace: bool,
    /// Keep per-run error series for time aggregation and classification.
    #[arg(long)]
    keep_series: bool,
}

impl Overrides {
    fn build(&self) -> Result<RunConfig, String> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                RunConfig::from_kv(&text).map_err(|e| e.to_string())?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.master_seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.scenario {
            if v != 1 && v != 2 {
                return Err(format!("scenario must be 1 or 2, got {v}"));
            }
            cfg.scenario = v;
        }
        if let Some(z) = &self.zone {
            if TerrainZone::by_code(z).is_none() {
                return Err(format!("unknown terrain zone `{z}`"));
            }
            cfg.zone = z.to_uppercase();
        }
        if let Some(n) = &self.nav {
            cfg.nav_impl = n.clone();
        }
        if let Some(i) = &self.integrator {
            cfg.integrator =
                IntegratorKind::parse(i).ok_or_else(|| format!("unknown integrator `{i}`"))?;
        }
        if let Some(v) = self.turbulence_w20 {
            cfg.turbulence_w20 = v;
        }
        if let Some(v) = self.n_runs {
            cfg.n_runs = v;
        }
        if let Some(v) = self.parallelism {
            cfg.parallelism = v;
        }
        if let Some(d) = &self.out {
            cfg.output_dir = Some(d.clone());
        }
        if self.no_trace {
            cfg.trace = false;
        }
        if self.keep_series {
            cfg.keep_series = true;
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run { overrides, index } => cmd_run(&overrides, index),
        Cmd::Mc { overrides } => cmd_mc(&overrides),
        Cmd::Seeds {
            master_seed,
            n_runs,
        } => cmd_seeds(master_seed, n_runs),
        Cmd::Metrics { dir } => cmd_metrics(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(overrides: &Overrides, index: u32) -> Result<(), String> {
    let cfg = overrides.build()?;
    let r = run_single(&cfg, index).map_err(|e| e.to_string())?;
    print_run_summary(&r);
    Ok(())
}

fn print_run_summary(r: &RunResult) {
    println!(
        "run {}  config {}  trajectory_seed {}",
        r.run_index, r.config_hash, r.seeds.trajectory_seed
    );
    println!(
        "epochs: truth {}  estimated {}  control {}  camera {}  gnss_fixes {}",
        r.counts.truth, r.counts.estimated, r.counts.control, r.counts.camera, r.counts.gnss_fixes
    );
    println!(
        "track: distance {:.1} m  max range {:.1} m",
        r.total_distance_m, r.max_range_m
    );
    if !r.digests.truth.is_empty() {
        println!("digest truth     {}", r.digests.truth);
        println!("digest sensed    {}", r.digests.sensed);
        println!("digest estimated {}", r.digests.estimated);
        println!("digest controls  {}", r.digests.controls);
        println!("digest camera    {}", r.digests.camera);
    }
    println!(
        "{:<12} {:>13} {:>13} {:>13} {:>13}",
        "variable", "mean", "std", "max", "final"
    );
    for v in &r.variables {
        println!(
            "{:<12} {:>13.4e} {:>13.4e} {:>13.4e} {:>13.4e}",
            v.name, v.metrics.mean, v.metrics.std, v.metrics.max, v.final_error
        );
    }
}

fn cmd_mc(overrides: &Overrides) -> Result<(), String> {
    let cfg = overrides.build()?;
    let report = run_monte_carlo(&cfg).map_err(|e| e.to_string())?;
    print!("{}", report.render_table());
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        std::fs::write(dir.join("report.txt"), report.render_table())
            .and_then(|_| std::fs::write(dir.join("report.kv"), report.to_kv()))
            .map_err(|e| format!("cannot write report: {e}"))?;
        println!("reports written to {}", dir.display());
    }
    if !report.failures.is_empty() {
        return Err(format!("{} run(s) failed", report.failures.len()));
    }
    Ok(())
}

fn cmd_seeds(master_seed: u64, n_runs: u32) -> Result<(), String> {
    print!("{:>5} {:>20}", "run", "trajectory_seed");
    for name in MODULE_SEED_NAMES {
        print!(" {name:>20}");
    }
    println!();
    for (j, traj) in derive_trajectory_seeds(MasterSeed(master_seed), n_runs)
        .iter()
        .enumerate()
    {
        let set = derive_module_seeds(j as u32, *traj);
        print!("{:>5} {:>20}", j, traj);
        for s in set.module_seeds.as_array() {
            print!(" {s:>20}");
        }
        println!();
    }
    Ok(())
}

/// One row of either trace, reduced to the fields the metrics need.
struct PoseRow {
    pos: GeodeticPosition,
    vel_ned: Vector3<f64>,
    att: UnitQuaternion<f64>,
    hp: f64,
    vtas: f64,
}

fn parse_trace(path: &Path, truth_layout: bool) -> Result<Vec<PoseRow>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|c| c.parse().unwrap_or(f64::NAN))
            .collect();
        let bad = || format!("{}:{}: unexpected column count", path.display(), lineno + 1);
        let row = if truth_layout {
            // t hp vtas lon lat alt vbx vby vbz qw qx qy qz wx wy wz fuel
            if cols.len() != 17 {
                return Err(bad());
            }
            let att = UnitQuaternion::from_quaternion(Quaternion::new(
                cols[9], cols[10], cols[11], cols[12],
            ));
            let vel_body = Vector3::new(cols[6], cols[7], cols[8]);
            PoseRow {
                pos: GeodeticPosition::new(cols[3], cols[4], cols[5]),
                vel_ned: att * vel_body,
                att,
                hp: cols[1],
                vtas: cols[2],
            }
        } else {
            // t lon lat alt vn ve vd qw qx qy qz hp vtas alpha beta
            if cols.len() != 15 {
                return Err(bad());
            }
            PoseRow {
                pos: GeodeticPosition::new(cols[1], cols[2], cols[3]),
                vel_ned: Vector3::new(cols[4], cols[5], cols[6]),
                att: UnitQuaternion::from_quaternion(Quaternion::new(
                    cols[7], cols[8], cols[9], cols[10],
                )),
                hp: cols[11],
                vtas: cols[12],
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_metrics(dir: &Path) -> Result<(), String> {
    let truth = parse_trace(&dir.join("truth.tsv"), true)?;
    let est = parse_trace(&dir.join("estimated.tsv"), false)?;
    // truth runs at 500 Hz, estimation at 100 Hz: keep every 5th truth row
    let truth: Vec<&PoseRow> = truth.iter().step_by(5).collect();
    if truth.len() != est.len() {
        return Err(format!(
            "decimated truth has {} epochs but estimated has {}",
            truth.len(),
            est.len()
        ));
    }
    if est.is_empty() {
        return Err("traces are empty".to_string());
    }

    println!(
        "{:<12} {:>13} {:>13} {:>13} {:>13}",
        "variable", "mean", "std", "max", "final"
    );
    for (k, (name, angular)) in TRACKED_VARIABLES.iter().enumerate() {
        let values: Vec<f64> = truth
            .iter()
            .zip(&est)
            .map(|(t, e)| variable_error(k, t, e))
            .collect();
        let series = ErrorSeries {
            values,
            angular: *angular,
        };
        let m = trajectory_metrics(&series).map_err(|e| e.to_string())?;
        let last = *series.values.last().unwrap();
        println!(
            "{:<12} {:>13.4e} {:>13.4e} {:>13.4e} {:>13.4e}",
            name, m.mean, m.std, m.max, last
        );
    }
    Ok(())
}

fn variable_error(k: usize, truth: &PoseRow, est: &PoseRow) -> f64 {
    match k {
        0 | 1 => {
            // horizontal NED offset of the estimate from truth
            let m = truth.pos.meridian_radius() + truth.pos.alt;
            let n = truth.pos.prime_vertical_radius() + truth.pos.alt;
            if k == 0 {
                (est.pos.lat - truth.pos.lat) * m
            } else {
                (est.pos.lon - truth.pos.lon) * n * truth.pos.lat.cos()
            }
        }
        2 => -(est.pos.alt - truth.pos.alt),
        3 => est.hp - truth.hp,
        4 => est.vtas - truth.vtas,
        5 => wrap_angle(
            est.vel_ned.y.atan2(est.vel_ned.x) - truth.vel_ned.y.atan2(truth.vel_ned.x),
        ),
        6 => {
            let (_, te, _) = truth.att.euler_angles();
            let (_, ee, _) = est.att.euler_angles();
            wrap_angle(ee - te)
        }
        _ => {
            let (tp, _, _) = truth.att.euler_angles();
            let (ep, _, _) = est.att.euler_angles();
            wrap_angle(ep - tp)
        }
    }
}
