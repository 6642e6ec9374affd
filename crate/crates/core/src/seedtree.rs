//! Two-level seed hierarchy and sampling primitives.
//!
//! Every stochastic quantity in the simulation is a pure function of the
//! master seed and the run index. The master seed generates one trajectory
//! seed per run, and each trajectory seed generates the seventeen module
//! seeds, always in the same order. All draws go through [`StochasticSampler`],
//! which wraps a fixed, versioned ChaCha12 generator so sequences are
//! bit-identical on every platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Master seed for a whole Monte Carlo batch. Any value is valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterSeed(pub u64);

/// Number of module seeds derived from each trajectory seed.
pub const MODULE_SEED_COUNT: usize = 17;

/// Module seed names, in derivation order.
pub const MODULE_SEED_NAMES: [&str; MODULE_SEED_COUNT] = [
    "ACC", "GYR", "MAG", "OSP", "OAT", "GNSS", "TAS", "AOA", "AOS", "PLAT", "CAM", "WIND",
    "WEATHER", "TURB", "MISSION", "GEO", "ALIGN",
];

/// The seventeen module seeds, stored in derivation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModuleSeeds {
    pub acc: u64,
    pub gyr: u64,
    pub mag: u64,
    pub osp: u64,
    pub oat: u64,
    pub gnss: u64,
    pub tas: u64,
    pub aoa: u64,
    pub aos: u64,
    pub plat: u64,
    pub cam: u64,
    pub wind: u64,
    pub weather: u64,
    pub turb: u64,
    pub mission: u64,
    pub geo: u64,
    pub align: u64,
}

impl ModuleSeeds {
    pub fn as_array(&self) -> [u64; MODULE_SEED_COUNT] {
        [
            self.acc, self.gyr, self.mag, self.osp, self.oat, self.gnss, self.tas, self.aoa,
            self.aos, self.plat, self.cam, self.wind, self.weather, self.turb, self.mission,
            self.geo, self.align,
        ]
    }
}

/// Seeds for one Monte Carlo run: the trajectory seed and its module seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectorySeedSet {
    /// 1-based run index within the batch.
    pub run_index: u32,
    pub trajectory_seed: u64,
    pub module_seeds: ModuleSeeds,
}

/// Derive the trajectory seeds for a batch as a discrete uniform draw over
/// the full 64-bit range.
pub fn derive_trajectory_seeds(master: MasterSeed, n_runs: u32) -> Vec<u64> {
    let mut rng = ChaCha12Rng::seed_from_u64(master.0);
    (0..n_runs).map(|_| rng.next_u64()).collect()
}

/// Derive the seventeen module seeds for one run, in the fixed order.
pub fn derive_module_seeds(run_index: u32, trajectory_seed: u64) -> TrajectorySeedSet {
    let mut rng = ChaCha12Rng::seed_from_u64(trajectory_seed);
    let mut next = || rng.next_u64();
    let module_seeds = ModuleSeeds {
        acc: next(),
        gyr: next(),
        mag: next(),
        osp: next(),
        oat: next(),
        gnss: next(),
        tas: next(),
        aoa: next(),
        aos: next(),
        plat: next(),
        cam: next(),
        wind: next(),
        weather: next(),
        turb: next(),
        mission: next(),
        geo: next(),
        align: next(),
    };
    TrajectorySeedSet {
        run_index,
        trajectory_seed,
        module_seeds,
    }
}

#[derive(Debug, Error)]
pub enum SamplerError {
    /// The rejection-resampling cap was exceeded; the restriction is
    /// effectively unsatisfiable with the configured distribution.
    #[error("constraint not satisfied after {0} redraws")]
    ConstraintCapExceeded(u64),
}

/// Maximum redraws before a constrained sample is declared unsatisfiable.
pub const CONSTRAINT_REDRAW_CAP: u64 = 1_000_000;

/// Deterministic sampler seeded from a single module seed.
///
/// Two samplers built from equal seeds produce identical sequences. The
/// normal transform (Box-Muller, cosine branch) and the bounded integer
/// draw (modulo rejection) are implemented here rather than delegated to a
/// distribution crate so that the consumed-draw count per sample is fixed
/// and the streams stay stable across dependency upgrades.
#[derive(Debug, Clone)]
pub struct StochasticSampler {
    rng: ChaCha12Rng,
}

impl StochasticSampler {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in the open interval (0, 1), 53-bit resolution.
    fn uniform_open01(&mut self) -> f64 {
        (((self.rng.next_u64() >> 11) + 1) as f64) / ((1u64 << 53) as f64 + 2.0)
    }

    /// One normal draw. Consumes exactly two generator outputs.
    pub fn sample_normal(&mut self, mean: f64, std: f64) -> f64 {
        let u1 = self.uniform_open01();
        let u2 = self.uniform_open01();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        mean + std * z
    }

    /// Integer uniform on the inclusive range [lo, hi].
    pub fn sample_discrete_uniform(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span == 1u128 << 64 {
            return self.rng.next_u64() as i64;
        }
        let span = span as u64;
        let limit = u64::MAX - u64::MAX % span;
        loop {
            let x = self.rng.next_u64();
            if x < limit {
                return lo.wrapping_add((x % span) as i64);
            }
        }
    }

    /// Rejection resampling: redraw a single parameter until the restriction
    /// holds. The consumed-draw count is part of the deterministic stream.
    pub fn sample_constrained<T>(
        &mut self,
        mut draw: impl FnMut(&mut Self) -> T,
        predicate: impl Fn(&T) -> bool,
    ) -> Result<T, SamplerError> {
        for _ in 0..CONSTRAINT_REDRAW_CAP {
            let value = draw(self);
            if predicate(&value) {
                return Ok(value);
            }
        }
        Err(SamplerError::ConstraintCapExceeded(CONSTRAINT_REDRAW_CAP))
    }
}
