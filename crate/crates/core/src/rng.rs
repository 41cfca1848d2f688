//! Seed derivation for reproducible parallel Monte Carlo.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] whose seed is
//! derived from a master seed and a path of `(tag, index)` pairs, so the
//! stream used by replicate `b` never depends on which thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Environment variable consulted when no explicit seed is given.
pub const SEED_ENV: &str = "FRONTIER_CONE_SEED";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent substream for item `index` of the family named `tag`.
    pub fn child(&self, tag: &str, index: u64) -> SeedStream {
        let mut h = splitmix64(self.seed);
        for b in tag.bytes() {
            h = splitmix64(h ^ u64::from(b));
        }
        SeedStream { seed: splitmix64(h ^ splitmix64(index)) }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Run `f(i)` for `i in 0..count` on a pool of `workers` threads and return
/// the results in index order. `workers == 0` means "use rayon's default",
/// `workers == 1` runs inline on the calling thread.
pub fn par_map<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        0 => return run(),
        1 => return (0..count).map(f).collect(),
        _ => {}
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(run),
        Err(_) => (0..count).map(f).collect(),
    }
}
