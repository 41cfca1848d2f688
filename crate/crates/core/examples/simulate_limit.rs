//! Replicates of the limit variable `Z_n(0)` on the paraboloid and the
//! rectangle regions, and their independence from the worker count.

use frontier_cone::limit::{simulate_replicates, RegionKind, RegionSpec};
use frontier_cone::rng::SeedStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = SeedStream::new(42);
    for (kind, scale) in [(RegionKind::Paraboloid, 12.0), (RegionKind::Rectangle, 8.0)] {
        let spec = RegionSpec::new(kind, 2, scale, 400)?;
        let reps = simulate_replicates(&spec, 500, seed, 0)?;
        let serial = simulate_replicates(&spec, 500, seed, 1)?;
        println!(
            "{kind:?}: half side {:.3}, thickness {:.3}, mean Z {:.4}, redraws {}, identical across workers: {}",
            spec.half_side(),
            spec.thickness(),
            reps.mean(),
            reps.invalid_count,
            reps.values == serial.values
        );
    }
    Ok(())
}
