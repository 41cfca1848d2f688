//! A reduced run of the squared-error ratio study for the two-output model.
//!
//! Usage: `cargo run --release --example table1 -- [n] [reps] [B] [eps] [anchor|section] [seed]`

use frontier_cone::kappa::ThetaScaling;
use frontier_cone::reproduce::{table1, TABLE1_GRID_100, TABLE1_GRID_400};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(100), |s| s.parse())?;
    let reps: usize = args.get(1).map_or(Ok(50), |s| s.parse())?;
    let b: usize = args.get(2).map_or(Ok(500), |s| s.parse())?;
    let grid: Vec<f64> = match args.get(3).map(String::as_str) {
        Some("all") | None => if n >= 400 { TABLE1_GRID_400.to_vec() } else { TABLE1_GRID_100.to_vec() },
        Some(e) => vec![e.parse()?],
    };
    let scaling = match args.get(4).map(String::as_str) {
        Some("section") => ThetaScaling::Section,
        _ => ThetaScaling::AnchorNorm,
    };
    let seed: u64 = args.get(5).map_or(Ok(1), |s| s.parse())?;
    println!("n = {n}, reps = {reps}, B = {b}, scaling = {scaling:?}, seed = {seed}");
    for row in table1(n, &grid, reps, b, scaling, seed, 0)? {
        println!("eps = delta = {:.2}: ratio {:.4}", row.epsilon, row.ratio);
    }
    Ok(())
}
