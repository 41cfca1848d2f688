//! Empirical convergence rate of the CRS estimator: slope of log median
//! absolute error against log n.

use frontier_cone::reproduce::rate_study;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in rate_study(&[100, 200, 400, 800], 50, 3, 0)? {
        println!("{}: slope {:.3} (theory {:.3})", s.scenario, s.result.slope, s.expected_slope);
        for (n, e) in s.result.sizes.iter().zip(&s.result.median_abs_errors) {
            println!("    n = {n:>4}  median |error| = {e:.5}");
        }
    }
    Ok(())
}
