//! Compare the distribution of scaled estimation errors with simulated
//! `Z_n(0)` draws through their Kolmogorov-Smirnov distance.

use frontier_cone::reproduce::weak_convergence;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [100, 400] {
        let wc = weak_convergence(n, 500, 17, 0)?;
        println!("n = {n}: kappa = {:.3}, KS distance = {:.4}", wc.kappa, wc.comparison.ks_distance);
    }
    Ok(())
}
