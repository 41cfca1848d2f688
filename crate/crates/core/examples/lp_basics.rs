//! Solve a small linear program with the dense simplex solver.
//!
//! maximize 3a + 2b subject to a + b ≤ 4, a + 3b ≤ 6, a ≤ 3.

use frontier_cone::lp::{solve, LinearProgram};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lp = LinearProgram::maximize(vec![3.0, 2.0])
        .le(vec![1.0, 1.0], 4.0)
        .le(vec![1.0, 3.0], 6.0)
        .le(vec![1.0, 0.0], 3.0);
    let sol = solve(&lp)?;
    println!("status {:?}", sol.status);
    println!("value  {:.6}", sol.value);
    println!("point  {:?}", sol.primal);
    println!("max constraint violation {:.2e}", lp.max_violation(&sol.primal));
    Ok(())
}
