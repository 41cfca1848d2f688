//! DEA-CRS and DEA-VRS scores for a handful of units and at an arbitrary
//! evaluation point.

use frontier_cone::dea::{crs_score, scores_at_observations, vrs_score, EvalPoint, ObservationSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = ObservationSet::from_rows(
        vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 3.0], vec![2.0, 2.0], vec![1.5, 2.5]],
        vec![vec![1.0], vec![1.5], vec![2.0], vec![0.5], vec![1.2]],
    )?;

    println!("unit  crs      vrs");
    for (i, (crs, vrs)) in scores_at_observations(&sample)?.iter().enumerate() {
        println!("{i:>4}  {:.4}  {:.4}", crs.lambda_hat, vrs.lambda_hat);
    }

    let at = EvalPoint::new(vec![2.0, 2.0], vec![1.0])?;
    let crs = crs_score(&sample, &at)?;
    let vrs = vrs_score(&sample, &at)?;
    println!("at x0 = (2, 2), y0 = 1: crs {:.4}, vrs {:.4}", crs.lambda_hat, vrs.lambda_hat);
    println!("estimated boundary output: {:.4}", crs.lambda_hat * at.y0[0]);
    Ok(())
}
