//! Estimate the density and curvature terms at a point of the simulated
//! single-output Cobb-Douglas model and compare them with the truth.
//!
//! Usage: `cargo run --release --example estimate_kappa -- [eps] [delta]`

use frontier_cone::dea::EvalPoint;
use frontier_cone::inference::{infer, InferConfig};
use frontier_cone::synthetic::ScenarioSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let scenario = ScenarioSpec::cobb_douglas_q1(4000, 3.0, 11);
    let sample = scenario.generate()?;
    let at = EvalPoint::new(vec![0.5, 0.5], vec![0.25])?;

    // the curvature fit needs a window several hull facets wide
    let config = InferConfig {
        epsilon: args.first().copied(),
        delta: Some(args.get(1).copied().unwrap_or(0.2)),
        replicates: 200,
        ..InferConfig::default()
    };
    let k = infer(&sample, &at, &config)?.kappa;
    println!("eps = {:.4}, delta = {:.4}, points in the eps-strip: {}", k.epsilon, k.delta, k.n_eps);
    println!("theta: estimate {:.3}, truth {:.3}", k.theta_hat, scenario.true_theta(&at.x0)?);
    println!("det(-g2): estimate {:.4}, truth {:.4}", k.det_term.unwrap_or(f64::NAN), scenario.true_curvature_det(&at.x0)?);
    println!("kappa: estimate {:.3}, truth {:.3}", k.kappa_hat.unwrap_or(f64::NAN), scenario.true_kappa(&at.x0)?);
    Ok(())
}
