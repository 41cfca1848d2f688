//! Write a simulated sample as CSV, read it back and emit a versioned JSON
//! report.

use frontier_cone::dea::crs_score;
use frontier_cone::io::{parse_observations, report_json, write_observations};
use frontier_cone::reproduce::single_output_point;
use frontier_cone::synthetic::ScenarioSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = ScenarioSpec::cobb_douglas_q1(5, 3.0, 2).generate()?;
    let mut buf = Vec::new();
    write_observations(&sample, &mut buf)?;
    print!("{}", String::from_utf8(buf.clone())?);
    let back = parse_observations(buf.as_slice())?;
    assert_eq!(back, sample);
    let score = crs_score(&back, &single_output_point())?;
    print!("{}", report_json("score", &score)?);
    Ok(())
}
