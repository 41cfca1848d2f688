//! Project a sample onto the section orthogonal to the anchor `x0` and check
//! that the section hull evaluated at the origin recovers `ĝ(x0)`.

use frontier_cone::dea::g_hat;
use frontier_cone::geometry::project_to_section;
use frontier_cone::synthetic::ScenarioSpec;
use nalgebra::DVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = ScenarioSpec::cobb_douglas_q1(200, 3.0, 7).generate()?;
    let x0 = [0.5, 0.5];
    let section = project_to_section(&sample, &x0)?;
    println!("section dimension {} with {} points", section.dim(), section.len());
    println!("basis orthonormality defect {:.2e}", section.basis().orthonormality_defect());

    let origin = DVector::zeros(section.coordinate_dim());
    let on_section = section.height_at(&origin)?;
    let direct = g_hat(&sample, &x0)?;
    println!("g*(0) on the section  {on_section:.6}");
    println!("g(x0) from the hull   {direct:.6}");

    let (x, y) = section.reconstruct(0);
    println!("first point reconstructed: x = {:?}, y = {y:.4}", x.as_slice());
    Ok(())
}
