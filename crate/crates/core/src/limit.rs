//! Monte Carlo draws of the limit variable `Z_n(0)`.
//!
//! The curved case samples `n` uniform points from
//! `R_n(κ) = [−h, h]^{d−1} × {w : −|v|² − t ≤ w ≤ −|v|²}` with
//! `h = ½(n/κ)^{1/(d+1)}` and `t = (n/κ)^{2/(d+1)}`; the linear case uses the
//! rectangle `[−h, h]^{d−1} × [−t, 0]` with `θ` in place of `κ`. Both regions
//! have volume `n/scale`. `Z_n(0)` is the height of the convex hull of the
//! sample above the origin of the `v` coordinates.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve, LinearProgram, LpStatus};
use crate::rng::{par_map, SeedStream};

/// Redraws allowed per replicate when the origin falls outside the hull.
pub const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    Paraboloid,
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    /// Effective input dimension; the region lives in `R^dim`.
    pub dim: usize,
    /// `κ` for the paraboloid, `θ` for the rectangle.
    pub scale: f64,
    pub n: usize,
}

impl RegionSpec {
    pub fn new(kind: RegionKind, dim: usize, scale: f64, n: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidRegion("dimension must be at least 1".into()));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidRegion(format!("scale must be positive and finite, got {scale}")));
        }
        if n == 0 {
            return Err(Error::InvalidRegion("need at least one point".into()));
        }
        Ok(RegionSpec { kind, dim, scale, n })
    }

    fn ratio(&self) -> f64 {
        self.n as f64 / self.scale
    }

    pub fn half_side(&self) -> f64 {
        0.5 * self.ratio().powf(1.0 / (self.dim as f64 + 1.0))
    }

    /// Vertical extent of the band (paraboloid) or of the rectangle.
    pub fn thickness(&self) -> f64 {
        self.ratio().powf(2.0 / (self.dim as f64 + 1.0))
    }

    /// Analytic volume from the side lengths; equals `n / scale`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_side()).powi(self.dim as i32 - 1) * self.thickness()
    }
}

/// One point of a region sample: `v` has `dim − 1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub v2: Vec<f64>,
    pub w: f64,
}

pub fn sample_region<R: Rng + ?Sized>(spec: &RegionSpec, count: usize, rng: &mut R) -> Vec<RegionPoint> {
    let (h, t) = (spec.half_side(), spec.thickness());
    (0..count)
        .map(|_| {
            let v2: Vec<f64> = (0..spec.dim - 1).map(|_| rng.random_range(-h..=h)).collect();
            let u: f64 = rng.random();
            let w = match spec.kind {
                RegionKind::Paraboloid => -v2.iter().map(|v| v * v).sum::<f64>() - u * t,
                RegionKind::Rectangle => -u * t,
            };
            RegionPoint { v2, w }
        })
        .collect()
}

/// `sup{Σγ_iW_i : Σγ_iV_i = at_v2, Σγ_i = 1, γ ≥ 0}`; `OutsideHull` when
/// `at_v2` is not covered by the `V_i`.
pub fn z_n(points: &[RegionPoint], at_v2: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if at_v2.is_empty() {
        return Ok(points.iter().map(|p| p.w).fold(f64::NEG_INFINITY, f64::max));
    }
    let mut lp = LinearProgram::maximize(points.iter().map(|p| p.w).collect());
    for (k, &target) in at_v2.iter().enumerate() {
        lp = lp.eq(points.iter().map(|p| p.v2[k]).collect(), target);
    }
    lp = lp.eq(vec![1.0; points.len()], 1.0);
    let sol = solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value),
        _ => Err(Error::OutsideHull),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReplicates {
    pub spec: RegionSpec,
    pub values: Vec<f64>,
    /// Redraws caused by the origin falling outside the sampled hull.
    pub invalid_count: usize,
    pub seed: u64,
}

impl LimitReplicates {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// `Z_n(0)` from one fresh region sample, redrawing on non-coverage.
/// Returns the value and the number of redraws.
pub fn draw_replicate(spec: &RegionSpec, stream: SeedStream) -> Result<(f64, usize)> {
    let origin = vec![0.0; spec.dim - 1];
    for attempt in 0..=MAX_RETRIES {
        let mut rng = stream.child("attempt", attempt as u64).rng();
        let points = sample_region(spec, spec.n, &mut rng);
        match z_n(&points, &origin) {
            Ok(v) => return Ok((v.min(0.0), attempt)),
            Err(Error::OutsideHull) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateRegion { retries: MAX_RETRIES })
}

/// `b` independent replicates of `Z_n(0)`, replicate `i` drawn from
/// `seed.child("replicate", i)` regardless of `workers`.
pub fn simulate_replicates(spec: &RegionSpec, b: usize, seed: SeedStream, workers: usize) -> Result<LimitReplicates> {
    if b == 0 {
        return Err(Error::InsufficientReplicates(0));
    }
    let draws = par_map(b, workers, |i| draw_replicate(spec, seed.child("replicate", i as u64)));
    let mut values = Vec::with_capacity(b);
    let mut invalid_count = 0;
    for d in draws {
        let (v, retries) = d?;
        values.push(v);
        invalid_count += retries;
    }
    Ok(LimitReplicates { spec: *spec, values, invalid_count, seed: seed.seed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn region_geometry_examples() {
        let s = RegionSpec::new(RegionKind::Paraboloid, 2, 1.0, 1).unwrap();
        assert_abs_diff_eq!(s.half_side(), 0.5);
        assert_abs_diff_eq!(s.thickness(), 1.0);
        let r = RegionSpec::new(RegionKind::Rectangle, 2, 1.0, 1).unwrap();
        let mut rng = SeedStream::new(3).rng();
        for p in sample_region(&r, 200, &mut rng) {
            assert!(p.v2[0].abs() <= 0.5 && (-1.0..=0.0).contains(&p.w));
        }
        let big = RegionSpec::new(RegionKind::Paraboloid, 3, 2.0, 100).unwrap();
        assert_abs_diff_eq!(big.volume(), 50.0, epsilon = 1e-9);
    }

    #[test]
    fn invalid_specs() {
        assert!(RegionSpec::new(RegionKind::Paraboloid, 0, 1.0, 1).is_err());
        assert!(RegionSpec::new(RegionKind::Paraboloid, 2, 0.0, 1).is_err());
        assert!(RegionSpec::new(RegionKind::Paraboloid, 2, -1.0, 1).is_err());
        assert!(RegionSpec::new(RegionKind::Paraboloid, 2, 1.0, 0).is_err());
    }

    #[test]
    fn paraboloid_band() {
        let s = RegionSpec::new(RegionKind::Paraboloid, 3, 0.7, 50).unwrap();
        let mut rng = SeedStream::new(11).rng();
        for p in sample_region(&s, 500, &mut rng) {
            let excess = p.w + p.v2.iter().map(|v| v * v).sum::<f64>();
            assert!(excess <= 0.0 && excess >= -s.thickness());
        }
    }

    #[test]
    fn two_point_hull() {
        let pts = vec![RegionPoint { v2: vec![-1.0], w: -2.0 }, RegionPoint { v2: vec![1.0], w: -4.0 }];
        assert_abs_diff_eq!(z_n(&pts, &[0.0]).unwrap(), -3.0, epsilon = 1e-12);
        assert_eq!(z_n(&pts, &[2.0]), Err(Error::OutsideHull));
        assert_eq!(z_n(&[], &[0.0]), Err(Error::EmptyInput));
    }

    #[test]
    fn one_dimensional_case_is_the_maximum() {
        let pts: Vec<_> = [-3.0, -0.5, -2.0].iter().map(|&w| RegionPoint { v2: vec![], w }).collect();
        assert_eq!(z_n(&pts, &[]).unwrap(), -0.5);
    }

    #[test]
    fn replicates_are_reproducible_and_nonpositive() {
        let s = RegionSpec::new(RegionKind::Paraboloid, 2, 1.0, 200).unwrap();
        let a = simulate_replicates(&s, 20, SeedStream::new(5), 1).unwrap();
        let b = simulate_replicates(&s, 20, SeedStream::new(5), 3).unwrap();
        assert_eq!(a, b);
        assert!(a.values.iter().all(|&v| v <= 0.0));
    }

    #[test]
    fn tiny_regions_fail_to_cover() {
        let s = RegionSpec::new(RegionKind::Paraboloid, 4, 1.0, 1).unwrap();
        assert_eq!(
            draw_replicate(&s, SeedStream::new(1)),
            Err(Error::DegenerateRegion { retries: MAX_RETRIES })
        );
    }
}
