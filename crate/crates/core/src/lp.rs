//! Dense two-phase primal simplex.
//!
//! Solves `maximize cᵀx` subject to equality rows, `≤` rows and (by default)
//! `x ≥ 0`. Pivoting follows Bland's rule throughout, so the method terminates
//! on degenerate programs and produces identical output for identical input.
//! Problem sizes in this crate are a handful of rows by a few thousand
//! columns, which a dense tableau handles comfortably.

use thiserror::Error;

/// Feasibility tolerance, relative to `1 + max|b|`.
pub const FEASIBILITY_TOL: f64 = 1e-9;
/// Optimality (reduced cost) tolerance.
pub const OPTIMALITY_TOL: f64 = 1e-9;
/// Smallest admissible pivot element.
const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed program: {0}")]
    MalformedProgram(String),
    #[error("simplex did not terminate within {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal objective value; `NaN` when infeasible, `+∞` when unbounded.
    pub value: f64,
    /// Optimal point (empty unless `status == Optimal`).
    pub primal: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    fn infeasible() -> Self {
        LpSolution { status: LpStatus::Infeasible, value: f64::NAN, primal: Vec::new() }
    }

    fn unbounded() -> Self {
        LpSolution { status: LpStatus::Unbounded, value: f64::INFINITY, primal: Vec::new() }
    }
}

/// `maximize objectiveᵀx` s.t. `eq_matrix·x = eq_rhs`, `le_matrix·x ≤ le_rhs`,
/// and `x ≥ 0` when `nonneg` is set (free variables otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_matrix: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub le_matrix: Vec<Vec<f64>>,
    pub le_rhs: Vec<f64>,
    pub nonneg: bool,
}

impl LinearProgram {
    /// A program with the given objective, no constraints and `x ≥ 0`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            eq_matrix: Vec::new(),
            eq_rhs: Vec::new(),
            le_matrix: Vec::new(),
            le_rhs: Vec::new(),
            nonneg: true,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_matrix.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.le_matrix.push(row);
        self.le_rhs.push(rhs);
        self
    }

    /// `row·x ≥ rhs`, stored as `−row·x ≤ −rhs`.
    pub fn ge(self, row: Vec<f64>, rhs: f64) -> Self {
        let neg = row.into_iter().map(|a| -a).collect();
        self.le(neg, -rhs)
    }

    pub fn free_variables(mut self) -> Self {
        self.nonneg = false;
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.eq_matrix.len() != self.eq_rhs.len() {
            return Err(LpError::MalformedProgram(format!(
                "{} equality rows but {} right-hand sides",
                self.eq_matrix.len(),
                self.eq_rhs.len()
            )));
        }
        if self.le_matrix.len() != self.le_rhs.len() {
            return Err(LpError::MalformedProgram(format!(
                "{} inequality rows but {} right-hand sides",
                self.le_matrix.len(),
                self.le_rhs.len()
            )));
        }
        for (kind, rows) in [("equality", &self.eq_matrix), ("inequality", &self.le_matrix)] {
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(LpError::MalformedProgram(format!(
                    "{kind} row {i} has {} columns, objective has {n}",
                    row.len()
                )));
            }
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.eq_matrix.iter().flatten().all(|v| v.is_finite())
            && self.le_matrix.iter().flatten().all(|v| v.is_finite())
            && self.eq_rhs.iter().chain(&self.le_rhs).all(|v| v.is_finite());
        if !finite {
            return Err(LpError::MalformedProgram("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// Largest absolute row residual of `x` (equalities two-sided, `≤` one-sided,
    /// plus sign violations when `nonneg`).
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let eq = self.eq_matrix.iter().zip(&self.eq_rhs).map(|(r, b)| (dot(r) - b).abs());
        let le = self.le_matrix.iter().zip(&self.le_rhs).map(|(r, b)| (dot(r) - b).max(0.0));
        let sign = x.iter().map(|&v| if self.nonneg { (-v).max(0.0) } else { 0.0 });
        eq.chain(le).chain(sign).fold(0.0, f64::max)
    }
}

/// Solve `lp` with the two-phase simplex method.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    if lp.nonneg {
        return Tableau::build(lp).run(&lp.objective);
    }
    // x = x⁺ − x⁻
    let split = |row: &Vec<f64>| row.iter().copied().chain(row.iter().map(|a| -a)).collect();
    let doubled = LinearProgram {
        objective: split(&lp.objective),
        eq_matrix: lp.eq_matrix.iter().map(split).collect(),
        eq_rhs: lp.eq_rhs.clone(),
        le_matrix: lp.le_matrix.iter().map(split).collect(),
        le_rhs: lp.le_rhs.clone(),
        nonneg: true,
    };
    let mut sol = Tableau::build(&doubled).run(&doubled.objective)?;
    if sol.is_optimal() {
        let n = lp.num_vars();
        sol.primal = (0..n).map(|j| sol.primal[j] - sol.primal[n + j]).collect();
    }
    Ok(sol)
}

struct Tableau {
    rows: usize,
    /// structural + slack/surplus + artificial; the rhs sits at index `cols`.
    cols: usize,
    structural: usize,
    first_artificial: usize,
    data: Vec<f64>,
    /// Reduced costs `z_j − c_j`, with the current objective value at `cols`.
    obj: Vec<f64>,
    basis: Vec<usize>,
    feas_tol: f64,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        // (coefficients, rhs, needs slack(+1)/surplus(-1)/none(0))
        let mut rows: Vec<(Vec<f64>, f64, i8)> = Vec::new();
        for (row, &b) in lp.le_matrix.iter().zip(&lp.le_rhs) {
            if b >= 0.0 {
                rows.push((row.clone(), b, 1));
            } else {
                rows.push((row.iter().map(|a| -a).collect(), -b, -1));
            }
        }
        for (row, &b) in lp.eq_matrix.iter().zip(&lp.eq_rhs) {
            if b >= 0.0 {
                rows.push((row.clone(), b, 0));
            } else {
                rows.push((row.iter().map(|a| -a).collect(), -b, 0));
            }
        }
        let m = rows.len();
        let slacks = rows.iter().filter(|r| r.2 != 0).count();
        let artificials = rows.iter().filter(|r| r.2 <= 0).count();
        let cols = n + slacks + artificials;
        let width = cols + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let (mut next_slack, mut next_art) = (n, n + slacks);
        let mut max_b: f64 = 0.0;
        for (r, (coef, b, kind)) in rows.into_iter().enumerate() {
            let line = &mut data[r * width..(r + 1) * width];
            line[..n].copy_from_slice(&coef);
            line[cols] = b;
            max_b = max_b.max(b);
            match kind {
                1 => {
                    line[next_slack] = 1.0;
                    basis[r] = next_slack;
                    next_slack += 1;
                }
                -1 => {
                    line[next_slack] = -1.0;
                    next_slack += 1;
                    line[next_art] = 1.0;
                    basis[r] = next_art;
                    next_art += 1;
                }
                _ => {
                    line[next_art] = 1.0;
                    basis[r] = next_art;
                    next_art += 1;
                }
            }
        }
        Tableau {
            rows: m,
            cols,
            structural: n,
            first_artificial: n + slacks,
            data,
            obj: vec![0.0; width],
            basis,
            feas_tol: FEASIBILITY_TOL * (1.0 + max_b),
        }
    }

    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn run(mut self, objective: &[f64]) -> Result<LpSolution, LpError> {
        if self.first_artificial < self.cols {
            // Phase 1: maximize −Σ artificials.
            let mut cost = vec![0.0; self.cols];
            for c in &mut cost[self.first_artificial..] {
                *c = -1.0;
            }
            self.price(&cost);
            if !self.iterate(self.cols)? {
                unreachable!("phase 1 objective is bounded above by zero");
            }
            if self.obj[self.cols] < -self.feas_tol {
                return Ok(LpSolution::infeasible());
            }
            self.evict_artificials();
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.structural].copy_from_slice(objective);
        self.price(&cost);
        if !self.iterate(self.first_artificial)? {
            return Ok(LpSolution::unbounded());
        }
        let mut primal = vec![0.0; self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                primal[b] = self.at(r, self.cols).max(0.0);
            }
        }
        let value = objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
        Ok(LpSolution { status: LpStatus::Optimal, value, primal })
    }

    /// Reduced costs for `cost` under the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width();
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        for (o, &c) in self.obj.iter_mut().zip(&cost[..self.cols]) {
            *o = -c;
        }
        for r in 0..self.rows {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let line = &self.data[r * w..(r + 1) * w];
                for (o, &a) in self.obj.iter_mut().zip(line) {
                    *o += cb * a;
                }
            }
        }
    }

    /// Bland-rule pivoting over columns `< limit`. Returns `false` on an
    /// unbounded direction.
    fn iterate(&mut self, limit: usize) -> Result<bool, LpError> {
        for _ in 0..MAX_PIVOTS {
            let Some(enter) = (0..limit).find(|&j| self.obj[j] < -OPTIMALITY_TOL) else {
                return Ok(true);
            };
            let Some(leave) = self.ratio_test(enter) else {
                return Ok(false);
            };
            self.pivot(leave, enter);
        }
        Err(LpError::IterationLimit(MAX_PIVOTS))
    }

    fn ratio_test(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, col);
            if a > PIVOT_TOL {
                let ratio = self.at(r, self.cols) / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        let tie = (ratio - bv).abs() <= 1e-12 * (1.0 + bv.abs());
                        if (!tie && ratio < bv) || (tie && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.data[row * w + col];
        {
            let line = &mut self.data[row * w..(row + 1) * w];
            line.iter_mut().for_each(|v| *v /= p);
            line[col] = 1.0;
        }
        let (before, rest) = self.data.split_at_mut(row * w);
        let (pivot_line, after) = rest.split_at_mut(w);
        for line in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = line[col];
            if f != 0.0 {
                for (v, &pv) in line.iter_mut().zip(pivot_line.iter()) {
                    *v -= f * pv;
                }
                line[col] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, &pv) in self.obj.iter_mut().zip(pivot_line.iter()) {
                *v -= f * pv;
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Pivot zero-level artificials out of the basis where a non-artificial
    /// column allows it; rows where none does are redundant and left alone.
    fn evict_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] >= self.first_artificial {
                let col = (0..self.first_artificial)
                    .filter(|&j| self.at(r, j).abs() > 1e-9)
                    .max_by(|&a, &b| self.at(r, a).abs().total_cmp(&self.at(r, b).abs()));
                if let Some(c) = col {
                    self.pivot(r, c);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bounded_variable() {
        let lp = LinearProgram::maximize(vec![1.0]).le(vec![1.0], 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equality_simplex() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0]).eq(vec![1.0, 1.0], 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-12);
        assert!(lp.max_violation(&sol.primal) < 1e-12);
    }

    #[test]
    fn no_upper_bound_is_unbounded() {
        let lp = LinearProgram::maximize(vec![1.0]).le(vec![-1.0], 0.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let lp = LinearProgram::maximize(vec![1.0, 0.0])
            .eq(vec![1.0, 1.0], 1.0)
            .ge(vec![1.0, 1.0], 2.0);
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn negative_rhs_rows_are_normalised() {
        // x ≥ 2 written as −x ≤ −2, minimise x  →  x = 2
        let lp = LinearProgram::maximize(vec![-1.0]).le(vec![-1.0], -2.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.primal[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::maximize(vec![1.0, 2.0])
            .eq(vec![1.0, 1.0], 1.0)
            .eq(vec![2.0, 2.0], 2.0);
        let sol = solve(&lp).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn free_variables_can_go_negative() {
        // max −x s.t. x ≥ −3 (free)  →  x = −3
        let lp = LinearProgram::maximize(vec![-1.0]).ge(vec![1.0], -3.0).free_variables();
        let sol = solve(&lp).unwrap();
        assert!((sol.primal[0] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let lp = LinearProgram::maximize(vec![1.0, 1.0]).le(vec![1.0], 1.0);
        assert!(matches!(solve(&lp), Err(LpError::MalformedProgram(_))));
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.eq_matrix.push(vec![1.0]);
        assert!(matches!(solve(&lp), Err(LpError::MalformedProgram(_))));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the textbook largest-coefficient rule.
        let lp = LinearProgram::maximize(vec![0.75, -150.0, 0.02, -6.0])
            .le(vec![0.25, -60.0, -0.04, 9.0], 0.0)
            .le(vec![0.5, -90.0, -0.02, 3.0], 0.0)
            .le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 0.05).abs() < 1e-9);
    }
}
