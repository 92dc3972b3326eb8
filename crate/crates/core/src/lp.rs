//! Dense two-phase simplex and the phase-duration linear program.
//!
//! With the schedule free, every protocol's constraints are jointly linear in
//! `(Δ, R_a, R_b)`. Maximizing `mu R_a + (1 - mu) R_b` over that polytope gives
//! one support point of the optimized rate region per weight `mu`.

use serde::Serialize;

use crate::channel::MiTable;
use crate::error::{Error, Result};
use crate::protocol::{build_constraints, BoundKind, PhaseSchedule, Protocol};
use crate::region::{RatePair, RateRegion};

const PIVOT_TOL: f64 = 1e-11;
const PHASE_ONE_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

/// `maximize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    a_ub: Vec<Vec<f64>>,
    b_ub: Vec<f64>,
    a_eq: Vec<Vec<f64>>,
    b_eq: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Result<Self> {
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("objective", "coefficients must be finite"));
        }
        Ok(Self {
            objective,
            a_ub: Vec::new(),
            b_ub: Vec::new(),
            a_eq: Vec::new(),
            b_eq: Vec::new(),
        })
    }

    fn check_row(&self, row: &[f64], rhs: f64) -> Result<()> {
        if row.len() != self.objective.len() {
            return Err(Error::invalid(
                "constraint",
                format!("row has {} coefficients, expected {}", row.len(), self.objective.len()),
            ));
        }
        if row.iter().any(|c| !c.is_finite()) || !rhs.is_finite() {
            return Err(Error::invalid("constraint", "coefficients must be finite"));
        }
        Ok(())
    }

    pub fn less_eq(mut self, row: Vec<f64>, rhs: f64) -> Result<Self> {
        self.check_row(&row, rhs)?;
        self.a_ub.push(row);
        self.b_ub.push(rhs);
        Ok(self)
    }

    pub fn equal(mut self, row: Vec<f64>, rhs: f64) -> Result<Self> {
        self.check_row(&row, rhs)?;
        self.a_eq.push(row);
        self.b_eq.push(rhs);
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// Inequality rows followed by equality rows.
    pub fn rows(&self) -> impl Iterator<Item = (&[f64], f64, bool)> {
        let ub = self.a_ub.iter().zip(&self.b_ub).map(|(r, b)| (r.as_slice(), *b, false));
        let eq = self.a_eq.iter().zip(&self.b_eq).map(|(r, b)| (r.as_slice(), *b, true));
        ub.chain(eq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; NaN unless optimal.
    pub value: f64,
    /// Variable assignment; empty unless optimal.
    pub point: Vec<f64>,
    /// Reduced costs of the variables followed by the inequality slacks at the
    /// final basis (zero for basic columns); empty unless optimal.
    pub reduced_costs: Vec<f64>,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns `< allowed` using Bland's rule.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Outcome {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&b, row)| cost[b] * row[j])
                        .sum::<f64>();
                reduced > PIVOT_TOL
            });
            let Some(c) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * lr.abs().max(1.0);
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Outcome::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
        panic!("simplex exceeded {MAX_PIVOTS} pivots; Bland's rule should prevent cycling");
    }
}

/// Solves `lp` with a dense two-phase simplex and Bland's anti-cycling rule.
pub fn simplex_solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.num_vars();
    let m_ub = lp.a_ub.len();

    // Columns: originals, one slack per inequality, then artificials.
    let mut rows = Vec::new();
    let mut needs_artificial = Vec::new();
    for (k, (a, b, is_eq)) in lp.rows().enumerate() {
        let mut row = vec![0.0; n + m_ub];
        row[..n].copy_from_slice(a);
        if !is_eq {
            row[n + k] = 1.0;
        }
        let mut rhs = b;
        if rhs < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
        }
        needs_artificial.push(is_eq || b < 0.0);
        row.push(rhs);
        rows.push(row);
    }
    let n_art = needs_artificial.iter().filter(|&&x| x).count();
    let cols = n + m_ub + n_art;
    let mut basis = Vec::with_capacity(rows.len());
    let mut next_art = n + m_ub;
    for (k, row) in rows.iter_mut().enumerate() {
        let rhs = row.pop().expect("rhs");
        row.resize(cols, 0.0);
        if needs_artificial[k] {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + k);
        }
        row.push(rhs);
    }
    let mut tab = Tableau { rows, basis, cols };

    if n_art > 0 {
        let mut cost = vec![0.0; cols];
        cost[n + m_ub..].iter_mut().for_each(|c| *c = -1.0);
        tab.optimize(&cost, cols);
        let infeasibility: f64 = (0..tab.rows.len())
            .filter(|&i| tab.basis[i] >= n + m_ub)
            .map(|i| tab.rhs(i))
            .sum();
        if infeasibility > PHASE_ONE_TOL {
            return LpSolution {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                point: Vec::new(),
                reduced_costs: Vec::new(),
            };
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n + m_ub {
                match (0..n + m_ub).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    match tab.optimize(&cost, n + m_ub) {
        Outcome::Unbounded => LpSolution {
            status: LpStatus::Unbounded,
            value: f64::INFINITY,
            point: Vec::new(),
            reduced_costs: Vec::new(),
        },
        Outcome::Optimal => {
            let mut point = vec![0.0; n];
            for (i, &b) in tab.basis.iter().enumerate() {
                if b < n {
                    point[b] = tab.rhs(i).max(0.0);
                }
            }
            let value = point.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
            let reduced_costs = (0..n + m_ub)
                .map(|j| {
                    if tab.basis.contains(&j) {
                        0.0
                    } else {
                        cost[j]
                            - tab
                                .basis
                                .iter()
                                .zip(&tab.rows)
                                .map(|(&b, row)| cost[b] * row[j])
                                .sum::<f64>()
                    }
                })
                .collect();
            LpSolution {
                status: LpStatus::Optimal,
                value,
                point,
                reduced_costs,
            }
        }
    }
}

/// Best schedule and rate pair for one weighting of the two rates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleOptimum {
    pub protocol: Protocol,
    pub bound: BoundKind,
    pub mu: f64,
    pub schedule: PhaseSchedule,
    pub rates: RatePair,
    /// Optimal `mu R_a + (1 - mu) R_b`.
    pub value: f64,
}

impl ScheduleOptimum {
    pub fn sum_rate(&self) -> f64 {
        self.rates.sum()
    }
}

/// The phase-duration LP for one protocol and bound: variables are
/// `Δ_1..Δ_n, R_a, R_b`.
fn schedule_lp(protocol: Protocol, bound: BoundKind, mi: &MiTable, weights: [f64; 2]) -> Result<LinearProgram> {
    let n = protocol.phases();
    let set = build_constraints(protocol, bound, mi)?;
    let mut objective = vec![0.0; n + 2];
    objective[n] = weights[0];
    objective[n + 1] = weights[1];
    let mut lp = LinearProgram::new(objective)?;
    for c in &set.constraints {
        let mut row = c.delta_coefs[..n].to_vec();
        row.extend_from_slice(&c.rate_coefs);
        lp = lp.less_eq(row, 0.0)?;
    }
    let mut simplex = vec![1.0; n];
    simplex.extend_from_slice(&[0.0, 0.0]);
    lp.equal(simplex, 1.0)
}

fn solve_optimal(lp: &LinearProgram) -> Result<LpSolution> {
    let sol = simplex_solve(lp);
    match sol.status {
        LpStatus::Optimal => Ok(sol),
        // Δ = (1, 0, ..), R = 0 is always feasible and rates are bounded by Δ.
        s => Err(Error::invalid("mi_table", format!("schedule LP is {s:?}"))),
    }
}

/// Restricts `lp` to the face on which `sol` is optimal: variables and slacks
/// with a strictly negative reduced cost are pinned at zero.
fn optimal_face(lp: &LinearProgram, sol: &LpSolution) -> Result<LinearProgram> {
    let n = lp.num_vars();
    let scale = lp.objective.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-9 * scale;
    let mut face = lp.clone();
    for (j, &rc) in sol.reduced_costs.iter().enumerate() {
        if rc >= -tol {
            continue;
        }
        if j < n {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            face = face.equal(row, 0.0)?;
        } else {
            let k = j - n;
            face = face.equal(lp.a_ub[k].clone(), lp.b_ub[k])?;
        }
    }
    Ok(face)
}

/// Maximizes `mu R_a + (1 - mu) R_b` jointly over the schedule and the rates.
///
/// Ties on the optimal face are resolved toward larger `R_a`, then larger
/// `R_b`, by two follow-up solves restricted to that face.
pub fn optimize_schedule(protocol: Protocol, bound: BoundKind, mi: &MiTable, mu: f64) -> Result<ScheduleOptimum> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::invalid("mu", format!("must lie in [0, 1], got {mu}")));
    }
    let n = protocol.phases();
    let base = schedule_lp(protocol, bound, mi, [mu, 1.0 - mu])?;
    let first = solve_optimal(&base)?;
    let value = first.value;

    let mut lp = optimal_face(&base, &first)?;
    lp.objective = vec![0.0; n + 2];
    lp.objective[n] = 1.0;
    let second = solve_optimal(&lp)?;

    let mut lp = optimal_face(&lp, &second)?;
    lp.objective = vec![0.0; n + 2];
    lp.objective[n + 1] = 1.0;
    let sol = solve_optimal(&lp)?;

    let mut durations: Vec<f64> = sol.point[..n].iter().map(|d| d.max(0.0)).collect();
    let total: f64 = durations.iter().sum();
    durations.iter_mut().for_each(|d| *d /= total);
    Ok(ScheduleOptimum {
        protocol,
        bound,
        mu,
        schedule: PhaseSchedule::new(protocol, durations)?,
        rates: RatePair::new(sol.point[n], sol.point[n + 1]),
        value,
    })
}

#[cfg(feature = "parallel")]
fn map_weights<T: Send>(mus: &[f64], f: impl Fn(f64) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    mus.par_iter().map(|&m| f(m)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_weights<T>(mus: &[f64], f: impl Fn(f64) -> T) -> Vec<T> {
    mus.iter().map(|&m| f(m)).collect()
}

/// The rate region over all schedules, recovered from LP support points.
///
/// Solves on the grid `mu = k / (mu_grid_size - 1)`, then bisects every gap
/// between neighbouring support points along the gap's own normal until no
/// further vertex appears, so the result is the exact polygon.
pub fn optimized_region(protocol: Protocol, bound: BoundKind, mi: &MiTable, mu_grid_size: usize) -> Result<RateRegion> {
    if mu_grid_size < 2 {
        return Err(Error::invalid(
            "mu_grid_size",
            format!("must be >= 2, got {mu_grid_size}"),
        ));
    }
    let step = (mu_grid_size - 1) as f64;
    // descending mu walks the boundary counterclockwise from the R_a axis
    let mus: Vec<f64> = (0..mu_grid_size).rev().map(|k| k as f64 / step).collect();
    let support = map_weights(&mus, |mu| optimize_schedule(protocol, bound, mi, mu).map(|o| o.rates))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut boundary = vec![support[0]];
    for pair in support.windows(2) {
        refine(protocol, bound, mi, pair[0], pair[1], 0, &mut boundary)?;
        boundary.push(pair[1]);
    }
    let max_a = boundary.iter().map(|p| p.r_a).fold(0.0, f64::max);
    let max_b = boundary.iter().map(|p| p.r_b).fold(0.0, f64::max);
    boundary.extend([RatePair::ORIGIN, RatePair::new(max_a, 0.0), RatePair::new(0.0, max_b)]);
    Ok(RateRegion::hull_of(boundary))
}

fn refine(
    protocol: Protocol,
    bound: BoundKind,
    mi: &MiTable,
    p: RatePair,
    q: RatePair,
    depth: usize,
    out: &mut Vec<RatePair>,
) -> Result<()> {
    let (na, nb) = (q.r_b - p.r_b, p.r_a - q.r_a);
    if depth > 48 || na < 0.0 || nb < 0.0 || na + nb <= 1e-12 {
        return Ok(());
    }
    let mu = na / (na + nb);
    let x = optimize_schedule(protocol, bound, mi, mu)?.rates;
    let score = |v: RatePair| mu * v.r_a + (1.0 - mu) * v.r_b;
    if score(x) > score(p).max(score(q)) + 1e-11 {
        refine(protocol, bound, mi, p, x, depth + 1, out)?;
        out.push(x);
        refine(protocol, bound, mi, x, q, depth + 1, out)?;
    }
    Ok(())
}
