//! Exact linear programming over the rationals.
//!
//! ## Algorithm Overview
//!
//! A textbook two-phase primal simplex on the full tableau. General-form
//! programs are normalized first: equality rows split into opposing
//! inequalities, free variables split into nonnegative pairs, one slack or
//! surplus column per row, rows flipped so the right-hand side is
//! nonnegative. Phase 1 minimizes the sum of artificial variables from the
//! all-artificial basis; phase 2 re-prices the real objective. Pivots follow
//! Bland's rule (lowest eligible entering index, lowest basis index on ratio
//! ties), which rules out cycling without any perturbation, so termination
//! is unconditional. With exact rational pivots the reported optimum is a
//! true vertex value, never an approximation.
//!
//! The module also hosts the strict-interior probe for H-polyhedra used by
//! every full-dimensionality test in the crate: maximize `t` subject to
//! `Ax + t·1 ≤ b, t ≤ 1`; the polyhedron has nonempty interior exactly when
//! the optimum is positive.

use crate::linalg::{Rational, RationalVector};
use crate::polyhedron::HPolyhedron;
use num_traits::{One, Signed, Zero};
use std::sync::atomic::{AtomicU64, Ordering};

/// Constraint relation in a general-form program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Objective sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Solver status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// A general-form linear program over free rational variables.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n: usize,
    constraints: Vec<(RationalVector, Relation, Rational)>,
    objective: Option<(Sense, RationalVector)>,
}

/// Solve outcome. `point` and `value` are present exactly on `Optimal`;
/// feasibility-only programs report an arbitrary feasible point and no value.
#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub point: Option<RationalVector>,
    pub value: Option<Rational>,
}

static LP_SOLVES: AtomicU64 = AtomicU64::new(0);

/// Number of simplex solves since process start (cheap instrumentation for
/// verdict statistics).
pub fn lp_solve_count() -> u64 {
    LP_SOLVES.load(Ordering::Relaxed)
}

impl LinearProgram {
    /// A program over `n` free variables with no constraints or objective.
    pub fn new(n: usize) -> Self {
        LinearProgram {
            n,
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Adds `a·x rel b`. Panics if `a` has the wrong length.
    pub fn constraint(&mut self, a: RationalVector, rel: Relation, b: Rational) {
        assert_eq!(a.len(), self.n, "constraint: dimension mismatch");
        self.constraints.push((a, rel, b));
    }

    pub fn maximize(&mut self, c: RationalVector) {
        assert_eq!(c.len(), self.n, "objective: dimension mismatch");
        self.objective = Some((Sense::Maximize, c));
    }

    pub fn minimize(&mut self, c: RationalVector) {
        assert_eq!(c.len(), self.n, "objective: dimension mismatch");
        self.objective = Some((Sense::Minimize, c));
    }

    /// Solves the program exactly.
    pub fn solve(&self) -> LpResult {
        LP_SOLVES.fetch_add(1, Ordering::Relaxed);

        // Equalities become opposing inequality pairs before standardization.
        let mut rows: Vec<(RationalVector, bool, Rational)> = Vec::new(); // (a, is_le, b)
        for (a, rel, b) in &self.constraints {
            match rel {
                Relation::Le => rows.push((a.clone(), true, b.clone())),
                Relation::Ge => rows.push((a.clone(), false, b.clone())),
                Relation::Eq => {
                    rows.push((a.clone(), true, b.clone()));
                    rows.push((a.clone(), false, b.clone()));
                }
            }
        }

        let n = self.n;
        let m = rows.len();
        // Standard-form columns: x⁺ (n), x⁻ (n), one slack per row.
        let cols = 2 * n + m;

        let mut a_std: Vec<RationalVector> = Vec::with_capacity(m);
        let mut b_std: Vec<Rational> = Vec::with_capacity(m);
        for (i, (a, is_le, b)) in rows.iter().enumerate() {
            let mut row = vec![Rational::zero(); cols];
            for j in 0..n {
                row[j] = a[j].clone();
                row[n + j] = -a[j].clone();
            }
            row[2 * n + i] = if *is_le { Rational::one() } else { -Rational::one() };
            let mut rhs = b.clone();
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                rhs = -rhs;
            }
            a_std.push(row);
            b_std.push(rhs);
        }

        // Minimization cost over standard columns.
        let mut c_std = vec![Rational::zero(); cols];
        if let Some((sense, c)) = &self.objective {
            for j in 0..n {
                let cj = match sense {
                    Sense::Minimize => c[j].clone(),
                    Sense::Maximize => -c[j].clone(),
                };
                c_std[j] = cj.clone();
                c_std[n + j] = -cj;
            }
        }

        let outcome = simplex_standard(a_std, b_std, &c_std);
        match outcome {
            StdOutcome::Infeasible => LpResult {
                status: LpStatus::Infeasible,
                point: None,
                value: None,
            },
            StdOutcome::Unbounded => LpResult {
                status: LpStatus::Unbounded,
                point: None,
                value: None,
            },
            StdOutcome::Optimal(z) => {
                let x: RationalVector = (0..n).map(|j| &z[j] - &z[n + j]).collect();
                let value = self.objective.as_ref().map(|(sense, c)| {
                    let v: Rational = c.iter().zip(&x).map(|(cj, xj)| cj * xj).sum();
                    let _ = sense;
                    v
                });
                LpResult {
                    status: LpStatus::Optimal,
                    point: Some(x),
                    value,
                }
            }
        }
    }
}

enum StdOutcome {
    Optimal(RationalVector),
    Infeasible,
    Unbounded,
}

/// Two-phase simplex on `min c·z : A z = b, z ≥ 0` with `b ≥ 0`.
fn simplex_standard(
    mut a: Vec<RationalVector>,
    mut b: Vec<Rational>,
    c: &[Rational],
) -> StdOutcome {
    let m = a.len();
    let cols = c.len();
    let art_start = cols;

    // Phase 1: append artificial identity columns, basis = artificials.
    for (i, row) in a.iter_mut().enumerate() {
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
    }
    let total = cols + m;
    let mut basis: Vec<usize> = (art_start..total).collect();

    // Phase-1 reduced cost row: cost 1 on artificials, priced out against the
    // artificial basis, i.e. cost_j = -Σ_rows a[r][j] on real columns.
    let mut cost = vec![Rational::zero(); total];
    for j in 0..cols {
        let s: Rational = a.iter().map(|row| row[j].clone()).sum();
        cost[j] = -s;
    }

    run_bland(&mut a, &mut b, &mut cost, &mut basis, total);

    let phase1: Rational = basis
        .iter()
        .zip(&b)
        .filter(|(&j, _)| j >= art_start)
        .map(|(_, rhs)| rhs.clone())
        .sum();
    if phase1.is_positive() {
        return StdOutcome::Infeasible;
    }

    // Pivot residual artificials out of the basis; fully zero rows are
    // redundant constraints and are dropped.
    let mut r = 0;
    while r < a.len() {
        if basis[r] >= art_start {
            if let Some(j) = (0..cols).find(|&j| !a[r][j].is_zero()) {
                let width = art_start + a.len();
                pivot(&mut a, &mut b, &mut cost, &mut basis, r, j, width);
            } else {
                a.remove(r);
                b.remove(r);
                basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Drop artificial columns.
    for row in a.iter_mut() {
        row.truncate(cols);
    }

    // Phase 2: price the real objective against the current basis.
    let mut cost2: RationalVector = c.to_vec();
    for (r, &bj) in basis.iter().enumerate() {
        if !c[bj].is_zero() {
            let f = c[bj].clone();
            for j in 0..cols {
                let delta = &f * &a[r][j];
                cost2[j] = &cost2[j] - delta;
            }
        }
    }

    if !run_bland(&mut a, &mut b, &mut cost2, &mut basis, cols) {
        return StdOutcome::Unbounded;
    }

    let mut z = vec![Rational::zero(); cols];
    for (r, &j) in basis.iter().enumerate() {
        z[j] = b[r].clone();
    }
    StdOutcome::Optimal(z)
}

/// Bland-rule simplex loop. Returns `false` when an unbounded ray is found.
fn run_bland(
    a: &mut [RationalVector],
    b: &mut [Rational],
    cost: &mut RationalVector,
    basis: &mut [usize],
    active_cols: usize,
) -> bool {
    loop {
        // Entering: lowest index with negative reduced cost.
        let Some(enter) = (0..active_cols).find(|&j| cost[j].is_negative()) else {
            return true;
        };
        // Leaving: minimum ratio, ties to the lowest basis index.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for r in 0..a.len() {
            if a[r][enter].is_positive() {
                let ratio = &b[r] / &a[r][enter];
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        ratio < *cur || (ratio == *cur && basis[r] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
        }
        let Some(r) = leave else {
            return false;
        };
        pivot(a, b, cost, basis, r, enter, cost.len());
    }
}

fn pivot(
    a: &mut [RationalVector],
    b: &mut [Rational],
    cost: &mut RationalVector,
    basis: &mut [usize],
    r: usize,
    j: usize,
    width: usize,
) {
    let p = a[r][j].clone();
    for v in a[r].iter_mut() {
        *v = &*v / &p;
    }
    b[r] = &b[r] / &p;
    for i in 0..a.len() {
        if i != r && !a[i][j].is_zero() {
            let f = a[i][j].clone();
            for k in 0..width.min(a[i].len()) {
                let delta = &f * &a[r][k];
                a[i][k] = &a[i][k] - delta;
            }
            let delta = &f * &b[r];
            b[i] = &b[i] - delta;
        }
    }
    if !cost[j].is_zero() {
        let f = cost[j].clone();
        for k in 0..width.min(cost.len()) {
            let delta = &f * &a[r][k];
            cost[k] = &cost[k] - delta;
        }
    }
    basis[r] = j;
}

/// Strict interior point of `{x : Ax ≤ b}`, or `None` when the interior is
/// empty (including the empty polyhedron).
///
/// Solves `max t : Ax + t·1 ≤ b, t ≤ 1`; any optimum with `t > 0` certifies
/// the returned point satisfies every row strictly, and `t ≤ 0` certifies
/// that no strict point exists. The cap `t ≤ 1` keeps the objective bounded
/// even on unbounded polyhedra.
pub fn interior_point(p: &HPolyhedron) -> Option<RationalVector> {
    let n = p.dim();
    let mut lp = LinearProgram::new(n + 1);
    for (a, b) in p.rows() {
        let mut row = a.clone();
        row.push(Rational::one());
        lp.constraint(row, Relation::Le, b.clone());
    }
    let mut tcap = vec![Rational::zero(); n];
    tcap.push(Rational::one());
    lp.constraint(tcap.clone(), Relation::Le, Rational::one());
    lp.maximize(tcap);

    let res = lp.solve();
    match res.status {
        LpStatus::Optimal => {
            let point = res.point.unwrap();
            if res.value.unwrap().is_positive() {
                Some(point[..n].to_vec())
            } else {
                None
            }
        }
        // Unreachable in practice: t can always retreat, and t ≤ 1 bounds the
        // objective. Treat defensively as "no interior".
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn pentagon() -> Vec<(RationalVector, Rational)> {
        // conv{(1,0),(0,1),(1,2),(2,2),(2,1)} as five halfspaces.
        vec![
            (vec![rat(-1), rat(-1)], rat(-1)),
            (vec![rat(-1), rat(1)], rat(1)),
            (vec![rat(0), rat(1)], rat(2)),
            (vec![rat(1), rat(0)], rat(2)),
            (vec![rat(1), rat(-1)], rat(1)),
        ]
    }

    #[test]
    fn maximizes_over_the_pentagon() {
        let mut lp = LinearProgram::new(2);
        for (a, b) in pentagon() {
            lp.constraint(a, Relation::Le, b);
        }
        lp.maximize(vec![rat(1), rat(1)]);
        let res = lp.solve();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value.unwrap(), rat(4));
        assert_eq!(res.point.unwrap(), vec![rat(2), rat(2)]);
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LinearProgram::new(1);
        lp.constraint(vec![rat(1)], Relation::Le, rat(0));
        lp.constraint(vec![rat(1)], Relation::Ge, rat(1));
        assert_eq!(lp.solve().status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unboundedness() {
        let mut lp = LinearProgram::new(2);
        lp.constraint(vec![rat(1), rat(0)], Relation::Ge, rat(0));
        lp.maximize(vec![rat(1), rat(0)]);
        assert_eq!(lp.solve().status, LpStatus::Unbounded);
    }

    #[test]
    fn handles_equalities_and_bounds() {
        let mut lp = LinearProgram::new(2);
        lp.constraint(vec![rat(1), rat(1)], Relation::Eq, rat(2));
        for j in 0..2 {
            let mut e = vec![rat(0), rat(0)];
            e[j] = rat(1);
            lp.constraint(e.clone(), Relation::Ge, rat(0));
            lp.constraint(e, Relation::Le, rat(1));
        }
        lp.maximize(vec![rat(1), rat(0)]);
        let res = lp.solve();
        assert_eq!(res.status, LpStatus::Optimal);
        assert_eq!(res.value.unwrap(), rat(1));
        let p = res.point.unwrap();
        assert_eq!(&p[0] + &p[1], rat(2));
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x + y : 2x + y ≤ 2, x + 3y ≤ 3, x,y ≥ 0 → (3/5, 4/5), value 7/5.
        let mut lp = LinearProgram::new(2);
        lp.constraint(vec![rat(2), rat(1)], Relation::Le, rat(2));
        lp.constraint(vec![rat(1), rat(3)], Relation::Le, rat(3));
        lp.constraint(vec![rat(1), rat(0)], Relation::Ge, rat(0));
        lp.constraint(vec![rat(0), rat(1)], Relation::Ge, rat(0));
        lp.maximize(vec![rat(1), rat(1)]);
        let res = lp.solve();
        assert_eq!(res.value.unwrap(), ratio(7, 5));
        assert_eq!(res.point.unwrap(), vec![ratio(3, 5), ratio(4, 5)]);
    }

    /// Weak-duality spot check: for `max c·x : Ax ≤ b, x ≥ 0` the hand-built
    /// dual `min b·y : Aᵀy ≥ c, y ≥ 0` must reach the same value.
    #[test]
    fn primal_matches_hand_built_dual() {
        let cases: Vec<(Vec<Vec<i64>>, Vec<i64>, Vec<i64>)> = vec![
            (vec![vec![2, 1], vec![1, 3]], vec![2, 3], vec![1, 1]),
            (vec![vec![1, 0], vec![0, 1], vec![1, 1]], vec![2, 2, 3], vec![3, 2]),
            (vec![vec![1, 2, 1], vec![3, 0, 2]], vec![4, 6], vec![2, 1, 1]),
            // Degenerate: redundant row active at the optimum.
            (vec![vec![1, 1], vec![1, 1], vec![1, 0]], vec![2, 2, 1], vec![1, 1]),
        ];
        for (a, b, c) in cases {
            let m = a.len();
            let n = c.len();
            let mut primal = LinearProgram::new(n);
            for (row, bi) in a.iter().zip(&b) {
                primal.constraint(row.iter().map(|&v| rat(v)).collect(), Relation::Le, rat(*bi));
            }
            for j in 0..n {
                let mut e = vec![rat(0); n];
                e[j] = rat(1);
                primal.constraint(e, Relation::Ge, rat(0));
            }
            primal.maximize(c.iter().map(|&v| rat(v)).collect());

            let mut dual = LinearProgram::new(m);
            for j in 0..n {
                let col: RationalVector = (0..m).map(|i| rat(a[i][j])).collect();
                dual.constraint(col, Relation::Ge, rat(c[j]));
            }
            for i in 0..m {
                let mut e = vec![rat(0); m];
                e[i] = rat(1);
                dual.constraint(e, Relation::Ge, rat(0));
            }
            dual.minimize(b.iter().map(|&v| rat(v)).collect());

            let pv = primal.solve().value.expect("primal optimal");
            let dv = dual.solve().value.expect("dual optimal");
            assert_eq!(pv, dv, "duality gap on a case");
        }
    }

    #[test]
    fn interior_point_on_boxes_and_degenerate_sets() {
        let square = HPolyhedron::from_bounds(2, &rat(-1), &rat(1));
        let p = interior_point(&square).expect("unit square has interior");
        assert!(p.iter().all(|c| c.abs() < rat(1)));

        // The line x₁ = 0 in the plane has no interior.
        let line = HPolyhedron::new(vec![
            (vec![rat(1), rat(0)], rat(0)),
            (vec![rat(-1), rat(0)], rat(0)),
        ]);
        assert!(interior_point(&line).is_none());

        // Empty set.
        let empty = HPolyhedron::new(vec![
            (vec![rat(1)], rat(-1)),
            (vec![rat(-1)], rat(0)),
        ]);
        assert!(interior_point(&empty).is_none());

        // Unbounded half-plane still yields a strict point.
        let half = HPolyhedron::new(vec![(vec![rat(1), rat(0)], rat(0))]);
        let p = interior_point(&half).expect("halfspace has interior");
        assert!(p[0] < rat(0));
    }

    /// Grid cross-check: on small 2-d polyhedra with coefficients ≤ 8, the
    /// interior probe agrees with a brute rational grid of step 1/8.
    #[test]
    fn interior_point_agrees_with_grid_search() {
        let cases = vec![
            HPolyhedron::new(vec![
                (vec![rat(1), rat(1)], rat(2)),
                (vec![rat(-1), rat(0)], rat(0)),
                (vec![rat(0), rat(-1)], rat(0)),
            ]),
            // Thin but full-dimensional sliver.
            HPolyhedron::new(vec![
                (vec![rat(4), rat(-4)], rat(1)),
                (vec![rat(-4), rat(4)], rat(0)),
                (vec![rat(1), rat(0)], rat(2)),
                (vec![rat(-1), rat(0)], rat(2)),
            ]),
            // Equality trap: x + y = 1 as two rows, no interior.
            HPolyhedron::new(vec![
                (vec![rat(1), rat(1)], rat(1)),
                (vec![rat(-1), rat(-1)], rat(-1)),
            ]),
        ];
        for p in cases {
            let lp_says = interior_point(&p).is_some();
            let mut grid_says = false;
            'outer: for i in -32..=32 {
                for j in -32..=32 {
                    let x = vec![ratio(i, 8), ratio(j, 8)];
                    if p.contains_strict(&x) {
                        grid_says = true;
                        break 'outer;
                    }
                }
            }
            assert_eq!(lp_says, grid_says);
        }
    }
}
