//! Weak separation of two convex sets' integer hulls.
//!
//! [`separate_integer_hulls`] looks for a rational hyperplane `aᵀx = b`
//! with every integer point of `C₁` (inside the box) weakly below it and
//! every integer point of `C₂` weakly above it — points *on* the plane are
//! allowed on both sides. Weakness is essential: integer hulls produced by
//! a splitting step routinely share lattice points on a common face, and a
//! strict separator cannot exist there.
//!
//! # The 2n-LP cut-generation scheme
//!
//! A separator normal can always be rescaled so that its largest
//! coefficient has magnitude exactly 1, so one of the `2n` normalizations
//! `aᵢ ≥ 1` (i = 1..n) or `aᵢ ≤ −1` preserves some separator whenever one
//! exists. For each normalization in that fixed order, a master LP in the
//! variables `(a, b)` minimizes the coefficient surrogate `Σ|aⱼ|` (via
//! auxiliary bounds) subject to the lattice rows collected so far; the
//! oracle [`convex_int_optimize`] then maximizes `aᵀx` over `C₁ ∩ ℤⁿ` and
//! minimizes it over `C₂ ∩ ℤⁿ`, and any violating optimizer joins the row
//! pool. A master whose candidate survives both oracle checks is stable and
//! wins. The row pools are shared across normalizations — a lattice row
//! states a fact about *every* weak separator, not about one master.
//!
//! Each counted round either adds a fresh lattice row or is terminal, so
//! the loop finishes within (box lattice count + 1) rounds; exceeding that
//! cap signals an arithmetic bug and raises an internal error rather than
//! looping silently.
//!
//! When all `2n` masters run infeasible, no weak separator of the integer
//! hulls exists; the result is then `Intersecting`, carrying an integer
//! point common to both sets when one exists (the hulls may also cross at
//! fractional points only, in which case the witness is absent).
//!
//! # Exact continuous separators
//!
//! [`continuous_weak_separation`] short-circuits the lattice machinery for
//! two analytically friendly classes: disjoint or externally tangent balls
//! (the plane through the radical center point, orthogonal to the center
//! line) and strictly disjoint polyhedra (a Farkas certificate of the
//! joint system's infeasibility). Everything else — and polyhedra that
//! merely touch — returns `None`, deferring to the integer-hull path.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::bhc::{as_ball, circle_data, cmp_dist_sq_vs_sum};
use crate::convex::ConvexSet;
use crate::int_feasibility::{convex_int_feasible, convex_int_optimize, IntOptQuery, OptSense};
use crate::integer_hull::Guards;
use crate::linalg::{
    dot, normalize_halfspace, rat, sub, to_rational_vec, zeros, Rational, RationalVector,
};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::{Error, Result};

/// Outcome of integer-hull separation.
#[derive(Debug, Clone, PartialEq)]
pub enum SeparationResult {
    /// A weak separator: `aᵀx ≤ b` for every integer point of the first
    /// set in the box and `aᵀy ≥ b` for every integer point of the second.
    /// `a` is a primitive integer vector, so some `|aᵢ| ≥ 1`;
    /// `iterations` counts the oracle rounds spent.
    Separated {
        a: RationalVector,
        b: Rational,
        iterations: usize,
    },
    /// No weak separator exists. `witness` is an integer point lying in
    /// both sets when there is one; `None` means the hulls overlap only at
    /// fractional points.
    Intersecting { witness: Option<Vec<BigInt>> },
}

/// Weakly separates the integer hulls of `c1` and `c2` inside the box, or
/// certifies that no weak separator exists. Both sets must be bounded
/// within the box for the oracle calls to be exhaustive.
pub fn separate_integer_hulls(
    c1: &ConvexSet,
    c2: &ConvexSet,
    bounds: &[(Rational, Rational)],
    guards: &Guards,
) -> Result<SeparationResult> {
    let n = c1.dim();
    if c2.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c2.dim(),
        });
    }
    assert_eq!(bounds.len(), n, "separate_integer_hulls: bounds mismatch");

    let mut lattice: u128 = 1;
    let mut radius = rat(1);
    for (lo, hi) in bounds {
        let lo_i = lo.ceil().to_integer();
        let hi_i = hi.floor().to_integer();
        let width = if hi_i < lo_i {
            0u128
        } else {
            u128::try_from(hi_i - lo_i + 1).unwrap_or(u128::MAX)
        };
        lattice = lattice.saturating_mul(width);
        for v in [lo, hi] {
            if v.abs() > radius {
                radius = v.abs();
            }
        }
    }
    let round_cap = lattice.saturating_add(1);
    // Coefficient box for the masters. Any bound ≥ 1 keeps the scheme
    // complete (a separator rescaled to max-coefficient 1 fits); the wide
    // box leaves the LP room to satisfy accumulated rows cheaply.
    let coeff_bound = {
        let m = rat(4) * rat(n as i64) * &radius;
        if m < rat(1) {
            rat(1)
        } else {
            m
        }
    };

    // Shared row pools: integer points of c1 that must sit weakly below
    // the plane, and of c2 that must sit weakly above.
    let mut below: Vec<RationalVector> = Vec::new();
    let mut above: Vec<RationalVector> = Vec::new();
    let mut rounds: u128 = 0;

    for sign in [1i64, -1] {
        for i in 0..n {
            loop {
                let Some((a, b)) = solve_master(&below, &above, n, i, sign, &coeff_bound)
                else {
                    break;
                };
                rounds += 1;
                if rounds > round_cap {
                    return Err(Error::Internal(format!(
                        "cut generation exceeded {round_cap} rounds; every round must \
                         contribute a fresh lattice row"
                    )));
                }
                let mut stable = true;
                let max1 = convex_int_optimize(
                    &IntOptQuery {
                        set: c1.clone(),
                        direction: a.clone(),
                        sense: OptSense::Max,
                        box_radius: radius.clone(),
                    },
                    guards,
                )?;
                if let Some((p, value)) = max1 {
                    if value > b {
                        below.push(to_rational_vec(&p));
                        stable = false;
                    }
                }
                let min2 = convex_int_optimize(
                    &IntOptQuery {
                        set: c2.clone(),
                        direction: a.clone(),
                        sense: OptSense::Min,
                        box_radius: radius.clone(),
                    },
                    guards,
                )?;
                if let Some((p, value)) = min2 {
                    if value < b {
                        above.push(to_rational_vec(&p));
                        stable = false;
                    }
                }
                if stable {
                    let (a, b) = normalize_halfspace(&a, &b);
                    return Ok(SeparationResult::Separated {
                        a,
                        b,
                        iterations: usize::try_from(rounds).unwrap_or(usize::MAX),
                    });
                }
            }
        }
    }

    let witness = convex_int_feasible(
        &ConvexSet::intersection(vec![c1.clone(), c2.clone()]),
        bounds,
        guards,
    )?;
    Ok(SeparationResult::Intersecting { witness })
}

/// One master LP: variables `(a, b, t)` with the normalization
/// `sign · aᵢ ≥ 1`, coefficient box `|aⱼ| ≤ M`, the accumulated lattice
/// rows, and objective `min Σtⱼ` where `tⱼ ≥ |aⱼ|`. Returns the candidate
/// plane, or `None` when the master is infeasible.
fn solve_master(
    below: &[RationalVector],
    above: &[RationalVector],
    n: usize,
    i: usize,
    sign: i64,
    coeff_bound: &Rational,
) -> Option<(RationalVector, Rational)> {
    // Variable layout: a (n), b (1), t (n).
    let width = 2 * n + 1;
    let b_idx = n;
    let mut lp = LinearProgram::new(width);
    for p in below {
        let mut row = zeros(width);
        row[..n].clone_from_slice(p);
        row[b_idx] = rat(-1);
        lp.constraint(row, Relation::Le, rat(0));
    }
    for p in above {
        let mut row = zeros(width);
        row[..n].clone_from_slice(p);
        row[b_idx] = rat(-1);
        lp.constraint(row, Relation::Ge, rat(0));
    }
    for j in 0..n {
        let mut box_row = zeros(width);
        box_row[j] = rat(1);
        lp.constraint(box_row.clone(), Relation::Le, coeff_bound.clone());
        lp.constraint(box_row, Relation::Ge, -coeff_bound.clone());
        let mut t_upper = zeros(width);
        t_upper[j] = rat(1);
        t_upper[n + 1 + j] = rat(-1);
        lp.constraint(t_upper, Relation::Le, rat(0));
        let mut t_lower = zeros(width);
        t_lower[j] = rat(-1);
        t_lower[n + 1 + j] = rat(-1);
        lp.constraint(t_lower, Relation::Le, rat(0));
    }
    let mut norm = zeros(width);
    norm[i] = rat(sign);
    lp.constraint(norm, Relation::Ge, rat(1));
    let mut objective = zeros(width);
    for j in 0..n {
        objective[n + 1 + j] = rat(1);
    }
    lp.minimize(objective);
    let res = lp.solve();
    if res.status != LpStatus::Optimal {
        return None;
    }
    let x = res.point.unwrap();
    Some((x[..n].to_vec(), x[b_idx].clone()))
}

/// Exact weak separator for analytically friendly pairs: `None` whenever
/// the class-specific construction does not apply, deferring to
/// [`separate_integer_hulls`].
///
/// * Two balls with `d ≥ r₁ + r₂` (exact on squared data): the plane
///   through the radical center point `z₀`, orthogonal to the center line.
///   It supports both balls weakly — at external tangency it passes
///   through the touch point.
/// * Two polyhedra with *strictly* disjoint: a Farkas certificate of the
///   joint system `A₁x ≤ b₁, A₂x ≤ b₂` being infeasible, split down the
///   middle of the certified gap. Touching polyhedra return `None` (the
///   certificate requires a positive gap).
pub fn continuous_weak_separation(
    c1: &ConvexSet,
    c2: &ConvexSet,
) -> Option<(RationalVector, Rational)> {
    if let (Some(b1), Some(b2)) = (as_ball(c1), as_ball(c2)) {
        let dsq = crate::linalg::norm_sq(&sub(&b2.center, &b1.center));
        if cmp_dist_sq_vs_sum(&dsq, &b1.radius_sq, &b2.radius_sq) == Ordering::Less {
            return None;
        }
        let circle = circle_data(&b1, &b2).expect("separated balls have distinct centers");
        let a = sub(&b2.center, &b1.center);
        let b = dot(&a, &circle.center);
        return Some(normalize_halfspace(&a, &b));
    }
    if let (ConvexSet::Polyhedron(p1), ConvexSet::Polyhedron(p2)) = (c1, c2) {
        return polyhedral_separator(p1.rows(), p2.rows(), c1.dim());
    }
    None
}

/// Farkas-based separator for strictly disjoint polyhedra: multipliers
/// `u, w ≥ 0` with `A₁ᵀu + A₂ᵀw = 0` and `b₁ᵀu + b₂ᵀw ≤ −1` prove the
/// joint system infeasible and yield `a = A₁ᵀu` with
/// `sup_{C₁} aᵀx ≤ b₁ᵀu < −b₂ᵀw ≤ inf_{C₂} aᵀy`; the plane sits at the
/// midpoint of that gap.
fn polyhedral_separator(
    rows1: &[(RationalVector, Rational)],
    rows2: &[(RationalVector, Rational)],
    n: usize,
) -> Option<(RationalVector, Rational)> {
    let (m1, m2) = (rows1.len(), rows2.len());
    if m1 == 0 || m2 == 0 {
        return None;
    }
    let width = m1 + m2;
    let mut lp = LinearProgram::new(width);
    for j in 0..width {
        let mut e = zeros(width);
        e[j] = rat(1);
        lp.constraint(e, Relation::Ge, rat(0));
    }
    for coord in 0..n {
        let mut row = zeros(width);
        for (k, (a, _)) in rows1.iter().enumerate() {
            row[k] = a[coord].clone();
        }
        for (k, (a, _)) in rows2.iter().enumerate() {
            row[m1 + k] = a[coord].clone();
        }
        lp.constraint(row, Relation::Eq, rat(0));
    }
    let mut gap_row = zeros(width);
    for (k, (_, b)) in rows1.iter().enumerate() {
        gap_row[k] = b.clone();
    }
    for (k, (_, b)) in rows2.iter().enumerate() {
        gap_row[m1 + k] = b.clone();
    }
    lp.constraint(gap_row, Relation::Le, rat(-1));
    let mut objective = zeros(width);
    objective.fill(rat(1));
    lp.minimize(objective);
    let res = lp.solve();
    if res.status != LpStatus::Optimal {
        return None;
    }
    let x = res.point.unwrap();
    let mut a = zeros(n);
    let mut upper = rat(0);
    for (k, (row_a, row_b)) in rows1.iter().enumerate() {
        for coord in 0..n {
            a[coord] += &x[k] * &row_a[coord];
        }
        upper += &x[k] * row_b;
    }
    if a.iter().all(|v| v.is_zero()) {
        // One side is itself empty; there is no meaningful plane.
        return None;
    }
    let mut lower_neg = rat(0);
    for (k, (_, row_b)) in rows2.iter().enumerate() {
        lower_neg += &x[m1 + k] * row_b;
    }
    let b = (upper - lower_neg) / rat(2);
    Some(normalize_halfspace(&a, &b))
}
