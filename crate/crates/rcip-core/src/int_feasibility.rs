//! Lexicographic lattice scanning over convex domains with removed regions.
//!
//! [`feasible_points`] enumerates, in lexicographic order, the lattice
//! points of `domain ∩ box` that survive the removal of a list of evaluable
//! regions. It is the workhorse behind three callers:
//!
//! * the plain convex case (no removed sets): first point found is the
//!   lexicographically minimal integer point of the domain;
//! * the brute-force reference oracle: domain and removed sets evaluated
//!   exactly at every box candidate — removed regions here may be arbitrary
//!   quadratic sublevel sets, convex or not, since they are only ever
//!   *evaluated*, never used to prune;
//! * scan-based piece oracles in the decomposition pipeline, where a
//!   certified vertex argument is unavailable.
//!
//! # Pruning
//!
//! The recursion fixes coordinates left to right. At depth `k` the domain's
//! [`ConvexSet::coord_interval`] yields a certified window for coordinate
//! `k` over the fiber of the chosen prefix, so subtrees without any domain
//! point are never entered. Removed sets cannot prune (they are holes, not
//! constraints); they are checked exactly at the leaves together with a
//! final exact domain membership test, which also absorbs any looseness in
//! the window bounds.
//!
//! # Feasibility and optimization oracles
//!
//! [`convex_int_feasible`] answers "does `C ∩ box` contain a lattice
//! point?" by the pruned scan after tightening the box with the set's own
//! certified directional bounds. [`convex_int_optimize`] maximizes or
//! minimizes a rational linear functional over `C ∩ box ∩ ℤⁿ` exactly,
//! breaking value ties lexicographically so results are reproducible.
//!
//! # The brute-force oracle
//!
//! [`brute_force_all`] visits *every* lattice point of the box with no
//! pruning whatsoever and keeps the survivors of `(∪ domains) \
//! (∪ removed)`. Its independence from the window machinery is the point:
//! it is the reference every pruned or decomposed path is tested against.

use num_bigint::BigInt;

use crate::convex::ConvexSet;
use crate::integer_hull::Guards;
use crate::linalg::{dot, rat, to_rational_vec, zeros, Rational, RationalVector};
use crate::{Error, Removal, Result};

/// Lex-ordered feasible lattice points of `(domain ∩ box) \ removed`,
/// stopping after `limit` points.
///
/// `bounds` gives per-coordinate closed windows (the instance box). The
/// visit counter guards the total number of integer candidates touched.
pub fn feasible_points(
    domain: &ConvexSet,
    bounds: &[(Rational, Rational)],
    removed: &[ConvexSet],
    removal: Removal,
    guards: &Guards,
    limit: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let n = domain.dim();
    assert_eq!(bounds.len(), n, "feasible_points: bounds/dimension mismatch");
    if n > guards.max_dim {
        return Err(Error::GuardExceeded(format!(
            "dimension {n} exceeds the guard {}",
            guards.max_dim
        )));
    }
    if limit == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut prefix: RationalVector = Vec::with_capacity(n);
    let mut visited = 0u64;
    scan(
        domain,
        bounds,
        removed,
        removal,
        guards.max_candidates,
        limit,
        &mut prefix,
        &mut visited,
        &mut out,
    )?;
    Ok(out)
}

/// Convenience wrapper: the lexicographically minimal surviving point.
pub fn first_feasible_point(
    domain: &ConvexSet,
    bounds: &[(Rational, Rational)],
    removed: &[ConvexSet],
    removal: Removal,
    guards: &Guards,
) -> Result<Option<Vec<BigInt>>> {
    Ok(feasible_points(domain, bounds, removed, removal, guards, 1)?
        .into_iter()
        .next())
}

/// An integer point of `set ∩ box`, or `None`. The box is first tightened
/// per coordinate with the set's certified directional bounds, then the
/// pruned lexicographic scan runs; the first point found is lex-minimal.
pub fn convex_int_feasible(
    set: &ConvexSet,
    bounds: &[(Rational, Rational)],
    guards: &Guards,
) -> Result<Option<Vec<BigInt>>> {
    let tight = tightened_bounds(set, bounds);
    first_feasible_point(set, &tight, &[], Removal::Interior, guards)
}

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptSense {
    Max,
    Min,
}

/// A bounded linear optimization query over the lattice points of a convex
/// set: optimize `directionᵀx` over `set ∩ [−R, R]ⁿ ∩ ℤⁿ`.
#[derive(Debug, Clone)]
pub struct IntOptQuery {
    pub set: ConvexSet,
    pub direction: RationalVector,
    pub sense: OptSense,
    pub box_radius: Rational,
}

/// Exact optimizer of the query, or `None` when the lattice region is
/// empty. Among optimal points the lexicographically smallest is returned
/// (the scan emits points in lex order and ties never displace the
/// incumbent).
pub fn convex_int_optimize(
    q: &IntOptQuery,
    guards: &Guards,
) -> Result<Option<(Vec<BigInt>, Rational)>> {
    let n = q.set.dim();
    assert_eq!(
        q.direction.len(),
        n,
        "convex_int_optimize: direction/dimension mismatch"
    );
    let window = vec![(-q.box_radius.clone(), q.box_radius.clone()); n];
    let tight = tightened_bounds(&q.set, &window);
    let points = feasible_points(&q.set, &tight, &[], Removal::Interior, guards, usize::MAX)?;
    let mut best: Option<(Vec<BigInt>, Rational)> = None;
    for p in points {
        let value = dot(&q.direction, &to_rational_vec(&p));
        let improves = match (&best, q.sense) {
            (None, _) => true,
            (Some((_, incumbent)), OptSense::Max) => value > *incumbent,
            (Some((_, incumbent)), OptSense::Min) => value < *incumbent,
        };
        if improves {
            best = Some((p, value));
        }
    }
    Ok(best)
}

/// Intersects each box window with the set's certified integer bounds along
/// that coordinate, when a finite certificate exists.
fn tightened_bounds(
    set: &ConvexSet,
    bounds: &[(Rational, Rational)],
) -> Vec<(Rational, Rational)> {
    let n = bounds.len();
    let mut tight = bounds.to_vec();
    for (k, window) in tight.iter_mut().enumerate() {
        let mut e = zeros(n);
        e[k] = rat(1);
        if let Some((lo, hi)) = set.interval_int_bounds(&e) {
            if lo > window.0 {
                window.0 = lo;
            }
            if hi < window.1 {
                window.1 = hi;
            }
        }
    }
    tight
}

/// Every surviving lattice point of `(∪ domains) \ (∪ removed)` inside the
/// box, in lexicographic order, stopping after `limit` points. This scan
/// deliberately visits the full box with no pruning: it is the independent
/// reference oracle, so it must not share the window machinery with the
/// paths it checks. The only guard is the box volume itself.
pub fn brute_force_all(
    domains: &[ConvexSet],
    bounds: &[(Rational, Rational)],
    removed: &[ConvexSet],
    removal: Removal,
    guards: &Guards,
    limit: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let mut volume: u128 = 1;
    for (lo, hi) in bounds {
        let lo_i = lo.ceil().to_integer();
        let hi_i = hi.floor().to_integer();
        let width = if hi_i < lo_i {
            0u128
        } else {
            u128::try_from(hi_i - lo_i + 1).unwrap_or(u128::MAX)
        };
        volume = volume.saturating_mul(width);
    }
    if volume > u128::from(guards.max_candidates) {
        return Err(Error::GuardExceeded(format!(
            "brute-force box holds {volume} lattice points, beyond the guard {}",
            guards.max_candidates
        )));
    }
    let mut out = Vec::new();
    let mut point: RationalVector = Vec::with_capacity(bounds.len());
    box_scan(domains, bounds, removed, removal, limit, &mut point, &mut out);
    Ok(out)
}

/// The lexicographically smallest survivor, or `None`.
pub fn brute_force_first(
    domains: &[ConvexSet],
    bounds: &[(Rational, Rational)],
    removed: &[ConvexSet],
    removal: Removal,
    guards: &Guards,
) -> Result<Option<Vec<BigInt>>> {
    Ok(
        brute_force_all(domains, bounds, removed, removal, guards, 1)?
            .into_iter()
            .next(),
    )
}

fn box_scan(
    domains: &[ConvexSet],
    bounds: &[(Rational, Rational)],
    removed: &[ConvexSet],
    removal: Removal,
    limit: usize,
    point: &mut RationalVector,
    out: &mut Vec<Vec<BigInt>>,
) {
    let k = point.len();
    if k == bounds.len() {
        let in_some_domain = domains.iter().any(|d| d.contains(point));
        let removed_here = removed.iter().any(|c| match removal {
            Removal::Interior => c.contains_strict(point),
            Removal::Closed => c.contains(point),
        });
        if in_some_domain && !removed_here {
            out.push(point.iter().map(|c| c.to_integer()).collect());
        }
        return;
    }
    let mut v = bounds[k].0.ceil().to_integer();
    let last = bounds[k].1.floor().to_integer();
    while v <= last && out.len() < limit {
        point.push(Rational::from(v.clone()));
        box_scan(domains, bounds, removed, removal, limit, point, out);
        point.pop();
        v += 1;
    }
}

/// Exact leaf test: inside the domain and not swallowed by any removed set.
pub fn survives(
    domain: &ConvexSet,
    removed: &[ConvexSet],
    removal: Removal,
    x: &[Rational],
) -> bool {
    domain.contains(x)
        && !removed.iter().any(|c| match removal {
            Removal::Interior => c.contains_strict(x),
            Removal::Closed => c.contains(x),
        })
}

#[allow(clippy::too_many_arguments)]
fn scan(
    domain: &ConvexSet,
    bounds: &[(Rational, Rational)],
    removed: &[ConvexSet],
    removal: Removal,
    cap: u64,
    limit: usize,
    prefix: &mut RationalVector,
    visited: &mut u64,
    out: &mut Vec<Vec<BigInt>>,
) -> Result<()> {
    let n = bounds.len();
    let k = prefix.len();
    let Some((lo, hi)) = domain.coord_interval(prefix, &bounds[k].0, &bounds[k].1) else {
        return Ok(());
    };
    let mut v = lo.ceil().to_integer();
    let last = hi.floor().to_integer();
    while v <= last && out.len() < limit {
        *visited += 1;
        if *visited > cap {
            return Err(Error::GuardExceeded(format!(
                "lattice scan visited more than {cap} candidates"
            )));
        }
        prefix.push(Rational::from(v.clone()));
        if k + 1 == n {
            if survives(domain, removed, removal, prefix) {
                out.push(prefix.iter().map(|c| c.to_integer()).collect());
            }
        } else {
            scan(
                domain, bounds, removed, removal, cap, limit, prefix, visited, out,
            )?;
        }
        prefix.pop();
        v += 1;
    }
    Ok(())
}
