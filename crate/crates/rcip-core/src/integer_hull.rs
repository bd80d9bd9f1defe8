//! Lattice enumeration, integer hulls, and the vertex oracle.
//!
//! The central fact used throughout this crate: for a bounded polyhedron `P`
//! and a *convex* removed region `U`, the set `(P \ U) ∩ ℤⁿ` is nonempty if
//! and only if some vertex of the integer hull `conv(P ∩ ℤⁿ)` lies outside
//! `U`. If every hull vertex lies in `U`, convexity drags the whole hull —
//! hence every lattice point — into `U`; conversely a vertex outside `U` is
//! itself a feasible lattice point. The same argument applies verbatim when
//! `U` is an open convex set (interiors of removed shapes).
//!
//! # Enumeration
//!
//! [`lattice_points`] lists `P ∩ ℤⁿ` in lexicographic order by recursive
//! descent over coordinates: at depth `k` an exact LP computes the interval
//! of coordinate `k` over the fiber of the chosen prefix, and only integers
//! in that interval are visited. Work is therefore proportional to the
//! number of nonempty fibers, not to the volume of the bounding box.
//!
//! # Guards
//!
//! Exact enumeration is intentionally restricted to small instances via
//! [`Guards`]: ambient dimension, coordinate magnitude, and total candidate
//! count (overridable through the `RCIP_GUARD_POINTS` environment variable).
//! Exceeding a guard is a hard error, never silent truncation.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::convex::ConvexSet;
use crate::linalg::{rat, to_rational_vec, zeros, Rational, RationalVector};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::polyhedron::HPolyhedron;
use crate::{Error, Removal, Result};

/// Default cap on enumerated lattice candidates.
pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;

/// Size guards for exact lattice enumeration.
#[derive(Debug, Clone)]
pub struct Guards {
    /// Maximum ambient dimension.
    pub max_dim: usize,
    /// Maximum absolute coordinate of the bounding box.
    pub max_radius: Rational,
    /// Maximum number of lattice candidates visited during enumeration.
    pub max_candidates: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_dim: 4,
            max_radius: rat(64),
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }
}

impl Guards {
    /// Default guards, with the candidate cap overridable via the
    /// `RCIP_GUARD_POINTS` environment variable.
    pub fn from_env() -> Self {
        let mut g = Guards::default();
        if let Ok(v) = std::env::var("RCIP_GUARD_POINTS") {
            if let Ok(cap) = v.trim().parse::<u64>() {
                g.max_candidates = cap;
            }
        }
        g
    }
}

/// Enumerates `p ∩ ℤⁿ` in lexicographic order.  Empty polyhedra enumerate
/// to an empty list.
///
/// Fails with [`Error::InvalidInput`] when `p` is unbounded and with
/// [`Error::GuardExceeded`] when a guard trips.
pub fn lattice_points(p: &HPolyhedron, guards: &Guards) -> Result<Vec<Vec<BigInt>>> {
    let n = p.dim();
    if n > guards.max_dim {
        return Err(Error::GuardExceeded(format!(
            "dimension {n} exceeds the guard {}",
            guards.max_dim
        )));
    }
    let Some(bounds) = p.bounding_box() else {
        let mut lp = LinearProgram::new(n);
        for (a, b) in p.rows() {
            lp.constraint(a.clone(), Relation::Le, b.clone());
        }
        lp.minimize(zeros(n));
        if lp.solve().status == LpStatus::Infeasible {
            return Ok(Vec::new());
        }
        return Err(Error::InvalidInput(
            "lattice enumeration requires a bounded polyhedron".into(),
        ));
    };
    for (lo, hi) in &bounds {
        if lo.abs() > guards.max_radius || hi.abs() > guards.max_radius {
            return Err(Error::GuardExceeded(format!(
                "bounding box reaches beyond radius {}",
                guards.max_radius
            )));
        }
    }
    let section = ConvexSet::polyhedron(p.clone());
    crate::int_feasibility::feasible_points(
        &section,
        &bounds,
        &[],
        Removal::Interior,
        guards,
        usize::MAX,
    )
}

/// Vertices of `conv(points)`, in lexicographic order.
///
/// A point is a vertex exactly when it is not a convex combination of the
/// remaining points.  In the plane this is Andrew's monotone chain with
/// exact integer cross products; in higher dimensions two sound filters —
/// dropping points with both axis neighbors present and points that are
/// integral midpoints of two surviving points — shrink the candidate set
/// before exact LP vertex tests decide the remainder.  Dropped points are
/// demonstrably convex combinations, and true vertices are never
/// midpoints, so the filters lose nothing.
pub fn hull_vertices(points: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    match pts[0].len() {
        1 => vec![pts.first().unwrap().clone(), pts.last().unwrap().clone()],
        2 => monotone_chain(&pts),
        _ => filtered_vertices(&pts),
    }
}

/// `(a − o) × (b − o)` in the plane.
fn cross2(o: &[BigInt], a: &[BigInt], b: &[BigInt]) -> BigInt {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Strict extreme points of a lex-sorted, deduplicated planar point set.
fn monotone_chain(pts: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut hull: Vec<Vec<BigInt>> = Vec::new();
    let half = |hull: &mut Vec<Vec<BigInt>>, iter: &mut dyn Iterator<Item = &Vec<BigInt>>| {
        let start = hull.len();
        for p in iter {
            while hull.len() >= start + 2
                && !cross2(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_positive()
            {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    };
    half(&mut hull, &mut pts.iter());
    half(&mut hull, &mut pts.iter().rev());
    hull.sort();
    hull.dedup();
    hull
}

/// Is `q` a convex combination of `others`?  Exact LP feasibility.
fn in_conv_hull(q: &RationalVector, others: &[&RationalVector]) -> bool {
    let m = others.len();
    if m == 0 {
        return false;
    }
    let n = q.len();
    let mut lp = LinearProgram::new(m);
    lp.constraint(vec![rat(1); m], Relation::Eq, rat(1));
    for j in 0..m {
        let mut e = zeros(m);
        e[j] = rat(1);
        lp.constraint(e, Relation::Ge, rat(0));
    }
    for coord in 0..n {
        let row: RationalVector = others.iter().map(|p| p[coord].clone()).collect();
        lp.constraint(row, Relation::Eq, q[coord].clone());
    }
    lp.minimize(zeros(m));
    lp.solve().status != LpStatus::Infeasible
}

/// Extreme points in dimension three and up: filters, then exact LP tests.
fn filtered_vertices(pts: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    use std::collections::HashSet;
    let n = pts[0].len();
    let set: HashSet<&[BigInt]> = pts.iter().map(|p| p.as_slice()).collect();

    // A point with both axis neighbors present is their midpoint.
    let mut candidates: Vec<&Vec<BigInt>> = pts
        .iter()
        .filter(|p| {
            !(0..n).any(|i| {
                let mut hi = (*p).clone();
                hi[i] += 1;
                let mut lo = (*p).clone();
                lo[i] -= 1;
                set.contains(hi.as_slice()) && set.contains(lo.as_slice())
            })
        })
        .collect();

    // Integral midpoints of surviving pairs are convex combinations too.
    let mut dropped = vec![false; candidates.len()];
    let index: std::collections::HashMap<&[BigInt], usize> = candidates
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_slice(), i))
        .collect();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let sum: Vec<BigInt> = candidates[i]
                .iter()
                .zip(candidates[j])
                .map(|(a, b)| a + b)
                .collect();
            if sum.iter().all(|c| (c % 2u8).is_zero()) {
                let mid: Vec<BigInt> = sum.into_iter().map(|c| c / 2).collect();
                if let Some(&k) = index.get(mid.as_slice()) {
                    dropped[k] = true;
                }
            }
        }
    }
    candidates = candidates
        .into_iter()
        .zip(&dropped)
        .filter(|(_, d)| !**d)
        .map(|(p, _)| p)
        .collect();

    // Grow a support set: axis extremes first so the early hull is fat,
    // then every candidate outside the current hull.  The support set
    // contains every true vertex; a final exact pass drops the rest.
    let rational: Vec<RationalVector> = candidates.iter().map(|p| to_rational_vec(p)).collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    let mut priority = vec![false; candidates.len()];
    for i in 0..n {
        for pick_max in [false, true] {
            let best = (0..candidates.len()).reduce(|a, b| {
                let cmp = candidates[a][i].cmp(&candidates[b][i]);
                let replace = if pick_max {
                    cmp == std::cmp::Ordering::Less
                } else {
                    cmp == std::cmp::Ordering::Greater
                };
                if replace {
                    b
                } else {
                    a
                }
            });
            if let Some(b) = best {
                priority[b] = true;
            }
        }
    }
    order.sort_by_key(|&i| !priority[i]);
    let mut support: Vec<usize> = Vec::new();
    for &i in &order {
        let members: Vec<&RationalVector> = support.iter().map(|&j| &rational[j]).collect();
        if !in_conv_hull(&rational[i], &members) {
            support.push(i);
        }
    }

    let mut vertices: Vec<Vec<BigInt>> = Vec::new();
    for (pos, &i) in support.iter().enumerate() {
        let others: Vec<&RationalVector> = support
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != pos)
            .map(|(_, &j)| &rational[j])
            .collect();
        if !in_conv_hull(&rational[i], &others) {
            vertices.push(candidates[i].clone());
        }
    }
    vertices.sort();
    vertices
}

/// Vertices of the integer hull `conv(p ∩ ℤⁿ)`, in lexicographic order.
pub fn integer_hull_vertices(p: &HPolyhedron, guards: &Guards) -> Result<Vec<Vec<BigInt>>> {
    Ok(hull_vertices(&lattice_points(p, guards)?))
}

/// Vertex oracle for reverse convex feasibility on one piece.
///
/// Returns the lexicographically first vertex of the integer hull of
/// `p ∩ ℤⁿ` that lies outside every removed set (outside the interiors for
/// [`Removal::Interior`], outside the closed sets for [`Removal::Closed`]),
/// or `None` when every vertex is covered.
///
/// Soundness of a returned witness is unconditional (membership is re-told
/// exactly). Concluding infeasibility from `None` additionally requires the
/// union of the removed sets to be convex on `p`; callers certify this.
pub fn reverse_convex_feasible(
    p: &HPolyhedron,
    removed: &[ConvexSet],
    removal: Removal,
    guards: &Guards,
) -> Result<Option<Vec<BigInt>>> {
    let vertices = integer_hull_vertices(p, guards)?;
    for v in vertices {
        let x = to_rational_vec(&v);
        let covered = removed.iter().any(|c| match removal {
            Removal::Interior => c.contains_strict(&x),
            Removal::Closed => c.contains(&x),
        });
        if !covered {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Integer lattice width helper: number of integers in `[lo, hi]`.
pub fn integers_in(lo: &Rational, hi: &Rational) -> u64 {
    let width: BigInt = hi.floor().to_integer() - lo.ceil().to_integer() + BigInt::one();
    if width.is_positive() {
        width.to_u64().unwrap_or(u64::MAX)
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    fn big(points: &[[i64; 2]]) -> Vec<Vec<BigInt>> {
        points
            .iter()
            .map(|p| p.iter().map(|&c| BigInt::from(c)).collect())
            .collect()
    }

    fn pentagon() -> HPolyhedron {
        HPolyhedron::new(vec![
            (vec![rat(-1), rat(-1)], rat(-1)),
            (vec![rat(-1), rat(1)], rat(1)),
            (vec![rat(0), rat(1)], rat(2)),
            (vec![rat(1), rat(0)], rat(2)),
            (vec![rat(1), rat(-1)], rat(1)),
        ])
    }

    #[test]
    fn pentagon_lattice_points_in_lex_order() {
        let pts = lattice_points(&pentagon(), &Guards::default()).unwrap();
        assert_eq!(
            pts,
            big(&[[0, 1], [1, 0], [1, 1], [1, 2], [2, 1], [2, 2]])
        );
    }

    #[test]
    fn pentagon_hull_vertices_drop_the_center() {
        let pts = lattice_points(&pentagon(), &Guards::default()).unwrap();
        let verts = hull_vertices(&pts);
        assert_eq!(verts, big(&[[0, 1], [1, 0], [1, 2], [2, 1], [2, 2]]));
    }

    #[test]
    fn hull_vertices_handle_collinear_and_duplicate_points() {
        let verts = hull_vertices(&big(&[[0, 0], [1, 1], [2, 2], [1, 1]]));
        assert_eq!(verts, big(&[[0, 0], [2, 2]]));
        assert_eq!(hull_vertices(&big(&[[3, 4]])), big(&[[3, 4]]));
        assert_eq!(hull_vertices(&[]), Vec::<Vec<BigInt>>::new());
    }

    #[test]
    fn cube_lattice_reduces_to_its_corners() {
        let cube = HPolyhedron::cube(3, &rat(3));
        let verts = integer_hull_vertices(&cube, &Guards::default()).unwrap();
        assert_eq!(verts.len(), 8);
        for v in &verts {
            assert!(v.iter().all(|c| c.abs() == BigInt::from(3)));
        }
    }

    /// Naive reference: one LP per point against all the others.
    fn naive_vertices(pts: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let mut pts = pts.to_vec();
        pts.sort();
        pts.dedup();
        let rational: Vec<RationalVector> = pts.iter().map(|p| to_rational_vec(p)).collect();
        let mut out = Vec::new();
        for i in 0..rational.len() {
            let others: Vec<&RationalVector> = rational
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p)
                .collect();
            if !in_conv_hull(&rational[i], &others) {
                out.push(pts[i].clone());
            }
        }
        out
    }

    #[test]
    fn filtered_hull_matches_the_naive_reference_in_three_dimensions() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..12 {
            let pts: Vec<Vec<BigInt>> = (0..rng.gen_range(4..40))
                .map(|_| {
                    (0..3)
                        .map(|_| BigInt::from(rng.gen_range(-4i64..=4)))
                        .collect()
                })
                .collect();
            assert_eq!(hull_vertices(&pts), naive_vertices(&pts));
        }
    }

    #[test]
    fn halved_cube_hull_stays_fast_and_exact() {
        // A tilted halfspace through a radius-4 cube: the staircase case.
        // The vertex set V is certified exactly: V ⊆ S, every v ∈ V is
        // extreme within V, and conv(V) swallows all of S.
        let mut rows = HPolyhedron::cube(3, &rat(4)).rows().to_vec();
        rows.push((vec![rat(2), rat(1), rat(-1)], ratio(-1, 2)));
        let p = HPolyhedron::new(rows);
        let verts = integer_hull_vertices(&p, &Guards::default()).unwrap();
        let pts = lattice_points(&p, &Guards::default()).unwrap();
        assert!(!verts.is_empty() && verts.len() < pts.len());
        let vr: Vec<RationalVector> = verts.iter().map(|v| to_rational_vec(v)).collect();
        for v in &verts {
            assert!(pts.binary_search(v).is_ok());
        }
        for (i, v) in vr.iter().enumerate() {
            let others: Vec<&RationalVector> = vr
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p)
                .collect();
            assert!(!in_conv_hull(v, &others), "non-extreme vertex {v:?}");
        }
        let all: Vec<&RationalVector> = vr.iter().collect();
        for q in &pts {
            assert!(
                in_conv_hull(&to_rational_vec(q), &all),
                "lattice point {q:?} escapes the hull"
            );
        }
    }

    #[test]
    fn vertex_oracle_on_the_pentagon() {
        let ball = ConvexSet::ball(vec![rat(0), rat(4)], ratio(31, 10));
        // The ball strictly covers (0,1), (1,2), (2,2); the first uncovered
        // hull vertex in lex order is (1,0).
        let w = reverse_convex_feasible(
            &pentagon(),
            &[ball],
            Removal::Interior,
            &Guards::default(),
        )
        .unwrap();
        assert_eq!(w, Some(vec![BigInt::from(1), BigInt::from(0)]));

        // A huge ball swallows every vertex: infeasible.
        let huge = ConvexSet::ball(vec![rat(1), rat(1)], rat(10));
        let w =
            reverse_convex_feasible(&pentagon(), &[huge], Removal::Interior, &Guards::default())
                .unwrap();
        assert_eq!(w, None);
    }

    #[test]
    fn removal_semantics_differ_on_the_boundary() {
        // Segment [0,2] on the line, removed ball [0,2] centered at 1.
        let seg = HPolyhedron::new(vec![
            (vec![rat(-1)], rat(0)),
            (vec![rat(1)], rat(2)),
        ]);
        let ball = ConvexSet::ball(vec![rat(1)], rat(1));
        let interior = reverse_convex_feasible(
            &seg,
            std::slice::from_ref(&ball),
            Removal::Interior,
            &Guards::default(),
        )
        .unwrap();
        assert_eq!(interior, Some(vec![BigInt::from(0)]));
        let closed =
            reverse_convex_feasible(&seg, &[ball], Removal::Closed, &Guards::default()).unwrap();
        assert_eq!(closed, None);
    }

    #[test]
    fn guards_trip_on_size_and_candidates() {
        let wide = HPolyhedron::cube(2, &rat(100));
        assert!(matches!(
            lattice_points(&wide, &Guards::default()),
            Err(Error::GuardExceeded(_))
        ));

        let tight = Guards {
            max_candidates: 3,
            ..Guards::default()
        };
        assert!(matches!(
            lattice_points(&pentagon(), &tight),
            Err(Error::GuardExceeded(_))
        ));

        let unbounded = HPolyhedron::with_dim(2, vec![(vec![rat(1), rat(0)], rat(0))]);
        assert!(matches!(
            lattice_points(&unbounded, &Guards::default()),
            Err(Error::InvalidInput(_))
        ));

        // Empty systems are fine: no lattice points, no error.
        let empty = HPolyhedron::with_dim(
            2,
            vec![
                (vec![rat(1), rat(0)], rat(-1)),
                (vec![rat(-1), rat(0)], rat(0)),
            ],
        );
        assert_eq!(lattice_points(&empty, &Guards::default()).unwrap().len(), 0);

        let deep = HPolyhedron::cube(5, &rat(1));
        assert!(matches!(
            lattice_points(&deep, &Guards::default()),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn thin_slabs_enumerate_without_scanning_the_box() {
        // x = y inside a radius-50 box: 101 points, visited count stays
        // linear because fibers collapse to single integers.
        let slab = HPolyhedron::with_dim(
            2,
            vec![
                (vec![rat(1), rat(-1)], rat(0)),
                (vec![rat(-1), rat(1)], rat(0)),
                (vec![rat(1), rat(0)], rat(50)),
                (vec![rat(-1), rat(0)], rat(50)),
                (vec![rat(0), rat(1)], rat(50)),
                (vec![rat(0), rat(-1)], rat(50)),
            ],
        );
        let guards = Guards {
            max_candidates: 500,
            ..Guards::default()
        };
        let pts = lattice_points(&slab, &guards).unwrap();
        assert_eq!(pts.len(), 101);
        assert!(pts.iter().all(|p| p[0] == p[1]));
    }
}
