//! Convex set representations with exact rational predicates.
//!
//! A [`ConvexSet`] is one of five shapes over ℚⁿ:
//!
//! * `Ball` — closed Euclidean ball `‖x − c‖² ≤ r²` with rational center and
//!   radius;
//! * `Quadratic` — sublevel set `xᵀQx + lᵀx + c ≤ 0` of a convex quadratic
//!   (`Q` symmetric positive semidefinite);
//! * `Polyhedron` — a finite system of closed halfspaces;
//! * `Intersection` — a finite intersection of the above;
//! * `UnionConvex` — a finite union of the above whose convexity has been
//!   certified externally (the decomposition pipeline produces these when a
//!   chain argument shows the union of the members on a cell is convex).
//!
//! All predicates (`contains`, `contains_strict`, separation cuts) are exact:
//! they compare squared quantities so no square roots are ever taken on the
//! decision path. Square roots appear only in *bounding* roles (coordinate
//! intervals for lattice enumeration and directional envelopes), where a
//! certified upper bound is sufficient and any slack is absorbed by a final
//! exact membership check.
//!
//! Besides membership and separation the type provides three analytic
//! helpers used across the solver:
//!
//! * [`ConvexSet::interval_int_bounds`] — certified rational bounds on
//!   `d·x` over the set;
//! * [`ConvexSet::gauge`] — bisection evaluation of the gauge function
//!   `γ(x) = inf {λ > 0 : x ∈ λ·(C − y)}` relative to an interior anchor
//!   `y`, used as a geometric test oracle;
//! * [`ConvexSet::is_full_dimensional`] — whether the set has an interior
//!   point, decided analytically per shape (exact for balls, quadratics,
//!   and polyhedra; budgeted interior search for mixed intersections, with
//!   an explicit logged failure mode).
//!
//! # Separation
//!
//! [`ConvexSet::separate`] maps an outside point `x̄` to a rational halfspace
//! `aᵀx ≤ b` containing the set and violated by `x̄`:
//!
//! * ball: `a = x̄ − c` and `b = aᵀc + s`, where `s` is the exact root of
//!   `r²‖a‖²` when that is a rational square and otherwise the arithmetic
//!   mean `(r² + ‖a‖²)/2`, which dominates the root and still cuts `x̄` off;
//! * quadratic: the gradient cut `a = 2Qx̄ + l`, `b = aᵀx̄ − q(x̄)`, falling
//!   back to `x₁ ≤ x̄₁ − 1` when the gradient vanishes (the set is then
//!   empty, so every halfspace is valid);
//! * polyhedron: any violated defining row;
//! * intersection: a cut from any member not containing `x̄`.
//!
//! Cuts are normalized to a primitive integer normal.

use num_traits::{Signed, Zero};

use crate::linalg::{
    dot, norm_sq, normalize_halfspace, rat, rational_sqrt, ratio, solve_linear, sqrt_upper_bound,
    sub, zeros, Rational, RationalMatrix, RationalVector,
};
use crate::lp::{LinearProgram, LpStatus, Relation};
use crate::polyhedron::HPolyhedron;
use crate::{Error, Result};

/// Tolerance for the certified square-root upper bounds used in coordinate
/// intervals. Looseness only widens enumeration windows; membership stays
/// exact.
fn bound_tol() -> Rational {
    ratio(1, 8)
}

/// A convex subset of ℚⁿ in one of the supported representations.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    /// Closed ball `‖x − center‖² ≤ radius²`.
    Ball {
        center: RationalVector,
        radius: Rational,
    },
    /// Sublevel set `xᵀ q x + linᵀ x + c0 ≤ 0` with `q` symmetric PSD.
    Quadratic {
        q: RationalMatrix,
        lin: RationalVector,
        c0: Rational,
    },
    /// Intersection of finitely many closed halfspaces.
    Polyhedron(HPolyhedron),
    /// Intersection of finitely many convex sets of the same dimension.
    Intersection(Vec<ConvexSet>),
    /// Union of finitely many convex sets. Only the decomposition pipeline
    /// constructs these, after certifying that the union itself is convex;
    /// `certified` records that trace. Membership is the disjunction of the
    /// members' memberships by construction.
    UnionConvex {
        members: Vec<ConvexSet>,
        certified: bool,
    },
}

impl ConvexSet {
    /// Closed ball with the given center and radius.
    pub fn ball(center: RationalVector, radius: Rational) -> Self {
        ConvexSet::Ball { center, radius }
    }

    /// Quadratic sublevel set; the matrix is symmetrized as `(Q + Qᵀ)/2`.
    pub fn quadratic(q: RationalMatrix, lin: RationalVector, c0: Rational) -> Self {
        let n = q.rows();
        let mut sym = RationalMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                sym.set(i, j, (q.get(i, j) + q.get(j, i)) / rat(2));
            }
        }
        ConvexSet::Quadratic { q: sym, lin, c0 }
    }

    /// Polyhedral set from an existing halfspace system.
    pub fn polyhedron(p: HPolyhedron) -> Self {
        ConvexSet::Polyhedron(p)
    }

    /// Intersection of the given members.
    pub fn intersection(members: Vec<ConvexSet>) -> Self {
        ConvexSet::Intersection(members)
    }

    /// Union of the given members with an externally supplied convexity
    /// certificate flag. Intended for the decomposition pipeline.
    pub fn union_convex(members: Vec<ConvexSet>, certified: bool) -> Self {
        ConvexSet::UnionConvex { members, certified }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::Quadratic { lin, .. } => lin.len(),
            ConvexSet::Polyhedron(p) => p.dim(),
            ConvexSet::Intersection(members) | ConvexSet::UnionConvex { members, .. } => {
                members.first().map_or(0, |m| m.dim())
            }
        }
    }

    /// True for the non-composite shapes (ball, quadratic, polyhedron).
    pub fn is_atomic(&self) -> bool {
        !matches!(
            self,
            ConvexSet::Intersection(_) | ConvexSet::UnionConvex { .. }
        )
    }

    /// Checks structural well-formedness against an expected dimension:
    /// matching lengths, positive ball radius, and a symmetric PSD matrix
    /// for quadratics (the convexity certificate).
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            ConvexSet::Ball { center, radius } => {
                if center.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: center.len(),
                    });
                }
                if !radius.is_positive() {
                    return Err(Error::InvalidInput("ball radius must be positive".into()));
                }
                Ok(())
            }
            ConvexSet::Quadratic { q, lin, c0: _ } => {
                if q.rows() != dim || q.cols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: q.rows(),
                    });
                }
                if lin.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: lin.len(),
                    });
                }
                if !q.is_symmetric() {
                    return Err(Error::InvalidInput(
                        "quadratic matrix must be symmetric".into(),
                    ));
                }
                if !crate::linalg::is_psd(q) {
                    return Err(Error::InvalidInput(
                        "quadratic matrix must be positive semidefinite".into(),
                    ));
                }
                Ok(())
            }
            ConvexSet::Polyhedron(p) => {
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: p.dim(),
                    });
                }
                Ok(())
            }
            ConvexSet::Intersection(members) => {
                if members.is_empty() {
                    return Err(Error::InvalidInput(
                        "intersection needs at least one member".into(),
                    ));
                }
                for m in members {
                    m.validate(dim)?;
                }
                Ok(())
            }
            ConvexSet::UnionConvex { members, .. } => {
                if members.is_empty() {
                    return Err(Error::InvalidInput(
                        "union needs at least one member".into(),
                    ));
                }
                for m in members {
                    m.validate(dim)?;
                }
                Ok(())
            }
        }
    }

    /// Exact closed membership test.
    pub fn contains(&self, x: &[Rational]) -> bool {
        match self {
            ConvexSet::Ball { center, radius } => {
                norm_sq(&sub(x, center)) <= radius * radius
            }
            ConvexSet::Quadratic { .. } => self.quadratic_value(x).unwrap() <= rat(0),
            ConvexSet::Polyhedron(p) => p.contains(x),
            ConvexSet::Intersection(members) => members.iter().all(|m| m.contains(x)),
            ConvexSet::UnionConvex { members, .. } => members.iter().any(|m| m.contains(x)),
        }
    }

    /// Exact strict membership test (`x` lies in the interior for balls,
    /// quadratics, and polyhedra; for intersections, strictly inside every
    /// member; for unions, strictly inside some member — a sound inner
    /// approximation of the union's interior at seams).
    pub fn contains_strict(&self, x: &[Rational]) -> bool {
        match self {
            ConvexSet::Ball { center, radius } => {
                norm_sq(&sub(x, center)) < radius * radius
            }
            ConvexSet::Quadratic { .. } => self.quadratic_value(x).unwrap() < rat(0),
            ConvexSet::Polyhedron(p) => p.contains_strict(x),
            ConvexSet::Intersection(members) => members.iter().all(|m| m.contains_strict(x)),
            ConvexSet::UnionConvex { members, .. } => {
                members.iter().any(|m| m.contains_strict(x))
            }
        }
    }

    /// Evaluates the defining quadratic `xᵀQx + lᵀx + c` for ball and
    /// quadratic shapes (balls expand to `‖x − c‖² − r²`); `None` otherwise.
    pub fn quadratic_value(&self, x: &[Rational]) -> Option<Rational> {
        let (q, lin, c0) = self.as_quadratic_form()?;
        let qx = q.mul_vec(x);
        Some(dot(x, &qx) + dot(&lin, x) + c0)
    }

    /// The shape written as `{x : xᵀQx + lᵀx + c ≤ 0}`, for balls and
    /// quadratics.
    pub fn as_quadratic_form(&self) -> Option<(RationalMatrix, RationalVector, Rational)> {
        match self {
            ConvexSet::Ball { center, radius } => {
                let n = center.len();
                let q = RationalMatrix::identity(n);
                let lin: RationalVector = center.iter().map(|c| c * rat(-2)).collect();
                let c0 = norm_sq(center) - radius * radius;
                Some((q, lin, c0))
            }
            ConvexSet::Quadratic { q, lin, c0 } => Some((q.clone(), lin.clone(), c0.clone())),
            _ => None,
        }
    }

    /// Produces a rational halfspace `aᵀx ≤ b` that contains the set and is
    /// strictly violated by `x` (`aᵀx > b`), or `None` when `x` already lies
    /// in the set. The returned normal is a primitive integer vector.
    pub fn separate(&self, x: &[Rational]) -> Option<(RationalVector, Rational)> {
        match self {
            ConvexSet::Ball { center, radius } => {
                let a = sub(x, center);
                let nsq = norm_sq(&a);
                let rsq = radius * radius;
                if nsq <= rsq {
                    return None;
                }
                // Need s with r·‖a‖ ≤ s < ‖a‖²: exact when r²‖a‖² is a
                // square, else the arithmetic mean (r² + ‖a‖²)/2 works
                // because r² < ‖a‖².
                let s = rational_sqrt(&(&rsq * &nsq))
                    .unwrap_or_else(|| (&rsq + &nsq) / rat(2));
                let b = dot(&a, center) + s;
                Some(normalize_halfspace(&a, &b))
            }
            ConvexSet::Quadratic { q, lin, c0: _ } => {
                let value = self.quadratic_value(x).unwrap();
                if value <= rat(0) {
                    return None;
                }
                let qx = q.mul_vec(x);
                let a: RationalVector = (0..x.len())
                    .map(|i| &qx[i] * rat(2) + &lin[i])
                    .collect();
                if a.iter().all(|ai| ai.is_zero()) {
                    // Gradient vanishes at a point with positive value: the
                    // minimum of the quadratic is positive, so the set is
                    // empty and any halfspace missing x is a valid cut.
                    let mut e1 = zeros(x.len());
                    e1[0] = rat(1);
                    return Some((e1, &x[0] - rat(1)));
                }
                let b = dot(&a, x) - value;
                Some(normalize_halfspace(&a, &b))
            }
            ConvexSet::Polyhedron(p) => {
                for (a, b) in p.rows() {
                    if dot(a, x) > *b {
                        return Some(normalize_halfspace(a, b));
                    }
                }
                None
            }
            ConvexSet::Intersection(members) => {
                members.iter().find_map(|m| m.separate(x))
            }
            ConvexSet::UnionConvex { members, .. } => {
                if members.iter().any(|m| m.contains(x)) {
                    return None;
                }
                // A cut for the union must hold on every member. Take a
                // member's cut direction and weaken its offset to a
                // certified upper bound of a·z over all members; it remains
                // a cut as long as it still excludes x.
                for m in members {
                    let Some((a, _)) = m.separate(x) else { continue };
                    let mut offset: Option<Rational> = None;
                    for other in members {
                        let Some((_, hi)) = other.interval_int_bounds(&a) else {
                            offset = None;
                            break;
                        };
                        offset = Some(match offset {
                            Some(cur) if cur >= hi => cur,
                            _ => hi,
                        });
                    }
                    if let Some(b) = offset {
                        if dot(&a, x) > b {
                            return Some(normalize_halfspace(&a, &b));
                        }
                    }
                }
                panic!("no certified separating cut for the union set");
            }
        }
    }

    /// A certified interval for coordinate `k = prefix.len()` over the
    /// section of the set where the first `k` coordinates equal `prefix`,
    /// clipped to `[lo, hi]`. Returns `None` when the section is provably
    /// empty. The interval may be loose (it never excludes a feasible
    /// value); exact membership tests filter candidates afterwards.
    pub fn coord_interval(
        &self,
        prefix: &[Rational],
        lo: &Rational,
        hi: &Rational,
    ) -> Option<(Rational, Rational)> {
        let interval = match self {
            ConvexSet::Ball { center, radius } => {
                ball_coord_interval(center, &(radius * radius), prefix)?
            }
            ConvexSet::Quadratic { q, lin, c0 } => {
                match quadratic_enclosing_ball(q, lin, c0)? {
                    Some((center, rho_sq)) => ball_coord_interval(&center, &rho_sq, prefix)?,
                    // Unbounded or unbracketed sublevel set: no better
                    // information than the ambient window.
                    None => (lo.clone(), hi.clone()),
                }
            }
            ConvexSet::Polyhedron(p) => polyhedron_coord_interval(p, prefix, lo, hi)?,
            ConvexSet::Intersection(members) => {
                let mut cur = (lo.clone(), hi.clone());
                for m in members {
                    let (mlo, mhi) = m.coord_interval(prefix, lo, hi)?;
                    if mlo > cur.0 {
                        cur.0 = mlo;
                    }
                    if mhi < cur.1 {
                        cur.1 = mhi;
                    }
                }
                cur
            }
            ConvexSet::UnionConvex { members, .. } => {
                // The union's section window is the hull of the members'
                // windows; it is empty only when every member's is.
                let mut cur: Option<(Rational, Rational)> = None;
                for m in members {
                    if let Some((mlo, mhi)) = m.coord_interval(prefix, lo, hi) {
                        cur = Some(match cur {
                            None => (mlo, mhi),
                            Some((clo, chi)) => (clo.min(mlo), chi.max(mhi)),
                        });
                    }
                }
                cur?
            }
        };
        let lo_k = if &interval.0 > lo { interval.0 } else { lo.clone() };
        let hi_k = if &interval.1 < hi { interval.1 } else { hi.clone() };
        if lo_k > hi_k {
            None
        } else {
            Some((lo_k, hi_k))
        }
    }

    /// Certified rational bounds `(lo, hi)` with `lo ≤ d·x ≤ hi` for every
    /// point `x` of the set, or `None` when no finite bound can be certified
    /// (an unbounded polyhedron or a degenerate quadratic). The bounds are
    /// outer: exact for polyhedra (two LPs) and for balls whose directional
    /// envelope is rational, certified-loose otherwise; for a provably empty
    /// set they hold vacuously.
    pub fn interval_int_bounds(&self, direction: &[Rational]) -> Option<(Rational, Rational)> {
        match self {
            ConvexSet::Ball { center, radius } => Some(ball_direction_bounds(
                center,
                &(radius * radius),
                direction,
            )),
            ConvexSet::Quadratic { q, lin, c0 } => {
                match quadratic_enclosing_ball(q, lin, c0) {
                    // Empty set: any interval bounds it vacuously.
                    None => Some((rat(0), rat(0))),
                    Some(None) => None,
                    Some(Some((center, rho_sq))) => {
                        Some(ball_direction_bounds(&center, &rho_sq, direction))
                    }
                }
            }
            ConvexSet::Polyhedron(p) => polyhedron_direction_bounds(p, direction),
            ConvexSet::Intersection(members) => {
                // Tightest fold: every member's bound applies to the
                // intersection, so keep the largest lower and smallest upper.
                let mut cur: Option<(Rational, Rational)> = None;
                for m in members {
                    if let Some((mlo, mhi)) = m.interval_int_bounds(direction) {
                        cur = Some(match cur {
                            None => (mlo, mhi),
                            Some((clo, chi)) => (clo.max(mlo), chi.min(mhi)),
                        });
                    }
                }
                cur
            }
            ConvexSet::UnionConvex { members, .. } => {
                // Hull fold: the union needs every member bounded.
                let mut cur: Option<(Rational, Rational)> = None;
                for m in members {
                    let (mlo, mhi) = m.interval_int_bounds(direction)?;
                    cur = Some(match cur {
                        None => (mlo, mhi),
                        Some((clo, chi)) => (clo.min(mlo), chi.max(mhi)),
                    });
                }
                cur
            }
        }
    }

    /// Gauge of `x` with respect to the set translated so that `anchor` is
    /// the origin: a rational `λ̂` with `|λ̂ − γ| ≤ tol`, where
    /// `γ = inf {λ > 0 : x − anchor ∈ λ·(C − anchor)}`.
    ///
    /// Because the set is closed and the anchor strictly interior, the point
    /// `anchor + (x − anchor)/λ` belongs to the set exactly for `λ ≥ γ`, so
    /// membership along the ray is a monotone predicate: the crossing is
    /// bracketed by doubling/halving and then narrowed by bisection.
    pub fn gauge(
        &self,
        anchor: &[Rational],
        x: &[Rational],
        tol: &Rational,
    ) -> Result<Rational> {
        if !tol.is_positive() {
            return Err(Error::InvalidInput(
                "gauge tolerance must be positive".into(),
            ));
        }
        if !self.contains_strict(anchor) {
            return Err(Error::InvalidInput(
                "gauge anchor must be strictly interior to the set".into(),
            ));
        }
        let z = sub(x, anchor);
        if z.iter().all(|v| v.is_zero()) {
            return Ok(rat(0));
        }
        let inside = |lambda: &Rational| -> bool {
            let p: RationalVector = anchor
                .iter()
                .zip(&z)
                .map(|(a, zi)| a + zi / lambda)
                .collect();
            self.contains(&p)
        };
        let mut lo;
        let mut hi;
        if inside(&rat(1)) {
            hi = rat(1);
            lo = ratio(1, 2);
            let mut steps = 0usize;
            while inside(&lo) {
                hi = lo.clone();
                lo /= rat(2);
                steps += 1;
                if &hi <= tol || steps > GAUGE_MAX_STEPS {
                    // The ray stays inside arbitrarily close to the anchor;
                    // the gauge is below the tolerance already.
                    return Ok(hi);
                }
            }
        } else {
            lo = rat(1);
            hi = rat(2);
            let mut steps = 0usize;
            while !inside(&hi) {
                lo = hi.clone();
                hi *= rat(2);
                steps += 1;
                if steps > GAUGE_MAX_STEPS {
                    return Err(Error::Internal(
                        "gauge bracketing failed: ray never re-enters the set".into(),
                    ));
                }
            }
        }
        // Invariant: lo < γ ≤ hi, so returning hi once hi − lo ≤ tol keeps
        // the error within tol.
        while &hi - &lo > *tol {
            let mid = (&lo + &hi) / rat(2);
            if inside(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Whether the set has nonempty interior.
    ///
    /// Balls always do; quadratics are decided exactly by minimizing the
    /// form over ℝⁿ (an inconsistent stationarity system means the form is
    /// unbounded below, hence negative somewhere); polyhedra by the exact
    /// interior-point LP. Intersections with curved members use a budgeted
    /// search — start from a strict interior point of the polyhedral part
    /// and bisect toward the curved members' centers — which is sound (any
    /// found point is verified exactly) but may miss thin intersections, in
    /// which case it answers `false` and logs a warning. A union is
    /// full-dimensional exactly when some member is: a finite union of
    /// convex sets with empty interiors is nowhere dense.
    pub fn is_full_dimensional(&self) -> bool {
        match self {
            ConvexSet::Ball { .. } => true,
            ConvexSet::Quadratic { q, lin, c0 } => quadratic_is_full_dimensional(q, lin, c0),
            ConvexSet::Polyhedron(p) => p.is_full_dimensional(),
            ConvexSet::Intersection(members) => {
                intersection_interior_point(members, self.dim()).is_some()
            }
            ConvexSet::UnionConvex { members, .. } => {
                members.iter().any(|m| m.is_full_dimensional())
            }
        }
    }
}

/// Step budget for gauge bracketing (doublings or halvings before the ray
/// search is abandoned).
const GAUGE_MAX_STEPS: usize = 200;

/// Coordinate window for a ball given fixed leading coordinates: the
/// residual budget `r² − Σᵢ(prefixᵢ − cᵢ)²` bounds the next coordinate by
/// `c_k ± √residual` (certified upper bound on the root).
fn ball_coord_interval(
    center: &[Rational],
    radius_sq: &Rational,
    prefix: &[Rational],
) -> Option<(Rational, Rational)> {
    let k = prefix.len();
    assert!(k < center.len(), "coord_interval: prefix exhausts dimension");
    let mut residual = radius_sq.clone();
    for i in 0..k {
        let d = &prefix[i] - &center[i];
        residual -= &d * &d;
    }
    if residual.is_negative() {
        return None;
    }
    let u = rational_sqrt(&residual).unwrap_or_else(|| sqrt_upper_bound(&residual, &bound_tol()));
    Some((&center[k] - &u, &center[k] + &u))
}

/// Coordinate window for a polyhedron section by two exact LPs over the
/// slab `[lo, hi]ⁿ` with the leading coordinates pinned by equalities.
fn polyhedron_coord_interval(
    p: &HPolyhedron,
    prefix: &[Rational],
    lo: &Rational,
    hi: &Rational,
) -> Option<(Rational, Rational)> {
    let n = p.dim();
    let k = prefix.len();
    assert!(k < n, "coord_interval: prefix exhausts dimension");
    // Only coordinate k may be windowed here: later coordinates can carry
    // different windows at the call site, and clamping them to this one
    // would wrongly cut fibers whose completions live outside it. Leaving
    // them free keeps the interval an over-approximation, which the exact
    // leaf test absorbs.
    let mut base = LinearProgram::new(n);
    for (a, b) in p.rows() {
        base.constraint(a.clone(), Relation::Le, b.clone());
    }
    for (i, v) in prefix.iter().enumerate() {
        let mut e = zeros(n);
        e[i] = rat(1);
        base.constraint(e, Relation::Eq, v.clone());
    }
    let mut e_k = zeros(n);
    e_k[k] = rat(1);
    base.constraint(e_k.clone(), Relation::Le, hi.clone());
    base.constraint(e_k, Relation::Ge, lo.clone());
    let mut objective = zeros(n);
    objective[k] = rat(1);
    let mut min_lp = base.clone();
    min_lp.minimize(objective.clone());
    let min_res = min_lp.solve();
    if min_res.status == LpStatus::Infeasible {
        return None;
    }
    let mut max_lp = base;
    max_lp.maximize(objective);
    let max_res = max_lp.solve();
    // The objective is boxed to [lo, hi], so non-Infeasible means Optimal;
    // fall back to the ambient window defensively all the same.
    let lo_k = min_res.value.unwrap_or_else(|| lo.clone());
    let hi_k = max_res.value.unwrap_or_else(|| hi.clone());
    Some((lo_k, hi_k))
}

/// A ball certified to contain `{x : xᵀQx + lᵀx + c ≤ 0}`.
///
/// Returns `None` for an empty set, `Some(None)` when no finite enclosing
/// ball can be certified (singular `Q`), and otherwise the center (the
/// unconstrained minimizer `x* = −Q⁻¹l/2`) together with a valid squared
/// radius `−q(x*) / λ̲`, where `λ̲ = det Q / g^{n−1}` under-estimates the
/// smallest eigenvalue via the Gershgorin bound `g ≥ λ_max`.
#[allow(clippy::type_complexity)]
fn quadratic_enclosing_ball(
    q: &RationalMatrix,
    lin: &RationalVector,
    c0: &Rational,
) -> Option<Option<(RationalVector, Rational)>> {
    let n = q.rows();
    let mut grad = RationalMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            grad.set(i, j, q.get(i, j) * rat(2));
        }
    }
    let rhs: RationalVector = lin.iter().map(|v| -v).collect();
    let solved = solve_linear(&grad, &rhs);
    let Some(center) = solved.solution else {
        // Inconsistent stationarity system: the infimum is not attained and
        // the sublevel set is unbounded (or empty in a way we cannot
        // certify here).
        return Some(None);
    };
    let qx = q.mul_vec(&center);
    let value = dot(&center, &qx) + dot(lin, &center) + c0;
    if value > rat(0) {
        // The global minimum is positive: the set is empty.
        return None;
    }
    if solved.rank < n {
        return Some(None);
    }
    let det = q.determinant();
    let mut gersh = rat(0);
    for i in 0..n {
        let row_sum: Rational = (0..n).map(|j| q.get(i, j).abs()).sum();
        if row_sum > gersh {
            gersh = row_sum;
        }
    }
    let mut lambda_lo = det;
    for _ in 0..(n - 1) {
        lambda_lo /= &gersh;
    }
    debug_assert!(lambda_lo.is_positive());
    let rho_sq = -value / lambda_lo;
    Some(Some((center, rho_sq)))
}

/// Directional envelope of a ball: `d·x` over `‖x − c‖² ≤ r²` ranges over
/// `c·d ± r‖d‖`, with the root replaced by a certified rational upper bound
/// when `r²‖d‖²` is not a square.
fn ball_direction_bounds(
    center: &[Rational],
    radius_sq: &Rational,
    direction: &[Rational],
) -> (Rational, Rational) {
    let mid = dot(center, direction);
    let s = radius_sq * norm_sq(direction);
    let u = rational_sqrt(&s).unwrap_or_else(|| sqrt_upper_bound(&s, &bound_tol()));
    (&mid - &u, &mid + &u)
}

/// Directional envelope of a polyhedron by two exact LPs: `None` when the
/// direction is unbounded over it, vacuous `(0, 0)` when it is empty.
fn polyhedron_direction_bounds(
    p: &HPolyhedron,
    direction: &[Rational],
) -> Option<(Rational, Rational)> {
    let mut lo_lp = LinearProgram::new(p.dim());
    let mut hi_lp = LinearProgram::new(p.dim());
    for (a, b) in p.rows() {
        lo_lp.constraint(a.clone(), Relation::Le, b.clone());
        hi_lp.constraint(a.clone(), Relation::Le, b.clone());
    }
    lo_lp.minimize(direction.to_vec());
    hi_lp.maximize(direction.to_vec());
    let lo = lo_lp.solve();
    if lo.status == LpStatus::Infeasible {
        return Some((rat(0), rat(0)));
    }
    if lo.status != LpStatus::Optimal {
        return None;
    }
    let hi = hi_lp.solve();
    if hi.status != LpStatus::Optimal {
        return None;
    }
    Some((lo.value.unwrap(), hi.value.unwrap()))
}

/// Exact interior test for a quadratic sublevel set via its global minimum.
fn quadratic_is_full_dimensional(
    q: &RationalMatrix,
    lin: &RationalVector,
    c0: &Rational,
) -> bool {
    let n = q.rows();
    let mut grad = RationalMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            grad.set(i, j, q.get(i, j) * rat(2));
        }
    }
    let rhs: RationalVector = lin.iter().map(|v| -v).collect();
    let solved = solve_linear(&grad, &rhs);
    let Some(z) = solved.solution else {
        // No stationary point: the PSD form is unbounded below along a
        // direction in the kernel, so the strict sublevel set is nonempty.
        return true;
    };
    let qz = q.mul_vec(&z);
    let value = dot(&z, &qz) + dot(lin, &z) + c0;
    if value.is_negative() {
        return true;
    }
    if value.is_zero() {
        // Minimum exactly zero: the sublevel set is the argmin affine
        // subspace, full-dimensional only in the degenerate case of the
        // identically-zero form (whole space).
        return (0..n).all(|i| (0..n).all(|j| q.get(i, j).is_zero()))
            && lin.iter().all(|v| v.is_zero());
    }
    false
}

/// Strict common interior point of intersection members, or `None`.
///
/// Polyhedral members (including those nested in sub-intersections) are
/// flattened into one row system whose exact interior point seeds the
/// search; curved members then pull the point toward their centers by
/// bisection under a fixed budget. Failure after the budget logs a warning
/// and reports `None` — the explicit, conservative failure mode.
fn intersection_interior_point(
    members: &[ConvexSet],
    dim: usize,
) -> Option<RationalVector> {
    let mut rows: Vec<(RationalVector, Rational)> = Vec::new();
    let mut curved: Vec<&ConvexSet> = Vec::new();
    flatten_intersection(members, &mut rows, &mut curved);
    let poly = HPolyhedron::with_dim(dim, rows);
    let poly_seed = poly.interior_point();
    if curved.is_empty() {
        return poly_seed;
    }
    let mut targets: Vec<Option<RationalVector>> =
        curved.iter().map(|m| curved_center(m)).collect();
    let mut z = poly_seed?;
    // Seed at the average of the curved centers when the polyhedral part is
    // trivial (no rows): the universe's interior point is arbitrary.
    if poly.rows().is_empty() {
        let known: Vec<&RationalVector> = targets.iter().flatten().collect();
        if !known.is_empty() {
            let k = rat(known.len() as i64);
            z = (0..dim)
                .map(|i| known.iter().map(|t| &t[i]).sum::<Rational>() / &k)
                .collect();
        }
    }

    let strict_ok = |p: &[Rational]| -> bool {
        poly.contains_strict(p) && curved.iter().all(|m| m.contains_strict(p))
    };
    let mut budget = 64usize * curved.len();
    loop {
        if strict_ok(&z) {
            return Some(z);
        }
        if budget == 0 {
            log::warn!(
                "interior search budget exhausted on a mixed intersection; \
                 reporting not full-dimensional"
            );
            return None;
        }
        budget -= 1;
        let Some(idx) = curved.iter().position(|m| !m.contains_strict(&z)) else {
            // Curved members are all strict but the polyhedral part is not:
            // the seed was on a face, which the LP rules out. Defensive.
            log::warn!("interior search stalled on the polyhedral part");
            return None;
        };
        let Some(target) = targets[idx].clone() else {
            log::warn!("interior search has no center to steer toward");
            return None;
        };
        let mid: RationalVector = z
            .iter()
            .zip(&target)
            .map(|(a, b)| (a + b) / rat(2))
            .collect();
        if poly.contains_strict(&mid) {
            z = mid;
        } else {
            // Stepping outside the polyhedral part: shorten this member's
            // pull instead of moving.
            targets[idx] = Some(mid);
        }
    }
}

/// Splits intersection members into polyhedral rows and curved atoms,
/// recursing through nested intersections.
fn flatten_intersection<'a>(
    members: &'a [ConvexSet],
    rows: &mut Vec<(RationalVector, Rational)>,
    curved: &mut Vec<&'a ConvexSet>,
) {
    for m in members {
        match m {
            ConvexSet::Polyhedron(p) => rows.extend(p.rows().iter().cloned()),
            ConvexSet::Intersection(inner) => flatten_intersection(inner, rows, curved),
            _ => curved.push(m),
        }
    }
}

/// A natural interior-pull point for a curved shape: the ball center or the
/// quadratic's stationary point.
fn curved_center(m: &ConvexSet) -> Option<RationalVector> {
    match m {
        ConvexSet::Ball { center, .. } => Some(center.clone()),
        ConvexSet::Quadratic { q, lin, .. } => {
            let n = q.rows();
            let mut grad = RationalMatrix::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    grad.set(i, j, q.get(i, j) * rat(2));
                }
            }
            let rhs: RationalVector = lin.iter().map(|v| -v).collect();
            solve_linear(&grad, &rhs).solution
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};

    fn unit_ball() -> ConvexSet {
        ConvexSet::ball(vec![rat(0), rat(0)], rat(1))
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
    fn membership_is_exact_on_the_boundary() {
        let b = unit_ball();
        assert!(b.contains(&[rat(1), rat(0)]));
        assert!(!b.contains_strict(&[rat(1), rat(0)]));
        assert!(b.contains_strict(&[ratio(1, 2), ratio(1, 2)]));
        assert!(!b.contains(&[ratio(9, 10), ratio(9, 10)]));

        // The same ball as a quadratic agrees everywhere.
        let (q, lin, c0) = b.as_quadratic_form().unwrap();
        let quad = ConvexSet::quadratic(q, lin, c0);
        for p in [
            vec![rat(1), rat(0)],
            vec![ratio(1, 2), ratio(1, 2)],
            vec![ratio(9, 10), ratio(9, 10)],
            vec![rat(-1), rat(0)],
        ] {
            assert_eq!(b.contains(&p), quad.contains(&p));
            assert_eq!(b.contains_strict(&p), quad.contains_strict(&p));
        }
    }

    #[test]
    fn ball_separation_matches_the_rational_construction() {
        let b = unit_ball();
        // Perfect-square branch: the cut is the exact tangent halfspace.
        let (a, beta) = b.separate(&[rat(2), rat(0)]).unwrap();
        assert_eq!(a, vec![rat(1), rat(0)]);
        assert_eq!(beta, rat(1));
        // Irrational branch: arithmetic-mean bound, still separating.
        let (a, beta) = b.separate(&[rat(1), rat(1)]).unwrap();
        assert_eq!(a, vec![rat(1), rat(1)]);
        assert_eq!(beta, ratio(3, 2));
        assert!(dot(&a, &[rat(1), rat(1)]) > beta);
        // Points inside produce no cut.
        assert!(b.separate(&[rat(0), rat(0)]).is_none());
        assert!(b.separate(&[rat(1), rat(0)]).is_none());
    }

    #[test]
    fn quadratic_gradient_cut_and_empty_fallback() {
        let (q, lin, c0) = unit_ball().as_quadratic_form().unwrap();
        let quad = ConvexSet::quadratic(q, lin, c0);
        let (a, beta) = quad.separate(&[rat(2), rat(0)]).unwrap();
        // Gradient (4, 0), offset 8 − 3 = 5, normalized by 4.
        assert_eq!(a, vec![rat(1), rat(0)]);
        assert_eq!(beta, ratio(5, 4));

        // x² + y² + 1 ≤ 0 is empty; the gradient vanishes at the origin.
        let empty = ConvexSet::quadratic(
            RationalMatrix::identity(2),
            vec![rat(0), rat(0)],
            rat(1),
        );
        let (a, beta) = empty.separate(&[rat(0), rat(0)]).unwrap();
        assert_eq!(a, vec![rat(1), rat(0)]);
        assert_eq!(beta, rat(-1));
    }

    #[test]
    fn polyhedron_and_intersection_cuts() {
        let p = ConvexSet::polyhedron(pentagon());
        let (a, beta) = p.separate(&[rat(3), rat(3)]).unwrap();
        assert!(dot(&a, &[rat(3), rat(3)]) > beta);
        assert!(p.separate(&[rat(1), rat(1)]).is_none());

        let both = ConvexSet::intersection(vec![unit_ball(), p]);
        assert!(both.contains(&[rat(1), rat(0)]));
        assert!(!both.contains(&[rat(0), rat(0)]));
        let (a, beta) = both.separate(&[rat(0), rat(0)]).unwrap();
        // The origin is inside the ball, so the cut comes from the pentagon.
        assert!(dot(&a, &[rat(0), rat(0)]) > beta);
    }

    #[test]
    fn ball_coord_intervals_shrink_with_the_prefix() {
        let b = unit_ball();
        let (lo, hi) = b.coord_interval(&[], &rat(-10), &rat(10)).unwrap();
        assert!(lo <= rat(-1) && hi >= rat(1));
        assert!(lo >= ratio(-9, 8) && hi <= ratio(9, 8));
        // Touching section: only the tangent point remains.
        let (lo, hi) = b.coord_interval(&[rat(1)], &rat(-10), &rat(10)).unwrap();
        assert_eq!(lo, rat(0));
        assert_eq!(hi, rat(0));
        // Past the boundary: provably empty.
        assert!(b.coord_interval(&[rat(2)], &rat(-10), &rat(10)).is_none());
    }

    #[test]
    fn polyhedron_coord_intervals_are_exact() {
        let p = ConvexSet::polyhedron(pentagon());
        let (lo, hi) = p.coord_interval(&[], &rat(-10), &rat(10)).unwrap();
        assert_eq!(lo, rat(0));
        assert_eq!(hi, rat(2));
        let (lo, hi) = p.coord_interval(&[rat(0)], &rat(-10), &rat(10)).unwrap();
        assert_eq!(lo, rat(1));
        assert_eq!(hi, rat(1));
        assert!(p.coord_interval(&[rat(5)], &rat(-10), &rat(10)).is_none());
    }

    #[test]
    fn quadratic_coord_intervals_use_the_enclosing_ball() {
        // Ellipse x² + 4y² ≤ 4: enclosed exactly by the radius-2 ball.
        let q = RationalMatrix::from_rows(vec![vec![rat(1), rat(0)], vec![rat(0), rat(4)]]);
        let e = ConvexSet::quadratic(q, vec![rat(0), rat(0)], rat(-4));
        let (lo, hi) = e.coord_interval(&[], &rat(-10), &rat(10)).unwrap();
        assert_eq!(lo, rat(-2));
        assert_eq!(hi, rat(2));

        // Empty ellipse: x² + 4y² ≤ −1.
        let q = RationalMatrix::from_rows(vec![vec![rat(1), rat(0)], vec![rat(0), rat(4)]]);
        let empty = ConvexSet::quadratic(q, vec![rat(0), rat(0)], rat(1));
        assert!(empty.coord_interval(&[], &rat(-10), &rat(10)).is_none());

        // Singular slab x² ≤ 1 in the plane: falls back to the window.
        let q = RationalMatrix::from_rows(vec![vec![rat(1), rat(0)], vec![rat(0), rat(0)]]);
        let slab = ConvexSet::quadratic(q, vec![rat(0), rat(0)], rat(-1));
        let (lo, hi) = slab.coord_interval(&[], &rat(-10), &rat(10)).unwrap();
        assert_eq!((lo, hi), (rat(-10), rat(10)));
    }

    #[test]
    fn intersection_coord_intervals_fold() {
        let shifted = ConvexSet::ball(vec![rat(1), rat(0)], rat(1));
        let lens = ConvexSet::intersection(vec![unit_ball(), shifted]);
        let (lo, hi) = lens.coord_interval(&[], &rat(-10), &rat(10)).unwrap();
        assert!(lo >= rat(0) - bound_tol() && hi <= rat(1) + bound_tol());
        assert!(lens
            .coord_interval(&[rat(3)], &rat(-10), &rat(10))
            .is_none());
    }

    fn unit_square() -> HPolyhedron {
        HPolyhedron::from_bounds(2, &rat(0), &rat(1))
    }

    #[test]
    fn directional_bounds_match_the_envelopes() {
        let b = unit_ball();
        assert_eq!(
            b.interval_int_bounds(&[rat(1), rat(0)]),
            Some((rat(-1), rat(1)))
        );
        let shifted = ConvexSet::ball(vec![rat(3), rat(0)], rat(2));
        assert_eq!(
            shifted.interval_int_bounds(&[rat(1), rat(0)]),
            Some((rat(1), rat(5)))
        );
        let square = ConvexSet::polyhedron(unit_square());
        assert_eq!(
            square.interval_int_bounds(&[rat(1), rat(1)]),
            Some((rat(0), rat(2)))
        );
        // Unbounded direction over a halfplane: no certificate.
        let half = ConvexSet::polyhedron(HPolyhedron::with_dim(
            2,
            vec![(vec![rat(1), rat(0)], rat(0))],
        ));
        assert_eq!(half.interval_int_bounds(&[rat(0), rat(1)]), None);
        // Intersection folds to the tightest window.
        let lens = ConvexSet::intersection(vec![
            unit_ball(),
            ConvexSet::ball(vec![rat(1), rat(0)], rat(1)),
        ]);
        let (lo, hi) = lens.interval_int_bounds(&[rat(1), rat(0)]).unwrap();
        assert_eq!((lo, hi), (rat(0), rat(1)));
    }

    #[test]
    fn gauge_matches_scaling_on_frozen_points() {
        let tol = Rational::new(1.into(), (1u64 << 20).into());
        let b = unit_ball();
        let anchor = vec![rat(0), rat(0)];

        let g = b.gauge(&anchor, &[rat(2), rat(0)], &tol).unwrap();
        assert!((&g - rat(2)).abs() <= tol);
        let g = b.gauge(&anchor, &[rat(1), rat(0)], &tol).unwrap();
        assert!((&g - rat(1)).abs() <= tol);
        let g = b.gauge(&anchor, &anchor, &tol).unwrap();
        assert_eq!(g, rat(0));

        let square = ConvexSet::polyhedron(unit_square());
        let mid = vec![ratio(1, 2), ratio(1, 2)];
        let g = square.gauge(&mid, &[rat(1), ratio(1, 2)], &tol).unwrap();
        assert!((&g - rat(1)).abs() <= tol);

        // Anchor on the boundary is rejected.
        assert!(b.gauge(&[rat(1), rat(0)], &[rat(2), rat(0)], &tol).is_err());
    }

    #[test]
    fn gauge_is_monotone_along_rays() {
        let tol = Rational::new(1.into(), (1u64 << 20).into());
        let b = unit_ball();
        let anchor = vec![rat(0), rat(0)];
        let outer = vec![rat(3), rat(2)];
        let g_outer = b.gauge(&anchor, &outer, &tol).unwrap();
        for k in 1..5i64 {
            let t = ratio(k, 5);
            let x: Vec<Rational> = outer.iter().map(|v| v * &t).collect();
            let g = b.gauge(&anchor, &x, &tol).unwrap();
            assert!(g <= &g_outer + rat(2) * &tol);
        }
    }

    #[test]
    fn full_dimensionality_is_decided_per_shape() {
        assert!(unit_ball().is_full_dimensional());

        // Single point: x₁² + x₂² ≤ 0.
        let point = ConvexSet::quadratic(
            RationalMatrix::identity(2),
            vec![rat(0), rat(0)],
            rat(0),
        );
        assert!(!point.is_full_dimensional());
        // Ball-like sublevel with interior.
        let disk = ConvexSet::quadratic(
            RationalMatrix::identity(2),
            vec![rat(0), rat(0)],
            rat(-1),
        );
        assert!(disk.is_full_dimensional());
        // Empty set.
        let empty = ConvexSet::quadratic(
            RationalMatrix::identity(2),
            vec![rat(0), rat(0)],
            rat(1),
        );
        assert!(!empty.is_full_dimensional());
        // Halfplane via a rank-0 quadratic part: x₁ ≤ 0 is unbounded below.
        let half = ConvexSet::quadratic(
            RationalMatrix::zero(2, 2),
            vec![rat(1), rat(0)],
            rat(0),
        );
        assert!(half.is_full_dimensional());

        // A line {x₁ ≤ 0} ∩ {x₁ ≥ 0} in the plane has no interior.
        let line = ConvexSet::polyhedron(HPolyhedron::with_dim(
            2,
            vec![
                (vec![rat(1), rat(0)], rat(0)),
                (vec![rat(-1), rat(0)], rat(0)),
            ],
        ));
        assert!(!line.is_full_dimensional());

        // The lens of two overlapping balls is full-dimensional; the
        // tangent sliver of a ball against a supporting halfplane is not.
        let lens = ConvexSet::intersection(vec![
            unit_ball(),
            ConvexSet::ball(vec![rat(1), rat(0)], rat(1)),
        ]);
        assert!(lens.is_full_dimensional());
        let sliver = ConvexSet::intersection(vec![
            unit_ball(),
            ConvexSet::polyhedron(HPolyhedron::with_dim(
                2,
                vec![(vec![rat(-1), rat(0)], rat(-1))],
            )),
        ]);
        assert!(!sliver.is_full_dimensional());
    }

    #[test]
    fn union_membership_is_the_disjunction() {
        let u = ConvexSet::union_convex(
            vec![unit_ball(), ConvexSet::ball(vec![rat(4), rat(0)], rat(1))],
            false,
        );
        assert!(u.contains(&[rat(1), rat(0)]));
        assert!(u.contains(&[rat(4), rat(1)]));
        assert!(!u.contains(&[rat(2), rat(0)]));
        assert!(u.contains_strict(&[ratio(9, 2), rat(0)]));
        assert!(!u.contains_strict(&[rat(1), rat(0)]));
        assert!(u.is_full_dimensional());
        assert!(!u.is_atomic());
        assert!(u.validate(2).is_ok());

        // Window is the hull of the member windows.
        let (lo, hi) = u.coord_interval(&[], &rat(-10), &rat(10)).unwrap();
        assert!(lo <= rat(-1) && hi >= rat(5));
        // A section through only the right member.
        let (lo, hi) = u.coord_interval(&[rat(4)], &rat(-10), &rat(10)).unwrap();
        assert_eq!((lo, hi), (rat(-1), rat(1)));
        assert!(u.coord_interval(&[rat(2)], &rat(-10), &rat(10)).is_none());

        // Directional bounds take the hull of the member envelopes.
        assert_eq!(
            u.interval_int_bounds(&[rat(1), rat(0)]),
            Some((rat(-1), rat(5)))
        );

        // Weakened member cuts still separate distant points.
        let far = vec![rat(2), rat(8)];
        let (a, beta) = u.separate(&far).unwrap();
        assert!(dot(&a, &far) > beta);
        for p in [vec![rat(1), rat(0)], vec![rat(4), rat(1)], vec![rat(5), rat(0)]] {
            assert!(dot(&a, &p) <= beta);
        }
        assert!(u.separate(&[rat(4), rat(1)]).is_none());
    }

    #[test]
    fn validation_rejects_malformed_shapes() {
        assert!(ConvexSet::ball(vec![rat(0)], rat(0)).validate(1).is_err());
        assert!(unit_ball().validate(3).is_err());
        assert!(unit_ball().validate(2).is_ok());

        let indefinite = RationalMatrix::from_rows(vec![
            vec![rat(1), rat(0)],
            vec![rat(0), rat(-1)],
        ]);
        let saddle = ConvexSet::quadratic(indefinite, vec![rat(0), rat(0)], rat(0));
        assert!(saddle.validate(2).is_err());

        assert!(ConvexSet::intersection(vec![]).validate(2).is_err());
        assert!(ConvexSet::intersection(vec![unit_ball()]).validate(2).is_ok());
    }
}
