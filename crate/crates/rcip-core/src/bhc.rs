//! Boundary hyperplane covers: construction and verification.
//!
//! Given convex sets `C₁, …, C_m`, a *boundary hyperplane cover* is a finite
//! family of hyperplanes whose union contains every pairwise boundary
//! intersection `∂Cᵢ ∩ ∂Cⱼ`. Covers make a union of convex sets tractable
//! for lattice work: inside any cell of the induced arrangement, boundaries
//! of distinct members never cross, so membership relations between members
//! are constant per cell. A cover plane is *ideal* for a pair when it equals
//! the affine hull of that pair's boundary intersection.
//!
//! # Construction
//!
//! * [`radical_hyperplane`] — for two balls with distinct centers, the plane
//!   obtained by subtracting the two sphere equations. The difference of the
//!   quadratics `qᵢ(x) = ‖x − cᵢ‖² − rᵢ²` is exactly linear:
//!   `q₁ − q₂ ≡ b − aᵀx` with `a = 2(c₁ − c₂)` and
//!   `b = ‖c₁‖² − ‖c₂‖² + r₂² − r₁²`, so any common boundary point lies on
//!   `aᵀx = b`.
//! * [`cover_for_balls`] — one radical plane per pair whose spheres actually
//!   meet; disjoint and strictly nested pairs need none. Crossing pairs are
//!   ideal (the plane is the affine hull of the intersection sphere);
//!   tangent pairs are covered through the touch point but not ideal.
//! * [`quadratic_from_form`] — expands a structured quadratic
//!   `g(x) = α(‖x‖² − 1) + h₁(x)h₂(x)` (or `+ h₁(x)` alone) into matrix
//!   form and returns the planes `hᵢ(x) = 0`, which cover
//!   `∂Ball(0,1) ∩ ∂{g ≤ 0}`: on the unit sphere `g` reduces to the factor
//!   product, so common boundary points zero some factor.
//! * [`general_structure_cover`] — verifies a caller-supplied identity
//!   `f₁ = λ·f + ∏ⱼ hⱼ` by exact coefficient comparison and returns the
//!   planes `hⱼ = 0`; on `{f = 0}` the identity leaves `f₁ = ∏ hⱼ`, so the
//!   planes cover the common boundary. No convexity is required.
//!
//! # Sphere classification
//!
//! [`classify_spheres`] decides how two sphere boundaries meet using only
//! rational data (`‖c₁ − c₂‖²`, `r₁²`, `r₂²`). Comparisons against
//! `(r₁ ± r₂)²` are done by a sign analysis of `u = d² − r₁² − r₂²` followed
//! by squaring, so tangency is detected exactly even for irrational radii
//! known only by their squares.
//!
//! # Verification
//!
//! [`verify_cover`] checks a cover pair by pair, preferring exact routes:
//!
//! * ball–ball: classification decides emptiness; crossing pairs in the
//!   plane have exactly two intersection points, tested against each plane
//!   by an exact surd-sign argument; in dimension ≥ 3 the intersection is a
//!   positive-radius sphere and only its affine hull (the radical plane) can
//!   cover it, so cover membership reduces to canonical plane equality.
//! * quadratic pairs: solve the two-unknown linear system
//!   `f_j = α·f_i + μ·ℓ` (or `μ·ℓ_kℓ_l`) over the quadratic coefficient
//!   space; a consistent solution with `μ ≠ 0` certifies the cover on
//!   `∂Cᵢ ∩ ∂Cⱼ` exactly.
//! * polyhedra: a polyhedron's boundary lies in its facet planes, so a
//!   cover listing all of them covers every pair involving it.
//! * plane sampling (dimension 2 only): boundary walking with bisection to
//!   tolerance `2⁻³⁰`, used when no identity route applies; findings are
//!   reported as sampled, never as exact.
//!
//! Pairs outside all routes are reported [`PairStatus::Unverified`] rather
//! than guessed.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::convex::ConvexSet;
use crate::linalg::{
    dot, norm_sq, normalize_hyperplane, nullspace, rat, ratio, solve_linear, sub, zeros,
    Rational, RationalMatrix, RationalVector,
};
use crate::{Error, Result};

/// A ball known by its center and *squared* radius, the exact currency for
/// sphere predicates (the radius itself may be irrational).
#[derive(Debug, Clone, PartialEq)]
pub struct BallData {
    pub center: RationalVector,
    pub radius_sq: Rational,
}

impl BallData {
    /// Ball from center and squared radius; the square must be positive.
    pub fn new(center: RationalVector, radius_sq: Rational) -> Self {
        assert!(
            radius_sq.is_positive(),
            "BallData: squared radius must be positive"
        );
        BallData { center, radius_sq }
    }

    /// Ball from a rational radius.
    pub fn from_radius(center: RationalVector, radius: &Rational) -> Self {
        Self::new(center, radius * radius)
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// The defining quadratic `‖x − c‖² − r²`.
    pub fn quadratic(&self, x: &[Rational]) -> Rational {
        norm_sq(&sub(x, &self.center)) - &self.radius_sq
    }

    /// The ball as a convex set (matrix quadratic form, exact for
    /// irrational radii).
    pub fn to_convex_set(&self) -> ConvexSet {
        let n = self.dim();
        let lin: RationalVector = self.center.iter().map(|c| c * rat(-2)).collect();
        let c0 = norm_sq(&self.center) - &self.radius_sq;
        ConvexSet::quadratic(RationalMatrix::identity(n), lin, c0)
    }
}

/// Recognizes a convex set as a ball: either the `Ball` shape itself or a
/// quadratic `λ‖x‖² + lᵀx + c ≤ 0` with `λ > 0` and positive squared radius
/// after completing the square. Returns `None` for every other shape.
pub fn as_ball(set: &ConvexSet) -> Option<BallData> {
    match set {
        ConvexSet::Ball { center, radius } => {
            Some(BallData::from_radius(center.clone(), radius))
        }
        ConvexSet::Quadratic { q, lin, c0 } => {
            let n = q.rows();
            if n == 0 {
                return None;
            }
            let lambda = q.get(0, 0).clone();
            if !lambda.is_positive() {
                return None;
            }
            for i in 0..n {
                for j in 0..n {
                    let expected = if i == j { lambda.clone() } else { rat(0) };
                    if q.get(i, j) != &expected {
                        return None;
                    }
                }
            }
            // λ‖x‖² + l·x + c ≤ 0  ⟺  ‖x + l/(2λ)‖² ≤ ‖l/(2λ)‖² − c/λ.
            let center: RationalVector =
                lin.iter().map(|v| -v / (rat(2) * &lambda)).collect();
            let radius_sq = norm_sq(&center) - c0 / &lambda;
            if !radius_sq.is_positive() {
                return None;
            }
            Some(BallData { center, radius_sq })
        }
        _ => None,
    }
}

/// How two sphere boundaries relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereRelation {
    /// The closed balls are disjoint (`d > r₁ + r₂`).
    Disjoint,
    /// The spheres touch in a single point (externally at `d = r₁ + r₂` or
    /// internally at `d = |r₁ − r₂| > 0`).
    Tangent,
    /// The spheres cross in an `(n−2)`-sphere of positive radius.
    FullCircle,
    /// One open ball strictly contains the other's closure; the boundaries
    /// are disjoint.
    Contained,
    /// The spheres coincide.
    Equal,
}

/// Sign of `d² − (r₁ + r₂)²` computed from squared data only: with
/// `u = d² − r₁² − r₂²`, the comparison `u ⋛ 2r₁r₂` squares to
/// `u² ⋛ 4r₁²r₂²` once `u ≥ 0`, and is `Less` outright for `u < 0`.
pub(crate) fn cmp_dist_sq_vs_sum(dsq: &Rational, r1sq: &Rational, r2sq: &Rational) -> Ordering {
    let u = dsq - r1sq - r2sq;
    if u.is_negative() {
        return Ordering::Less;
    }
    (&u * &u).cmp(&(rat(4) * r1sq * r2sq))
}

/// Sign of `d² − (r₁ − r₂)²` from squared data: `u ⋛ −2r₁r₂` is `Greater`
/// for `u ≥ 0` (the radii are positive) and otherwise squares with the
/// comparison reversed.
fn cmp_dist_sq_vs_diff(dsq: &Rational, r1sq: &Rational, r2sq: &Rational) -> Ordering {
    let u = dsq - r1sq - r2sq;
    if !u.is_negative() {
        return Ordering::Greater;
    }
    (rat(4) * r1sq * r2sq).cmp(&(&u * &u))
}

/// Exact classification of two sphere boundaries, symmetric in its
/// arguments.
pub fn classify_spheres(b1: &BallData, b2: &BallData) -> SphereRelation {
    assert_eq!(b1.dim(), b2.dim(), "classify_spheres: dimension mismatch");
    if b1.center == b2.center && b1.radius_sq == b2.radius_sq {
        return SphereRelation::Equal;
    }
    let dsq = norm_sq(&sub(&b1.center, &b2.center));
    match cmp_dist_sq_vs_sum(&dsq, &b1.radius_sq, &b2.radius_sq) {
        Ordering::Greater => SphereRelation::Disjoint,
        Ordering::Equal => SphereRelation::Tangent,
        Ordering::Less => match cmp_dist_sq_vs_diff(&dsq, &b1.radius_sq, &b2.radius_sq) {
            Ordering::Greater => SphereRelation::FullCircle,
            // `d = |r₁ − r₂|` with distinct spheres: internal tangency.
            Ordering::Equal => SphereRelation::Tangent,
            Ordering::Less => SphereRelation::Contained,
        },
    }
}

/// The intersection circle of two spheres with distinct centers: its center
/// `z₀ = c₁ + t(c₂ − c₁)` on the center line, its squared radius `ρ²` inside
/// the radical plane, and the parameter `t`. For tangent pairs `ρ² = 0` and
/// `z₀` is the touch point; negative `ρ²` certifies an empty intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleData {
    pub center: RationalVector,
    pub rho_sq: Rational,
    pub t: Rational,
}

/// Circle data for two spheres, `None` when the centers coincide. Solving
/// `‖z − c₁‖² − r₁² = ‖z − c₂‖² − r₂²` along the center line gives
/// `t = (d² + r₁² − r₂²) / 2d²` and `ρ² = r₁² − t²d²` by Pythagoras.
pub fn circle_data(b1: &BallData, b2: &BallData) -> Option<CircleData> {
    assert_eq!(b1.dim(), b2.dim(), "circle_data: dimension mismatch");
    let delta = sub(&b2.center, &b1.center);
    let dsq = norm_sq(&delta);
    if dsq.is_zero() {
        return None;
    }
    let t = (&dsq + &b1.radius_sq - &b2.radius_sq) / (rat(2) * &dsq);
    let center: RationalVector = b1
        .center
        .iter()
        .zip(&delta)
        .map(|(c, d)| c + &t * d)
        .collect();
    let rho_sq = &b1.radius_sq - &t * &t * &dsq;
    Some(CircleData { center, rho_sq, t })
}

/// The radical hyperplane of two spheres with distinct centers, as the pair
/// `(a, b)` of `aᵀx = b` with `a = 2(c₁ − c₂)` and
/// `b = ‖c₁‖² − ‖c₂‖² + r₂² − r₁²`, so that the polynomial identity
/// `q₁(x) − q₂(x) ≡ b − aᵀx` holds coefficient by coefficient. Returns
/// `None` for concentric spheres (their boundary intersection is empty or
/// the whole sphere; no hyperplane applies).
pub fn radical_hyperplane(
    b1: &BallData,
    b2: &BallData,
) -> Option<(RationalVector, Rational)> {
    assert_eq!(
        b1.dim(),
        b2.dim(),
        "radical_hyperplane: dimension mismatch"
    );
    if b1.center == b2.center {
        return None;
    }
    let a: RationalVector = b1
        .center
        .iter()
        .zip(&b2.center)
        .map(|(c1, c2)| rat(2) * (c1 - c2))
        .collect();
    let b = norm_sq(&b1.center) - norm_sq(&b2.center) + &b2.radius_sq - &b1.radius_sq;
    Some((a, b))
}

/// Cover planes assigned to one pair of sets.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCover {
    pub i: usize,
    pub j: usize,
    /// Indices into [`BoundaryCover::hyperplanes`]; empty when the pair's
    /// boundary intersection is empty.
    pub planes: Vec<usize>,
    /// Whether the assigned plane equals the affine hull of the boundary
    /// intersection (vacuously true for empty intersections; false for
    /// tangent pairs, whose intersection is a single point).
    pub ideal: bool,
}

/// A boundary hyperplane cover: deduplicated planes in canonical form plus
/// the pair assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCover {
    pub dim: usize,
    pub hyperplanes: Vec<(RationalVector, Rational)>,
    pub pairs: Vec<PairCover>,
}

impl BoundaryCover {
    /// Empty cover in the given dimension.
    pub fn new(dim: usize) -> Self {
        BoundaryCover {
            dim,
            hyperplanes: Vec::new(),
            pairs: Vec::new(),
        }
    }

    /// Inserts a hyperplane, deduplicating by canonical form, and returns
    /// its index.
    pub fn add_hyperplane(&mut self, a: &[Rational], b: &Rational) -> usize {
        let canon = normalize_hyperplane(a, b);
        if let Some(idx) = self.hyperplanes.iter().position(|p| *p == canon) {
            return idx;
        }
        self.hyperplanes.push(canon);
        self.hyperplanes.len() - 1
    }

    /// Records the plane assignment for a pair.
    pub fn add_pair(&mut self, i: usize, j: usize, planes: Vec<usize>, ideal: bool) {
        self.pairs.push(PairCover { i, j, planes, ideal });
    }

    /// The assignment for pair `(i, j)` in either order, if recorded.
    pub fn pair(&self, i: usize, j: usize) -> Option<&PairCover> {
        self.pairs
            .iter()
            .find(|p| (p.i == i && p.j == j) || (p.i == j && p.j == i))
    }

    /// Whether every recorded pair is ideal.
    pub fn is_ideal(&self) -> bool {
        self.pairs.iter().all(|p| p.ideal)
    }
}

/// Builds the radical-plane cover of a ball family: one plane per pair of
/// crossing or tangent spheres, none for disjoint or strictly nested pairs.
/// Crossing pairs are ideal; tangent pairs are not (their intersection is a
/// point, strictly below the plane's dimension). Equal balls are rejected —
/// a coinciding sphere pair cannot be covered by finitely many planes.
pub fn cover_for_balls(balls: &[BallData]) -> Result<BoundaryCover> {
    let dim = balls.first().map_or(0, BallData::dim);
    for b in balls {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
    }
    let mut cover = BoundaryCover::new(dim);
    for i in 0..balls.len() {
        for j in (i + 1)..balls.len() {
            match classify_spheres(&balls[i], &balls[j]) {
                SphereRelation::Equal => {
                    return Err(Error::InvalidInput(format!(
                        "balls {i} and {j} coincide; their shared boundary sphere \
                         admits no hyperplane cover"
                    )));
                }
                SphereRelation::Disjoint | SphereRelation::Contained => {
                    cover.add_pair(i, j, Vec::new(), true);
                }
                SphereRelation::FullCircle => {
                    let (a, b) = radical_hyperplane(&balls[i], &balls[j])
                        .expect("crossing spheres have distinct centers");
                    let idx = cover.add_hyperplane(&a, &b);
                    cover.add_pair(i, j, vec![idx], true);
                }
                SphereRelation::Tangent => {
                    let (a, b) = radical_hyperplane(&balls[i], &balls[j])
                        .expect("tangent spheres have distinct centers");
                    let idx = cover.add_hyperplane(&a, &b);
                    cover.add_pair(i, j, vec![idx], false);
                }
            }
        }
    }
    Ok(cover)
}

/// Exact convexity test for the quadratic `α‖x‖² + (aᵀx)(bᵀx) + lower
/// order`: its Hessian is `2αI + abᵀ + baᵀ`, whose smallest eigenvalue is
/// `2α + aᵀb − ‖a‖‖b‖`. The test evaluates `aᵀb + 2α ≥ ‖a‖‖b‖` without
/// taking roots: the left side must be nonnegative and its square must
/// dominate `‖a‖²‖b‖²`.
///
/// The eigenvalue formula is exact in dimension ≥ 2; in dimension 1 the
/// test is sufficient but can reject convex inputs (the rank-two update
/// degenerates there).
pub fn convexity_condition(alpha: &Rational, a: &[Rational], b: &[Rational]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.iter().all(|v| v.is_zero()) || b.iter().all(|v| v.is_zero()) {
        return Err(Error::InvalidInput(
            "convexity condition requires nonzero factor directions".into(),
        ));
    }
    let lhs = dot(a, b) + rat(2) * alpha;
    if lhs.is_negative() {
        return Ok(false);
    }
    Ok(&lhs * &lhs >= norm_sq(a) * norm_sq(b))
}

/// An affine function `aᵀx + c`.
pub type AffineForm = (RationalVector, Rational);

/// A structured quadratic relative to the unit ball:
/// `g(x) = α(‖x‖² − 1) + h₁(x)` or `g(x) = α(‖x‖² − 1) + h₁(x)h₂(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadraticBhcForm {
    Single { alpha: Rational, h1: AffineForm },
    Product {
        alpha: Rational,
        h1: AffineForm,
        h2: AffineForm,
    },
}

/// Expands a structured quadratic into a convex set and the planes
/// `hᵢ(x) = 0` covering `∂Ball(0,1) ∩ ∂{g ≤ 0}`. On the unit sphere the
/// `α(‖x‖² − 1)` term vanishes, so boundary points shared with the sphere
/// zero the affine part, which is exactly the plane union.
///
/// Rejects `α = 0`, constant factors, non-convex expansions (via
/// [`convexity_condition`] for the product variant; the single variant is
/// convex exactly when `α > 0`), and unbounded sets (the expanded matrix
/// must be positive definite, i.e. PSD with nonzero determinant).
pub fn quadratic_from_form(
    form: &QuadraticBhcForm,
) -> Result<(ConvexSet, Vec<(RationalVector, Rational)>)> {
    let (alpha, factors) = match form {
        QuadraticBhcForm::Single { alpha, h1 } => (alpha, vec![h1]),
        QuadraticBhcForm::Product { alpha, h1, h2 } => (alpha, vec![h1, h2]),
    };
    if alpha.is_zero() {
        return Err(Error::InvalidInput(
            "structured quadratic requires α ≠ 0".into(),
        ));
    }
    for (a, _) in &factors {
        if a.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidInput(
                "structured quadratic requires non-constant factors".into(),
            ));
        }
    }
    let n = factors[0].0.len();
    for (a, _) in &factors {
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
            });
        }
    }

    let mut q = RationalMatrix::zero(n, n);
    for i in 0..n {
        q.set(i, i, alpha.clone());
    }
    let mut lin = zeros(n);
    let mut c0 = -alpha.clone();
    match form {
        QuadraticBhcForm::Single { h1: (a, c), .. } => {
            if !alpha.is_positive() {
                return Err(Error::InvalidInput(
                    "single-factor expansion is convex only for α > 0".into(),
                ));
            }
            lin = a.clone();
            c0 += c;
        }
        QuadraticBhcForm::Product {
            alpha,
            h1: (a, c1),
            h2: (b, c2),
        } => {
            if !convexity_condition(alpha, a, b)? {
                return Err(Error::InvalidInput(
                    "structured quadratic expands to a non-convex set".into(),
                ));
            }
            for i in 0..n {
                for j in 0..n {
                    let upd = (&a[i] * &b[j] + &a[j] * &b[i]) / rat(2);
                    q.set(i, j, q.get(i, j) + upd);
                }
            }
            for i in 0..n {
                lin[i] = c2 * &a[i] + c1 * &b[i];
            }
            c0 += c1 * c2;
        }
    }
    if q.determinant().is_zero() {
        return Err(Error::InvalidInput(
            "structured quadratic expands to an unbounded set".into(),
        ));
    }
    let planes = factors
        .iter()
        .map(|(a, c)| (a.clone(), -c.clone()))
        .collect();
    Ok((ConvexSet::quadratic(q, lin, c0), planes))
}

/// Verifies the identity `f₁ = λ·f + ∏ⱼ hⱼ` by exact coefficient
/// comparison and returns the planes `hⱼ(x) = 0`. On `{f = 0}` the identity
/// reduces `f₁` to the factor product, so the planes cover
/// `∂{f ≤ 0} ∩ ∂{f₁ ≤ 0}` regardless of convexity.
///
/// Both sets must expose quadratic forms (balls or quadratics); at most two
/// affine factors keep the product within degree two. Constant factors and
/// identity mismatches are rejected.
pub fn general_structure_cover(
    f_set: &ConvexSet,
    f1_set: &ConvexSet,
    lambda: &Rational,
    factors: &[AffineForm],
) -> Result<Vec<(RationalVector, Rational)>> {
    let Some(f) = f_set.as_quadratic_form() else {
        return Err(Error::InvalidInput(
            "general structure cover requires quadratic-form sets".into(),
        ));
    };
    let Some(f1) = f1_set.as_quadratic_form() else {
        return Err(Error::InvalidInput(
            "general structure cover requires quadratic-form sets".into(),
        ));
    };
    if factors.is_empty() || factors.len() > 2 {
        return Err(Error::InvalidInput(
            "general structure cover takes one or two affine factors".into(),
        ));
    }
    let n = f_set.dim();
    for (a, _) in factors {
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
            });
        }
        if a.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidInput(
                "general structure cover requires non-constant factors".into(),
            ));
        }
    }

    let product = factor_product_form(factors, n);
    let lhs = flatten_form(&f1.0, &f1.1, &f1.2);
    let f_flat = flatten_form(&f.0, &f.1, &f.2);
    let p_flat = flatten_form(&product.0, &product.1, &product.2);
    let ok = lhs
        .iter()
        .zip(f_flat.iter().zip(&p_flat))
        .all(|(l, (fc, pc))| l == &(lambda * fc + pc));
    if !ok {
        return Err(Error::InvalidInput(
            "the supplied factorization does not reproduce the target quadratic".into(),
        ));
    }
    Ok(factors.iter().map(|(a, c)| (a.clone(), -c.clone())).collect())
}

/// Expands `∏ hⱼ` (one or two affine factors) into quadratic matrix form.
fn factor_product_form(
    factors: &[AffineForm],
    n: usize,
) -> (RationalMatrix, RationalVector, Rational) {
    match factors {
        [(a, c)] => (RationalMatrix::zero(n, n), a.clone(), c.clone()),
        [(a, c1), (b, c2)] => {
            let mut q = RationalMatrix::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    q.set(i, j, (&a[i] * &b[j] + &a[j] * &b[i]) / rat(2));
                }
            }
            let lin: RationalVector = (0..n).map(|i| c2 * &a[i] + c1 * &b[i]).collect();
            (q, lin, c1 * c2)
        }
        _ => unreachable!("factor count validated by the caller"),
    }
}

/// Coefficient vector of a quadratic form: upper-triangle matrix entries,
/// then the linear part, then the constant. Equal vectors mean identical
/// polynomials.
fn flatten_form(q: &RationalMatrix, lin: &[Rational], c0: &Rational) -> Vec<Rational> {
    let n = q.rows();
    let mut out = Vec::with_capacity(n * (n + 1) / 2 + n + 1);
    for i in 0..n {
        for j in i..n {
            // Off-diagonal entries appear twice in xᵀQx; fold them.
            if i == j {
                out.push(q.get(i, j).clone());
            } else {
                out.push(q.get(i, j) + q.get(j, i));
            }
        }
    }
    out.extend(lin.iter().cloned());
    out.push(c0.clone());
    out
}

/// Per-pair verdict of cover verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    /// Certified by an exact route (classification, identity, or facet
    /// containment); includes vacuous pairs with empty boundary
    /// intersection.
    CoveredExact,
    /// Supported by boundary sampling within tolerance only.
    CoveredSampled,
    /// A boundary-intersection point provably (or by sampling) escapes
    /// every listed plane, or the boundaries coincide.
    Violated,
    /// No decision route applies to this shape combination.
    Unverified,
}

/// One pair's verification outcome.
#[derive(Debug, Clone)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub status: PairStatus,
    pub detail: String,
}

/// Verification report over all pairs.
#[derive(Debug, Clone)]
pub struct CoverReport {
    pub pairs: Vec<PairReport>,
}

impl CoverReport {
    /// True when no pair is violated (unverified pairs are allowed; they
    /// are reported, not guessed).
    pub fn is_clean(&self) -> bool {
        self.pairs.iter().all(|p| p.status != PairStatus::Violated)
    }

    /// Number of violated pairs.
    pub fn violations(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.status == PairStatus::Violated)
            .count()
    }
}

/// Bisection tolerance for sampled boundary walking.
fn sample_tol() -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 30))
}

/// Plane-distance tolerance for sampled points (coarser than the bisection
/// tolerance to absorb error amplification through the plane normal).
fn plane_tol() -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u64 << 20))
}

/// Checks a cover pair by pair. `box_radius` bounds the boundary-walking
/// search in the sampling fallback; `samples` is the number of boundary
/// directions scanned there (zero disables sampling). Exact routes are
/// preferred and never sample.
pub fn verify_cover(
    sets: &[ConvexSet],
    cover: &BoundaryCover,
    box_radius: &Rational,
    samples: usize,
) -> CoverReport {
    let mut pairs = Vec::new();
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            let candidates = candidate_planes(cover, i, j);
            let (status, detail) =
                verify_pair(&sets[i], &sets[j], &candidates, box_radius, samples);
            pairs.push(PairReport {
                i,
                j,
                status,
                detail,
            });
        }
    }
    CoverReport { pairs }
}

/// The planes listed for a pair, or every cover plane when the pair has no
/// explicit assignment.
fn candidate_planes(
    cover: &BoundaryCover,
    i: usize,
    j: usize,
) -> Vec<(RationalVector, Rational)> {
    match cover.pair(i, j) {
        Some(pc) => pc
            .planes
            .iter()
            .map(|&k| cover.hyperplanes[k].clone())
            .collect(),
        None => cover.hyperplanes.clone(),
    }
}

fn verify_pair(
    ci: &ConvexSet,
    cj: &ConvexSet,
    planes: &[(RationalVector, Rational)],
    box_radius: &Rational,
    samples: usize,
) -> (PairStatus, String) {
    // Route 1: two balls — fully exact via classification.
    if let (Some(b1), Some(b2)) = (as_ball(ci), as_ball(cj)) {
        return verify_ball_pair(&b1, &b2, planes);
    }
    // Route 2: two quadratic forms — certify f_j = α f_i + μ·(plane part).
    if let (Some(fi), Some(fj)) = (ci.as_quadratic_form(), cj.as_quadratic_form()) {
        if let Some(detail) = quadratic_identity_route(&fi, &fj, planes) {
            return (PairStatus::CoveredExact, detail);
        }
        // Sampling fallback (plane only).
        if ci.dim() == 2 && samples > 0 {
            if let Some(result) =
                sampled_route(ci, cj, planes, box_radius, samples)
            {
                return result;
            }
        }
        return (
            PairStatus::Unverified,
            "no factorization identity matched the listed planes".into(),
        );
    }
    // Route 3: a polyhedron's boundary lies in its facet planes.
    for set in [ci, cj] {
        if let ConvexSet::Polyhedron(p) = set {
            let canon: Vec<_> = planes
                .iter()
                .map(|(a, b)| normalize_hyperplane(a, b))
                .collect();
            let all_listed = p
                .rows()
                .iter()
                .all(|(a, b)| canon.contains(&normalize_hyperplane(a, b)));
            if all_listed {
                return (
                    PairStatus::CoveredExact,
                    "every facet plane of the polyhedral member is listed".into(),
                );
            }
        }
    }
    (
        PairStatus::Unverified,
        "no exact route for this shape combination".into(),
    )
}

/// Exact verification for a ball pair.
fn verify_ball_pair(
    b1: &BallData,
    b2: &BallData,
    planes: &[(RationalVector, Rational)],
) -> (PairStatus, String) {
    let n = b1.dim();
    match classify_spheres(b1, b2) {
        SphereRelation::Equal => (
            PairStatus::Violated,
            "the boundaries coincide; a sphere cannot be covered by hyperplanes".into(),
        ),
        SphereRelation::Disjoint => (
            PairStatus::CoveredExact,
            "disjoint spheres: empty boundary intersection".into(),
        ),
        SphereRelation::Contained => (
            PairStatus::CoveredExact,
            "strictly nested spheres: empty boundary intersection".into(),
        ),
        SphereRelation::Tangent => {
            let touch = circle_data(b1, b2)
                .expect("tangent spheres have distinct centers")
                .center;
            if planes
                .iter()
                .any(|(a, b)| dot(a, &touch) == *b)
            {
                (
                    PairStatus::CoveredExact,
                    "a listed plane passes through the tangency point".into(),
                )
            } else {
                (
                    PairStatus::Violated,
                    format!("no listed plane contains the tangency point {touch:?}"),
                )
            }
        }
        SphereRelation::FullCircle => {
            if n == 1 {
                // On the line the "circle" lives in a zero-dimensional
                // plane section: the sphere pairs share no boundary point.
                return (
                    PairStatus::CoveredExact,
                    "one-dimensional spheres with positive circle radius never share \
                     boundary points"
                        .into(),
                );
            }
            let circle = circle_data(b1, b2).expect("crossing spheres have distinct centers");
            let (ra, rb) = radical_hyperplane(b1, b2)
                .expect("crossing spheres have distinct centers");
            if n >= 3 {
                // The intersection is a sphere of dimension ≥ 1: it spans
                // the radical plane, so only that plane can cover it.
                let canon = normalize_hyperplane(&ra, &rb);
                if planes
                    .iter()
                    .any(|(a, b)| normalize_hyperplane(a, b) == canon)
                {
                    (
                        PairStatus::CoveredExact,
                        "the radical plane (the intersection's affine hull) is listed".into(),
                    )
                } else {
                    (
                        PairStatus::Violated,
                        "the intersection sphere has positive dimension; only its \
                         affine hull covers it, and that plane is not listed"
                            .into(),
                    )
                }
            } else {
                // In the plane the boundaries cross in exactly two points
                // z₀ ± s·v with v ⊥ (c₂ − c₁), ‖v‖² = d², s = √(ρ²/d²).
                let delta = sub(&b2.center, &b1.center);
                let v = vec![-delta[1].clone(), delta[0].clone()];
                let dsq = norm_sq(&delta);
                let plus_covered = planes
                    .iter()
                    .any(|(a, b)| plane_hits_surd_point(a, b, &circle, &v, &dsq, true));
                let minus_covered = planes
                    .iter()
                    .any(|(a, b)| plane_hits_surd_point(a, b, &circle, &v, &dsq, false));
                if plus_covered && minus_covered {
                    (
                        PairStatus::CoveredExact,
                        "both circle intersection points lie on listed planes".into(),
                    )
                } else {
                    (
                        PairStatus::Violated,
                        format!(
                            "a circle intersection point near {:?} escapes every \
                             listed plane",
                            circle.center
                        ),
                    )
                }
            }
        }
    }
}

/// Exact membership of `z₀ ± s·v` on the plane `aᵀx = b`, where
/// `s = √(ρ²/d²) > 0` is known only by its square. With `A = b − aᵀz₀` and
/// `B = aᵀv`, the point lies on the plane iff `A = ±s·B`, i.e. both vanish
/// or the signs match (`+` branch) / oppose (`−` branch) and
/// `A²·d² = ρ²·B²`.
fn plane_hits_surd_point(
    a: &[Rational],
    b: &Rational,
    circle: &CircleData,
    v: &[Rational],
    dsq: &Rational,
    plus: bool,
) -> bool {
    let big_a = b - dot(a, &circle.center);
    let big_b = dot(a, v);
    if big_b.is_zero() {
        return big_a.is_zero();
    }
    let signs_match = big_a.is_positive() == big_b.is_positive();
    if big_a.is_zero() || signs_match != plus {
        return false;
    }
    &big_a * &big_a * dsq == &circle.rho_sq * &big_b * &big_b
}

/// Tries to certify `f_j = α·f_i + μ·ℓ` for a listed plane `ℓ` (or
/// `μ·ℓ_kℓ_l` for a listed pair), in either orientation. A consistent
/// solution with `μ ≠ 0` pins the pair's common boundary to the involved
/// plane(s). Returns a human-readable certificate on success.
fn quadratic_identity_route(
    fi: &(RationalMatrix, RationalVector, Rational),
    fj: &(RationalMatrix, RationalVector, Rational),
    planes: &[(RationalVector, Rational)],
) -> Option<String> {
    let single_forms: Vec<(RationalMatrix, RationalVector, Rational)> = planes
        .iter()
        .map(|(a, b)| {
            let n = a.len();
            (RationalMatrix::zero(n, n), a.clone(), -b.clone())
        })
        .collect();
    for (idx, form) in single_forms.iter().enumerate() {
        for (base, target) in [(fi, fj), (fj, fi)] {
            if try_two_term_identity(base, target, form) {
                return Some(format!(
                    "identity: one set's quadratic is an exact multiple of the \
                     other's plus a multiple of listed plane {idx}"
                ));
            }
        }
    }
    for k in 0..planes.len() {
        for l in k..planes.len() {
            let prod = factor_product_form(
                &[
                    (planes[k].0.clone(), -planes[k].1.clone()),
                    (planes[l].0.clone(), -planes[l].1.clone()),
                ],
                planes[k].0.len(),
            );
            for (base, target) in [(fi, fj), (fj, fi)] {
                if try_two_term_identity(base, target, &prod) {
                    return Some(format!(
                        "identity: one set's quadratic equals a multiple of the \
                         other's plus a multiple of the product of listed planes \
                         {k} and {l}"
                    ));
                }
            }
        }
    }
    None
}

/// Solves `target = α·base + μ·term` over the quadratic coefficient space
/// and reports whether a solution with `μ ≠ 0` exists.
fn try_two_term_identity(
    base: &(RationalMatrix, RationalVector, Rational),
    target: &(RationalMatrix, RationalVector, Rational),
    term: &(RationalMatrix, RationalVector, Rational),
) -> bool {
    let base_flat = flatten_form(&base.0, &base.1, &base.2);
    let term_flat = flatten_form(&term.0, &term.1, &term.2);
    let target_flat = flatten_form(&target.0, &target.1, &target.2);
    let rows = base_flat.len();
    let mut m = RationalMatrix::zero(rows, 2);
    for r in 0..rows {
        m.set(r, 0, base_flat[r].clone());
        m.set(r, 1, term_flat[r].clone());
    }
    let solved = solve_linear(&m, &target_flat);
    let Some(sol) = solved.solution else {
        return false;
    };
    if !sol[1].is_zero() {
        return true;
    }
    // μ pinned to zero with free columns: look for a consistent adjustment.
    nullspace(&m).iter().any(|v| !v[1].is_zero())
}

/// Sampling fallback in the plane: walk `∂Cᵢ` by rational directions from
/// an interior anchor, bisect the defining function of `Cⱼ` between sign
/// changes to locate boundary-intersection points, and check each lies
/// within tolerance of some listed plane. `None` when no anchor exists.
fn sampled_route(
    ci: &ConvexSet,
    cj: &ConvexSet,
    planes: &[(RationalVector, Rational)],
    box_radius: &Rational,
    samples: usize,
) -> Option<(PairStatus, String)> {
    let anchor = interior_anchor(ci)?;
    let tol = sample_tol();
    let boundary_point = |dir: &RationalVector| -> Option<RationalVector> {
        boundary_along_ray(ci, &anchor, dir, box_radius, &tol)
    };

    // Rational directions around the circle via the tangent half-angle
    // parametrization, plus the antipodal gap direction.
    let mut dirs: Vec<RationalVector> = Vec::with_capacity(samples + 1);
    let span = rat(16);
    for k in 0..samples {
        let u = -&span + rat(2) * &span * ratio(k as i64, samples as i64);
        let denom = rat(1) + &u * &u;
        dirs.push(vec![(rat(1) - &u * &u) / &denom, rat(2) * &u / &denom]);
    }
    dirs.push(vec![rat(-1), rat(0)]);

    let mut points: Vec<(RationalVector, Rational)> = Vec::new();
    for d in &dirs {
        if let Some(p) = boundary_point(d) {
            let val = cj.quadratic_value(&p).expect("route requires quadratic forms");
            points.push((p, val));
        }
    }
    if points.len() < 2 {
        return Some((
            PairStatus::Unverified,
            "boundary walking found too few sample points".into(),
        ));
    }

    let mut crossings: Vec<RationalVector> = Vec::new();
    for k in 0..points.len() {
        let (p0, v0) = &points[k];
        let (p1, v1) = &points[(k + 1) % points.len()];
        if v0.is_zero() {
            crossings.push(p0.clone());
            continue;
        }
        if (v0.is_positive() && v1.is_negative()) || (v0.is_negative() && v1.is_positive()) {
            // Bisect along the chord between the two boundary points,
            // re-projecting onto ∂Cᵢ through the anchor at each step.
            let mut lo = p0.clone();
            let mut hi = p1.clone();
            let mut lo_val = v0.clone();
            for _ in 0..64 {
                let mid_dir: RationalVector = (0..2)
                    .map(|i| (&lo[i] + &hi[i]) / rat(2) - &anchor[i])
                    .collect();
                if mid_dir.iter().all(|v| v.is_zero()) {
                    break;
                }
                let Some(mid) = boundary_point(&mid_dir) else { break };
                let mv = cj.quadratic_value(&mid).expect("quadratic form");
                if mv.is_zero() {
                    lo = mid;
                    break;
                }
                if mv.is_positive() == lo_val.is_positive() {
                    lo = mid;
                    lo_val = mv;
                } else {
                    hi = mid;
                }
                let gap: Rational = (0..2).map(|i| (&lo[i] - &hi[i]).abs()).sum();
                if gap <= sample_tol() {
                    break;
                }
            }
            crossings.push(lo);
        }
    }

    if crossings.is_empty() {
        return Some((
            PairStatus::CoveredSampled,
            format!("no boundary intersection detected at {samples} samples"),
        ));
    }
    let tol_plane = plane_tol();
    for p in &crossings {
        let on_some_plane = planes.iter().any(|(a, b)| {
            let (na, nb) = normalize_hyperplane(a, b);
            (dot(&na, p) - nb).abs() <= tol_plane
        });
        if !on_some_plane {
            return Some((
                PairStatus::Violated,
                format!("sampled boundary-intersection point {p:?} escapes every listed plane"),
            ));
        }
    }
    Some((
        PairStatus::CoveredSampled,
        format!(
            "{} sampled boundary-intersection point(s) lie on listed planes within tolerance",
            crossings.len()
        ),
    ))
}

/// A strict interior point of a ball or quadratic (center or stationary
/// point with negative value).
fn interior_anchor(set: &ConvexSet) -> Option<RationalVector> {
    match set {
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
            let z = solve_linear(&grad, &rhs).solution?;
            if set.contains_strict(&z) {
                Some(z)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The boundary point of `set` along `anchor + λ·dir` (λ > 0), bisected to
/// the given tolerance; `None` when the ray stays inside out to the box
/// radius scale.
fn boundary_along_ray(
    set: &ConvexSet,
    anchor: &[Rational],
    dir: &[Rational],
    box_radius: &Rational,
    tol: &Rational,
) -> Option<RationalVector> {
    let point_at = |lambda: &Rational| -> RationalVector {
        anchor
            .iter()
            .zip(dir)
            .map(|(a, d)| a + lambda * d)
            .collect()
    };
    let mut lo = rat(0);
    let mut hi = rat(1);
    let cap = rat(8) * box_radius.clone() + rat(8);
    while set.contains(&point_at(&hi)) {
        lo = hi.clone();
        hi *= rat(2);
        if hi > cap {
            return None;
        }
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / rat(2);
        if set.contains(&point_at(&mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(point_at(&lo))
}

/// Deduplicated canonical planes collected from several covers or plane
/// lists (used by callers assembling composite covers).
pub fn dedupe_planes(
    planes: impl IntoIterator<Item = (RationalVector, Rational)>,
) -> Vec<(RationalVector, Rational)> {
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut out = Vec::new();
    for (a, b) in planes {
        let canon = normalize_hyperplane(&a, &b);
        let key = format!("{canon:?}");
        if seen.insert(key, ()).is_none() {
            out.push(canon);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, ratio};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ball(cx: i64, cy: i64, r: (i64, i64)) -> BallData {
        BallData::from_radius(vec![rat(cx), rat(cy)], &ratio(r.0, r.1))
    }

    fn unit(cx: i64, cy: i64) -> BallData {
        ball(cx, cy, (1, 1))
    }

    #[test]
    fn radical_plane_matches_the_frozen_examples() {
        // Two unit circles a step apart: x₁ = 1/2 (scaled by −2).
        let (a, b) = radical_hyperplane(&unit(0, 0), &unit(1, 0)).unwrap();
        assert_eq!(a, vec![rat(-2), rat(0)]);
        assert_eq!(b, rat(-1));
        assert_eq!(
            normalize_hyperplane(&a, &b),
            (vec![rat(1), rat(0)], ratio(1, 2))
        );

        // Tangent pair: plane x₁ = 1 through the touch point (1, 0).
        let (a, b) = radical_hyperplane(&unit(0, 0), &ball(3, 0, (2, 1))).unwrap();
        assert_eq!(a, vec![rat(-6), rat(0)]);
        assert_eq!(b, rat(-6));
        let touch = circle_data(&unit(0, 0), &ball(3, 0, (2, 1))).unwrap();
        assert_eq!(touch.center, vec![rat(1), rat(0)]);
        assert_eq!(touch.rho_sq, rat(0));

        // Concentric: no plane.
        assert!(radical_hyperplane(&unit(0, 0), &ball(0, 0, (2, 1))).is_none());
    }

    #[test]
    fn radical_identity_is_exact_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 100 {
            let c1 = vec![ratio(rng.gen_range(-40..40), 8), ratio(rng.gen_range(-40..40), 8)];
            let c2 = vec![ratio(rng.gen_range(-40..40), 8), ratio(rng.gen_range(-40..40), 8)];
            if c1 == c2 {
                continue;
            }
            let b1 = BallData::new(c1, ratio(rng.gen_range(1..50), 4));
            let b2 = BallData::new(c2, ratio(rng.gen_range(1..50), 4));
            let (a, b) = radical_hyperplane(&b1, &b2).unwrap();
            // q₁ − q₂ ≡ b − aᵀx: compare coefficients exactly. The
            // quadratic parts cancel; the linear part is −a; the constant
            // is b.
            for i in 0..2 {
                let lin_diff = rat(-2) * (&b1.center[i] - &b2.center[i]);
                assert_eq!(lin_diff, -&a[i]);
            }
            let const_diff = norm_sq(&b1.center) - &b1.radius_sq
                - (norm_sq(&b2.center) - &b2.radius_sq);
            assert_eq!(const_diff, b);
            checked += 1;
        }
    }

    #[test]
    fn sphere_classification_covers_the_matrix() {
        use SphereRelation::*;
        // External tangency and crossing.
        assert_eq!(classify_spheres(&unit(0, 0), &ball(3, 0, (2, 1))), Tangent);
        assert_eq!(classify_spheres(&unit(0, 0), &unit(1, 0)), FullCircle);
        // Disjoint at distance 3 with radii 1 + 1.
        assert_eq!(classify_spheres(&unit(0, 0), &unit(3, 0)), Disjoint);
        // Strict containment, off-center.
        assert_eq!(
            classify_spheres(&ball(0, 0, (2, 1)), &ball(1, 0, (1, 2))),
            Contained
        );
        // Internal tangency: B(0,2) and B(1,0 radius 1) touch at (2,0).
        assert_eq!(
            classify_spheres(&ball(0, 0, (2, 1)), &ball(1, 0, (1, 1))),
            Tangent
        );
        // Concentric strict nesting and equality.
        assert_eq!(
            classify_spheres(&unit(0, 0), &ball(0, 0, (2, 1))),
            Contained
        );
        assert_eq!(classify_spheres(&unit(0, 0), &unit(0, 0)), Equal);
        // Symmetry.
        assert_eq!(
            classify_spheres(&ball(1, 0, (1, 2)), &ball(0, 0, (2, 1))),
            Contained
        );
        // Irrational radii known by squares: r₁² = 2, r₂² = 8, centers
        // √2 + 2√2 = 3√2 apart would be tangent; d² = 18 matches exactly.
        let s1 = BallData::new(vec![rat(0), rat(0)], rat(2));
        let s2 = BallData::new(vec![rat(3), rat(3)], rat(8));
        assert_eq!(classify_spheres(&s1, &s2), Tangent);
    }

    #[test]
    fn ball_cover_assigns_planes_only_to_meeting_pairs() {
        let balls = vec![unit(0, 0), unit(1, 0), unit(5, 0)];
        let cover = cover_for_balls(&balls).unwrap();
        assert_eq!(cover.hyperplanes.len(), 1);
        assert_eq!(
            cover.hyperplanes[0],
            (vec![rat(1), rat(0)], ratio(1, 2))
        );
        assert_eq!(cover.pair(0, 1).unwrap().planes.len(), 1);
        assert!(cover.pair(0, 1).unwrap().ideal);
        assert!(cover.pair(0, 2).unwrap().planes.is_empty());
        assert!(cover.pair(1, 2).unwrap().planes.is_empty());
        assert!(cover.is_ideal());

        // A tangent pair is covered but not ideal.
        let cover = cover_for_balls(&[unit(0, 0), ball(3, 0, (2, 1))]).unwrap();
        assert_eq!(cover.hyperplanes.len(), 1);
        assert!(!cover.pair(0, 1).unwrap().ideal);
        assert!(!cover.is_ideal());

        // Equal balls are rejected.
        assert!(cover_for_balls(&[unit(0, 0), unit(0, 0)]).is_err());
    }

    #[test]
    fn convexity_condition_reproduces_the_worked_triples() {
        let e1 = vec![rat(1), rat(0), rat(0)];
        let neg_e1 = vec![rat(-1), rat(0), rat(0)];
        assert_eq!(convexity_condition(&rat(1), &e1, &e1).unwrap(), true);
        assert_eq!(convexity_condition(&rat(1), &e1, &neg_e1).unwrap(), true);
        assert_eq!(
            convexity_condition(&ratio(1, 4), &e1, &neg_e1).unwrap(),
            false
        );
        assert!(convexity_condition(&rat(1), &[rat(0), rat(0)], &[rat(1), rat(0)]).is_err());
    }

    #[test]
    fn convexity_condition_agrees_with_exact_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = if rng.gen_bool(0.5) { 2 } else { 3 };
            let alpha = ratio(rng.gen_range(-8..9), 4);
            let a: RationalVector =
                (0..n).map(|_| ratio(rng.gen_range(-6..7), 2)).collect();
            let b: RationalVector =
                (0..n).map(|_| ratio(rng.gen_range(-6..7), 2)).collect();
            if a.iter().all(|v| v.is_zero()) || b.iter().all(|v| v.is_zero()) {
                continue;
            }
            // Hessian 2αI + abᵀ + baᵀ.
            let mut h = RationalMatrix::zero(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut v = &a[i] * &b[j] + &a[j] * &b[i];
                    if i == j {
                        v += rat(2) * &alpha;
                    }
                    h.set(i, j, v);
                }
            }
            assert_eq!(
                convexity_condition(&alpha, &a, &b).unwrap(),
                crate::linalg::is_psd(&h),
                "disagreement at α={alpha}, a={a:?}, b={b:?}"
            );
        }
    }

    #[test]
    fn structured_quadratics_expand_with_their_planes() {
        // Single factor: g = ‖x‖² − 1 + (x₁ − 1/2).
        let form = QuadraticBhcForm::Single {
            alpha: rat(1),
            h1: (vec![rat(1), rat(0)], ratio(-1, 2)),
        };
        let (set, planes) = quadratic_from_form(&form).unwrap();
        assert_eq!(planes, vec![(vec![rat(1), rat(0)], ratio(1, 2))]);
        let (q, lin, c0) = set.as_quadratic_form().unwrap();
        assert_eq!(q, RationalMatrix::identity(2));
        assert_eq!(lin, vec![rat(1), rat(0)]);
        assert_eq!(c0, ratio(-3, 2));

        // Product form: two planes, matrix picks up the rank-two update.
        let form = QuadraticBhcForm::Product {
            alpha: rat(1),
            h1: (vec![rat(1), rat(0)], ratio(-1, 2)),
            h2: (vec![rat(0), rat(1)], ratio(-1, 2)),
        };
        let (set, planes) = quadratic_from_form(&form).unwrap();
        assert_eq!(planes.len(), 2);
        assert_eq!(planes[0], (vec![rat(1), rat(0)], ratio(1, 2)));
        assert_eq!(planes[1], (vec![rat(0), rat(1)], ratio(1, 2)));
        let (q, lin, c0) = set.as_quadratic_form().unwrap();
        assert_eq!(q.get(0, 1), &ratio(1, 2));
        assert_eq!(lin, vec![ratio(-1, 2), ratio(-1, 2)]);
        assert_eq!(c0, ratio(-3, 4));

        // On the unit sphere g reduces to the factor product: rational
        // sphere points with g = 0 must zero a factor.
        let g = |x: &[Rational]| -> Rational {
            set.quadratic_value(x).unwrap()
        };
        for k in -12i64..=12 {
            let u = ratio(k, 5);
            let denom = rat(1) + &u * &u;
            let x = vec![(rat(1) - &u * &u) / &denom, rat(2) * &u / &denom];
            assert_eq!(norm_sq(&x), rat(1));
            let h1 = &x[0] - ratio(1, 2);
            let h2 = &x[1] - ratio(1, 2);
            assert_eq!(g(&x), &h1 * &h2);
            if g(&x).is_zero() {
                assert!(h1.is_zero() || h2.is_zero());
            }
        }

        // α = 0 and non-convex expansions are rejected.
        assert!(quadratic_from_form(&QuadraticBhcForm::Single {
            alpha: rat(0),
            h1: (vec![rat(1), rat(0)], rat(0)),
        })
        .is_err());
        assert!(quadratic_from_form(&QuadraticBhcForm::Product {
            alpha: ratio(1, 4),
            h1: (vec![rat(1), rat(0)], rat(0)),
            h2: (vec![rat(-1), rat(0)], rat(0)),
        })
        .is_err());
    }

    #[test]
    fn general_structure_recovers_the_radical_plane() {
        let f = ConvexSet::ball(vec![rat(0), rat(0)], rat(1));
        let f1 = ConvexSet::ball(vec![rat(1), rat(0)], rat(1));
        // ‖x − c‖² − r² = (‖x‖² − 1) + (−2c·x + ‖c‖² − r² + 1).
        let factor = (vec![rat(-2), rat(0)], rat(1));
        let planes = general_structure_cover(&f, &f1, &rat(1), &[factor]).unwrap();
        assert_eq!(planes.len(), 1);
        let (ra, rb) =
            radical_hyperplane(&unit(0, 0), &unit(1, 0)).unwrap();
        assert_eq!(
            normalize_hyperplane(&planes[0].0, &planes[0].1),
            normalize_hyperplane(&ra, &rb)
        );

        // Wrong factor: identity mismatch.
        let bad = (vec![rat(-2), rat(0)], rat(2));
        assert!(general_structure_cover(&f, &f1, &rat(1), &[bad]).is_err());
        // Constant factor: rejected.
        let constant = (vec![rat(0), rat(0)], rat(1));
        assert!(general_structure_cover(&f, &f1, &rat(1), &[constant]).is_err());

        // Two-factor case: f₁ = 1·f + h₁h₂ with h₁ = x₁ − 1/2,
        // h₂ = x₂ − 1/2 reproduces the product expansion.
        let form = QuadraticBhcForm::Product {
            alpha: rat(1),
            h1: (vec![rat(1), rat(0)], ratio(-1, 2)),
            h2: (vec![rat(0), rat(1)], ratio(-1, 2)),
        };
        let (set, _) = quadratic_from_form(&form).unwrap();
        let planes = general_structure_cover(
            &f,
            &set,
            &rat(1),
            &[
                (vec![rat(1), rat(0)], ratio(-1, 2)),
                (vec![rat(0), rat(1)], ratio(-1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(planes.len(), 2);
    }

    #[test]
    fn verify_cover_certifies_radical_covers_exactly() {
        let balls = vec![unit(0, 0), unit(1, 0)];
        let sets: Vec<ConvexSet> = balls.iter().map(BallData::to_convex_set).collect();
        let cover = cover_for_balls(&balls).unwrap();
        let report = verify_cover(&sets, &cover, &rat(4), 0);
        assert_eq!(report.pairs.len(), 1);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);
        assert!(report.is_clean());

        // The wrong plane x₁ = 0 misses both intersection points.
        let mut wrong = BoundaryCover::new(2);
        let idx = wrong.add_hyperplane(&[rat(1), rat(0)], &rat(0));
        wrong.add_pair(0, 1, vec![idx], false);
        let report = verify_cover(&sets, &wrong, &rat(4), 0);
        assert_eq!(report.pairs[0].status, PairStatus::Violated);
        assert_eq!(report.violations(), 1);

        // Tangent pair: the radical plane passes through the touch point.
        let tangent = vec![unit(0, 0), ball(3, 0, (2, 1))];
        let tangent_sets: Vec<ConvexSet> =
            tangent.iter().map(BallData::to_convex_set).collect();
        let cover = cover_for_balls(&tangent).unwrap();
        let report = verify_cover(&tangent_sets, &cover, &rat(6), 0);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);

        // Disjoint pair with an empty cover: vacuously clean.
        let apart = vec![unit(0, 0), unit(5, 0)];
        let apart_sets: Vec<ConvexSet> = apart.iter().map(BallData::to_convex_set).collect();
        let cover = cover_for_balls(&apart).unwrap();
        let report = verify_cover(&apart_sets, &cover, &rat(8), 0);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);
        assert!(report.is_clean());
    }

    #[test]
    fn verify_cover_certifies_structured_quadratics_via_identities() {
        // Unit ball against the single-factor expansion: the plane
        // x₁ = 1/2 is certified through the identity route.
        let ball = ConvexSet::ball(vec![rat(0), rat(0)], rat(1));
        let form = QuadraticBhcForm::Single {
            alpha: rat(1),
            h1: (vec![rat(1), rat(0)], ratio(-1, 2)),
        };
        let (set, planes) = quadratic_from_form(&form).unwrap();
        let mut cover = BoundaryCover::new(2);
        let idx = cover.add_hyperplane(&planes[0].0, &planes[0].1);
        cover.add_pair(0, 1, vec![idx], false);
        let report = verify_cover(&[ball.clone(), set], &cover, &rat(4), 0);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);

        // Product form: both planes certified through the product identity.
        let form = QuadraticBhcForm::Product {
            alpha: rat(1),
            h1: (vec![rat(1), rat(0)], ratio(-1, 2)),
            h2: (vec![rat(0), rat(1)], ratio(-1, 2)),
        };
        let (set, planes) = quadratic_from_form(&form).unwrap();
        let mut cover = BoundaryCover::new(2);
        let k0 = cover.add_hyperplane(&planes[0].0, &planes[0].1);
        let k1 = cover.add_hyperplane(&planes[1].0, &planes[1].1);
        cover.add_pair(0, 1, vec![k0, k1], false);
        let report = verify_cover(&[ball, set], &cover, &rat(4), 0);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);
    }

    #[test]
    fn verify_cover_in_three_dimensions_requires_the_affine_hull() {
        let b1 = BallData::from_radius(vec![rat(0), rat(0), rat(0)], &rat(1));
        let b2 = BallData::from_radius(vec![rat(1), rat(0), rat(0)], &rat(1));
        let sets = vec![b1.to_convex_set(), b2.to_convex_set()];
        let cover = cover_for_balls(&[b1, b2]).unwrap();
        let report = verify_cover(&sets, &cover, &rat(4), 0);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);

        // A different plane through the circle's center point but tilted:
        // rejected, because only the affine hull can contain the circle.
        let mut wrong = BoundaryCover::new(3);
        let idx = wrong.add_hyperplane(&[rat(0), rat(1), rat(0)], &rat(0));
        wrong.add_pair(0, 1, vec![idx], false);
        let report = verify_cover(&sets, &wrong, &rat(4), 0);
        assert_eq!(report.pairs[0].status, PairStatus::Violated);
    }

    #[test]
    fn surd_point_membership_distinguishes_the_two_branches() {
        // Circles around (0,0) and (1,0): intersection points
        // (1/2, ±√3/2). The horizontal line x₂ = 0 misses both; the
        // vertical x₁ = 1/2 hits both; a diagonal through only the upper
        // point hits exactly one branch.
        let b1 = unit(0, 0);
        let b2 = unit(1, 0);
        let circle = circle_data(&b1, &b2).unwrap();
        let v = vec![rat(0), rat(1)];
        let dsq = rat(1);
        let vertical = (vec![rat(1), rat(0)], ratio(1, 2));
        assert!(plane_hits_surd_point(&vertical.0, &vertical.1, &circle, &v, &dsq, true));
        assert!(plane_hits_surd_point(&vertical.0, &vertical.1, &circle, &v, &dsq, false));
        let horizontal = (vec![rat(0), rat(1)], rat(0));
        assert!(!plane_hits_surd_point(
            &horizontal.0,
            &horizontal.1,
            &circle,
            &v,
            &dsq,
            true
        ));
        // Plane x₂ = √3/2 cannot be stated rationally; instead use the
        // line through (1/2, √3/2) with rational slope relative to z₀:
        // 2·3·(x₁ − 1/2) = 2√3·... — keep to a rational-comparable case:
        // a·x = b with a = (0, 2), b² chosen so b = √3: not rational, so
        // test the sign discrimination with a plane that hits only the
        // lower branch by symmetry: x₁ + t·x₂ = 1/2 with t chosen so
        // A = 0 forces B = 0 — here A = 0 and B = t ≠ 0 fails both.
        let tilted = (vec![rat(1), rat(1)], ratio(1, 2));
        assert!(!plane_hits_surd_point(&tilted.0, &tilted.1, &circle, &v, &dsq, true));
        assert!(!plane_hits_surd_point(&tilted.0, &tilted.1, &circle, &v, &dsq, false));
    }

    #[test]
    fn sampled_route_flags_wrong_planes_for_curved_pairs() {
        // An ellipse against the unit ball, cover by the correct single
        // factor: exact identity certifies it. Shifting the listed plane
        // breaks the identity and sampling reports the violation.
        let ball = ConvexSet::ball(vec![rat(0), rat(0)], rat(1));
        let form = QuadraticBhcForm::Single {
            alpha: rat(2),
            h1: (vec![rat(1), rat(1)], ratio(-1, 2)),
        };
        let (set, planes) = quadratic_from_form(&form).unwrap();
        let mut cover = BoundaryCover::new(2);
        let idx = cover.add_hyperplane(&planes[0].0, &planes[0].1);
        cover.add_pair(0, 1, vec![idx], false);
        let report = verify_cover(&[ball.clone(), set.clone()], &cover, &rat(4), 32);
        assert_eq!(report.pairs[0].status, PairStatus::CoveredExact);

        let mut wrong = BoundaryCover::new(2);
        let idx = wrong.add_hyperplane(&[rat(1), rat(1)], &rat(2));
        wrong.add_pair(0, 1, vec![idx], false);
        let report = verify_cover(&[ball, set], &wrong, &rat(4), 64);
        assert_eq!(report.pairs[0].status, PairStatus::Violated);
    }

    #[test]
    fn ball_recognition_covers_matrix_disguises() {
        let b = ConvexSet::ball(vec![rat(1), rat(2)], ratio(3, 2));
        let data = as_ball(&b).unwrap();
        assert_eq!(data.center, vec![rat(1), rat(2)]);
        assert_eq!(data.radius_sq, ratio(9, 4));

        // 2‖x‖² − 4x₁ − 2 ≤ 0 is the ball ‖x − (1,0)‖² ≤ 2.
        let q = ConvexSet::quadratic(
            RationalMatrix::from_rows(vec![
                vec![rat(2), rat(0)],
                vec![rat(0), rat(2)],
            ]),
            vec![rat(-4), rat(0)],
            rat(-2),
        );
        let data = as_ball(&q).unwrap();
        assert_eq!(data.center, vec![rat(1), rat(0)]);
        assert_eq!(data.radius_sq, rat(2));

        // Non-scalar matrix and empty balls are rejected.
        let ellipse = ConvexSet::quadratic(
            RationalMatrix::from_rows(vec![
                vec![rat(1), rat(0)],
                vec![rat(0), rat(4)],
            ]),
            vec![rat(0), rat(0)],
            rat(-4),
        );
        assert!(as_ball(&ellipse).is_none());
        let empty = ConvexSet::quadratic(
            RationalMatrix::identity(2),
            vec![rat(0), rat(0)],
            rat(1),
        );
        assert!(as_ball(&empty).is_none());
    }
}
