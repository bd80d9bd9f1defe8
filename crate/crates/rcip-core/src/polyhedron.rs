//! H-polyhedra: `{x : Ax ≤ b}` with exact rational data.
//!
//! Beyond membership and row bookkeeping this module provides the two exact
//! geometric subroutines the decomposition pipeline leans on:
//!
//! * vertex enumeration by solving every maximal-rank `n`-subset of rows and
//!   filtering by feasibility (fine at this crate's problem scale), and
//! * exact minimization of a convex quadratic over the polyhedron by
//!   enumerating KKT systems over active-row subsets. Every constrained
//!   minimizer is critical on the affine hull of its tight rows, so scanning
//!   all independent subsets of size ≤ n and keeping feasible critical
//!   values is exhaustive. Singular KKT systems are handled by searching the
//!   (value-preserving) solution space for a feasible representative with an
//!   auxiliary LP.

use crate::linalg::{
    self, dot, normalize_halfspace, nullspace, rat, solve_linear, Rational, RationalMatrix,
    RationalVector,
};
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use num_traits::Signed;

/// A rational H-polyhedron `{x : a_i·x ≤ b_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolyhedron {
    dim: usize,
    rows: Vec<(RationalVector, Rational)>,
}

impl HPolyhedron {
    /// Builds a polyhedron from inequality rows. Panics on ragged rows or an
    /// empty row list (use [`HPolyhedron::universe`] for the free polyhedron).
    pub fn new(rows: Vec<(RationalVector, Rational)>) -> Self {
        let dim = rows
            .first()
            .map(|(a, _)| a.len())
            .expect("HPolyhedron::new: no rows; use universe(dim)");
        Self::with_dim(dim, rows)
    }

    /// Builds a polyhedron of explicit dimension (row list may be empty).
    pub fn with_dim(dim: usize, rows: Vec<(RationalVector, Rational)>) -> Self {
        for (a, _) in &rows {
            assert_eq!(a.len(), dim, "HPolyhedron: dimension mismatch");
        }
        HPolyhedron { dim, rows }
    }

    /// All of `ℝⁿ`.
    pub fn universe(dim: usize) -> Self {
        HPolyhedron { dim, rows: Vec::new() }
    }

    /// The box `lo ≤ x_i ≤ hi` in each coordinate.
    pub fn from_bounds(dim: usize, lo: &Rational, hi: &Rational) -> Self {
        let mut rows = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = linalg::zeros(dim);
            e[i] = rat(1);
            rows.push((e.clone(), hi.clone()));
            let mut ne = linalg::zeros(dim);
            ne[i] = rat(-1);
            rows.push((ne, -lo.clone()));
        }
        HPolyhedron { dim, rows }
    }

    /// The symmetric box `[-r, r]ⁿ`.
    pub fn cube(dim: usize, r: &Rational) -> Self {
        Self::from_bounds(dim, &-r.clone(), r)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(RationalVector, Rational)] {
        &self.rows
    }

    pub fn push_row(&mut self, a: RationalVector, b: Rational) {
        assert_eq!(a.len(), self.dim, "push_row: dimension mismatch");
        self.rows.push((a, b));
    }

    /// New polyhedron with the rows of `other` appended.
    pub fn intersect(&self, other: &HPolyhedron) -> HPolyhedron {
        assert_eq!(self.dim, other.dim, "intersect: dimension mismatch");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        HPolyhedron { dim: self.dim, rows }
    }

    /// Rows rescaled to primitive integer data; the set is unchanged.
    pub fn normalized_rows(&self) -> Vec<(RationalVector, Rational)> {
        self.rows
            .iter()
            .map(|(a, b)| normalize_halfspace(a, b))
            .collect()
    }

    /// Closed membership. Panics on dimension mismatch.
    pub fn contains(&self, x: &[Rational]) -> bool {
        assert_eq!(x.len(), self.dim, "contains: dimension mismatch");
        self.rows.iter().all(|(a, b)| dot(a, x) <= *b)
    }

    /// Strict membership in every row (interior when full-dimensional).
    pub fn contains_strict(&self, x: &[Rational]) -> bool {
        assert_eq!(x.len(), self.dim, "contains_strict: dimension mismatch");
        self.rows.iter().all(|(a, b)| dot(a, x) < *b)
    }

    /// Emptiness via an LP feasibility solve.
    pub fn is_empty(&self) -> bool {
        let mut lp = LinearProgram::new(self.dim);
        for (a, b) in &self.rows {
            lp.constraint(a.clone(), Relation::Le, b.clone());
        }
        lp.solve().status == LpStatus::Infeasible
    }

    /// Strict interior point, when one exists.
    pub fn interior_point(&self) -> Option<RationalVector> {
        lp::interior_point(self)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.interior_point().is_some()
    }

    /// Exact range of `d·x` over the polyhedron intersected with `[-r, r]ⁿ`
    /// (the box keeps both ends finite). `None` when that intersection is
    /// empty.
    pub fn direction_bounds_in_box(
        &self,
        d: &[Rational],
        r: &Rational,
    ) -> Option<(Rational, Rational)> {
        let boxed = self.intersect(&Self::cube(self.dim, r));
        let mut lo_lp = LinearProgram::new(self.dim);
        let mut hi_lp = LinearProgram::new(self.dim);
        for (a, b) in boxed.rows() {
            lo_lp.constraint(a.clone(), Relation::Le, b.clone());
            hi_lp.constraint(a.clone(), Relation::Le, b.clone());
        }
        lo_lp.minimize(d.to_vec());
        hi_lp.maximize(d.to_vec());
        let lo = lo_lp.solve();
        if lo.status != LpStatus::Optimal {
            return None;
        }
        let hi = hi_lp.solve();
        Some((lo.value.unwrap(), hi.value.unwrap()))
    }

    /// Coordinate-wise bounding box via `2n` LPs; `None` on any unbounded
    /// direction or when the polyhedron is empty.
    pub fn bounding_box(&self) -> Option<Vec<(Rational, Rational)>> {
        let mut out = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut e = linalg::zeros(self.dim);
            e[i] = rat(1);
            let mut lo_lp = LinearProgram::new(self.dim);
            let mut hi_lp = LinearProgram::new(self.dim);
            for (a, b) in &self.rows {
                lo_lp.constraint(a.clone(), Relation::Le, b.clone());
                hi_lp.constraint(a.clone(), Relation::Le, b.clone());
            }
            lo_lp.minimize(e.clone());
            hi_lp.maximize(e);
            let lo = lo_lp.solve();
            let hi = hi_lp.solve();
            if lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal {
                return None;
            }
            out.push((lo.value.unwrap(), hi.value.unwrap()));
        }
        Some(out)
    }

    /// Rational upper bound on `sup {‖x‖₂ : x in the polyhedron}`, or `None`
    /// when unbounded. Derived from the bounding box.
    pub fn circumradius_bound(&self) -> Option<Rational> {
        let bb = self.bounding_box()?;
        let sq: Rational = bb
            .iter()
            .map(|(lo, hi)| {
                let m = lo.abs().max(hi.abs());
                &m * &m
            })
            .sum();
        Some(linalg::sqrt_upper_bound(&sq, &linalg::ratio(1, 1 << 20)))
    }

    /// All vertices, by solving every independent `n`-subset of rows and
    /// keeping feasible solutions. Intended for small row counts.
    pub fn vertices(&self) -> Vec<RationalVector> {
        let n = self.dim;
        let m = self.rows.len();
        let mut out: Vec<RationalVector> = Vec::new();
        if n == 0 || m < n {
            return out;
        }
        for subset in subsets_of_size(m, n) {
            let mat = RationalMatrix::from_rows(
                subset.iter().map(|&i| self.rows[i].0.clone()).collect(),
            );
            let rhs: RationalVector = subset.iter().map(|&i| self.rows[i].1.clone()).collect();
            let sol = solve_linear(&mat, &rhs);
            if sol.rank < n {
                continue;
            }
            let x = sol.solution.expect("full-rank square system is consistent");
            if self.contains(&x) && !out.contains(&x) {
                out.push(x);
            }
        }
        out.sort();
        out
    }

    /// Exact minimum of `q(x) = xᵀQx + b·x + c` over the polyhedron.
    ///
    /// `Q` must be positive semidefinite (guaranteed by callers; the convex
    /// set model rejects indefinite quadratics at construction). Returns the
    /// minimum value and a minimizer, or `None` when the polyhedron is empty
    /// or the quadratic is unbounded below over it. When `cutoff` is given,
    /// the scan may return early with any feasible value strictly below it.
    pub fn minimize_quadratic(
        &self,
        q: &RationalMatrix,
        b: &[Rational],
        c: &Rational,
        cutoff: Option<&Rational>,
    ) -> Option<(Rational, RationalVector)> {
        let n = self.dim;
        assert_eq!(q.rows(), n, "minimize_quadratic: dimension mismatch");
        assert_eq!(b.len(), n, "minimize_quadratic: dimension mismatch");

        let eval = |x: &[Rational]| -> Rational {
            let qx = q.mul_vec(x);
            dot(x, &qx) + dot(b, x) + c.clone()
        };

        let mut best: Option<(Rational, RationalVector)> = None;
        let m = self.rows.len();
        for size in 0..=n.min(m) {
            for subset in subsets_of_size(m, size) {
                if let Some(x) = self.kkt_point(q, b, &subset) {
                    let v = eval(&x);
                    if best.as_ref().map_or(true, |(bv, _)| v < *bv) {
                        best = Some((v.clone(), x));
                        if let Some(cut) = cutoff {
                            if &v < cut {
                                return best;
                            }
                        }
                    }
                }
            }
            // A feasible unconstrained minimum is globally optimal.
            if size == 0 && best.is_some() {
                return best;
            }
        }
        best
    }

    /// Feasible critical point of `q` on `{x : A_S x = b_S}`, if any.
    ///
    /// Solves the stationarity system `2Qx - A_Sᵀλ = -b, A_S x = b_S`. All
    /// its solutions share one objective value, so when the particular
    /// solution is infeasible we look for a feasible one in the solution
    /// space by LP before giving up.
    fn kkt_point(
        &self,
        q: &RationalMatrix,
        b: &[Rational],
        subset: &[usize],
    ) -> Option<RationalVector> {
        let n = self.dim;
        let k = subset.len();
        let mut rows: Vec<RationalVector> = Vec::with_capacity(n + k);
        let mut rhs: RationalVector = Vec::with_capacity(n + k);
        // 2Q x - A_Sᵀ λ = -b
        for i in 0..n {
            let mut row = linalg::zeros(n + k);
            for j in 0..n {
                row[j] = q.get(i, j) * rat(2);
            }
            for (col, &s) in subset.iter().enumerate() {
                row[n + col] = -self.rows[s].0[i].clone();
            }
            rows.push(row);
            rhs.push(-b[i].clone());
        }
        // A_S x = b_S
        for &s in subset {
            let mut row = linalg::zeros(n + k);
            row[..n].clone_from_slice(&self.rows[s].0);
            rows.push(row);
            rhs.push(self.rows[s].1.clone());
        }
        let mat = RationalMatrix::from_rows(rows);
        let sol = solve_linear(&mat, &rhs).solution?;
        let x: RationalVector = sol[..n].to_vec();
        if self.contains(&x) {
            return Some(x);
        }
        // Singular system: search x + span(nullspace directions) for a
        // feasible representative.
        let null = nullspace(&mat);
        if null.is_empty() {
            return None;
        }
        let dirs: Vec<RationalVector> = null.iter().map(|v| v[..n].to_vec()).collect();
        let mut lp = LinearProgram::new(dirs.len());
        for (a, bb) in &self.rows {
            let coeffs: RationalVector = dirs.iter().map(|d| dot(a, d)).collect();
            let slack = bb - dot(a, &x);
            lp.constraint(coeffs, Relation::Le, slack);
        }
        let res = lp.solve();
        if res.status != LpStatus::Optimal {
            return None;
        }
        let mu = res.point.unwrap();
        let mut y = x;
        for (d, m) in dirs.iter().zip(&mu) {
            y = linalg::add_scaled(&y, m, d);
        }
        debug_assert!(self.contains(&y));
        Some(y)
    }
}

/// All `size`-subsets of `0..m` in lexicographic order.
pub(crate) fn subsets_of_size(m: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > m {
        return out;
    }
    if size == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut cur: Vec<usize> = (0..size).collect();
    loop {
        out.push(cur.clone());
        // Rightmost index that can still advance.
        let mut i = size;
        while i > 0 && cur[i - 1] == m - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..size {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
