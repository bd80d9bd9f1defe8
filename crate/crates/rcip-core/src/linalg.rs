//! Exact rational scalars, vectors, and matrices.
//!
//! Everything downstream works over `BigRational`, so this module pins the
//! shared aliases and the handful of exact kernels the geometry needs:
//! Gaussian elimination with rank reporting, a nullspace basis, an LDLᵀ
//! positive-semidefiniteness check with diagonal pivoting, and rational
//! enclosures for square roots (numbers like `r·‖a‖₂` are irrational, so we
//! compare their squares exactly and fall back to one-sided rational bounds
//! only where an enclosure is genuinely required).
//!
//! Dimension mismatches are programming errors, not data errors, and panic;
//! user-facing validation happens at the JSON boundary in `instance`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used across the crate.
pub type Rational = BigRational;

/// Dense rational vector; all public APIs fix the length to the ambient dimension.
pub type RationalVector = Vec<Rational>;

/// Rational from an integer literal.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator: {s:?}"))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator: {s:?}"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in rational: {s:?}"));
    }
    Ok(Rational::new(p, q))
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Exact inner product. Panics on length mismatch.
pub fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    assert_eq!(u.len(), v.len(), "dot: dimension mismatch");
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Exact squared Euclidean norm.
pub fn norm_sq(u: &[Rational]) -> Rational {
    u.iter().map(|a| a * a).sum()
}

/// `u - v` componentwise. Panics on length mismatch.
pub fn sub(u: &[Rational], v: &[Rational]) -> RationalVector {
    assert_eq!(u.len(), v.len(), "sub: dimension mismatch");
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

/// `u + t·v` componentwise. Panics on length mismatch.
pub fn add_scaled(u: &[Rational], t: &Rational, v: &[Rational]) -> RationalVector {
    assert_eq!(u.len(), v.len(), "add_scaled: dimension mismatch");
    u.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

/// Vector of zeros.
pub fn zeros(n: usize) -> RationalVector {
    vec![Rational::zero(); n]
}

/// Converts an integer point to a rational vector.
pub fn to_rational_vec(z: &[BigInt]) -> RationalVector {
    z.iter().map(|c| Rational::from_integer(c.clone())).collect()
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Outcome of an exact linear solve: the rank of the coefficient matrix and,
/// when the system is consistent, one solution (free variables set to zero).
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub rank: usize,
    pub solution: Option<RationalVector>,
}

impl RationalMatrix {
    /// Zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<RationalVector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in &rows {
            assert_eq!(row.len(), c, "from_rows: ragged rows");
        }
        RationalMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    /// Copies row `i` out as a vector.
    pub fn row(&self, i: usize) -> RationalVector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Matrix–vector product. Panics on dimension mismatch.
    pub fn mul_vec(&self, v: &[Rational]) -> RationalVector {
        assert_eq!(v.len(), self.cols, "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    pub fn transpose(&self) -> RationalMatrix {
        let mut t = RationalMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Rank via Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        solve_linear(self, &zeros(self.rows)).rank
    }

    /// Determinant of a square matrix by Gaussian elimination with exact
    /// rational pivots (product of pivots, sign-corrected for row swaps).
    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols, "determinant: matrix must be square");
        let n = self.rows;
        let mut a: Vec<RationalVector> = (0..n).map(|i| self.row(i)).collect();
        let mut det = rat(1);
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
                return rat(0);
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            det *= &a[col][col];
            for i in (col + 1)..n {
                if a[i][col].is_zero() {
                    continue;
                }
                let f = &a[i][col] / &a[col][col];
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                }
            }
        }
        det
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}

/// Solves `M x = b` exactly by Gauss–Jordan elimination.
///
/// Returns the rank of `M` and one solution if the system is consistent
/// (free variables are pinned to zero). Panics if `b` does not match the row
/// count.
pub fn solve_linear(m: &RationalMatrix, b: &[Rational]) -> LinearSolution {
    assert_eq!(b.len(), m.rows(), "solve_linear: dimension mismatch");
    let rows = m.rows();
    let cols = m.cols();
    // Augmented working copy.
    let mut a: Vec<RationalVector> = (0..rows)
        .map(|i| {
            let mut row = m.row(i);
            row.push(b[i].clone());
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..=cols {
                    let delta = &f * &a[r][j];
                    a[i][j] = &a[i][j] - delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }

    // Inconsistent iff a zero row maps to a nonzero rhs.
    for i in r..rows {
        if !a[i][cols].is_zero() {
            return LinearSolution {
                rank: r,
                solution: None,
            };
        }
    }
    let mut x = zeros(cols);
    for (k, &c) in pivot_cols.iter().enumerate() {
        x[c] = a[k][cols].clone();
    }
    LinearSolution {
        rank: r,
        solution: Some(x),
    }
}

/// Basis of the nullspace of `M` (one vector per free column).
pub fn nullspace(m: &RationalMatrix) -> Vec<RationalVector> {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<RationalVector> = (0..rows).map(|i| m.row(i)).collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = &*v / &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let delta = &f * &a[r][j];
                    a[i][j] = &a[i][j] - delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }

    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = zeros(cols);
        v[free] = Rational::one();
        for (k, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[k][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Exact positive-semidefiniteness test by LDLᵀ with diagonal pivoting.
///
/// At each step the largest remaining diagonal entry is chosen as pivot. A
/// negative pivot refutes PSD immediately; a zero maximal diagonal forces the
/// whole remaining block to be zero (a zero diagonal with a nonzero
/// off-diagonal entry yields an indefinite 2×2 minor). Panics if the input is
/// not symmetric.
pub fn is_psd(m: &RationalMatrix) -> bool {
    assert!(m.is_symmetric(), "is_psd: matrix must be symmetric");
    let n = m.rows();
    let mut a: Vec<RationalVector> = (0..n).map(|i| m.row(i)).collect();
    let mut alive: Vec<usize> = (0..n).collect();

    while !alive.is_empty() {
        let &k = alive
            .iter()
            .max_by(|&&i, &&j| a[i][i].cmp(&a[j][j]))
            .unwrap();
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            // Maximal diagonal is zero: PSD iff the remaining block vanishes.
            return alive
                .iter()
                .all(|&i| alive.iter().all(|&j| a[i][j].is_zero()));
        }
        alive.retain(|&i| i != k);
        for &i in &alive {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for &j in &alive {
                let delta = &f * &a[k][j];
                a[i][j] = &a[i][j] - delta;
            }
        }
    }
    true
}

/// Exact rational square root, if one exists.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(Rational::zero());
    }
    let p = x.numer();
    let q = x.denom();
    let sp = p.sqrt();
    let sq = q.sqrt();
    if &(&sp * &sp) == p && &(&sq * &sq) == q {
        Some(Rational::new(sp, sq))
    } else {
        None
    }
}

/// Rational `u ≥ √m` with `u − √m ≤ tol`, by Newton iteration from above.
///
/// Starts at `(m+1)/2 ≥ √m` and iterates `u ← (u + m/u)/2`, which stays above
/// the root; the stop test `u² − m ≤ tol·u` certifies the error bound. Exact
/// square inputs return the root itself. Panics if `m < 0` or `tol ≤ 0`.
pub fn sqrt_upper_bound(m: &Rational, tol: &Rational) -> Rational {
    assert!(!m.is_negative(), "sqrt_upper_bound: negative input");
    assert!(tol.is_positive(), "sqrt_upper_bound: tolerance must be positive");
    if let Some(s) = rational_sqrt(m) {
        return s;
    }
    let mut u = (m + Rational::one()) / rat(2);
    loop {
        let excess = &u * &u - m;
        if excess <= tol * &u {
            return u;
        }
        u = (&u + m / &u) / rat(2);
    }
}

/// Rational `l ≤ √m` with `√m − l ≤ tol` (zero when `m = 0`).
pub fn sqrt_lower_bound(m: &Rational, tol: &Rational) -> Rational {
    if m.is_zero() {
        return Rational::zero();
    }
    let u = sqrt_upper_bound(m, tol);
    // m/u ≤ √m, and √m − m/u = (u − √m)·√m/u ≤ u − √m ≤ tol.
    m / u
}

/// Scales `(a, b)` by a positive rational so `a` becomes a primitive integer
/// vector; the halfspace `a·x ≤ b` is unchanged. Panics if `a = 0`.
pub fn normalize_halfspace(a: &[Rational], b: &Rational) -> (RationalVector, Rational) {
    let scale = primitive_scale(a);
    (
        a.iter().map(|v| v * &scale).collect(),
        b * &scale,
    )
}

/// Canonical form of the hyperplane `a·x = b`: primitive integer `a` with the
/// first nonzero coefficient positive. Identifies `(a, b)` with `(λa, λb)`
/// for every nonzero rational `λ`. Panics if `a = 0`.
pub fn normalize_hyperplane(a: &[Rational], b: &Rational) -> (RationalVector, Rational) {
    let (mut na, mut nb) = normalize_halfspace(a, b);
    if let Some(first) = na.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            for v in na.iter_mut() {
                *v = -v.clone();
            }
            nb = -nb;
        }
    }
    (na, nb)
}

/// The positive factor that maps `a` onto a primitive integer vector.
fn primitive_scale(a: &[Rational]) -> Rational {
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for v in a {
        if v.is_zero() {
            continue;
        }
        den_lcm = den_lcm.lcm(v.denom());
        num_gcd = num_gcd.gcd(v.numer());
    }
    assert!(!num_gcd.is_zero(), "primitive_scale: zero vector");
    Rational::new(den_lcm, num_gcd)
}
