//! Hyperplane arrangements and their maximal cells.
//!
//! An [`Arrangement`] holds a deduplicated list of rational hyperplanes
//! `aᵀx = b`, each stored in canonical form (primitive integer normal with
//! positive leading coefficient) so that two inputs describe the same plane
//! exactly when their canonical forms are equal.
//!
//! # Cell enumeration
//!
//! [`Arrangement::maximal_cells`] returns the full-dimensional cells of the
//! arrangement restricted to a domain polyhedron. It works incrementally:
//! starting from the domain as a single cell, each hyperplane splits every
//! current cell into its `aᵀx ≤ b` and `aᵀx ≥ b` halves, keeping the halves
//! that still have nonempty interior (certified by an exact interior-point
//! linear program). The parent's interior point is reused for the side it
//! strictly lies on, so each split costs at most one additional LP per cell.
//!
//! The number of maximal cells of `d` hyperplanes in dimension `n` is at
//! most `Σ_{k≤n} C(d,k)`; a hard cap guards against accidental blow-ups.
//!
//! Each [`Cell`] carries its sign vector (one entry per hyperplane, `−1` or
//! `+1`), its closed polyhedron (domain rows plus one halfspace per
//! hyperplane), and a rational interior point.

use num_traits::Zero;

use crate::linalg::{dot, normalize_hyperplane, Rational, RationalVector};
use crate::polyhedron::HPolyhedron;
use crate::{Error, Result};

/// Hard cap on enumerated cells, applied while splitting.
const MAX_CELLS: usize = 100_000;

/// A deduplicated list of canonical hyperplanes in fixed dimension.
#[derive(Debug, Clone)]
pub struct Arrangement {
    dim: usize,
    planes: Vec<(RationalVector, Rational)>,
}

/// A maximal (full-dimensional) cell of an arrangement within a domain.
#[derive(Debug, Clone)]
pub struct Cell {
    /// One sign per hyperplane, in arrangement order: `+1` where the cell
    /// interior satisfies `aᵀx > b`, `−1` where it satisfies `aᵀx < b`.
    pub signs: Vec<i8>,
    /// The closed cell: domain rows plus one halfspace per hyperplane.
    pub closure: HPolyhedron,
    /// A rational point strictly inside the cell.
    pub interior_point: RationalVector,
}

impl Arrangement {
    /// Empty arrangement in the given dimension.
    pub fn new(dim: usize) -> Self {
        Arrangement {
            dim,
            planes: Vec::new(),
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical hyperplanes added so far.
    pub fn planes(&self) -> &[(RationalVector, Rational)] {
        &self.planes
    }

    /// Adds the hyperplane `aᵀx = b`. Returns `true` if it is new, `false`
    /// if an equal plane (up to nonzero scaling) is already present. Zero
    /// normals are rejected.
    pub fn add(&mut self, a: &[Rational], b: &Rational) -> Result<bool> {
        if a.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: a.len(),
            });
        }
        if a.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidInput(
                "hyperplane normal must be nonzero".into(),
            ));
        }
        let canon = normalize_hyperplane(a, b);
        if self.planes.contains(&canon) {
            return Ok(false);
        }
        self.planes.push(canon);
        Ok(true)
    }

    /// Sign vector of a point: per plane, the sign of `aᵀx − b` as
    /// `−1`/`0`/`+1`.
    pub fn locate(&self, x: &[Rational]) -> Vec<i8> {
        self.planes
            .iter()
            .map(|(a, b)| {
                let v = dot(a, x);
                if v < *b {
                    -1
                } else if v > *b {
                    1
                } else {
                    0
                }
            })
            .collect()
    }

    /// Enumerates the maximal cells of the arrangement inside `domain`.
    ///
    /// Returns an empty list when the domain itself has no interior. Fails
    /// with [`Error::GuardExceeded`] if the cell count passes the hard cap.
    pub fn maximal_cells(&self, domain: &HPolyhedron) -> Result<Vec<Cell>> {
        assert_eq!(domain.dim(), self.dim, "maximal_cells: dimension mismatch");
        let Some(seed) = domain.interior_point() else {
            return Ok(Vec::new());
        };
        let mut cells = vec![Cell {
            signs: Vec::new(),
            closure: domain.clone(),
            interior_point: seed,
        }];
        for (a, b) in &self.planes {
            let mut split: Vec<Cell> = Vec::new();
            for cell in cells {
                let v = dot(a, &cell.interior_point);
                let mut minus = cell.closure.clone();
                minus.push_row(a.clone(), b.clone());
                let mut plus = cell.closure.clone();
                plus.push_row(a.iter().map(|ai| -ai).collect(), -b);
                let sides = [
                    (-1i8, minus, if v < *b { Some(cell.interior_point.clone()) } else { None }),
                    (1i8, plus, if v > *b { Some(cell.interior_point.clone()) } else { None }),
                ];
                for (sign, closure, known) in sides {
                    let ip = known.or_else(|| closure.interior_point());
                    if let Some(ip) = ip {
                        let mut signs = cell.signs.clone();
                        signs.push(sign);
                        split.push(Cell {
                            signs,
                            closure,
                            interior_point: ip,
                        });
                        if split.len() > MAX_CELLS {
                            return Err(Error::GuardExceeded(format!(
                                "arrangement produced more than {MAX_CELLS} cells"
                            )));
                        }
                    }
                }
            }
            cells = split;
        }
        Ok(cells)
    }
}
