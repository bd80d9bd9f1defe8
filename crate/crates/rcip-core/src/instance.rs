//! The JSON instance model shared by the solver and the command-line
//! tools.
//!
//! An instance is a box radius `R`, a list of closed convex domains
//! `K₁ … K_l`, a list of removed convex sets `C₁ … C_m`, a removal
//! semantics (open interiors or closed sets), and an optional boundary
//! hyperplane cover.  The feasible set is
//!
//! ```text
//! S  =  (K₁ ∪ … ∪ K_l)  \  (C₁ ∪ … ∪ C_m)     intersected with [−R, R]ⁿ,
//! ```
//!
//! where each `Cᵢ` contributes its interior under open semantics and the
//! whole closed set under closed semantics, and a feasibility query asks
//! for an integer point of `S`.
//!
//! # JSON format
//!
//! Rationals are strings `"p/q"` (or `"p"`).  Convex sets are tagged
//! unions:
//!
//! ```json
//! {"type":"ball","center":["0","0"],"radius":"31/10"}
//! {"type":"quadratic","Q":[["1","0"],["0","5"]],"b":["0","0"],"c":"-2"}
//! {"type":"polyhedron","A":[["1","0"],["-1","0"]],"b":["2","2"]}
//! {"type":"intersection","members":[…]}
//! {"type":"union","members":[…],"certified":false}
//! ```
//!
//! and instances are
//!
//! ```json
//! {"name":"…","dim":2,"box":"8","domains":[…],"removed":[…],
//!  "semantics":"open",
//!  "cover":{"hyperplanes":[{"a":["1","0"],"b":"1/2"}],
//!           "pairs":[{"i":0,"j":1,"planes":[0],"ideal":true}]}}
//! ```
//!
//! # Oracle leniency versus solve-path validation
//!
//! Parsing only checks structure (dimensions, positive radii, index
//! ranges), so quadratic sets with indefinite matrices load fine: exact
//! membership needs no convexity, and the brute-force oracle
//! [`brute_force_verdict`] answers such instances correctly.  The solve
//! pipeline additionally requires convex removed sets and polyhedral
//! domains and refuses instances that fail [`Instance::removed_all_convex`]
//! or [`Instance::domains_polyhedral`].

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::bhc::BoundaryCover;
use crate::convex::ConvexSet;
use crate::int_feasibility::{brute_force_all, brute_force_first};
use crate::integer_hull::Guards;
use crate::linalg::{is_psd, Rational, RationalMatrix, RationalVector};
use crate::polyhedron::HPolyhedron;
use crate::{Error, Removal, Result};

/// A parsed feasibility instance.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Display name, defaulting to the empty string.
    pub name: String,
    /// Ambient dimension `n ≥ 1`.
    pub dim: usize,
    /// Box radius `R > 0`: all searches range over `[−R, R]ⁿ`.
    pub box_radius: Rational,
    /// The domains `K₁ … K_l`; the feasible region lives in their union.
    pub domains: Vec<ConvexSet>,
    /// The removed sets `C₁ … C_m`.
    pub removed: Vec<ConvexSet>,
    /// Whether removal deletes interiors or whole closed sets.
    pub removal: Removal,
    /// Optional boundary hyperplane cover for the removed family.
    pub cover: Option<BoundaryCover>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum SetDescJson {
    Ball {
        center: Vec<String>,
        radius: String,
    },
    Quadratic {
        #[serde(rename = "Q")]
        q: Vec<Vec<String>>,
        b: Vec<String>,
        c: String,
    },
    Polyhedron {
        #[serde(rename = "A")]
        a: Vec<Vec<String>>,
        b: Vec<String>,
    },
    Intersection {
        members: Vec<SetDescJson>,
    },
    Union {
        members: Vec<SetDescJson>,
        #[serde(default)]
        certified: bool,
    },
}

#[derive(Serialize, Deserialize)]
struct PlaneJson {
    a: Vec<String>,
    b: String,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    i: usize,
    j: usize,
    #[serde(default)]
    planes: Vec<usize>,
    #[serde(default)]
    ideal: bool,
}

#[derive(Serialize, Deserialize)]
struct CoverJson {
    hyperplanes: Vec<PlaneJson>,
    #[serde(default)]
    pairs: Vec<PairJson>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    #[serde(default)]
    name: String,
    dim: usize,
    #[serde(rename = "box")]
    box_radius: String,
    #[serde(default)]
    domains: Vec<SetDescJson>,
    #[serde(default)]
    removed: Vec<SetDescJson>,
    #[serde(default = "open_semantics")]
    semantics: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cover: Option<CoverJson>,
}

fn open_semantics() -> String {
    "open".into()
}

fn parse_rat(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Json(format!("bad rational {s:?}: {e}")))
}

fn parse_vec(v: &[String]) -> Result<RationalVector> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn rat_string(r: &Rational) -> String {
    r.to_string()
}

fn vec_strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rat_string).collect()
}

fn set_from_json(desc: &SetDescJson, dim: usize) -> Result<ConvexSet> {
    match desc {
        SetDescJson::Ball { center, radius } => {
            let c = parse_vec(center)?;
            if c.len() != dim {
                return Err(Error::Json(format!(
                    "ball center has {} coordinates, instance dimension is {dim}",
                    c.len()
                )));
            }
            let r = parse_rat(radius)?;
            if r.is_negative() {
                return Err(Error::Json("ball radius must be nonnegative".into()));
            }
            Ok(ConvexSet::ball(c, r))
        }
        SetDescJson::Quadratic { q, b, c } => {
            if q.len() != dim || q.iter().any(|row| row.len() != dim) {
                return Err(Error::Json(format!(
                    "quadratic matrix must be {dim}×{dim}"
                )));
            }
            let mut rows = Vec::with_capacity(dim);
            for row in q {
                rows.push(parse_vec(row)?);
            }
            let lin = parse_vec(b)?;
            if lin.len() != dim {
                return Err(Error::Json(format!(
                    "quadratic linear part has {} coordinates, expected {dim}",
                    lin.len()
                )));
            }
            Ok(ConvexSet::quadratic(
                RationalMatrix::from_rows(rows),
                lin,
                parse_rat(c)?,
            ))
        }
        SetDescJson::Polyhedron { a, b } => {
            if a.len() != b.len() {
                return Err(Error::Json(format!(
                    "polyhedron has {} rows but {} right-hand sides",
                    a.len(),
                    b.len()
                )));
            }
            let mut rows = Vec::with_capacity(a.len());
            for (ai, bi) in a.iter().zip(b) {
                let av = parse_vec(ai)?;
                if av.len() != dim {
                    return Err(Error::Json(format!(
                        "polyhedron row has {} coordinates, expected {dim}",
                        av.len()
                    )));
                }
                rows.push((av, parse_rat(bi)?));
            }
            Ok(ConvexSet::polyhedron(HPolyhedron::with_dim(dim, rows)))
        }
        SetDescJson::Intersection { members } => {
            if members.is_empty() {
                return Err(Error::Json("intersection needs at least one member".into()));
            }
            let sets = members
                .iter()
                .map(|m| set_from_json(m, dim))
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvexSet::intersection(sets))
        }
        SetDescJson::Union { members, certified } => {
            if members.is_empty() {
                return Err(Error::Json("union needs at least one member".into()));
            }
            let sets = members
                .iter()
                .map(|m| set_from_json(m, dim))
                .collect::<Result<Vec<_>>>()?;
            Ok(ConvexSet::union_convex(sets, *certified))
        }
    }
}

fn set_to_json(set: &ConvexSet) -> SetDescJson {
    match set {
        ConvexSet::Ball { center, radius } => SetDescJson::Ball {
            center: vec_strings(center),
            radius: rat_string(radius),
        },
        ConvexSet::Quadratic { q, lin, c0 } => SetDescJson::Quadratic {
            q: (0..q.rows())
                .map(|i| (0..q.cols()).map(|j| rat_string(q.get(i, j))).collect())
                .collect(),
            b: vec_strings(lin),
            c: rat_string(c0),
        },
        ConvexSet::Polyhedron(p) => SetDescJson::Polyhedron {
            a: p.rows().iter().map(|(a, _)| vec_strings(a)).collect(),
            b: p.rows().iter().map(|(_, b)| rat_string(b)).collect(),
        },
        ConvexSet::Intersection(members) => SetDescJson::Intersection {
            members: members.iter().map(set_to_json).collect(),
        },
        ConvexSet::UnionConvex { members, certified } => SetDescJson::Union {
            members: members.iter().map(set_to_json).collect(),
            certified: *certified,
        },
    }
}

impl Instance {
    /// Parses an instance from JSON text and validates its structure.
    pub fn from_json(text: &str) -> Result<Instance> {
        let raw: InstanceJson =
            serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        if raw.dim == 0 {
            return Err(Error::Json("dimension must be at least 1".into()));
        }
        let box_radius = parse_rat(&raw.box_radius)?;
        if !box_radius.is_positive() {
            return Err(Error::Json("box radius must be positive".into()));
        }
        let removal = match raw.semantics.as_str() {
            "open" => Removal::Interior,
            "closed" => Removal::Closed,
            other => {
                return Err(Error::Json(format!(
                    "semantics must be \"open\" or \"closed\", got {other:?}"
                )))
            }
        };
        let domains = raw
            .domains
            .iter()
            .map(|d| set_from_json(d, raw.dim))
            .collect::<Result<Vec<_>>>()?;
        let removed = raw
            .removed
            .iter()
            .map(|d| set_from_json(d, raw.dim))
            .collect::<Result<Vec<_>>>()?;
        let cover = match &raw.cover {
            None => None,
            Some(cj) => {
                let mut cover = BoundaryCover::new(raw.dim);
                // add_hyperplane canonicalizes and deduplicates, so remap
                // the file's plane indices onto the stored ones.
                let mut index_map = Vec::with_capacity(cj.hyperplanes.len());
                for plane in &cj.hyperplanes {
                    let a = parse_vec(&plane.a)?;
                    if a.len() != raw.dim {
                        return Err(Error::Json(format!(
                            "cover hyperplane has {} coordinates, expected {}",
                            a.len(),
                            raw.dim
                        )));
                    }
                    if a.iter().all(num_traits::Zero::is_zero) {
                        return Err(Error::Json("cover hyperplane has zero normal".into()));
                    }
                    index_map.push(cover.add_hyperplane(&a, &parse_rat(&plane.b)?));
                }
                for pair in &cj.pairs {
                    if pair.i >= removed.len() || pair.j >= removed.len() {
                        return Err(Error::Json(format!(
                            "cover pair ({}, {}) is out of range for {} removed sets",
                            pair.i,
                            pair.j,
                            removed.len()
                        )));
                    }
                    let planes = pair
                        .planes
                        .iter()
                        .map(|&k| {
                            index_map.get(k).copied().ok_or_else(|| {
                                Error::Json(format!("cover pair references plane {k}"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    cover.add_pair(pair.i, pair.j, planes, pair.ideal);
                }
                Some(cover)
            }
        };
        Ok(Instance {
            name: raw.name,
            dim: raw.dim,
            box_radius,
            domains,
            removed,
            removal,
            cover,
        })
    }

    /// Serializes the instance back to pretty-printed JSON.
    pub fn to_json(&self) -> String {
        let raw = InstanceJson {
            name: self.name.clone(),
            dim: self.dim,
            box_radius: rat_string(&self.box_radius),
            domains: self.domains.iter().map(set_to_json).collect(),
            removed: self.removed.iter().map(set_to_json).collect(),
            semantics: match self.removal {
                Removal::Interior => "open".into(),
                Removal::Closed => "closed".into(),
            },
            cover: self.cover.as_ref().map(|c| CoverJson {
                hyperplanes: c
                    .hyperplanes
                    .iter()
                    .map(|(a, b)| PlaneJson {
                        a: vec_strings(a),
                        b: rat_string(b),
                    })
                    .collect(),
                pairs: c
                    .pairs
                    .iter()
                    .map(|p| PairJson {
                        i: p.i,
                        j: p.j,
                        planes: p.planes.clone(),
                        ideal: p.ideal,
                    })
                    .collect(),
            }),
        };
        serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
    }

    /// The box `[−R, R]` per coordinate.
    pub fn bounds(&self) -> Vec<(Rational, Rational)> {
        (0..self.dim)
            .map(|_| (-self.box_radius.clone(), self.box_radius.clone()))
            .collect()
    }

    /// Exact instance membership of a rational point: inside the box, in
    /// some domain, and not removed under the instance semantics.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        if x.iter().any(|c| c.abs() > self.box_radius) {
            return false;
        }
        if !self.domains.iter().any(|k| k.contains(x)) {
            return false;
        }
        !self.removed.iter().any(|c| match self.removal {
            Removal::Interior => c.contains_strict(x),
            Removal::Closed => c.contains(x),
        })
    }

    /// [`Instance::is_feasible_point`] on an integer point.
    pub fn is_feasible_integer_point(&self, x: &[BigInt]) -> bool {
        let xr: RationalVector = x.iter().map(|z| Rational::from_integer(z.clone())).collect();
        self.is_feasible_point(&xr)
    }

    /// Whether every removed set is convex: balls and polyhedra always,
    /// quadratics when the matrix is positive semidefinite, intersections
    /// when all members are, unions only when certified.
    pub fn removed_all_convex(&self) -> bool {
        fn convex(set: &ConvexSet) -> bool {
            match set {
                ConvexSet::Ball { .. } | ConvexSet::Polyhedron(_) => true,
                ConvexSet::Quadratic { q, .. } => is_psd(q),
                ConvexSet::Intersection(members) => members.iter().all(convex),
                ConvexSet::UnionConvex { certified, .. } => *certified,
            }
        }
        self.removed.iter().all(convex)
    }

    /// Whether every domain is an H-polyhedron, as the decomposition
    /// pipeline requires.
    pub fn domains_polyhedral(&self) -> bool {
        self.domains
            .iter()
            .all(|k| matches!(k, ConvexSet::Polyhedron(_)))
    }

    /// Structural validation beyond parsing: dimensions of every set match
    /// the instance dimension.
    pub fn validate(&self) -> Result<()> {
        fn check_dims(set: &ConvexSet, dim: usize) -> Result<()> {
            if set.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: set.dim(),
                });
            }
            match set {
                ConvexSet::Intersection(members)
                | ConvexSet::UnionConvex { members, .. } => {
                    members.iter().try_for_each(|m| check_dims(m, dim))
                }
                _ => Ok(()),
            }
        }
        for set in self.domains.iter().chain(&self.removed) {
            check_dims(set, self.dim)?;
        }
        if let Some(cover) = &self.cover {
            if cover.dim != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: cover.dim,
                });
            }
        }
        Ok(())
    }
}

/// The brute-force reference verdict: the lexicographically smallest
/// integer point of the feasible set, by scanning every lattice point of
/// the box with exact membership and no pruning.
pub fn brute_force_verdict(
    instance: &Instance,
    guards: &Guards,
) -> Result<Option<Vec<BigInt>>> {
    brute_force_first(
        &instance.domains,
        &instance.bounds(),
        &instance.removed,
        instance.removal,
        guards,
    )
}

/// Every feasible integer point of the instance, in lexicographic order
/// (up to `limit` points).
pub fn brute_force_witnesses(
    instance: &Instance,
    guards: &Guards,
    limit: usize,
) -> Result<Vec<Vec<BigInt>>> {
    brute_force_all(
        &instance.domains,
        &instance.bounds(),
        &instance.removed,
        instance.removal,
        guards,
        limit,
    )
}
