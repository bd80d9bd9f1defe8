//! Seeded random instance generation for testing and the CLI.
//!
//! [`random_corpus`] produces a deterministic stream of small instances —
//! polyhedral domains inside a box of radius at most eight, up to three
//! removed balls or H-polyhedra, open removal semantics — sized so that
//! both [`crate::solver::solve`] and the brute-force oracle answer each
//! one quickly.  The same seed always yields the same corpus, so
//! regression runs and the command line's `--seed` option are
//! reproducible.
//!
//! Generated members use half-integer data: ball centers and radii on the
//! grid `ℤ/2`, facet normals with entries in `{−2, …, 2}`.  Duplicate
//! balls within one instance are rejected and redrawn (identical balls
//! have no radical hyperplane, so the cover construction refuses them).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convex::ConvexSet;
use crate::instance::Instance;
use crate::linalg::{rat, ratio, Rational};
use crate::polyhedron::HPolyhedron;
use crate::Removal;

/// Shape bounds for generated instances.
#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Inclusive dimension range.
    pub dims: (usize, usize),
    /// Largest box radius (radii are drawn from `2..=max_box_radius`).
    pub max_box_radius: i64,
    /// Largest removed-family size (sizes are drawn from `0..=max_removed`).
    pub max_removed: usize,
    /// Allow H-polyhedra among the removed sets (otherwise balls only).
    pub polyhedra: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            dims: (2, 3),
            max_box_radius: 8,
            max_removed: 3,
            polyhedra: true,
        }
    }
}

fn random_row(rng: &mut ChaCha8Rng, dim: usize, radius: i64) -> (Vec<Rational>, Rational) {
    loop {
        let a: Vec<Rational> = (0..dim).map(|_| rat(rng.gen_range(-2..=2))).collect();
        if a.iter().any(|c| !num_traits::Zero::is_zero(c)) {
            let b = ratio(rng.gen_range(-2 * radius..=2 * radius), 2);
            return (a, b);
        }
    }
}

fn random_ball(rng: &mut ChaCha8Rng, dim: usize, radius: i64) -> ConvexSet {
    let span = 2 * (radius - 1).max(1);
    let center: Vec<Rational> = (0..dim)
        .map(|_| ratio(rng.gen_range(-span..=span), 2))
        .collect();
    let r = ratio(rng.gen_range(2..=2 * radius), 2);
    ConvexSet::ball(center, r)
}

fn random_polyhedron(rng: &mut ChaCha8Rng, dim: usize, radius: i64) -> ConvexSet {
    let rows = (0..rng.gen_range(1..=3))
        .map(|_| random_row(rng, dim, radius))
        .collect();
    ConvexSet::polyhedron(HPolyhedron::new(rows))
}

/// Draws one instance from the stream.  Domains are the full box or the
/// box cut by one or two random halfspaces (possibly empty, so infeasible
/// instances occur); removed sets are balls and, when enabled,
/// H-polyhedra, with duplicate balls redrawn.
pub fn random_instance(rng: &mut ChaCha8Rng, name: String, opts: &GenOptions) -> Instance {
    let dim = rng.gen_range(opts.dims.0..=opts.dims.1);
    let radius = rng.gen_range(2..=opts.max_box_radius);

    let mut removed: Vec<ConvexSet> = Vec::new();
    for _ in 0..rng.gen_range(0..=opts.max_removed) {
        let member = loop {
            let candidate = if opts.polyhedra && rng.gen_range(0..3) == 0 {
                random_polyhedron(rng, dim, radius)
            } else {
                random_ball(rng, dim, radius)
            };
            let duplicate = removed.iter().any(|m| {
                match (crate::bhc::as_ball(m), crate::bhc::as_ball(&candidate)) {
                    (Some(b1), Some(b2)) => b1.center == b2.center && b1.radius_sq == b2.radius_sq,
                    _ => false,
                }
            });
            if !duplicate {
                break candidate;
            }
        };
        removed.push(member);
    }

    let cube = HPolyhedron::cube(dim, &rat(radius));
    let domains = (0..rng.gen_range(1..=2))
        .map(|_| {
            let mut rows = cube.rows().to_vec();
            for _ in 0..rng.gen_range(0..=2) {
                rows.push(random_row(rng, dim, radius));
            }
            ConvexSet::polyhedron(HPolyhedron::new(rows))
        })
        .collect();

    Instance {
        name,
        dim,
        box_radius: rat(radius),
        domains,
        removed,
        removal: Removal::Interior,
        cover: None,
    }
}

/// The deterministic corpus for a seed: `count` instances named
/// `gen-<seed>-<index>`.
pub fn random_corpus(seed: u64, count: usize, opts: &GenOptions) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| random_instance(&mut rng, format!("gen-{seed}-{i}"), opts))
        .collect()
}
