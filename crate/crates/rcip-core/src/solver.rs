//! The end-to-end feasibility pipeline and verdict model.
//!
//! [`solve`] answers an [`Instance`]'s feasibility query — is there an
//! integer point in some domain, inside the box, outside the removed sets —
//! and produces a [`Verdict`] with a witness, a per-piece trace, and
//! counters.
//!
//! # Dispatch
//!
//! * no removed sets — one lattice search per domain;
//! * all removed sets polyhedral — [`decompose_removing_polyhedra`] splits
//!   the box into cells that are entirely kept or entirely removed, and
//!   each kept cell is searched intersected with each domain (any convex
//!   domain class, both removal semantics);
//! * exactly one curved removed set — the integer-hull vertex oracle
//!   [`reverse_convex_feasible`] on each polyhedral domain (both
//!   semantics);
//! * several removed sets, at least one curved — the full pipeline: a
//!   boundary hyperplane cover (supplied, or derived for families of balls
//!   and polyhedra: radical planes for ball pairs, facet planes for
//!   polyhedral members), [`decompose_bhc_integer`], [`to_subdivision`]
//!   per domain, and [`solve_subdivision`].  This path requires polyhedral
//!   domains and open removal semantics.
//!
//! Instances outside these shapes — non-convex removed sets, curved
//! domains next to curved removals, families with no cover — are refused
//! with [`Error::Refusal`] rather than answered approximately.
//!
//! # Witness discipline
//!
//! Every witness from a piece-level oracle is re-verified against raw
//! instance membership before it is accepted.  A failed re-verification
//! (possible when a weakly separated neighbour component reaches a piece
//! boundary) demotes the piece to an exhaustive lattice scan filtered by
//! instance membership, so emitted witnesses are always exact and
//! infeasibility claims always rest on either a convexity-certified vertex
//! argument or an exhaustive scan.  Pieces whose removed union is not
//! certified convex are scanned directly.
//!
//! The default mode returns the first witness in canonical piece order;
//! `canonical` forces the globally lexicographically smallest feasible
//! point by replacing each piece oracle with the piece's lattice minimum.
//! `verify` cross-checks the final status (and, under `canonical`, the
//! witness) against the brute-force oracle and fails loudly on mismatch.

use std::time::Instant;

use num_bigint::BigInt;
use serde::Serialize;

use crate::bhc::{classify_spheres, cover_for_balls, BallData, BoundaryCover, SphereRelation};
use crate::convex::ConvexSet;
use crate::decompose::{
    decompose_bhc_integer, decompose_removing_polyhedra, to_subdivision, Subdivision,
};
use crate::instance::{brute_force_verdict, Instance};
use crate::int_feasibility::convex_int_feasible;
use crate::integer_hull::{lattice_points, reverse_convex_feasible, Guards};
use crate::polyhedron::HPolyhedron;
use crate::{Error, Removal, Result};

/// Knobs for [`solve`]; `Default` is non-canonical, non-verifying, with
/// environment-derived guards.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Return the globally lexicographically smallest witness.
    pub canonical: bool,
    /// Cross-check the verdict against the brute-force oracle.
    pub verify: bool,
    /// Enumeration guards.
    pub guards: Guards,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            canonical: false,
            verify: false,
            guards: Guards::from_env(),
        }
    }
}

/// Feasibility status with an exact integer witness when feasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Feasible(Vec<BigInt>),
    Infeasible,
}

/// Work counters for a solve run.
#[derive(Debug, Clone, Default)]
pub struct Stats {
    /// Arrangement cells enumerated (kept cells on the polyhedral path).
    pub cells: usize,
    /// Pieces examined across all domains.
    pub pieces: usize,
    /// Piece-level oracle and scan invocations.
    pub oracle_calls: usize,
    /// Wall-clock time in milliseconds.
    pub wall_ms: u128,
}

/// The solver's answer: status, per-piece trace, and counters.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub trace: Vec<String>,
    pub stats: Stats,
}

#[derive(Serialize)]
struct StatsJson {
    cells: usize,
    pieces: usize,
    oracle_calls: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u128>,
}

#[derive(Serialize)]
struct VerdictJson<'a> {
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<i64>>,
    trace: &'a [String],
    stats: StatsJson,
}

impl Verdict {
    fn json_value(&self, with_timing: bool) -> String {
        let witness = match &self.status {
            Status::Feasible(w) => Some(
                w.iter()
                    .map(|z| i64::try_from(z).expect("witness exceeds i64 despite box guard"))
                    .collect(),
            ),
            Status::Infeasible => None,
        };
        let raw = VerdictJson {
            status: match &self.status {
                Status::Feasible(_) => "feasible",
                Status::Infeasible => "infeasible",
            },
            witness,
            trace: &self.trace,
            stats: StatsJson {
                cells: self.stats.cells,
                pieces: self.stats.pieces,
                oracle_calls: self.stats.oracle_calls,
                wall_ms: with_timing.then_some(self.stats.wall_ms),
            },
        };
        serde_json::to_string_pretty(&raw).expect("verdict serialization cannot fail")
    }

    /// Verdict as JSON, including the timing field.
    pub fn to_json(&self) -> String {
        self.json_value(true)
    }

    /// Verdict as JSON without timing: byte-identical across repeat runs
    /// on the same instance.
    pub fn to_json_stable(&self) -> String {
        self.json_value(false)
    }
}

/// Accumulates trace lines, counters, and the best witness seen so far.
struct Search<'a> {
    instance: &'a Instance,
    opts: &'a SolveOptions,
    trace: Vec<String>,
    pieces: usize,
    oracle_calls: usize,
    best: Option<Vec<BigInt>>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, opts: &'a SolveOptions) -> Self {
        Search {
            instance,
            opts,
            trace: Vec::new(),
            pieces: 0,
            oracle_calls: 0,
            best: None,
        }
    }

    /// Records a candidate witness; returns `true` when the search can
    /// stop (non-canonical mode stops at the first verified witness).
    fn offer(&mut self, label: &str, witness: Vec<BigInt>) -> bool {
        self.trace.push(format!("{label}: witness {witness:?}"));
        match &self.best {
            Some(b) if *b <= witness => {}
            _ => self.best = Some(witness),
        }
        !self.opts.canonical
    }

    fn miss(&mut self, label: &str) {
        self.trace.push(format!("{label}: infeasible"));
    }

    /// Exhaustive lattice scan of a polytope filtered by exact instance
    /// membership; the exact fallback and the canonical per-piece oracle.
    fn scan_piece(&mut self, p: &HPolyhedron, label: &str) -> Result<bool> {
        self.oracle_calls += 1;
        for point in lattice_points(p, &self.opts.guards)? {
            if self.instance.is_feasible_integer_point(&point) {
                return Ok(self.offer(label, point));
            }
        }
        self.miss(label);
        Ok(false)
    }

    /// Searches one convex set for its lexicographically smallest lattice
    /// point and re-verifies it against the instance.
    fn convex_piece(&mut self, set: &ConvexSet, label: &str) -> Result<bool> {
        self.pieces += 1;
        self.oracle_calls += 1;
        match convex_int_feasible(set, &self.instance.bounds(), &self.opts.guards)? {
            Some(w) if self.instance.is_feasible_integer_point(&w) => Ok(self.offer(label, w)),
            Some(_) => {
                // The piece's own minimum is removed at a piece boundary;
                // only an instance-filtered scan of the piece is exact.
                match set {
                    ConvexSet::Polyhedron(p) => {
                        let p = p.clone();
                        self.scan_piece(&p, label)
                    }
                    _ => {
                        self.miss(label);
                        Ok(false)
                    }
                }
            }
            None => {
                self.miss(label);
                Ok(false)
            }
        }
    }

    /// Vertex-oracle search of a polytope against removed sets, with
    /// re-verification and scan fallback.
    fn concave_piece(
        &mut self,
        p: &HPolyhedron,
        removed: &[ConvexSet],
        label: &str,
    ) -> Result<bool> {
        self.pieces += 1;
        if self.opts.canonical {
            return self.scan_piece(p, label);
        }
        self.oracle_calls += 1;
        match reverse_convex_feasible(p, removed, self.instance.removal, &self.opts.guards)? {
            Some(w) if self.instance.is_feasible_integer_point(&w) => Ok(self.offer(label, w)),
            Some(_) => self.scan_piece(p, label),
            None => {
                self.miss(label);
                Ok(false)
            }
        }
    }

    fn finish(self, cells: usize, started: Instant) -> Verdict {
        Verdict {
            status: match self.best {
                Some(w) => Status::Feasible(w),
                None => Status::Infeasible,
            },
            trace: self.trace,
            stats: Stats {
                cells,
                pieces: self.pieces,
                oracle_calls: self.oracle_calls,
                wall_ms: started.elapsed().as_millis(),
            },
        }
    }
}

fn domain_polytope(set: &ConvexSet) -> Option<&HPolyhedron> {
    match set {
        ConvexSet::Polyhedron(p) => Some(p),
        _ => None,
    }
}

/// Intersects a piece polyhedron with a domain polytope by row
/// concatenation.
fn restrict_rows(piece: &HPolyhedron, domain: &HPolyhedron) -> HPolyhedron {
    let mut rows = piece.rows().to_vec();
    rows.extend_from_slice(domain.rows());
    HPolyhedron::new(rows)
}

/// Derives a boundary hyperplane cover for a family of balls (including
/// disguised ball quadratics) and H-polyhedra: radical hyperplanes for
/// ball pairs and facet hyperplanes for polyhedral members.  Returns
/// `None` when some member is neither.
pub fn derive_cover(members: &[ConvexSet], dim: usize) -> Result<Option<BoundaryCover>> {
    enum Kind {
        Ball(BallData),
        Poly(Vec<usize>),
    }
    let mut balls: Vec<Option<BallData>> = Vec::with_capacity(members.len());
    for m in members {
        balls.push(crate::bhc::as_ball(m));
    }
    if balls.iter().all(|b| b.is_some()) {
        let data: Vec<BallData> = balls.into_iter().map(|b| b.unwrap()).collect();
        return cover_for_balls(&data).map(Some);
    }
    let mut cover = BoundaryCover::new(dim);
    let mut kinds: Vec<Kind> = Vec::with_capacity(members.len());
    for (m, ball) in members.iter().zip(balls) {
        match (ball, m) {
            (Some(b), _) => kinds.push(Kind::Ball(b)),
            (None, ConvexSet::Polyhedron(p)) => {
                let mut facets = Vec::new();
                for (a, b) in p.rows() {
                    if a.iter().any(|c| !num_traits::Zero::is_zero(c)) {
                        facets.push(cover.add_hyperplane(a, b));
                    }
                }
                kinds.push(Kind::Poly(facets));
            }
            _ => return Ok(None),
        }
    }
    for i in 0..kinds.len() {
        for j in i + 1..kinds.len() {
            match (&kinds[i], &kinds[j]) {
                (Kind::Ball(b1), Kind::Ball(b2)) => match classify_spheres(b1, b2) {
                    SphereRelation::Equal => {
                        return Err(Error::InvalidInput(format!(
                            "removed sets {i} and {j} are identical balls"
                        )))
                    }
                    SphereRelation::Disjoint | SphereRelation::Contained => {
                        cover.add_pair(i, j, Vec::new(), true);
                    }
                    rel => {
                        let (a, b) = crate::bhc::radical_hyperplane(b1, b2)
                            .expect("non-concentric spheres have a radical hyperplane");
                        let idx = cover.add_hyperplane(&a, &b);
                        cover.add_pair(i, j, vec![idx], rel == SphereRelation::FullCircle);
                    }
                },
                (Kind::Ball(_), Kind::Poly(f)) | (Kind::Poly(f), Kind::Ball(_)) => {
                    cover.add_pair(i, j, f.clone(), false);
                }
                (Kind::Poly(f1), Kind::Poly(f2)) => {
                    let mut planes = f1.clone();
                    planes.extend_from_slice(f2);
                    planes.sort_unstable();
                    planes.dedup();
                    cover.add_pair(i, j, planes, false);
                }
            }
        }
    }
    Ok(Some(cover))
}

/// Feasibility over one subdivision: certified concave pieces go through
/// the integer-hull vertex oracle, everything else through exact scans;
/// all witnesses are re-verified against the instance.
pub fn solve_subdivision(
    sub: &Subdivision,
    instance: &Instance,
    opts: &SolveOptions,
) -> Result<Verdict> {
    let started = Instant::now();
    let mut search = Search::new(instance, opts);
    let done = drive_subdivision(sub, &mut search, "piece")?;
    let _ = done;
    let pieces = sub.convex_pieces.len() + sub.concave_pieces.len();
    Ok(search.finish(pieces, started))
}

/// Runs the piece loop of one subdivision inside an existing search.
/// Returns `true` when the search asked to stop early.
fn drive_subdivision(sub: &Subdivision, search: &mut Search, prefix: &str) -> Result<bool> {
    for (k, q) in sub.convex_pieces.iter().enumerate() {
        let label = format!("{prefix} convex {k}");
        if search.convex_piece(&ConvexSet::polyhedron(q.clone()), &label)? {
            return Ok(true);
        }
    }
    for (k, (q, removed)) in sub.concave_pieces.iter().enumerate() {
        let label = format!("{prefix} concave {k}");
        let certified = matches!(
            removed,
            ConvexSet::UnionConvex {
                certified: true,
                ..
            }
        );
        let stop = if certified {
            search.concave_piece(q, std::slice::from_ref(removed), &label)?
        } else {
            search.pieces += 1;
            search.scan_piece(q, &label)?
        };
        if stop {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decides instance feasibility and returns a [`Verdict`].
///
/// Dispatches on the removed family as described in the module
/// documentation; refuses unsupported shapes with [`Error::Refusal`] and
/// propagates guard violations.  With `opts.verify` the status (and the
/// witness under `opts.canonical`) is compared against
/// [`brute_force_verdict`]; a mismatch is an [`Error::Internal`].
pub fn solve(instance: &Instance, opts: &SolveOptions) -> Result<Verdict> {
    let started = Instant::now();
    instance.validate()?;
    if instance.dim > opts.guards.max_dim {
        return Err(Error::GuardExceeded(format!(
            "dimension {} exceeds the guard {}",
            instance.dim, opts.guards.max_dim
        )));
    }
    if instance.box_radius > opts.guards.max_radius {
        return Err(Error::GuardExceeded(format!(
            "box radius {} exceeds the guard {}",
            instance.box_radius, opts.guards.max_radius
        )));
    }
    if !instance.removed_all_convex() {
        return Err(Error::Refusal(
            "a removed set is not convex; only the brute-force oracle answers this instance"
                .into(),
        ));
    }

    let curved = instance
        .removed
        .iter()
        .filter(|c| !matches!(c, ConvexSet::Polyhedron(_)))
        .count();
    let mut search = Search::new(instance, opts);
    let mut cells = 0usize;

    if instance.domains.is_empty() {
        search.trace.push("no domains: infeasible".into());
    } else if instance.removed.is_empty() {
        solve_no_removals(instance, &mut search)?;
    } else if curved == 0 {
        cells = solve_all_polyhedral(instance, &mut search)?;
    } else if instance.removed.len() == 1 {
        solve_single_curved(instance, &mut search)?;
    } else {
        cells = solve_bhc(instance, &mut search)?;
    }

    let verdict = search.finish(cells, started);
    if opts.verify {
        let reference = brute_force_verdict(instance, &opts.guards)?;
        let agree = match (&verdict.status, &reference) {
            (Status::Feasible(w), Some(r)) => !opts.canonical || w == r,
            (Status::Infeasible, None) => true,
            _ => false,
        };
        if !agree {
            return Err(Error::Internal(format!(
                "verification failed: solver found {:?}, brute force found {reference:?}",
                verdict.status
            )));
        }
    }
    Ok(verdict)
}

fn solve_no_removals(instance: &Instance, search: &mut Search) -> Result<()> {
    for (j, domain) in instance.domains.iter().enumerate() {
        if search.convex_piece(domain, &format!("domain {j}"))? {
            return Ok(());
        }
    }
    Ok(())
}

fn solve_all_polyhedral(instance: &Instance, search: &mut Search) -> Result<usize> {
    let removed: Vec<HPolyhedron> = instance
        .removed
        .iter()
        .map(|c| match c {
            ConvexSet::Polyhedron(p) => p.clone(),
            _ => unreachable!("caller checked the family is polyhedral"),
        })
        .collect();
    let ambient = HPolyhedron::cube(instance.dim, &instance.box_radius);
    let kept = decompose_removing_polyhedra(&ambient, &removed, instance.removal)?;
    for (j, domain) in instance.domains.iter().enumerate() {
        for (t, cell) in kept.iter().enumerate() {
            let piece = ConvexSet::intersection(vec![
                domain.clone(),
                ConvexSet::polyhedron(cell.clone()),
            ]);
            if search.convex_piece(&piece, &format!("domain {j} cell {t}"))? {
                return Ok(kept.len());
            }
        }
    }
    Ok(kept.len())
}

fn solve_single_curved(instance: &Instance, search: &mut Search) -> Result<()> {
    let cube = HPolyhedron::cube(instance.dim, &instance.box_radius);
    for (j, domain) in instance.domains.iter().enumerate() {
        let Some(p) = domain_polytope(domain) else {
            return Err(Error::Refusal(format!(
                "domain {j} is not polyhedral; curved domains are supported only \
                 alongside polyhedral removals"
            )));
        };
        let q = restrict_rows(p, &cube);
        if search.concave_piece(&q, &instance.removed, &format!("domain {j}"))? {
            return Ok(());
        }
    }
    Ok(())
}

fn solve_bhc(instance: &Instance, search: &mut Search) -> Result<usize> {
    if instance.removal != Removal::Interior {
        return Err(Error::Refusal(
            "closed removal of several curved sets is unsupported; the decomposition \
             is stated for interiors"
                .into(),
        ));
    }
    if !instance.domains_polyhedral() {
        return Err(Error::Refusal(
            "the decomposition pipeline requires polyhedral domains".into(),
        ));
    }
    let cover = match &instance.cover {
        Some(c) => c.clone(),
        None => match derive_cover(&instance.removed, instance.dim)? {
            Some(c) => c,
            None => {
                return Err(Error::Refusal(
                    "several curved removed sets without a boundary hyperplane cover: \
                     supply one or restrict to balls and polyhedra"
                        .into(),
                ))
            }
        },
    };
    let pieces = decompose_bhc_integer(
        &instance.removed,
        &cover,
        &instance.box_radius,
        &search.opts.guards,
    )?;
    let cells = pieces.iter().map(|p| p.cell_id).max().map_or(0, |c| c + 1);
    for (j, domain) in instance.domains.iter().enumerate() {
        let p = domain_polytope(domain).expect("domains checked polyhedral above");
        let sub = to_subdivision(&pieces, &instance.removed, p);
        if drive_subdivision(&sub, search, &format!("domain {j}"))? {
            return Ok(cells);
        }
    }
    Ok(cells)
}
