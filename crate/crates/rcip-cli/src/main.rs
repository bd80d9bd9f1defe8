//! Command-line front end for exact reverse-convex integer feasibility.
//!
//! Reads instance JSON (or draws a seeded random instance), runs one of
//! the pipeline stages, and writes a JSON report to stdout.  Exit codes:
//! `0` feasible or success, `1` infeasible, `2` refusal, guard overrun, or
//! malformed input, `3` internal error.  All orchestration is
//! single-threaded and deterministic for a fixed input and seed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use rcip_core::arrangement::Arrangement;
use rcip_core::bhc::verify_cover;
use rcip_core::decompose::{decompose_bhc_integer, decompose_removing_polyhedra};
use rcip_core::gen::{random_corpus, GenOptions};
use rcip_core::instance::{brute_force_verdict, brute_force_witnesses};
use rcip_core::integer_hull::{integer_hull_vertices, Guards};
use rcip_core::solver::{derive_cover, solve, SolveOptions, Status};
use rcip_core::{ConvexSet, Error, HPolyhedron, Instance, Removal};

#[derive(Parser)]
#[command(
    name = "rcip",
    about = "Exact integer feasibility for polytopes with convex regions removed",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Where the instance comes from: a JSON file, or the seeded generator.
#[derive(Args)]
struct Source {
    /// Instance JSON file.
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,
    /// Draw the instance from the seeded random generator instead.
    #[arg(long, conflicts_with = "file")]
    seed: Option<u64>,
    /// Index within the seeded stream.
    #[arg(long, default_value_t = 0, requires = "seed")]
    index: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide integer feasibility and print a verdict.
    Solve {
        #[command(flatten)]
        source: Source,
        /// Return the globally lexicographically smallest witness.
        #[arg(long)]
        canonical: bool,
        /// Cross-check the verdict against the brute-force oracle.
        #[arg(long)]
        verify: bool,
        /// Omit timing from the report (byte-identical across runs).
        #[arg(long)]
        stable: bool,
    },
    /// Print the certified decomposition of the removed family.
    Decompose {
        #[command(flatten)]
        source: Source,
    },
    /// Enumerate the maximal arrangement cells of the boundary cover.
    Cells {
        #[command(flatten)]
        source: Source,
    },
    /// Print the integer-hull vertices of each domain inside the box.
    Hull {
        #[command(flatten)]
        source: Source,
    },
    /// Verify the boundary hyperplane cover pair by pair.
    CheckBhc {
        #[command(flatten)]
        source: Source,
        /// Boundary sample budget per pair for the sampled routes.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Brute-force reference verdict (answers any well-formed instance).
    Oracle {
        #[command(flatten)]
        source: Source,
        /// List every witness instead of the first.
        #[arg(long)]
        all: bool,
        /// Witness cap for --all.
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Internal(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load(source: &Source) -> Result<Instance, Error> {
    let instance = match (&source.file, source.seed) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Json(format!("cannot read {}: {e}", path.display())))?;
            Instance::from_json(&text)?
        }
        (None, Some(seed)) => random_corpus(seed, source.index + 1, &GenOptions::default())
            .pop()
            .expect("corpus of requested length is never empty"),
        _ => {
            return Err(Error::Json(
                "expected an instance file or --seed".into(),
            ))
        }
    };
    instance.validate()?;
    Ok(instance)
}

/// The instance's cover: supplied, or derived for balls and polyhedra.
fn cover_of(instance: &Instance) -> Result<rcip_core::bhc::BoundaryCover, Error> {
    if let Some(c) = &instance.cover {
        return Ok(c.clone());
    }
    derive_cover(&instance.removed, instance.dim)?.ok_or_else(|| {
        Error::Refusal(
            "no boundary cover: supply one or restrict to balls and polyhedra".into(),
        )
    })
}

fn witness_values(w: &[BigInt]) -> Vec<i64> {
    w.iter()
        .map(|z| i64::try_from(z).expect("witness exceeds i64 despite box guard"))
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Solve {
            source,
            canonical,
            verify,
            stable,
        } => {
            let instance = load(&source)?;
            let opts = SolveOptions {
                canonical,
                verify,
                guards: Guards::from_env(),
            };
            let verdict = solve(&instance, &opts)?;
            if stable {
                println!("{}", verdict.to_json_stable());
            } else {
                println!("{}", verdict.to_json());
            }
            Ok(match verdict.status {
                Status::Feasible(_) => ExitCode::SUCCESS,
                Status::Infeasible => ExitCode::from(1),
            })
        }
        Cmd::Decompose { source } => {
            let instance = load(&source)?;
            println!("{}", decompose_report(&instance)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cells { source } => {
            let instance = load(&source)?;
            let cover = cover_of(&instance)?;
            let mut arr = Arrangement::new(instance.dim);
            for (a, b) in &cover.hyperplanes {
                arr.add(a, b)?;
            }
            let domain = HPolyhedron::cube(instance.dim, &instance.box_radius);
            let cells = arr.maximal_cells(&domain)?;
            let listed: Vec<_> = cells
                .iter()
                .map(|c| json!({ "signs": c.signs }))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "hyperplanes": cover.hyperplanes.len(),
                    "count": cells.len(),
                    "cells": listed,
                }))
                .expect("report serialization cannot fail")
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Hull { source } => {
            let instance = load(&source)?;
            let guards = Guards::from_env();
            let cube = HPolyhedron::cube(instance.dim, &instance.box_radius);
            let mut domains = Vec::new();
            for (j, domain) in instance.domains.iter().enumerate() {
                let ConvexSet::Polyhedron(p) = domain else {
                    return Err(Error::Refusal(format!(
                        "domain {j} is not polyhedral; hull enumeration needs H-polyhedra"
                    )));
                };
                let mut rows = p.rows().to_vec();
                rows.extend_from_slice(cube.rows());
                let vertices = integer_hull_vertices(&HPolyhedron::new(rows), &guards)?;
                let vertices: Vec<Vec<i64>> =
                    vertices.iter().map(|v| witness_values(v)).collect();
                domains.push(json!({ "index": j, "vertices": vertices }));
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({ "domains": domains }))
                    .expect("report serialization cannot fail")
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckBhc { source, samples } => {
            let instance = load(&source)?;
            let cover = cover_of(&instance)?;
            let report = verify_cover(
                &instance.removed,
                &cover,
                &instance.box_radius,
                samples,
            );
            let pairs: Vec<_> = report
                .pairs
                .iter()
                .map(|p| {
                    json!({
                        "i": p.i,
                        "j": p.j,
                        "status": format!("{:?}", p.status),
                        "detail": p.detail,
                    })
                })
                .collect();
            let clean = report.is_clean();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "clean": clean,
                    "violations": report.violations(),
                    "pairs": pairs,
                }))
                .expect("report serialization cannot fail")
            );
            Ok(if clean {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Cmd::Oracle { source, all, limit } => {
            let instance = load(&source)?;
            let guards = Guards::from_env();
            if all {
                let witnesses = brute_force_witnesses(&instance, &guards, limit)?;
                let feasible = !witnesses.is_empty();
                let listed: Vec<Vec<i64>> =
                    witnesses.iter().map(|w| witness_values(w)).collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "status": if feasible { "feasible" } else { "infeasible" },
                        "count": listed.len(),
                        "witnesses": listed,
                    }))
                    .expect("report serialization cannot fail")
                );
                Ok(if feasible {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                })
            } else {
                match brute_force_verdict(&instance, &guards)? {
                    Some(w) => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(&json!({
                                "status": "feasible",
                                "witness": witness_values(&w),
                            }))
                            .expect("report serialization cannot fail")
                        );
                        Ok(ExitCode::SUCCESS)
                    }
                    None => {
                        println!(
                            "{}",
                            serde_json::to_string_pretty(
                                &json!({ "status": "infeasible" })
                            )
                            .expect("report serialization cannot fail")
                        );
                        Ok(ExitCode::from(1))
                    }
                }
            }
        }
    }
}

/// Decomposition summary: kept cells for polyhedral families, certified
/// pieces for covered curved families.
fn decompose_report(instance: &Instance) -> Result<String, Error> {
    let guards = Guards::from_env();
    if instance.removed.is_empty() {
        return Ok(serde_json::to_string_pretty(&json!({
            "kind": "trivial",
            "pieces": 0,
        }))
        .expect("report serialization cannot fail"));
    }
    let all_polyhedral = instance
        .removed
        .iter()
        .all(|c| matches!(c, ConvexSet::Polyhedron(_)));
    if all_polyhedral {
        let removed: Vec<HPolyhedron> = instance
            .removed
            .iter()
            .map(|c| match c {
                ConvexSet::Polyhedron(p) => p.clone(),
                _ => unreachable!("family checked polyhedral"),
            })
            .collect();
        let ambient = HPolyhedron::cube(instance.dim, &instance.box_radius);
        let kept = decompose_removing_polyhedra(&ambient, &removed, instance.removal)?;
        return Ok(serde_json::to_string_pretty(&json!({
            "kind": "polyhedral",
            "pieces": kept.len(),
        }))
        .expect("report serialization cannot fail"));
    }
    if instance.removal != Removal::Interior {
        return Err(Error::Refusal(
            "closed removal of curved families is not decomposed".into(),
        ));
    }
    let cover = cover_of(instance)?;
    let pieces = decompose_bhc_integer(
        &instance.removed,
        &cover,
        &instance.box_radius,
        &guards,
    )?;
    let listed: Vec<_> = pieces
        .iter()
        .map(|p| {
            json!({
                "cell": p.cell_id,
                "component": p.component_id,
                "members": p.member_indices,
                "excluded": p.excluded,
                "certified": p.convex_part.is_some(),
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&json!({
        "kind": "boundary-cover",
        "pieces": pieces.len(),
        "detail": listed,
    }))
    .expect("report serialization cannot fail"))
}
