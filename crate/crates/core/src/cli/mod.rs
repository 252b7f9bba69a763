//! Problem registry, definition files, and the `certify` / `solve` /
//! `measure` / `demo` jobs behind the command-line tool.
//!
//! Every job returns a [`Report`]: a JSON document with a `kind`, a
//! `payload` and `provenance` (tool version, seed, and a SHA-256 hash of the
//! canonical definition text plus the job configuration). Reports carry no
//! timing data, so identical inputs give byte-identical output.

mod definition;
pub mod registry;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use definition::{
    bundled_source, emit, load_bundled, load_problem, Components, Constants, FieldDef, GridKind, Numerics, Problem,
    ProblemDefinition, BUNDLED,
};

use crate::certify::{self, contraction_constant, invariant_ball_radius, CertifyOptions};
use crate::error::{Error, Result};
use crate::l1::GridFunction;
use crate::solver::{self, SolveConfig, SolveReport};
use crate::wkmeasure::{self, Ensemble, Schedules};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Certificate,
    Solve,
    Measure,
    Demo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: Option<u64>,
    /// Hex SHA-256 of the canonical definition and the job configuration.
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ReportKind,
    pub payload: Value,
    pub provenance: Provenance,
}

impl Report {
    fn new(kind: ReportKind, payload: Value, def: &ProblemDefinition, config: &Value, seed: Option<u64>) -> Self {
        let mut h = Sha256::new();
        h.update(def.emit().as_bytes());
        h.update(b"\n");
        h.update(config.to_string().as_bytes());
        let config_hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            kind,
            payload,
            provenance: Provenance {
                tool_version: TOOL_VERSION.into(),
                seed,
                config_hash,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types always serialize")
}

/// Sampling sizes and seed for [`run_certify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyRun {
    pub seed: u64,
    pub samples: usize,
    pub pairs: usize,
    pub ball_samples: usize,
}

impl Default for CertifyRun {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 10_000,
            pairs: 100,
            ball_samples: 100,
        }
    }
}

/// Builds the problem and runs the full certificate on its check grid.
pub fn run_certify(def: &ProblemDefinition, run: &CertifyRun) -> Result<Report> {
    let problem = def.build()?;
    let cert = certify::certify(
        &problem.spec,
        &problem.check_grid,
        &CertifyOptions {
            samples: run.samples,
            pairs: run.pairs,
            ball_samples: run.ball_samples,
            seed: run.seed,
            witness: problem.witness.clone(),
        },
    )?;
    let payload = json!({
        "problem": def.name,
        "check_cells": problem.check_grid.cells(),
        "t_max": problem.check_grid.t_max(),
        "certificate": to_value(&cert),
    });
    Ok(Report::new(
        ReportKind::Certificate,
        payload,
        def,
        &to_value(run),
        Some(run.seed),
    ))
}

/// Node table `(t, x(t))` of a grid function; right limits at jumps.
pub fn solution_table(x: &GridFunction) -> Vec<[f64; 2]> {
    x.grid().nodes().iter().map(|&t| [t, x.eval(t)]).collect()
}

/// CSV form of [`solution_table`].
pub fn table_csv(x: &GridFunction) -> String {
    let mut out = String::from("t,x\n");
    for [t, v] in solution_table(x) {
        out.push_str(&format!("{t:e},{v:e}\n"));
    }
    out
}

fn solve_payload(def: &ProblemDefinition, rep: &SolveReport, warnings: &[String], with_table: bool) -> Value {
    let norm = rep.final_norm();
    let mut payload = json!({
        "problem": def.name,
        "cells": rep.final_iterate.grid().cells(),
        "scheme": rep.scheme,
        "status": rep.status,
        "iterations": rep.iterations(),
        "residual_history": rep.residual_history,
        "norm_history": rep.norm_history,
        "damping_history": rep.damping_history,
        "inner_iterations": rep.inner_iterations,
        "final_residual": rep.final_residual(),
        "final_norm": norm,
        "relative_residual": rep.final_residual() / (1.0 + norm),
        "refinement": rep.refinement,
        "representation_error": rep.representation_error,
        "warnings": warnings,
    });
    if with_table {
        payload["table"] = to_value(&solution_table(&rep.final_iterate));
    }
    payload
}

/// Solves from `x0 = 0` on the definition's grid. A failed certificate
/// produces a warning and the solve proceeds. Returns the report and the
/// raw solver output.
pub fn run_solve(def: &ProblemDefinition, config: &SolveConfig, with_table: bool) -> Result<(Report, SolveReport)> {
    let problem = def.build()?;
    let mut warnings = Vec::new();
    let ball = invariant_ball_radius(&problem.spec)?;
    if ball.r.is_none() {
        warnings.push(format!(
            "certificate failed: gamma = {} >= 1, no invariant ball; solving anyway",
            ball.gamma
        ));
    }
    let mut config = config.clone();
    if config.reference_radius.is_none() {
        config.reference_radius = ball.r;
    }
    let x0 = GridFunction::zero(&problem.grid);
    let rep = solver::solve(&problem.spec, &x0, &config)?;
    let payload = solve_payload(def, &rep, &warnings, with_table);
    let report = Report::new(
        ReportKind::Solve,
        payload,
        def,
        &json!({ "config": config, "table": with_table }),
        None,
    );
    Ok((report, rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Zero,
    Concentrating,
    Escaping,
    RandomInBall,
    Oscillating,
}

/// `kind:size`, e.g. `concentrating:64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub size: usize,
}

impl FromStr for EnsembleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) = s.split_once(':').unwrap_or((s, "1"));
        let kind = match kind {
            "zero" => EnsembleKind::Zero,
            "concentrating" => EnsembleKind::Concentrating,
            "escaping" => EnsembleKind::Escaping,
            "random-in-ball" | "random_in_ball" => EnsembleKind::RandomInBall,
            "oscillating" => EnsembleKind::Oscillating,
            other => {
                return Err(Error::Input(format!(
                    "unknown ensemble `{other}`; expected zero, concentrating, escaping, random-in-ball or oscillating"
                )))
            }
        };
        let size = size
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Input(format!("ensemble size `{size}` is not a positive integer")))?;
        Ok(Self { kind, size })
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            EnsembleKind::Zero => "zero",
            EnsembleKind::Concentrating => "concentrating",
            EnsembleKind::Escaping => "escaping",
            EnsembleKind::RandomInBall => "random-in-ball",
            EnsembleKind::Oscillating => "oscillating",
        };
        write!(f, "{kind}:{}", self.size)
    }
}

impl EnsembleSpec {
    /// Generates the ensemble on `grid`; random members are drawn in `B_r`.
    pub fn generate(&self, grid: &crate::l1::Grid, r: f64, seed: u64) -> Result<Ensemble> {
        match self.kind {
            EnsembleKind::Zero => Ok(Ensemble::zero(grid)),
            EnsembleKind::Concentrating => Ensemble::concentrating(grid, self.size),
            EnsembleKind::Escaping => Ensemble::escaping(grid, self.size),
            EnsembleKind::RandomInBall => Ensemble::random_in_ball(grid, self.size, r, seed),
            EnsembleKind::Oscillating => Ensemble::oscillating(grid, self.size),
        }
    }
}

/// Measures an ensemble scaled into `B_r` and its image under `x ↦ Ax + Bx`.
/// Without an invariant ball the unit ball is used and the check is marked
/// failed.
pub fn run_measure(
    def: &ProblemDefinition,
    ensemble: &EnsembleSpec,
    schedules: &Schedules,
    seed: u64,
    cross: bool,
) -> Result<Report> {
    let problem = def.build()?;
    let ball = invariant_ball_radius(&problem.spec)?;
    let r = ball.r.filter(|&r| r > 0.0).unwrap_or(1.0);
    let grid = &problem.check_grid;
    let raw = ensemble.generate(grid, r, seed)?;
    let source = raw.scaled_into_ball(r);
    let unscaled = wkmeasure::mu_measure(&raw, schedules)?;
    let rep = wkmeasure::check_mu_contraction(&problem.spec, &source, schedules, ball.gamma, cross)?;
    let passed = rep.passed && ball.r.is_some();
    let payload = json!({
        "problem": def.name,
        "ensemble": ensemble.to_string(),
        "size": source.len(),
        "radius": r,
        "check_cells": grid.cells(),
        "unscaled": unscaled,
        "contraction": rep,
        "passed": passed,
    });
    let config = json!({ "ensemble": ensemble, "schedules": schedules, "cross": cross });
    Ok(Report::new(ReportKind::Measure, payload, def, &config, Some(seed)))
}

/// The worked example end to end: certificate, Picard solve, and the
/// headline numbers.
pub fn run_demo(seed: u64) -> Result<Report> {
    let def = load_bundled("taoudi_example")?;
    let problem = def.build()?;
    let gamma = contraction_constant(&problem.spec)?;
    let cert = run_certify(
        &def,
        &CertifyRun {
            seed,
            ..CertifyRun::default()
        },
    )?;
    let (_, rep) = run_solve(&def, &SolveConfig::default(), false)?;
    let c = &cert.payload["certificate"];
    let payload = json!({
        "problem": def.name,
        "gamma": gamma.gamma,
        "c": c["c"],
        "r": c["r"],
        "certificate_passed": c["passed"],
        "solve_status": rep.status,
        "iterations": rep.iterations(),
        "final_residual": rep.final_residual(),
        "final_norm": rep.final_norm(),
        "refinement": rep.refinement,
    });
    Ok(Report::new(
        ReportKind::Demo,
        payload,
        &def,
        &json!({ "seed": seed }),
        Some(seed),
    ))
}
