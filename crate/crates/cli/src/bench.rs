//! Benchmark harness: runs the fixed-point solver and the projected-gradient
//! baseline on identical seeded instances and reports per-instance records
//! plus wall-time quartiles per (dimension, method).
//!
//! Instances that fail to converge within their iteration budget are flagged
//! in the report rather than discarded.

use std::time::Instant;

use bures_core::solver::{grad_tol_for_gap, pgd_baseline, solve, ProjectionProblem, SolverConfig};
use bures_core::symmetry::GroupAction;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::gen;

pub const REPORT_SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchProblem {
    /// Fidelity-of-coherence instances: random full-rank densities of the
    /// listed dimensions under the dephasing group.
    Coherence,
    /// Max-conditional-entropy instances: the listed value d is the subsystem
    /// dimension of a random density on a d×d bipartition.
    Hmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedPoint,
    Pgd,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub problem: BenchProblem,
    pub dims: Vec<usize>,
    pub samples_per_dim: usize,
    pub seed: u64,
    pub gap_target: f64,
    pub fp_max_iters: usize,
    /// The baseline needs far more iterations per unit of progress; it gets
    /// its own budget so a hard instance cannot stall the whole suite.
    pub pgd_max_iters: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(CliError::BenchConfig {
                message: "empty dimension list".to_string(),
            });
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(CliError::BenchConfig {
                message: "dimensions must be at least 2".to_string(),
            });
        }
        if self.samples_per_dim == 0 {
            return Err(CliError::BenchConfig {
                message: "samples_per_dim must be positive".to_string(),
            });
        }
        if !(self.gap_target > 0.0 && self.gap_target.is_finite()) {
            return Err(CliError::BenchConfig {
                message: format!("gap_target {} not a positive real", self.gap_target),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_seed: u64,
    pub dim: usize,
    pub condition_number: f64,
    pub method: Method,
    pub value: f64,
    pub certified_gap: f64,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub dim: usize,
    pub method: Method,
    pub q1_wall_time_ms: f64,
    pub median_wall_time_ms: f64,
    pub q3_wall_time_ms: f64,
    pub non_converged: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: u64,
    pub config: BenchConfig,
    pub records: Vec<InstanceRecord>,
    pub aggregates: Vec<Aggregate>,
}

/// Nearest-rank percentile of an unsorted sample.
fn percentile(samples: &mut [f64], p: f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let idx = (p * (samples.len() - 1) as f64).round() as usize;
    samples[idx]
}

fn problem_for(cfg: &BenchConfig, dim: usize, seed: u64) -> Result<ProjectionProblem> {
    let (matrix_dim, group) = match cfg.problem {
        BenchProblem::Coherence => (dim, GroupAction::dephasing(dim)),
        BenchProblem::Hmax => (dim * dim, GroupAction::one_design_on_a(dim, dim)),
    };
    let rho = gen::random_density(matrix_dim, matrix_dim, seed)?;
    ProjectionProblem::new(rho.into_inner(), group, 0.0).map_err(CliError::Core)
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let mut records = Vec::new();
    let mut counter = 0u64;
    for &dim in &cfg.dims {
        for _ in 0..cfg.samples_per_dim {
            let seed = gen::derive_seed(cfg.seed, counter);
            counter += 1;
            let p = problem_for(cfg, dim, seed)?;
            let cond = p.r.condition_number().map_err(CliError::Core)?;

            let fp_cfg = SolverConfig {
                gap_target: cfg.gap_target,
                max_iters: cfg.fp_max_iters,
                record_trace: false,
                ..SolverConfig::default()
            };
            let started = Instant::now();
            let fp = solve(&p, &fp_cfg).map_err(CliError::Core)?;
            let fp_ms = started.elapsed().as_secs_f64() * 1e3;
            records.push(InstanceRecord {
                instance_seed: seed,
                dim,
                condition_number: cond,
                method: Method::FixedPoint,
                value: fp.bures_sq_value,
                certified_gap: fp.certified_gap,
                iterations: fp.iterations_used,
                wall_time_ms: fp_ms,
                converged: fp.converged,
            });

            // same certified accuracy target, translated into the gradient
            // tolerance the baseline stops on
            let spec = p.r.spectral().map_err(CliError::Core)?;
            let tol = grad_tol_for_gap(cfg.gap_target, spec.lambda_min(), spec.lambda_max());
            let started = Instant::now();
            let pgd = pgd_baseline(&p, tol, cfg.pgd_max_iters).map_err(CliError::Core)?;
            let pgd_ms = started.elapsed().as_secs_f64() * 1e3;
            records.push(InstanceRecord {
                instance_seed: seed,
                dim,
                condition_number: cond,
                method: Method::Pgd,
                value: pgd.bures_sq_value,
                certified_gap: pgd.certified_gap,
                iterations: pgd.iterations_used,
                wall_time_ms: pgd_ms,
                converged: pgd.converged,
            });
        }
    }

    let mut aggregates = Vec::new();
    for &dim in &cfg.dims {
        for method in [Method::FixedPoint, Method::Pgd] {
            let mut times: Vec<f64> = records
                .iter()
                .filter(|r| r.dim == dim && r.method == method)
                .map(|r| r.wall_time_ms)
                .collect();
            let non_converged = records
                .iter()
                .filter(|r| r.dim == dim && r.method == method && !r.converged)
                .count();
            aggregates.push(Aggregate {
                dim,
                method,
                q1_wall_time_ms: percentile(&mut times, 0.25),
                median_wall_time_ms: percentile(&mut times, 0.5),
                q3_wall_time_ms: percentile(&mut times, 0.75),
                non_converged,
            });
        }
    }

    Ok(BenchmarkReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        records,
        aggregates,
    })
}
