use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bures_cli::bench::{run_benchmark, BenchConfig, BenchProblem};
use bures_cli::error::{CliError, Result};
use bures_cli::gen;
use bures_cli::matfile;
use bures_core::apps::{self, DensityMatrix, WeightedEnsemble};
use bures_core::hermitian::HermitianMatrix;
use bures_core::solver::{solve, MuMode, SolverConfig, SolverResult};
use bures_core::symmetry::GroupAction;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

const SEED_ENV_VAR: &str = "BURES_SEED";
const DEFAULT_SEED: u64 = 0x42u64;

#[derive(Parser)]
#[command(
    name = "bures",
    version,
    about = "Bures-distance projections of positive matrices onto group-symmetric cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MuModeArg {
    /// Track the eigenvalue bracket observed along the run
    Adaptive,
    /// Use the worst-case bracket from the input spectrum only
    WorstCase,
}

impl From<MuModeArg> for MuMode {
    fn from(m: MuModeArg) -> Self {
        match m {
            MuModeArg::Adaptive => MuMode::AdaptiveEigTracking,
            MuModeArg::WorstCase => MuMode::WorstCase,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BenchProblemArg {
    Coherence,
    Hmax,
}

#[derive(Args)]
struct SolveOpts {
    /// Depolarization mix-in for rank-deficient inputs (0 disables it)
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Certified optimality-gap target
    #[arg(long, default_value_t = 1e-9)]
    gap_target: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = MuModeArg::Adaptive)]
    mu_mode: MuModeArg,
    /// Print one JSON object instead of key = value lines
    #[arg(long)]
    json: bool,
}

impl SolveOpts {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            gap_target: self.gap_target,
            max_iters: self.max_iters,
            mu_mode: self.mu_mode.into(),
            record_trace: true,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Project a PSD matrix file onto the symmetric cone of a group
    Project {
        #[arg(long)]
        input: PathBuf,
        /// 'dephasing', 'onedesign:DA,DB', or 'file:UNITARIES.json'
        #[arg(long)]
        group: String,
        /// Write the optimizer T to this matrix file
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write per-iteration records to this JSON file
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Fidelity of coherence of a state (dephasing symmetry)
    Coherence {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Max-conditional entropy H_max(A|B) of a bipartite state
    Hmax {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dim_a: usize,
        #[arg(long)]
        dim_b: usize,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Rényi-1/2 mutual information of a bipartite state
    Imax {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dim_a: usize,
        #[arg(long)]
        dim_b: usize,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Weighted Bures barycenter of PSD matrix files
    Barycenter {
        /// Ensemble member files (repeat the flag per member)
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Comma-separated weights; uniform when omitted
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Fidelity-mean state of an ensemble of density matrices
    Meanstate {
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        weights: Vec<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Geometric entanglement of a maximally correlated state
    Gme {
        #[arg(long)]
        input: PathBuf,
        /// Subsystem dimension; inferred from the input when omitted
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Best channel input whose twirl approximates a target state
    Precompensate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        group: String,
        /// Write the suggested input state to this matrix file
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opts: SolveOpts,
    },
    /// Compare fixed-point and projected-gradient timings on seeded instances
    Bench {
        #[arg(long, value_enum)]
        problem: BenchProblemArg,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-9)]
        gap_target: f64,
        #[arg(long, default_value_t = 10_000)]
        fp_max_iters: usize,
        #[arg(long, default_value_t = 50_000)]
        pgd_max_iters: usize,
        /// Report file; the full JSON report goes to stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded random instance to a matrix file
    Gen {
        #[arg(long)]
        dim: usize,
        /// Rank of the Ginibre factor; full rank when omitted
        #[arg(long, conflicts_with = "cond")]
        rank: Option<usize>,
        /// Build a unit-trace matrix with this condition number instead
        #[arg(long)]
        cond: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var(SEED_ENV_VAR)
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(DEFAULT_SEED)
}

fn parse_group(spec: &str, dim: usize) -> Result<GroupAction> {
    if spec == "dephasing" {
        return Ok(GroupAction::dephasing(dim));
    }
    if let Some(rest) = spec.strip_prefix("onedesign:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(da), Ok(db)) = (parts[0].parse::<usize>(), parts[1].parse::<usize>()) {
                if da >= 1 && db >= 1 && da * db == dim {
                    return Ok(GroupAction::one_design_on_a(da, db));
                }
            }
        }
        return Err(CliError::GroupSpec {
            spec: spec.to_string(),
        });
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let unitaries = matfile::load_unitaries(Path::new(path))?;
        return GroupAction::explicit(unitaries).map_err(CliError::Core);
    }
    Err(CliError::GroupSpec {
        spec: spec.to_string(),
    })
}

fn load_density(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(matfile::load_matrix(path)?).map_err(CliError::Core)
}

fn ensemble(inputs: &[PathBuf], weights: &[f64]) -> Result<(Vec<f64>, Vec<HermitianMatrix>)> {
    let members = inputs
        .iter()
        .map(|p| matfile::load_matrix(p))
        .collect::<Result<Vec<_>>>()?;
    let weights = if weights.is_empty() {
        vec![1.0 / members.len() as f64; members.len()]
    } else if weights.len() == members.len() {
        weights.to_vec()
    } else {
        return Err(CliError::WeightCount {
            weights: weights.len(),
            inputs: members.len(),
        });
    };
    Ok((weights, members))
}

#[derive(Serialize)]
struct TraceRow {
    n: usize,
    bures_sq: f64,
    grad_norm: f64,
    lambda_min_s: f64,
    lambda_max_s: f64,
    pl_gap_bound: f64,
}

fn write_trace(path: &Path, result: &SolverResult) -> Result<()> {
    let rows: Vec<TraceRow> = result
        .trace
        .iter()
        .map(|r| TraceRow {
            n: r.n,
            bures_sq: r.bures_sq,
            grad_norm: r.grad_norm,
            lambda_min_s: r.lambda_min_s,
            lambda_max_s: r.lambda_max_s,
            pl_gap_bound: r.pl_gap_bound,
        })
        .collect();
    let text = serde_json::to_string_pretty(&rows).expect("trace serializes");
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_matrix(path: &Path, m: &HermitianMatrix, kind: &str) -> Result<()> {
    let mut meta = BTreeMap::new();
    meta.insert("kind".to_string(), kind.to_string());
    matfile::save_matrix(path, m, meta)
}

/// Key = value lines for humans, one JSON object for machines.
fn emit(json: bool, fields: &[(&str, serde_json::Value)]) {
    if json {
        let mut map = serde_json::Map::new();
        for (k, v) in fields {
            map.insert((*k).to_string(), v.clone());
        }
        println!("{}", serde_json::Value::Object(map));
    } else {
        for (k, v) in fields {
            match v {
                serde_json::Value::Number(n) => println!("{k} = {n}"),
                other => println!("{k} = {other}"),
            }
        }
    }
}

fn solver_fields(res: &SolverResult) -> Vec<(&'static str, serde_json::Value)> {
    vec![
        ("certified_gap", json!(res.certified_gap)),
        ("iterations", json!(res.iterations_used)),
        ("converged", json!(res.converged)),
        ("continuity_penalty", json!(res.continuity_penalty)),
        ("commuting_symmetry", json!(res.commuting)),
    ]
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Project {
            input,
            group,
            output,
            trace_out,
            opts,
        } => {
            let r = matfile::load_matrix(&input)?;
            let group = parse_group(&group, r.dim())?;
            let problem = bures_core::solver::ProjectionProblem::new(r, group, opts.eps)
                .map_err(CliError::Core)?;
            let res = solve(&problem, &opts.config()).map_err(CliError::Core)?;
            if let Some(path) = &output {
                write_matrix(path, &res.optimizer_t, "optimizer")?;
            }
            if let Some(path) = &trace_out {
                write_trace(path, &res)?;
            }
            let mut fields = vec![
                ("value", json!(res.bures_sq_value)),
                ("trace_t", json!(res.optimizer_t.trace())),
            ];
            fields.extend(solver_fields(&res));
            emit(opts.json, &fields);
            Ok(res.converged)
        }
        Command::Coherence { input, opts } => {
            let rho = load_density(&input)?;
            let res = apps::fidelity_of_coherence(&rho, opts.eps, &opts.config())
                .map_err(CliError::Core)?;
            let mut fields = vec![("value", json!(res.fidelity))];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Hmax {
            input,
            dim_a,
            dim_b,
            opts,
        } => {
            let rho = load_density(&input)?;
            let res = apps::h_max_conditional(&rho, dim_a, dim_b, opts.eps, &opts.config())
                .map_err(CliError::Core)?;
            let mut fields = vec![
                ("hmax_bits", json!(res.hmax_bits)),
                ("max_fidelity", json!(res.max_fidelity)),
            ];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Imax {
            input,
            dim_a,
            dim_b,
            opts,
        } => {
            let rho = load_density(&input)?;
            let res = apps::i_max_renyi_half(&rho, dim_a, dim_b, opts.eps, &opts.config())
                .map_err(CliError::Core)?;
            let mut fields = vec![
                ("imax_bits", json!(res.imax_bits)),
                ("max_fidelity", json!(res.max_fidelity)),
            ];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Barycenter {
            inputs,
            weights,
            output,
            opts,
        } => {
            let (weights, members) = ensemble(&inputs, &weights)?;
            let ens = WeightedEnsemble::new(weights, members).map_err(CliError::Core)?;
            let res =
                apps::matrix_barycenter(&ens, opts.eps, &opts.config()).map_err(CliError::Core)?;
            if let Some(path) = &output {
                write_matrix(path, &res.barycenter, "barycenter")?;
            }
            let mut fields = vec![("trace", json!(res.barycenter.trace()))];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Meanstate {
            inputs,
            weights,
            output,
            opts,
        } => {
            let (weights, members) = ensemble(&inputs, &weights)?;
            let ens = WeightedEnsemble::new(weights, members).map_err(CliError::Core)?;
            let res =
                apps::quantum_mean_state(&ens, opts.eps, &opts.config()).map_err(CliError::Core)?;
            if let Some(path) = &output {
                write_matrix(path, res.state.matrix(), "mean-state")?;
            }
            let mut fields = vec![("trace", json!(res.state.matrix().trace()))];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Gme { input, dim, opts } => {
            let rho = load_density(&input)?;
            let dim = match dim {
                Some(d) => d,
                None => {
                    let d = (rho.dim() as f64).sqrt().round() as usize;
                    if d * d != rho.dim() {
                        return Err(CliError::Core(bures_core::Error::DimensionMismatch {
                            left: rho.dim(),
                            right: d * d,
                        }));
                    }
                    d
                }
            };
            let res = apps::geometric_entanglement_mc(&rho, dim, opts.eps, &opts.config())
                .map_err(CliError::Core)?;
            let mut fields = vec![
                ("value", json!(res.value)),
                ("max_fidelity", json!(res.max_fidelity)),
            ];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Precompensate {
            input,
            group,
            output,
            opts,
        } => {
            let rho = load_density(&input)?;
            let group = parse_group(&group, rho.dim())?;
            let res = apps::error_precompensation_twirl(&rho, group, opts.eps, &opts.config())
                .map_err(CliError::Core)?;
            if let Some(path) = &output {
                write_matrix(path, res.rho_in.matrix(), "precompensated-input")?;
            }
            let mut fields = vec![("achieved_fidelity", json!(res.achieved_fidelity))];
            fields.extend(solver_fields(&res.solver));
            emit(opts.json, &fields);
            Ok(res.solver.converged)
        }
        Command::Bench {
            problem,
            dims,
            samples,
            seed,
            gap_target,
            fp_max_iters,
            pgd_max_iters,
            out,
        } => {
            let cfg = BenchConfig {
                problem: match problem {
                    BenchProblemArg::Coherence => BenchProblem::Coherence,
                    BenchProblemArg::Hmax => BenchProblem::Hmax,
                },
                dims,
                samples_per_dim: samples,
                seed: resolve_seed(seed),
                gap_target,
                fp_max_iters,
                pgd_max_iters,
            };
            let report = run_benchmark(&cfg)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            match &out {
                Some(path) => {
                    std::fs::write(path, text).map_err(|source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    for a in &report.aggregates {
                        println!(
                            "dim {:>3}  {:<12} median {:>10.3} ms  (q1 {:.3}, q3 {:.3}, non-converged {})",
                            a.dim,
                            format!("{:?}", a.method).to_lowercase(),
                            a.median_wall_time_ms,
                            a.q1_wall_time_ms,
                            a.q3_wall_time_ms,
                            a.non_converged
                        );
                    }
                }
                None => println!("{text}"),
            }
            Ok(true)
        }
        Command::Gen {
            dim,
            rank,
            cond,
            seed,
            output,
        } => {
            let seed = resolve_seed(seed);
            let (rho, meta) = match cond {
                Some(c) => {
                    let rho = gen::conditioned_density(dim, c, seed)?;
                    (rho, format!("conditioned:{c}"))
                }
                None => {
                    let r = rank.unwrap_or(dim);
                    let rho = gen::random_density(dim, r, seed)?;
                    (rho, format!("ginibre-rank:{r}"))
                }
            };
            let mut metadata = BTreeMap::new();
            metadata.insert("generator".to_string(), meta);
            metadata.insert("seed".to_string(), seed.to_string());
            matfile::save_matrix(&output, rho.matrix(), metadata)?;
            println!("wrote {}", output.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`bures ... | head`) instead of panicking
    // mid-print; Rust ignores SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: gap target not reached within the iteration budget; partial result reported");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
