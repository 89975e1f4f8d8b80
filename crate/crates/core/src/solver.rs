//! Fixed-point solver for min_S B(R, S)² over the group-symmetric PSD cone,
//! with a Polyak–Łojasiewicz optimality-gap certificate, eigenvalue-sandwich
//! tracking, a rank-one closed form, depolarization preprocessing for singular
//! inputs, and a projected-gradient baseline for cross-checking.

use crate::error::{Error, Result};
use crate::hermitian::{zero_tolerance, HermitianMatrix, DEFAULT_CLAMP_FACTOR};
use crate::symmetry::{CommutativityFlag, GroupAction};

/// Gradient-norm floor per unit dimension; below this the iteration is at
/// machine precision and stops regardless of the certificate.
pub const GRAD_FLOOR_PER_DIM: f64 = 1e-13;

/// Relative slack allowed on the monotonic-descent check before the run is
/// declared numerically unstable.
pub const MONOTONICITY_SLACK: f64 = 1e-11;

/// Relative slack on the eigenvalue sandwich λ_min(R) ≤ λ(S_n) ≤ λ_max(R).
pub const SANDWICH_SLACK: f64 = 1e-9;

/// On ill-conditioned inputs the objective bottoms out at the eigensolver's
/// noise floor before the gap certificate tightens: the value is a sum of
/// square-rooted eigenvalues of matrices that inherit the conditioning of R,
/// so its reproducibility degrades roughly linearly in κ(R). An ascent of at
/// most NOISE_FACTOR·ε_mach·κ(R)·Tr R between consecutive iterates is
/// therefore treated as termination at machine precision, returning the
/// previous iterate; anything larger stays a hard error. For well-conditioned
/// inputs the allowance falls below [`MONOTONICITY_SLACK`] and every
/// violation is an error.
pub const PLATEAU_NOISE_FACTOR: f64 = 1024.0;

/// Ceiling on the plateau allowance as a fraction of Tr R, whatever κ(R) is.
pub const PLATEAU_ABS_TOL: f64 = 1e-6;

/// Instance of the projection problem: input matrix, symmetry group, and the
/// depolarization mix-in used to regularize singular inputs (0 disables it).
#[derive(Debug, Clone)]
pub struct ProjectionProblem {
    pub r: HermitianMatrix,
    pub group: GroupAction,
    pub depolarization_eps: f64,
}

impl ProjectionProblem {
    pub fn new(r: HermitianMatrix, group: GroupAction, depolarization_eps: f64) -> Result<Self> {
        if r.dim() != group.dim() {
            return Err(Error::DimensionMismatch {
                left: r.dim(),
                right: group.dim(),
            });
        }
        if !(0.0..1.0).contains(&depolarization_eps) {
            return Err(Error::InvalidEpsilon {
                eps: depolarization_eps,
            });
        }
        Ok(Self {
            r,
            group,
            depolarization_eps,
        })
    }

    /// The matrix actually iterated on: R itself, or its depolarization when
    /// eps > 0, together with the continuity penalty bound.
    pub fn working(&self) -> Result<(HermitianMatrix, f64)> {
        if self.depolarization_eps == 0.0 {
            Ok((self.r.clone(), 0.0))
        } else {
            depolarize(&self.r, self.depolarization_eps)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuMode {
    /// Certificate bracket from the a-priori bounds: α = k^{1−d}·λ_min(R)
    /// (or λ_min(R) for commuting algebras), β = λ_max(R).
    WorstCase,
    /// Certificate bracket from the eigenvalues actually observed along the
    /// run, validated against [λ_min(R), λ_max(R)] each iteration; falls back
    /// to the worst-case bracket if an iterate escapes the sandwich.
    #[default]
    AdaptiveEigTracking,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Stop once the certified optimality gap is at or below this.
    pub gap_target: f64,
    pub max_iters: usize,
    pub mu_mode: MuMode,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_target: 1e-9,
            max_iters: 10_000,
            mu_mode: MuMode::AdaptiveEigTracking,
            record_trace: true,
        }
    }
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct IterateRecord {
    pub n: usize,
    pub bures_sq: f64,
    pub grad_norm: f64,
    pub lambda_min_s: f64,
    pub lambda_max_s: f64,
    pub pl_gap_bound: f64,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub optimizer_t: HermitianMatrix,
    pub bures_sq_value: f64,
    /// Certified upper bound on bures_sq_value − (true optimum).
    pub certified_gap: f64,
    pub iterations_used: usize,
    pub converged: bool,
    pub trace: Vec<IterateRecord>,
    /// 2√ε·Tr R when the input was depolarized, else 0; bounds the distance
    /// between the solved value and the value of the original problem.
    pub continuity_penalty: f64,
    /// Whether the commuting-algebra rate constant and bracket were used.
    pub commuting: bool,
    /// Iterations whose eigenvalues escaped [λ_min(R), λ_max(R)] beyond slack.
    pub sandwich_violations: usize,
}

/// Starting point S₀ = E(R^½)², the closed-form optimum of the linearized
/// problem; group-symmetric and PD for PD working input.
pub fn initial_point(p: &ProjectionProblem) -> Result<HermitianMatrix> {
    let (r, _) = p.working()?;
    let sqrt_r = r.sqrt()?;
    let e = p.group.twirl(&sqrt_r)?;
    Ok(HermitianMatrix::symmetrized(e.matrix() * e.matrix()))
}

/// One fixed-point step K(S) = S^{-½}·(E((S^½ R S^½)^½))²·S^{-½}.
pub fn update_k(s: &HermitianMatrix, p: &ProjectionProblem) -> Result<HermitianMatrix> {
    let (r, _) = p.working()?;
    Ok(step_eval(s, &r, &p.group)?.k_next)
}

/// Twirled gradient of the squared Bures distance at S:
/// E(∇B_R(S)²) = I − S^{-½}·E((S^½ R S^½)^½)·S^{-½}. Zero exactly at the optimum.
pub fn gradient_sym(s: &HermitianMatrix, p: &ProjectionProblem) -> Result<HermitianMatrix> {
    let (r, _) = p.working()?;
    Ok(step_eval(s, &r, &p.group)?.grad)
}

/// Everything one iteration needs, sharing the two eigendecompositions
/// between the update, the gradient, and the fidelity byproduct.
struct StepEval {
    k_next: HermitianMatrix,
    grad: HermitianMatrix,
    grad_norm: f64,
    /// √F(R, S) = Tr[(S^½ R S^½)^½], read off the inner eigenvalues.
    sqrt_fidelity: f64,
    lambda_min_s: f64,
    lambda_max_s: f64,
}

fn step_eval(s: &HermitianMatrix, r: &HermitianMatrix, group: &GroupAction) -> Result<StepEval> {
    let spec_s = s.spectral()?;
    let clamp = DEFAULT_CLAMP_FACTOR * spec_s.lambda_max();
    if spec_s.lambda_min() <= clamp {
        return Err(Error::SingularMatrix {
            min_eigenvalue: spec_s.lambda_min(),
        });
    }
    let s_half = spec_s.map_eigenvalues(f64::sqrt);
    let s_inv_half = spec_s.map_eigenvalues(|l| 1.0 / l.sqrt());

    let inner = HermitianMatrix::symmetrized(s_half.matrix() * r.matrix() * s_half.matrix());
    let spec_inner = inner.spectral()?;
    let sqrt_fidelity = spec_inner
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    let inner_sqrt = spec_inner.map_eigenvalues(|l| l.max(0.0).sqrt());

    let w = group.twirl(&inner_sqrt)?;

    let a = s_inv_half.matrix() * w.matrix();
    // Exact iterates never leave the symmetric algebra (every factor below
    // commutes with the group), but rounding injects a transverse component
    // that the S^{-1/2} conjugations amplify by up to κ(S) per step. Twirling
    // the result is a no-op in exact arithmetic and removes that component.
    let k_next = group.twirl(&HermitianMatrix::symmetrized(&a * a.adjoint()))?;

    let conjugated = HermitianMatrix::symmetrized(&a * s_inv_half.matrix());
    let grad = HermitianMatrix::identity(s.dim()).sub(&conjugated)?;
    let grad_norm = grad.frobenius_norm();

    Ok(StepEval {
        k_next,
        grad,
        grad_norm,
        sqrt_fidelity,
        lambda_min_s: spec_s.lambda_min(),
        lambda_max_s: spec_s.lambda_max(),
    })
}

/// Optimality-gap certificate grad_norm²/(2μ) with μ = √α/(2β^{3/2}).
///
/// The effective α is min(alpha, lambda_min_r): the bracket must contain the
/// optimizer, which lies above λ_min(R)·I regardless of where the current
/// iterate sits.
pub fn pl_gap_bound(grad_norm: f64, alpha: f64, beta: f64, lambda_min_r: f64) -> Result<f64> {
    let alpha_eff = alpha.min(lambda_min_r);
    if alpha_eff <= 0.0 || beta < alpha_eff {
        return Err(Error::InvalidBracket { alpha, beta });
    }
    let mu = alpha_eff.sqrt() / (2.0 * beta.powf(1.5));
    Ok(grad_norm.max(0.0).powi(2) / (2.0 * mu))
}

/// Gradient norm that makes the certificate reach `gap`: g = √(2μ·gap).
pub fn grad_tol_for_gap(gap: f64, alpha: f64, beta: f64) -> f64 {
    let mu = alpha.sqrt() / (2.0 * beta.powf(1.5));
    (2.0 * mu * gap.max(0.0)).sqrt()
}

/// Convergence-rate constant from the condition number k of R: the per-step
/// contraction factor is (1 − 1/ξ) with ξ = k^{d/2+1}, improving to k^{3/2}
/// when the symmetric matrices commute.
pub fn rate_constant_xi(r: &HermitianMatrix, flag: CommutativityFlag) -> Result<f64> {
    let k = r.condition_number()?;
    let exponent = match flag {
        CommutativityFlag::CommutingSymmetricAlgebra => 1.5,
        CommutativityFlag::General => r.dim() as f64 / 2.0 + 1.0,
    };
    Ok(k.powf(exponent))
}

/// Mixes toward the maximally mixed state: R̃ = (1−ε)·R + ε·Tr R·I/d.
///
/// Returns R̃ and the continuity penalty 2√ε·Tr R bounding the change of the
/// projection value. R̃ is PD with λ_min ≥ ε·Tr R/d.
pub fn depolarize(r: &HermitianMatrix, eps: f64) -> Result<(HermitianMatrix, f64)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEpsilon { eps });
    }
    let class = r.classify()?;
    if !class.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: class.min_eigenvalue,
        });
    }
    let tr = r.trace();
    if tr <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let dim = r.dim();
    let mixed = HermitianMatrix::identity(dim).scaled(eps * tr / dim as f64);
    let tilde = r.scaled(1.0 - eps).add(&mixed)?;
    Ok((tilde, 2.0 * eps.sqrt() * tr))
}

/// Tracks the certificate bracket [α, β] across a run.
struct CertTracker {
    lambda_min_r: f64,
    lambda_max_r: f64,
    alpha_worst: f64,
    mode: MuMode,
    observed_min: f64,
    observed_max: f64,
    violations: usize,
    fallen_back: bool,
}

impl CertTracker {
    fn new(
        lambda_min_r: f64,
        lambda_max_r: f64,
        dim: usize,
        commuting: bool,
        mode: MuMode,
    ) -> Self {
        let k = lambda_max_r / lambda_min_r;
        let alpha_worst = if commuting {
            lambda_min_r
        } else {
            k.powf(1.0 - dim as f64) * lambda_min_r
        };
        Self {
            lambda_min_r,
            lambda_max_r,
            alpha_worst,
            mode,
            observed_min: lambda_min_r,
            observed_max: lambda_max_r,
            violations: 0,
            fallen_back: false,
        }
    }

    fn observe(&mut self, lambda_min_s: f64, lambda_max_s: f64) {
        self.observed_min = self.observed_min.min(lambda_min_s);
        self.observed_max = self.observed_max.max(lambda_max_s);
        let below = lambda_min_s < self.lambda_min_r * (1.0 - SANDWICH_SLACK);
        let above = lambda_max_s > self.lambda_max_r * (1.0 + SANDWICH_SLACK);
        if below || above {
            self.violations += 1;
            self.fallen_back = true;
        }
    }

    fn bracket(&self) -> (f64, f64) {
        match self.mode {
            MuMode::WorstCase => (self.alpha_worst, self.lambda_max_r),
            MuMode::AdaptiveEigTracking => {
                if self.fallen_back {
                    (self.alpha_worst.min(self.observed_min), self.observed_max)
                } else {
                    (self.observed_min, self.observed_max)
                }
            }
        }
    }
}

/// Runs the fixed-point iteration until the certified gap reaches the target.
///
/// Dispatch: PD inputs iterate directly; singular inputs either take the
/// rank-one closed form (ε = 0) or are depolarized first (ε > 0); singular
/// inputs of higher rank without ε are rejected, since silently picking a
/// regularization would hide the continuity penalty from the caller.
pub fn solve(p: &ProjectionProblem, cfg: &SolverConfig) -> Result<SolverResult> {
    if !(0.0..1.0).contains(&p.depolarization_eps) {
        return Err(Error::InvalidEpsilon {
            eps: p.depolarization_eps,
        });
    }
    let class = p.r.classify()?;
    if !class.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: class.min_eigenvalue,
        });
    }
    let (working, penalty) = if p.depolarization_eps > 0.0 {
        depolarize(&p.r, p.depolarization_eps)?
    } else if class.is_pd() {
        (p.r.clone(), 0.0)
    } else if class.rank(p.r.dim()) == 1 {
        return solve_rank_one(p);
    } else {
        return Err(Error::RankDeficientInput {
            rank: class.rank(p.r.dim()),
            dim: p.r.dim(),
        });
    };

    let spec_r = working.spectral()?;
    let lambda_min_r = spec_r.lambda_min();
    let lambda_max_r = spec_r.lambda_max();
    let tr_r = working.trace();
    let dim = working.dim();
    let commuting = p.group.commutativity() == CommutativityFlag::CommutingSymmetricAlgebra;
    let mut cert = CertTracker::new(lambda_min_r, lambda_max_r, dim, commuting, cfg.mu_mode);

    let sqrt_r = spec_r.map_eigenvalues(|l| l.max(0.0).sqrt());
    let e = p.group.twirl(&sqrt_r)?;
    let mut s = HermitianMatrix::symmetrized(e.matrix() * e.matrix());

    let kappa_r = lambda_max_r / lambda_min_r.max(f64::MIN_POSITIVE);
    let plateau_allowance =
        (PLATEAU_NOISE_FACTOR * f64::EPSILON * kappa_r).min(PLATEAU_ABS_TOL) * tr_r;

    let mut trace = Vec::new();
    let mut prev_bures = f64::INFINITY;
    // previous iterate kept for the plateau stop: (S, value, gap, n)
    let mut prev_state: Option<(HermitianMatrix, f64, f64, usize)> = None;
    let grad_floor = GRAD_FLOOR_PER_DIM * dim as f64;

    for n in 0..=cfg.max_iters {
        let eval = step_eval(&s, &working, &p.group)?;
        let bures_sq = (tr_r + s.trace() - 2.0 * eval.sqrt_fidelity).max(0.0);

        if bures_sq > prev_bures + MONOTONICITY_SLACK * tr_r {
            let increase = bures_sq - prev_bures;
            if increase <= plateau_allowance {
                let (ps, pv, pg, pn) = prev_state.expect("plateau requires a previous iterate");
                return Ok(SolverResult {
                    optimizer_t: ps,
                    bures_sq_value: pv,
                    certified_gap: pg,
                    iterations_used: pn,
                    converged: pg <= cfg.gap_target,
                    trace,
                    continuity_penalty: penalty,
                    commuting,
                    sandwich_violations: cert.violations,
                });
            }
            return Err(Error::NumericalInstability {
                iteration: n,
                increase,
            });
        }
        prev_bures = bures_sq;

        cert.observe(eval.lambda_min_s, eval.lambda_max_s);
        let (alpha, beta) = cert.bracket();
        let gap = pl_gap_bound(eval.grad_norm, alpha, beta, lambda_min_r)?;

        if cfg.record_trace {
            trace.push(IterateRecord {
                n,
                bures_sq,
                grad_norm: eval.grad_norm,
                lambda_min_s: eval.lambda_min_s,
                lambda_max_s: eval.lambda_max_s,
                pl_gap_bound: gap,
            });
        }

        let converged = gap <= cfg.gap_target || eval.grad_norm <= grad_floor;
        if converged || n == cfg.max_iters {
            return Ok(SolverResult {
                optimizer_t: s,
                bures_sq_value: bures_sq,
                certified_gap: gap,
                iterations_used: n,
                converged,
                trace,
                continuity_penalty: penalty,
                commuting,
                sandwich_violations: cert.violations,
            });
        }
        prev_state = Some((s.clone(), bures_sq, gap, n));
        s = eval.k_next;
    }
    unreachable!("loop returns at or before max_iters");
}

/// Closed form for rank-one R: the optimizer is λ_max(E(R))·vv† for a top
/// eigenvector v of E(R), with value Tr R − λ_max(E(R)).
pub fn solve_rank_one(p: &ProjectionProblem) -> Result<SolverResult> {
    let spec = p.r.spectral()?;
    let tol = zero_tolerance(spec.lambda_max());
    let rank = spec.eigenvalues.iter().filter(|&&l| l > tol).count();
    if rank != 1 || spec.lambda_min() < -tol {
        return Err(Error::NotRankOne { rank });
    }
    let twirled = p.group.twirl(&p.r)?;
    let spec_e = twirled.spectral()?;
    let lambda = spec_e.lambda_max();
    let dim = p.r.dim();
    let mut vals = vec![0.0; dim];
    vals[dim - 1] = lambda;
    let optimizer = spec_e.rebuild_with(&vals);
    Ok(SolverResult {
        optimizer_t: optimizer,
        bures_sq_value: (p.r.trace() - lambda).max(0.0),
        certified_gap: 0.0,
        iterations_used: 0,
        converged: true,
        trace: Vec::new(),
        continuity_penalty: 0.0,
        commuting: p.group.commutativity() == CommutativityFlag::CommutingSymmetricAlgebra,
        sandwich_violations: 0,
    })
}

/// Projected gradient descent over the symmetric PSD cone, used as an
/// independent baseline: step S ← Π(S − η·E(∇)), where Π clips eigenvalues at
/// the clamp floor and twirls. The step size starts at 1/L from the working
/// eigenvalue bracket, halves whenever a step would increase the objective,
/// and doubles after each accepted step; descent holds regardless of how loose
/// the smoothness estimate is, and near-singular brackets (where 1/L is
/// pessimistic by many orders of magnitude) cannot freeze progress.
pub fn pgd_baseline(p: &ProjectionProblem, tol: f64, max_iters: usize) -> Result<SolverResult> {
    let class = p.r.classify()?;
    if !class.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: class.min_eigenvalue,
        });
    }
    let (working, penalty) = if p.depolarization_eps > 0.0 {
        depolarize(&p.r, p.depolarization_eps)?
    } else if class.is_pd() {
        (p.r.clone(), 0.0)
    } else {
        return Err(Error::RankDeficientInput {
            rank: class.rank(p.r.dim()),
            dim: p.r.dim(),
        });
    };

    let spec_r = working.spectral()?;
    let lambda_min_r = spec_r.lambda_min();
    let lambda_max_r = spec_r.lambda_max();
    let tr_r = working.trace();
    let dim = working.dim();
    let commuting = p.group.commutativity() == CommutativityFlag::CommutingSymmetricAlgebra;
    let mut cert = CertTracker::new(
        lambda_min_r,
        lambda_max_r,
        dim,
        commuting,
        MuMode::AdaptiveEigTracking,
    );
    let clip_floor = DEFAULT_CLAMP_FACTOR * lambda_max_r * 10.0;

    let sqrt_r = spec_r.map_eigenvalues(|l| l.max(0.0).sqrt());
    let e = p.group.twirl(&sqrt_r)?;
    let mut s = HermitianMatrix::symmetrized(e.matrix() * e.matrix());

    let mut eval = step_eval(&s, &working, &p.group)?;
    let mut bures = (tr_r + s.trace() - 2.0 * eval.sqrt_fidelity).max(0.0);

    // Smoothness estimate mirrors the strong-convexity constant with the
    // bracket endpoints exchanged: L = √β/(2α^{3/2}), taken at the initial
    // iterate's own bracket. Backtracking enforces descent whatever the
    // guess; seeding from the input spectrum instead would freeze the method
    // on nearly singular inputs, where 1/L drops beneath the objective's
    // floating-point noise floor and every step gets rejected.
    let mut eta = {
        let (alpha, beta) = (eval.lambda_min_s, lambda_max_r.max(eval.lambda_max_s));
        2.0 * alpha.powf(1.5) / beta.sqrt()
    };

    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut converged = false;

    for n in 0..=max_iters {
        cert.observe(eval.lambda_min_s, eval.lambda_max_s);
        let (alpha, beta) = cert.bracket();
        let gap = pl_gap_bound(eval.grad_norm, alpha, beta, lambda_min_r)?;
        trace.push(IterateRecord {
            n,
            bures_sq: bures,
            grad_norm: eval.grad_norm,
            lambda_min_s: eval.lambda_min_s,
            lambda_max_s: eval.lambda_max_s,
            pl_gap_bound: gap,
        });
        iterations = n;
        if eval.grad_norm <= tol {
            converged = true;
            break;
        }
        if n == max_iters {
            break;
        }

        let mut stepped = false;
        for _ in 0..60 {
            let raw = s.matrix() - eval.grad.matrix().scale(eta);
            let candidate_spec = HermitianMatrix::symmetrized(raw).spectral()?;
            let clipped = candidate_spec.map_eigenvalues(|l| l.max(clip_floor));
            let candidate = p.group.twirl(&clipped)?;
            // A candidate whose spread outgrows the relative PD gate is not
            // evaluable; treat it like any other rejected overshoot.
            let Ok(cand_eval) = step_eval(&candidate, &working, &p.group) else {
                eta *= 0.5;
                continue;
            };
            let cand_bures = (tr_r + candidate.trace() - 2.0 * cand_eval.sqrt_fidelity).max(0.0);
            if cand_bures <= bures {
                s = candidate;
                eval = cand_eval;
                bures = cand_bures;
                stepped = true;
                eta *= 2.0;
                break;
            }
            eta *= 0.5;
        }
        if !stepped {
            // No step length yields descent: the iterate is at the numerical
            // floor of the objective.
            break;
        }
    }

    let (alpha, beta) = cert.bracket();
    let final_gap = pl_gap_bound(eval.grad_norm, alpha, beta, lambda_min_r)?;
    Ok(SolverResult {
        optimizer_t: s,
        bures_sq_value: bures,
        certified_gap: final_gap,
        iterations_used: iterations,
        converged,
        trace,
        continuity_penalty: penalty,
        commuting,
        sandwich_violations: cert.violations,
    })
}
