//! Quantum-information quantities reduced to cone projections: fidelity of
//! asymmetry and coherence, max-conditional entropy, Rényi-½ mutual
//! information, matrix barycenters, mean states, geometric entanglement of
//! maximally correlated states, twirl precompensation, and the closed-form
//! projection under the Holevo-style overlap objective.

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::solver::{self, ProjectionProblem, SolverConfig, SolverResult};
use crate::symmetry::{self, GroupAction};

/// Tolerance on |Tr ρ − 1| for density matrices.
pub const UNIT_TRACE_TOL: f64 = 1e-10;

/// Tolerance on |Σω − 1| for ensemble weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Absolute tolerance on probability mass outside the maximally correlated
/// subspace span{|j,j⟩}.
pub const MC_SUBSPACE_TOL: f64 = 1e-10;

/// Unit-trace PSD matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    inner: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(inner: HermitianMatrix) -> Result<Self> {
        let class = inner.classify()?;
        if !class.is_psd() {
            return Err(Error::NotPsd {
                min_eigenvalue: class.min_eigenvalue,
            });
        }
        let trace = inner.trace();
        if (trace - 1.0).abs() > UNIT_TRACE_TOL {
            return Err(Error::NotUnitTrace {
                trace,
                tol: UNIT_TRACE_TOL,
            });
        }
        Ok(Self { inner })
    }

    /// Rescales a PSD matrix with positive trace to unit trace.
    pub fn normalized(h: HermitianMatrix) -> Result<Self> {
        let trace = h.trace();
        if trace <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        Self::new(h.scaled(1.0 / trace))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn into_inner(self) -> HermitianMatrix {
        self.inner
    }
}

/// Probability-weighted list of PSD matrices of a common dimension.
#[derive(Debug, Clone)]
pub struct WeightedEnsemble {
    weights: Vec<f64>,
    matrices: Vec<HermitianMatrix>,
}

impl WeightedEnsemble {
    pub fn new(weights: Vec<f64>, matrices: Vec<HermitianMatrix>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if weights.len() != matrices.len() {
            return Err(Error::DimensionMismatch {
                left: weights.len(),
                right: matrices.len(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights { sum });
        }
        let dim = matrices[0].dim();
        for m in &matrices {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: m.dim(),
                });
            }
            let class = m.classify()?;
            if !class.is_psd() {
                return Err(Error::NotPsd {
                    min_eigenvalue: class.min_eigenvalue,
                });
            }
        }
        Ok(Self { weights, matrices })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }
}

/// Best symmetric approximation of a state in fidelity.
#[derive(Debug, Clone)]
pub struct SymmetricApproximation {
    /// max_σ F(ρ, σ) over unit-trace symmetric σ; in [1/d, 1].
    pub fidelity: f64,
    pub sigma: DensityMatrix,
    pub solver: SolverResult,
}

/// max_{σ∈S_G} F(ρ, σ): the cone optimizer T gives the value as Tr T and the
/// maximizing state as T/Tr T.
pub fn fidelity_of_asymmetry(
    rho: &DensityMatrix,
    group: GroupAction,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<SymmetricApproximation> {
    let p = ProjectionProblem::new(rho.matrix().clone(), group, eps)?;
    let solver = solver::solve(&p, cfg)?;
    let fidelity = solver.optimizer_t.trace().clamp(0.0, 1.0);
    let sigma = DensityMatrix::normalized(solver.optimizer_t.clone())?;
    Ok(SymmetricApproximation {
        fidelity,
        sigma,
        solver,
    })
}

/// Fidelity of coherence: asymmetry under the cyclic dephasing group, so the
/// best approximation is diagonal.
pub fn fidelity_of_coherence(
    rho: &DensityMatrix,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<SymmetricApproximation> {
    fidelity_of_asymmetry(rho, GroupAction::dephasing(rho.dim()), eps, cfg)
}

#[derive(Debug, Clone)]
pub struct ConditionalHmax {
    /// H_max(A|B) = log₂ max_{σ_B} F(ρ_AB, I_A ⊗ σ_B).
    pub hmax_bits: f64,
    /// The maximum fidelity itself (linear scale).
    pub max_fidelity: f64,
    /// Factor converting the unit-normalized cone optimum to the I_A ⊗ σ_B
    /// normalization: max F = dim_a · Tr T.
    pub conversion_dim_a: usize,
    pub sigma_b: DensityMatrix,
    pub solver: SolverResult,
}

/// Max-conditional entropy via projection onto the one-design cone
/// {c·π_A ⊗ σ_B}: I_A ⊗ σ_B = d_A·(π_A ⊗ σ_B), so the optimum over the cone
/// already ranges over every scaling and max F = d_A · Tr T.
pub fn h_max_conditional(
    rho_ab: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<ConditionalHmax> {
    if rho_ab.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            left: rho_ab.dim(),
            right: dim_a * dim_b,
        });
    }
    let p = ProjectionProblem::new(
        rho_ab.matrix().clone(),
        GroupAction::one_design_on_a(dim_a, dim_b),
        eps,
    )?;
    let solver = solver::solve(&p, cfg)?;
    let max_fidelity = dim_a as f64 * solver.optimizer_t.trace();
    let sigma_b = DensityMatrix::normalized(symmetry::partial_trace_a(
        &solver.optimizer_t,
        dim_a,
        dim_b,
    )?)?;
    Ok(ConditionalHmax {
        hmax_bits: max_fidelity.log2(),
        max_fidelity,
        conversion_dim_a: dim_a,
        sigma_b,
        solver,
    })
}

#[derive(Debug, Clone)]
pub struct RenyiHalfMutualInfo {
    /// I_max(A:B) = log₂ max_{σ_B} F(ρ_AB, ρ_A ⊗ σ_B).
    pub imax_bits: f64,
    pub max_fidelity: f64,
    pub solver: SolverResult,
}

/// Rényi-½ mutual information. F(ρ_AB, ρ_A ⊗ σ_B) equals
/// F((ρ_A ⊗ I)^½ ρ_AB (ρ_A ⊗ I)^½, I_A ⊗ σ_B) for every σ_B, so the problem
/// reduces to a max-conditional-entropy instance on the transformed matrix.
pub fn i_max_renyi_half(
    rho_ab: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<RenyiHalfMutualInfo> {
    if rho_ab.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            left: rho_ab.dim(),
            right: dim_a * dim_b,
        });
    }
    let rho_a = symmetry::partial_trace_b(rho_ab.matrix(), dim_a, dim_b)?;
    let factor = symmetry::kron_hermitian(&rho_a.sqrt()?, &HermitianMatrix::identity(dim_b));
    let r_prime =
        HermitianMatrix::symmetrized(factor.matrix() * rho_ab.matrix().matrix() * factor.matrix());
    let p = ProjectionProblem::new(r_prime, GroupAction::one_design_on_a(dim_a, dim_b), eps)?;
    let solver = solver::solve(&p, cfg)?;
    let max_fidelity = dim_a as f64 * solver.optimizer_t.trace();
    Ok(RenyiHalfMutualInfo {
        imax_bits: max_fidelity.log2(),
        max_fidelity,
        solver,
    })
}

#[derive(Debug, Clone)]
pub struct BarycenterResult {
    /// argmin_X Σ_j ω_j·B(X, A_j)².
    pub barycenter: HermitianMatrix,
    pub solver: SolverResult,
}

/// Weighted Bures barycenter via the block-diagonal embedding
/// R = Σ_j m·ω_j²·E^{jj} ⊗ A_j with the one-design group on the label
/// register: the cone optimizer is π_m ⊗ X and its B-marginal X is the
/// barycenter (Σ_j ω_j·B(X̃, A_j)² differs from the embedded objective only by
/// a constant, checked term-by-term through the trace-norm factorization).
pub fn matrix_barycenter(
    ens: &WeightedEnsemble,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<BarycenterResult> {
    let m = ens.len();
    let dim = ens.dim();
    let mut r = nalgebra::DMatrix::zeros(m * dim, m * dim);
    for (j, (w, a)) in ens.weights().iter().zip(ens.matrices()).enumerate() {
        let c = m as f64 * w * w;
        for x in 0..dim {
            for y in 0..dim {
                r[(j * dim + x, j * dim + y)] = a.matrix()[(x, y)].scale(c);
            }
        }
    }
    let r = HermitianMatrix::symmetrized(r);
    let p = ProjectionProblem::new(r, GroupAction::one_design_on_a(m, dim), eps)?;
    let solver = solver::solve(&p, cfg)?;
    let barycenter = symmetry::partial_trace_a(&solver.optimizer_t, m, dim)?;
    Ok(BarycenterResult { barycenter, solver })
}

#[derive(Debug, Clone)]
pub struct MeanStateResult {
    /// argmax_σ Σ_i p_i·√F(ρ_i, σ) over density matrices.
    pub state: DensityMatrix,
    pub solver: SolverResult,
}

/// Quantum mean state: the normalized direction of the barycenter attains the
/// mean-state optimum (the barycenter objective in the scale t·σ separates
/// into an optimal t = (Σp√F)² and the σ maximizing Σp√F).
pub fn quantum_mean_state(
    ens: &WeightedEnsemble,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<MeanStateResult> {
    for rho in ens.matrices() {
        let trace = rho.trace();
        if (trace - 1.0).abs() > UNIT_TRACE_TOL {
            return Err(Error::NotUnitTrace {
                trace,
                tol: UNIT_TRACE_TOL,
            });
        }
    }
    let bary = matrix_barycenter(ens, eps, cfg)?;
    Ok(MeanStateResult {
        state: DensityMatrix::normalized(bary.barycenter)?,
        solver: bary.solver,
    })
}

#[derive(Debug, Clone)]
pub struct GeometricEntanglement {
    /// E_G = 1 − max_{σ_B} F(ρ_AB, I_A ⊗ σ_B); in [0, 1 − 1/d].
    pub value: f64,
    pub max_fidelity: f64,
    pub solver: SolverResult,
}

/// Geometric entanglement of a maximally correlated state
/// ρ = Σ_{jk} ρ_{jk}|j,j⟩⟨k,k| on a d×d bipartition.
pub fn geometric_entanglement_mc(
    rho_mc: &DensityMatrix,
    dim: usize,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<GeometricEntanglement> {
    if rho_mc.dim() != dim * dim {
        return Err(Error::DimensionMismatch {
            left: rho_mc.dim(),
            right: dim * dim,
        });
    }
    let diagonal_mass: f64 = (0..dim)
        .map(|j| rho_mc.matrix().entry(j * dim + j, j * dim + j).re)
        .sum();
    let outside = (1.0 - diagonal_mass).abs();
    if outside > MC_SUBSPACE_TOL {
        return Err(Error::NotMaximallyCorrelated { mass: outside });
    }
    let hmax = h_max_conditional(rho_mc, dim, dim, eps, cfg)?;
    Ok(GeometricEntanglement {
        value: (1.0 - hmax.max_fidelity).clamp(0.0, 1.0),
        max_fidelity: hmax.max_fidelity,
        solver: hmax.solver,
    })
}

#[derive(Debug, Clone)]
pub struct Precompensation {
    /// Input state whose twirl best matches the target.
    pub rho_in: DensityMatrix,
    pub achieved_fidelity: f64,
    pub solver: SolverResult,
}

/// Best input to a twirling channel for a given target output: the twirl's
/// range is exactly the symmetric set, so the best achievable output is the
/// best symmetric approximation σ* of the target, and feeding σ* (a fixed
/// point of the channel) attains it.
pub fn error_precompensation_twirl(
    target: &DensityMatrix,
    group: GroupAction,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<Precompensation> {
    let approx = fidelity_of_asymmetry(target, group, eps, cfg)?;
    Ok(Precompensation {
        rho_in: approx.sigma,
        achieved_fidelity: approx.fidelity,
        solver: approx.solver,
    })
}

#[derive(Debug, Clone)]
pub struct PetzProjection {
    pub optimizer: HermitianMatrix,
    /// Value of Tr R + Tr S − 2·Tr(R^½ S^½) at the optimizer.
    pub value: f64,
    /// True when [R, E(R^½)] = 0 within tolerance, in which case this
    /// optimizer also solves the Bures projection.
    pub solves_bures_too: bool,
}

/// Closed-form projection under the overlap objective
/// (Tr R + Tr S − 2·Tr(R^½S^½))^½: the optimizer is E(R^½)².
pub fn petz_half_projection(r: &HermitianMatrix, group: &GroupAction) -> Result<PetzProjection> {
    let class = r.classify()?;
    if !class.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: class.min_eigenvalue,
        });
    }
    let sqrt_r = r.sqrt()?;
    let e = group.twirl(&sqrt_r)?;
    let optimizer = HermitianMatrix::symmetrized(e.matrix() * e.matrix());
    let cross = (sqrt_r.matrix() * e.matrix()).trace().re;
    let value = (r.trace() + optimizer.trace() - 2.0 * cross).max(0.0);
    let commutator = (r.matrix() * e.matrix() - e.matrix() * r.matrix()).norm();
    let solves_bures_too = commutator <= 1e-10 * r.frobenius_norm() * e.frobenius_norm().max(1.0);
    Ok(PetzProjection {
        optimizer,
        value,
        solves_bures_too,
    })
}
