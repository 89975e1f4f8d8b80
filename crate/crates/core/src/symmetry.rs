//! Group actions and the twirling channel E(S) = (1/|G|)·Σ_g U_g S U_g†.
//!
//! Structured actions (dephasing, one-design on a subsystem) get exact fast
//! paths; arbitrary finite groups are supplied as explicit unitary lists.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};

/// Largest accepted explicit unitary list; bigger groups must come in
/// structured form since twirl cost is linear in the group size.
pub const EXPLICIT_GROUP_CAP: usize = 4096;

/// Max-entry deviation of U†U from I tolerated for explicit unitaries.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Relative commutator tolerance for the commutativity probe.
pub const COMMUTATIVITY_PROBE_TOL: f64 = 1e-8;

const COMMUTATIVITY_PROBES: usize = 8;
const COMMUTATIVITY_PROBE_SEED: u64 = 0x00c0_abcd_1234_5678;

/// Finite symmetry group acting by conjugation. Global phases cancel in
/// U S U†, so projective representations need no cocycle bookkeeping.
#[derive(Debug, Clone)]
pub enum GroupAction {
    /// Validated list of same-dimension unitaries.
    Explicit { unitaries: Vec<DMatrix<C64>> },
    /// Cyclic phase-shift group Z(z) = Σ_j e^{2πi jz/d}|j⟩⟨j|; twirl keeps the diagonal.
    Dephasing { dim: usize },
    /// Unitary one-design on subsystem A; twirl gives π_A ⊗ Tr_A(S).
    OneDesignOnA { dim_a: usize, dim_b: usize },
}

/// Whether the symmetric matrices under this action all commute with each
/// other; selects the convergence-rate constant reported by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutativityFlag {
    CommutingSymmetricAlgebra,
    General,
}

impl GroupAction {
    /// Validates and wraps an explicit unitary list.
    pub fn explicit(unitaries: Vec<DMatrix<C64>>) -> Result<Self> {
        if unitaries.is_empty() {
            return Err(Error::EmptyGroup);
        }
        if unitaries.len() > EXPLICIT_GROUP_CAP {
            return Err(Error::GroupTooLarge {
                len: unitaries.len(),
                cap: EXPLICIT_GROUP_CAP,
            });
        }
        let dim = unitaries[0].nrows();
        for (index, u) in unitaries.iter().enumerate() {
            if u.nrows() != u.ncols() {
                return Err(Error::NonSquareInput {
                    rows: u.nrows(),
                    cols: u.ncols(),
                });
            }
            if u.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: u.nrows(),
                });
            }
            let gram = u.adjoint() * u;
            let mut deviation: f64 = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let expect = if i == j {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                    deviation = deviation.max((gram[(i, j)] - expect).norm());
                }
            }
            if deviation > UNITARITY_TOL {
                return Err(Error::NotUnitary { index, deviation });
            }
        }
        Ok(GroupAction::Explicit { unitaries })
    }

    pub fn dephasing(dim: usize) -> Self {
        GroupAction::Dephasing { dim }
    }

    pub fn one_design_on_a(dim_a: usize, dim_b: usize) -> Self {
        GroupAction::OneDesignOnA { dim_a, dim_b }
    }

    /// Dimension of the space the group acts on.
    pub fn dim(&self) -> usize {
        match self {
            GroupAction::Explicit { unitaries } => unitaries[0].nrows(),
            GroupAction::Dephasing { dim } => *dim,
            GroupAction::OneDesignOnA { dim_a, dim_b } => dim_a * dim_b,
        }
    }

    /// Group twirl E(S). Unital, trace-preserving, positivity-preserving and
    /// idempotent; the structured kinds evaluate their closed forms directly.
    pub fn twirl(&self, s: &HermitianMatrix) -> Result<HermitianMatrix> {
        if s.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: s.dim(),
            });
        }
        match self {
            GroupAction::Explicit { unitaries } => {
                let dim = s.dim();
                let mut acc: DMatrix<C64> = DMatrix::zeros(dim, dim);
                for u in unitaries {
                    acc += u * s.matrix() * u.adjoint();
                }
                Ok(HermitianMatrix::symmetrized(
                    acc.unscale(unitaries.len() as f64),
                ))
            }
            GroupAction::Dephasing { dim } => {
                let diag: Vec<f64> = (0..*dim).map(|i| s.entry(i, i).re).collect();
                Ok(HermitianMatrix::from_diagonal(&diag))
            }
            GroupAction::OneDesignOnA { dim_a, dim_b } => {
                let reduced = partial_trace_a(s, *dim_a, *dim_b)?;
                let pi_a = HermitianMatrix::identity(*dim_a).scaled(1.0 / *dim_a as f64);
                Ok(kron_hermitian(&pi_a, &reduced))
            }
        }
    }

    /// Whether S is invariant under the action: ‖E(S) − S‖ ≤ tol·max(1, ‖S‖).
    pub fn is_symmetric(&self, s: &HermitianMatrix, tol: f64) -> Result<bool> {
        let twirled = self.twirl(s)?;
        let drift = (twirled.matrix() - s.matrix()).norm();
        Ok(drift <= tol * s.frobenius_norm().max(1.0))
    }

    /// Classifies whether the symmetric algebra is commutative.
    ///
    /// Structured kinds are known in closed form. Explicit lists are probed:
    /// eight seeded pseudorandom Hermitian matrices are twirled and every pair
    /// of outputs must commute within 1e-8 of the product of their norms. A
    /// false `General` only weakens the reported convergence rate, never
    /// correctness, so the probe errs toward `General`.
    pub fn commutativity(&self) -> CommutativityFlag {
        match self {
            GroupAction::Dephasing { .. } => CommutativityFlag::CommutingSymmetricAlgebra,
            GroupAction::OneDesignOnA { .. } => CommutativityFlag::General,
            GroupAction::Explicit { .. } => {
                let dim = self.dim();
                if dim == 1 {
                    return CommutativityFlag::CommutingSymmetricAlgebra;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(COMMUTATIVITY_PROBE_SEED);
                let probes: Vec<HermitianMatrix> = (0..COMMUTATIVITY_PROBES)
                    .map(|_| {
                        let raw = DMatrix::from_fn(dim, dim, |_, _| {
                            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                        });
                        self.twirl(&HermitianMatrix::symmetrized(raw))
                            .expect("probe has matching dimension")
                    })
                    .collect();
                for i in 0..probes.len() {
                    for j in (i + 1)..probes.len() {
                        let a = probes[i].matrix();
                        let b = probes[j].matrix();
                        let commutator = (a * b - b * a).norm();
                        let scale = probes[i].frobenius_norm() * probes[j].frobenius_norm();
                        if commutator > COMMUTATIVITY_PROBE_TOL * scale {
                            return CommutativityFlag::General;
                        }
                    }
                }
                CommutativityFlag::CommutingSymmetricAlgebra
            }
        }
    }
}

/// Kronecker product of Hermitian matrices; Hermitian by algebra.
pub fn kron_hermitian(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix::symmetrized(a.matrix().kronecker(b.matrix()))
}

/// Partial trace over the first tensor factor. Composite index is a·dim_b + b.
pub fn partial_trace_a(s: &HermitianMatrix, dim_a: usize, dim_b: usize) -> Result<HermitianMatrix> {
    check_product_dim(s, dim_a, dim_b)?;
    let mut out: DMatrix<C64> = DMatrix::zeros(dim_b, dim_b);
    for a in 0..dim_a {
        for b1 in 0..dim_b {
            for b2 in 0..dim_b {
                out[(b1, b2)] += s.entry(a * dim_b + b1, a * dim_b + b2);
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(out))
}

/// Partial trace over the second tensor factor.
pub fn partial_trace_b(s: &HermitianMatrix, dim_a: usize, dim_b: usize) -> Result<HermitianMatrix> {
    check_product_dim(s, dim_a, dim_b)?;
    let mut out: DMatrix<C64> = DMatrix::zeros(dim_a, dim_a);
    for b in 0..dim_b {
        for a1 in 0..dim_a {
            for a2 in 0..dim_a {
                out[(a1, a2)] += s.entry(a1 * dim_b + b, a2 * dim_b + b);
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(out))
}

fn check_product_dim(s: &HermitianMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if s.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: dim_a * dim_b,
        });
    }
    Ok(())
}

/// The d cyclic phase-shift unitaries Z(z) = Σ_j e^{2πi jz/d}|j⟩⟨j|.
pub fn dephasing_unitaries(dim: usize) -> Vec<DMatrix<C64>> {
    (0..dim)
        .map(|z| {
            DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    let phase = 2.0 * std::f64::consts::PI * (i * z) as f64 / dim as f64;
                    C64::new(phase.cos(), phase.sin())
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect()
}

/// The d² Heisenberg–Weyl unitaries X^a Z^b (a projective one-design).
pub fn weyl_unitaries(dim: usize) -> Vec<DMatrix<C64>> {
    let shift = DMatrix::from_fn(dim, dim, |i, j| {
        if i == (j + 1) % dim {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let phases = dephasing_unitaries(dim);
    let mut out = Vec::with_capacity(dim * dim);
    let mut xa = DMatrix::identity(dim, dim);
    for _ in 0..dim {
        for z in &phases {
            out.push(&xa * z);
        }
        xa = &shift * xa;
    }
    out
}
