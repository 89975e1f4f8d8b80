//! Seeded random instance generation.

use bures_core::apps::DensityMatrix;
use bures_core::hermitian::{HermitianMatrix, C64};
use nalgebra::DMatrix;
use rand::prelude::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{CliError, Result};

/// Derives independent per-instance seeds from a suite seed (splitmix64).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn ginibre(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let normal = StandardNormal;
    DMatrix::from_fn(dim, rank, |_, _| {
        C64::new(normal.sample(rng), normal.sample(rng))
    })
}

/// G·G†/Tr(G·G†) for a seeded dim×rank complex Gaussian G; full rank when
/// rank = dim, rank-deficient otherwise.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(CliError::InvalidRank { rank, dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, rank, &mut rng);
    let w = &g * g.adjoint();
    let h = HermitianMatrix::from_raw(w).map_err(CliError::Core)?;
    DensityMatrix::normalized(h).map_err(CliError::Core)
}

/// Unit-trace PD matrix with a prescribed condition number: eigenvalues
/// interpolate geometrically from 1 down to 1/cond in a seeded random basis.
pub fn conditioned_density(dim: usize, cond: f64, seed: u64) -> Result<DensityMatrix> {
    assert!(cond >= 1.0 && dim >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, dim, &mut rng);
    let w = HermitianMatrix::from_raw(&g * g.adjoint()).map_err(CliError::Core)?;
    let basis = w.spectral().map_err(CliError::Core)?;
    let vals: Vec<f64> = (0..dim)
        .map(|i| {
            let t = if dim == 1 {
                0.0
            } else {
                i as f64 / (dim - 1) as f64
            };
            cond.powf(-t)
        })
        .collect();
    DensityMatrix::normalized(basis.rebuild_with(&vals)).map_err(CliError::Core)
}
