//! Dense Hermitian linear algebra: validated construction, eigendecompositions,
//! matrix functions via functional calculus, fidelity and Bures distance.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// An eigenvalue counts as zero when |λ| ≤ `CLASSIFICATION_TOL`·max(1, λ_max).
pub const CLASSIFICATION_TOL: f64 = 1e-12;

/// Default clamp floor for fractional/negative matrix powers, as a fraction of λ_max.
pub const DEFAULT_CLAMP_FACTOR: f64 = 1e-12;

/// Scale-relative zero tolerance used for PSD classification and singularity checks.
pub fn zero_tolerance(lambda_max: f64) -> f64 {
    CLASSIFICATION_TOL * lambda_max.max(1.0)
}

/// Dense complex square matrix kept exactly Hermitian by construction.
///
/// Every constructor symmetrizes its input to (A + A†)/2, and every operation
/// that returns a matrix re-symmetrizes, so Hermiticity cannot drift across
/// long iteration chains.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Symmetrizes a raw square complex matrix to (A + A†)/2.
    pub fn from_raw(raw: DMatrix<C64>) -> Result<Self> {
        Self::from_raw_with_diagnostic(raw).map(|(h, _)| h)
    }

    /// Like [`from_raw`](Self::from_raw) but also reports the Frobenius norm of
    /// the discarded skew part (A − A†)/2.
    pub fn from_raw_with_diagnostic(raw: DMatrix<C64>) -> Result<(Self, f64)> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::NonSquareInput {
                rows: raw.nrows(),
                cols: raw.ncols(),
            });
        }
        if raw.nrows() == 0 {
            return Err(Error::NonSquareInput { rows: 0, cols: 0 });
        }
        let adjoint = raw.adjoint();
        let herm = (&raw + &adjoint).scale(0.5);
        let skew = (&raw - &adjoint).scale(0.5);
        Ok((Self { data: herm }, skew.norm()))
    }

    /// Wraps a square matrix that is Hermitian up to roundoff, symmetrizing it.
    /// Fast path for products of the form A·B·A† that are Hermitian by algebra.
    /// Panics on non-square input; use [`from_raw`](Self::from_raw) for checked
    /// construction.
    pub fn symmetrized(m: DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrized needs a square matrix");
        let adjoint = m.adjoint();
        Self {
            data: (m + adjoint).scale(0.5),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        Self {
            data: DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    C64::new(diag[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// Builds the Hermitian part of the matrix with entries `f(i, j)`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        Self::from_raw(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    /// Trace; real because the matrix is Hermitian.
    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.scale(c),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            data: &self.data - &other.data,
        })
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Full Hermitian eigendecomposition with eigenvalues sorted ascending.
    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        let eig = self
            .data
            .clone()
            .try_symmetric_eigen(f64::EPSILON, 100_000)
            .ok_or(Error::EigSolverFailure { dim: self.dim() })?;
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .expect("eigenvalues of a Hermitian matrix are finite")
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = DMatrix::zeros(dim, dim);
        for (dst, &src) in order.iter().enumerate() {
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Matrix power via functional calculus: V·diag(λ_i^p)·V†.
    ///
    /// For fractional or negative `p`, eigenvalues in [−clamp, 0) are raised to
    /// the clamp floor first; anything below −clamp is rejected, and for p < 0
    /// anything at or below the floor is rejected as singular.
    pub fn power(&self, p: f64, clamp: f64) -> Result<Self> {
        let spec = self.spectral()?;
        let nonneg_integer = p >= 0.0 && p.fract() == 0.0;
        if nonneg_integer {
            let k = p as i32;
            return Ok(spec.map_eigenvalues(|l| l.powi(k)));
        }
        let mut vals = spec.eigenvalues.clone();
        for v in &mut vals {
            if *v < -clamp {
                return Err(Error::NegativeEigenvalue { value: *v, clamp });
            }
            if *v < 0.0 {
                *v = clamp;
            }
        }
        if p < 0.0 {
            if let Some(&min) = vals.first() {
                if min <= clamp {
                    return Err(Error::SingularMatrix {
                        min_eigenvalue: min,
                    });
                }
            }
        }
        let powered: Vec<f64> = vals.iter().map(|l| l.powf(p)).collect();
        Ok(spec.rebuild_with(&powered))
    }

    /// Square root with the default scale-relative clamp floor.
    pub fn sqrt(&self) -> Result<Self> {
        let spec = self.spectral()?;
        let clamp = DEFAULT_CLAMP_FACTOR * spec.lambda_max().max(0.0);
        let mut vals = spec.eigenvalues.clone();
        for v in &mut vals {
            if *v < -zero_tolerance(spec.lambda_max()) {
                return Err(Error::NegativeEigenvalue { value: *v, clamp });
            }
            *v = v.max(0.0).sqrt();
        }
        Ok(spec.rebuild_with(&vals))
    }

    /// PSD classification with the scale-relative zero tolerance.
    pub fn classify(&self) -> Result<PsdClass> {
        let spec = self.spectral()?;
        let min = spec.lambda_min();
        let max = spec.lambda_max();
        let tol = zero_tolerance(max);
        let tag = if min > tol {
            PsdTag::PositiveDefinite
        } else if min >= -tol {
            let rank = spec.eigenvalues.iter().filter(|&&l| l > tol).count();
            PsdTag::PositiveSemidefinite { rank }
        } else {
            PsdTag::Indefinite
        };
        Ok(PsdClass {
            tag,
            min_eigenvalue: min,
            max_eigenvalue: max,
        })
    }

    /// λ_max/λ_min of a positive definite matrix.
    pub fn condition_number(&self) -> Result<f64> {
        let spec = self.spectral()?;
        let min = spec.lambda_min();
        if min <= zero_tolerance(spec.lambda_max()) {
            return Err(Error::SingularMatrix {
                min_eigenvalue: min,
            });
        }
        Ok(spec.lambda_max() / min)
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending, columns of
/// `eigenvectors` the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// V·diag(f(λ_i))·V†, re-symmetrized.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.rebuild_with(&mapped)
    }

    /// V·diag(vals)·V†, re-symmetrized.
    pub fn rebuild_with(&self, vals: &[f64]) -> HermitianMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &v) in vals.iter().enumerate() {
            let mut col = scaled.column_mut(j);
            col *= C64::new(v, 0.0);
        }
        let m = &scaled * self.eigenvectors.adjoint();
        HermitianMatrix::symmetrized(m)
    }

    /// V·diag(λ)·V† back from the stored factors.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let vals = self.eigenvalues.clone();
        self.rebuild_with(&vals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsdTag {
    PositiveDefinite,
    PositiveSemidefinite { rank: usize },
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdClass {
    pub tag: PsdTag,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl PsdClass {
    pub fn is_psd(&self) -> bool {
        !matches!(self.tag, PsdTag::Indefinite)
    }

    pub fn is_pd(&self) -> bool {
        matches!(self.tag, PsdTag::PositiveDefinite)
    }

    /// Numerical rank under the classification tolerance.
    pub fn rank(&self, dim: usize) -> usize {
        match self.tag {
            PsdTag::PositiveDefinite => dim,
            PsdTag::PositiveSemidefinite { rank } => rank,
            PsdTag::Indefinite => dim,
        }
    }
}

fn require_psd(h: &HermitianMatrix) -> Result<()> {
    let class = h.classify()?;
    if !class.is_psd() {
        return Err(Error::NotPsd {
            min_eigenvalue: class.min_eigenvalue,
        });
    }
    Ok(())
}

/// Uhlmann fidelity F(R, S) = (Tr[(R^½ S R^½)^½])² between PSD matrices.
///
/// Eigenvalues of the inner product R^½SR^½ are clamped at zero before the
/// square root; roundoff routinely puts them at −1e-15.
pub fn fidelity(r: &HermitianMatrix, s: &HermitianMatrix) -> Result<f64> {
    if r.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: r.dim(),
            right: s.dim(),
        });
    }
    require_psd(r)?;
    require_psd(s)?;
    Ok(fidelity_sqrt_unchecked(r, s)?.powi(2))
}

/// √F without PSD validation; shared by the solver hot path.
pub(crate) fn fidelity_sqrt_unchecked(r: &HermitianMatrix, s: &HermitianMatrix) -> Result<f64> {
    let sqrt_r = r.sqrt()?;
    let inner = HermitianMatrix::symmetrized(sqrt_r.matrix() * s.matrix() * sqrt_r.matrix());
    let spec = inner.spectral()?;
    Ok(spec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// Squared Bures distance B(R, S)² = Tr R + Tr S − 2√F(R, S), floored at 0.
pub fn bures_sq(r: &HermitianMatrix, s: &HermitianMatrix) -> Result<f64> {
    if r.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            left: r.dim(),
            right: s.dim(),
        });
    }
    require_psd(r)?;
    require_psd(s)?;
    let value = r.trace() + s.trace() - 2.0 * fidelity_sqrt_unchecked(r, s)?;
    Ok(value.max(0.0))
}
