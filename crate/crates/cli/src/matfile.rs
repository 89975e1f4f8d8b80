//! On-disk matrix format: a JSON document with explicit [re, im] entry pairs.
//!
//! Serialization uses the shortest decimal representation that round-trips
//! each float, so save → load reproduces every entry bit-exactly.

use std::collections::BTreeMap;
use std::path::Path;

use bures_core::hermitian::{HermitianMatrix, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Loads reject inputs whose skew-Hermitian part exceeds this fraction of the
/// matrix norm; anything smaller is symmetrized away.
pub const HERMITICITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub schema_version: u64,
    pub dim: usize,
    /// Row-major dim×dim grid of [re, im] pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &HermitianMatrix, metadata: BTreeMap<String, String>) -> Self {
        let dim = m.dim();
        let entries = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let e = m.entry(i, j);
                        [e.re, e.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            dim,
            entries,
            metadata,
        }
    }

    fn raw(&self, path: &str) -> Result<DMatrix<C64>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::SchemaVersion {
                path: path.to_string(),
                found: self.schema_version,
            });
        }
        if self.dim == 0 {
            return Err(CliError::Parse {
                path: path.to_string(),
                message: "dimension 0".to_string(),
            });
        }
        if self.entries.len() != self.dim {
            return Err(CliError::Shape {
                path: path.to_string(),
                declared: self.dim,
                found: self.entries.len(),
            });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, row) in self.entries.iter().enumerate() {
            if row.len() != self.dim {
                return Err(CliError::Shape {
                    path: path.to_string(),
                    declared: self.dim,
                    found: row.len(),
                });
            }
            for (j, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::NonFinite {
                        path: path.to_string(),
                        row: i,
                        col: j,
                    });
                }
                m[(i, j)] = C64::new(re, im);
            }
        }
        Ok(m)
    }

    /// Validates and symmetrizes into a Hermitian matrix.
    pub fn to_matrix(&self, path: &str) -> Result<HermitianMatrix> {
        let raw = self.raw(path)?;
        let (h, skew) = HermitianMatrix::from_raw_with_diagnostic(raw).map_err(CliError::Core)?;
        let tol = HERMITICITY_TOL * h.frobenius_norm().max(f64::MIN_POSITIVE);
        if skew > tol {
            return Err(CliError::HermiticityViolation {
                path: path.to_string(),
                skew,
                tol,
            });
        }
        Ok(h)
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_matrix(path: &Path) -> Result<HermitianMatrix> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: name.clone(),
        message: e.to_string(),
    })?;
    file.to_matrix(&name)
}

pub fn save_matrix(
    path: &Path,
    m: &HermitianMatrix,
    metadata: BTreeMap<String, String>,
) -> Result<()> {
    let file = MatrixFile::from_matrix(m, metadata);
    let text = serde_json::to_string_pretty(&file).expect("matrix file serializes");
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A list of unitaries generating an explicit symmetry group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryListFile {
    pub schema_version: u64,
    pub dim: usize,
    /// Each element is a row-major dim×dim grid of [re, im] pairs.
    pub unitaries: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn load_unitaries(path: &Path) -> Result<Vec<DMatrix<C64>>> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    let file: UnitaryListFile = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: name.clone(),
        message: e.to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::SchemaVersion {
            path: name,
            found: file.schema_version,
        });
    }
    file.unitaries
        .iter()
        .enumerate()
        .map(|(k, grid)| {
            if grid.len() != file.dim || grid.iter().any(|row| row.len() != file.dim) {
                return Err(CliError::Shape {
                    path: format!("{name} (unitary {k})"),
                    declared: file.dim,
                    found: grid.len(),
                });
            }
            Ok(DMatrix::from_fn(file.dim, file.dim, |i, j| {
                C64::new(grid[i][j][0], grid[i][j][1])
            }))
        })
        .collect()
}
