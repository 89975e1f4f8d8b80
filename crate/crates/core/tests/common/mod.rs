//! Shared helpers for the integration suites: seeded random inputs and
//! independent oracles (trace-norm fidelity, grid/simplex optimizers) that
//! deliberately avoid the code paths under test.

#![allow(dead_code)]

use bures_core::hermitian::{HermitianMatrix, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn ginibre(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = ginibre(dim, rng);
    HermitianMatrix::from_raw((&g + g.adjoint()).scale(0.5)).unwrap()
}

/// Full-rank Wishart sample G·G†, PD almost surely.
pub fn random_psd(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = ginibre(dim, rng);
    HermitianMatrix::from_raw(&g * g.adjoint()).unwrap()
}

/// Wishart sample with a floor keeping the condition number moderate.
pub fn random_pd(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let w = random_psd(dim, rng);
    let floor = HermitianMatrix::identity(dim).scaled(0.05 * w.trace() / dim as f64);
    w.add(&floor).unwrap()
}

/// Unit-trace full-rank state.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let w = random_psd(dim, rng);
    w.scaled(1.0 / w.trace())
}

pub fn random_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= C64::new(norm, 0.0);
    }
    v
}

pub fn outer(v: &[C64]) -> HermitianMatrix {
    let dim = v.len();
    HermitianMatrix::from_raw(DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj())).unwrap()
}

pub fn random_pure_density(dim: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    outer(&random_unit_vector(dim, rng))
}

/// Sum of singular values.
pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// √F(R, S) = ‖R^½·S^½‖₁ computed through the singular-value route, which
/// never forms the product R^½SR^½ used by the library.
pub fn sqrt_fidelity_oracle(r: &HermitianMatrix, s: &HermitianMatrix) -> f64 {
    let prod = r.sqrt().unwrap().matrix() * s.sqrt().unwrap().matrix();
    trace_norm(&prod)
}

pub fn bures_sq_oracle(r: &HermitianMatrix, s: &HermitianMatrix) -> f64 {
    (r.trace() + s.trace() - 2.0 * sqrt_fidelity_oracle(r, s)).max(0.0)
}

/// Swap unitary on a d·d bipartite space: |a,b⟩ ↦ |b,a⟩.
pub fn swap_unitary(d: usize) -> DMatrix<C64> {
    let mut u = DMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            u[(b * d + a, a * d + b)] = C64::new(1.0, 0.0);
        }
    }
    u
}

/// Qubit state from a Bloch vector (|r| ≤ 1): (I + r·σ⃗)/2.
pub fn bloch_density(rx: f64, ry: f64, rz: f64) -> HermitianMatrix {
    HermitianMatrix::from_raw(DMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.5 * (1.0 + rz), 0.0),
            c(0.5 * rx, -0.5 * ry),
            c(0.5 * rx, 0.5 * ry),
            c(0.5 * (1.0 - rz), 0.0),
        ],
    ))
    .unwrap()
}

/// Closed-form qubit fidelity F = Tr(ρσ) + 2√(det ρ · det σ).
pub fn qubit_fidelity(rho: &HermitianMatrix, sigma: &HermitianMatrix) -> f64 {
    let tr = (rho.matrix() * sigma.matrix()).trace().re;
    let det =
        |m: &HermitianMatrix| (m.entry(0, 0) * m.entry(1, 1) - m.entry(0, 1) * m.entry(1, 0)).re;
    tr + 2.0 * (det(rho).max(0.0) * det(sigma).max(0.0)).sqrt()
}

/// Any-real parameterization of a dim×dim density matrix through L·L†/Tr with
/// L lower triangular; smooth and surjective onto full-rank states.
pub fn density_from_params(dim: usize, params: &[f64]) -> HermitianMatrix {
    assert_eq!(params.len(), dim * dim);
    let mut l = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        l[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut idx = dim;
    for i in 0..dim {
        for j in 0..i {
            l[(i, j)] = C64::new(params[idx], params[idx + 1]);
            idx += 2;
        }
    }
    let w = HermitianMatrix::from_raw(&l * l.adjoint()).unwrap();
    let tr = w.trace();
    if tr <= 1e-300 {
        HermitianMatrix::identity(dim).scaled(1.0 / dim as f64)
    } else {
        w.scaled(1.0 / tr)
    }
}

/// Nelder–Mead minimization with standard coefficients. Returns the best
/// vertex and its value; good enough as a local polish on smooth objectives.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    for _ in 0..max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if (values[n] - values[0]).abs() <= 1e-15 * (1.0 + values[0].abs()) {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let lerp = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + t * (centroid[j] - worst[j]))
                .collect()
        };

        let reflected = lerp(1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = lerp(2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] {
                lerp(0.5)
            } else {
                lerp(-0.5)
            };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]))
                        .collect();
                    values[i] = f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
        .unwrap();
    (simplex[best].clone(), values[best])
}

/// Maximizes σ ↦ F(R, I_A ⊗ σ) over qubit σ by scanning a Bloch-ball grid and
/// polishing the best cell. Fidelity goes through the singular-value route,
/// with (I ⊗ σ)^½ = I ⊗ σ^½.
pub fn max_f_identity_tensor_sigma_qubit(r: &HermitianMatrix, dim_a: usize, grid_n: usize) -> f64 {
    let sqrt_r = r.sqrt().unwrap();
    let eval_bloch = |rx: f64, ry: f64, rz: f64| -> f64 {
        let norm = (rx * rx + ry * ry + rz * rz).sqrt();
        let (rx, ry, rz) = if norm > 1.0 {
            (rx / norm, ry / norm, rz / norm)
        } else {
            (rx, ry, rz)
        };
        let sigma_sqrt = bloch_density(rx, ry, rz).sqrt().unwrap();
        let big = DMatrix::identity(dim_a, dim_a).kronecker(sigma_sqrt.matrix());
        trace_norm(&(sqrt_r.matrix() * big)).powi(2)
    };

    let mut best = (0.0, 0.0, 0.0);
    let mut best_f = f64::NEG_INFINITY;
    let step = 2.0 / (grid_n - 1) as f64;
    for i in 0..grid_n {
        let rx = -1.0 + i as f64 * step;
        for j in 0..grid_n {
            let ry = -1.0 + j as f64 * step;
            for k in 0..grid_n {
                let rz = -1.0 + k as f64 * step;
                if rx * rx + ry * ry + rz * rz > 1.0 {
                    continue;
                }
                let f = eval_bloch(rx, ry, rz);
                if f > best_f {
                    best_f = f;
                    best = (rx, ry, rz);
                }
            }
        }
    }
    let (_, neg) = nelder_mead(
        &|p: &[f64]| -eval_bloch(p[0], p[1], p[2]),
        &[best.0, best.1, best.2],
        step,
        400,
    );
    (-neg).max(best_f)
}

/// Maximizes σ ↦ F(ρ_AB, ρ_A ⊗ σ) over qubit σ the same way, using
/// (ρ_A ⊗ σ)^½ = ρ_A^½ ⊗ σ^½.
pub fn max_f_rho_a_tensor_sigma_qubit(
    rho_ab: &HermitianMatrix,
    rho_a: &HermitianMatrix,
    grid_n: usize,
) -> f64 {
    let sqrt_ab = rho_ab.sqrt().unwrap();
    let sqrt_a = rho_a.sqrt().unwrap();
    let eval_bloch = |rx: f64, ry: f64, rz: f64| -> f64 {
        let norm = (rx * rx + ry * ry + rz * rz).sqrt();
        let (rx, ry, rz) = if norm > 1.0 {
            (rx / norm, ry / norm, rz / norm)
        } else {
            (rx, ry, rz)
        };
        let sigma_sqrt = bloch_density(rx, ry, rz).sqrt().unwrap();
        let big = sqrt_a.matrix().kronecker(sigma_sqrt.matrix());
        trace_norm(&(sqrt_ab.matrix() * big)).powi(2)
    };

    let mut best = (0.0, 0.0, 0.0);
    let mut best_f = f64::NEG_INFINITY;
    let step = 2.0 / (grid_n - 1) as f64;
    for i in 0..grid_n {
        let rx = -1.0 + i as f64 * step;
        for j in 0..grid_n {
            let ry = -1.0 + j as f64 * step;
            for k in 0..grid_n {
                let rz = -1.0 + k as f64 * step;
                if rx * rx + ry * ry + rz * rz > 1.0 {
                    continue;
                }
                let f = eval_bloch(rx, ry, rz);
                if f > best_f {
                    best_f = f;
                    best = (rx, ry, rz);
                }
            }
        }
    }
    let (_, neg) = nelder_mead(
        &|p: &[f64]| -eval_bloch(p[0], p[1], p[2]),
        &[best.0, best.1, best.2],
        step,
        400,
    );
    (-neg).max(best_f)
}

/// Maximizes a smooth objective over dim×dim density matrices by random
/// restarts of Nelder–Mead on the L·L† parameterization, polishing the best
/// restart with a longer tight-scale run.
pub fn max_over_densities(
    dim: usize,
    objective: &(dyn Fn(&HermitianMatrix) -> f64 + Sync),
    restarts: usize,
    seed: u64,
) -> f64 {
    use rayon::prelude::*;
    let neg_obj = |p: &[f64]| -objective(&density_from_params(dim, p));
    let (best_params, best) = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut local = rng(seed.wrapping_add(i as u64));
            let x0: Vec<f64> = (0..dim * dim)
                .map(|_| local.sample::<f64, _>(StandardNormal))
                .collect();
            let (params, neg) = nelder_mead(&neg_obj, &x0, 0.35, 1200);
            (params, -neg)
        })
        .reduce(
            || (Vec::new(), f64::NEG_INFINITY),
            |a, b| if a.1 >= b.1 { a } else { b },
        );
    let (_, neg) = nelder_mead(&neg_obj, &best_params, 0.02, 6000);
    best.max(-neg)
}
