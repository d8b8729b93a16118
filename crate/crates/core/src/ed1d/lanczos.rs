//! Restarted Lanczos for the lowest eigenpair of a real symmetric operator.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanczosOptions {
    /// Krylov vectors per cycle.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Target `||H v - E v||`.
    pub tolerance: f64,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov: 40,
            max_restarts: 2_000,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

/// Diagonal and off-diagonal absolute row sums, used to clean the Ritz vector
/// on strongly diagonally dominant rows.
#[derive(Debug, Clone, Default)]
pub struct DiagonalInfo {
    pub diag: Vec<f64>,
    pub off_sum: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    /// Distance to the second Ritz value of the last cycle.
    pub gap: f64,
    pub restarts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual_norm(apply: &impl Fn(&[f64], &mut [f64]), v: &[f64], e: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    apply(v, &mut hv);
    hv.iter().zip(v).map(|(h, x)| (h - e * x).powi(2)).sum::<f64>().sqrt()
}

/// Lowest eigenpair, sign fixed so the largest-magnitude amplitude is positive.
///
/// Small problems are diagonalised densely from the operator's columns.
pub fn lowest_eigenpair(
    apply: impl Fn(&[f64], &mut [f64]),
    dim: usize,
    diagonal: Option<&DiagonalInfo>,
    opts: LanczosOptions,
) -> Result<Eigenpair> {
    if dim == 0 {
        return Err(Error::invalid("dim", "empty basis"));
    }
    let mut pair = if dim <= opts.krylov.max(64) {
        dense(&apply, dim)?
    } else {
        restarted(&apply, dim, diagonal, opts)?
    };
    let (imax, _) = pair
        .vector
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .expect("dim > 0");
    if pair.vector[imax] < 0.0 {
        pair.vector.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(pair)
}

fn dense(apply: &impl Fn(&[f64], &mut [f64]), dim: usize) -> Result<Eigenpair> {
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        apply(&e, &mut col);
        h.column_mut(j).copy_from_slice(&col);
    }
    let eig = SymmetricEigen::try_new(h, 1e-15, 100_000).ok_or_else(|| Error::NotConverged {
        what: "dense eigensolve".into(),
        residual: f64::NAN,
    })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let value = eig.eigenvalues[order[0]];
    let vector: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    let gap = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i] - value);
    let residual = residual_norm(apply, &vector, value);
    Ok(Eigenpair {
        value,
        vector,
        residual,
        gap,
        restarts: 0,
    })
}

fn restarted(
    apply: &impl Fn(&[f64], &mut [f64]),
    dim: usize,
    diagonal: Option<&DiagonalInfo>,
    opts: LanczosOptions,
) -> Result<Eigenpair> {
    let m = opts.krylov.clamp(4, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut last_residual = f64::INFINITY;
    for restart in 0..opts.max_restarts {
        let nrm = norm(&start);
        start.iter_mut().for_each(|x| *x /= nrm);
        let mut basis: Vec<Vec<f64>> = vec![start];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut w = vec![0.0; dim];
        for j in 0..m {
            apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w);
            alpha.push(a);
            // full reorthogonalisation, applied twice
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
            }
            let b = norm(&w);
            let scale = alpha.iter().map(|x| x.abs()).fold(b, f64::max).max(1e-300);
            if j + 1 == m || b <= 1e-13 * scale {
                beta.push(b);
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i.abs_diff(j) == 1 {
                beta[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::try_new(t, 1e-15, 100_000).ok_or_else(|| Error::NotConverged {
            what: "Lanczos tridiagonal".into(),
            residual: last_residual,
        })?;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta = eig.eigenvalues[order[0]];
        let s = eig.eigenvectors.column(order[0]);
        let gap = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i] - theta);
        let mut x = vec![0.0; dim];
        for (c, v) in s.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += c * vi);
        }
        let nrm = norm(&x);
        x.iter_mut().for_each(|xi| *xi /= nrm);
        let estimate = (beta[k - 1] * s[k - 1]).abs();
        if estimate <= opts.tolerance || k < m {
            let (value, residual) = match diagonal {
                Some(d) => polish(apply, d, &mut x, opts.tolerance),
                None => {
                    let value = rayleigh(apply, &x);
                    (value, residual_norm(apply, &x, value))
                }
            };
            last_residual = residual;
            if residual <= opts.tolerance {
                return Ok(Eigenpair {
                    value,
                    vector: x,
                    residual,
                    gap,
                    restarts: restart,
                });
            }
        } else {
            last_residual = estimate;
        }
        start = x;
    }
    Err(Error::NotConverged {
        what: "Lanczos ground state".into(),
        residual: last_residual,
    })
}

/// Jacobi sweeps on rows with `|H_kk - E| > 2 sum_l |H_kl|`, where the Ritz vector
/// carries rounding noise amplified by large diagonal entries.
fn polish(apply: &impl Fn(&[f64], &mut [f64]), d: &DiagonalInfo, x: &mut [f64], tol: f64) -> (f64, f64) {
    let mut hx = vec![0.0; x.len()];
    let mut best = (f64::NAN, f64::INFINITY);
    for _ in 0..20 {
        apply(x, &mut hx);
        let value = dot(x, &hx) / dot(x, x);
        let residual = hx
            .iter()
            .zip(x.iter())
            .map(|(h, v)| (h - value * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual >= best.1 {
            break;
        }
        best = (value, residual);
        if residual <= tol {
            break;
        }
        for k in 0..x.len() {
            let shift = d.diag[k] - value;
            if shift.abs() > 2.0 * d.off_sum[k] {
                x[k] -= (hx[k] - value * x[k]) / shift;
            }
        }
        let nrm = norm(x);
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    let value = rayleigh(apply, x);
    (value, residual_norm(apply, x, value))
}

fn rayleigh(apply: &impl Fn(&[f64], &mut [f64]), x: &[f64]) -> f64 {
    let mut hx = vec![0.0; x.len()];
    apply(x, &mut hx);
    dot(x, &hx) / dot(x, x)
}
