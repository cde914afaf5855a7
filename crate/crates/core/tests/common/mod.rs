//! Independent reference computations for the integration tests.
//!
//! Nothing here calls the crate's operator assembly; every quantity is rebuilt
//! from its definition so that agreement means something.

#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reduced vector -> full zero-mean vector.
pub fn full(u: &[f64]) -> Vec<f64> {
    let mut v = u.to_vec();
    v.push(-u.iter().sum::<f64>());
    v
}

/// Random zero-mean data in reduced form with entries of order one.
pub fn random_reduced(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    raw[..n - 1].iter().map(|x| x - mean).collect()
}

/// Cyclic backward jumps `v_n - v_{n-1}` of a full vector.
pub fn jumps(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| v[i] - v[(i + n - 1) % n]).collect()
}

pub fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Squared H⁻¹ norm of the discrete-Laplacian scheme, by the discrete Fourier
/// transform: `h³ N⁻¹ Σ_{k≠0} |v̂_k|² / (2 - 2cos(2πk/N))`.
pub fn hminus1_sq_fourier(v_full: &[f64]) -> f64 {
    let n = v_full.len();
    let h = 1.0 / n as f64;
    let mut acc = 0.0;
    for k in 1..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (m, v) in v_full.iter().enumerate() {
            let phase = 2.0 * PI * (k * m) as f64 / n as f64;
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        acc += (re * re + im * im) / (2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos());
    }
    h * h * h * acc / n as f64
}

/// Exact squared H⁻¹ norm of a zero-mean piecewise-constant function on the
/// unit torus: `∫ (V - mean V)²` with `V' = v`, integrated cell by cell.
pub fn hminus1_sq_exact(v_full: &[f64]) -> f64 {
    let n = v_full.len();
    let h = 1.0 / n as f64;
    let mut starts = Vec::with_capacity(n);
    let mut acc = 0.0;
    for v in v_full {
        starts.push(acc);
        acc += h * v;
    }
    let mean: f64 = starts.iter().zip(v_full).map(|(s, v)| h * s + v * h * h / 2.0).sum();
    starts
        .iter()
        .zip(v_full)
        .map(|(s, b)| {
            let a = s - mean;
            a * a * h + a * b * h * h + b * b * h * h * h / 3.0
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fidelity {
    Fourier,
    Exact,
}

impl Fidelity {
    pub fn norm_sq(self, v_full: &[f64]) -> f64 {
        match self {
            Fidelity::Fourier => hminus1_sq_fourier(v_full),
            Fidelity::Exact => hminus1_sq_exact(v_full),
        }
    }
}

/// Gram matrix of the squared H⁻¹ norm in reduced coordinates, by
/// polarization of the norm oracle.
pub fn fidelity_gram(n: usize, fid: Fidelity) -> Vec<Vec<f64>> {
    let m = n - 1;
    let unit = |i: usize| {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        e
    };
    let diag: Vec<f64> = (0..m).map(|i| fid.norm_sq(&full(&unit(i)))).collect();
    let mut g = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                g[i][j] = diag[i];
            } else {
                let mut e = unit(i);
                e[j] = 1.0;
                g[i][j] = 0.5 * (fid.norm_sq(&full(&e)) - diag[i] - diag[j]);
            }
        }
    }
    g
}

pub fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, bi)| {
        let mut r = row.clone();
        r.push(*bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][n] - s) / m[row][row];
    }
    x
}

/// `Σ|jumps(R u)| + λ/2 ‖u - f‖²_{H⁻¹}` with the oracle fidelity.
pub fn osv_objective(u: &[f64], f: &[f64], lambda: f64, fid: Fidelity) -> f64 {
    let diff: Vec<f64> = u.iter().zip(f).map(|(a, b)| a - b).collect();
    let tv: f64 = jumps(&full(u)).iter().map(|x| x.abs()).sum();
    tv + 0.5 * lambda * fid.norm_sq(&full(&diff))
}

/// Minimum of the OSV objective from accelerated projected gradient on the
/// dual `min_{|p|≤1} ½pᵀMp - pᵀDf`, `M = D Q⁻¹ Dᵀ`, `Q = λ·Gram`,
/// `D u = jumps(R u)`. Returns `(primal value, duality gap)`.
pub fn osv_minimum(f: &[f64], lambda: f64, fid: Fidelity, iterations: usize) -> (f64, f64) {
    let n = f.len() + 1;
    let m = n - 1;
    let gram = fidelity_gram(n, fid);
    let q: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|x| lambda * x).collect()).collect();
    // columns of D: jumps of R e_i
    let d_cols: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            jumps(&full(&e))
        })
        .collect();
    let d_apply = |u: &[f64]| jumps(&full(u));
    let dt_apply = |p: &[f64]| -> Vec<f64> { d_cols.iter().map(|c| dot(c, p)).collect() };
    // Q⁻¹ Dᵀ e_j for every jump index j
    let qinv_dt: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            solve_dense(&q, &dt_apply(&e))
        })
        .collect();
    let mmat: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| d_apply(&qinv_dt[j])[i]).collect())
        .collect();
    // power iteration for the step size
    let mut x = vec![1.0; n];
    x[0] = 2.0;
    let mut lip = 0.0;
    for _ in 0..500 {
        let y = mat_vec(&mmat, &x);
        lip = dot(&y, &y).sqrt() / dot(&x, &x).sqrt();
        x = y.iter().map(|v| v / lip).collect();
    }
    let step = 1.0 / (1.05 * lip);
    let df = d_apply(f);
    let recover = |p: &[f64]| -> Vec<f64> {
        let corr = solve_dense(&q, &dt_apply(p));
        f.iter().zip(&corr).map(|(a, b)| a - b).collect()
    };
    let dual_value = |p: &[f64]| dot(p, &df) - 0.5 * dot(p, &mat_vec(&mmat, p));

    let mut p = vec![0.0; n];
    let mut y = p.clone();
    let mut t = 1.0f64;
    let mut best_primal = osv_objective(&recover(&p), f, lambda, fid);
    let mut best_dual = dual_value(&p);
    for it in 0..iterations {
        let grad: Vec<f64> = mat_vec(&mmat, &y).iter().zip(&df).map(|(a, b)| a - b).collect();
        let next: Vec<f64> = y.iter().zip(&grad).map(|(yi, g)| (yi - step * g).clamp(-1.0, 1.0)).collect();
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = next.iter().zip(&p).map(|(a, b)| a + (t - 1.0) / t_next * (a - b)).collect();
        p = next;
        t = t_next;
        if it % 200 == 0 || it + 1 == iterations {
            best_dual = best_dual.max(dual_value(&p));
            best_primal = best_primal.min(osv_objective(&recover(&p), f, lambda, fid));
            if best_primal - best_dual < 1e-10 {
                break;
            }
        }
    }
    (best_primal, best_primal - best_dual)
}

/// Minimizer of a scalar function by exhaustive search on a uniform grid.
pub fn grid_argmin(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    let count = ((hi - lo) / step).ceil() as usize;
    let mut best = (lo, f(lo));
    for k in 1..=count {
        let x = lo + k as f64 * step;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// Search interval that certainly contains the proximal point of `ρ`.
pub fn prox_bracket(rho: f64) -> (f64, f64) {
    (rho.min(0.0) - 0.1, rho.max(0.0) + 0.1)
}

/// Closed-form presets, written out again from the published formulas.
pub fn preset_value(name: &str, x: f64) -> f64 {
    match name {
        "cos1d" => -(2.0 * PI * x).cos(),
        "cusp1d" => {
            if (x - 0.5).abs() <= 0.1 {
                10.0 * (4.0 - 5f64.ln())
            } else {
                5.0 / (x - 0.5).abs() - 10.0 * (1.0 + 5f64.ln())
            }
        }
        "cubic1d" => {
            let (a, r) = (450.0, 1.0 / 15.0);
            if x < r || x > 1.0 - r {
                -a * (0.25 - r).powi(3)
            } else if x < 0.5 - r {
                a * (x - 0.25).powi(3)
            } else if x < 0.5 + r {
                a * (0.25 - r).powi(3)
            } else {
                -a * (x - 0.75).powi(3)
            }
        }
        other => panic!("no 1D formula for {other}"),
    }
}
