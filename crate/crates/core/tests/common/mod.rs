//! Independent reference implementations used by the integration tests.
//! Everything here is deliberately naive: dense matrices, explicit
//! Kronecker products, Taylor series.

#![allow(dead_code)]

use randstate::Complex;

pub type C = Complex<f64>;
pub type Dense = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

pub fn zeros(n: usize) -> Dense {
    vec![vec![c(0.0, 0.0); n]; n]
}

pub fn eye(n: usize) -> Dense {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = zeros(ra * rb);
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Dense, s: C) -> Dense {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn vec_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// |r⟩⟨s| on one qubit.
fn unit(r: usize, s: usize) -> Dense {
    let mut m = zeros(2);
    m[r][s] = c(1.0, 0.0);
    m
}

/// A two-qubit matrix (row/column index `2·a + b` with `a` on `qi`, `b` on
/// `qj`) embedded in an N-qubit register, written as a sum of sixteen
/// Kronecker products of single-qubit operators. Qubit N−1 is the leftmost
/// Kronecker factor.
pub fn embed_two(g: &[[C; 4]; 4], qi: usize, qj: usize, n: usize) -> Dense {
    let mut total = zeros(1 << n);
    for (row, g_row) in g.iter().enumerate() {
        for (col, &coef) in g_row.iter().enumerate() {
            if coef.norm() == 0.0 {
                continue;
            }
            let mut term = vec![vec![coef]];
            for q in (0..n).rev() {
                let factor = if q == qi {
                    unit(row >> 1, col >> 1)
                } else if q == qj {
                    unit(row & 1, col & 1)
                } else {
                    eye(2)
                };
                term = kron(&term, &factor);
            }
            total = add(&total, &term);
        }
    }
    total
}

pub fn embed_single(g: &[[C; 2]; 2], q: usize, n: usize) -> Dense {
    let g: Dense = g.iter().map(|r| r.to_vec()).collect();
    let id = eye(2);
    let mut out = vec![vec![c(1.0, 0.0)]];
    for k in (0..n).rev() {
        out = kron(&out, if k == q { &g } else { &id });
    }
    out
}

pub fn pauli(k: usize) -> Dense {
    let (o, i) = (c(0.0, 0.0), c(1.0, 0.0));
    match k {
        0 => vec![vec![o, i], vec![i, o]],
        1 => vec![vec![o, c(0.0, -1.0)], vec![c(0.0, 1.0), o]],
        2 => vec![vec![i, o], vec![o, -i]],
        _ => unreachable!(),
    }
}

/// exp(a) by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &Dense) -> Dense {
    let n = a.len();
    let norm: f64 = a
        .iter()
        .map(|r| r.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut s = 1.0;
    while norm / s > 0.25 {
        s *= 2.0;
        squarings += 1;
    }
    let a = scale(a, c(1.0 / s, 0.0));
    let mut result = eye(n);
    let mut term = eye(n);
    for k in 1..=30 {
        term = scale(&matmul(&term, &a), c(1.0 / k as f64, 0.0));
        result = add(&result, &term);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// exp(−i Σ λ_k σ_k⊗σ_k) from the oracle exponential.
pub fn canonical_oracle(lambda: [f64; 3]) -> Dense {
    let mut h = zeros(4);
    for (k, &l) in lambda.iter().enumerate() {
        h = add(&h, &scale(&kron(&pauli(k), &pauli(k)), c(l, 0.0)));
    }
    expm(&scale(&h, c(0.0, -1.0)))
}

/// Reduced density matrix by brute force: form |ψ⟩⟨ψ| and sum over every
/// pair of full indices that agree on the traced-out qubits. Row index of
/// the result packs the kept qubits in increasing order, lowest bit first.
pub fn partial_trace(psi: &[C], n: usize, kept: &[usize]) -> Dense {
    let m = kept.len();
    let full: Dense = psi
        .iter()
        .map(|a| psi.iter().map(|b| a * b.conj()).collect())
        .collect();
    let pack = |x: usize| -> usize {
        kept.iter()
            .enumerate()
            .map(|(k, &q)| ((x >> q) & 1) << k)
            .sum()
    };
    let env_mask: usize = (0..n).filter(|q| !kept.contains(q)).map(|q| 1 << q).sum();
    let mut rho = zeros(1 << m);
    for (x, row) in full.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            if x & env_mask == y & env_mask {
                rho[pack(x)][pack(y)] += v;
            }
        }
    }
    rho
}

/// Purity-based linear entropy straight from the definition.
pub fn linear_entropy_oracle(rho: &Dense) -> f64 {
    let d = rho.len() as f64;
    let p = matmul(rho, rho);
    let tr: f64 = (0..rho.len()).map(|i| p[i][i].re).sum();
    d / (d - 1.0) * (1.0 - tr)
}

/// Meyer–Wallach Q = 2 − (2/N) Σ_k Tr ρ_k².
pub fn meyer_wallach(psi: &[C], n: usize) -> f64 {
    let mut sum = 0.0;
    for k in 0..n {
        let rho = partial_trace(psi, n, &[k]);
        let p = matmul(&rho, &rho);
        sum += p[0][0].re + p[1][1].re;
    }
    2.0 - 2.0 * sum / n as f64
}

/// Haar-random state from the library sampler.
pub fn haar_state(n: usize, seed: u64) -> randstate::StateVector64 {
    let mut s = randstate::RngStream::new(seed, 0);
    randstate::haar_baseline::sample_haar_state(n, &mut s).unwrap()
}

/// Kolmogorov–Smirnov statistic of `xs` against the uniform law on [0,1].
pub fn ks_uniform(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// 1% critical value of the one-sample KS statistic for large n.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
