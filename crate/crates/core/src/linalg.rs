//! Eigenvalues of small Hermitian matrices by cyclic Jacobi rotations.
//!
//! Each rotation first rephases column/row `q` so the pivot `a[p][q]` becomes
//! real, then applies an ordinary real Jacobi rotation in the (p, q) plane.
//! Only eigenvalues are tracked.

use num_complex::Complex;

use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of the `n×n` Hermitian matrix stored row-major in `a`,
/// sorted in ascending order. Only the upper triangle and the diagonal are
/// read; the lower triangle is assumed to be its conjugate.
pub fn hermitian_eigenvalues<T: Real>(a: &[Complex<T>], n: usize) -> Vec<T> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    let mut m = a.to_vec();
    for i in 0..n {
        m[i * n + i].im = T::zero();
        for j in 0..i {
            m[i * n + j] = m[j * n + i].conj();
        }
    }

    let total: T = m.iter().map(|x| x.norm_sqr()).sum();
    let tiny = T::epsilon() * T::epsilon() * total;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[p * n + q].norm_sqr();
            }
        }
        if off <= tiny {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, n, p, q);
            }
        }
    }

    let mut eig: Vec<T> = (0..n).map(|i| m[i * n + i].re).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eig
}

fn rotate<T: Real>(m: &mut [Complex<T>], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }

    // Rephase index q so that a[p][q] = r is real.
    let phase = apq.unscale(r).conj();
    for k in 0..n {
        if k != q {
            m[k * n + q] = m[k * n + q] * phase;
            m[q * n + k] = m[k * n + q].conj();
        }
    }

    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let two = T::one() + T::one();
    let theta = (aqq - app) / (two * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = (t * t + T::one()).sqrt().recip();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        let new_kp = akp.scale(c) - akq.scale(s);
        let new_kq = akp.scale(s) + akq.scale(c);
        m[k * n + p] = new_kp;
        m[p * n + k] = new_kp.conj();
        m[k * n + q] = new_kq;
        m[q * n + k] = new_kq.conj();
    }
    m[p * n + p] = Complex::new(app - t * r, T::zero());
    m[q * n + q] = Complex::new(aqq + t * r, T::zero());
    m[p * n + q] = Complex::new(T::zero(), T::zero());
    m[q * n + p] = Complex::new(T::zero(), T::zero());
}
