//! Small dense kernels on row-major slices. Sizes here are tiny (n ≤ 6 or so),
//! so nothing is blocked or vectorized.

use alloc::vec::Vec;

use crate::num::sqrt;

/// Determinant of an `n×n` row-major matrix by LU with partial pivoting.
pub fn det(a: &[f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut sign = 1.0;
    let mut d = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))
            .unwrap_or(col);
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            sign = -sign;
        }
        let p = m[col * n + col];
        d *= p;
        for i in col + 1..n {
            let factor = m[i * n + col] / p;
            if factor != 0.0 {
                for j in col..n {
                    m[i * n + j] -= factor * m[col * n + j];
                }
            }
        }
    }
    sign * d
}

/// Diagonal of R in a Householder QR factorization of a `rows×cols` matrix
/// (`rows ≥ cols`). Signs are not normalized.
pub fn qr_r_diagonal(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    debug_assert!(rows >= cols);
    let mut m = a.to_vec();
    let mut diag = Vec::with_capacity(cols);
    for k in 0..cols {
        let mut alpha = 0.0;
        let scale = (k..rows).fold(0.0f64, |s, i| s.max(m[i * cols + k].abs()));
        if scale == 0.0 {
            diag.push(0.0);
            continue;
        }
        for i in k..rows {
            let v = m[i * cols + k] / scale;
            alpha += v * v;
        }
        let mut norm = scale * sqrt(alpha);
        if m[k * cols + k] > 0.0 {
            norm = -norm;
        }
        // v = x - norm·e_1, stored in column k below the diagonal.
        let mut v: Vec<f64> = (k..rows).map(|i| m[i * cols + k]).collect();
        v[0] -= norm;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag.push(norm);
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k + 1..cols {
            let s: f64 = (k..rows).map(|i| v[i - k] * m[i * cols + j]).sum();
            let f = 2.0 * s / vnorm2;
            for i in k..rows {
                m[i * cols + j] -= f * v[i - k];
            }
        }
    }
    diag
}

/// Inverse of an `n×n` matrix by Gauss–Jordan elimination; `None` if singular.
pub fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = alloc::vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[pivot * n + col] == 0.0 {
            return None;
        }
        for j in 0..n {
            m.swap(col * n + j, pivot * n + j);
            inv.swap(col * n + j, pivot * n + j);
        }
        let p = m[col * n + col];
        for j in 0..n {
            m[col * n + j] /= p;
            inv[col * n + j] /= p;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[i * n + col];
            if f != 0.0 {
                for j in 0..n {
                    m[i * n + j] -= f * m[col * n + j];
                    inv[i * n + j] -= f * inv[col * n + j];
                }
            }
        }
    }
    Some(inv)
}

/// `y = A x` for a `rows×cols` row-major `A`.
pub fn mat_vec(a: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    (0..rows)
        .map(|i| (0..cols).map(|j| a[i * cols + j] * x[j]).sum())
        .collect()
}

/// `A B` for `A: r×k`, `B: k×c`.
pub fn mat_mul(a: &[f64], b: &[f64], r: usize, k: usize, c: usize) -> Vec<f64> {
    let mut out = alloc::vec![0.0; r * c];
    for i in 0..r {
        for l in 0..k {
            let x = a[i * k + l];
            for j in 0..c {
                out[i * c + j] += x * b[l * c + j];
            }
        }
    }
    out
}
