//! Small dense Hermitian eigenproblems.
//!
//! A complex Hermitian `n×n` matrix `H = A + iB` is embedded as the real
//! symmetric `2n×2n` matrix `[[A, −B], [B, A]]`; every eigenvalue of `H`
//! appears twice in the embedding, and the embedding is an algebra
//! homomorphism, so matrix functions can be evaluated on it and mapped back.

use num_complex::Complex64;

use crate::{Error, Result};

pub type Matrix4 = [[Complex64; 4]; 4];

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;

/// Cyclic Jacobi on a real symmetric matrix. Returns eigenvalues (ascending)
/// and the orthogonal matrix whose columns are the eigenvectors.
pub(crate) fn symmetric_eigen(mut a: Vec<Vec<f64>>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale = a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= OFF_DIAGONAL_TOLERANCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = (t * t + 1.0).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { operation: "Jacobi eigensolver", iterations: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    Ok((values, vectors))
}

fn embed(h: &Matrix4) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let z = h[i][j];
            m[i][j] = z.re;
            m[i + 4][j + 4] = z.re;
            m[i][j + 4] = -z.im;
            m[i + 4][j] = z.im;
        }
    }
    m
}

fn unembed(m: &[Vec<f64>]) -> Matrix4 {
    let mut h = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = Complex64::new(m[i][j], m[i + 4][j]);
        }
    }
    h
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn hermitian_eigenvalues(h: &Matrix4) -> Result<[f64; 4]> {
    let (values, _) = symmetric_eigen(embed(h))?;
    // each eigenvalue is doubled; average the pairs
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = 0.5 * (values[2 * k] + values[2 * k + 1]);
    }
    Ok(out)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Small negative eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(h: &Matrix4) -> Result<Matrix4> {
    let (values, vectors) = symmetric_eigen(embed(h))?;
    let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let mut m = vec![vec![0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            m[i][j] = (0..8).map(|k| vectors[i][k] * roots[k] * vectors[j][k]).sum();
        }
    }
    Ok(unembed(&m))
}

pub fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_is_trivial() {
        let mut h = [[z(0.0, 0.0); 4]; 4];
        for (i, v) in [3.0, -1.0, 2.0, 0.5].iter().enumerate() {
            h[i][i] = z(*v, 0.0);
        }
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert_eq!(ev, [-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y_block() {
        // [[0, −i], [i, 0]] has eigenvalues ±1
        let mut h = [[z(0.0, 0.0); 4]; 4];
        h[1][2] = z(0.0, -1.0);
        h[2][1] = z(0.0, 1.0);
        let ev = hermitian_eigenvalues(&h).unwrap();
        let expect = [-1.0, 0.0, 0.0, 1.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let h = [
            [z(2.0, 0.0), z(0.3, 0.1), z(-0.2, 0.4), z(0.0, 0.5)],
            [z(0.3, -0.1), z(1.0, 0.0), z(0.7, 0.0), z(0.1, -0.2)],
            [z(-0.2, -0.4), z(0.7, 0.0), z(-0.5, 0.0), z(0.25, 0.25)],
            [z(0.0, -0.5), z(0.1, 0.2), z(0.25, -0.25), z(0.8, 0.0)],
        ];
        let ev = hermitian_eigenvalues(&h).unwrap();
        let trace: f64 = (0..4).map(|i| h[i][i].re).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-13);
        let h2 = matmul(&h, &h);
        let trace2: f64 = (0..4).map(|i| h2[i][i].re).sum();
        assert!((ev.iter().map(|l| l * l).sum::<f64>() - trace2).abs() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let h = [
            [z(0.4, 0.0), z(0.1, 0.05), z(0.0, 0.0), z(0.02, 0.0)],
            [z(0.1, -0.05), z(0.3, 0.0), z(0.05, 0.0), z(0.0, 0.0)],
            [z(0.0, 0.0), z(0.05, 0.0), z(0.2, 0.0), z(0.0, -0.03)],
            [z(0.02, 0.0), z(0.0, 0.0), z(0.0, 0.03), z(0.1, 0.0)],
        ];
        let r = psd_sqrt(&h).unwrap();
        let back = matmul(&r, &r);
        for i in 0..4 {
            for j in 0..4 {
                assert!((back[i][j] - h[i][j]).norm() < 1e-13);
            }
        }
    }
}
