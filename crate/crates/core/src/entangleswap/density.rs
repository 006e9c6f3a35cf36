use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linalg::{self, Matrix4};
use crate::{Error, Result};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Two-memory density matrix in the basis `|00⟩, |01⟩, |10⟩, |11⟩`
/// (index `2·n_a + n_b`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryDensity {
    matrix: Matrix4,
}

fn check_hermitian(m: &Matrix4) -> Result<()> {
    for i in 0..4 {
        for j in i..4 {
            let gap = (m[i][j] - m[j][i].conj()).norm();
            if !gap.is_finite() || gap > HERMITIAN_TOLERANCE {
                return Err(Error::InvalidDensity(format!("not Hermitian at ({i},{j}): gap {gap:e}")));
            }
        }
    }
    Ok(())
}

impl MemoryDensity {
    pub fn new(matrix: Matrix4) -> Result<Self> {
        check_hermitian(&matrix)?;
        let trace: f64 = (0..4).map(|i| matrix[i][i].re).sum();
        if (trace - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {trace} ≠ 1")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?[0];
        if min < -PSD_TOLERANCE {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(m)
    }

    pub fn maximally_mixed() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = Complex64::new(0.25, 0.0);
        }
        Self { matrix: m }
    }

    /// Bell projector `P± = |Ψ±⟩⟨Ψ±|`, `|Ψ±⟩ = (|10⟩ ± |01⟩)/√2`.
    pub fn bell(plus: bool) -> Self {
        bell_projector(plus)
    }

    pub fn matrix(&self) -> &Matrix4 {
        &self.matrix
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row][col]
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.matrix[i][j] - other.matrix[i][j]).norm());
            }
        }
        worst
    }

    /// Transpose over the second memory's index: `⟨a b|ρ^Γ|a′ b′⟩ = ⟨a b′|ρ|a′ b⟩`.
    pub fn partial_transpose(&self) -> Matrix4 {
        partial_transpose(&self.matrix)
    }

    pub fn negativity(&self) -> Result<f64> {
        negativity_of(&self.matrix)
    }

    /// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`. Diagnostic only.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let root = linalg::psd_sqrt(&self.matrix)?;
        let inner = linalg::matmul(&linalg::matmul(&root, &other.matrix), &root);
        let ev = linalg::hermitian_eigenvalues(&hermitize(inner))?;
        let s: f64 = ev.iter().map(|l| l.max(0.0).sqrt()).sum();
        Ok((s * s).min(1.0))
    }
}

fn hermitize(m: Matrix4) -> Matrix4 {
    let mut h = m;
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = 0.5 * (m[i][j] + m[j][i].conj());
        }
    }
    h
}

fn bell_projector(plus: bool) -> MemoryDensity {
    let sign = if plus { 1.0 } else { -1.0 };
    let mut m = [[ZERO; 4]; 4];
    m[1][1] = Complex64::new(0.5, 0.0);
    m[2][2] = Complex64::new(0.5, 0.0);
    m[1][2] = Complex64::new(0.5 * sign, 0.0);
    m[2][1] = Complex64::new(0.5 * sign, 0.0);
    MemoryDensity { matrix: m }
}

pub fn partial_transpose(m: &Matrix4) -> Matrix4 {
    let mut out = [[ZERO; 4]; 4];
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    out[2 * a + b][2 * ap + bp] = m[2 * a + bp][2 * ap + b];
                }
            }
        }
    }
    out
}

fn negativity_of(m: &Matrix4) -> Result<f64> {
    check_hermitian(m)?;
    let ev = linalg::hermitian_eigenvalues(&partial_transpose(m))?;
    Ok(ev.iter().map(|l| 0.5 * (l.abs() - l)).sum::<f64>().max(0.0))
}

/// `N = Σ (|λ| − λ)/2` over the eigenvalues of the partial transpose.
pub fn negativity(rho: &MemoryDensity) -> Result<f64> {
    rho.negativity()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut m = *MemoryDensity::maximally_mixed().matrix();
        m[0][1] = Complex64::new(0.0, 0.1);
        assert!(matches!(MemoryDensity::new(m), Err(Error::InvalidDensity(_))));
        let mut m = *MemoryDensity::maximally_mixed().matrix();
        m[0][0] = Complex64::new(0.5, 0.0);
        assert!(MemoryDensity::new(m).is_err());
        // trace 1 but an eigenvalue of −0.1
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = Complex64::new(1.1, 0.0);
        m[3][3] = Complex64::new(-0.1, 0.0);
        assert!(MemoryDensity::new(m).is_err());
        assert!(MemoryDensity::new(*MemoryDensity::bell(true).matrix()).is_ok());
    }

    #[test]
    fn negativity_reference_states() {
        assert_eq!(MemoryDensity::maximally_mixed().negativity().unwrap(), 0.0);
        for plus in [true, false] {
            let n = MemoryDensity::bell(plus).negativity().unwrap();
            assert!((n - 0.5).abs() < 1e-14);
        }
        let product = MemoryDensity::pure([ZERO, ZERO, Complex64::new(1.0, 0.0), ZERO]).unwrap();
        assert!(product.negativity().unwrap().abs() < 1e-15);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let p = *MemoryDensity::bell(true).matrix();
        assert_eq!(partial_transpose(&partial_transpose(&p)), p);
        // P₊^Γ moves the coherence onto |00⟩⟨11|
        let t = partial_transpose(&p);
        assert_eq!(t[0][3], Complex64::new(0.5, 0.0));
        assert_eq!(t[1][2], ZERO);
    }

    #[test]
    fn uhlmann_fidelity() {
        let plus = MemoryDensity::bell(true);
        let minus = MemoryDensity::bell(false);
        assert!((plus.fidelity(&plus).unwrap() - 1.0).abs() < 1e-12);
        assert!(plus.fidelity(&minus).unwrap().abs() < 1e-12);
        // ⟨Ψ₊|I/4|Ψ₊⟩ = 1/4
        let mixed = MemoryDensity::maximally_mixed();
        assert!((plus.fidelity(&mixed).unwrap() - 0.25).abs() < 1e-12);
        assert!((mixed.fidelity(&plus).unwrap() - 0.25).abs() < 1e-12);
    }
}
