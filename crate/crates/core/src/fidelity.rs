//! Channel fidelities for a single photon, a coherent pulse and one arm of a
//! two-mode squeezed state, each as a function of the mode overlap Δ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const OVERLAP_SLACK: f64 = 1e-9;

/// Squeezing above which the two-mode fidelity is evaluated in log space.
const TMSS_LOG_SPACE_ABOVE: f64 = 20.0;

/// Displacement of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude(Complex64);

impl CoherentAmplitude {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::param("alpha", "must be finite"));
        }
        Ok(Self(value))
    }

    pub fn real(value: f64) -> Result<Self> {
        Self::new(Complex64::new(value, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Two-mode squeezing parameter `s ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SqueezingStrength(f64);

impl SqueezingStrength {
    pub fn new(s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::param("s", format!("must be finite and ≥ 0, got {s}")));
        }
        Ok(Self(s))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

fn check_overlap(delta: Complex64) -> Result<()> {
    let n = delta.norm();
    if !n.is_finite() || n > 1.0 + OVERLAP_SLACK {
        return Err(Error::param("delta", format!("|Δ| must not exceed 1, got {n}")));
    }
    Ok(())
}

/// `F = |Δ|²`.
pub fn single_photon_fidelity(delta: Complex64) -> Result<f64> {
    check_overlap(delta)?;
    Ok(delta.norm_sqr().min(1.0))
}

/// `F = exp(−2|α|²(1 − Re Δ))`.
pub fn coherent_fidelity(delta: Complex64, alpha: CoherentAmplitude) -> Result<f64> {
    check_overlap(delta)?;
    let exponent = -2.0 * alpha.value().norm_sqr() * (1.0 - delta.re);
    Ok(exponent.exp().min(1.0))
}

/// `F = |sech²s / (1 − Δ tanh²s)|²`.
///
/// Rewritten as `1/|(1 − Δ)cosh²s + Δ|²`, which is exactly one at Δ = 1 and
/// does not lose `1 − tanh²s` to rounding for large `s`. Beyond `s = 20`
/// the modulus is taken in log space so that `cosh²s` never overflows.
pub fn tmss_fidelity(delta: Complex64, s: SqueezingStrength) -> Result<f64> {
    check_overlap(delta)?;
    let s = s.value();
    let one = Complex64::new(1.0, 0.0);
    let gap = one - delta;
    if s <= TMSS_LOG_SPACE_ABOVE {
        let c2 = s.cosh().powi(2);
        let denom = gap * c2 + delta;
        return Ok(denom.norm_sqr().recip());
    }
    // cosh²s = e^{2s}(1 + e^{−2s})²/4
    let ln_c2 = 2.0 * (s + (-2.0 * s).exp().ln_1p() - std::f64::consts::LN_2);
    let inner = gap + delta * (-ln_c2).exp();
    if inner.norm() == 0.0 {
        return Ok(1.0);
    }
    let ln_modulus = ln_c2 + inner.norm().ln();
    Ok((-2.0 * ln_modulus).exp())
}
