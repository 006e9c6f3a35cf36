//! Normalized single-mode frequency distributions `F(Ω)`, their transport
//! between stations, and the mode overlap `Δ = ∫ F₂*(Ω) F₁(Ω) dΩ`.
//!
//! Frequencies are ordinary frequencies in hertz. Gaussian packets keep the
//! accumulated propagation scale as a logarithm so that two packets derived
//! from one source can be compared with their tiny peak offset intact, even
//! when that offset is ten orders of magnitude below the carrier.

mod quadrature;
mod tabulated;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use quadrature::{integrate, Integral};
pub use tabulated::TabulatedPacket;

use crate::spacetime::ShiftParameter;
use crate::{Error, Result};

/// Smallest accepted peak/width ratio for Gaussian packets. Above it the
/// negative-frequency tail holds less than `exp(−5000)` of the mass.
pub const MIN_PEAK_TO_WIDTH: f64 = 1e2;

/// Half-width of the integration window, in packet widths.
pub const WINDOW_WIDTHS: f64 = 15.0;

/// Absolute error target for the adaptive overlap quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-13;

const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// `F(Ω) = (2πσ²)^{-1/4} exp(−(Ω − Ω₀)²/(4σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    base_peak: f64,
    base_width: f64,
    /// Accumulated `ln χ`; peak and width are the base values divided by `χ`.
    ln_scale: f64,
}

impl GaussianPacket {
    pub fn new(peak_hz: f64, width_hz: f64) -> Result<Self> {
        if !(peak_hz.is_finite() && peak_hz > 0.0) {
            return Err(Error::param("peak_hz", format!("must be positive and finite, got {peak_hz}")));
        }
        if !(width_hz.is_finite() && width_hz > 0.0) {
            return Err(Error::param(
                "width_hz",
                format!("must be positive and finite, got {width_hz}"),
            ));
        }
        if peak_hz / width_hz <= MIN_PEAK_TO_WIDTH {
            return Err(Error::param(
                "width_hz",
                format!("peak/width must exceed {MIN_PEAK_TO_WIDTH}, got {}", peak_hz / width_hz),
            ));
        }
        Ok(Self {
            base_peak: peak_hz,
            base_width: width_hz,
            ln_scale: 0.0,
        })
    }

    pub fn peak(&self) -> f64 {
        self.base_peak * (-self.ln_scale).exp()
    }

    pub fn width(&self) -> f64 {
        self.base_width * (-self.ln_scale).exp()
    }

    pub fn amplitude(&self, freq: f64) -> f64 {
        self.amplitude_at_offset(freq - self.peak())
    }

    pub(super) fn amplitude_at_offset(&self, offset: f64) -> f64 {
        let w = self.width();
        (2.0 * PI * w * w).powf(-0.25) * (-offset * offset / (4.0 * w * w)).exp()
    }

    /// `other.peak() − self.peak()`, exact to rounding of the result when
    /// both packets descend from the same source.
    pub fn peak_offset_to(&self, other: &GaussianPacket) -> f64 {
        if self.base_peak == other.base_peak {
            // e^{−b} − e^{−a} = e^{−a}·expm1(a − b)
            self.base_peak * (-self.ln_scale).exp() * (self.ln_scale - other.ln_scale).exp_m1()
        } else {
            other.peak() - self.peak()
        }
    }

    fn propagate_ln(&self, ln_ratio: f64) -> Self {
        Self {
            ln_scale: self.ln_scale + ln_ratio,
            ..*self
        }
    }

    fn window(&self) -> (f64, f64) {
        let (p, w) = (self.peak(), self.width());
        ((p - WINDOW_WIDTHS * w).max(0.0), p + WINDOW_WIDTHS * w)
    }
}

/// A normalized frequency distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum WavePacket {
    Gaussian(GaussianPacket),
    Tabulated(TabulatedPacket),
}

impl From<GaussianPacket> for WavePacket {
    fn from(g: GaussianPacket) -> Self {
        WavePacket::Gaussian(g)
    }
}

impl From<TabulatedPacket> for WavePacket {
    fn from(t: TabulatedPacket) -> Self {
        WavePacket::Tabulated(t)
    }
}

impl WavePacket {
    pub fn gaussian(peak_hz: f64, width_hz: f64) -> Result<Self> {
        GaussianPacket::new(peak_hz, width_hz).map(Self::Gaussian)
    }

    pub fn amplitude(&self, freq: f64) -> Complex64 {
        match self {
            WavePacket::Gaussian(g) => Complex64::new(g.amplitude(freq), 0.0),
            WavePacket::Tabulated(t) => t.amplitude(freq),
        }
    }

    /// Frequency interval outside which the amplitude is negligible (Gaussian)
    /// or zero (tabulated).
    pub fn support(&self) -> (f64, f64) {
        match self {
            WavePacket::Gaussian(g) => g.window(),
            WavePacket::Tabulated(t) => t.support(),
        }
    }

    /// `∫|F|² dΩ`: analytic for Gaussians, trapezoidal for tables.
    pub fn norm_sq(&self) -> f64 {
        match self {
            WavePacket::Gaussian(_) => 1.0,
            WavePacket::Tabulated(t) => t.norm_sq(),
        }
    }

    /// The packet seen by a station whose frequencies relate to ours by
    /// `Ω_here = χ·Ω_there`: `F'(Ω) = √χ F(χΩ)`.
    pub fn propagate(&self, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::param("ratio", format!("must be positive and finite, got {ratio}")));
        }
        Ok(self.propagate_ln(ratio.ln()))
    }

    /// [`WavePacket::propagate`] with `ln χ` supplied directly, which keeps
    /// full relative precision for `χ` within 10⁻¹⁶ of one.
    pub fn propagate_ln(&self, ln_ratio: f64) -> Self {
        match self {
            WavePacket::Gaussian(g) => WavePacket::Gaussian(g.propagate_ln(ln_ratio)),
            WavePacket::Tabulated(t) => WavePacket::Tabulated(t.propagate_ln(ln_ratio)),
        }
    }
}

/// Mode overlap and the weight it leaves in the orthogonal mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    pub delta: Complex64,
    /// `1 − |Δ|²`
    pub q: f64,
    /// Absolute error bound on `delta`; zero for closed forms.
    pub error_estimate: f64,
}

/// `q = 1 − |Δ|²`.
pub fn mismatch_q(delta: Complex64) -> Result<f64> {
    let norm = delta.norm();
    if !norm.is_finite() || norm > 1.0 + 1e-9 {
        return Err(Error::param("delta", format!("|Δ| must not exceed 1, got {norm}")));
    }
    Ok((1.0 - delta.norm_sqr()).clamp(0.0, 1.0))
}

/// `Δ = ∫ F₂*(Ω) F₁(Ω) dΩ` by numerical integration.
///
/// Two Gaussians are integrated with adaptive Gauss–Kronrod over the union
/// of their ±15σ windows, in coordinates centred on `p1`. Anything involving
/// a table is resampled onto the union of the grids and integrated with the
/// trapezoidal rule; the estimate then compares full and half grids.
pub fn overlap_quadrature(p1: &WavePacket, p2: &WavePacket) -> Result<OverlapResult> {
    for p in [p1, p2] {
        let n = p.norm_sq();
        if (n - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq: n });
        }
    }
    let (delta, error_estimate) = match (p1, p2) {
        (WavePacket::Gaussian(a), WavePacket::Gaussian(b)) => {
            let r = gaussian_overlap_quadrature(a, b)?;
            (Complex64::new(r.value, 0.0), r.error)
        }
        _ => tabulated::overlap_trapezoid(p1, p2),
    };
    let q = (1.0 - delta.norm_sqr()).clamp(0.0, 1.0);
    Ok(OverlapResult {
        delta,
        q,
        error_estimate,
    })
}

fn gaussian_overlap_quadrature(a: &GaussianPacket, b: &GaussianPacket) -> Result<Integral> {
    let (pa, wa, wb) = (a.peak(), a.width(), b.width());
    let d = a.peak_offset_to(b);

    // Ω = pa + wa·u
    let floor = -pa / wa;
    let window_a = ((-WINDOW_WIDTHS).max(floor), WINDOW_WIDTHS);
    let window_b = (
        ((d - WINDOW_WIDTHS * wb) / wa).max(floor),
        (d + WINDOW_WIDTHS * wb) / wa,
    );
    let intervals = union(window_a, window_b);

    let scale = wa / wb;
    let shift = d / wb;
    let prefactor = scale.sqrt() / (2.0 * PI).sqrt();
    let integrand = |u: f64| {
        let t = scale * u - shift;
        prefactor * (-(u * u + t * t) / 4.0).exp()
    };
    integrate(integrand, &intervals, QUADRATURE_TOLERANCE)
}

fn union(a: (f64, f64), b: (f64, f64)) -> Vec<(f64, f64)> {
    let (first, second) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    if second.0 <= first.1 {
        vec![(first.0, first.1.max(second.1))]
    } else {
        vec![first, second]
    }
}

/// Closed-form overlap of a Gaussian packet with its copy rescaled by
/// `κ = 1 ± δ`:
/// `Δ = √(2κ/(1+κ²)) · exp(−δ²Ω₀²/(4(1+κ²)σ²))`.
///
/// Evaluated as `ln Δ = −½ ln(1 + δ²/(2κ)) − δ²Ω₀²/(4(1+κ²)σ²)` so that `q`
/// keeps its relative precision down to `q ~ 10⁻³⁰⁰`.
pub fn overlap_gaussian_closed(packet: &WavePacket, shift: &ShiftParameter) -> Result<OverlapResult> {
    let WavePacket::Gaussian(g) = packet else {
        return Err(Error::NotGaussian);
    };
    let kappa = shift.factor();
    if kappa <= 0.0 {
        return Err(Error::param("delta", "upward shift must be below 1"));
    }
    let delta = shift.delta;
    let (peak, width) = (g.peak(), g.width());
    let spread = 1.0 + kappa * kappa;
    let detuning = delta * peak / width;
    let ln_overlap = -0.5 * (delta * delta / (2.0 * kappa)).ln_1p() - detuning * detuning / (4.0 * spread);
    Ok(OverlapResult {
        delta: Complex64::new(ln_overlap.exp(), 0.0),
        q: -(2.0 * ln_overlap).exp_m1(),
        error_estimate: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::ShiftDirection;

    fn blue() -> WavePacket {
        WavePacket::gaussian(700e12, 1e6).unwrap()
    }

    #[test]
    fn gaussian_validation() {
        assert!(GaussianPacket::new(700e12, 0.0).is_err());
        assert!(GaussianPacket::new(-1.0, 1.0).is_err());
        assert!(GaussianPacket::new(1e3, 100.0).is_err());
        assert!(GaussianPacket::new(700e12, 1e12).is_ok());
    }

    #[test]
    fn propagate_identity_and_shift() {
        let p = blue();
        assert_eq!(p.propagate(1.0).unwrap(), p);
        let chi = 1.0 - 1.45e-10;
        let WavePacket::Gaussian(g) = p.propagate(chi).unwrap() else { unreachable!() };
        // peak/χ − peak ≈ peak·1.45e-10 = 101.5 kHz; the width moves by 1.45e-4 Hz.
        assert!((g.peak() - 700e12 - 101.5e3).abs() < 0.5);
        assert!((g.width() - 1e6 - 1.45e-4).abs() < 1e-6);
        assert!(p.propagate(0.0).is_err());
        assert!(p.propagate(-2.0).is_err());
    }

    #[test]
    fn propagate_round_trip() {
        let p = blue();
        let chi = 1.0 + 3e-7;
        let back = p.propagate(chi).unwrap().propagate(1.0 / chi).unwrap();
        let (WavePacket::Gaussian(a), WavePacket::Gaussian(b)) = (&p, &back) else { unreachable!() };
        assert!(((a.peak() - b.peak()) / a.peak()).abs() < 1e-12);
        assert!(((a.width() - b.width()) / a.width()).abs() < 1e-12);
    }

    #[test]
    fn self_overlap_is_one() {
        let p = blue();
        let r = overlap_quadrature(&p, &p).unwrap();
        assert!((r.delta.re - 1.0).abs() < 1e-12);
        assert!(r.error_estimate < QUADRATURE_TOLERANCE);
    }

    #[test]
    fn disjoint_supports_give_zero() {
        let p = blue();
        let far = p.propagate_ln(-1e-6); // shifts the peak by 700 MHz ≫ σ
        let r = overlap_quadrature(&p, &far).unwrap();
        assert!(r.delta.norm() < 1e-20);
        assert!((r.q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_endpoints() {
        let p = blue();
        let none = overlap_gaussian_closed(&p, &ShiftParameter::none()).unwrap();
        assert_eq!(none.delta.re, 1.0);
        assert_eq!(none.q, 0.0);

        let leo = ShiftParameter::new(1.431_847_830_664_789e-10, ShiftDirection::Down).unwrap();
        let r = overlap_gaussian_closed(&p, &leo).unwrap();
        assert!(((r.q - 2.6e-3) / 2.6e-3).abs() < 0.10);
        assert!((1.0 - r.delta.re - 1.254_952_166_653_996e-3).abs() < 1e-15);

        let far = ShiftParameter::new(3.480_539_095_144_44e-10, ShiftDirection::Up).unwrap();
        let r = overlap_gaussian_closed(&p, &far).unwrap();
        assert!(((r.q - 1.5e-2) / 1.5e-2).abs() < 0.10);
        assert!((r.q - 1.473_026_896_854_260_8e-2).abs() < 1e-15);

        let table = TabulatedPacket::sampled(&GaussianPacket::new(700e12, 1e6).unwrap(), 101).unwrap();
        assert_eq!(
            overlap_gaussian_closed(&table.into(), &leo),
            Err(Error::NotGaussian)
        );
    }

    #[test]
    fn closed_form_small_delta_expansion() {
        let p = blue();
        let delta = 1e-12; // δΩ₀/σ = 7e-4
        let r = overlap_gaussian_closed(&p, &ShiftParameter::new(delta, ShiftDirection::Up).unwrap()).unwrap();
        let x = delta * 700e12 / 1e6;
        let series = 1.0 - x * x / 8.0;
        assert!((r.delta.re - series).abs() < x.powi(4) + 10.0 * delta);
    }

    #[test]
    fn mismatch_q_cases() {
        assert_eq!(mismatch_q(Complex64::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(mismatch_q(Complex64::new(0.0, 0.0)).unwrap(), 1.0);
        let q = mismatch_q(Complex64::new(1.0 - 1.3e-3, 0.0)).unwrap();
        assert!((q - 2.598_31e-3).abs() < 1e-9);
        assert!(mismatch_q(Complex64::new(1.0 + 1e-6, 0.0)).is_err());
        assert_eq!(mismatch_q(Complex64::new(1.0 + 1e-12, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn union_merges_overlaps() {
        assert_eq!(union((0.0, 2.0), (1.0, 3.0)), vec![(0.0, 3.0)]);
        assert_eq!(union((4.0, 5.0), (0.0, 1.0)), vec![(0.0, 1.0), (4.0, 5.0)]);
    }
}
