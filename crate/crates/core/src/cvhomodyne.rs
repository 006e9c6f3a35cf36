//! Balanced homodyne detection of a coherent signal against a strong local
//! oscillator sent along the same link.
//!
//! Both beams come from one source, so curvature rescales their frequency
//! distributions identically and the measured quadrature is unaffected.
//! [`curvature_invariance_report`] checks that premise numerically for a
//! set of links.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spacetime::{Body, Observer};
use crate::wavepacket::{overlap_quadrature, WavePacket};
use crate::{Error, Result};

/// `|β| / |α|` above which the variance drops the `|α|²` term.
pub const STRONG_OSCILLATOR_RATIO: f64 = 10.0;

/// Tolerance on `|1 − Δ|` between the received signal and oscillator modes.
pub const OVERLAP_TOLERANCE: f64 = 1e-12;

/// Signal displacement `alpha` and oscillator displacement `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodynePrep {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl HomodynePrep {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        for (name, z) in [("alpha", alpha), ("beta", beta)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Rotates both displacements so that `beta` is real and non-negative.
    /// Returns `(alpha', |beta|)`.
    pub fn in_oscillator_frame(&self) -> (Complex64, f64) {
        let b = self.beta.norm();
        if b == 0.0 {
            return (self.alpha, 0.0);
        }
        (self.alpha * (self.beta.conj() / b), b)
    }

    pub fn strong_oscillator(&self) -> bool {
        self.beta.norm() >= STRONG_OSCILLATOR_RATIO * self.alpha.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneResult {
    /// Mean difference photocount `β(α* + α)`.
    pub x: f64,
    /// Variance; `2β²` for a strong oscillator, otherwise `exact_v`.
    pub v: f64,
    /// `2(β² + |α|²)`.
    pub exact_v: f64,
}

pub fn homodyne_expectation(prep: &HomodynePrep) -> HomodyneResult {
    let (alpha, beta) = prep.in_oscillator_frame();
    let x = 2.0 * beta * alpha.re;
    let exact_v = 2.0 * (beta * beta + alpha.norm_sqr());
    let v = if prep.strong_oscillator() { 2.0 * beta * beta } else { exact_v };
    HomodyneResult { x, v, exact_v }
}

/// One link to test. `oscillator` overrides the shared source for the local
/// oscillator, which models a badly prepared reference beam.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceScenario {
    pub id: String,
    pub body: Body,
    pub emitter: Observer,
    pub receiver: Observer,
    pub oscillator: Option<WavePacket>,
}

impl InvarianceScenario {
    pub fn shared(id: impl Into<String>, body: Body, emitter: Observer, receiver: Observer) -> Self {
        Self {
            id: id.into(),
            body,
            emitter,
            receiver,
            oscillator: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub scenario_id: String,
    pub chi: f64,
    /// `|Δ|` between the received signal and oscillator modes.
    pub overlap: f64,
    /// `None` when the modes differ and the quadrature is not defined.
    pub x: Option<f64>,
    pub v: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub rows: Vec<InvarianceRow>,
    /// Every row passed and all reported (X, V) pairs are bit-identical.
    pub pass: bool,
}

/// Propagates signal and oscillator over each link, checks that they still
/// occupy the same mode, and reports the homodyne moments per link.
pub fn curvature_invariance_report(
    prep: &HomodynePrep,
    source: &WavePacket,
    scenarios: &[InvarianceScenario],
) -> Result<InvarianceReport> {
    let moments = homodyne_expectation(prep);
    let mut rows = Vec::with_capacity(scenarios.len());
    for sc in scenarios {
        let ln_chi = -sc.body.ln_frequency_ratio(&sc.emitter, &sc.receiver)?;
        let oscillator = sc.oscillator.as_ref().unwrap_or(source);
        let signal_rx = source.propagate_ln(ln_chi);
        let oscillator_rx = oscillator.propagate_ln(ln_chi);
        let overlap = overlap_quadrature(&signal_rx, &oscillator_rx)?.delta;
        let matched = (Complex64::new(1.0, 0.0) - overlap).norm() <= OVERLAP_TOLERANCE;
        if !matched {
            log::warn!("scenario {}: signal/oscillator overlap {}", sc.id, overlap.norm());
        }
        rows.push(InvarianceRow {
            scenario_id: sc.id.clone(),
            chi: ln_chi.exp(),
            overlap: overlap.norm(),
            x: matched.then_some(moments.x),
            v: matched.then_some(moments.v),
            pass: matched,
        });
    }
    let identical = rows
        .windows(2)
        .all(|w| w[0].x.map(f64::to_bits) == w[1].x.map(f64::to_bits) && w[0].v.map(f64::to_bits) == w[1].v.map(f64::to_bits));
    let pass = identical && rows.iter().all(|r| r.pass);
    Ok(InvarianceReport { rows, pass })
}
