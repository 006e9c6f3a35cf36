//! Single-click entanglement distribution between two memories.
//!
//! Each memory emits one photon entangled with its excitation. Both photons
//! meet on two balanced beam splitters, one for the expected spectral modes
//! (a′, b′) and one for the orthogonal modes (c′, d′); a number-resolving
//! detector on either output path heralds an entangled memory pair. A
//! mismatch `q` between the modes leaves which-path information in c′ and
//! dephases the heralded state.

mod density;
mod fock;
pub mod linalg;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use density::{negativity, partial_transpose, MemoryDensity};
pub use fock::{apply_beamsplitter, build_initial_state, FockVector, Mode, Occupation, MAX_OCCUPANCY};

use crate::{Error, Result};

pub const MIN_MONTE_CARLO_TRIALS: u64 = 10_000;

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("q", format!("must lie in [0, 1], got {q}")));
    }
    Ok(())
}

/// Which output path of the beam splitters clicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Detector {
    /// Path carrying ã and c̃.
    D1,
    /// Path carrying b̃ and d̃.
    D2,
}

impl Detector {
    fn slots(self) -> ([usize; 2], [usize; 2]) {
        let path_1 = [Mode::APrime.index(), Mode::CPrime.index()];
        let path_2 = [Mode::BPrime.index(), Mode::DPrime.index()];
        match self {
            Detector::D1 => (path_1, path_2),
            Detector::D2 => (path_2, path_1),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Detector::D1 => Detector::D2,
            Detector::D2 => Detector::D1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickOutcome {
    pub which: Detector,
    pub probability: f64,
    /// Heralded memory state; `None` when the click has zero probability.
    pub memory_state: Option<MemoryDensity>,
    /// Weight of the heralded branch outside the single-excitation memory
    /// subspace. Zero whenever two-photon (bunched) amplitudes are excluded.
    pub leakage: f64,
    /// Probability that the clicking path received two photons while the
    /// other stayed dark; these events are discarded.
    pub discarded_multi_photon: f64,
}

/// Mixes (a′, b′) and (c′, d′) on balanced beam splitters.
pub fn mix(state: &FockVector) -> Result<FockVector> {
    state
        .apply_beamsplitter(Mode::APrime, Mode::BPrime)?
        .apply_beamsplitter(Mode::CPrime, Mode::DPrime)
}

/// Number-resolving click: exactly one photon on the detector's path and
/// none on the other. Returns the click probability and the memory state
/// obtained by tracing out the four optical modes.
pub fn detect(state: &FockVector, which: Detector) -> Result<ClickOutcome> {
    let (lit, dark) = which.slots();
    let mut branches: BTreeMap<[u8; 4], [Complex64; 4]> = BTreeMap::new();
    let mut probability = 0.0;
    let mut discarded = 0.0;
    for (occ, &amp) in state.iter() {
        if dark.iter().any(|&i| occ[i] != 0) {
            continue;
        }
        let on_path: u8 = lit.iter().map(|&i| occ[i]).sum();
        if on_path >= 2 {
            discarded += amp.norm_sqr();
        }
        if on_path != 1 {
            continue;
        }
        probability += amp.norm_sqr();
        let optical = [occ[2], occ[3], occ[4], occ[5]];
        let memory = 2 * occ[0] as usize + occ[1] as usize;
        branches.entry(optical).or_insert([Complex64::new(0.0, 0.0); 4])[memory] += amp;
    }
    if probability == 0.0 {
        return Ok(ClickOutcome {
            which,
            probability: 0.0,
            memory_state: None,
            leakage: 0.0,
            discarded_multi_photon: discarded,
        });
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for psi in branches.values() {
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += psi[i] * psi[j].conj() / probability;
            }
        }
    }
    let leakage = rho[0][0].re + rho[3][3].re;
    Ok(ClickOutcome {
        which,
        probability: probability.min(1.0),
        memory_state: Some(MemoryDensity::new(rho)?),
        leakage,
        discarded_multi_photon: discarded,
    })
}

/// Full protocol: initial state for mismatch `q`, both beam splitters, click.
pub fn simulate(q: f64, which: Detector) -> Result<ClickOutcome> {
    let mixed = mix(&build_initial_state(q)?)?;
    detect(&mixed, which)
}

/// `ρ± = ½[(1 ± √(1−q))P₊ + (1 ∓ √(1−q))P₋]`, with `+` for a D1 click.
pub fn memory_state_closed(q: f64, which: Detector) -> Result<MemoryDensity> {
    check_q(q)?;
    let r = match which {
        Detector::D1 => (1.0 - q).sqrt(),
        Detector::D2 => -(1.0 - q).sqrt(),
    };
    let plus = MemoryDensity::bell(true);
    let minus = MemoryDensity::bell(false);
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = 0.5 * ((1.0 + r) * plus.element(i, j) + (1.0 - r) * minus.element(i, j));
        }
    }
    MemoryDensity::new(m)
}

/// `N = √(1−q)/2`.
pub fn negativity_closed(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(0.5 * (1.0 - q).sqrt())
}

/// Probabilities that the two parties' sifted bits agree or differ:
/// `(p_share, p_diff) = ((2 − q)/2, q/2)`.
pub fn bit_probabilities(q: f64) -> Result<(f64, f64)> {
    check_q(q)?;
    Ok((1.0 - 0.5 * q, 0.5 * q))
}

/// `QBER = q/2`.
pub fn qber_closed(q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(0.5 * q)
}

/// Stochastic estimate of the QBER. Each trial heralds two memory pairs,
/// each independently of type `+` with probability `(1 + √(1−q))/2`; the
/// parties' bits differ exactly when the two types differ.
pub fn qber_monte_carlo(q: f64, trials: u64, seed: u64) -> Result<f64> {
    check_q(q)?;
    if trials < MIN_MONTE_CARLO_TRIALS {
        return Err(Error::param("trials", format!("need at least {MIN_MONTE_CARLO_TRIALS}, got {trials}")));
    }
    let p_plus = 0.5 * (1.0 + (1.0 - q).sqrt());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut differ = 0u64;
    for _ in 0..trials {
        let first = rng.random_bool(p_plus);
        let second = rng.random_bool(p_plus);
        if first != second {
            differ += 1;
        }
    }
    Ok(differ as f64 / trials as f64)
}
