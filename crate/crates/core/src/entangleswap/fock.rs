use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MODES: usize = 6;
/// Per-mode occupancy cap. Exact here: the protocol never holds more than two photons.
pub const MAX_OCCUPANCY: u8 = 2;

pub type Occupation = [u8; MODES];

/// Slots of the six-mode register. After mixing, the primed slots hold the
/// beam-splitter output modes ã, b̃ (from a′, b′) and c̃, d̃ (from c′, d′).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Alice's memory.
    A,
    /// Bob's memory.
    B,
    APrime,
    BPrime,
    /// Component of Bob's photon orthogonal to the expected mode.
    CPrime,
    /// Orthogonal partner of a′; always starts in vacuum.
    DPrime,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 1,
            Mode::APrime => 2,
            Mode::BPrime => 3,
            Mode::CPrime => 4,
            Mode::DPrime => 5,
        }
    }
}

/// Sparse state vector over six bosonic modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    terms: BTreeMap<Occupation, Complex64>,
}

impl FockVector {
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert([0; MODES], Complex64::new(1.0, 0.0));
        Self { terms }
    }

    /// Builds a vector from explicit terms; duplicate tuples are summed.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut out = Self::default();
        for (occ, amp) in terms {
            if occ.iter().any(|&n| n > MAX_OCCUPANCY) {
                return Err(Error::OccupancyOverflow { max: MAX_OCCUPANCY });
            }
            if occ.iter().map(|&n| n as u32).sum::<u32>() > MAX_OCCUPANCY as u32 {
                return Err(Error::param("state", format!("{occ:?} holds more than two photons")));
            }
            out.add(occ, amp);
        }
        Ok(out)
    }

    fn add(&mut self, occ: Occupation, amp: Complex64) {
        let entry = self.terms.entry(occ).or_insert(Complex64::new(0.0, 0.0));
        *entry += amp;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&occ);
        }
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    /// Balanced beam splitter between slots `x` and `y`:
    /// `x† → (x̃† + ỹ†)/√2`, `y† → (x̃† − ỹ†)/√2`, results written back into
    /// the same two slots.
    pub fn apply_beamsplitter(&self, x: Mode, y: Mode) -> Result<Self> {
        apply_beamsplitter(self, x, y)
    }
}

fn factorial(n: u8) -> f64 {
    (1..=n as u32).map(f64::from).product()
}

fn binomial(n: u8, k: u8) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// See [`FockVector::apply_beamsplitter`].
pub fn apply_beamsplitter(state: &FockVector, x: Mode, y: Mode) -> Result<FockVector> {
    let (ix, iy) = (x.index(), y.index());
    if ix == iy {
        return Err(Error::param("mode_y", "beam-splitter modes must be distinct"));
    }
    let mut out = FockVector::default();
    for (occ, &amp) in state.iter() {
        let (m, n) = (occ[ix], occ[iy]);
        // (x†)^m (y†)^n / √(m! n!) expanded in the output modes
        let norm = (factorial(m) * factorial(n)).sqrt() * 2f64.powf(0.5 * f64::from(m + n));
        for j in 0..=m {
            for k in 0..=n {
                let p = j + k;
                let r = m + n - p;
                if p > MAX_OCCUPANCY || r > MAX_OCCUPANCY {
                    return Err(Error::OccupancyOverflow { max: MAX_OCCUPANCY });
                }
                let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                let coef = sign * binomial(m, j) * binomial(n, k) * (factorial(p) * factorial(r)).sqrt() / norm;
                let mut target = *occ;
                target[ix] = p;
                target[iy] = r;
                out.add(target, amp * coef);
            }
        }
    }
    Ok(out)
}

/// Two memory excitations shared with two photons, Bob's photon split into
/// the expected mode b′ (weight 1 − q) and the orthogonal mode c′ (weight q):
///
/// `(|1⟩_a|0⟩_{a′} + |0⟩_a|1⟩_{a′})/√2 ⊗ (|1⟩_b|0⟩ + |0⟩_b(√(1−q) b′† + √q c′†)|0⟩)/√2`
pub fn build_initial_state(q: f64) -> Result<FockVector> {
    super::check_q(q)?;
    let keep = (1.0 - q).sqrt();
    let leak = q.sqrt();
    let alice = [([1, 0, 0, 0, 0, 0], 1.0), ([0, 0, 1, 0, 0, 0], 1.0)];
    let bob = [([0, 1, 0, 0, 0, 0], 1.0), ([0, 0, 0, 1, 0, 0], keep), ([0, 0, 0, 0, 1, 0], leak)];
    let mut terms = Vec::new();
    for (oa, ca) in alice {
        for (ob, cb) in bob {
            let c = 0.5 * ca * cb;
            if c != 0.0 {
                let occ = std::array::from_fn(|i| oa[i] + ob[i]);
                terms.push((occ, Complex64::new(c, 0.0)));
            }
        }
    }
    FockVector::from_terms(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: Mode = Mode::APrime;
    const Y: Mode = Mode::BPrime;

    fn single(occ: Occupation) -> FockVector {
        FockVector::from_terms([(occ, Complex64::new(1.0, 0.0))]).unwrap()
    }

    #[test]
    fn vacuum_is_fixed() {
        let out = FockVector::vacuum().apply_beamsplitter(X, Y).unwrap();
        assert_eq!(out, FockVector::vacuum());
    }

    #[test]
    fn single_photon_splits_evenly() {
        let out = single([0, 0, 1, 0, 0, 0]).apply_beamsplitter(X, Y).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&[0, 0, 1, 0, 0, 0]).re - h).abs() < 1e-15);
        assert!((out.amplitude(&[0, 0, 0, 1, 0, 0]).re - h).abs() < 1e-15);
        let out = single([0, 0, 0, 1, 0, 0]).apply_beamsplitter(X, Y).unwrap();
        assert!((out.amplitude(&[0, 0, 0, 1, 0, 0]).re + h).abs() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel() {
        let out = single([0, 0, 1, 1, 0, 0]).apply_beamsplitter(X, Y).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&[0, 0, 2, 0, 0, 0]).re - h).abs() < 1e-15);
        assert!((out.amplitude(&[0, 0, 0, 2, 0, 0]).re + h).abs() < 1e-15);
        assert_eq!(out.amplitude(&[0, 0, 1, 1, 0, 0]).norm(), 0.0);
        assert!((out.norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doubly_occupied_input_is_unitary() {
        let out = single([0, 0, 2, 0, 0, 0]).apply_beamsplitter(X, Y).unwrap();
        assert!((out.norm_sq() - 1.0).abs() < 1e-15);
        // |2,0⟩ → (|2,0⟩ + √2|1,1⟩ + |0,2⟩)/2
        assert!((out.amplitude(&[0, 0, 1, 1, 0, 0]).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let back = out.apply_beamsplitter(X, Y).unwrap();
        assert!((back.amplitude(&[0, 0, 2, 0, 0, 0]).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overflow_and_distinct_modes() {
        assert!(single([0, 0, 1, 0, 0, 0]).apply_beamsplitter(X, X).is_err());
        assert!(FockVector::from_terms([([0, 0, 3, 0, 0, 0], Complex64::new(1.0, 0.0))]).is_err());
        assert!(FockVector::from_terms([([1, 1, 1, 0, 0, 0], Complex64::new(1.0, 0.0))]).is_err());
    }

    #[test]
    fn initial_state_endpoints() {
        let flat = build_initial_state(0.0).unwrap();
        assert_eq!(flat.len(), 4);
        for occ in [[1, 1, 0, 0, 0, 0], [0, 1, 1, 0, 0, 0], [1, 0, 0, 1, 0, 0], [0, 0, 1, 1, 0, 0]] {
            assert_eq!(flat.amplitude(&occ), Complex64::new(0.5, 0.0));
        }
        let dark = build_initial_state(1.0).unwrap();
        assert_eq!(dark.amplitude(&[0, 0, 1, 1, 0, 0]).norm(), 0.0);
        assert_eq!(dark.amplitude(&[0, 0, 1, 0, 1, 0]), Complex64::new(0.5, 0.0));
        for q in [0.0, 1e-3, 0.3, 1.0] {
            assert!((build_initial_state(q).unwrap().norm_sq() - 1.0).abs() < 1e-15);
        }
        assert!(build_initial_state(-0.1).is_err());
        assert!(build_initial_state(1.1).is_err());
    }
}
