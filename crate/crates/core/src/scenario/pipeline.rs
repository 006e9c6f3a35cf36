use serde::Serialize;

use super::config::{Protocol, ScenarioConfig};
use super::output::{Cell, Column, Table};
use crate::cvhomodyne::{homodyne_expectation, HomodynePrep};
use crate::entangleswap::{negativity_closed, qber_closed, qber_monte_carlo};
use crate::fidelity::{coherent_fidelity, single_photon_fidelity, tmss_fidelity, CoherentAmplitude, SqueezingStrength};
use crate::wavepacket::overlap_gaussian_closed;
use crate::{Complex64, Result};

/// A number together with the formula that produced it. `value` is `None`
/// when the quantity does not apply to the selected protocol or diverges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tagged {
    pub value: Option<f64>,
    pub formula: String,
}

impl Tagged {
    fn new(value: f64, formula: impl Into<String>) -> Self {
        Self {
            value: Some(value),
            formula: formula.into(),
        }
    }

    fn absent(reason: impl Into<String>) -> Self {
        Self {
            value: None,
            formula: reason.into(),
        }
    }
}

pub const NOT_APPLICABLE: &str = "n/a for this protocol";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub chi: Tagged,
    pub delta: Tagged,
    #[serde(rename = "Delta")]
    pub overlap: Tagged,
    pub q: Tagged,
    pub fidelity: Tagged,
    pub negativity: Tagged,
    pub qber: Tagged,
    pub travel_time_s: Tagged,
    pub redshift_ratio: Tagged,
    pub qber_monte_carlo: Tagged,
    pub homodyne_x: Tagged,
    pub homodyne_v: Tagged,
}

/// Column names, in output order.
pub const RESULT_FIELDS: [&str; 12] = [
    "chi",
    "delta",
    "Delta",
    "q",
    "fidelity",
    "negativity",
    "qber",
    "travel_time_s",
    "redshift_ratio",
    "qber_monte_carlo",
    "homodyne_x",
    "homodyne_v",
];

impl ScenarioResult {
    pub fn fields(&self) -> [&Tagged; 12] {
        [
            &self.chi,
            &self.delta,
            &self.overlap,
            &self.q,
            &self.fidelity,
            &self.negativity,
            &self.qber,
            &self.travel_time_s,
            &self.redshift_ratio,
            &self.qber_monte_carlo,
            &self.homodyne_x,
            &self.homodyne_v,
        ]
    }

    pub fn columns(&self) -> Vec<Column> {
        RESULT_FIELDS
            .iter()
            .zip(self.fields())
            .map(|(name, t)| Column::new(*name, t.formula.clone()))
            .collect()
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.fields().iter().map(|t| Cell::from(t.value)).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(self.columns());
        t.push(self.cells());
        t
    }
}

/// Geometry → overlap → protocol for one configuration.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    evaluate(config, None)
}

/// As [`run_scenario`], but with the mismatch `q` imposed instead of derived
/// from the geometry; the geometric columns are still reported.
pub fn run_with_mismatch(config: &ScenarioConfig, q: f64) -> Result<ScenarioResult> {
    crate::entangleswap::check_q(q)?;
    evaluate(config, Some(q))
}

fn evaluate(config: &ScenarioConfig, imposed_q: Option<f64>) -> Result<ScenarioResult> {
    let body = config.body.to_body()?;
    let emitter = config.emitter.to_observer()?;
    let receiver = config.receiver.to_observer()?;
    let packet = config.source.packet()?;

    let shift = body.shift_parameter(&emitter, &receiver)?;
    let chi = body.propagation_ratio(&emitter, &receiver)?;
    let redshift = body.redshift_total(&emitter, &receiver)?;
    let travel = if emitter.radius.is_finite() && receiver.radius.is_finite() {
        Tagged::new(
            body.coordinate_travel_time(emitter.radius, receiver.radius)?,
            "t = |r_*(r_B) - r_*(r_A)|/c, r_* = r + r_s ln(r/r_s - 1)",
        )
    } else {
        Tagged::absent("infinite (station at infinity)")
    };

    let (overlap, q) = match imposed_q {
        None => {
            let o = overlap_gaussian_closed(&packet, &shift)?;
            (
                Tagged::new(
                    o.delta.re,
                    "Delta = sqrt(2k/(1+k^2)) exp(-delta^2 Omega0^2/(4(1+k^2) sigma^2)), k = 1 +/- delta",
                ),
                Tagged::new(o.q, "q = 1 - |Delta|^2"),
            )
        }
        Some(q) => (
            Tagged::new((1.0 - q).sqrt(), "Delta = sqrt(1 - q)"),
            Tagged::new(q, "q (imposed)"),
        ),
    };
    let q_value = q.value.expect("q is always computed");
    let delta_c = Complex64::new(overlap.value.expect("Delta is always computed"), 0.0);

    let mut result = ScenarioResult {
        chi: Tagged::new(chi, "chi = Omega_A/Omega_B = R^(-1/2)"),
        delta: Tagged::new(shift.delta, "delta = |R^(1/4) - 1|"),
        overlap,
        q,
        fidelity: Tagged::absent(NOT_APPLICABLE),
        negativity: Tagged::absent(NOT_APPLICABLE),
        qber: Tagged::absent(NOT_APPLICABLE),
        travel_time_s: travel,
        redshift_ratio: Tagged::new(
            redshift,
            "Omega_B/Omega_A = sqrt(R), R = (1 - r_s/r_A)/(1 - k r_s/r_B), k = 1 static, 3/2 orbiting",
        ),
        qber_monte_carlo: Tagged::absent(NOT_APPLICABLE),
        homodyne_x: Tagged::absent(NOT_APPLICABLE),
        homodyne_v: Tagged::absent(NOT_APPLICABLE),
    };

    match config.protocol {
        Protocol::SinglePhoton => {
            result.fidelity = Tagged::new(single_photon_fidelity(delta_c)?, "F = |Delta|^2");
        }
        Protocol::Coherent { alpha } => {
            let a = CoherentAmplitude::new(alpha.value())?;
            result.fidelity = Tagged::new(coherent_fidelity(delta_c, a)?, "F = exp(-2|alpha|^2 (1 - Re Delta))");
        }
        Protocol::Tmss { s } => {
            let s = SqueezingStrength::new(s)?;
            result.fidelity = Tagged::new(tmss_fidelity(delta_c, s)?, "F = 1/|(1 - Delta) cosh^2 s + Delta|^2");
        }
        Protocol::EntangleQkd => {
            let r = (1.0 - q_value).sqrt();
            result.fidelity = Tagged::new(0.5 * (1.0 + r), "F = <Psi+|rho+|Psi+> = (1 + sqrt(1 - q))/2");
            result.negativity = Tagged::new(negativity_closed(q_value)?, "N = sqrt(1 - q)/2");
            result.qber = Tagged::new(qber_closed(q_value)?, "QBER = q/2");
            result.qber_monte_carlo = match config.monte_carlo {
                Some(mc) => Tagged::new(
                    qber_monte_carlo(q_value, mc.trials, mc.seed)?,
                    format!("Monte Carlo over memory-pair types, trials = {}, seed = {}", mc.trials, mc.seed),
                ),
                None => Tagged::absent("not requested"),
            };
        }
        Protocol::CvHomodyne { alpha, beta } => {
            let prep = HomodynePrep::new(alpha.value(), beta.value())?;
            let h = homodyne_expectation(&prep);
            result.homodyne_x = Tagged::new(h.x, "X = beta (alpha* + alpha), beta real");
            let v_formula = if prep.strong_oscillator() {
                "V = 2 beta^2 (|beta| >= 10 |alpha|)"
            } else {
                "V = 2(beta^2 + |alpha|^2)"
            };
            result.homodyne_v = Tagged::new(h.v, v_formula);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::{BodyConfig, MonteCarloConfig, ObserverConfig};
    use crate::wavepacket::WavePacket;

    fn qkd(receiver: ObserverConfig) -> ScenarioConfig {
        ScenarioConfig::earth_link(receiver, Protocol::EntangleQkd)
    }

    #[test]
    fn leo_link() {
        let r = run_scenario(&qkd(ObserverConfig::iss())).unwrap();
        let q = r.q.value.unwrap();
        assert!((q - 2.508_329_428_367_4e-3).abs() < 1e-15);
        assert!(((q - 2.6e-3) / 2.6e-3).abs() < 0.10);
        assert_eq!(r.qber.value.unwrap(), q / 2.0);
        assert!(r.travel_time_s.value.unwrap() > 1.3e-3);
        assert!(r.homodyne_x.value.is_none());
    }

    #[test]
    fn far_field_link() {
        let r = run_scenario(&qkd(ObserverConfig::far_field())).unwrap();
        let q = r.q.value.unwrap();
        assert!((q - 1.473_026_896_854_260_8e-2).abs() < 1e-14);
        assert!((r.negativity.value.unwrap() - 0.496_303_770_646_43).abs() < 1e-12);
        assert!((r.qber.value.unwrap() - 7.5e-3).abs() < 1e-3);
        assert!(r.travel_time_s.value.is_none());
    }

    #[test]
    fn flat_body() {
        let mut c = qkd(ObserverConfig::iss());
        c.body = BodyConfig {
            mass_kg: 1e-20,
            radius_m: 6371e3,
        };
        let r = run_scenario(&c).unwrap();
        assert!(r.q.value.unwrap() < 1e-60);
        assert_eq!(r.fidelity.value.unwrap(), 1.0);
        assert_eq!(r.negativity.value.unwrap(), 0.5);
        assert!(r.qber.value.unwrap() < 1e-60);
    }

    #[test]
    fn pipeline_matches_manual_composition() {
        let c = qkd(ObserverConfig::iss());
        let body = c.body.to_body().unwrap();
        let shift = body
            .shift_parameter(&c.emitter.to_observer().unwrap(), &c.receiver.to_observer().unwrap())
            .unwrap();
        let packet = WavePacket::gaussian(700e12, 1e6).unwrap();
        let manual = overlap_gaussian_closed(&packet, &shift).unwrap();
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.q.value.unwrap().to_bits(), manual.q.to_bits());
        assert_eq!(r.overlap.value.unwrap().to_bits(), manual.delta.re.to_bits());
    }

    #[test]
    fn protocols_fill_their_columns() {
        use crate::scenario::config::ComplexInput;
        let mut c = qkd(ObserverConfig::iss());
        c.protocol = Protocol::Tmss { s: 10.0 };
        let r = run_scenario(&c).unwrap();
        assert!(r.fidelity.value.unwrap() < 1e-3);
        assert!(r.qber.value.is_none());
        c.protocol = Protocol::CvHomodyne {
            alpha: ComplexInput::Real(1.0),
            beta: ComplexInput::Real(100.0),
        };
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.homodyne_x.value, Some(200.0));
        assert_eq!(r.homodyne_v.value, Some(20_000.0));
        c.protocol = Protocol::Coherent {
            alpha: ComplexInput::Real(0.0),
        };
        assert_eq!(run_scenario(&c).unwrap().fidelity.value, Some(1.0));
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let mut c = qkd(ObserverConfig::far_field());
        c.monte_carlo = Some(MonteCarloConfig { trials: 20_000, seed: 5 });
        let a = run_scenario(&c).unwrap();
        let b = run_scenario(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.qber_monte_carlo.formula.contains("seed = 5"));
    }

    #[test]
    fn imposed_mismatch() {
        let c = qkd(ObserverConfig::iss());
        let r = run_with_mismatch(&c, 0.5).unwrap();
        assert!((r.negativity.value.unwrap() - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!(run_with_mismatch(&c, 1.5).is_err());
    }

    #[test]
    fn table_has_one_tag_per_column() {
        let r = run_scenario(&qkd(ObserverConfig::iss())).unwrap();
        let t = r.to_table();
        assert_eq!(t.columns.len(), RESULT_FIELDS.len());
        assert!(t.columns.iter().all(|c| !c.formula.is_empty()));
        let json = serde_json::to_value(&r).unwrap();
        for name in RESULT_FIELDS {
            assert!(json.get(name).is_some(), "{name}");
        }
    }
}
