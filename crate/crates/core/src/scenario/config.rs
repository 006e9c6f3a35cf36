//! Scenario configuration: strict JSON schema with named presets.
//!
//! `body`, `emitter`, `receiver` and `source` each accept either a preset
//! name or an explicit object. Presets are expanded at load time; saving
//! writes explicit objects, except for an infinitely distant station, which
//! JSON can only express through the `"far_field"` preset.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constants::{EARTH_MASS, EARTH_RADIUS, ISS_ORBIT_RADIUS};
use crate::entangleswap::MIN_MONTE_CARLO_TRIALS;
use crate::spacetime::{Body, Motion, Observer};
use crate::wavepacket::{GaussianPacket, WavePacket};
use crate::{Error, Result};

/// Cavity-enhanced down-conversion source near 430 nm.
pub const SPDC_BLUE: SourceConfig = SourceConfig {
    peak_hz: 700e12,
    width_hz: 1e6,
};

/// Rubidium-vapour single-photon source.
pub const RB_VAPOR: SourceConfig = SourceConfig {
    peak_hz: 380e12,
    width_hz: 5e6,
};

pub const BODY_PRESETS: &[&str] = &["earth"];
pub const OBSERVER_PRESETS: &[&str] = &["surface", "iss", "far_field"];
pub const SOURCE_PRESETS: &[&str] = &["spdc_blue", "rb_vapor"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub mass_kg: f64,
    pub radius_m: f64,
}

impl BodyConfig {
    pub fn earth() -> Self {
        Self {
            mass_kg: EARTH_MASS,
            radius_m: EARTH_RADIUS,
        }
    }

    pub fn to_body(&self) -> Result<Body> {
        Body::new(self.mass_kg, self.radius_m)
    }
}

fn default_motion() -> Motion {
    Motion::Static
}

/// A station. `radius_m` is infinite for the far-field preset.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    pub radius_m: f64,
    #[serde(default = "default_motion")]
    pub motion: Motion,
}

impl ObserverConfig {
    pub fn surface() -> Self {
        Self {
            radius_m: EARTH_RADIUS,
            motion: Motion::Static,
        }
    }

    pub fn iss() -> Self {
        Self {
            radius_m: ISS_ORBIT_RADIUS,
            motion: Motion::CircularOrbit,
        }
    }

    pub fn fixed_at(radius_m: f64) -> Self {
        Self {
            radius_m,
            motion: Motion::Static,
        }
    }

    pub fn far_field() -> Self {
        Self {
            radius_m: f64::INFINITY,
            motion: Motion::Static,
        }
    }

    pub fn to_observer(&self) -> Result<Observer> {
        Observer::new(self.radius_m, self.motion)
    }

    fn to_json(self) -> Value {
        if self.radius_m.is_infinite() {
            json!("far_field")
        } else {
            json!({ "radius_m": self.radius_m, "motion": self.motion })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub peak_hz: f64,
    pub width_hz: f64,
}

impl SourceConfig {
    pub fn packet(&self) -> Result<WavePacket> {
        GaussianPacket::new(self.peak_hz, self.width_hz).map(WavePacket::Gaussian)
    }
}

/// A displacement given either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexInput {
    pub fn value(&self) -> Complex64 {
        match *self {
            ComplexInput::Real(re) => Complex64::new(re, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Protocol {
    SinglePhoton,
    Coherent { alpha: ComplexInput },
    Tmss { s: f64 },
    EntangleQkd,
    CvHomodyne { alpha: ComplexInput, beta: ComplexInput },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A fully expanded, validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub body: BodyConfig,
    pub emitter: ObserverConfig,
    pub receiver: ObserverConfig,
    pub source: SourceConfig,
    pub protocol: Protocol,
    pub monte_carlo: Option<MonteCarloConfig>,
    pub output: Option<OutputConfig>,
}

/// The document as written, before presets are expanded.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    body: Value,
    emitter: Value,
    receiver: Value,
    source: Value,
    protocol: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<Value>,
}

fn typed<T: DeserializeOwned>(path: &str, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::config(path, e.to_string()))
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive and finite, got {x}")))
    }
}

fn unknown_preset(path: &str, name: &str, known: &[&str]) -> Error {
    Error::config(path, format!("unknown preset `{name}` (expected one of {})", known.join(", ")))
}

fn parse_body(value: Value) -> Result<BodyConfig> {
    let body = match value {
        Value::String(name) => match name.as_str() {
            "earth" => BodyConfig::earth(),
            other => return Err(unknown_preset("body", other, BODY_PRESETS)),
        },
        other => typed::<BodyConfig>("body", other)?,
    };
    positive("body.mass_kg", body.mass_kg)?;
    positive("body.radius_m", body.radius_m)?;
    Ok(body)
}

fn parse_observer(path: &str, value: Value) -> Result<ObserverConfig> {
    let obs = match value {
        Value::String(name) => match name.as_str() {
            "surface" => ObserverConfig::surface(),
            "iss" => ObserverConfig::iss(),
            "far_field" => ObserverConfig::far_field(),
            other => return Err(unknown_preset(path, other, OBSERVER_PRESETS)),
        },
        other => {
            let obs = typed::<ObserverConfig>(path, other)?;
            positive(&format!("{path}.radius_m"), obs.radius_m)?;
            obs
        }
    };
    Ok(obs)
}

fn parse_source(value: Value) -> Result<SourceConfig> {
    let source = match value {
        Value::String(name) => match name.as_str() {
            "spdc_blue" => SPDC_BLUE,
            "rb_vapor" => RB_VAPOR,
            other => return Err(unknown_preset("source", other, SOURCE_PRESETS)),
        },
        other => typed::<SourceConfig>("source", other)?,
    };
    positive("source.peak_hz", source.peak_hz)?;
    positive("source.width_hz", source.width_hz)?;
    source.packet().map_err(|e| Error::config("source", e.to_string()))?;
    Ok(source)
}

fn finite_complex(path: &str, z: ComplexInput) -> Result<()> {
    let v = z.value();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, "must be finite"))
    }
}

fn parse_protocol(value: Value) -> Result<Protocol> {
    let protocol = typed::<Protocol>("protocol", value)?;
    match protocol {
        Protocol::Coherent { alpha } => finite_complex("protocol.alpha", alpha)?,
        Protocol::Tmss { s } => {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::config("protocol.s", format!("must be finite and ≥ 0, got {s}")));
            }
        }
        Protocol::CvHomodyne { alpha, beta } => {
            finite_complex("protocol.alpha", alpha)?;
            finite_complex("protocol.beta", beta)?;
        }
        Protocol::SinglePhoton | Protocol::EntangleQkd => {}
    }
    Ok(protocol)
}

impl TryFrom<RawConfig> for ScenarioConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        let body = parse_body(raw.body)?;
        let emitter = parse_observer("emitter", raw.emitter)?;
        let receiver = parse_observer("receiver", raw.receiver)?;
        let source = parse_source(raw.source)?;
        let protocol = parse_protocol(raw.protocol)?;
        let monte_carlo = match raw.monte_carlo {
            Some(v) => {
                let mc = typed::<MonteCarloConfig>("monte_carlo", v)?;
                if mc.trials < MIN_MONTE_CARLO_TRIALS {
                    return Err(Error::config(
                        "monte_carlo.trials",
                        format!("must be at least {MIN_MONTE_CARLO_TRIALS}, got {}", mc.trials),
                    ));
                }
                Some(mc)
            }
            None => None,
        };
        let output = raw.output.map(|v| typed::<OutputConfig>("output", v)).transpose()?;
        Ok(Self {
            body,
            emitter,
            receiver,
            source,
            protocol,
            monte_carlo,
            output,
        })
    }
}

impl From<&ScenarioConfig> for RawConfig {
    fn from(c: &ScenarioConfig) -> Self {
        RawConfig {
            body: json!(c.body),
            emitter: c.emitter.to_json(),
            receiver: c.receiver.to_json(),
            source: json!(c.source),
            protocol: json!(c.protocol),
            monte_carlo: c.monte_carlo.map(|m| json!(m)),
            output: c.output.as_ref().map(|o| json!(o)),
        }
    }
}

impl ScenarioConfig {
    /// Earth surface to the given receiver with the blue down-conversion source.
    pub fn earth_link(receiver: ObserverConfig, protocol: Protocol) -> Self {
        Self {
            body: BodyConfig::earth(),
            emitter: ObserverConfig::surface(),
            receiver,
            source: SPDC_BLUE,
            protocol,
            monte_carlo: None,
            output: None,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::config("$", e.to_string()))?;
        Self::try_from(raw)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&RawConfig::from(self)).expect("config values are always serializable")
    }
}

impl Serialize for ScenarioConfig {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawConfig::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScenarioConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConfig::deserialize(deserializer)?;
        Self::try_from(raw).map_err(serde::de::Error::custom)
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path.as_ref())?;
    ScenarioConfig::from_json_str(&text)
}

pub fn save_config(config: &ScenarioConfig, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, config.to_json_string() + "\n")?;
    Ok(())
}
