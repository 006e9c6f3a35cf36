//! Schwarzschild exterior geometry: metric factor, clock rates, frequency
//! shifts between stations, the tortoise coordinate and radial light travel.
//!
//! Shifts between stations on or near the Earth are of order 10⁻¹⁰, so every
//! "ratio minus one" quantity is computed from a logarithm built with
//! `ln_1p` on an exactly formed difference of radii. Nothing here subtracts
//! two nearly equal metric factors.

use serde::{Deserialize, Serialize};

use crate::constants::{
    EARTH_MASS, EARTH_RADIUS, GRAVITATIONAL_CONSTANT, ISS_ORBIT_RADIUS, SPEED_OF_LIGHT,
};
use crate::{Error, Result};

const RADIUS_AFTER_MAX_ITER: usize = 100;
const RADIUS_AFTER_RESIDUAL: f64 = 1e-9;

/// A spherical gravitating body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Body {
    mass: f64,
    radius: f64,
    schwarzschild_radius: f64,
}

impl Body {
    pub fn new(mass: f64, radius: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::param("mass", format!("must be positive and finite, got {mass}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param(
                "radius",
                format!("must be positive and finite, got {radius}"),
            ));
        }
        let schwarzschild_radius = 2.0 * GRAVITATIONAL_CONSTANT * mass / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
        if radius < 1e3 * schwarzschild_radius {
            log::warn!(
                "body radius {radius} m is within 10³ Schwarzschild radii ({schwarzschild_radius} m); \
                 weak-field assumptions behind the link model may not hold"
            );
        }
        Ok(Self {
            mass,
            radius,
            schwarzschild_radius,
        })
    }

    pub fn earth() -> Self {
        Self::new(EARTH_MASS, EARTH_RADIUS).expect("earth preset is valid")
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `2GM/c²` in meters.
    pub fn schwarzschild_radius(&self) -> f64 {
        self.schwarzschild_radius
    }

    /// Geometric mass `GM/c²` in meters.
    pub fn geometric_mass(&self) -> f64 {
        0.5 * self.schwarzschild_radius
    }

    fn check_outside(&self, r: f64) -> Result<()> {
        if r.is_nan() || r <= self.schwarzschild_radius {
            return Err(Error::InsideHorizon {
                radius: r,
                schwarzschild_radius: self.schwarzschild_radius,
            });
        }
        Ok(())
    }

    /// `f(r) = 1 − r_s/r`.
    pub fn metric_factor(&self, r: f64) -> Result<f64> {
        self.check_outside(r)?;
        Ok(1.0 - self.schwarzschild_radius / r)
    }

    /// `dτ_B/dτ_A = √(f(r_B)/f(r_A))` for two static clocks.
    pub fn proper_time_ratio(&self, r_a: f64, r_b: f64) -> Result<f64> {
        let ln = self.ln_rate_ratio(r_a, r_b, 1.0)?;
        Ok((-0.5 * ln).exp())
    }

    /// Received over emitted frequency, `Ω_B/Ω_A = √(f(r_A)/f(r_B))`, for
    /// static emitter and receiver.
    pub fn redshift_static(&self, r_a: f64, r_b: f64) -> Result<f64> {
        let ln = self.ln_rate_ratio(r_a, r_b, 1.0)?;
        Ok((0.5 * ln).exp())
    }

    /// Received over emitted frequency for a static emitter and a receiver
    /// that is either static or in a circular geodesic orbit:
    /// `√((1 − 2M/r_A)/(1 − 3M/r_B))` in the orbiting case.
    pub fn redshift_total(&self, emitter: &Observer, receiver: &Observer) -> Result<f64> {
        Ok((0.5 * self.ln_link_ratio(emitter, receiver)?).exp())
    }

    /// `ln(Ω_B/Ω_A)` for the link, without forming the ratio itself.
    pub fn ln_frequency_ratio(&self, emitter: &Observer, receiver: &Observer) -> Result<f64> {
        Ok(0.5 * self.ln_link_ratio(emitter, receiver)?)
    }

    /// The factor `χ = Ω_A/Ω_B` by which the received distribution's
    /// argument is scaled, `F_B(Ω) = √χ F_A(χΩ)`.
    pub fn propagation_ratio(&self, emitter: &Observer, receiver: &Observer) -> Result<f64> {
        Ok((-0.5 * self.ln_link_ratio(emitter, receiver)?).exp())
    }

    /// Mode-mismatch parameter `δ = |R^{1/4} − 1|` with `R` the radicand of
    /// [`Body::redshift_total`].
    pub fn shift_parameter(&self, emitter: &Observer, receiver: &Observer) -> Result<ShiftParameter> {
        let ln = self.ln_link_ratio(emitter, receiver)?;
        let direction = if ln < 0.0 {
            ShiftDirection::Up
        } else {
            ShiftDirection::Down
        };
        Ok(ShiftParameter {
            delta: (0.25 * ln).exp_m1().abs(),
            direction,
        })
    }

    /// `r_* = r + r_s ln(r/r_s − 1)`.
    pub fn tortoise(&self, r: f64) -> Result<f64> {
        self.check_outside(r)?;
        let rs = self.schwarzschild_radius;
        if rs == 0.0 || r.is_infinite() {
            return Ok(r);
        }
        Ok(r + rs * ((r - rs) / rs).ln())
    }

    /// Schwarzschild coordinate time for a radial light ray between two radii,
    /// `|r_*(r_to) − r_*(r_from)|/c`.
    pub fn coordinate_travel_time(&self, r_from: f64, r_to: f64) -> Result<f64> {
        self.check_outside(r_from)?;
        self.check_outside(r_to)?;
        Ok(self.tortoise_difference(r_from, r_to).abs() / SPEED_OF_LIGHT)
    }

    /// The radius reached after coordinate time `t` by an outgoing radial
    /// ray that started at `r_0`, i.e. the root of `r_*(r) = r_*(r_0) + ct`.
    ///
    /// Solved for the offset `r − r_0` by Newton iteration safeguarded with
    /// bisection, since `r_*` is strictly increasing. Convergence is declared
    /// once the residual is below 1 nm or at the rounding floor of `ct`.
    pub fn radius_after(&self, r_0: f64, t: f64) -> Result<f64> {
        self.check_outside(r_0)?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param("t", format!("must be finite and non-negative, got {t}")));
        }
        if !r_0.is_finite() {
            return Err(Error::param("r_0", "must be finite"));
        }
        if t == 0.0 {
            return Ok(r_0);
        }
        let rs = self.schwarzschild_radius;
        let distance = SPEED_OF_LIGHT * t;
        let floor = RADIUS_AFTER_RESIDUAL.max(4.0 * f64::EPSILON * distance);

        // g(x) = r_*(r_0 + x) − r_*(r_0) − ct, increasing in x.
        let residual = |x: f64| self.tortoise_difference(r_0, r_0 + x) - distance;

        let mut lo = rs * (1.0 + 1e-12) - r_0;
        let mut hi = distance + 1e3 * rs;
        let mut x = distance.min(hi);
        for _ in 0..RADIUS_AFTER_MAX_ITER {
            let g = residual(x);
            if g.abs() <= floor {
                return Ok(r_0 + x);
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            // g'(x) = 1/f(r_0 + x)
            let slope = 1.0 / (1.0 - rs / (r_0 + x));
            let newton = x - g / slope;
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if next == x {
                return Ok(r_0 + x);
            }
            x = next;
        }
        Err(Error::NonConvergence {
            operation: "radius_after",
            iterations: RADIUS_AFTER_MAX_ITER,
        })
    }

    /// `r_*(r_to) − r_*(r_from)` formed without cancellation.
    fn tortoise_difference(&self, r_from: f64, r_to: f64) -> f64 {
        let rs = self.schwarzschild_radius;
        let dr = r_to - r_from;
        if rs == 0.0 || dr == 0.0 {
            return dr;
        }
        if dr.is_infinite() {
            return dr;
        }
        dr + rs * (dr / (r_from - rs)).ln_1p()
    }

    fn ln_link_ratio(&self, emitter: &Observer, receiver: &Observer) -> Result<f64> {
        if emitter.motion != Motion::Static {
            return Err(Error::UnsupportedMotion(
                "only static emitters are supported".into(),
            ));
        }
        let k = match receiver.motion {
            Motion::Static => 1.0,
            Motion::CircularOrbit => {
                let limit = 1.5 * self.schwarzschild_radius;
                if receiver.radius.is_nan() || receiver.radius <= limit {
                    return Err(Error::InsidePhotonSphere {
                        radius: receiver.radius,
                        limit,
                    });
                }
                1.5
            }
        };
        self.ln_rate_ratio(emitter.radius, receiver.radius, k)
    }

    /// `ln R` with `R = (1 − r_s/r_a)/(1 − k·r_s/r_b)`.
    ///
    /// `R − 1 = (r_s/r_a)·((k·r_a − r_b)/r_b)/(1 − k·r_s/r_b)`, so the only
    /// subtraction is between the radii themselves.
    fn ln_rate_ratio(&self, r_a: f64, r_b: f64, k: f64) -> Result<f64> {
        self.check_outside(r_a)?;
        self.check_outside(r_b)?;
        let rs = self.schwarzschild_radius;
        if rs == 0.0 {
            return Ok(0.0);
        }
        let denom = 1.0 - k * rs / r_b;
        let excess = match (r_a.is_finite(), r_b.is_finite()) {
            (true, true) => (rs / r_a) * ((k * r_a - r_b) / r_b),
            (true, false) => -rs / r_a,
            (false, true) => k * rs / r_b,
            (false, false) => 0.0,
        };
        Ok((excess / denom).ln_1p())
    }
}

/// How a station moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Motion {
    Static,
    CircularOrbit,
}

/// A station at fixed Schwarzschild radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observer {
    pub radius: f64,
    pub motion: Motion,
}

impl Observer {
    /// `radius` may be `f64::INFINITY` for a static far-field station.
    pub fn new(radius: f64, motion: Motion) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        if motion == Motion::CircularOrbit && radius.is_infinite() {
            return Err(Error::param("radius", "a circular orbit needs a finite radius"));
        }
        Ok(Self { radius, motion })
    }

    pub fn fixed(radius: f64) -> Result<Self> {
        Self::new(radius, Motion::Static)
    }

    pub fn orbiting(radius: f64) -> Result<Self> {
        Self::new(radius, Motion::CircularOrbit)
    }

    /// Static observer infinitely far from the body, where `f = 1`.
    pub fn far_field() -> Self {
        Self {
            radius: f64::INFINITY,
            motion: Motion::Static,
        }
    }

    pub fn iss() -> Self {
        Self {
            radius: ISS_ORBIT_RADIUS,
            motion: Motion::CircularOrbit,
        }
    }
}

/// Whether the receiver sits effectively higher in the potential than the
/// emitter (received frequencies lower) or lower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    Up,
    Down,
}

/// Size and direction of the mode mismatch between stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftParameter {
    pub delta: f64,
    pub direction: ShiftDirection,
}

impl ShiftParameter {
    pub fn new(delta: f64, direction: ShiftDirection) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::param("delta", format!("must be finite and ≥ 0, got {delta}")));
        }
        Ok(Self { delta, direction })
    }

    pub fn none() -> Self {
        Self {
            delta: 0.0,
            direction: ShiftDirection::Down,
        }
    }

    /// `1 − δ` for an upward link, `1 + δ` otherwise.
    pub fn factor(&self) -> f64 {
        match self.direction {
            ShiftDirection::Up => 1.0 - self.delta,
            ShiftDirection::Down => 1.0 + self.delta,
        }
    }

    /// `ln(1 ± δ)` without rounding `1 ± δ` first.
    pub fn ln_factor(&self) -> f64 {
        self.signed_delta().ln_1p()
    }

    /// Signed offset `factor − 1`.
    pub fn signed_delta(&self) -> f64 {
        match self.direction {
            ShiftDirection::Up => -self.delta,
            ShiftDirection::Down => self.delta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Frozen from 50-digit evaluations of the defining expressions.
    const RS_EARTH: f64 = 8.869_805_825_435_334e-3;
    const F_SURFACE_MINUS_ONE: f64 = -1.392_215_637_330_926_7e-9;
    const PTR_SURFACE_TO_INF_MINUS_ONE: f64 = 6.961_078_193_923_125e-10;
    const REDSHIFT_STATIC_LEO_MINUS_ONE: f64 = -4.112_289_585_536_296_5e-11;
    const REDSHIFT_TOTAL_LEO_MINUS_ONE: f64 = 2.863_695_661_534_596_6e-10;
    const DELTA_STATIC_LEO: f64 = 2.056_144_792_789_287e-11;
    const TORTOISE_SURFACE_EXCESS: f64 = 0.180_876_356_665_840_2;

    #[test]
    fn earth_schwarzschild_radius() {
        assert!(rel(Body::earth().schwarzschild_radius(), RS_EARTH) < 1e-15);
    }

    #[test]
    fn metric_factor_limits() {
        let earth = Body::earth();
        let far = earth.metric_factor(1e15 * earth.schwarzschild_radius()).unwrap();
        assert!((far - 1.0).abs() < 1e-14);
        let surface = earth.metric_factor(EARTH_RADIUS).unwrap();
        assert!(((surface - 1.0) - F_SURFACE_MINUS_ONE).abs() < 2e-16);
        assert!(matches!(
            earth.metric_factor(earth.schwarzschild_radius()),
            Err(Error::InsideHorizon { .. })
        ));
        assert!(earth.metric_factor(0.5 * earth.schwarzschild_radius()).is_err());
    }

    #[test]
    fn metric_factor_is_increasing() {
        let earth = Body::earth();
        let rs = earth.schwarzschild_radius();
        let mut prev = 0.0;
        for k in 1..200 {
            let r = rs * (1.0 + 0.05 * k as f64).powi(3);
            let f = earth.metric_factor(r).unwrap();
            assert!(f > prev && f < 1.0);
            prev = f;
        }
    }

    #[test]
    fn proper_time_ratio_values() {
        let earth = Body::earth();
        assert_eq!(earth.proper_time_ratio(EARTH_RADIUS, EARTH_RADIUS).unwrap(), 1.0);
        let to_inf = earth.proper_time_ratio(EARTH_RADIUS, f64::INFINITY).unwrap();
        assert!(rel(to_inf - 1.0, PTR_SURFACE_TO_INF_MINUS_ONE) < 1e-6);
        let ab = earth.proper_time_ratio(EARTH_RADIUS, ISS_ORBIT_RADIUS).unwrap();
        let ba = earth.proper_time_ratio(ISS_ORBIT_RADIUS, EARTH_RADIUS).unwrap();
        assert!((ab * ba - 1.0).abs() < 1e-15);
    }

    #[test]
    fn redshift_static_values() {
        let earth = Body::earth();
        assert_eq!(earth.redshift_static(EARTH_RADIUS, EARTH_RADIUS).unwrap(), 1.0);
        let z = earth.redshift_static(EARTH_RADIUS, ISS_ORBIT_RADIUS).unwrap();
        assert!(z < 1.0);
        assert!(rel(z - 1.0, REDSHIFT_STATIC_LEO_MINUS_ONE) < 1e-5);
        let t = earth.proper_time_ratio(EARTH_RADIUS, ISS_ORBIT_RADIUS).unwrap();
        assert!((z * t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn redshift_total_values() {
        let earth = Body::earth();
        let surface = Observer::fixed(EARTH_RADIUS).unwrap();
        let z = earth.redshift_total(&surface, &Observer::iss()).unwrap();
        // Orbital time dilation wins at ISS altitude: the receiver sees a blueshift.
        assert!(rel(z - 1.0, REDSHIFT_TOTAL_LEO_MINUS_ONE) < 1e-6);
        assert_eq!(earth.redshift_total(&surface, &surface).unwrap(), 1.0);

        let static_leo = Observer::fixed(ISS_ORBIT_RADIUS).unwrap();
        assert_eq!(
            earth.redshift_total(&surface, &static_leo).unwrap(),
            earth.redshift_static(EARTH_RADIUS, ISS_ORBIT_RADIUS).unwrap()
        );

        let feather = Body::new(1e-20, 1.0).unwrap();
        let z = feather
            .redshift_total(&Observer::fixed(1.0).unwrap(), &Observer::orbiting(2.0).unwrap())
            .unwrap();
        assert_eq!(z, 1.0);
    }

    #[test]
    fn redshift_total_rejects_photon_sphere_and_orbiting_emitter() {
        let body = Body::new(1e30, 1e6).unwrap();
        let rs = body.schwarzschild_radius();
        let emitter = Observer::fixed(1e9).unwrap();
        let inside = Observer::orbiting(1.4 * rs).unwrap();
        assert!(matches!(
            body.redshift_total(&emitter, &inside),
            Err(Error::InsidePhotonSphere { .. })
        ));
        let earth = Body::earth();
        assert!(matches!(
            earth.redshift_total(&Observer::iss(), &Observer::far_field()),
            Err(Error::UnsupportedMotion(_))
        ));
    }

    #[test]
    fn shift_parameter_cases() {
        let earth = Body::earth();
        let surface = Observer::fixed(EARTH_RADIUS).unwrap();
        let same = earth.shift_parameter(&surface, &surface).unwrap();
        assert_eq!(same.delta, 0.0);

        let far = earth.shift_parameter(&surface, &Observer::far_field()).unwrap();
        assert_eq!(far.direction, ShiftDirection::Up);
        assert!(rel(far.delta, 3.5e-10) < 0.03);

        let leo = earth.shift_parameter(&surface, &Observer::iss()).unwrap();
        assert_eq!(leo.direction, ShiftDirection::Down);
        assert!(rel(leo.delta, 1.431_847_830_664_789e-10) < 1e-9);
    }

    #[test]
    fn shift_parameter_static_matches_oracle_and_series() {
        let earth = Body::earth();
        let rs = earth.schwarzschild_radius();
        let a = Observer::fixed(EARTH_RADIUS).unwrap();
        let b = Observer::fixed(ISS_ORBIT_RADIUS).unwrap();
        let shift = earth.shift_parameter(&a, &b).unwrap();
        assert!(rel(shift.delta, DELTA_STATIC_LEO) < 1e-12);
        let series = 0.25 * (rs / EARTH_RADIUS - rs / ISS_ORBIT_RADIUS);
        assert!(rel(shift.delta, series) < 1e-8);
    }

    #[test]
    fn tortoise_values() {
        let earth = Body::earth();
        let t = earth.tortoise(EARTH_RADIUS).unwrap();
        assert!(((t - EARTH_RADIUS) - TORTOISE_SURFACE_EXCESS).abs() < 1e-8);
        assert!(earth.tortoise(earth.schwarzschild_radius()).is_err());

        let tiny = Body::new(1.0, 1.0).unwrap();
        let rs = tiny.schwarzschild_radius();
        let r = rs * 1e15;
        assert!(rel(tiny.tortoise(r).unwrap(), r) < 1e-12);
    }

    #[test]
    fn travel_time_values() {
        let earth = Body::earth();
        assert_eq!(earth.coordinate_travel_time(EARTH_RADIUS, EARTH_RADIUS).unwrap(), 0.0);
        let t = earth.coordinate_travel_time(EARTH_RADIUS, ISS_ORBIT_RADIUS).unwrap();
        assert!(rel(t, 1.334_256_382_594_198_8e-3) < 1e-14);
        let excess = t - 400e3 / SPEED_OF_LIGHT;
        assert!(rel(excess, 1.801_590_561_259_761e-12) < 1e-4);
        let back = earth.coordinate_travel_time(ISS_ORBIT_RADIUS, EARTH_RADIUS).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn travel_time_is_additive() {
        let earth = Body::earth();
        let (a, b, c) = (EARTH_RADIUS, 7.0e6, 4.2e7);
        let ab = earth.coordinate_travel_time(a, b).unwrap();
        let bc = earth.coordinate_travel_time(b, c).unwrap();
        let ac = earth.coordinate_travel_time(a, c).unwrap();
        assert!(rel(ab + bc, ac) < 1e-15);
    }

    #[test]
    fn radius_after_cases() {
        let earth = Body::earth();
        assert_eq!(earth.radius_after(EARTH_RADIUS, 0.0).unwrap(), EARTH_RADIUS);
        let t = earth.coordinate_travel_time(EARTH_RADIUS, ISS_ORBIT_RADIUS).unwrap();
        let r = earth.radius_after(EARTH_RADIUS, t).unwrap();
        assert!((r - ISS_ORBIT_RADIUS).abs() < 1e-6);

        let t_long = 1e3;
        let r = earth.radius_after(EARTH_RADIUS, t_long).unwrap();
        let flat = EARTH_RADIUS + SPEED_OF_LIGHT * t_long;
        assert!(rel(r, flat) < 1e-9);
        assert!(earth.radius_after(EARTH_RADIUS, -1.0).is_err());
    }

    #[test]
    fn radius_after_near_horizon() {
        let body = Body::new(1e30, 1e6).unwrap();
        let rs = body.schwarzschild_radius();
        for &r0 in &[1.01 * rs, 1.5 * rs, 3.0 * rs] {
            for &r1 in &[1.02 * rs, 2.0 * rs, 50.0 * rs, 1e5 * rs] {
                if r1 <= r0 {
                    continue;
                }
                let t = body.coordinate_travel_time(r0, r1).unwrap();
                let r = body.radius_after(r0, t).unwrap();
                assert!(rel(r, r1) < 1e-9, "r0={r0} r1={r1} got {r}");
            }
        }
    }

    #[test]
    fn shift_factor_sign() {
        let up = ShiftParameter::new(1e-3, ShiftDirection::Up).unwrap();
        assert_eq!(up.factor(), 1.0 - 1e-3);
        assert_eq!(up.signed_delta(), -1e-3);
        assert!(ShiftParameter::new(-1.0, ShiftDirection::Up).is_err());
    }
}
