//! Physical constants (SI, CODATA 2018).

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Newtonian constant of gravitation, m³ kg⁻¹ s⁻².
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;

/// Mass of the Earth, kg.
pub const EARTH_MASS: f64 = 5.972e24;

/// Mean radius of the Earth, m.
pub const EARTH_RADIUS: f64 = 6_371e3;

/// Orbital radius of the International Space Station, m (≈400 km altitude).
pub const ISS_ORBIT_RADIUS: f64 = 6_771e3;
