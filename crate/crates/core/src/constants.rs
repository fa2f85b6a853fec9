//! SI constants (CODATA 2018).

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Vacuum permeability, H/m.
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
