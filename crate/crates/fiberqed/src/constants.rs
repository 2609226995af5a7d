//! Physical constants (SI 2019 exact values where applicable).

/// Speed of light in vacuum, m/s.
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_8128e-12;
/// Vacuum permeability, N/A^2.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Bohr radius, m.
pub const BOHR: f64 = 5.291_772_109_03e-11;
/// Electron mass, kg.
pub const M_E: f64 = 9.109_383_7015e-31;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Rydberg constant for infinite nuclear mass, 1/m.
pub const RYDBERG_INF: f64 = 10_973_731.568_160;
/// Mass of Rb-87 in atomic mass units.
pub const RB87_MASS_AMU: f64 = 86.909_180_531;
/// Fine-structure constant.
pub const ALPHA_FS: f64 = 7.297_352_5693e-3;
/// Planck constant, J s.
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// Electron-volt, J.
pub const EV: f64 = 1.602_176_634e-19;

/// Mass-corrected Rydberg constant for Rb-87, 1/m.
pub fn rydberg_rb87() -> f64 {
    RYDBERG_INF / (1.0 + M_E / (RB87_MASS_AMU * AMU))
}
