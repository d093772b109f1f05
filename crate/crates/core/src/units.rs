//! Unit conversions and minimum-SINR targets.
//!
//! Everything inside the simulator runs in linear units (watts, linear
//! SINR); decibels appear only at the edges.

use crate::error::{invalid, Result};
use crate::math;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    math::powf(10.0, (dbm - 30.0) / 10.0)
}

/// Converts a strictly positive power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts > 0.0) || !watts.is_finite() {
        return Err(invalid("power in watts must be positive and finite"));
    }
    Ok(10.0 * math::log10(watts) + 30.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    math::powf(10.0, db / 10.0)
}

/// Linear ratio to dB. Zero maps to negative infinity.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * math::log10(x)
}

/// Noise power in watts for a power spectral density in dBm/Hz over a band.
pub fn noise_power_watts(psd_dbm_hz: f64, bandwidth_hz: f64) -> f64 {
    dbm_to_watts(psd_dbm_hz + 10.0 * math::log10(bandwidth_hz))
}

/// Minimum SINR (linear) needed to convey a payload over a block of symbols,
/// ignoring finite-blocklength effects.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SinrTarget(f64);

impl SinrTarget {
    pub const ZERO: SinrTarget = SinrTarget(0.0);

    /// Wraps an already linear SINR value; negative values are rejected.
    pub fn from_linear(linear: f64) -> Result<Self> {
        if !(linear >= 0.0) {
            return Err(invalid("SINR target must be nonnegative"));
        }
        Ok(SinrTarget(linear))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        linear_to_db(self.0)
    }
}

/// `2^(bits/symbols) - 1`, evaluated through `expm1` so small exponents keep
/// full relative precision.
pub fn min_sinr_target(bits: f64, symbols: f64) -> Result<SinrTarget> {
    if !(symbols > 0.0) || !symbols.is_finite() {
        return Err(invalid("number of symbols must be positive"));
    }
    if !(bits >= 0.0) || !bits.is_finite() {
        return Err(invalid("number of bits must be nonnegative"));
    }
    let exponent = bits / symbols;
    Ok(SinrTarget(math::expm1(exponent * core::f64::consts::LN_2)))
}
