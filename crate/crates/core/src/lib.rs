//! Two-phase device-to-device relay protocol for downlink ultra-reliable
//! low-latency communication (URLLC).
//!
//! In Phase I the base station multicasts each group's combined message on
//! one beam per group; users that decode it become *leaders* and relay the
//! message to the rest of their group over D2D links in Phase II. This crate
//! holds the allocation-only core of the simulator:
//!
//! - [`units`] and [`config`]: linear/dB conversions, SINR targets, and the
//!   system configuration with its validation rules.
//! - [`radio`]: seven-cell wrap-around topology, downlink and D2D channel
//!   sampling, and inter-cell interference synthesis.
//! - [`conic`]: a primal-dual interior-point solver for second-order cone
//!   programs, plus an independent KKT checker.
//! - [`beamform`]: the leader-selection successive convex approximation and
//!   the optimization-based benchmark schemes.
//! - [`protocol`]: exact SINR evaluation of both phases, leader sets, and
//!   the closed-form benchmarks.
//! - [`trial`]: per-realization wiring of every scheme.
//!
//! The crate is `no_std` and needs only `alloc`; the `urllc-sim` crate adds
//! file formats, parallel campaigns and the command-line front end.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod beamform;
pub mod config;
pub mod conic;
pub mod protocol;
pub mod radio;
pub mod trial;
pub mod units;

pub use config::{ScaOptions, SystemConfig, Violation};
pub use error::{Error, Result};
pub use units::SinrTarget;
