//! Delay-Doppler waveform design on the discrete Zak transform.
//!
//! Quadratic-phase CAZAC sequences of length `MN` are carried into the
//! delay-Doppler domain as `M x N` quasi-periodic arrays. Their self-ambiguity
//! is supported on a discrete line, cross-ambiguity within a family is flat at
//! `1/sqrt(MN)`, and they are unbiased with respect to every Zak-OTFS carrier.
//! The crate provides the transforms, waveform families, ambiguity functions,
//! twisted-convolution spread pilots, a doubly-spread channel simulator and
//! the receivers used for superimposed-pilot sensing and preamble detection.
//!
//! Run `cargo run --example <name>` for a tour of each capability; the
//! `zak-cazac` binary drives the full Monte-Carlo experiments.

pub mod ambiguity;
pub mod cazac;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod export;
pub mod grid;
pub mod harness;
pub mod modular;
pub mod pilot;
pub mod receiver;
pub mod stats;
pub mod zak;

pub use error::{Error, Result};
pub use grid::{GridParams, PeriodicSequence, QuasiPeriodicArray, C64};
