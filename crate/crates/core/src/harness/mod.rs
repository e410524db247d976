//! Experiment drivers behind the command-line tool. Each run validates its
//! configuration, computes, writes CSV/JSON under `out`, and returns the
//! report it wrote.

pub mod ambiguity;
pub mod config;
pub mod isac;
pub mod rach;
pub mod verify;

pub use ambiguity::{run_ambiguity, AmbiguityReport};
pub use config::{ExperimentConfig, FamilyName, TurboModeName};
pub use isac::{run_isac, IsacReport};
pub use rach::{run_rach, RachReport};
pub use verify::{run_verify, VerifyReport};
