//! Joint relay beamforming and power-splitting optimisation for two-way relay
//! networks with simultaneous wireless information and power transfer.
//!
//! The relay serves two sources with amplify-and-forward ([`RelayStrategy::Af`])
//! or decode-and-forward with XOR network coding or superposition coding. Each
//! optimiser alternates between a semidefinite beamforming step and a
//! closed-form power/splitting step.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod optimizers;
pub mod ps;
pub mod relay_eval;
pub mod sdp;

pub use error::{Error, Result};
pub use model::{ChannelRealization, SystemParams};
pub use relay_eval::{BeamformingSolution, Metrics, PowerSplit, RelayStrategy};
