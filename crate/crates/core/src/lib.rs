//! Conservation laws executed as integer transfer rules on quantised states.
//!
//! Cell states are integers `q_i` at a fixed resolution `delta`; one step
//! moves an integer number of quanta across every interface, so the total
//! integer mass is conserved exactly. Real fields are reconstructed only for
//! output and comparison against floating-point baselines and exact
//! references.

pub mod baselines;
pub mod diagnostics;
pub mod error;
pub mod euler;
pub mod experiments;
pub mod flux;
pub mod problems;
pub mod quantise;
pub mod record;
pub mod references;
pub mod timing;
pub mod transfer;

pub use error::{FqnmError, Result};
pub use flux::ScalarFlux;
pub use quantise::{quantise, reconstruct, round_to_int, QuantisedField, ReconstructedField, Resolution};
pub use transfer::{FluxSplit, InterfaceRule, SchemeParams, SplitMaps, TransferMap};
