//! Multi-armed bandits with costly index computation.
//!
//! Single-player UCB4 recomputes its indices on a doubling schedule, and the
//! decentralized dUCB4 policy lets M players settle on an arm matching through
//! a distributed auction over a shared signaling channel.

pub mod arms;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod matching;
pub mod policy;
pub mod protocol;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
