//! Explicit-state verification of the TSAR distributed hybrid cache coherence protocol.

pub mod checker;
pub mod dhccp;
pub mod explorer;
pub mod kernel;
