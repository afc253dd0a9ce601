//! Packet-level simulation and analytics for random linear network
//! coding in a multi-relay millimeter-wave access network.
//!
//! The library compares two transmission schemes over a street-canyon
//! deployment of relay nodes: plain forwarding of packets through
//! uniformly chosen relays, and random linear network coding, where
//! downlink transmissions carry random combinations of a generation and
//! uplink relays combine the packets of several devices before pushing
//! them over the backhaul.
//!
//! Modules:
//! - [`gf`]: arithmetic over GF(2^m), the coefficient alphabet.
//! - [`rlnc`]: coded packet construction, rank tracking, decoding.
//! - [`channel`]: link state, SNR, block error rate, erasure matrix.
//! - [`deployment`]: street geometry and device drops.
//! - [`sim`]: per-time-span forwarding and network-coding schedulers.
//! - [`bounds`]: closed-form efficiencies, backhaul bound series, and
//!   the empirical singularity oracle.
//! - [`config`] / [`campaign`] / [`report`]: the experiment harness.
//!
//! The `examples/` directory holds one runnable example per capability;
//! the `mmwave-rlnc` binary wraps the campaigns in a small CLI.

pub mod bounds;
pub mod campaign;
pub mod channel;
pub mod config;
pub mod deployment;
pub mod gf;
pub mod report;
pub mod rlnc;
pub mod sim;

pub use config::ExperimentConfig;
pub use gf::{FieldContext, FieldElement};
pub use rlnc::{CodedPacket, Decoder, Generation};
