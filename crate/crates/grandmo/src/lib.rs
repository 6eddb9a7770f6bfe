//! Hard-input GRAND-MO decoding toolkit for linear block codes on bursty
//! binary channels.
//!
//! The crate provides:
//!
//! - packed GF(2) linear algebra ([`gf2`]),
//! - construction of random linear codes and (shortened) BCH codes plus a
//!   plain-text parity-check file format ([`code`]),
//! - the two-state Markov (Gilbert) burst channel ([`channel`]),
//! - test-error-pattern generators: Markov query order, the hardware
//!   burst-constrained order and Hamming-weight order ([`pattern`]),
//! - the decoders themselves and a bounded-distance baseline ([`decoder`]),
//! - a cycle-accurate functional model of the syndrome shift-register
//!   datapath with latency/throughput arithmetic ([`hw`]),
//! - a deterministic Monte Carlo FER harness with CSV output ([`sim`]).

pub mod channel;
pub mod code;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod hw;
pub mod pattern;
pub mod sim;

mod galois;

pub use channel::GilbertElliott;
pub use code::LinearCode;
pub use decoder::{BddDecoder, DecodeResult, DecodeStatus, GrandDecoder};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use hw::{HwConfig, TimingReport};
pub use pattern::{BurstPattern, QueryOrderSpec};
pub use sim::{DecoderSpec, FerRecord, StoppingRule};
