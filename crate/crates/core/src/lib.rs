//! Simulator and cost-model toolkit for a Walsh-Hadamard joint-detection
//! receiver realized on two interchangeable substrates.
//!
//! The receiver decodes Hadamard codewords by running the fast
//! Walsh-Hadamard transform over the incoming block. This crate models both
//! physical realizations of that transform and prices them:
//!
//! - [`optical`] — a butterfly network of beamsplitters ("Green Machine")
//!   propagating complex coherent-state amplitudes; decoding concentrates
//!   the block's energy into the mode matching the message index.
//! - [`digital`] — the gate-level counterpart on two-bit symbols, each
//!   logical beamsplitter being four parallel AND gates.
//! - [`device`] — MOSFET operating regions, drain currents, dissipation,
//!   and RC switching delays that price the electronic substrate.
//! - [`compare`] — runs both substrates over a verification codeword set
//!   and reports decoding latency and power side by side.
//!
//! [`fwht`] holds the shared Hadamard-code mathematics and the classical
//! transform oracle; [`topology`] the butterfly plan both substrates follow;
//! [`emit`] the deterministic CSV/JSON output layer behind the CLI.
//!
//! # Example
//!
//! ```
//! use greenmachine::fwht::HadamardOrder;
//! use greenmachine::optical::{
//!     decode_optical, encode_optical, propagate_optical, BeamsplitterSpec, Complex64,
//! };
//! use greenmachine::topology::build_butterfly;
//!
//! let order = HadamardOrder::new(3)?;
//! let plan = build_butterfly(order);
//!
//! // Send message 5 as a BPSK codeword and decode it optically.
//! let word = encode_optical(5, order, Complex64::new(1.0, 0.0))?;
//! let output = propagate_optical(&plan, &word, &BeamsplitterSpec::hadamard())?;
//! let (index, energy_share) = decode_optical(&output)?;
//! assert_eq!(index, 5);
//! assert!(energy_share > 1.0 - 1e-9);
//! # Ok::<(), greenmachine::Error>(())
//! ```

pub mod compare;
pub mod device;
pub mod digital;
pub mod emit;
pub mod error;
pub mod fwht;
pub mod optical;
pub mod topology;

pub use error::{Error, Result};
