//! Numerical core for studying continuous-variable QKD key-rate models under
//! imperfect forward error correction.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithm:
//!
//! - [`protocol`]: Gaussian-modulated coherent-state protocol with homodyne
//!   detection and reverse reconciliation, Alice–Bob mutual information and
//!   the Holevo bound on Eve's information.
//! - [`capacity`]: AWGN and BI-AWGN capacities and reconciliation efficiency.
//! - [`ldpc`]: LDPC construction from (multi-edge) degree distributions,
//!   sum-product decoding and Monte-Carlo BER/WER estimation.
//! - [`raptor`]: rateless Raptor coding on the BI-AWGN channel.
//! - [`keyrate`]: the competing secret-key-rate models and the joint
//!   operating-point optimizer over transmission distance.
//!
//! File formats, the command-line front end and parallel trial execution
//! live in the companion `cvqkd` crate.
#![no_std]

extern crate alloc;

pub mod capacity;
mod error;
pub mod gf2;
pub mod keyrate;
pub mod ldpc;
mod perf;
pub mod protocol;
pub mod raptor;
pub mod rng;

pub use error::{Error, Result};
pub use perf::PerformancePoint;
