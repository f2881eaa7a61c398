//! Binary LDPC codes on the BI-AWGN channel: ensemble description, random
//! construction, sum-product decoding and Monte-Carlo error-rate estimation.

mod bp;
mod construct;
mod degree;
mod graph;
mod sim;

pub(crate) use bp::{leave_one_out, tanh_half, two_atanh};
pub use bp::{bp_decode, BpDecoder, DecodeResult, LLR_CLAMP};
pub use construct::build_code;
pub use degree::{DegreeDistribution, NodeType};
pub use graph::SparseParityCheck;
pub use sim::{check_grid, run_trial, simulate_point, sweep_curve, StoppingRule, Tally, TrialOutcome};
