//! Rateless Raptor coding on the BI-AWGN channel: a regular high-rate LDPC
//! precode, an LT code over its output, and incremental joint BP decoding.

mod lt;
mod measure;
mod session;

pub use lt::LtDistribution;
pub use measure::{measure_raptor_beta, run_raptor_trial, trial_message, trial_seed, RaptorTally};
pub use session::{
    raptor_decode, RaptorCode, RaptorOutcome, RaptorSchedule, RaptorSession, PRECODE_CHECK_DEGREE,
    PRECODE_VAR_DEGREE,
};
