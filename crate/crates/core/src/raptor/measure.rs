use alloc::vec::Vec;

use super::lt::LtDistribution;
use super::session::{raptor_decode, RaptorCode, RaptorOutcome, RaptorSchedule, RaptorSession};
use crate::capacity::beta_fec;
use crate::error::{Error, Result};
use crate::ldpc::check_grid;
use crate::perf::PerformancePoint;
use crate::rng::derive_seed;

/// Seed of the session used for trial `index`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    derive_seed(seed, index.wrapping_add(0x5EED))
}

/// Runs trial `index` at SNR `s`.
pub fn run_raptor_trial(
    code: &RaptorCode,
    s: f64,
    schedule: &RaptorSchedule,
    seed: u64,
    index: u64,
) -> Result<RaptorOutcome> {
    let mut session = RaptorSession::new(code, trial_seed(seed, index));
    raptor_decode(&mut session, s, schedule)
}

/// Counts over Raptor trials at one SNR.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RaptorTally {
    pub trials: u64,
    /// Trials whose output differs from the sent message.
    pub word_errors: u64,
    pub bit_errors: u64,
    /// Decoder reported success on a wrong message.
    pub undetected_errors: u64,
    pub successes: u64,
    /// Sum of `k / symbols_used` over successful trials.
    pub rate_sum: f64,
}

impl RaptorTally {
    pub fn add(&mut self, outcome: &RaptorOutcome, sent: &[u8]) {
        self.trials += 1;
        if !outcome.correct {
            self.word_errors += 1;
            if outcome.success {
                self.undetected_errors += 1;
            }
        }
        self.bit_errors += outcome
            .message
            .iter()
            .zip(sent)
            .filter(|(a, b)| a != b)
            .count() as u64;
        if let Some(r) = outcome.realized_rate() {
            self.successes += 1;
            self.rate_sum += r;
        }
    }

    /// Performance point with the mean realized rate of the successful
    /// trials as its rate. Fails when no trial succeeded.
    pub fn to_point(&self, s: f64, k: usize, seed: u64) -> Result<PerformancePoint> {
        if self.successes == 0 {
            return Err(Error::Empty("successful Raptor trials"));
        }
        let trials = self.trials as f64;
        let rate = self.rate_sum / self.successes as f64;
        Ok(PerformancePoint {
            rate,
            snr: s,
            wer: self.word_errors as f64 / trials,
            ber: Some(self.bit_errors as f64 / (trials * k as f64)),
            undetected_wer: Some(self.undetected_errors as f64 / trials),
            beta_fec: beta_fec(rate, s)?,
            trials: self.trials,
            seed,
        })
    }
}

/// Message of trial `index`, for bit-error accounting.
pub fn trial_message(code: &RaptorCode, seed: u64, index: u64) -> Vec<u8> {
    RaptorSession::new(code, trial_seed(seed, index)).message().to_vec()
}

/// Realized rate, WER and efficiency of a Raptor code at each SNR of
/// `s_grid`, from `trials` independent messages per point.
///
/// The precode is built from `seed`; trial `i` uses the same message and
/// noise sequence at every SNR.
pub fn measure_raptor_beta(
    dist: &LtDistribution,
    k: usize,
    s_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<PerformancePoint>> {
    check_grid(s_grid)?;
    if trials == 0 {
        return Err(Error::StoppingRule("trials must be at least 1"));
    }
    let code = RaptorCode::new(k, dist.clone(), seed)?;
    s_grid
        .iter()
        .map(|&s| {
            let schedule = RaptorSchedule::default_for(k, s)?;
            let mut tally = RaptorTally::default();
            for i in 0..trials {
                let mut session = RaptorSession::new(&code, trial_seed(seed, i));
                let outcome = raptor_decode(&mut session, s, &schedule)?;
                tally.add(&outcome, session.message());
            }
            tally.to_point(s, k, seed)
        })
        .collect()
}
