use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use super::bp::BpDecoder;
use super::graph::SparseParityCheck;
use crate::capacity::beta_fec;
use crate::error::{domain, Error, Result};
use crate::perf::PerformancePoint;
use crate::rng;

/// Stop after `min_word_errors` word errors or `max_trials` trials,
/// whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StoppingRule {
    pub min_word_errors: u64,
    pub max_trials: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            min_word_errors: 100,
            max_trials: 100_000,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_trials == 0 {
            return Err(Error::StoppingRule("max_trials must be at least 1"));
        }
        if self.min_word_errors == 0 {
            return Err(Error::StoppingRule("min_word_errors must be at least 1"));
        }
        Ok(())
    }

    pub fn is_done(&self, tally: &Tally) -> bool {
        tally.word_errors >= self.min_word_errors || tally.trials >= self.max_trials
    }
}

/// What happened in one simulated block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub bit_errors: u32,
    pub converged: bool,
    pub iterations: u32,
}

impl TrialOutcome {
    pub fn word_error(&self) -> bool {
        self.bit_errors > 0
    }
}

/// Running error counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub word_errors: u64,
    pub bit_errors: u64,
    /// Decoder reported failure (no zero syndrome).
    pub detected_failures: u64,
    /// Zero syndrome reached on a wrong codeword.
    pub undetected_errors: u64,
    pub iterations: u64,
}

impl Tally {
    pub fn add(&mut self, outcome: &TrialOutcome) {
        self.trials += 1;
        self.iterations += outcome.iterations as u64;
        self.bit_errors += outcome.bit_errors as u64;
        if outcome.word_error() {
            self.word_errors += 1;
            if outcome.converged {
                self.undetected_errors += 1;
            }
        }
        if !outcome.converged {
            self.detected_failures += 1;
        }
    }

    /// Turns the counts into a performance point for a code of length `n`.
    pub fn to_point(&self, rate: f64, s: f64, n: usize, seed: u64) -> Result<PerformancePoint> {
        if self.trials == 0 {
            return Err(Error::StoppingRule("no trials were run"));
        }
        let trials = self.trials as f64;
        Ok(PerformancePoint {
            rate,
            snr: s,
            wer: self.word_errors as f64 / trials,
            ber: Some(self.bit_errors as f64 / (trials * n as f64)),
            undetected_wer: Some(self.undetected_errors as f64 / trials),
            beta_fec: beta_fec(rate, s)?,
            trials: self.trials,
            seed,
        })
    }
}

/// Simulates trial `index`: the all-zero codeword is sent as `+1` symbols
/// over real AWGN of variance `1/s`, decoded from `LLR = 2 y s`.
///
/// Noise comes from stream `(seed, index)`, so a trial is a pure function
/// of its arguments. Because the noise is drawn as unit normals scaled by
/// `1/sqrt(s)`, the same `(seed, index)` at different SNRs sees the same
/// normalized noise.
pub fn run_trial(
    decoder: &mut BpDecoder<'_>,
    llr: &mut Vec<f64>,
    s: f64,
    max_iter: usize,
    seed: u64,
    index: u64,
) -> Result<TrialOutcome> {
    let n = decoder.code().n();
    let sigma = 1.0 / libm::sqrt(s);
    let mut rng = rng::stream(seed, index);
    llr.clear();
    llr.extend((0..n).map(|_| {
        let z: f64 = StandardNormal.sample(&mut rng);
        2.0 * (1.0 + sigma * z) * s
    }));
    let result = decoder.decode(llr, max_iter)?;
    debug_assert!(
        !result.converged || decoder.code().is_codeword(&result.bits),
        "converged decode with nonzero syndrome"
    );
    Ok(TrialOutcome {
        bit_errors: result.bits.iter().map(|&b| b as u32).sum(),
        converged: result.converged,
        iterations: result.iterations_used as u32,
    })
}

fn check_snr(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain("s", s, "s > 0"));
    }
    Ok(())
}

/// Monte-Carlo estimate of WER, BER and undetected WER at SNR `s`.
///
/// Trials run in index order `0, 1, 2, ...` until `stop` fires; the
/// reported rate is the nominal `1 - m/n`.
pub fn simulate_point(
    code: &SparseParityCheck,
    s: f64,
    max_iter: usize,
    stop: StoppingRule,
    seed: u64,
) -> Result<PerformancePoint> {
    check_snr(s)?;
    stop.validate()?;
    let mut decoder = BpDecoder::new(code);
    let mut llr = vec![0.0; code.n()];
    let mut tally = Tally::default();
    while !stop.is_done(&tally) {
        let outcome = run_trial(&mut decoder, &mut llr, s, max_iter, seed, tally.trials)?;
        tally.add(&outcome);
    }
    tally.to_point(code.rate(), s, code.n(), seed)
}

/// [`simulate_point`] at every SNR of an ascending grid, all with the same
/// seed so neighbouring points share noise realizations.
pub fn sweep_curve(
    code: &SparseParityCheck,
    s_grid: &[f64],
    max_iter: usize,
    stop: StoppingRule,
    seed: u64,
) -> Result<Vec<PerformancePoint>> {
    check_grid(s_grid)?;
    s_grid
        .iter()
        .map(|&s| simulate_point(code, s, max_iter, stop, seed))
        .collect()
}

/// Rejects empty, non-positive or non-ascending SNR grids.
pub fn check_grid(s_grid: &[f64]) -> Result<()> {
    if s_grid.is_empty() {
        return Err(Error::Empty("SNR grid"));
    }
    for &s in s_grid {
        check_snr(s)?;
    }
    if let Some(w) = s_grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(domain("s", w[1], "strictly ascending grid"));
    }
    Ok(())
}
