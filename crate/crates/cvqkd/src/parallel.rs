//! Multi-threaded versions of the Monte-Carlo drivers.
//!
//! Trials are pure functions of `(seed, index)`. Each batch of indices is
//! decoded in parallel, then folded into the tally in index order, and
//! anything past the point where the sequential driver would have stopped
//! is discarded. Results are therefore bit-identical to the sequential
//! functions of `cvqkd_core` for any thread count.

use cvqkd_core::ldpc::{check_grid, run_trial, BpDecoder, SparseParityCheck, StoppingRule, Tally};
use cvqkd_core::raptor::{
    run_raptor_trial, trial_message, LtDistribution, RaptorCode, RaptorSchedule, RaptorTally,
};
use cvqkd_core::{Error as CoreError, PerformancePoint};
use rayon::prelude::*;

use crate::error::{Error, Result};

fn batch_len() -> u64 {
    (rayon::current_num_threads() as u64 * 4).max(4)
}

/// Same result as [`cvqkd_core::ldpc::simulate_point`].
pub fn simulate_point(
    code: &SparseParityCheck,
    s: f64,
    max_iter: usize,
    stop: StoppingRule,
    seed: u64,
) -> Result<PerformancePoint> {
    check_grid(&[s])?;
    stop.validate()?;
    let mut tally = Tally::default();
    while !stop.is_done(&tally) {
        let start = tally.trials;
        let end = start.saturating_add(batch_len()).min(stop.max_trials);
        let outcomes = (start..end)
            .into_par_iter()
            .map_init(
                || (BpDecoder::new(code), Vec::with_capacity(code.n())),
                |(decoder, llr), index| run_trial(decoder, llr, s, max_iter, seed, index),
            )
            .collect::<Result<Vec<_>, CoreError>>()?;
        for outcome in &outcomes {
            if stop.is_done(&tally) {
                break;
            }
            tally.add(outcome);
        }
    }
    Ok(tally.to_point(code.rate(), s, code.n(), seed)?)
}

/// Same result as [`cvqkd_core::ldpc::sweep_curve`].
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

/// Overrides of the default Raptor decoding schedule.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScheduleOverrides {
    pub batch: Option<usize>,
    pub iters_per_batch: Option<usize>,
    /// Symbol budget as a multiple of `k`.
    pub max_overhead: Option<f64>,
}

impl ScheduleOverrides {
    pub fn schedule(&self, k: usize, s: f64) -> Result<RaptorSchedule> {
        let mut schedule = RaptorSchedule::default_for(k, s)?;
        if let Some(b) = self.batch {
            schedule.batch = b;
        }
        if let Some(i) = self.iters_per_batch {
            schedule.iters_per_batch = i;
        }
        if let Some(o) = self.max_overhead {
            schedule.max_symbols = (o * k as f64).ceil() as usize;
            schedule.start_symbols = schedule.start_symbols.min(schedule.max_symbols);
        }
        Ok(schedule)
    }
}

/// Per-SNR Raptor tallies, every `(SNR, trial)` pair decoded in parallel.
///
/// Trial `i` carries the same message at every SNR, as in
/// [`cvqkd_core::raptor::measure_raptor_beta`].
pub fn raptor_tallies(
    code: &RaptorCode,
    s_grid: &[f64],
    trials: u64,
    seed: u64,
    overrides: ScheduleOverrides,
) -> Result<Vec<RaptorTally>> {
    check_grid(s_grid)?;
    if trials == 0 {
        return Err(crate::error::config("trials must be at least 1"));
    }
    let schedules = s_grid
        .iter()
        .map(|&s| overrides.schedule(code.k(), s))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..s_grid.len())
        .flat_map(|j| (0..trials).map(move |i| (j, i)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(j, i)| run_raptor_trial(code, s_grid[j], &schedules[j], seed, i))
        .collect::<Result<Vec<_>, CoreError>>()?;
    let mut tallies = vec![RaptorTally::default(); s_grid.len()];
    for (&(j, i), outcome) in jobs.iter().zip(&outcomes) {
        tallies[j].add(outcome, &trial_message(code, seed, i));
    }
    Ok(tallies)
}

/// Same result as [`cvqkd_core::raptor::measure_raptor_beta`] when the
/// schedule is not overridden.
pub fn measure_raptor_beta(
    dist: &LtDistribution,
    k: usize,
    s_grid: &[f64],
    trials: u64,
    seed: u64,
    overrides: ScheduleOverrides,
) -> Result<Vec<PerformancePoint>> {
    let code = RaptorCode::new(k, dist.clone(), seed)?;
    let tallies = raptor_tallies(&code, s_grid, trials, seed, overrides)?;
    s_grid
        .iter()
        .zip(&tallies)
        .map(|(&s, t)| {
            if t.successes == 0 {
                return Err(Error::NoRaptorSuccess { snr: s, trials: t.trials });
            }
            Ok(t.to_point(s, k, seed)?)
        })
        .collect()
}
