//! The five subcommands as library functions from resolved configuration
//! to rendered tables.

use std::path::{Path, PathBuf};

use cvqkd_core::capacity::{biawgn_capacity, gaussian_capacity, nonzero_error_capacity};
use cvqkd_core::keyrate::{distance_sweep, ideal_reference_curve, max_range, KeyRateModel};
use cvqkd_core::ldpc::{build_code, StoppingRule};
use cvqkd_core::protocol::{holevo_bound_eve, mutual_information_ab, required_beta};
use cvqkd_core::rng::derive_seed;
use cvqkd_core::{Error as CoreError, PerformancePoint};
use serde::Serialize;

use crate::config::{
    BetaThresholdResolved, CapacityKind, CapacityResolved, CodeSweepResolved, KeyRateResolved,
    RaptorSweepResolved,
};
use crate::error::Result;
use crate::formats::{
    load_degree_distribution, load_lt_distribution, load_performance_table, BetaThresholdRecord,
    CapacityRecord, Header, KeyRateRecord, PerfRecord, Table,
};
use crate::parallel::{self, ScheduleOverrides};

fn header<C: Serialize>(command: &str, seed: u64, config: &C) -> Header {
    Header {
        command: command.to_string(),
        seed,
        config: serde_json::to_value(config).expect("resolved configs serialize"),
    }
}

pub fn capacity(cfg: &CapacityResolved, seed: u64) -> Result<Table<CapacityRecord>> {
    let records = cfg
        .grid
        .iter()
        .map(|&s| {
            let capacity = match cfg.which {
                CapacityKind::Gaussian => gaussian_capacity(s)?,
                CapacityKind::Biawgn => biawgn_capacity(s)?,
                CapacityKind::Nonzero => {
                    nonzero_error_capacity(s, cfg.p_b.expect("resolved with p_b"), cfg.base.into())?
                }
            };
            Ok(CapacityRecord { snr: s, capacity })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: header("capacity", seed, cfg),
        records,
    })
}

pub fn beta_threshold(cfg: &BetaThresholdResolved, seed: u64) -> Result<Table<BetaThresholdRecord>> {
    let channel = cfg.channel.channel()?;
    let records = cfg
        .v_grid
        .iter()
        .map(|&v_a| {
            let p = channel.with_modulation(v_a)?;
            let i_ab = mutual_information_ab(&p);
            let i_e = holevo_bound_eve(&p);
            let beta = required_beta(&p);
            let error = match (&i_e, &beta) {
                (Err(e), _) | (Ok(_), Err(e)) => Some(error_marker(e).to_string()),
                _ => None,
            };
            Ok(BetaThresholdRecord {
                v_a,
                i_ab: Some(i_ab),
                i_e: i_e.ok(),
                required_beta: beta.ok(),
                error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: header("beta-threshold", seed, cfg),
        records,
    })
}

fn error_marker(e: &CoreError) -> &'static str {
    match e {
        CoreError::ZeroMutualInformation => "zero_mutual_information",
        CoreError::NonPhysical { .. } => "non_physical",
        _ => "domain",
    }
}

/// Seed of the channel noise; the code itself is built from `seed`.
pub fn noise_seed(seed: u64) -> u64 {
    derive_seed(seed, 1)
}

pub fn code_sweep(cfg: &CodeSweepResolved, seed: u64) -> Result<Table<PerfRecord>> {
    let dist = load_degree_distribution(&cfg.distribution)?;
    let code = build_code(&dist, cfg.n, seed)?;
    let stop = StoppingRule {
        min_word_errors: cfg.min_word_errors,
        max_trials: cfg.max_trials,
    };
    let points = parallel::sweep_curve(&code, &cfg.s_grid, cfg.max_iter, stop, noise_seed(seed))?;
    Ok(Table {
        header: header("code-sweep", seed, cfg),
        records: points.iter().map(|p| PerfRecord::from(p).with_beta_flag()).collect(),
    })
}

pub fn raptor_sweep(cfg: &RaptorSweepResolved, seed: u64) -> Result<Table<PerfRecord>> {
    let dist = load_lt_distribution(&cfg.distribution)?;
    let overrides = ScheduleOverrides {
        batch: cfg.batch,
        iters_per_batch: cfg.iters_per_batch,
        max_overhead: cfg.max_overhead,
    };
    let points = parallel::measure_raptor_beta(&dist, cfg.k, &cfg.s_grid, cfg.trials, seed, overrides)?;
    Ok(Table {
        header: header("raptor-sweep", seed, cfg),
        records: points.iter().map(PerfRecord::from).collect(),
    })
}

/// One key-rate curve and the largest distance where it is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// `ideal` or a model name.
    pub name: String,
    pub table: Table<KeyRateRecord>,
    pub max_range_km: Option<f64>,
}

/// One curve per model over the union of all tables, plus the ideal-code
/// reference when enabled.
pub fn keyrate(cfg: &KeyRateResolved, seed: u64) -> Result<Vec<Curve>> {
    let mut table: Vec<PerformancePoint> = Vec::new();
    for path in &cfg.tables {
        table.extend(load_performance_table(path)?);
    }
    let template = cfg.channel.channel()?;
    let hdr = header("keyrate", seed, cfg);
    let mut curves = Vec::new();
    for &model in &cfg.models {
        let results = distance_sweep(&template, &table, model, &cfg.d_grid, cfg.loss_db_per_km, cfg.wer_cap)?;
        let records = cfg
            .d_grid
            .iter()
            .zip(&results)
            .map(|(&d, r)| KeyRateRecord::new(d, model, r.as_ref()))
            .collect();
        curves.push(Curve {
            name: model.name().to_string(),
            table: Table {
                header: hdr.clone(),
                records,
            },
            max_range_km: max_range(&results),
        });
    }
    if cfg.ideal {
        let results = ideal_reference_curve(&template, &cfg.d_grid, cfg.loss_db_per_km)?;
        let records = results
            .iter()
            .map(|r| KeyRateRecord::new(r.distance_km.unwrap_or_default(), KeyRateModel::Ideal, Some(r)))
            .collect();
        let wrapped: Vec<_> = results.into_iter().map(Some).collect();
        curves.push(Curve {
            name: "ideal".to_string(),
            table: Table {
                header: hdr,
                records,
            },
            max_range_km: max_range(&wrapped),
        });
    }
    Ok(curves)
}

/// `{stem}_{curve}.{ext}` next to `out`, where `out` may carry an extension.
pub fn curve_path(out: &Path, curve: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_{curve}.{ext}"))
}
