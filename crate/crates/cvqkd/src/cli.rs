//! Command-line parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cvqkd_core::keyrate::KeyRateModel;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::commands;
use crate::config::{
    self, BaseKind, BetaThresholdFile, CapacityFile, CapacityKind, ChannelFile, CodeSweepFile, CommonFile, Grid,
    KeyRateFile, Overlay, RaptorSweepFile, RebasePaths,
};
use crate::error::{Error, Result};
use crate::formats::{Format, Table};
use crate::output::write_all_atomic;

pub const DEFAULT_SEED: u64 = 1;

/// CV-QKD key rates under imperfect error correction.
#[derive(Debug, Parser)]
#[command(name = "cvqkd", version)]
pub struct Cli {
    /// Base seed of every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (keyrate: stem of the per-curve files). Default: stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate Gaussian, BI-AWGN or non-zero-error capacity over SNR.
    Capacity(CapacityArgs),
    /// Efficiency needed for a positive key rate versus modulation variance.
    BetaThreshold(BetaThresholdArgs),
    /// WER/BER/efficiency of an LDPC code over an SNR grid.
    CodeSweep(CodeSweepArgs),
    /// Realized rate, WER and efficiency of a Raptor code over an SNR grid.
    RaptorSweep(RaptorSweepArgs),
    /// Optimized key rate versus distance from performance tables.
    Keyrate(KeyRateArgs),
}

#[derive(Debug, Args)]
struct CapacityArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNR grid: `a,b,c`, `start:stop:points` or `log:start:stop:points`.
    #[arg(long)]
    grid: Option<Grid>,
    #[arg(long, value_enum)]
    which: Option<CapacityKind>,
    /// Residual bit error probability for `--which nonzero`.
    #[arg(long)]
    p_b: Option<f64>,
    /// Zero-error capacity under the non-zero-error curve.
    #[arg(long, value_enum)]
    base: Option<BaseKind>,
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// `entanglement-breaking` fixes T = 1 and excess noise 2.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    transmission: Option<f64>,
    /// Excess noise referred to the channel input, shot-noise units.
    #[arg(long)]
    excess_noise: Option<f64>,
    /// Homodyne detection efficiency.
    #[arg(long)]
    efficiency: Option<f64>,
    /// Detector electronic noise, shot-noise units.
    #[arg(long)]
    electronic_noise: Option<f64>,
}

impl ChannelArgs {
    fn to_file(&self) -> ChannelFile {
        ChannelFile {
            preset: self.preset.clone(),
            transmission: self.transmission,
            excess_noise: self.excess_noise,
            efficiency: self.efficiency,
            electronic_noise: self.electronic_noise,
        }
    }
}

#[derive(Debug, Args)]
struct BetaThresholdArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Grid of modulation variances V_A.
    #[arg(long)]
    v_grid: Option<Grid>,
}

#[derive(Debug, Args)]
struct CodeSweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Degree-distribution file (JSON).
    #[arg(long)]
    distribution: Option<PathBuf>,
    /// Code length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s_grid: Option<Grid>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    min_word_errors: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
}

#[derive(Debug, Args)]
struct RaptorSweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// LT output-degree distribution file (JSON).
    #[arg(long)]
    distribution: Option<PathBuf>,
    /// Message length in bits.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s_grid: Option<Grid>,
    /// Messages per SNR.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    iters_per_batch: Option<usize>,
    /// Symbol budget as a multiple of k.
    #[arg(long)]
    max_overhead: Option<f64>,
}

#[derive(Debug, Args)]
struct KeyRateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Performance table (CSV or JSON); repeat for several codes.
    #[arg(long = "table")]
    tables: Vec<PathBuf>,
    /// Key-rate model; repeat for several curves.
    #[arg(long = "model")]
    models: Vec<KeyRateModel>,
    /// Distance grid in km.
    #[arg(long)]
    d_grid: Option<Grid>,
    #[arg(long)]
    loss_db_per_km: Option<f64>,
    /// Ignore operating points with a higher WER.
    #[arg(long)]
    wer_cap: Option<f64>,
    /// Skip the ideal-code reference curve.
    #[arg(long)]
    no_ideal: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Error::Config(e.to_string().trim_end().to_string())),
    };
    let common = CommonFile {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format,
    };
    match &cli.command {
        Command::Capacity(a) => {
            let flags = CapacityFile {
                grid: a.grid.clone(),
                which: a.which,
                p_b: a.p_b,
                base: a.base,
                common,
            };
            let merged = merge(a.config.as_ref(), &flags)?;
            let table = commands::capacity(&merged.resolve()?, seed(&merged.common))?;
            emit_single(&merged.common, &table)
        }
        Command::BetaThreshold(a) => {
            let flags = BetaThresholdFile {
                channel: a.channel.to_file(),
                v_grid: a.v_grid.clone(),
                common,
            };
            let merged = merge(a.config.as_ref(), &flags)?;
            let table = commands::beta_threshold(&merged.resolve()?, seed(&merged.common))?;
            emit_single(&merged.common, &table)
        }
        Command::CodeSweep(a) => {
            let flags = CodeSweepFile {
                distribution: a.distribution.clone(),
                n: a.n,
                s_grid: a.s_grid.clone(),
                max_iter: a.max_iter,
                min_word_errors: a.min_word_errors,
                max_trials: a.max_trials,
                common,
            };
            let merged = merge(a.config.as_ref(), &flags)?;
            let table = commands::code_sweep(&merged.resolve()?, seed(&merged.common))?;
            emit_single(&merged.common, &table)
        }
        Command::RaptorSweep(a) => {
            let flags = RaptorSweepFile {
                distribution: a.distribution.clone(),
                k: a.k,
                s_grid: a.s_grid.clone(),
                trials: a.trials,
                batch: a.batch,
                iters_per_batch: a.iters_per_batch,
                max_overhead: a.max_overhead,
                common,
            };
            let merged = merge(a.config.as_ref(), &flags)?;
            let table = commands::raptor_sweep(&merged.resolve()?, seed(&merged.common))?;
            emit_single(&merged.common, &table)
        }
        Command::Keyrate(a) => {
            let flags = KeyRateFile {
                channel: a.channel.to_file(),
                tables: (!a.tables.is_empty()).then(|| a.tables.clone()),
                models: (!a.models.is_empty()).then(|| a.models.clone()),
                d_grid: a.d_grid.clone(),
                loss_db_per_km: a.loss_db_per_km,
                wer_cap: a.wer_cap,
                ideal: a.no_ideal.then_some(false),
                common,
            };
            let merged = merge(a.config.as_ref(), &flags)?;
            let resolved = merged.resolve()?;
            let out = merged
                .common
                .out
                .clone()
                .ok_or_else(|| Error::Config("keyrate writes one file per curve and needs --out".into()))?;
            let format = merged.common.format.unwrap_or_default();
            let curves = commands::keyrate(&resolved, seed(&merged.common))?;
            let files = curves
                .iter()
                .map(|c| Ok((commands::curve_path(&out, &c.name, format.extension()), c.table.render(format)?)))
                .collect::<Result<Vec<_>>>()?;
            write_all_atomic(&files)?;
            let mut stdout = std::io::stdout().lock();
            for (c, (path, _)) in curves.iter().zip(&files) {
                let range = c
                    .max_range_km
                    .map_or_else(|| "no positive key rate".to_string(), |d| format!("{d} km"));
                let _ = writeln!(stdout, "{}: max range {range} ({})", c.name, path.display());
            }
            Ok(())
        }
    }
}

fn seed(common: &CommonFile) -> u64 {
    common.seed.unwrap_or(DEFAULT_SEED)
}

fn merge<T>(config_path: Option<&PathBuf>, flags: &T) -> Result<T>
where
    T: DeserializeOwned + Serialize + RebasePaths + Overlay + Default,
{
    let file = match config_path {
        Some(p) => config::load::<T>(p)?,
        None => T::default(),
    };
    Ok(file.overlay(flags))
}

fn emit_single<R: Serialize + DeserializeOwned>(common: &CommonFile, table: &Table<R>) -> Result<()> {
    let text = table.render(common.format.unwrap_or_default())?;
    match &common.out {
        Some(path) => write_all_atomic(&[(path.clone(), text)]),
        None => {
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))?;
            Ok(())
        }
    }
}
