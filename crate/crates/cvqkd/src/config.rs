//! Per-command configuration files (TOML) and their resolution against
//! command-line overrides and defaults.
//!
//! Every `*File` struct mirrors the TOML document for one subcommand; all
//! fields are optional. The matching resolved struct has every value filled
//! in and is what gets written into output headers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cvqkd_core::capacity::BaseCapacity;
use cvqkd_core::keyrate::{KeyRateModel, DEFAULT_LOSS_DB_PER_KM};
use cvqkd_core::protocol::{entanglement_breaking_preset, Channel};
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::formats::{read_text, Format};

/// A list of values, written either explicitly or as an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Points(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        points: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match *self {
            Grid::Points(ref v) => v.clone(),
            Grid::Range {
                start,
                stop,
                points,
                spacing,
            } => {
                if points == 0 {
                    return Err(config("grid needs at least one point"));
                }
                if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
                    return Err(config("log grid bounds must be positive"));
                }
                let step = |i: usize| {
                    if points == 1 {
                        0.0
                    } else {
                        i as f64 / (points - 1) as f64
                    }
                };
                (0..points)
                    .map(|i| match spacing {
                        Spacing::Linear => start + (stop - start) * step(i),
                        Spacing::Log => (start.ln() + (stop.ln() - start.ln()) * step(i)).exp(),
                    })
                    .collect()
            }
        };
        if values.is_empty() {
            return Err(config("grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(config(format!("grid value {v} is not finite")));
        }
        Ok(values)
    }
}

/// `a,b,c` lists, `start:stop:points` linear ranges and
/// `log:start:stop:points` logarithmic ranges.
impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let (spacing, body) = match s.strip_prefix("log:") {
            Some(rest) => (Spacing::Log, rest),
            None => (Spacing::Linear, s),
        };
        if body.contains(':') {
            let parts: Vec<&str> = body.split(':').collect();
            let [start, stop, points] = parts[..] else {
                return Err(format!("expected start:stop:points, got {s:?}"));
            };
            return Ok(Grid::Range {
                start: num(start)?,
                stop: num(stop)?,
                points: points.trim().parse().map_err(|e| format!("{points:?}: {e}"))?,
                spacing,
            });
        }
        if spacing == Spacing::Log {
            return Err(format!("expected log:start:stop:points, got {s:?}"));
        }
        body.split(',').map(num).collect::<std::result::Result<_, _>>().map(Grid::Points)
    }
}

/// Channel and detector parameters. `preset = "entanglement-breaking"` fixes
/// `T = 1, epsilon = 2`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub preset: Option<String>,
    pub transmission: Option<f64>,
    pub excess_noise: Option<f64>,
    pub efficiency: Option<f64>,
    pub electronic_noise: Option<f64>,
}

/// Defaults of the detector and line parameters when a config leaves them out.
pub const DEFAULT_EXCESS_NOISE: f64 = 0.01;
pub const DEFAULT_EFFICIENCY: f64 = 0.6;
pub const DEFAULT_ELECTRONIC_NOISE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelResolved {
    pub transmission: f64,
    pub excess_noise: f64,
    pub efficiency: f64,
    pub electronic_noise: f64,
}

impl ChannelFile {
    fn overlay(&self, flags: &ChannelFile) -> ChannelFile {
        ChannelFile {
            preset: flags.preset.clone().or_else(|| self.preset.clone()),
            transmission: flags.transmission.or(self.transmission),
            excess_noise: flags.excess_noise.or(self.excess_noise),
            efficiency: flags.efficiency.or(self.efficiency),
            electronic_noise: flags.electronic_noise.or(self.electronic_noise),
        }
    }

    pub fn resolve(&self) -> Result<ChannelResolved> {
        let (transmission, excess_noise) = match self.preset.as_deref() {
            None => (
                self.transmission.unwrap_or(1.0),
                self.excess_noise.unwrap_or(DEFAULT_EXCESS_NOISE),
            ),
            Some("entanglement-breaking" | "entanglement_breaking") => {
                if self.transmission.is_some() || self.excess_noise.is_some() {
                    return Err(config(
                        "the entanglement-breaking preset fixes transmission and excess_noise",
                    ));
                }
                let line = entanglement_breaking_preset();
                (line.transmission, line.excess_noise)
            }
            Some(other) => return Err(config(format!("unknown channel preset {other:?}"))),
        };
        let resolved = ChannelResolved {
            transmission,
            excess_noise,
            efficiency: self.efficiency.unwrap_or(DEFAULT_EFFICIENCY),
            electronic_noise: self.electronic_noise.unwrap_or(DEFAULT_ELECTRONIC_NOISE),
        };
        resolved.channel()?;
        Ok(resolved)
    }
}

impl ChannelResolved {
    pub fn channel(&self) -> Result<Channel> {
        Ok(Channel::new(
            self.transmission,
            self.excess_noise,
            self.efficiency,
            self.electronic_noise,
        )?)
    }
}

/// Which capacity curve the `capacity` command tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CapacityKind {
    Gaussian,
    Biawgn,
    Nonzero,
}

/// Zero-error capacity the non-zero-error curve is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    #[default]
    Gaussian,
    Biawgn,
}

impl From<BaseKind> for BaseCapacity {
    fn from(b: BaseKind) -> Self {
        match b {
            BaseKind::Gaussian => BaseCapacity::Gaussian,
            BaseKind::Biawgn => BaseCapacity::BiAwgn,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CapacityFile {
    pub grid: Option<Grid>,
    pub which: Option<CapacityKind>,
    pub p_b: Option<f64>,
    pub base: Option<BaseKind>,
    #[serde(flatten)]
    pub common: CommonFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResolved {
    pub grid: Vec<f64>,
    pub which: CapacityKind,
    pub p_b: Option<f64>,
    pub base: BaseKind,
}

impl CapacityFile {
    pub fn resolve(&self) -> Result<CapacityResolved> {
        let which = self.which.unwrap_or(CapacityKind::Gaussian);
        let p_b = match (which, self.p_b) {
            (CapacityKind::Nonzero, None) => return Err(config("which = nonzero needs p_b")),
            (CapacityKind::Nonzero, Some(p)) => Some(p),
            (_, Some(_)) => return Err(config("p_b only applies to which = nonzero")),
            (_, None) => None,
        };
        let grid = required(&self.grid, "grid")?.values()?;
        if let Some(s) = grid.iter().find(|&&s| s < 0.0) {
            return Err(config(format!("SNR {s} is negative")));
        }
        Ok(CapacityResolved {
            grid,
            which,
            p_b,
            base: self.base.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BetaThresholdFile {
    #[serde(default)]
    pub channel: ChannelFile,
    pub v_grid: Option<Grid>,
    #[serde(flatten)]
    pub common: CommonFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaThresholdResolved {
    pub channel: ChannelResolved,
    pub v_grid: Vec<f64>,
}

impl BetaThresholdFile {
    pub fn resolve(&self) -> Result<BetaThresholdResolved> {
        let v_grid = required(&self.v_grid, "v_grid")?.values()?;
        if let Some(v) = v_grid.iter().find(|&&v| v < 0.0) {
            return Err(config(format!("modulation variance {v} is negative")));
        }
        Ok(BetaThresholdResolved {
            channel: self.channel.resolve()?,
            v_grid,
        })
    }
}

pub const DEFAULT_MAX_ITER: usize = 5000;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CodeSweepFile {
    pub distribution: Option<PathBuf>,
    pub n: Option<usize>,
    pub s_grid: Option<Grid>,
    pub max_iter: Option<usize>,
    pub min_word_errors: Option<u64>,
    pub max_trials: Option<u64>,
    #[serde(flatten)]
    pub common: CommonFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSweepResolved {
    pub distribution: PathBuf,
    pub n: usize,
    pub s_grid: Vec<f64>,
    pub max_iter: usize,
    pub min_word_errors: u64,
    pub max_trials: u64,
}

impl CodeSweepFile {
    pub fn resolve(&self) -> Result<CodeSweepResolved> {
        let stop = cvqkd_core::ldpc::StoppingRule::default();
        let r = CodeSweepResolved {
            distribution: required(&self.distribution, "distribution")?.clone(),
            n: *required(&self.n, "n")?,
            s_grid: required(&self.s_grid, "s_grid")?.values()?,
            max_iter: self.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            min_word_errors: self.min_word_errors.unwrap_or(stop.min_word_errors),
            max_trials: self.max_trials.unwrap_or(stop.max_trials),
        };
        if r.max_iter == 0 {
            return Err(config("max_iter must be at least 1"));
        }
        cvqkd_core::ldpc::check_grid(&r.s_grid)?;
        Ok(r)
    }
}

pub const DEFAULT_RAPTOR_K: usize = 10_000;
pub const DEFAULT_RAPTOR_TRIALS: u64 = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RaptorSweepFile {
    pub distribution: Option<PathBuf>,
    pub k: Option<usize>,
    pub s_grid: Option<Grid>,
    pub trials: Option<u64>,
    pub batch: Option<usize>,
    pub iters_per_batch: Option<usize>,
    /// Symbol budget as a multiple of `k`.
    pub max_overhead: Option<f64>,
    #[serde(flatten)]
    pub common: CommonFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaptorSweepResolved {
    pub distribution: PathBuf,
    pub k: usize,
    pub s_grid: Vec<f64>,
    pub trials: u64,
    pub batch: Option<usize>,
    pub iters_per_batch: Option<usize>,
    pub max_overhead: Option<f64>,
}

impl RaptorSweepFile {
    pub fn resolve(&self) -> Result<RaptorSweepResolved> {
        let r = RaptorSweepResolved {
            distribution: required(&self.distribution, "distribution")?.clone(),
            k: self.k.unwrap_or(DEFAULT_RAPTOR_K),
            s_grid: required(&self.s_grid, "s_grid")?.values()?,
            trials: self.trials.unwrap_or(DEFAULT_RAPTOR_TRIALS),
            batch: self.batch,
            iters_per_batch: self.iters_per_batch,
            max_overhead: self.max_overhead,
        };
        cvqkd_core::ldpc::check_grid(&r.s_grid)?;
        if r.trials == 0 {
            return Err(config("trials must be at least 1"));
        }
        if r.batch == Some(0) || r.iters_per_batch == Some(0) {
            return Err(config("batch and iters_per_batch must be at least 1"));
        }
        if let Some(o) = r.max_overhead {
            if !(o >= 1.0 && o.is_finite()) {
                return Err(config("max_overhead must be at least 1"));
            }
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KeyRateFile {
    #[serde(default)]
    pub channel: ChannelFile,
    pub tables: Option<Vec<PathBuf>>,
    pub models: Option<Vec<KeyRateModel>>,
    pub d_grid: Option<Grid>,
    pub loss_db_per_km: Option<f64>,
    pub wer_cap: Option<f64>,
    pub ideal: Option<bool>,
    #[serde(flatten)]
    pub common: CommonFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRateResolved {
    pub channel: ChannelResolved,
    pub tables: Vec<PathBuf>,
    pub models: Vec<KeyRateModel>,
    pub d_grid: Vec<f64>,
    pub loss_db_per_km: f64,
    pub wer_cap: Option<f64>,
    pub ideal: bool,
}

impl KeyRateFile {
    pub fn resolve(&self) -> Result<KeyRateResolved> {
        if self.channel.transmission.is_some() {
            return Err(config("keyrate derives transmission from distance; drop channel.transmission"));
        }
        let tables = required(&self.tables, "tables")?.clone();
        if tables.is_empty() {
            return Err(config("tables must list at least one performance table"));
        }
        let models = self
            .models
            .clone()
            .unwrap_or_else(|| vec![KeyRateModel::Standard, KeyRateModel::PostSelect]);
        if models.is_empty() {
            return Err(config("models must not be empty"));
        }
        let mut seen = models.clone();
        seen.sort_by_key(|m| m.name());
        seen.dedup();
        if seen.len() != models.len() {
            return Err(config("models lists a model twice"));
        }
        let d_grid = required(&self.d_grid, "d_grid")?.values()?;
        if let Some(d) = d_grid.iter().find(|&&d| d < 0.0) {
            return Err(config(format!("distance {d} is negative")));
        }
        let loss = self.loss_db_per_km.unwrap_or(DEFAULT_LOSS_DB_PER_KM);
        if !(loss > 0.0 && loss.is_finite()) {
            return Err(config("loss_db_per_km must be positive"));
        }
        if let Some(cap) = self.wer_cap {
            if !(0.0..=1.0).contains(&cap) {
                return Err(config("wer_cap must lie in [0, 1]"));
            }
        }
        Ok(KeyRateResolved {
            channel: self.channel.resolve()?,
            tables,
            models,
            d_grid,
            loss_db_per_km: loss,
            wer_cap: self.wer_cap,
            ideal: self.ideal.unwrap_or(true),
        })
    }
}

/// Settings shared by every command; the global flags override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommonFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn required<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| config(format!("{name} is required (config file or flag)")))
}

/// Loads a TOML config. Relative paths inside it are taken relative to the
/// file's directory.
pub fn load<T: serde::de::DeserializeOwned + Serialize + RebasePaths>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    let context = || path.display().to_string();
    let raw: toml::Table = toml::from_str(&text).map_err(|e| Error::parse(context(), e))?;
    let mut value: T = raw.clone().try_into().map_err(|e| Error::parse(context(), e))?;
    // Flattened sections swallow unknown keys, so compare against what the
    // parsed value writes back.
    let known = toml::Table::try_from(&value).map_err(|e| Error::parse(context(), e))?;
    if let Some(key) = unknown_key(&raw, &known, "") {
        return Err(Error::parse(context(), format!("unknown key `{key}`")));
    }
    if let Some(dir) = path.parent() {
        value.rebase(dir);
    }
    Ok(value)
}

fn unknown_key(raw: &toml::Table, known: &toml::Table, prefix: &str) -> Option<String> {
    raw.iter().find_map(|(k, v)| {
        let path = format!("{prefix}{k}");
        match (v, known.get(k)) {
            (_, None) => Some(path),
            (toml::Value::Table(r), Some(toml::Value::Table(n))) => unknown_key(r, n, &format!("{path}.")),
            _ => None,
        }
    })
}

/// Rewrites relative paths of a config to be relative to `dir`.
pub trait RebasePaths {
    fn rebase(&mut self, dir: &Path);
}

fn rebase_path(p: &mut PathBuf, dir: &Path) {
    if p.is_relative() {
        *p = dir.join(&*p);
    }
}

impl RebasePaths for CommonFile {
    fn rebase(&mut self, dir: &Path) {
        if let Some(p) = self.out.as_mut() {
            rebase_path(p, dir);
        }
    }
}

impl RebasePaths for CapacityFile {
    fn rebase(&mut self, dir: &Path) {
        self.common.rebase(dir);
    }
}

impl RebasePaths for BetaThresholdFile {
    fn rebase(&mut self, dir: &Path) {
        self.common.rebase(dir);
    }
}

impl RebasePaths for CodeSweepFile {
    fn rebase(&mut self, dir: &Path) {
        if let Some(p) = self.distribution.as_mut() {
            rebase_path(p, dir);
        }
        self.common.rebase(dir);
    }
}

impl RebasePaths for RaptorSweepFile {
    fn rebase(&mut self, dir: &Path) {
        if let Some(p) = self.distribution.as_mut() {
            rebase_path(p, dir);
        }
        self.common.rebase(dir);
    }
}

impl RebasePaths for KeyRateFile {
    fn rebase(&mut self, dir: &Path) {
        for p in self.tables.iter_mut().flatten() {
            rebase_path(p, dir);
        }
        self.common.rebase(dir);
    }
}

/// Field-wise `flags.or(file)`.
pub trait Overlay {
    fn overlay(&self, flags: &Self) -> Self;
}

impl Overlay for CommonFile {
    fn overlay(&self, flags: &Self) -> Self {
        CommonFile {
            seed: flags.seed.or(self.seed),
            out: flags.out.clone().or_else(|| self.out.clone()),
            format: flags.format.or(self.format),
        }
    }
}

impl Overlay for CapacityFile {
    fn overlay(&self, f: &Self) -> Self {
        CapacityFile {
            grid: f.grid.clone().or_else(|| self.grid.clone()),
            which: f.which.or(self.which),
            p_b: f.p_b.or(self.p_b),
            base: f.base.or(self.base),
            common: self.common.overlay(&f.common),
        }
    }
}

impl Overlay for BetaThresholdFile {
    fn overlay(&self, f: &Self) -> Self {
        BetaThresholdFile {
            channel: self.channel.overlay(&f.channel),
            v_grid: f.v_grid.clone().or_else(|| self.v_grid.clone()),
            common: self.common.overlay(&f.common),
        }
    }
}

impl Overlay for CodeSweepFile {
    fn overlay(&self, f: &Self) -> Self {
        CodeSweepFile {
            distribution: f.distribution.clone().or_else(|| self.distribution.clone()),
            n: f.n.or(self.n),
            s_grid: f.s_grid.clone().or_else(|| self.s_grid.clone()),
            max_iter: f.max_iter.or(self.max_iter),
            min_word_errors: f.min_word_errors.or(self.min_word_errors),
            max_trials: f.max_trials.or(self.max_trials),
            common: self.common.overlay(&f.common),
        }
    }
}

impl Overlay for RaptorSweepFile {
    fn overlay(&self, f: &Self) -> Self {
        RaptorSweepFile {
            distribution: f.distribution.clone().or_else(|| self.distribution.clone()),
            k: f.k.or(self.k),
            s_grid: f.s_grid.clone().or_else(|| self.s_grid.clone()),
            trials: f.trials.or(self.trials),
            batch: f.batch.or(self.batch),
            iters_per_batch: f.iters_per_batch.or(self.iters_per_batch),
            max_overhead: f.max_overhead.or(self.max_overhead),
            common: self.common.overlay(&f.common),
        }
    }
}

impl Overlay for KeyRateFile {
    fn overlay(&self, f: &Self) -> Self {
        KeyRateFile {
            channel: self.channel.overlay(&f.channel),
            tables: f.tables.clone().or_else(|| self.tables.clone()),
            models: f.models.clone().or_else(|| self.models.clone()),
            d_grid: f.d_grid.clone().or_else(|| self.d_grid.clone()),
            loss_db_per_km: f.loss_db_per_km.or(self.loss_db_per_km),
            wer_cap: f.wer_cap.or(self.wer_cap),
            ideal: f.ideal.or(self.ideal),
            common: self.common.overlay(&f.common),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Points(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            Grid::Range {
                start,
                stop,
                points,
                spacing,
            } => {
                if *spacing == Spacing::Log {
                    f.write_str("log:")?;
                }
                write!(f, "{start}:{stop}:{points}")
            }
        }
    }
}
