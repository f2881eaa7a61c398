//! File formats.
//!
//! Degree distributions and LT distributions are JSON documents. Result
//! tables are written either as CSV, preceded by `#` lines carrying the
//! command, seed and fully resolved configuration, or as a JSON document
//! with the same header fields and a `records` array mirroring the CSV rows.

use std::fs;
use std::path::Path;

use cvqkd_core::keyrate::{KeyRateModel, KeyRateResult};
use cvqkd_core::ldpc::{DegreeDistribution, NodeType};
use cvqkd_core::raptor::LtDistribution;
use cvqkd_core::PerformancePoint;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Output encoding of a result table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Degree-distribution file.
///
/// The plain form lists `[degree, node fraction]` pairs for each side; the
/// multi-edge form lists node types with a socket count per edge type.
/// Check fractions are relative to the number of checks in both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DegreeFile {
    Irregular {
        design_rate: f64,
        variable_degrees: Vec<(u32, f64)>,
        check_degrees: Vec<(u32, f64)>,
    },
    MultiEdge {
        design_rate: f64,
        edge_types: usize,
        variable_nodes: Vec<NodeType>,
        check_nodes: Vec<NodeType>,
    },
}

impl DegreeFile {
    pub fn to_distribution(&self) -> Result<DegreeDistribution> {
        Ok(match self {
            DegreeFile::Irregular {
                design_rate,
                variable_degrees,
                check_degrees,
            } => DegreeDistribution::irregular(*design_rate, variable_degrees, check_degrees)?,
            DegreeFile::MultiEdge {
                design_rate,
                edge_types,
                variable_nodes,
                check_nodes,
            } => {
                let widths_ok = variable_nodes
                    .iter()
                    .chain(check_nodes)
                    .all(|t| t.sockets.len() == *edge_types);
                if !widths_ok {
                    return Err(Error::parse(
                        "degree distribution",
                        format!("every node type needs exactly {edge_types} socket counts"),
                    ));
                }
                DegreeDistribution::multi_edge(*design_rate, variable_nodes.clone(), check_nodes.clone())?
            }
        })
    }

    pub fn from_distribution(dist: &DegreeDistribution) -> Self {
        if dist.is_irregular() {
            let pairs = |types: &[NodeType]| types.iter().map(|t| (t.degree(), t.fraction)).collect();
            DegreeFile::Irregular {
                design_rate: dist.design_rate(),
                variable_degrees: pairs(dist.variable_types()),
                check_degrees: pairs(dist.check_types()),
            }
        } else {
            DegreeFile::MultiEdge {
                design_rate: dist.design_rate(),
                edge_types: dist.edge_types(),
                variable_nodes: dist.variable_types().to_vec(),
                check_nodes: dist.check_types().to_vec(),
            }
        }
    }
}

/// LT output-degree distribution file, `{"terms": [[degree, probability], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtFile {
    pub terms: Vec<(u32, f64)>,
}

impl LtFile {
    pub fn to_distribution(&self) -> Result<LtDistribution> {
        Ok(LtDistribution::new(self.terms.clone())?)
    }

    pub fn from_distribution(dist: &LtDistribution) -> Self {
        LtFile {
            terms: dist.terms().to_vec(),
        }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse(path.display().to_string(), e))
}

pub fn load_degree_distribution(path: &Path) -> Result<DegreeDistribution> {
    read_json::<DegreeFile>(path)?.to_distribution()
}

pub fn load_lt_distribution(path: &Path) -> Result<LtDistribution> {
    read_json::<LtFile>(path)?.to_distribution()
}

/// Row of a performance table: `rate,snr,wer,ber,undetected_wer,beta,trials,seed`.
///
/// Code sweeps append a `beta_above_one` column; other producers omit it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfRecord {
    pub rate: f64,
    pub snr: f64,
    pub wer: f64,
    pub ber: Option<f64>,
    pub undetected_wer: Option<f64>,
    pub beta: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_above_one: Option<bool>,
}

impl From<&PerformancePoint> for PerfRecord {
    fn from(p: &PerformancePoint) -> Self {
        PerfRecord {
            rate: p.rate,
            snr: p.snr,
            wer: p.wer,
            ber: p.ber,
            undetected_wer: p.undetected_wer,
            beta: p.beta_fec,
            trials: p.trials,
            seed: p.seed,
            beta_above_one: None,
        }
    }
}

impl PerfRecord {
    pub fn with_beta_flag(mut self) -> Self {
        self.beta_above_one = Some(self.beta > 1.0);
        self
    }

    /// Back to a performance point, checking its accounting invariants.
    pub fn to_point(&self) -> Result<PerformancePoint> {
        let p = PerformancePoint {
            rate: self.rate,
            snr: self.snr,
            wer: self.wer,
            ber: self.ber,
            undetected_wer: self.undetected_wer,
            beta_fec: self.beta,
            trials: self.trials,
            seed: self.seed,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Row of a key-rate curve:
/// `distance_km,keyrate_raw,keyrate_clamped,model,code_rate,snr,wer,beta,v_a`.
///
/// Distances where no operating point is feasible have empty fields and a
/// clamped rate of zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateRecord {
    pub distance_km: f64,
    pub keyrate_raw: Option<f64>,
    pub keyrate_clamped: f64,
    pub model: KeyRateModel,
    pub code_rate: Option<f64>,
    pub snr: Option<f64>,
    pub wer: Option<f64>,
    pub beta: Option<f64>,
    pub v_a: Option<f64>,
}

impl KeyRateRecord {
    pub fn new(distance_km: f64, model: KeyRateModel, result: Option<&KeyRateResult>) -> Self {
        match result {
            Some(r) => KeyRateRecord {
                distance_km,
                keyrate_raw: Some(r.raw),
                keyrate_clamped: r.clamped,
                model,
                code_rate: Some(r.operating_point.rate),
                snr: Some(r.operating_point.snr),
                wer: Some(r.operating_point.wer),
                beta: Some(r.operating_point.beta_fec),
                v_a: Some(r.v_a()),
            },
            None => KeyRateRecord {
                distance_km,
                keyrate_raw: None,
                keyrate_clamped: 0.0,
                model,
                code_rate: None,
                snr: None,
                wer: None,
                beta: None,
                v_a: None,
            },
        }
    }
}

/// Row of a capacity table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub snr: f64,
    pub capacity: f64,
}

/// Row of a required-efficiency table. `error` names the failure for rows
/// where the ratio is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaThresholdRecord {
    pub v_a: f64,
    pub i_ab: Option<f64>,
    pub i_e: Option<f64>,
    pub required_beta: Option<f64>,
    pub error: Option<String>,
}

/// Provenance written ahead of every table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

/// A header plus its rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table<R> {
    #[serde(flatten)]
    pub header: Header,
    pub records: Vec<R>,
}

impl<R: Serialize + DeserializeOwned> Table<R> {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::parse("json output", e))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let config = serde_json::to_string(&self.header.config).map_err(|e| Error::parse("csv header", e))?;
                let mut out = format!(
                    "# command: {}\n# seed: {}\n# config: {}\n",
                    self.header.command, self.header.seed, config
                );
                let mut writer = csv::Writer::from_writer(Vec::new());
                for r in &self.records {
                    writer.serialize(r).map_err(|e| Error::parse("csv output", e))?;
                }
                let body = writer.into_inner().map_err(|e| Error::parse("csv output", e.error()))?;
                out.push_str(&String::from_utf8(body).expect("csv writer emits UTF-8"));
                Ok(out)
            }
        }
    }

    /// Parses either format; JSON documents start with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| Error::parse("json table", e));
        }
        let mut command = None;
        let mut seed = None;
        let mut config = None;
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let line = line.trim_start_matches('#').trim();
            if let Some(v) = line.strip_prefix("command:") {
                command = Some(v.trim().to_string());
            } else if let Some(v) = line.strip_prefix("seed:") {
                seed = Some(v.trim().parse::<u64>().map_err(|e| Error::parse("csv header seed", e))?);
            } else if let Some(v) = line.strip_prefix("config:") {
                config = Some(serde_json::from_str(v.trim()).map_err(|e| Error::parse("csv header config", e))?);
            }
        }
        let header = Header {
            command: command.ok_or_else(|| Error::parse("csv table", "missing '# command:' line"))?,
            seed: seed.ok_or_else(|| Error::parse("csv table", "missing '# seed:' line"))?,
            config: config.ok_or_else(|| Error::parse("csv table", "missing '# config:' line"))?,
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let records = reader
            .deserialize()
            .collect::<Result<Vec<R>, _>>()
            .map_err(|e| Error::parse("csv table", e))?;
        Ok(Table { header, records })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(path.display().to_string(), message),
            other => other,
        })
    }
}

/// Reads a performance table and validates every point.
pub fn load_performance_table(path: &Path) -> Result<Vec<PerformancePoint>> {
    Table::<PerfRecord>::load(path)?
        .records
        .iter()
        .map(PerfRecord::to_point)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::parse(path.display().to_string(), e))
}
