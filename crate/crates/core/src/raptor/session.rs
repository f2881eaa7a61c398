use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::lt::LtDistribution;
use crate::capacity::biawgn_capacity;
use crate::error::{domain, Error, Result};
use crate::gf2::SystematicEncoder;
use crate::ldpc::{build_code, leave_one_out, tanh_half, two_atanh, DegreeDistribution, SparseParityCheck, LLR_CLAMP};
use crate::rng::{derive_seed, stream};

/// Variable degree of the precode.
pub const PRECODE_VAR_DEGREE: u32 = 3;
/// Check degree of the precode; with degree-3 variables this gives rate 0.95.
pub const PRECODE_CHECK_DEGREE: u32 = 60;

const SALT_PRECODE: u64 = 1;
const SALT_MESSAGE: u64 = 2;
const SALT_SYMBOLS: u64 = 3;
const SALT_NOISE: u64 = 4;

/// A Raptor code: a high-rate LDPC precode producing `k'` intermediate
/// bits from `k` message bits, followed by an LT code over them.
#[derive(Debug, Clone)]
pub struct RaptorCode {
    k: usize,
    precode: SparseParityCheck,
    encoder: SystematicEncoder,
    dist: LtDistribution,
}

impl RaptorCode {
    /// Builds the precode for `k` message bits: a regular (3, 60) LDPC code
    /// of length `ceil(k / 0.95)`, encoded systematically. Free positions
    /// beyond the first `k` carry known zeros.
    pub fn new(k: usize, dist: LtDistribution, seed: u64) -> Result<Self> {
        if k < 2 * PRECODE_CHECK_DEGREE as usize {
            return Err(domain("k", k as f64, "k >= 120"));
        }
        let shape = DegreeDistribution::regular(PRECODE_VAR_DEGREE, PRECODE_CHECK_DEGREE)?;
        let len = libm::ceil(k as f64 / shape.design_rate()) as usize;
        let precode = build_code(&shape, len, derive_seed(seed, SALT_PRECODE))?;
        let rows: Vec<&[u32]> = (0..precode.m()).map(|c| precode.check(c)).collect();
        let encoder = SystematicEncoder::new(precode.n(), &rows);
        if encoder.dimension() < k {
            return Err(Error::Graph(alloc::format!(
                "precode carries {} bits, {k} needed",
                encoder.dimension()
            )));
        }
        Ok(RaptorCode {
            k,
            precode,
            encoder,
            dist,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of intermediate bits `k'`.
    pub fn intermediate_len(&self) -> usize {
        self.precode.n()
    }

    pub fn precode(&self) -> &SparseParityCheck {
        &self.precode
    }

    pub fn distribution(&self) -> &LtDistribution {
        &self.dist
    }

    /// Intermediate bits that are known to be zero.
    fn padding(&self) -> &[usize] {
        &self.encoder.message_positions()[self.k..]
    }

    /// Intermediate-bit neighbours of coded symbol `index` in a session
    /// seeded with `seed`.
    pub fn neighbors(&self, seed: u64, index: u64) -> Vec<u32> {
        let mut rng = stream(derive_seed(seed, SALT_SYMBOLS), index);
        let len = self.intermediate_len();
        let d = (self.dist.sample(&mut rng) as usize).min(len);
        index::sample(&mut rng, len, d).into_iter().map(|i| i as u32).collect()
    }
}

/// Sender state: one message, its intermediate word and the number of
/// coded symbols emitted so far.
#[derive(Debug, Clone)]
pub struct RaptorSession<'a> {
    code: &'a RaptorCode,
    seed: u64,
    message: Vec<u8>,
    intermediate: Vec<u8>,
    symbols_sent: u64,
}

impl<'a> RaptorSession<'a> {
    /// Session carrying a uniformly random message drawn from `seed`.
    pub fn new(code: &'a RaptorCode, seed: u64) -> Self {
        let mut rng = stream(derive_seed(seed, SALT_MESSAGE), 0);
        let message = (0..code.k).map(|_| rng.random::<bool>() as u8).collect();
        Self::with_message(code, message, seed).expect("message has length k")
    }

    pub fn with_message(code: &'a RaptorCode, message: Vec<u8>, seed: u64) -> Result<Self> {
        if message.len() != code.k {
            return Err(Error::Length {
                expected: code.k,
                found: message.len(),
            });
        }
        let intermediate = code.encoder.encode(&message);
        Ok(RaptorSession {
            code,
            seed,
            message,
            intermediate,
            symbols_sent: 0,
        })
    }

    pub fn code(&self) -> &RaptorCode {
        self.code
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn message(&self) -> &[u8] {
        &self.message
    }

    pub fn intermediate(&self) -> &[u8] {
        &self.intermediate
    }

    pub fn symbols_sent(&self) -> u64 {
        self.symbols_sent
    }

    /// The next `count` coded bits. Symbol `i` is the XOR of the
    /// intermediate bits returned by [`RaptorCode::neighbors`] for `i`.
    pub fn lt_encode_next(&mut self, count: usize) -> Result<Vec<u8>> {
        if count == 0 {
            return Err(domain("count", 0.0, "count >= 1"));
        }
        let start = self.symbols_sent;
        self.symbols_sent += count as u64;
        Ok((start..self.symbols_sent)
            .map(|i| {
                self.code
                    .neighbors(self.seed, i)
                    .iter()
                    .fold(0, |acc, &v| acc ^ self.intermediate[v as usize])
            })
            .collect())
    }
}

/// Receiver schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RaptorSchedule {
    /// Coded symbols received between decoding attempts.
    pub batch: usize,
    /// BP iterations run after each batch.
    pub iters_per_batch: usize,
    /// Give up after this many symbols.
    pub max_symbols: usize,
    /// Symbols collected before the first attempt.
    pub start_symbols: usize,
}

impl RaptorSchedule {
    /// Batches of `ceil(0.02 k)`, 10 iterations each, first attempt at
    /// `max(k, 0.8 k / C_biawgn(s))` symbols and a cap of
    /// `20 k / C_biawgn(s)` symbols.
    pub fn default_for(k: usize, s: f64) -> Result<Self> {
        let c = biawgn_capacity(s)?;
        if !(c > 0.0) {
            return Err(domain("s", s, "s > 0"));
        }
        let kf = k as f64;
        Ok(RaptorSchedule {
            batch: libm::ceil(0.02 * kf) as usize,
            iters_per_batch: 10,
            max_symbols: libm::ceil(20.0 * kf / c) as usize,
            start_symbols: (libm::floor(0.8 * kf / c) as usize).max(k),
        })
    }
}

/// Result of one rateless transmission.
#[derive(Debug, Clone, PartialEq)]
pub struct RaptorOutcome {
    /// Decoded message (hard decisions when decoding failed).
    pub message: Vec<u8>,
    pub symbols_used: usize,
    /// The decoder reached a state consistent with every constraint.
    pub success: bool,
    /// The decoded message equals the transmitted one.
    pub correct: bool,
    pub iterations: usize,
}

impl RaptorOutcome {
    /// `k / symbols_used` on success, undefined otherwise.
    pub fn realized_rate(&self) -> Option<f64> {
        self.success
            .then(|| self.message.len() as f64 / self.symbols_used as f64)
    }
}

/// Joint belief propagation over precode and LT checks.
///
/// Intermediate bits are the only variable nodes. Each LT check carries the
/// channel LLR of its coded symbol as a fixed factor in the tanh product;
/// precode checks have none. New symbols extend the graph in place and BP
/// continues from the current messages.
struct JointDecoder {
    prior: Vec<f64>,
    check_start: Vec<u32>,
    edge_var: Vec<u32>,
    /// `tanh(L/2)` of the coded symbol, `1` for precode checks.
    check_factor: Vec<f64>,
    channel_llr: Vec<f64>,
    precode_checks: usize,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    total: Vec<f64>,
    tanh_buf: Vec<f64>,
}

impl JointDecoder {
    fn new(code: &RaptorCode) -> Self {
        let n = code.intermediate_len();
        let mut prior = vec![0.0; n];
        for &p in code.padding() {
            prior[p] = LLR_CLAMP;
        }
        let precode = code.precode();
        let mut check_start = vec![0u32];
        let mut edge_var = Vec::new();
        for c in 0..precode.m() {
            edge_var.extend_from_slice(precode.check(c));
            check_start.push(edge_var.len() as u32);
        }
        let e = edge_var.len();
        let v2c: Vec<f64> = edge_var.iter().map(|&v| prior[v as usize]).collect();
        JointDecoder {
            total: prior.clone(),
            prior,
            check_start,
            edge_var,
            check_factor: vec![1.0; precode.m()],
            channel_llr: vec![0.0; precode.m()],
            precode_checks: precode.m(),
            v2c,
            c2v: vec![0.0; e],
            tanh_buf: Vec::new(),
        }
    }

    fn add_symbol(&mut self, neighbors: &[u32], llr: f64) {
        for &v in neighbors {
            self.edge_var.push(v);
            self.v2c.push(self.total[v as usize].clamp(-LLR_CLAMP, LLR_CLAMP));
            self.c2v.push(0.0);
        }
        self.check_start.push(self.edge_var.len() as u32);
        self.check_factor.push(tanh_half(llr));
        self.channel_llr.push(llr);
    }

    fn n_checks(&self) -> usize {
        self.check_start.len() - 1
    }

    fn iterate(&mut self) {
        for c in 0..self.n_checks() {
            let (start, end) = (self.check_start[c] as usize, self.check_start[c + 1] as usize);
            self.tanh_buf.clear();
            self.tanh_buf.extend(self.v2c[start..end].iter().map(|&m| tanh_half(m)));
            leave_one_out(&self.tanh_buf, self.check_factor[c], &mut self.c2v[start..end]);
        }
        self.total.copy_from_slice(&self.prior);
        for (&v, &m) in self.edge_var.iter().zip(&self.c2v) {
            self.total[v as usize] += m;
        }
        for ((&v, out), &m) in self.edge_var.iter().zip(self.v2c.iter_mut()).zip(&self.c2v) {
            *out = (self.total[v as usize] - m).clamp(-LLR_CLAMP, LLR_CLAMP);
        }
    }

    fn hard(&self) -> Vec<u8> {
        self.total.iter().map(|&l| u8::from(l < 0.0)).collect()
    }

    /// Zero precode syndrome, and every coded symbol's posterior decision
    /// equals the XOR of its neighbours' decisions.
    fn consistent(&self, bits: &[u8]) -> bool {
        let parity = |c: usize| {
            let (s, e) = (self.check_start[c] as usize, self.check_start[c + 1] as usize);
            self.edge_var[s..e].iter().fold(0u8, |acc, &v| acc ^ bits[v as usize])
        };
        if (0..self.precode_checks).any(|c| parity(c) != 0) {
            return false;
        }
        (self.precode_checks..self.n_checks()).all(|c| {
            let (s, e) = (self.check_start[c] as usize, self.check_start[c + 1] as usize);
            let product: f64 = self.v2c[s..e].iter().map(|&m| tanh_half(m)).product();
            let posterior = self.channel_llr[c] + two_atanh(product);
            u8::from(posterior < 0.0) == parity(c)
        })
    }
}

/// Transmits `session`'s message over a BI-AWGN channel at SNR `s`,
/// receiving symbols in batches and running joint BP until the decoder is
/// consistent or `schedule.max_symbols` is reached.
///
/// Noise on symbol `i` is drawn from stream `i` of the session seed, so a
/// session is replayable and sees the same normalized noise at every SNR.
pub fn raptor_decode(session: &mut RaptorSession<'_>, s: f64, schedule: &RaptorSchedule) -> Result<RaptorOutcome> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain("s", s, "s > 0"));
    }
    if schedule.batch == 0 {
        return Err(domain("batch", 0.0, "batch >= 1"));
    }
    let code = session.code;
    let sigma = 1.0 / libm::sqrt(s);
    let noise_seed = derive_seed(session.seed, SALT_NOISE);
    let mut decoder = JointDecoder::new(code);
    let mut iterations = 0;
    let mut bits = decoder.hard();
    let mut success = false;
    loop {
        let received = session.symbols_sent() as usize;
        if received >= schedule.max_symbols {
            break;
        }
        let want = if received < schedule.start_symbols {
            schedule.start_symbols - received
        } else {
            schedule.batch
        };
        let count = want.min(schedule.max_symbols - received).max(1);
        let first = session.symbols_sent();
        let coded = session.lt_encode_next(count)?;
        for (offset, &bit) in coded.iter().enumerate() {
            let index = first + offset as u64;
            let z: f64 = StandardNormal.sample(&mut stream(noise_seed, index));
            let y = if bit == 0 { 1.0 } else { -1.0 } + sigma * z;
            decoder.add_symbol(&code.neighbors(session.seed, index), 2.0 * y * s);
        }
        for _ in 0..schedule.iters_per_batch.max(1) {
            decoder.iterate();
            iterations += 1;
            bits = decoder.hard();
            if decoder.consistent(&bits) {
                success = true;
                break;
            }
        }
        if success {
            break;
        }
    }
    let message = code.encoder.extract(&bits, code.k);
    let correct = message == session.message;
    Ok(RaptorOutcome {
        message,
        symbols_used: session.symbols_sent() as usize,
        success,
        correct,
        iterations,
    })
}
