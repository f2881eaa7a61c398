use alloc::vec;
use alloc::vec::Vec;

use super::graph::SparseParityCheck;
use crate::error::{Error, Result};

/// Message magnitude clamp, in LLR units.
pub const LLR_CLAMP: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Hard decisions, one `0/1` byte per code bit.
    pub bits: Vec<u8>,
    /// The hard decisions satisfy every parity check.
    pub converged: bool,
    pub iterations_used: usize,
    /// Whether `bits` equals the transmitted word, when that is known.
    pub correct: Option<bool>,
}

/// Flooding sum-product decoder with reusable message buffers.
///
/// LLRs are `ln P(0)/P(1)`. Check nodes use the tanh rule with
/// leave-one-out products computed by a forward/backward pass, so no
/// division by a near-zero tanh is ever needed.
#[derive(Debug, Clone)]
pub struct BpDecoder<'a> {
    code: &'a SparseParityCheck,
    v2c: Vec<f64>,
    c2v: Vec<f64>,
    scratch: Vec<f64>,
    posterior: Vec<f64>,
    bits: Vec<u8>,
}

impl<'a> BpDecoder<'a> {
    pub fn new(code: &'a SparseParityCheck) -> Self {
        let max_check = (0..code.m()).map(|c| code.check_degree(c)).max().unwrap_or(0);
        BpDecoder {
            code,
            v2c: vec![0.0; code.n_edges()],
            c2v: vec![0.0; code.n_edges()],
            scratch: vec![0.0; max_check],
            posterior: vec![0.0; code.n()],
            bits: vec![0; code.n()],
        }
    }

    pub fn code(&self) -> &SparseParityCheck {
        self.code
    }

    /// Posterior LLRs after the last [`decode`](Self::decode) call.
    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    /// Decodes `llr`, stopping early once the syndrome is zero. The
    /// channel decisions are tested before the first iteration.
    pub fn decode(&mut self, llr: &[f64], max_iter: usize) -> Result<DecodeResult> {
        self.load(llr)?;
        let mut iterations = 0;
        let mut converged = self.syndrome_is_zero();
        while !converged && iterations < max_iter {
            self.check_update();
            self.variable_update(llr);
            iterations += 1;
            converged = self.syndrome_is_zero();
        }
        Ok(DecodeResult {
            bits: self.bits.clone(),
            converged,
            iterations_used: iterations,
            correct: None,
        })
    }

    /// Posterior LLRs after exactly `iterations` flooding iterations, with
    /// no syndrome-based stopping. On a cycle-free graph these are the exact
    /// bitwise marginals once `iterations` reaches the graph diameter.
    pub fn marginals(&mut self, llr: &[f64], iterations: usize) -> Result<&[f64]> {
        self.load(llr)?;
        for _ in 0..iterations {
            self.check_update();
            self.variable_update(llr);
        }
        Ok(&self.posterior)
    }

    fn load(&mut self, llr: &[f64]) -> Result<()> {
        let code = self.code;
        if llr.len() != code.n() {
            return Err(Error::Length {
                expected: code.n(),
                found: llr.len(),
            });
        }
        if let Some(index) = llr.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteLlr { index });
        }
        for v in 0..code.n() {
            let l = llr[v].clamp(-LLR_CLAMP, LLR_CLAMP);
            self.posterior[v] = llr[v];
            self.bits[v] = u8::from(llr[v] < 0.0);
            for &e in code.var_edges(v) {
                self.v2c[e as usize] = l;
            }
        }
        Ok(())
    }

    fn check_update(&mut self) {
        let code = self.code;
        for c in 0..code.m() {
            let edges = code.check_edges(c);
            let t = &mut self.scratch[..edges.len()];
            for (ti, &m) in t.iter_mut().zip(&self.v2c[edges.clone()]) {
                *ti = tanh_half(m);
            }
            leave_one_out(t, 1.0, &mut self.c2v[edges]);
        }
    }

    fn variable_update(&mut self, llr: &[f64]) {
        let code = self.code;
        for (v, &channel) in llr.iter().enumerate() {
            let edges = code.var_edges(v);
            let total = channel + edges.iter().map(|&e| self.c2v[e as usize]).sum::<f64>();
            self.posterior[v] = total;
            self.bits[v] = u8::from(total < 0.0);
            for &e in edges {
                self.v2c[e as usize] = (total - self.c2v[e as usize]).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
    }

    fn syndrome_is_zero(&self) -> bool {
        let code = self.code;
        (0..code.m()).all(|c| code.check(c).iter().fold(0, |acc, &v| acc ^ self.bits[v as usize]) == 0)
    }
}

/// `tanh(x / 2)`, accurate near zero.
#[inline]
pub(crate) fn tanh_half(x: f64) -> f64 {
    let e = libm::expm1(-libm::fabs(x));
    libm::copysign(-e / (2.0 + e), x)
}

/// `2 atanh(p)` clamped to [`LLR_CLAMP`].
#[inline]
pub(crate) fn two_atanh(p: f64) -> f64 {
    if p >= 1.0 {
        return LLR_CLAMP;
    }
    if p <= -1.0 {
        return -LLR_CLAMP;
    }
    let a = libm::fabs(p);
    libm::copysign(libm::log1p(2.0 * a / (1.0 - a)), p).clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// Tanh-rule check update: `out[i] = 2 atanh(factor * prod_{j != i} t[j])`.
/// Leave-one-out products come from a backward pass stored in `out` and a
/// running forward product, so no division is needed.
#[inline]
pub(crate) fn leave_one_out(t: &[f64], factor: f64, out: &mut [f64]) {
    let deg = t.len();
    let mut suffix = 1.0;
    for i in (0..deg).rev() {
        out[i] = suffix;
        suffix *= t[i];
    }
    let mut prefix = factor;
    for i in 0..deg {
        out[i] = two_atanh(prefix * out[i]);
        prefix *= t[i];
    }
}

/// One-shot decode; see [`BpDecoder`].
pub fn bp_decode(llr: &[f64], code: &SparseParityCheck, max_iter: usize) -> Result<DecodeResult> {
    BpDecoder::new(code).decode(llr, max_iter)
}
