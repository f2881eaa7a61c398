//! Capacity reference curves and reconciliation efficiency.
//!
//! SNR convention: BPSK symbols `±1`, real Gaussian noise of variance
//! `1/s`, so the Gaussian-input capacity is `1/2 log2(1 + s)`.

use crate::error::{domain, Result};
use core::f64::consts::{LN_2, PI};

/// Gaussian-input AWGN capacity `1/2 log2(1 + s)` in bits per channel use.
pub fn gaussian_capacity(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(domain("s", s, "s >= 0"));
    }
    Ok(0.5 * libm::log2(1.0 + s))
}

/// Relative tolerance of the BI-AWGN quadrature.
pub const BIAWGN_REL_TOL: f64 = 1e-8;

/// Capacity of the binary-input AWGN channel with equiprobable inputs.
///
/// `C = 1 - E[log2(1 + exp(-2Y/σ²))]` with `Y ~ N(1, σ²)`, `σ² = 1/s`.
/// The expectation is integrated over `y ∈ [-8σ-1, 8σ+1]` after the change
/// of variable `y = 1 + σz`.
pub fn biawgn_capacity(s: f64) -> Result<f64> {
    if !(s >= 0.0) || s.is_nan() {
        return Err(domain("s", s, "s >= 0"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if s.is_infinite() {
        return Ok(1.0);
    }
    let sigma = 1.0 / libm::sqrt(s);
    let integrand = |z: f64| {
        let y = 1.0 + sigma * z;
        let llr = 2.0 * y * s;
        let density = libm::exp(-0.5 * z * z) / libm::sqrt(2.0 * PI);
        density * softplus(-llr) / LN_2
    };
    let lo = -8.0 - 2.0 / sigma;
    let hi = 8.0;
    let loss = integrate(integrand, lo, hi, BIAWGN_REL_TOL);
    Ok((1.0 - loss).clamp(0.0, 1.0))
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}

/// Adaptive Simpson over a fixed initial partition. The partition keeps a
/// narrow peak from being missed by the first coarse estimate.
fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    const PANELS: usize = 64;
    let width = (hi - lo) / PANELS as f64;
    let mut coarse = 0.0;
    let mut panels = [(0.0, 0.0, 0.0, 0.0, 0.0, 0.0); PANELS];
    for (i, panel) in panels.iter_mut().enumerate() {
        let a = lo + width * i as f64;
        let b = a + width;
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        coarse += whole;
        *panel = (a, b, fa, fm, fb, whole);
    }
    let abs_tol = rel_tol * libm::fabs(coarse).max(f64::MIN_POSITIVE);
    panels
        .iter()
        .map(|&(a, b, fa, fm, fb, whole)| {
            simpson_step(&f, a, b, fa, fm, fb, whole, abs_tol / PANELS as f64, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Binary entropy in bits; `h2(0) = h2(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain("p", p, "0 <= p <= 1"));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-(p * libm::log2(p) + (1.0 - p) * libm::log2(1.0 - p)))
}

/// Which zero-error capacity the non-zero-error correction is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseCapacity {
    Gaussian,
    BiAwgn,
}

impl BaseCapacity {
    pub fn eval(self, s: f64) -> Result<f64> {
        match self {
            BaseCapacity::Gaussian => gaussian_capacity(s),
            BaseCapacity::BiAwgn => biawgn_capacity(s),
        }
    }
}

/// Largest rate achievable when a residual bit error rate `p_b` is
/// tolerated: `C(s) / (1 - h2(p_b))` (rate-distortion for a binary source
/// under Hamming distortion).
pub fn nonzero_error_capacity(s: f64, p_b: f64, base: BaseCapacity) -> Result<f64> {
    if !(0.0..0.5).contains(&p_b) {
        return Err(domain("p_b", p_b, "0 <= p_b < 0.5"));
    }
    Ok(base.eval(s)? / (1.0 - binary_entropy(p_b)?))
}

/// Reconciliation efficiency of a rate-`rate` code operated at SNR `s`,
/// `R / (1/2 log2(1 + s))`. Values above one are not an error.
pub fn beta_fec(rate: f64, s: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(domain("R", rate, "0 < R <= 1"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain("s", s, "s > 0"));
    }
    Ok(rate / gaussian_capacity(s)?)
}

/// A code rate at an SNR together with its efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyPoint {
    rate: f64,
    s: f64,
    beta_fec: f64,
}

impl EfficiencyPoint {
    pub fn new(rate: f64, s: f64) -> Result<Self> {
        Ok(EfficiencyPoint {
            rate,
            s,
            beta_fec: beta_fec(rate, s)?,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn snr(&self) -> f64 {
        self.s
    }

    pub fn beta_fec(&self) -> f64 {
        self.beta_fec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_anchor_values() {
        assert_eq!(gaussian_capacity(0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(gaussian_capacity(0.02865).unwrap(), 0.02038, epsilon = 5e-6);
        assert_abs_diff_eq!(gaussian_capacity(0.0258).unwrap(), 0.018374, epsilon = 1e-6);
        assert!(gaussian_capacity(-0.1).is_err());
    }

    #[test]
    fn biawgn_limits() {
        assert_eq!(biawgn_capacity(0.0).unwrap(), 0.0);
        assert!((biawgn_capacity(100.0).unwrap() - 1.0).abs() < 1e-3);
        assert!(biawgn_capacity(-1.0).is_err());
    }

    #[test]
    fn biawgn_below_gaussian_and_increasing() {
        let mut prev = 0.0;
        for i in 1..=200 {
            let s = 0.001 * libm::pow(1.06, i as f64);
            let c = biawgn_capacity(s).unwrap();
            assert!(c <= gaussian_capacity(s).unwrap() + 1e-12, "s = {s}");
            // strict until the capacity saturates at 1 in double precision
            assert!(c > prev || (c == prev && c > 1.0 - 1e-12), "s = {s}");
            prev = c;
        }
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_abs_diff_eq!(binary_entropy(0.1).unwrap(), 0.468996, epsilon = 1e-6);
        assert!(binary_entropy(1.2).is_err());
    }

    #[test]
    fn nonzero_error_correction() {
        let s = 0.3;
        let base = gaussian_capacity(s).unwrap();
        assert_eq!(nonzero_error_capacity(s, 0.0, BaseCapacity::Gaussian).unwrap(), base);
        // Pick s so that the Gaussian capacity is exactly 0.02.
        let s02 = libm::pow(2.0, 0.04) - 1.0;
        assert_abs_diff_eq!(
            nonzero_error_capacity(s02, 0.1, BaseCapacity::Gaussian).unwrap(),
            0.037665,
            epsilon = 1e-5
        );
        let mut prev = base;
        for i in 1..50 {
            let p = 0.01 * i as f64;
            let c = nonzero_error_capacity(s, p, BaseCapacity::BiAwgn).unwrap();
            if i > 1 {
                assert!(c > prev);
            }
            prev = c;
        }
        assert!(nonzero_error_capacity(s, 0.4999999, BaseCapacity::Gaussian).unwrap() > 1e6);
        assert!(nonzero_error_capacity(s, 0.5, BaseCapacity::Gaussian).is_err());
    }

    #[test]
    fn efficiency_anchor_values() {
        assert_abs_diff_eq!(beta_fec(0.02, 0.02865).unwrap(), 0.981, epsilon = 1e-3);
        assert_abs_diff_eq!(beta_fec(0.02, 0.029).unwrap(), 0.97, epsilon = 1e-3);
        assert_abs_diff_eq!(beta_fec(0.02, 0.0258).unwrap(), 1.09, epsilon = 5e-3);
        assert!(beta_fec(0.02, 0.0).is_err());
        assert!(beta_fec(0.0, 0.1).is_err());
        assert!(beta_fec(0.02, 0.02865).unwrap() <= 1.0);
    }

    #[test]
    fn efficiency_monotonicity() {
        for i in 1..40 {
            let s = 0.01 * i as f64;
            assert!(beta_fec(0.1, s + 0.01).unwrap() < beta_fec(0.1, s).unwrap());
            assert!(beta_fec(0.1, s).unwrap() < beta_fec(0.2, s).unwrap());
        }
        let p = EfficiencyPoint::new(0.02, 0.029).unwrap();
        assert_eq!(p.beta_fec(), 0.02 / gaussian_capacity(0.029).unwrap());
    }
}
