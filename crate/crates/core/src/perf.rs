use crate::capacity::beta_fec;
use crate::error::{domain, Result};

/// One measured or tabulated code operating point: rate, SNR, error rates
/// and efficiency. This is the unit the key-rate optimizer works over.
///
/// `ber` and `undetected_wer` are `None` for points taken from a table
/// that does not report them.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerformancePoint {
    pub rate: f64,
    pub snr: f64,
    pub wer: f64,
    pub ber: Option<f64>,
    pub undetected_wer: Option<f64>,
    pub beta_fec: f64,
    pub trials: u64,
    pub seed: u64,
}

impl PerformancePoint {
    /// A tabulated point with no simulation behind it; `beta_fec` is
    /// recomputed from `(rate, snr)`.
    pub fn tabulated(rate: f64, snr: f64, wer: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&wer) {
            return Err(domain("wer", wer, "0 <= wer <= 1"));
        }
        Ok(PerformancePoint {
            rate,
            snr,
            wer,
            ber: None,
            undetected_wer: None,
            beta_fec: beta_fec(rate, snr)?,
            trials: 0,
            seed: 0,
        })
    }

    /// Checks the accounting invariants: error rates in `[0, 1]`,
    /// `ber <= wer`, `undetected_wer <= wer`, and `beta_fec` matching
    /// `(rate, snr)` to 1e-9 relative.
    pub fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(domain(name, v, "0 <= value <= 1"))
            }
        };
        unit("wer", self.wer)?;
        if let Some(ber) = self.ber {
            unit("ber", ber)?;
            if ber > self.wer {
                return Err(domain("ber", ber, "ber <= wer"));
            }
        }
        if let Some(u) = self.undetected_wer {
            unit("undetected_wer", u)?;
            if u > self.wer {
                return Err(domain("undetected_wer", u, "undetected_wer <= wer"));
            }
        }
        let expected = beta_fec(self.rate, self.snr)?;
        if libm::fabs(self.beta_fec - expected) > 1e-9 * expected {
            return Err(domain("beta_fec", self.beta_fec, "rate / gaussian_capacity(snr)"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_points_validate() {
        let p = PerformancePoint::tabulated(0.02, 0.029, 1.0 / 3.0).unwrap();
        assert!((p.beta_fec - 0.97).abs() < 1e-3);
        p.validate().unwrap();
        assert!(PerformancePoint::tabulated(0.02, 0.029, 1.5).is_err());
        let bad = PerformancePoint {
            ber: Some(0.5),
            ..p
        };
        assert!(bad.validate().is_err());
        let bad = PerformancePoint {
            beta_fec: 0.5,
            ..p
        };
        assert!(bad.validate().is_err());
    }
}
