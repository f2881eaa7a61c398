use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

/// Output-degree distribution of an LT code.
#[derive(Debug, Clone, PartialEq)]
pub struct LtDistribution {
    terms: Vec<(u32, f64)>,
    cumulative: Vec<f64>,
}

impl LtDistribution {
    /// `terms` are `(degree, probability)` with strictly increasing degrees
    /// and probabilities summing to one (to 1e-9).
    pub fn new(terms: Vec<(u32, f64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Empty("LT distribution"));
        }
        let mut prev = 0;
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(terms.len());
        for &(d, p) in &terms {
            if d <= prev {
                return Err(Error::Distribution(format!(
                    "LT degrees must be strictly increasing and >= 1 (found {d} after {prev})"
                )));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Distribution(format!("LT probability {p} for degree {d}")));
            }
            prev = d;
            total += p;
            cumulative.push(total);
        }
        if libm::fabs(total - 1.0) > 1e-9 {
            return Err(Error::Distribution(format!("LT probabilities sum to {total}")));
        }
        Ok(LtDistribution { terms, cumulative })
    }

    /// Low-SNR distribution with maximum degree 300.
    pub fn omega_300() -> Self {
        Self::new(
            [
                (1, 0.0035),
                (2, 0.3538),
                (3, 0.2337),
                (4, 0.0737),
                (5, 0.0755),
                (6, 0.0262),
                (7, 0.0608),
                (11, 0.0493),
                (12, 0.0255),
                (21, 0.0002),
                (23, 0.0454),
                (57, 0.0072),
                (58, 0.0180),
                (300, 0.0272),
            ]
            .to_vec(),
        )
        .expect("built-in distribution is valid")
    }

    /// Distribution with maximum degree 200.
    pub fn omega_200() -> Self {
        Self::new(
            [
                (1, 0.0146),
                (2, 0.3766),
                (3, 0.0677),
                (4, 0.2946),
                (9, 0.1291),
                (12, 0.0060),
                (24, 0.0341),
                (29, 0.0228),
                (43, 0.0073),
                (200, 0.0472),
            ]
            .to_vec(),
        )
        .expect("built-in distribution is valid")
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.0)
    }

    pub fn mean_degree(&self) -> f64 {
        self.terms.iter().map(|&(d, p)| d as f64 * p).sum()
    }

    /// Draws one degree by inverting the cumulative distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.terms[i.min(self.terms.len() - 1)].0
    }
}
