//! Secret-key-rate models and the operating-point optimizer.
//!
//! All rates are in bits per channel symbol. A negative raw rate means no
//! key can be distilled; it is kept alongside the value clamped at zero.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::perf::PerformancePoint;
use crate::protocol::{
    holevo_bound_eve, mutual_information_ab, snr, va_for_snr, Channel, ProtocolParams, VA_MAX, VA_MIN,
};

/// Fiber attenuation used when none is given.
pub const DEFAULT_LOSS_DB_PER_KM: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KeyRateModel {
    /// `beta I_AB - I_E`, decoding failures ignored.
    Ideal,
    /// `(beta I_AB - I_E)(1 - p_fail)`: failed blocks are discarded.
    Standard,
    /// `(R - I_E)(1 - p_fail)`, the same as `Standard` written with the code
    /// rate `R = beta I_AB`.
    StandardShort,
    /// `(1 - p_fail) beta I_AB - I_E`: Eve is credited with information on
    /// every block, including the discarded ones.
    PostSelect,
}

impl KeyRateModel {
    pub const ALL: [KeyRateModel; 4] = [
        KeyRateModel::Ideal,
        KeyRateModel::Standard,
        KeyRateModel::StandardShort,
        KeyRateModel::PostSelect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KeyRateModel::Ideal => "ideal",
            KeyRateModel::Standard => "standard",
            KeyRateModel::StandardShort => "standard_short",
            KeyRateModel::PostSelect => "post_select",
        }
    }
}

impl fmt::Display for KeyRateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KeyRateModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('-', "_");
        KeyRateModel::ALL
            .into_iter()
            .find(|m| m.name() == normalized || (normalized == "postselect" && *m == KeyRateModel::PostSelect))
            .ok_or(Error::Distribution(alloc::format!("unknown key-rate model {s:?}")))
    }
}

/// Key rate under `model`.
pub fn keyrate(model: KeyRateModel, beta: f64, i_ab: f64, i_e: f64, p_fail: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain("beta", beta, "beta > 0"));
    }
    if !(i_ab >= 0.0 && i_ab.is_finite()) {
        return Err(domain("i_ab", i_ab, "i_ab >= 0"));
    }
    if !(i_e >= 0.0 && i_e.is_finite()) {
        return Err(domain("i_e", i_e, "i_e >= 0"));
    }
    if !(0.0..=1.0).contains(&p_fail) {
        return Err(domain("p_fail", p_fail, "0 <= p_fail <= 1"));
    }
    let success = 1.0 - p_fail;
    Ok(match model {
        KeyRateModel::Ideal => beta * i_ab - i_e,
        KeyRateModel::Standard => (beta * i_ab - i_e) * success,
        KeyRateModel::StandardShort => {
            let rate = beta * i_ab;
            (rate - i_e) * success
        }
        KeyRateModel::PostSelect => success * beta * i_ab - i_e,
    })
}

/// Fiber transmission `10^(-loss d / 10)`.
pub fn distance_to_transmission(d_km: f64, loss_db_per_km: f64) -> Result<f64> {
    if !(d_km >= 0.0 && d_km.is_finite()) {
        return Err(domain("distance", d_km, "d >= 0"));
    }
    if !(loss_db_per_km > 0.0 && loss_db_per_km.is_finite()) {
        return Err(domain("loss", loss_db_per_km, "loss > 0"));
    }
    Ok(libm::pow(10.0, -loss_db_per_km * d_km / 10.0))
}

/// A key rate together with everything that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    pub raw: f64,
    pub clamped: f64,
    pub model: KeyRateModel,
    pub operating_point: PerformancePoint,
    /// Channel with the modulation variance that realizes the point's SNR.
    pub params: ProtocolParams,
    pub i_ab: f64,
    pub i_e: f64,
    pub distance_km: Option<f64>,
}

impl KeyRateResult {
    pub fn v_a(&self) -> f64 {
        self.params.v_a()
    }
}

/// Key rate of one code operating point on `channel`, or `None` when the
/// modulation variance needed for its SNR lies outside `[1, 100]`.
pub fn evaluate_point(
    channel: &Channel,
    point: &PerformancePoint,
    model: KeyRateModel,
) -> Result<Option<KeyRateResult>> {
    let va = va_for_snr(channel, point.snr)?;
    if !va.in_range {
        return Ok(None);
    }
    let params = channel.with_modulation(va.v_a)?;
    let i_ab = mutual_information_ab(&params);
    let i_e = holevo_bound_eve(&params)?;
    let raw = keyrate(model, point.beta_fec, i_ab, i_e, point.wer)?;
    Ok(Some(KeyRateResult {
        raw,
        clamped: raw.max(0.0),
        model,
        operating_point: *point,
        params,
        i_ab,
        i_e,
        distance_km: None,
    }))
}

/// Best point of `table` on `channel` under `model`.
///
/// Points with `wer > wer_cap` and points whose modulation variance falls
/// outside `[1, 100]` are skipped. The maximum is taken over raw rates;
/// exact ties go to the lower WER, then the lower SNR, then the earlier
/// table entry.
pub fn optimize_point(
    channel: &Channel,
    table: &[PerformancePoint],
    model: KeyRateModel,
    wer_cap: Option<f64>,
) -> Result<KeyRateResult> {
    if table.is_empty() {
        return Err(Error::Empty("performance table"));
    }
    if let Some(cap) = wer_cap {
        if !(0.0..=1.0).contains(&cap) {
            return Err(domain("wer_cap", cap, "0 <= wer_cap <= 1"));
        }
    }
    let mut best: Option<KeyRateResult> = None;
    for point in table {
        if wer_cap.is_some_and(|cap| point.wer > cap) {
            continue;
        }
        let Some(candidate) = evaluate_point(channel, point, model)? else {
            continue;
        };
        let better = match &best {
            None => true,
            Some(b) => {
                let (c, o) = (&candidate.operating_point, &b.operating_point);
                candidate.raw > b.raw
                    || (candidate.raw == b.raw && (c.wer < o.wer || (c.wer == o.wer && c.snr < o.snr)))
            }
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or(Error::NoFeasiblePoint)
}

/// [`optimize_point`] at every distance of `d_grid`. Entries are `None`
/// where no point of the table is feasible.
pub fn distance_sweep(
    template: &Channel,
    table: &[PerformancePoint],
    model: KeyRateModel,
    d_grid: &[f64],
    loss_db_per_km: f64,
    wer_cap: Option<f64>,
) -> Result<Vec<Option<KeyRateResult>>> {
    d_grid
        .iter()
        .map(|&d| {
            let channel = template.with_transmission(distance_to_transmission(d, loss_db_per_km)?)?;
            match optimize_point(&channel, table, model, wer_cap) {
                Ok(mut r) => {
                    r.distance_km = Some(d);
                    Ok(Some(r))
                }
                Err(Error::NoFeasiblePoint) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Tolerance on `V_A` of the ideal-code maximization.
pub const IDEAL_VA_TOL: f64 = 1e-6;

/// Key rate of a capacity-achieving, error-free code (`beta = 1`,
/// `WER = 0`) at the best `V_A` in `[1, 100]`.
///
/// A 200-point logarithmic scan brackets the maximum, then a
/// golden-section search refines it to [`IDEAL_VA_TOL`].
pub fn ideal_optimum(channel: &Channel) -> Result<KeyRateResult> {
    let objective = |v_a: f64| -> Result<f64> {
        let p = channel.with_modulation(v_a)?;
        Ok(mutual_information_ab(&p) - holevo_bound_eve(&p)?)
    };
    const SCAN: usize = 200;
    let ratio = libm::log(VA_MAX / VA_MIN) / (SCAN - 1) as f64;
    let grid = |i: usize| (VA_MIN * libm::exp(ratio * i as f64)).clamp(VA_MIN, VA_MAX);
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..SCAN {
        let value = objective(grid(i))?;
        if value > best {
            best = value;
            best_i = i;
        }
    }
    let mut lo = grid(best_i.saturating_sub(1));
    let mut hi = grid((best_i + 1).min(SCAN - 1));
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while hi - lo > IDEAL_VA_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1)?;
        }
    }
    let mut v_a = 0.5 * (lo + hi);
    if objective(v_a)? < best {
        v_a = grid(best_i);
    }
    let params = channel.with_modulation(v_a)?;
    let i_ab = mutual_information_ab(&params);
    let i_e = holevo_bound_eve(&params)?;
    let raw = keyrate(KeyRateModel::Ideal, 1.0, i_ab, i_e, 0.0)?;
    let s = snr(&params);
    Ok(KeyRateResult {
        raw,
        clamped: raw.max(0.0),
        model: KeyRateModel::Ideal,
        operating_point: PerformancePoint {
            rate: i_ab,
            snr: s,
            wer: 0.0,
            ber: Some(0.0),
            undetected_wer: Some(0.0),
            beta_fec: 1.0,
            trials: 0,
            seed: 0,
        },
        params,
        i_ab,
        i_e,
        distance_km: None,
    })
}

/// [`ideal_optimum`] over a distance grid.
pub fn ideal_reference_curve(template: &Channel, d_grid: &[f64], loss_db_per_km: f64) -> Result<Vec<KeyRateResult>> {
    d_grid
        .iter()
        .map(|&d| {
            let channel = template.with_transmission(distance_to_transmission(d, loss_db_per_km)?)?;
            let mut r = ideal_optimum(&channel)?;
            r.distance_km = Some(d);
            Ok(r)
        })
        .collect()
}

/// Largest distance with a strictly positive clamped key rate.
pub fn max_range<'a, I>(results: I) -> Option<f64>
where
    I: IntoIterator<Item = &'a Option<KeyRateResult>>,
{
    results
        .into_iter()
        .flatten()
        .filter(|r| r.clamped > 0.0)
        .filter_map(|r| r.distance_km)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
}
