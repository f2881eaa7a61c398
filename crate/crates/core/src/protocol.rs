//! Information quantities of the Gaussian-modulated coherent-state protocol
//! with homodyne detection and reverse reconciliation, under collective
//! attacks and in the asymptotic key-length limit.
//!
//! All variances are in shot-noise units (vacuum quadrature variance = 1).
//! The detector is trusted: its inefficiency and electronic noise are
//! attributed to Bob, not to Eve.

use crate::error::{domain, Error, Result};

/// Tolerance on the physicality check `lambda >= 1`.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Admissible modulation-variance window used when a code's SNR is mapped
/// back onto a channel.
pub const VA_MIN: f64 = 1.0;
pub const VA_MAX: f64 = 100.0;

/// Quantum channel plus detector, everything except Alice's modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Channel {
    transmission: f64,
    excess_noise: f64,
    efficiency: f64,
    electronic_noise: f64,
}

impl Channel {
    /// `transmission` in (0, 1], `excess_noise` >= 0 (relative to the
    /// channel input), homodyne `efficiency` in (0, 1] and detector
    /// `electronic_noise` >= 0.
    pub fn new(
        transmission: f64,
        excess_noise: f64,
        efficiency: f64,
        electronic_noise: f64,
    ) -> Result<Self> {
        if !(transmission > 0.0 && transmission <= 1.0) {
            return Err(domain("T", transmission, "0 < T <= 1"));
        }
        if !(excess_noise >= 0.0 && excess_noise.is_finite()) {
            return Err(domain("epsilon", excess_noise, "epsilon >= 0"));
        }
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(domain("eta", efficiency, "0 < eta <= 1"));
        }
        if !(electronic_noise >= 0.0 && electronic_noise.is_finite()) {
            return Err(domain("nu_el", electronic_noise, "nu_el >= 0"));
        }
        Ok(Channel {
            transmission,
            excess_noise,
            efficiency,
            electronic_noise,
        })
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }

    pub fn excess_noise(&self) -> f64 {
        self.excess_noise
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn electronic_noise(&self) -> f64 {
        self.electronic_noise
    }

    /// Same detector and excess noise, different transmission.
    pub fn with_transmission(&self, transmission: f64) -> Result<Self> {
        Channel::new(
            transmission,
            self.excess_noise,
            self.efficiency,
            self.electronic_noise,
        )
    }

    /// Channel-added noise referred to the input: `1/T - 1 + epsilon`.
    pub fn chi_line(&self) -> f64 {
        1.0 / self.transmission - 1.0 + self.excess_noise
    }

    /// Detection-added noise: `(1 - eta + nu_el) / eta`.
    pub fn chi_hom(&self) -> f64 {
        (1.0 - self.efficiency + self.electronic_noise) / self.efficiency
    }

    /// Total input-referred noise: `chi_line + chi_hom / T`.
    pub fn chi_tot(&self) -> f64 {
        self.chi_line() + self.chi_hom() / self.transmission
    }

    pub fn with_modulation(&self, v_a: f64) -> Result<ProtocolParams> {
        ProtocolParams::new(v_a, *self)
    }
}

/// The line part of a channel: transmission and excess noise, without a
/// detector model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub transmission: f64,
    pub excess_noise: f64,
}

impl Line {
    pub fn with_detector(&self, efficiency: f64, electronic_noise: f64) -> Result<Channel> {
        Channel::new(
            self.transmission,
            self.excess_noise,
            efficiency,
            electronic_noise,
        )
    }
}

/// A unity-gain classical teleporter: `T = 1`, `epsilon = 2`. No secret key
/// can exist through it, whatever the detector.
pub fn entanglement_breaking_preset() -> Line {
    Line {
        transmission: 1.0,
        excess_noise: 2.0,
    }
}

/// Full protocol description: modulation variance `v_a` and channel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolParams {
    v_a: f64,
    channel: Channel,
}

impl ProtocolParams {
    /// `v_a = 0` (no modulation) is accepted as a degenerate limit.
    pub fn new(v_a: f64, channel: Channel) -> Result<Self> {
        if !(v_a >= 0.0 && v_a.is_finite()) {
            return Err(domain("V_A", v_a, "V_A >= 0"));
        }
        Ok(ProtocolParams { v_a, channel })
    }

    pub fn v_a(&self) -> f64 {
        self.v_a
    }

    /// Alice's total state variance `V = V_A + 1`.
    pub fn v(&self) -> f64 {
        self.v_a + 1.0
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }
}

/// Symplectic eigenvalues of Eve's purification and the intermediates
/// `A, B, C, D` they come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticSpectrum {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub a_val: f64,
    pub b_val: f64,
    pub c_val: f64,
    pub d_val: f64,
}

impl SymplecticSpectrum {
    pub fn compute(p: &ProtocolParams) -> Result<Self> {
        let ch = p.channel();
        let v = p.v();
        let t = ch.transmission();
        let chi_line = ch.chi_line();
        let chi_hom = ch.chi_hom();
        let chi_tot = ch.chi_tot();

        let a_val = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line) * (v + chi_line);
        let b_val = {
            let x = t * (v * chi_line + 1.0);
            x * x
        };
        let sqrt_b = libm::sqrt(b_val);
        // Conditional spectrum given Bob's homodyne outcome; the trusted
        // detector noise enters through chi_tot in the denominator.
        let denom = t * (v + chi_tot);
        let c_val = (a_val * chi_hom + v * sqrt_b + t * (v + chi_line)) / denom;
        let d_val = sqrt_b * (v + sqrt_b * chi_hom) / denom;

        let (l1sq, l2sq) = quadratic_roots(a_val, b_val, "A^2 - 4B")?;
        let (l3sq, l4sq) = quadratic_roots(c_val, d_val, "C^2 - 4D")?;

        let spectrum = SymplecticSpectrum {
            lambda1: libm::sqrt(l1sq),
            lambda2: libm::sqrt(l2sq),
            lambda3: libm::sqrt(l3sq),
            lambda4: libm::sqrt(l4sq),
            a_val,
            b_val,
            c_val,
            d_val,
        };
        for (which, value) in [
            ("lambda1", spectrum.lambda1),
            ("lambda2", spectrum.lambda2),
            ("lambda3", spectrum.lambda3),
            ("lambda4", spectrum.lambda4),
        ] {
            if !(value >= 1.0 - PHYSICAL_TOL) {
                return Err(Error::NonPhysical { which, value });
            }
        }
        Ok(spectrum)
    }

    pub fn lambdas(&self) -> [f64; 4] {
        [self.lambda1, self.lambda2, self.lambda3, self.lambda4]
    }
}

/// Roots `x^2 - s x + p = 0` as `(large, small)`. The small root is taken
/// as `p / large` to avoid cancellation when `s^2 >> 4p`.
fn quadratic_roots(sum: f64, product: f64, which: &'static str) -> Result<(f64, f64)> {
    let mut disc = sum * sum - 4.0 * product;
    if disc < 0.0 {
        if disc >= -PHYSICAL_TOL * sum * sum {
            disc = 0.0;
        } else {
            return Err(Error::NonPhysical { which, value: disc });
        }
    }
    let large = 0.5 * (sum + libm::sqrt(disc));
    if !(large > 0.0) {
        return Err(Error::NonPhysical {
            which,
            value: large,
        });
    }
    Ok((large, product / large))
}

/// `G(x) = (x+1) log2(x+1) - x log2 x`, the entropy of a thermal state with
/// mean photon number `x`. `G(0) = 0`.
pub fn thermal_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((x + 1.0) * libm::log1p(x) - x * libm::log(x)) / core::f64::consts::LN_2
}

/// `I_AB = 1/2 log2((V + chi_tot) / (chi_tot + 1))`, bits per symbol.
pub fn mutual_information_ab(p: &ProtocolParams) -> f64 {
    let chi_tot = p.channel().chi_tot();
    0.5 * libm::log2((p.v() + chi_tot) / (chi_tot + 1.0))
}

/// Effective SNR `s = V_A / (1 + chi_tot)`, so that `I_AB = 1/2 log2(1 + s)`.
pub fn snr(p: &ProtocolParams) -> f64 {
    p.v_a() / (1.0 + p.channel().chi_tot())
}

/// Modulation variance reaching a target SNR on a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VaSolution {
    pub v_a: f64,
    /// Whether `v_a` lies in `[VA_MIN, VA_MAX]`.
    pub in_range: bool,
}

/// Inverts [`snr`]: `V_A = s (1 + chi_tot)`. Values outside `[1, 100]` are
/// returned with `in_range = false`, never clamped.
pub fn va_for_snr(channel: &Channel, s_target: f64) -> Result<VaSolution> {
    if !(s_target > 0.0 && s_target.is_finite()) {
        return Err(domain("s", s_target, "s > 0"));
    }
    let v_a = s_target * (1.0 + channel.chi_tot());
    Ok(VaSolution {
        v_a,
        in_range: (VA_MIN..=VA_MAX).contains(&v_a),
    })
}

/// Holevo bound on Eve's information about Bob's measurement,
/// `G[(l1-1)/2] + G[(l2-1)/2] - G[(l3-1)/2] - G[(l4-1)/2]`.
pub fn holevo_bound_eve(p: &ProtocolParams) -> Result<f64> {
    let sp = SymplecticSpectrum::compute(p)?;
    let g = |l: f64| thermal_entropy((l - 1.0) / 2.0);
    let chi = g(sp.lambda1) + g(sp.lambda2) - g(sp.lambda3) - g(sp.lambda4);
    // Cancellation between the two pairs leaves round-off of either sign.
    Ok(if chi < 0.0 && chi > -PHYSICAL_TOL {
        0.0
    } else {
        chi
    })
}

/// Smallest efficiency giving a positive key, `I_E / I_AB`.
pub fn required_beta(p: &ProtocolParams) -> Result<f64> {
    let i_ab = mutual_information_ab(p);
    if !(i_ab > 0.0) {
        return Err(Error::ZeroMutualInformation);
    }
    Ok(holevo_bound_eve(p)? / i_ab)
}
