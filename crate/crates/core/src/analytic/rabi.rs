//! Quantum Rabi model in the dispersive (Ω ≫ ω) regime, reduced to a single
//! squeezed oscillator, and the signal-to-noise ratios of the measurement
//! strategies built on it.
//!
//! Sign convention: `xi = ¼ ln(1 - g²/g_c²) ≤ 0` and a real squeezing
//! parameter `xi_r ≤ 0` both denote noise reduction. Derivatives are taken
//! with respect to ω at fixed Ω and g, so `∂ω (g²/g_c²) = -(g²/g_c²)/ω`.
//! Everything except the overall 1/ω scale depends on `x = g²/g_c²` alone.

use serde::Serialize;

use super::dicke::THRESHOLD_GUARD;
use crate::error::{Error, Result};

/// Below this `Ω/ω` the effective squeezing Hamiltonian is flagged as
/// unreliable.
pub const DISPERSIVE_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiParams {
    /// Oscillator frequency ω.
    pub omega: f64,
    /// Two-level splitting Ω.
    pub omega_qubit: f64,
    /// Coupling g.
    pub g: f64,
}

impl RabiParams {
    pub fn new(omega: f64, omega_qubit: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite() && omega_qubit > 0.0 && omega_qubit.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frequencies must be > 0 (omega = {omega}, Omega = {omega_qubit})"
            )));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g must be >= 0, got {g}")));
        }
        Ok(Self {
            omega,
            omega_qubit,
            g,
        })
    }

    /// Parameters at a given `g/g_c` for fixed ω and Ω.
    pub fn at_ratio(omega: f64, omega_qubit: f64, ratio: f64) -> Result<Self> {
        Self::new(omega, omega_qubit, ratio * (omega * omega_qubit).sqrt())
    }

    pub fn critical_coupling(&self) -> f64 {
        (self.omega * self.omega_qubit).sqrt()
    }

    pub fn coupling_ratio(&self) -> f64 {
        self.g / self.critical_coupling()
    }

    /// `x = g²/g_c²`, validated against the threshold guard band.
    pub fn coupling_sq(&self) -> Result<f64> {
        let ratio = self.coupling_ratio();
        if ratio > THRESHOLD_GUARD {
            return Err(Error::BeyondThreshold { ratio });
        }
        Ok(self.g * self.g / (self.omega * self.omega_qubit))
    }

    pub fn is_dispersive(&self) -> bool {
        self.omega_qubit / self.omega >= DISPERSIVE_RATIO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiEffective {
    /// Virtual squeezing parameter, ≤ 0.
    pub xi: f64,
    /// `sinh² xi`.
    pub n_virtual: f64,
    /// Near-threshold asymptote `¼ / sqrt(1 - g²/g_c²)`.
    pub n_virtual_asymptotic: f64,
    /// `ω sqrt(1 - g²/g_c²)`.
    pub omega_eff: f64,
    /// Whether `Ω/ω ≥ 100`.
    pub dispersive: bool,
}

pub fn rabi_effective(p: &RabiParams) -> Result<RabiEffective> {
    let x = p.coupling_sq()?;
    let s = (1.0 - x).sqrt();
    let xi = 0.25 * (-x).ln_1p();
    let dispersive = p.is_dispersive();
    if !dispersive {
        log::warn!(
            "Omega/omega = {} is below {DISPERSIVE_RATIO}; effective model is approximate",
            p.omega_qubit / p.omega
        );
    }
    Ok(RabiEffective {
        xi,
        n_virtual: xi.sinh().powi(2),
        n_virtual_asymptotic: 0.25 / s,
        omega_eff: p.omega * s,
        dispersive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StrategyId {
    ExtractStatic,
    ExtractEvolved,
    DisplacedExtract,
    NormalMode,
    Synergy,
}

/// Signal-to-noise ratio of one strategy as a function of time.
///
/// For the time-quadratic strategies `envelope` is the coefficient of `t²`
/// obtained by setting the oscillating `sin²` factor to one, so
/// `snr(t) ≤ envelope · t²`. For `ExtractStatic` the SNR is time independent
/// and `envelope` is the SNR itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyResult {
    pub strategy: StrategyId,
    pub envelope: f64,
    /// Near-threshold form of the envelope.
    pub asymptotic_envelope: f64,
    #[serde(skip)]
    params: RabiParams,
    #[serde(skip)]
    alpha_mag: f64,
    #[serde(skip)]
    xi_r: f64,
}

impl StrategyResult {
    pub fn params(&self) -> &RabiParams {
        &self.params
    }

    /// `S(t)`; never negative.
    pub fn snr(&self, t: f64) -> f64 {
        let p = &self.params;
        // validated at construction
        let x = p.g * p.g / (p.omega * p.omega_qubit);
        let a2 = self.alpha_mag * self.alpha_mag;
        match self.strategy {
            StrategyId::ExtractStatic => self.envelope,
            StrategyId::ExtractEvolved => extract_evolved_unchecked(p, t),
            StrategyId::DisplacedExtract => {
                let wt = p.omega * t;
                8.0 * a2 * t * t * (1.0 - x).sqrt() * wt.sin().powi(2)
                    / (x * (2.0 * wt).cos() - x + 2.0)
            }
            StrategyId::NormalMode => {
                let phase = p.omega * (1.0 - x).sqrt() * t;
                a2 * t * t * phase.sin().powi(2) / (1.0 - x) * (2.0 - x).powi(2)
            }
            StrategyId::Synergy => {
                let phase = p.omega * (1.0 - x).sqrt() * t;
                a2 * t * t * phase.sin().powi(2) / (1.0 - x)
                    * (2.0 - x).powi(2)
                    * (-2.0 * self.xi_r).exp()
            }
        }
    }
}

fn check_alpha(alpha_mag: f64) -> Result<()> {
    if !(alpha_mag >= 0.0 && alpha_mag.is_finite()) {
        return Err(Error::InvalidParameter(format!("|alpha| must be >= 0, got {alpha_mag}")));
    }
    Ok(())
}

/// `x² / (8 ω² (1 - x)²)`: shared by the static-extraction SNR, the
/// ground-state QFI and the homodyne SNR on the squeezed vacuum.
fn squeezed_vacuum_information(p: &RabiParams) -> Result<f64> {
    let x = p.coupling_sq()?;
    Ok(1.0 / (8.0 * p.omega * p.omega * (1.0 - x).powi(2)) * (x * x))
}

/// Extract the squeezed vacuum and read out `⟨X²⟩` immediately.
pub fn strategy_extract_static(p: &RabiParams) -> Result<StrategyResult> {
    let s = squeezed_vacuum_information(p)?;
    Ok(StrategyResult {
        strategy: StrategyId::ExtractStatic,
        envelope: s,
        asymptotic_envelope: s,
        params: *p,
        alpha_mag: 0.0,
        xi_r: 0.0,
    })
}

fn extract_evolved_unchecked(p: &RabiParams, t: f64) -> f64 {
    let (w, wq) = (p.omega, p.omega_qubit);
    let g2 = p.g * p.g;
    let two_wt = 2.0 * w * t;
    let first = 4.0 * (g2 * t * two_wt.sin() - wq) / (g2 * two_wt.cos() - g2 + 2.0 * w * wq);
    let second = (g2 - 2.0 * w * wq) / (g2 * w - w * w * wq);
    (first + second).powi(2) / 8.0
}

/// Extract the squeezed vacuum, let it evolve freely for `t`, read out `⟨X²⟩`.
pub fn strategy_extract_evolved(p: &RabiParams, t: f64) -> Result<f64> {
    p.coupling_sq()?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    Ok(extract_evolved_unchecked(p, t))
}

/// The evolved-extraction strategy wrapped as a [`StrategyResult`]; its
/// envelope is not quadratic in time and is reported as NaN.
pub fn strategy_extract_evolved_result(p: &RabiParams) -> Result<StrategyResult> {
    p.coupling_sq()?;
    Ok(StrategyResult {
        strategy: StrategyId::ExtractEvolved,
        envelope: f64::NAN,
        asymptotic_envelope: f64::NAN,
        params: *p,
        alpha_mag: 0.0,
        xi_r: 0.0,
    })
}

/// Extract, displace by `α`, evolve and measure `⟨X⟩`.
pub fn strategy_displaced(p: &RabiParams, alpha_mag: f64) -> Result<StrategyResult> {
    check_alpha(alpha_mag)?;
    let x = p.coupling_sq()?;
    let env = 4.0 * alpha_mag * alpha_mag / (1.0 - x).sqrt();
    Ok(StrategyResult {
        strategy: StrategyId::DisplacedExtract,
        envelope: env,
        asymptotic_envelope: env,
        params: *p,
        alpha_mag,
        xi_r: 0.0,
    })
}

/// Coherent excitation of the renormalized mode, measured directly.
pub fn strategy_normal_mode(p: &RabiParams, alpha_mag: f64) -> Result<StrategyResult> {
    check_alpha(alpha_mag)?;
    let x = p.coupling_sq()?;
    let a2 = alpha_mag * alpha_mag;
    Ok(StrategyResult {
        strategy: StrategyId::NormalMode,
        envelope: a2 / (1.0 - x) * (2.0 - x).powi(2),
        asymptotic_envelope: a2 / (1.0 - x),
        params: *p,
        alpha_mag,
        xi_r: 0.0,
    })
}

/// Normal-mode readout with squeezed-light noise `¼ e^{2 xi_r}` on the
/// measured quadrature.
pub fn strategy_synergy(p: &RabiParams, alpha_mag: f64, xi_r: f64) -> Result<StrategyResult> {
    check_alpha(alpha_mag)?;
    if !(xi_r <= 0.0) {
        return Err(Error::InvalidParameter(format!("xi_r must be <= 0, got {xi_r}")));
    }
    let x = p.coupling_sq()?;
    let xi = 0.25 * (-x).ln_1p();
    let a2 = alpha_mag * alpha_mag;
    Ok(StrategyResult {
        strategy: StrategyId::Synergy,
        envelope: a2 / (1.0 - x) * (2.0 - x).powi(2) * (-2.0 * xi_r).exp(),
        asymptotic_envelope: a2 * (-4.0 * xi - 2.0 * xi_r).exp(),
        params: *p,
        alpha_mag,
        xi_r,
    })
}

/// QFI of the squeezed-vacuum ground state, `2 (∂ω xi)²`.
pub fn rabi_ground_qfi(p: &RabiParams) -> Result<f64> {
    squeezed_vacuum_information(p)
}

/// QFI of a coherent state of the renormalized mode after time `t`.
pub fn rabi_coherent_qfi(p: &RabiParams, alpha_mag: f64, t: f64) -> Result<f64> {
    check_alpha(alpha_mag)?;
    let x = p.coupling_sq()?;
    Ok(alpha_mag * alpha_mag * t * t * (x - 2.0).powi(2) / (1.0 - x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn at_sq(x: f64) -> RabiParams {
        RabiParams::at_ratio(1.0, 1e4, x.sqrt()).unwrap()
    }

    #[test]
    fn effective_examples() {
        let e = rabi_effective(&at_sq(0.0)).unwrap();
        assert_eq!((e.xi, e.n_virtual, e.omega_eff), (0.0, 0.0, 1.0));
        let e = rabi_effective(&at_sq(0.9801)).unwrap();
        assert_relative_eq!(e.xi, -0.979258886812923, max_relative = 1e-10);
        assert_relative_eq!(e.n_virtual, 1.307469852470004, max_relative = 1e-10);
        assert_relative_eq!(e.omega_eff, 0.141067359796659, max_relative = 1e-10);
        assert_relative_eq!(e.n_virtual_asymptotic, 1.772203012520840, max_relative = 1e-10);
        assert_relative_eq!(e.omega_eff, (2.0 * e.xi).exp(), max_relative = 1e-12);
        let e = rabi_effective(&at_sq(0.25)).unwrap();
        assert_relative_eq!(e.xi, -0.071920518112945, max_relative = 1e-10);
        assert_relative_eq!(e.n_virtual, 0.005181485540923, max_relative = 1e-10);
        assert_relative_eq!(e.omega_eff, 0.866025403784439, max_relative = 1e-12);
    }

    #[test]
    fn dispersive_flag() {
        assert!(rabi_effective(&RabiParams::at_ratio(1.0, 100.0, 0.5).unwrap()).unwrap().dispersive);
        assert!(!rabi_effective(&RabiParams::at_ratio(1.0, 10.0, 0.5).unwrap()).unwrap().dispersive);
    }

    #[test]
    fn threshold_is_rejected() {
        let p = RabiParams::at_ratio(1.0, 100.0, 1.0).unwrap();
        assert!(matches!(rabi_effective(&p), Err(Error::BeyondThreshold { .. })));
        assert!(strategy_normal_mode(&p, 1.0).is_err());
        assert!(rabi_coherent_qfi(&p, 1.0, 1.0).is_err());
    }

    #[test]
    fn static_examples() {
        assert_eq!(strategy_extract_static(&at_sq(0.0)).unwrap().envelope, 0.0);
        assert_relative_eq!(
            strategy_extract_static(&at_sq(0.81)).unwrap().envelope,
            2.271814404432133,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            strategy_extract_static(&at_sq(0.9801)).unwrap().envelope,
            303.210780662104492,
            max_relative = 1e-10
        );
        assert_relative_eq!(rabi_ground_qfi(&at_sq(0.5)).unwrap(), 0.125, max_relative = 1e-12);
    }

    #[test]
    fn evolved_reduces_to_static_at_zero_time() {
        for x in [0.1, 0.5, 0.81, 0.9801] {
            let p = at_sq(x);
            let s0 = strategy_extract_evolved(&p, 0.0).unwrap();
            let st = strategy_extract_static(&p).unwrap().envelope;
            assert_relative_eq!(s0, st, max_relative = 1e-9);
        }
    }

    #[test]
    fn evolved_vanishes_without_coupling() {
        for t in [0.0, 0.3, 1.0, 7.5] {
            assert!(strategy_extract_evolved(&at_sq(0.0), t).unwrap().abs() < 1e-28);
        }
    }

    #[test]
    fn displaced_envelopes() {
        assert_relative_eq!(strategy_displaced(&at_sq(0.0), 1.0).unwrap().envelope, 4.0);
        assert_relative_eq!(
            strategy_displaced(&at_sq(0.81), 1.0).unwrap().envelope,
            9.176629354822471,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            strategy_displaced(&at_sq(0.9801), 1.0).unwrap().envelope,
            28.355248200333436,
            max_relative = 1e-12
        );
    }

    #[test]
    fn normal_mode_envelopes() {
        assert_relative_eq!(strategy_normal_mode(&at_sq(0.0), 1.0).unwrap().envelope, 4.0);
        assert_relative_eq!(
            strategy_normal_mode(&at_sq(0.81), 1.0).unwrap().envelope,
            7.453157894736842,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            strategy_normal_mode(&at_sq(0.9801), 1.0).unwrap().envelope,
            52.271156281407035,
            max_relative = 1e-12
        );
    }

    #[test]
    fn synergy_envelopes() {
        let s = strategy_synergy(&at_sq(0.9801), 1.0, 0.0).unwrap();
        assert_relative_eq!(s.asymptotic_envelope, 50.251256281407035, max_relative = 1e-12);
        let nm = strategy_normal_mode(&at_sq(0.9801), 1.0).unwrap();
        assert_relative_eq!(s.asymptotic_envelope, nm.asymptotic_envelope, max_relative = 1e-12);
        let s = strategy_synergy(&at_sq(0.9801), 1.0, -0.5).unwrap();
        assert_relative_eq!(s.asymptotic_envelope, 136.597076806987198, max_relative = 1e-12);
        let s = strategy_synergy(&at_sq(0.0), 1.0, 0.0).unwrap();
        assert_relative_eq!(s.asymptotic_envelope, 1.0, max_relative = 1e-15);
        assert!(strategy_synergy(&at_sq(0.5), 1.0, 0.1).is_err());
    }

    #[test]
    fn coherent_qfi_examples() {
        assert_relative_eq!(rabi_coherent_qfi(&at_sq(0.0), 1.5, 2.0).unwrap(), 4.0 * 2.25 * 4.0);
        assert_relative_eq!(
            rabi_coherent_qfi(&at_sq(0.9801), 1.0, 1.0).unwrap(),
            52.271156281407035,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            rabi_coherent_qfi(&at_sq(0.81), 2.0, 1.0).unwrap(),
            29.812631578947368,
            max_relative = 1e-12
        );
    }

    proptest! {
        #[test]
        fn snr_bounded_by_envelope(r in 0.0f64..0.9999, t in 0.0f64..30.0, a in 0.0f64..5.0, xr in -2.0f64..0.0) {
            let p = RabiParams::at_ratio(1.0, 1e3, r).unwrap();
            for s in [strategy_displaced(&p, a).unwrap(), strategy_normal_mode(&p, a).unwrap(), strategy_synergy(&p, a, xr).unwrap()] {
                let v = s.snr(t);
                prop_assert!(v >= 0.0);
                prop_assert!(v <= s.envelope * t * t * (1.0 + 1e-12) + 1e-300);
            }
        }

        #[test]
        fn optimality_identities(w in 0.2f64..5.0, ratio_q in 10.0f64..1e4, r in 0.0f64..0.9999, a in 0.1f64..4.0, t in 0.1f64..10.0) {
            let p = RabiParams::at_ratio(w, ratio_q * w, r).unwrap();
            let env = strategy_normal_mode(&p, a).unwrap().envelope * t * t;
            let qfi = rabi_coherent_qfi(&p, a, t).unwrap();
            prop_assert!((env - qfi).abs() <= 1e-12 * qfi);
            prop_assert_eq!(strategy_extract_static(&p).unwrap().envelope, rabi_ground_qfi(&p).unwrap());
        }
    }
}
