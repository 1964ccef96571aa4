//! Closed forms for the Dicke model in its normal phase, in the
//! thermodynamic (Holstein–Primakoff) limit.
//!
//! Conventions: ħ = 1, the squeezing parameters are `xi± = ¼ ln(1 ± g/g_c)`
//! with `g_c = sqrt(ω Ω)`, so `xi- ≤ 0` (anti-squeezes the X quadrature of
//! the `c = (a - b)/√2` mode) and `xi+ ≥ 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest admissible `g/g_c`; closer points are rejected.
pub const THRESHOLD_GUARD: f64 = 1.0 - 1e-9;

/// Relative tolerance for deciding `ω == Ω`.
pub const RESONANCE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DickeParams {
    /// Cavity frequency ω.
    pub omega: f64,
    /// Atomic transition frequency Ω.
    pub omega_atom: f64,
    /// Vacuum Rabi coupling g.
    pub g: f64,
    /// Number of atoms; `None` is the thermodynamic limit.
    pub n_atoms: Option<u32>,
}

impl DickeParams {
    pub fn new(omega: f64, omega_atom: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be > 0, got {omega}")));
        }
        if !(omega_atom > 0.0 && omega_atom.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Omega must be > 0, got {omega_atom}"
            )));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g must be >= 0, got {g}")));
        }
        Ok(Self {
            omega,
            omega_atom,
            g,
            n_atoms: None,
        })
    }

    /// Resonant parameters `ω = Ω`.
    pub fn resonant(omega: f64, g: f64) -> Result<Self> {
        Self::new(omega, omega, g)
    }

    pub fn with_atoms(mut self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n_atoms must be >= 1".into()));
        }
        self.n_atoms = Some(n);
        Ok(self)
    }

    pub fn critical_coupling(&self) -> f64 {
        (self.omega * self.omega_atom).sqrt()
    }

    pub fn coupling_ratio(&self) -> f64 {
        self.g / self.critical_coupling()
    }

    pub fn is_resonant(&self) -> bool {
        (self.omega - self.omega_atom).abs() <= RESONANCE_RTOL * self.omega.max(self.omega_atom)
    }

    /// Fails with `BeyondThreshold` outside the guard band.
    pub fn check_normal_phase(&self) -> Result<f64> {
        let ratio = self.coupling_ratio();
        if ratio > THRESHOLD_GUARD {
            return Err(Error::BeyondThreshold { ratio });
        }
        Ok(ratio)
    }

    fn check_resonant(&self) -> Result<()> {
        if !self.is_resonant() {
            return Err(Error::NotResonant {
                omega: self.omega,
                big_omega: self.omega_atom,
            });
        }
        Ok(())
    }
}

/// Squeezing parameters of the hybridized modes `c` (minus) and `d` (plus).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingPair {
    pub xi_minus: f64,
    pub xi_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFrequencies {
    pub omega_minus: f64,
    pub omega_plus: f64,
}

/// Which quantities move when ω is varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DerivativeConvention {
    /// Ω is slaved to ω (resonance kept while differentiating).
    #[default]
    TrackedResonance,
    /// Ω held fixed; only `g_c = sqrt(ωΩ)` moves with ω.
    FixedPartner,
}

impl std::str::FromStr for DerivativeConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tracked" => Ok(Self::TrackedResonance),
            "fixed" => Ok(Self::FixedPartner),
            other => Err(Error::InvalidSpec(format!("unknown convention `{other}`"))),
        }
    }
}

pub fn squeezing_parameters(p: &DickeParams) -> Result<SqueezingPair> {
    p.check_resonant()?;
    let r = p.check_normal_phase()?;
    Ok(SqueezingPair {
        xi_minus: 0.25 * (-r).ln_1p(),
        xi_plus: 0.25 * r.ln_1p(),
    })
}

/// Polariton frequencies ω± for arbitrary detuning.
pub fn normal_frequencies(p: &DickeParams) -> Result<NormalFrequencies> {
    p.check_normal_phase()?;
    let (w, wa, g) = (p.omega, p.omega_atom, p.g);
    let sum = w * w + wa * wa;
    let diff = w * w - wa * wa;
    let plus_sq = 0.5 * (sum + (diff * diff + 4.0 * g * g * w * wa).sqrt());
    // product form avoids the cancellation in ½(sum - sqrt(...)) near threshold
    let product = w * wa * (w * wa - g * g);
    let minus_sq = product / plus_sq;
    Ok(NormalFrequencies {
        omega_minus: minus_sq.sqrt(),
        omega_plus: plus_sq.sqrt(),
    })
}

/// Occupation `⟨a†a⟩ = ⟨b†b⟩` of the bare modes.
pub fn bare_mode_occupation(sq: &SqueezingPair) -> f64 {
    0.5 * (sq.xi_minus.sinh().powi(2) + sq.xi_plus.sinh().powi(2))
}

/// Virtual occupations of the hybridized modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VirtualOccupation {
    pub n_c: f64,
    pub n_d: f64,
}

pub fn virtual_mode_occupation(p: &DickeParams) -> Result<VirtualOccupation> {
    let sq = squeezing_parameters(p)?;
    Ok(VirtualOccupation {
        n_c: sq.xi_minus.sinh().powi(2),
        n_d: sq.xi_plus.sinh().powi(2),
    })
}

/// `(1 - sqrt(1-r))² / (4 sqrt(1-r))` for `r = g/g_c`; algebraically equal to
/// `sinh² xi-`.
pub fn lower_occupation_closed_form(ratio: f64) -> f64 {
    let s = (1.0 - ratio).sqrt();
    // 1 - sqrt(1-r) = r / (1 + sqrt(1-r))
    let num = ratio / (1.0 + s);
    num * num / (4.0 * s)
}

/// `(∂ω xi-, ∂ω xi+)` under the chosen convention.
pub fn squeezing_derivatives(p: &DickeParams, conv: DerivativeConvention) -> Result<(f64, f64)> {
    p.check_resonant()?;
    let r = p.check_normal_phase()?;
    let w = p.omega;
    Ok(match conv {
        DerivativeConvention::TrackedResonance => {
            let k = p.g / (4.0 * w * w);
            (k / (1.0 - r), -k / (1.0 + r))
        }
        DerivativeConvention::FixedPartner => {
            let k = r / (8.0 * w);
            (k / (1.0 - r), -k / (1.0 + r))
        }
    })
}

/// Ground-state QFI `2(∂ω xi-)² + 2(∂ω xi+)²`.
pub fn ground_state_qfi(p: &DickeParams, conv: DerivativeConvention) -> Result<f64> {
    let (dm, dp) = squeezing_derivatives(p, conv)?;
    Ok(2.0 * dm * dm + 2.0 * dp * dp)
}

/// Near-critical approximation `g² / (8 ω⁴ (1 - g/g_c)²)` (tracked resonance).
pub fn ground_state_qfi_near_critical(p: &DickeParams) -> Result<f64> {
    p.check_resonant()?;
    let r = p.check_normal_phase()?;
    let w2 = p.omega * p.omega;
    Ok(p.g * p.g / (8.0 * w2 * w2 * (1.0 - r).powi(2)))
}

/// `∂ω ω-` with Ω tracking ω: `(2 - g/ω) / (2 sqrt(1 - g/ω))`.
pub fn dfreq_lower(p: &DickeParams) -> Result<f64> {
    p.check_resonant()?;
    let r = p.check_normal_phase()?;
    Ok((2.0 - r) / (2.0 * (1.0 - r).sqrt()))
}

/// QFI of a coherent polariton state evolving at ω-, reported in its exact
/// form and the near-threshold forms side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherentQfi {
    /// `4 t² |α|² (∂ω ω-)²`.
    pub exact: f64,
    /// `t² |α|² exp(-4 xi-) = t² |α|² / (1 - g/g_c)`.
    pub near_threshold: f64,
    /// `16 t² |α|² ⟨n_c⟩²` with the exact virtual occupation.
    pub virtual_form: f64,
}

fn check_resource(alpha_mag: f64, t: f64) -> Result<()> {
    if !(alpha_mag >= 0.0 && alpha_mag.is_finite()) {
        return Err(Error::InvalidParameter(format!("|alpha| must be >= 0, got {alpha_mag}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be >= 0, got {t}")));
    }
    Ok(())
}

pub fn coherent_qfi(p: &DickeParams, alpha_mag: f64, t: f64) -> Result<CoherentQfi> {
    check_resource(alpha_mag, t)?;
    let d = dfreq_lower(p)?;
    let sq = squeezing_parameters(p)?;
    let resource = alpha_mag * alpha_mag * t * t;
    let n_c = sq.xi_minus.sinh().powi(2);
    Ok(CoherentQfi {
        exact: 4.0 * resource * d * d,
        near_threshold: resource * (-4.0 * sq.xi_minus).exp(),
        virtual_form: 16.0 * resource * n_c * n_c,
    })
}

/// QFI of a displaced state whose noise is reduced by real squeezing with the
/// same parameter: `4 t² |α|² exp(-2 xi-)`.
pub fn real_squeezing_qfi(p: &DickeParams, alpha_mag: f64, t: f64) -> Result<f64> {
    check_resource(alpha_mag, t)?;
    let sq = squeezing_parameters(p)?;
    Ok(4.0 * alpha_mag * alpha_mag * t * t * (-2.0 * sq.xi_minus).exp())
}
