//! Driven, damped lower polariton: steady state, homodyne SNR and the
//! coherent-output Fisher information.
//!
//! The probe frequency ω enters only through the detuning
//! `δ(ω) = ω_p - ω₋(ω)` with the pump frequency `ω_p` fixed, so every
//! ω-derivative is `∂ω = -(∂ω ω₋) ∂δ`. On resonance (Ω tracking ω)
//! `(∂ω ω₋)² = (2 - g/ω)² / (4(1 - g/ω))`.
//!
//! In the frame rotating at `ω_p` the mode obeys
//! `dα/dt = -(κ/2 + iδ) α + iη`, whose fixed point is
//! `α = η/(δ - iκ/2)` with `arg α = atan2(κ, 2δ)`.

use std::cell::RefCell;

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::analytic::dicke::{normal_frequencies, virtual_mode_occupation, DickeParams};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::numdiff::ridders;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveParams {
    /// Loss rate κ.
    pub kappa: f64,
    /// Pump strength η.
    pub eta: f64,
    /// Pump–polariton detuning δ = ω_p − ω₋.
    pub delta: f64,
    /// Measurement duration.
    pub t_meas: f64,
}

impl DriveParams {
    pub fn new(kappa: f64, eta: f64, delta: f64, t_meas: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be > 0, got {kappa}")));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("delta must be finite, got {delta}")));
        }
        if !(t_meas > 0.0 && t_meas.is_finite()) {
            return Err(Error::InvalidParameter(format!("t must be > 0, got {t_meas}")));
        }
        Ok(Self {
            kappa,
            eta,
            delta,
            t_meas,
        })
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.kappa, self.eta, delta, self.t_meas)
    }

    fn lorentzian(&self) -> f64 {
        4.0 * self.delta * self.delta + self.kappa * self.kappa
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyResponse {
    pub amp_intracavity: f64,
    /// `√κ · amp_intracavity`.
    pub amp_output: f64,
    /// `atan2(κ, 2δ)`, in `(0, π)` and continuous through `δ = 0`.
    pub phase: f64,
    /// Output photons per unit time, `4κη²/(κ² + 4δ²)`.
    pub photon_flux: f64,
}

pub fn steady_state_response(d: &DriveParams) -> SteadyResponse {
    let l = d.lorentzian();
    let amp = 2.0 * d.eta / l.sqrt();
    SteadyResponse {
        amp_intracavity: amp,
        amp_output: 2.0 * (d.kappa * d.eta * d.eta / l).sqrt(),
        phase: d.kappa.atan2(2.0 * d.delta),
        photon_flux: 4.0 * d.kappa * d.eta * d.eta / l,
    }
}

/// Steady state of the damped, driven mode from its linear drift:
/// mean `-A⁻¹b`, covariance from `AΣ + ΣAᵀ + (κ/4)·I = 0`.
pub fn lindblad_steady_state(d: &DriveParams) -> Result<GaussianState> {
    let a = Matrix2::new(-d.kappa / 2.0, d.delta, -d.delta, -d.kappa / 2.0);
    let b = Vector2::new(0.0, d.eta);
    let lu = a.lu();
    let mean = lu.solve(&(-b)).ok_or(Error::SingularDrift)?;
    // (I ⊗ A + A ⊗ I) vec Σ = -vec D
    let i2 = Matrix2::<f64>::identity();
    let big = i2.kronecker(&a) + a.kronecker(&i2);
    let rhs = -DVector::from_column_slice((Matrix2::identity() * (d.kappa / 4.0)).as_slice());
    let vec_sigma = DMatrix::from_iterator(4, 4, big.iter().copied())
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularDrift)?;
    let mut cov = DMatrix::from_column_slice(2, 2, vec_sigma.as_slice());
    cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(DVector::from_column_slice(mean.as_slice()), cov)
}

/// Effective quadrature variance of time-integrated homodyne detection,
/// `e^{2ξ_r}/(4t)`, for an input squeezed by `xi_r ≤ 0`.
pub fn homodyne_variance(t: f64, xi_r: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be > 0, got {t}")));
    }
    if !(xi_r <= 0.0) {
        return Err(Error::InvalidParameter(format!("xi_r must be <= 0, got {xi_r}")));
    }
    Ok((2.0 * xi_r).exp() / (4.0 * t))
}

/// `(2 - r)²/(1 - r)` with `r = g/ω`, i.e. `4(∂ω ω₋)²` on resonance.
fn lower_frequency_sensitivity(p: &DickeParams) -> Result<f64> {
    if !p.is_resonant() {
        return Err(Error::NotResonant {
            omega: p.omega,
            big_omega: p.omega_atom,
        });
    }
    let r = p.check_normal_phase()?;
    Ok((2.0 - r).powi(2) / (1.0 - r))
}

/// Amplitude-quadrature SNR `4κt(∂ω|α|)²`:
/// `64κtδ²η²(2 - g/ω)² / ((4δ² + κ²)³(1 - g/ω))`.
pub fn snr_amplitude(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    let s = lower_frequency_sensitivity(p)?;
    let l = d.lorentzian();
    Ok(64.0 * d.kappa * d.t_meas * d.delta * d.delta * d.eta * d.eta * s / (l * l * l))
}

/// Near-threshold form of [`snr_amplitude`] in terms of the lower hybrid
/// occupation: `256κtδ²|α|²⟨n_c⟩² / (4δ² + κ²)²`.
pub fn snr_amplitude_near_threshold(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    lower_frequency_sensitivity(p)?;
    let n_c = virtual_mode_occupation(p)?.n_c;
    let alpha = steady_state_response(d).amp_intracavity;
    let l = d.lorentzian();
    Ok(256.0 * d.kappa * d.t_meas * d.delta * d.delta * alpha * alpha * n_c * n_c / (l * l))
}

/// Phase term of the driven information budget:
/// `4tη²κ/(4δ²+κ²) · κ²(g - 2ω)² / (ω(4δ²+κ²)²(ω - g))`.
pub fn snr_phase(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    lower_frequency_sensitivity(p)?;
    let (w, g) = (p.omega, p.g);
    let l = d.lorentzian();
    let k = d.kappa;
    Ok(4.0 * d.t_meas * d.eta * d.eta * k / l * k * k * (g - 2.0 * w).powi(2) / (w * l * l * (w - g)))
}

/// Amplitude plus phase information, as one expression.
pub fn driven_qfi_total(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    let s = lower_frequency_sensitivity(p)?;
    let l = d.lorentzian();
    let (k, t, eta, delta) = (d.kappa, d.t_meas, d.eta, d.delta);
    let amplitude = 64.0 * k * t * delta * delta * eta * eta * s / (l * l * l);
    let phase = 4.0 * t * eta * eta * k / l * k * k * (p.g - 2.0 * p.omega).powi(2)
        / (p.omega * l * l * (p.omega - p.g));
    Ok(amplitude + phase)
}

/// Fisher information `4t|∂ω α_out|²` of the coherent output field, for
/// comparison with [`driven_qfi_total`]: its phase part is four times
/// [`snr_phase`].
pub fn coherent_output_qfi(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    let s = lower_frequency_sensitivity(p)?;
    let r = steady_state_response(d);
    let l = d.lorentzian();
    // ∂δ|α_out| and ∂δ φ
    let d_amp = -4.0 * d.delta * r.amp_output / l;
    let d_phase = -2.0 * d.kappa / l;
    Ok(d.t_meas * s * (d_amp * d_amp + r.amp_output.powi(2) * d_phase * d_phase))
}

/// Drive parameters at frequency `omega` with the pump frequency held where
/// it gives detuning `d.delta` at `p.omega`.
fn retuned(p: &DickeParams, d: &DriveParams, omega: f64) -> Result<(DickeParams, DriveParams)> {
    let pump = d.delta + normal_frequencies(p)?.omega_minus;
    let q = DickeParams::resonant(omega, p.g)?;
    let dq = d.with_delta(pump - normal_frequencies(&q)?.omega_minus)?;
    Ok((q, dq))
}

fn fd_step(p: &DickeParams) -> f64 {
    0.1 * (p.omega - p.g).abs().min(p.omega)
}

/// Finite-difference oracle for [`snr_amplitude`]: `4κt(∂ω|⟨a⟩|)²` with the
/// mean taken from [`lindblad_steady_state`] and ω₋ from the Bogoliubov
/// frequencies.
pub fn amplitude_snr_oracle(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    lower_frequency_sensitivity(p)?;
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let amp = |w: f64| match retuned(p, d, w).and_then(|(_, dq)| lindblad_steady_state(&dq)) {
        Ok(s) => s.mean().norm(),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let deriv = ridders(amp, p.omega, fd_step(p));
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(4.0 * d.kappa * d.t_meas * deriv.value * deriv.value)
}

/// Finite-difference oracle for [`coherent_output_qfi`].
pub fn coherent_output_qfi_oracle(p: &DickeParams, d: &DriveParams) -> Result<f64> {
    lower_frequency_sensitivity(p)?;
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let quad = |w: f64, k: usize| match retuned(p, d, w).and_then(|(_, dq)| lindblad_steady_state(&dq)) {
        Ok(s) => d.kappa.sqrt() * s.mean()[k],
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let dx = ridders(|w| quad(w, 0), p.omega, fd_step(p)).value;
    let dp = ridders(|w| quad(w, 1), p.omega, fd_step(p)).value;
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(4.0 * d.t_meas * Complex::new(dx, dp).norm_sqr())
}
