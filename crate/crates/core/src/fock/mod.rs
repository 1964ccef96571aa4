//! Truncated Fock-space oracle: Hamiltonian builders, lowest eigenpairs,
//! gap derivatives and cutoff convergence.

mod build;
mod eigen;
mod operator;
mod space;

pub use build::{build_dicke_finite, build_hp_two_mode, build_rabi, hybrid_minus_number, number_operator};
pub use eigen::{ground_expectation, spectrum, spectrum_with, Solver, SpectrumResult, DENSE_MAX};
pub use operator::{HermitianOperator, C64, HERMITIAN_TOL};
pub use space::{TruncatedSpace, DEFAULT_DIMENSION_CAP};

use crate::error::{Error, Result};

/// Relative disagreement allowed between the `ε` and `ε/2` gap derivatives.
pub const GAP_DERIVATIVE_AGREEMENT: f64 = 1e-3;

/// `∂ω ΔE` by central differences at `ε` and `ε/2`, Richardson-combined.
///
/// `family` maps ω to the Hamiltonian at that frequency (with whatever else
/// held fixed or tracked).
pub fn gap_derivative<F>(family: F, omega0: f64, eps: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<HermitianOperator>,
{
    if !(eps > 0.0 && eps < omega0) {
        return Err(Error::InvalidParameter(format!("need 0 < eps < omega0, got {eps}")));
    }
    let gap = |w: f64| -> Result<f64> { Ok(spectrum(&family(w)?, 2)?.gap) };
    let d = |h: f64| -> Result<f64> { Ok((gap(omega0 + h)? - gap(omega0 - h)?) / (2.0 * h)) };
    let coarse = d(eps)?;
    let fine = d(eps / 2.0)?;
    if (coarse - fine).abs() > GAP_DERIVATIVE_AGREEMENT * fine.abs().max(1e-9) {
        return Err(Error::StepTooSmall { coarse, fine });
    }
    Ok((4.0 * fine - coarse) / 3.0)
}

/// How the photon cutoff is grown until the gap stops moving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    pub start: usize,
    /// Increment used for the convergence comparison.
    pub step: usize,
    pub max: usize,
    pub rel_tol: f64,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self {
            start: 20,
            step: 10,
            max: 400,
            rel_tol: 1e-8,
        }
    }
}

impl CutoffPolicy {
    /// Starting cutoff `20·(1 + n)` for an expected virtual occupation `n`.
    pub fn for_occupation(n_virtual: f64) -> Self {
        Self {
            start: (20.0 * (1.0 + n_virtual.max(0.0))).ceil() as usize,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Converged {
    pub cutoff: usize,
    pub spectrum: SpectrumResult,
}

/// Diagonalizes at cutoffs `c` and `c + step`, doubling `c` until the gap
/// changes by at most `rel_tol`; returns the larger-cutoff result.
pub fn converged_spectrum<F>(build: F, k: usize, policy: CutoffPolicy) -> Result<Converged>
where
    F: Fn(usize) -> Result<HermitianOperator>,
{
    let mut c = policy.start.max(1);
    let mut last_change = f64::NAN;
    while c + policy.step <= policy.max {
        let attempt = (|| -> Result<(f64, SpectrumResult)> {
            let a = spectrum(&build(c)?, k)?;
            let b = spectrum(&build(c + policy.step)?, k)?;
            Ok(((b.gap - a.gap).abs() / b.gap.abs().max(f64::MIN_POSITIVE), b))
        })();
        match attempt {
            Ok((change, s)) if change <= policy.rel_tol => {
                log::debug!("cutoff {} converged (gap change {change:e})", c + policy.step);
                return Ok(Converged {
                    cutoff: c + policy.step,
                    spectrum: s,
                });
            }
            Ok((change, _)) => last_change = change,
            Err(Error::DimensionCap { dim, cap }) => {
                return Err(Error::ConvergenceError(format!(
                    "dimension cap {cap} reached (dim {dim}) at cutoff {c}; last relative gap change {last_change:e}"
                )))
            }
            Err(e) => return Err(e),
        }
        c *= 2;
    }
    Err(Error::ConvergenceError(format!(
        "gap not converged to {:e} below cutoff {}; last relative change {last_change:e}",
        policy.rel_tol, policy.max
    )))
}
