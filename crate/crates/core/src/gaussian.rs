//! Gaussian phase-space engine.
//!
//! Quadratures are `X = (a + a†)/2`, `P = (a - a†)/2i`, ordered
//! `(X₁, P₁, X₂, P₂, …)`, so the vacuum covariance is `¼·I` and `[X, P] = i/2`.
//! A squeeze with parameter `xi` maps `Var X → Var X · e^{-2 xi}`; negative
//! `xi` therefore anti-squeezes X, matching `⟨X²⟩ = ¼ e^{-2 xi}` for the
//! dispersive Rabi ground state.
//!
//! Quadratic Hamiltonians are written `H = rᵀ K r + const` in the same
//! quadratures; `ω a†a` has `K = ω·I` and its symplectic eigenvalues are the
//! normal-mode frequencies.

use std::cell::RefCell;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::analytic::dicke::{squeezing_parameters, DickeParams};
use crate::error::{Error, Result};
use crate::numdiff::ridders;

/// Vacuum variance of a single quadrature.
pub const VACUUM_VARIANCE: f64 = 0.25;

const SYMMETRY_TOL: f64 = 1e-10;

/// Block-diagonal symplectic form `⊕ [[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    j
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() / scale
}

/// Square root of a symmetric positive-definite matrix and its inverse.
fn sym_sqrt_pair(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidState("matrix is not positive definite".into()));
    }
    let q = &eig.eigenvectors;
    let sqrt = q * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * q.transpose();
    let inv_sqrt = q * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt())) * q.transpose();
    Ok((sqrt, inv_sqrt))
}

/// Williamson (symplectic) eigenvalues of a symmetric positive-definite
/// `2n × 2n` matrix, ascending, one per mode.
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows() / 2;
    let (root, _) = sym_sqrt_pair(m)?;
    let a = &root * symplectic_form(n) * &root;
    let ata = a.transpose() * &a;
    let mut nu: Vec<f64> = SymmetricEigen::new(ata)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    nu.sort_by(|a, b| a.total_cmp(b));
    // eigenvalues come in degenerate pairs
    Ok(nu.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Validates shape, symmetry and the uncertainty relation.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) || cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "mean length {dim} and covariance {}x{} are incompatible",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if max_asymmetry(&cov) > SYMMETRY_TOL {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        let nu = symplectic_eigenvalues(&cov)?;
        if nu[0] < VACUUM_VARIANCE * (1.0 - 1e-9) {
            return Err(Error::InvalidState(format!(
                "uncertainty relation violated: symplectic eigenvalue {} < 1/4",
                nu[0]
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE,
        }
    }

    /// Single-mode coherent state `|α⟩`.
    pub fn coherent(alpha: Complex<f64>) -> Self {
        let mut s = Self::vacuum(1);
        s.mean[0] = alpha.re;
        s.mean[1] = alpha.im;
        s
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// `det(4Σ)`; one for pure states.
    pub fn purity_determinant(&self) -> f64 {
        (&self.cov * 4.0).determinant()
    }

    /// `Tr ρ² = 1 / sqrt(det 4Σ)`.
    pub fn purity(&self) -> f64 {
        1.0 / self.purity_determinant().sqrt()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity_determinant() - 1.0).abs() <= tol
    }

    /// `⟨a†a⟩` of one mode.
    pub fn occupation(&self, mode: usize) -> f64 {
        let (x, p) = (2 * mode, 2 * mode + 1);
        self.cov[(x, x)] + self.cov[(p, p)] + self.mean[x].powi(2) + self.mean[p].powi(2) - 0.5
    }

    pub fn apply(&self, op: &SymplecticOp) -> Result<Self> {
        if op.matrix.nrows() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: op.matrix.nrows(),
            });
        }
        Ok(Self {
            mean: &op.matrix * &self.mean + &op.displacement,
            cov: &op.matrix * &self.cov * op.matrix.transpose(),
        })
    }
}

/// Affine symplectic map `r → S r + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
    displacement: DVector<f64>,
}

impl SymplecticOp {
    pub fn new(matrix: DMatrix<f64>, displacement: DVector<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if !dim.is_multiple_of(2) || matrix.ncols() != dim || displacement.len() != dim {
            return Err(Error::InvalidState("symplectic map has incompatible shape".into()));
        }
        let j = symplectic_form(dim / 2);
        let dev = (matrix.transpose() * &j * &matrix - &j).amax();
        if dev > 1e-10 * matrix.amax().powi(2).max(1.0) {
            return Err(Error::InvalidState(format!("matrix is not symplectic (deviation {dev:e})")));
        }
        Ok(Self {
            matrix,
            displacement,
        })
    }

    fn linear(matrix: DMatrix<f64>) -> Self {
        let dim = matrix.nrows();
        Self {
            matrix,
            displacement: DVector::zeros(dim),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    /// Single-mode squeeze `Ŝ(xi)` on `mode`: `X → e^{-xi} X`, `P → e^{xi} P`.
    pub fn squeeze(n_modes: usize, mode: usize, xi: f64) -> Self {
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        m[(2 * mode, 2 * mode)] = (-xi).exp();
        m[(2 * mode + 1, 2 * mode + 1)] = xi.exp();
        Self::linear(m)
    }

    /// Squeeze along the axis rotated by `angle` in phase space.
    pub fn rotated_squeeze(xi: f64, angle: f64) -> Self {
        let r = Self::rotation(&[angle]).matrix;
        let s = Self::squeeze(1, 0, xi).matrix;
        Self::linear(r.transpose() * s * r)
    }

    /// Free evolution `exp(-i Σ θ_k a_k† a_k)`, one angle per mode.
    pub fn rotation(angles: &[f64]) -> Self {
        let n = angles.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (k, &th) in angles.iter().enumerate() {
            let (s, c) = th.sin_cos();
            m[(2 * k, 2 * k)] = c;
            m[(2 * k, 2 * k + 1)] = s;
            m[(2 * k + 1, 2 * k)] = -s;
            m[(2 * k + 1, 2 * k + 1)] = c;
        }
        Self::linear(m)
    }

    /// Displacement `D̂(α)` on `mode`.
    pub fn displace(n_modes: usize, mode: usize, alpha: Complex<f64>) -> Self {
        let mut d = DVector::zeros(2 * n_modes);
        d[2 * mode] = alpha.re;
        d[2 * mode + 1] = alpha.im;
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            displacement: d,
        }
    }

    /// Maps `(c, d)` quadratures to `(a, b)` with `c = (a - b)/√2`,
    /// `d = (a + b)/√2`.
    pub fn hybrid_to_bare() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(4, 4);
        for q in 0..2 {
            // a = (c + d)/√2
            m[(q, q)] = h;
            m[(q, 2 + q)] = h;
            // b = (d - c)/√2
            m[(2 + q, q)] = -h;
            m[(2 + q, 2 + q)] = h;
        }
        Self::linear(m)
    }
}

/// Single-mode squeezed vacuum with `Var X = ¼ e^{-2 xi}`.
pub fn make_squeezed_vacuum(xi: f64) -> Result<GaussianState> {
    if !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("xi must be finite, got {xi}")));
    }
    GaussianState::vacuum(1).apply(&SymplecticOp::squeeze(1, 0, xi))
}

/// Two-mode ground state in the bare `(a, b)` basis built from the hybrid
/// squeezers `xi-` on `c` and `xi+` on `d`.
pub fn make_two_mode_ground(p: &DickeParams) -> Result<GaussianState> {
    let sq = squeezing_parameters(p)?;
    let squeezed = GaussianState::vacuum(2)
        .apply(&SymplecticOp::squeeze(2, 0, sq.xi_minus))?
        .apply(&SymplecticOp::squeeze(2, 1, sq.xi_plus))?;
    squeezed.apply(&SymplecticOp::hybrid_to_bare())
}

/// Quadratic form `K` of the two-boson Hamiltonian
/// `ω a†a + Ω b†b + (g/2)(a + a†)(b + b†)`.
pub fn two_mode_hamiltonian_form(p: &DickeParams) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(4, 4);
    k[(0, 0)] = p.omega;
    k[(1, 1)] = p.omega;
    k[(2, 2)] = p.omega_atom;
    k[(3, 3)] = p.omega_atom;
    k[(0, 2)] = p.g;
    k[(2, 0)] = p.g;
    k
}

/// Ground state of `H = rᵀ K r` for positive-definite `K`:
/// `Σ = ¼ K^{-1/2} |K^{1/2} J K^{1/2}| K^{-1/2}`.
pub fn quadratic_ground_state(k: &DMatrix<f64>) -> Result<GaussianState> {
    let n = k.nrows() / 2;
    let (root, inv_root) = sym_sqrt_pair(k)
        .map_err(|_| Error::InvalidState("Hamiltonian is not bounded below".into()))?;
    let a = &root * symplectic_form(n) * &root;
    let ata = a.transpose() * &a;
    let eig = SymmetricEigen::new(ata);
    let abs_a = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    let mut cov = &inv_root * abs_a * &inv_root * VACUUM_VARIANCE;
    cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianState {
        mean: DVector::zeros(2 * n),
        cov,
    })
}

/// Normal-mode frequencies of `H = rᵀ K r`, ascending.
pub fn normal_mode_frequencies(k: &DMatrix<f64>) -> Result<Vec<f64>> {
    symplectic_eigenvalues(k)
}

/// Rotate each mode by `ω_k t`.
pub fn evolve_free(s: &GaussianState, freqs: &[f64], t: f64) -> Result<GaussianState> {
    if freqs.len() != s.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: s.n_modes(),
            got: freqs.len(),
        });
    }
    let angles: Vec<f64> = freqs.iter().map(|w| w * t).collect();
    s.apply(&SymplecticOp::rotation(&angles))
}

/// `⟨X⟩`, `⟨X²⟩`, `⟨X⁴⟩` of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureMoments {
    pub mean: f64,
    pub second: f64,
    pub fourth: f64,
}

impl QuadratureMoments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }

    /// `Var(X²) = ⟨X⁴⟩ - ⟨X²⟩²`.
    pub fn second_moment_variance(&self) -> f64 {
        self.fourth - self.second * self.second
    }
}

pub fn quadrature_moments(s: &GaussianState, mode: usize) -> Result<QuadratureMoments> {
    if mode >= s.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: s.n_modes(),
            got: mode,
        });
    }
    let mu = s.mean[2 * mode];
    let var = s.cov[(2 * mode, 2 * mode)];
    Ok(QuadratureMoments {
        mean: mu,
        second: var + mu * mu,
        fourth: 3.0 * var * var + 6.0 * var * mu * mu + mu.powi(4),
    })
}

/// `1 - |⟨ψ₁|ψ₂⟩|` for two pure Gaussian states.
///
/// Evaluated without forming `1 - (something close to 1)`: with `L Lᵀ = 4Σ₁`
/// and `μ_i` the eigenvalues of `4 L⁻¹(Σ₂ - Σ₁)L⁻ᵀ`, purity of both states
/// gives `ln det 2(Σ₁+Σ₂) = ½ Σ ln(1 + μ_i²/(4(1+μ_i)))`.
pub fn overlap_deficit(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1.n_modes() != s2.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: s1.n_modes(),
            got: s2.n_modes(),
        });
    }
    for s in [s1, s2] {
        if !s.is_pure(1e-8) {
            return Err(Error::InvalidState(format!(
                "overlap requires pure states (det 4Σ = {})",
                s.purity_determinant()
            )));
        }
    }
    let four_s1 = &s1.cov * 4.0;
    let chol = four_s1
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidState("covariance is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidState("singular covariance".into()))?;
    let delta = &s2.cov - &s1.cov;
    let d = &l_inv * delta * l_inv.transpose() * 4.0;
    let d = (&d + d.transpose()) * 0.5;
    let mu = SymmetricEigen::new(d).eigenvalues;
    let log_det: f64 = mu
        .iter()
        .map(|&m| 0.5 * (m * m / (4.0 * (1.0 + m))).ln_1p())
        .sum();
    let dm = &s2.mean - &s1.mean;
    let sum = &s1.cov + &s2.cov;
    let quad = match sum.cholesky() {
        Some(c) => dm.dot(&c.solve(&dm)),
        None => return Err(Error::InvalidState("singular covariance sum".into())),
    };
    // ln |⟨ψ₁|ψ₂⟩|² = -½ ln det 2(Σ₁+Σ₂) - ½ δᵀ(Σ₁+Σ₂)⁻¹δ
    let ln_fid = -0.5 * log_det - 0.5 * quad;
    Ok(-(0.5 * ln_fid).exp_m1())
}

/// `|⟨ψ₁|ψ₂⟩|` for pure Gaussian states.
pub fn overlap(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    Ok(1.0 - overlap_deficit(s1, s2)?)
}

/// Relative disagreement allowed between the two Richardson extrapolants.
pub const QFI_AGREEMENT: f64 = 1e-3;

/// Default finite-difference step for [`fidelity_qfi`], relative to `omega0`.
pub const DEFAULT_QFI_STEP: f64 = 1e-4;

/// Quantum Fisher information from the fidelity susceptibility of a pure
/// family `ω ↦ ψ(ω)`.
///
/// Uses the symmetric estimate `Q(ε) = 4[(1-|⟨ψ₀|ψ₊⟩|) + (1-|⟨ψ₀|ψ₋⟩|)]/ε²`
/// (equal to `8(1-|⟨ψ(ω₀)|ψ(ω₀+ε)⟩|)/ε²` up to odd orders) and Richardson
/// extrapolation over `ε, ε/2` and `ε/2, ε/4`.
pub fn fidelity_qfi<F>(family: F, omega0: f64, eps: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<GaussianState>,
{
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be > 0, got {eps}")));
    }
    let center = family(omega0)?;
    let q = |h: f64| -> Result<f64> {
        let plus = overlap_deficit(&center, &family(omega0 + h)?)?;
        let minus = overlap_deficit(&center, &family(omega0 - h)?)?;
        Ok(4.0 * (plus + minus) / (h * h))
    };
    let (q1, q2, q3) = (q(eps)?, q(eps / 2.0)?, q(eps / 4.0)?);
    let coarse = (4.0 * q2 - q1) / 3.0;
    let fine = (4.0 * q3 - q2) / 3.0;
    if (coarse - fine).abs() > QFI_AGREEMENT * fine.abs().max(1e-10) {
        return Err(Error::StepTooSmall { coarse, fine });
    }
    Ok(fine)
}

/// Observable whose mean carries the signal in an error-propagation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    /// `X` of the given mode, noise `Var X`.
    Quadrature(usize),
    /// `X²` of the given mode, noise `⟨X⁴⟩ - ⟨X²⟩²`.
    QuadratureSquared(usize),
}

/// Error-propagation SNR `(∂ω⟨O⟩)² / Var O` for a family of states, with
/// the derivative from Ridders-extrapolated central differences starting at
/// step `h0`.
pub fn error_propagation_snr<F>(family: F, omega0: f64, h0: f64, readout: Readout) -> Result<f64>
where
    F: Fn(f64) -> Result<GaussianState>,
{
    let first_err: RefCell<Option<Error>> = RefCell::new(None);
    let signal = |w: f64| -> f64 {
        let moments = family(w).and_then(|s| match readout {
            Readout::Quadrature(m) | Readout::QuadratureSquared(m) => quadrature_moments(&s, m),
        });
        match moments {
            Ok(m) => match readout {
                Readout::Quadrature(_) => m.mean,
                Readout::QuadratureSquared(_) => m.second,
            },
            Err(e) => {
                first_err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let d = ridders(signal, omega0, h0);
    if let Some(e) = first_err.into_inner() {
        return Err(e);
    }
    let m = quadrature_moments(&family(omega0)?, match readout {
        Readout::Quadrature(m) | Readout::QuadratureSquared(m) => m,
    })?;
    let noise = match readout {
        Readout::Quadrature(_) => m.variance(),
        Readout::QuadratureSquared(_) => m.second_moment_variance(),
    };
    Ok(d.value * d.value / noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::dicke::{bare_mode_occupation, normal_frequencies};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn squeezed_vacuum_orientation() {
        let v = make_squeezed_vacuum(0.0).unwrap();
        assert_eq!(v.covariance()[(0, 0)], 0.25);
        assert_eq!(v.covariance()[(1, 1)], 0.25);
        let s = make_squeezed_vacuum(-0.5).unwrap();
        assert_relative_eq!(s.covariance()[(0, 0)], 0.25 * 1f64.exp(), max_relative = 1e-15);
        assert_relative_eq!(s.covariance()[(0, 0)], 0.679570457114761, max_relative = 1e-12);
        let s = make_squeezed_vacuum(-0.979258886812923).unwrap();
        assert_relative_eq!(s.covariance()[(0, 0)], 1.772203012520840, max_relative = 1e-10);
        assert!(s.is_pure(1e-12));
    }

    #[test]
    fn two_mode_ground_occupations() {
        let vac = make_two_mode_ground(&DickeParams::resonant(1.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(vac.covariance().clone(), DMatrix::identity(4, 4) * 0.25, epsilon = 1e-15);
        for (r, expect) in [(0.99, 1.027444350371866), (0.5, 0.020320224484870)] {
            let p = DickeParams::resonant(1.0, r).unwrap();
            let s = make_two_mode_ground(&p).unwrap();
            assert_relative_eq!(s.occupation(0), expect, max_relative = 1e-10);
            assert_relative_eq!(s.occupation(1), expect, max_relative = 1e-10);
            let analytic = bare_mode_occupation(&squeezing_parameters(&p).unwrap());
            assert_relative_eq!(s.occupation(0), analytic, max_relative = 1e-10);
        }
    }

    #[test]
    fn quadratic_ground_matches_squeezer_construction() {
        for r in [0.1, 0.5, 0.9, 0.99] {
            let p = DickeParams::resonant(1.3, 1.3 * r).unwrap();
            let a = make_two_mode_ground(&p).unwrap();
            let b = quadratic_ground_state(&two_mode_hamiltonian_form(&p)).unwrap();
            assert_relative_eq!(a.covariance().clone(), b.covariance().clone(), epsilon = 1e-10);
            assert!(b.is_pure(1e-10));
        }
    }

    #[test]
    fn symplectic_spectrum_gives_normal_frequencies() {
        for (w, wa, g) in [(1.0, 1.0, 0.5), (1.0, 4.0, 1.0), (0.7, 2.3, 1.1)] {
            let p = DickeParams::new(w, wa, g).unwrap();
            let nu = normal_mode_frequencies(&two_mode_hamiltonian_form(&p)).unwrap();
            let f = normal_frequencies(&p).unwrap();
            assert_relative_eq!(nu[0], f.omega_minus, max_relative = 1e-10);
            assert_relative_eq!(nu[1], f.omega_plus, max_relative = 1e-10);
        }
    }

    #[test]
    fn unbounded_hamiltonian_is_rejected() {
        let p = DickeParams::resonant(1.0, 1.2).unwrap();
        assert!(quadratic_ground_state(&two_mode_hamiltonian_form(&p)).is_err());
    }

    #[test]
    fn uncertainty_violation_is_rejected() {
        let cov = DMatrix::identity(2, 2) * 0.2;
        assert!(GaussianState::new(DVector::zeros(2), cov).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.0, 0.3]);
        assert!(GaussianState::new(DVector::zeros(2), asym).is_err());
    }

    #[test]
    fn free_evolution_examples() {
        let s = make_squeezed_vacuum(-0.5).unwrap();
        assert_eq!(evolve_free(&s, &[1.0], 0.0).unwrap(), s);
        let c = GaussianState::coherent(Complex::new(1.5, 0.0));
        let r = evolve_free(&c, &[2.0], FRAC_PI_2 / 2.0).unwrap();
        assert!(r.mean()[0].abs() < 1e-15);
        assert_relative_eq!(r.mean()[1], -1.5, max_relative = 1e-15);
        let r = evolve_free(&s, &[1.0], FRAC_PI_4).unwrap();
        assert_relative_eq!(r.covariance()[(0, 0)], 0.25 * 1f64.cosh(), max_relative = 1e-14);
        assert!(evolve_free(&s, &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn rotated_variance_grid() {
        for i in 0..20 {
            let xi = -1.5 * i as f64 / 19.0;
            for j in 0..20 {
                let wt = 2.0 * PI * j as f64 / 19.0;
                let s = evolve_free(&make_squeezed_vacuum(xi).unwrap(), &[1.0], wt).unwrap();
                let closed = 0.25 * ((-2.0 * xi).exp() * wt.cos().powi(2) + (2.0 * xi).exp() * wt.sin().powi(2));
                assert!((s.covariance()[(0, 0)] - closed).abs() <= 1e-12 * closed);
                assert!((s.purity_determinant() - 1.0).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn moment_examples() {
        let m = quadrature_moments(&GaussianState::vacuum(1), 0).unwrap();
        assert_eq!((m.mean, m.second, m.fourth), (0.0, 0.25, 3.0 / 16.0));
        let s = make_squeezed_vacuum(-0.979258886812923).unwrap();
        let m = quadrature_moments(&s, 0).unwrap();
        assert_relative_eq!(m.fourth, 3.0 * m.second * m.second, max_relative = 1e-15);
        let d = GaussianState::coherent(Complex::new(1.0, 0.0));
        let m = quadrature_moments(&d, 0).unwrap();
        assert_eq!((m.mean, m.second, m.fourth), (1.0, 1.25, 2.6875));
        assert!(quadrature_moments(&d, 1).is_err());
    }

    /// Gauss–Hermite style brute force: integrate x⁴ against the Gaussian
    /// density on a fine grid.
    #[test]
    fn displaced_fourth_moment_by_quadrature() {
        let (mu, var): (f64, f64) = (0.7, 0.4);
        let sd = var.sqrt();
        let n = 20_000;
        let (lo, hi) = (mu - 12.0 * sd, mu + 12.0 * sd);
        let h = (hi - lo) / n as f64;
        let mut m4 = 0.0;
        for i in 0..=n {
            let x: f64 = lo + h * i as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            m4 += w * x.powi(4) * (-(x - mu).powi(2) / (2.0 * var)).exp();
        }
        m4 *= h / (2.0 * PI * var).sqrt();
        let mut cov = DMatrix::identity(2, 2) * var;
        cov[(1, 1)] = 0.25 * 0.25 / var + 0.1;
        let s = GaussianState::new(DVector::from_vec(vec![mu, 0.0]), cov).unwrap();
        assert_relative_eq!(quadrature_moments(&s, 0).unwrap().fourth, m4, max_relative = 1e-10);
    }

    #[test]
    fn coherent_overlap_closed_form() {
        let a = Complex::new(0.3, -0.2);
        let b = Complex::new(-0.1, 0.4);
        let ov = overlap(&GaussianState::coherent(a), &GaussianState::coherent(b)).unwrap();
        assert_relative_eq!(ov, (-(a - b).norm_sqr() / 2.0).exp(), max_relative = 1e-14);
    }

    #[test]
    fn squeezed_overlap_closed_form() {
        // |⟨0|S(r)⟩| = 1/sqrt(cosh r)
        let r = 0.8;
        let ov = overlap(&GaussianState::vacuum(1), &make_squeezed_vacuum(r).unwrap()).unwrap();
        assert_relative_eq!(ov, 1.0 / r.cosh().sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn fidelity_qfi_constant_family() {
        let q = fidelity_qfi(|_| Ok(make_squeezed_vacuum(-0.3).unwrap()), 1.0, 1e-3).unwrap();
        assert_eq!(q, 0.0);
    }

    #[test]
    fn fidelity_qfi_coherent_family() {
        for alpha in [0.5, 1.0, 2.0] {
            for t in [1.0, 2.5] {
                let fam = |w: f64| {
                    Ok(GaussianState::coherent(Complex::from_polar(alpha, -w * t)))
                };
                let q = fidelity_qfi(fam, 1.0, DEFAULT_QFI_STEP).unwrap();
                let expect = 4.0 * alpha * alpha * t * t;
                assert!((q - expect).abs() <= 1e-5 * expect, "{q} vs {expect}");
            }
        }
    }

    #[test]
    fn fidelity_qfi_dicke_ground_anchor() {
        let fam = |w: f64| quadratic_ground_state(&two_mode_hamiltonian_form(&DickeParams::resonant(w, 0.9)?));
        let q = fidelity_qfi(fam, 1.0, DEFAULT_QFI_STEP).unwrap();
        assert!((q - 10.153).abs() <= 1e-3, "{q}");
    }

    #[test]
    fn squeeze_is_symplectic() {
        let s = SymplecticOp::rotated_squeeze(0.7, 0.4);
        assert!(SymplecticOp::new(s.matrix().clone(), DVector::zeros(2)).is_ok());
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]));
        assert!(SymplecticOp::new(bad, DVector::zeros(2)).is_err());
    }

    proptest! {
        #[test]
        fn symplectic_maps_preserve_purity(xi in -1.5f64..1.5, th in 0.0f64..6.3, re in -2.0f64..2.0, im in -2.0f64..2.0, phi in 0.0f64..6.3) {
            let s = GaussianState::vacuum(1)
                .apply(&SymplecticOp::rotated_squeeze(xi, phi)).unwrap()
                .apply(&SymplecticOp::displace(1, 0, Complex::new(re, im))).unwrap();
            let e = evolve_free(&s, &[1.7], th).unwrap();
            prop_assert!((e.purity_determinant() - 1.0).abs() <= 1e-10);
        }

        #[test]
        fn zero_mean_fourth_moment_identity(xi in -2.0f64..2.0, th in 0.0f64..6.3) {
            let s = evolve_free(&make_squeezed_vacuum(xi).unwrap(), &[1.0], th).unwrap();
            let m = quadrature_moments(&s, 0).unwrap();
            prop_assert!((m.fourth - 3.0 * m.second * m.second).abs() <= 1e-12 * m.fourth);
        }
    }
}
