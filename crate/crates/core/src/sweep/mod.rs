//! Parameter sweeps: a Cartesian grid over named ranges, evaluated in
//! parallel and returned in row-major declaration order.

mod output;
mod spec;
pub mod validate;

pub use output::*;
pub use spec::*;

use rayon::prelude::*;

use crate::analytic::dicke::{
    coherent_qfi, ground_state_qfi, normal_frequencies, squeezing_parameters, virtual_mode_occupation, DickeParams,
};
use crate::analytic::rabi::{
    rabi_coherent_qfi, rabi_effective, rabi_ground_qfi, strategy_displaced, strategy_extract_evolved,
    strategy_extract_static, strategy_normal_mode, strategy_synergy, RabiParams,
};
use crate::error::{Error, Result};
use crate::fock::{build_rabi, converged_spectrum, gap_derivative, CutoffPolicy, TruncatedSpace};
use crate::open_dynamics::{
    coherent_output_qfi, driven_qfi_total, snr_amplitude, snr_amplitude_near_threshold, snr_phase,
    steady_state_response, DriveParams,
};
use crate::strategy::{compare_point, DEFAULT_ORACLE_TOL};

/// Short machine-readable code for the status column.
pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::NotResonant { .. } => "not_resonant",
        Error::BeyondThreshold { .. } => "beyond_threshold",
        Error::StepTooSmall { .. } => "step_too_small",
        Error::DimensionCap { .. } => "dimension_cap",
        Error::ConvergenceError(_) => "not_converged",
        Error::SolverFailure(_) | Error::NotHermitian(_) | Error::DimensionMismatch { .. } => "solver_failure",
        Error::SingularDrift => "singular_drift",
        Error::InvalidState(_) => "invalid_state",
        Error::NoRootInBracket { .. } | Error::GridTooCoarse(_) => "no_result",
        Error::InvalidSpec(_) => "invalid_spec",
        Error::Io(_) => "io_error",
    }
}

/// Fully resolved parameters at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub omega: f64,
    pub omega_big: f64,
    pub g: f64,
    pub kappa: f64,
    pub eta: f64,
    pub delta: f64,
    pub t: f64,
    pub alpha: f64,
    pub xi_r: f64,
}

impl Point {
    pub fn g_over_gc(&self) -> f64 {
        self.g / (self.omega * self.omega_big).sqrt()
    }
}

fn base_point(spec: &SweepSpec) -> Point {
    let f = &spec.fixed;
    let omega_big = f.omega_big.unwrap_or(match spec.model {
        Model::Dicke => f.omega,
        Model::Rabi => 1e4 * f.omega,
    });
    Point {
        omega: f.omega,
        omega_big,
        g: f.g,
        kappa: f.kappa,
        eta: f.eta,
        delta: f.delta,
        t: f.t,
        alpha: f.alpha,
        xi_r: f.xi_r,
    }
}

/// Applies raw assignments first, then the derived ones, so `g_over_gc`
/// uses the swept ω and Ω at that point.
fn resolve(spec: &SweepSpec, assignment: &[(&str, f64)]) -> Point {
    let mut p = base_point(spec);
    // an unset Ω follows a swept ω in the Dicke model
    let omega_big_tracks = spec.fixed.omega_big.is_none();
    for &(name, v) in assignment {
        match name {
            "omega" => {
                p.omega = v;
                if omega_big_tracks {
                    p.omega_big = match spec.model {
                        Model::Dicke => v,
                        Model::Rabi => 1e4 * v,
                    };
                }
            }
            "Omega" => p.omega_big = v,
            "g" => p.g = v,
            "kappa" => p.kappa = v,
            "eta" => p.eta = v,
            "delta" => p.delta = v,
            "t" => p.t = v,
            "alpha" => p.alpha = v,
            "xi_r" => p.xi_r = v,
            _ => {}
        }
    }
    for &(name, v) in assignment {
        let gc = (p.omega * p.omega_big).sqrt();
        match name {
            "g_over_gc" => p.g = v * gc,
            "one_minus_g_over_gc" => p.g = (1.0 - v) * gc,
            "delta_over_kappa" => p.delta = v * p.kappa,
            _ => {}
        }
    }
    p
}

/// Quantity columns appended after the swept parameters.
pub fn quantity_columns(target: Target, model: Model) -> &'static [&'static str] {
    match (target, model) {
        (Target::Fig2, _) => &["g_over_gc", "delta", "snr_amplitude", "snr_amplitude_near_threshold"],
        (Target::FigS1, _) => &["g_over_gc", "delta", "snr_amplitude", "snr_phase", "driven_qfi_total"],
        (Target::FigS2, _) => &["g_over_gc", "Omega_over_omega", "cutoff", "gap", "sw_gap", "gap_derivative"],
        (Target::FigS3, _) => &[
            "g_over_gc",
            "t",
            "snr_extract_evolved",
            "snr_displaced",
            "snr_normal_mode",
            "snr_synergy",
            "oracle_deviation",
            "flagged",
        ],
        (Target::Custom, Model::Dicke) => &[
            "g_over_gc",
            "xi_minus",
            "xi_plus",
            "omega_minus",
            "omega_plus",
            "n_c",
            "ground_qfi",
            "coherent_qfi",
            "amp_intracavity",
            "phase",
            "snr_amplitude",
            "snr_phase",
            "driven_qfi_total",
            "coherent_output_qfi",
        ],
        (Target::Custom, Model::Rabi) => &[
            "g_over_gc",
            "xi",
            "n_virtual",
            "omega_eff",
            "ground_qfi",
            "coherent_qfi",
            "snr_extract_static",
            "snr_extract_evolved",
            "snr_displaced",
            "snr_normal_mode",
            "snr_synergy",
        ],
    }
}

/// Collects cell values; the first error becomes the row status.
struct Cells {
    values: Vec<Option<f64>>,
    status: Option<&'static str>,
}

impl Cells {
    fn new() -> Self {
        Self {
            values: Vec::new(),
            status: None,
        }
    }

    fn push(&mut self, r: Result<f64>) {
        match r {
            Ok(v) => self.values.push(Some(v)),
            Err(e) => {
                self.status.get_or_insert(error_code(&e));
                self.values.push(None);
            }
        }
    }

    /// Fills `n` cells from a fallible group that shares its inputs.
    fn push_all(&mut self, n: usize, r: Result<Vec<f64>>) {
        match r {
            Ok(v) => v.into_iter().for_each(|x| self.values.push(Some(x))),
            Err(e) => {
                self.status.get_or_insert(error_code(&e));
                self.values.extend(std::iter::repeat_n(None, n));
            }
        }
    }
}

fn dicke_params(p: &Point) -> Result<DickeParams> {
    DickeParams::new(p.omega, p.omega_big, p.g)
}

fn drive(p: &Point) -> Result<DriveParams> {
    DriveParams::new(p.kappa, p.eta, p.delta, p.t)
}

fn driven(p: &Point, f: fn(&DickeParams, &DriveParams) -> Result<f64>) -> Result<f64> {
    f(&dicke_params(p)?, &drive(p)?)
}

fn rabi_params(p: &Point) -> Result<RabiParams> {
    RabiParams::new(p.omega, p.omega_big, p.g)
}

/// Fock-space Rabi gap at the converged cutoff and its ω-derivative with Ω
/// and g held fixed. Returns `(cutoff, gap, d gap / dω)`.
fn rabi_fock(p: &Point) -> Result<(usize, f64, f64)> {
    let rp = rabi_params(p)?;
    let eff = rabi_effective(&rp)?;
    let conv = converged_spectrum(
        |c| build_rabi(&rp, &TruncatedSpace::single_mode(c, 2)?),
        2,
        CutoffPolicy::for_occupation(eff.n_virtual_asymptotic),
    )?;
    let cutoff = conv.cutoff;
    let x = rp.coupling_sq()?;
    let eps = 0.01 * p.omega * (1.0 - x);
    let family = |w: f64| build_rabi(&RabiParams::new(w, rp.omega_qubit, rp.g)?, &TruncatedSpace::single_mode(cutoff, 2)?);
    let d = gap_derivative(family, p.omega, eps)?;
    Ok((cutoff, conv.spectrum.gap, d))
}

fn evaluate(spec: &SweepSpec, p: &Point) -> Cells {
    let mut c = Cells::new();
    match (spec.target, spec.model) {
        (Target::Fig2, _) => {
            c.push(Ok(p.g_over_gc()));
            c.push(Ok(p.delta));
            c.push(driven(p, snr_amplitude));
            c.push(driven(p, snr_amplitude_near_threshold));
        }
        (Target::FigS1, _) => {
            c.push(Ok(p.g_over_gc()));
            c.push(Ok(p.delta));
            c.push(driven(p, snr_amplitude));
            c.push(driven(p, snr_phase));
            c.push(driven(p, driven_qfi_total));
        }
        (Target::FigS2, _) => {
            c.push(Ok(p.g_over_gc()));
            c.push(Ok(p.omega_big / p.omega));
            let fock = rabi_fock(p);
            c.push_all(2, fock.clone().map(|(cut, gap, _)| vec![cut as f64, gap]));
            c.push(rabi_params(p).and_then(|rp| rabi_effective(&rp)).map(|e| e.omega_eff));
            c.push(fock.map(|(_, _, d)| d));
        }
        (Target::FigS3, _) => {
            c.push(Ok(p.g_over_gc()));
            c.push(Ok(p.t));
            let xi_r = (p.xi_r < 0.0).then_some(p.xi_r);
            match compare_point(p.omega, p.g_over_gc(), p.t, p.alpha, xi_r, DEFAULT_ORACLE_TOL) {
                Ok(row) => {
                    c.values.extend([
                        Some(row.snr_extract_evolved),
                        Some(row.snr_displaced),
                        Some(row.snr_normal_mode),
                        row.snr_synergy,
                        Some(row.oracle_deviation),
                        Some(if row.flagged { 1.0 } else { 0.0 }),
                    ]);
                    if row.flagged {
                        c.status.get_or_insert("oracle_mismatch");
                    }
                }
                Err(e) => c.push_all(6, Err(e)),
            }
        }
        (Target::Custom, Model::Dicke) => {
            c.push(Ok(p.g_over_gc()));
            c.push_all(
                2,
                dicke_params(p)
                    .and_then(|d| squeezing_parameters(&d))
                    .map(|s| vec![s.xi_minus, s.xi_plus]),
            );
            c.push_all(
                2,
                dicke_params(p)
                    .and_then(|d| normal_frequencies(&d))
                    .map(|f| vec![f.omega_minus, f.omega_plus]),
            );
            c.push(dicke_params(p).and_then(|d| virtual_mode_occupation(&d)).map(|o| o.n_c));
            c.push(dicke_params(p).and_then(|d| ground_state_qfi(&d, spec.fixed.convention)));
            c.push(dicke_params(p).and_then(|d| coherent_qfi(&d, p.alpha, p.t)).map(|q| q.exact));
            c.push_all(
                2,
                drive(p).map(|d| {
                    let r = steady_state_response(&d);
                    vec![r.amp_intracavity, r.phase]
                }),
            );
            c.push(driven(p, snr_amplitude));
            c.push(driven(p, snr_phase));
            c.push(driven(p, driven_qfi_total));
            c.push(driven(p, coherent_output_qfi));
        }
        (Target::Custom, Model::Rabi) => {
            c.push(Ok(p.g_over_gc()));
            c.push_all(
                3,
                rabi_params(p)
                    .and_then(|r| rabi_effective(&r))
                    .map(|e| vec![e.xi, e.n_virtual, e.omega_eff]),
            );
            c.push(rabi_params(p).and_then(|r| rabi_ground_qfi(&r)));
            c.push(rabi_params(p).and_then(|r| rabi_coherent_qfi(&r, p.alpha, p.t)));
            c.push(rabi_params(p).and_then(|r| strategy_extract_static(&r)).map(|s| s.envelope));
            c.push(rabi_params(p).and_then(|r| strategy_extract_evolved(&r, p.t)));
            c.push(rabi_params(p).and_then(|r| strategy_displaced(&r, p.alpha)).map(|s| s.snr(p.t)));
            c.push(rabi_params(p).and_then(|r| strategy_normal_mode(&r, p.alpha)).map(|s| s.snr(p.t)));
            if p.xi_r < 0.0 {
                c.push(rabi_params(p).and_then(|r| strategy_synergy(&r, p.alpha, p.xi_r)).map(|s| s.snr(p.t)));
            } else {
                c.values.push(None);
            }
        }
    }
    c
}

/// Evaluates the spec over its grid. Points that fail keep empty cells and
/// record the reason in the status column; only an invalid spec is an error.
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    spec.validate()?;
    let axes: Vec<(&str, Vec<f64>)> = spec.ranges.iter().map(|r| (r.name.as_str(), r.values())).collect();
    let n = spec.len();
    let mut columns: Vec<String> = axes.iter().map(|(name, _)| name.to_string()).collect();
    let quantities = quantity_columns(spec.target, spec.model);
    // a quantity that is also a swept axis would only repeat it
    let keep: Vec<bool> = quantities.iter().map(|q| !columns.iter().any(|c| c == q)).collect();
    columns.extend(quantities.iter().zip(&keep).filter(|(_, &k)| k).map(|(q, _)| q.to_string()));

    let rows = (0..n)
        .into_par_iter()
        .map(|flat| {
            // row-major: the last declared range varies fastest
            let mut rem = flat;
            let mut assignment = vec![("", 0.0); axes.len()];
            for (k, (name, vals)) in axes.iter().enumerate().rev() {
                assignment[k] = (*name, vals[rem % vals.len()]);
                rem /= vals.len();
            }
            let point = resolve(spec, &assignment);
            let cells = evaluate(spec, &point);
            debug_assert_eq!(cells.values.len(), quantities.len());
            let mut values: Vec<Option<f64>> = assignment.iter().map(|&(_, v)| Some(v)).collect();
            values.extend(cells.values.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(v, _)| v));
            Row {
                values,
                status: cells.status.unwrap_or("ok").to_string(),
            }
        })
        .collect();
    Ok(Table { columns, rows })
}
