use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::analytic::dicke::DerivativeConvention;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Fig2,
    FigS1,
    FigS2,
    FigS3,
    Custom,
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig2" => Ok(Target::Fig2),
            "figs1" => Ok(Target::FigS1),
            "figs2" => Ok(Target::FigS2),
            "figs3" => Ok(Target::FigS3),
            "custom" => Ok(Target::Custom),
            other => Err(Error::InvalidSpec(format!("unknown target '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dicke,
    Rabi,
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dicke" => Ok(Model::Dicke),
            "rabi" => Ok(Model::Rabi),
            other => Err(Error::InvalidSpec(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidSpec(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// Parameters that may be swept. The last three are derived: they set `g`
/// (from `g_c = √(ωΩ)`) or `delta` (from `kappa`) after the raw ones.
pub const RAW_PARAMETERS: [&str; 9] = ["omega", "Omega", "g", "kappa", "eta", "delta", "t", "alpha", "xi_r"];
pub const DERIVED_PARAMETERS: [&str; 3] = ["g_over_gc", "one_minus_g_over_gc", "delta_over_kappa"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeSpec {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl RangeSpec {
    pub fn new(name: &str, start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let r = Self {
            name: name.to_string(),
            start,
            stop,
            count,
            spacing,
        };
        r.check()?;
        Ok(r)
    }

    fn check(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidSpec(format!("range '{}' needs count >= 2", self.name)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::InvalidSpec(format!("range '{}' needs start < stop", self.name)));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err(Error::InvalidSpec(format!("log range '{}' needs start > 0", self.name)));
        }
        Ok(())
    }

    /// Grid values with both endpoints hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n {
                    return self.stop;
                }
                let f = i as f64 / n as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * f,
                    Spacing::Log => {
                        let (a, b) = (self.start.log10(), self.stop.log10());
                        10f64.powf(a + (b - a) * f)
                    }
                }
            })
            .collect()
    }
}

impl FromStr for RangeSpec {
    type Err = Error;
    /// `NAME:START:STOP:COUNT[:log]`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidSpec(format!("range '{s}' is not NAME:START:STOP:COUNT[:log]"));
        if !(4..=5).contains(&parts.len()) || parts[0].is_empty() {
            return Err(bad());
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| bad());
        let spacing = match parts.get(4).map(|p| p.trim()) {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(_) => return Err(bad()),
        };
        let count = parts[3].trim().parse::<usize>().map_err(|_| bad())?;
        RangeSpec::new(parts[0].trim(), num(parts[1])?, num(parts[2])?, count, spacing)
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}:{:?}:{}", self.name, self.start, self.stop, self.count)?;
        if self.spacing == Spacing::Log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

/// Values held fixed across a sweep. `omega_big = None` means Ω = ω for the
/// Dicke model and Ω = 10⁴ω for the Rabi model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedParams {
    pub omega: f64,
    pub omega_big: Option<f64>,
    pub g: f64,
    pub kappa: f64,
    pub eta: f64,
    pub delta: f64,
    pub t: f64,
    pub alpha: f64,
    pub xi_r: f64,
    #[serde(serialize_with = "convention_name")]
    pub convention: DerivativeConvention,
}

fn convention_name<S: serde::Serializer>(c: &DerivativeConvention, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match c {
        DerivativeConvention::TrackedResonance => "tracked",
        DerivativeConvention::FixedPartner => "fixed",
    })
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega_big: None,
            g: 0.0,
            kappa: 1.0,
            eta: 1.0,
            delta: 0.0,
            t: 1.0,
            alpha: 1.0,
            xi_r: 0.0,
            convention: DerivativeConvention::TrackedResonance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub target: Target,
    pub model: Model,
    pub ranges: Vec<RangeSpec>,
    pub fixed: FixedParams,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub timestamp: bool,
}

impl SweepSpec {
    pub fn custom(model: Model, ranges: Vec<RangeSpec>) -> Self {
        Self {
            target: Target::Custom,
            model,
            ranges,
            fixed: FixedParams::default(),
            format: Format::Csv,
            output: None,
            timestamp: true,
        }
    }

    /// Names a range may use for this spec's target and model.
    pub fn allowed_names(&self) -> &'static [&'static str] {
        match (self.target, self.model) {
            (Target::Fig2 | Target::FigS1, _) | (Target::Custom, Model::Dicke) => &[
                "omega",
                "Omega",
                "g",
                "kappa",
                "eta",
                "delta",
                "t",
                "g_over_gc",
                "one_minus_g_over_gc",
                "delta_over_kappa",
            ],
            (Target::FigS2, _) => &["Omega", "g", "g_over_gc", "one_minus_g_over_gc"],
            (Target::FigS3, _) => &["g_over_gc", "one_minus_g_over_gc", "t", "alpha"],
            (Target::Custom, Model::Rabi) => &[
                "omega",
                "Omega",
                "g",
                "t",
                "alpha",
                "xi_r",
                "g_over_gc",
                "one_minus_g_over_gc",
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let expected_model = match self.target {
            Target::Fig2 | Target::FigS1 => Some(Model::Dicke),
            Target::FigS2 | Target::FigS3 => Some(Model::Rabi),
            Target::Custom => None,
        };
        if let Some(m) = expected_model {
            if m != self.model {
                return Err(Error::InvalidSpec(format!("{:?} is a {:?}-model figure", self.target, m)));
            }
        }
        let allowed = self.allowed_names();
        let mut seen: Vec<&str> = Vec::new();
        for r in &self.ranges {
            r.check()?;
            if !allowed.contains(&r.name.as_str()) {
                return Err(Error::InvalidSpec(format!(
                    "parameter '{}' does not belong to this sweep (allowed: {})",
                    r.name,
                    allowed.join(", ")
                )));
            }
            if seen.contains(&r.name.as_str()) {
                return Err(Error::InvalidSpec(format!("parameter '{}' swept twice", r.name)));
            }
            seen.push(&r.name);
        }
        let coupling = ["g", "g_over_gc", "one_minus_g_over_gc"]
            .iter()
            .filter(|n| seen.contains(n))
            .count();
        if coupling > 1 {
            return Err(Error::InvalidSpec("sweep at most one of g, g_over_gc, one_minus_g_over_gc".into()));
        }
        if seen.contains(&"delta") && seen.contains(&"delta_over_kappa") {
            return Err(Error::InvalidSpec("sweep at most one of delta, delta_over_kappa".into()));
        }
        let f = &self.fixed;
        for (name, v) in [("omega", f.omega), ("kappa", f.kappa), ("t", f.t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be > 0, got {v}")));
            }
        }
        if let Some(w) = f.omega_big {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidSpec(format!("Omega must be > 0, got {w}")));
            }
        }
        for (name, v) in [("g", f.g), ("eta", f.eta), ("alpha", f.alpha)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidSpec(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(f.xi_r <= 0.0) {
            return Err(Error::InvalidSpec(format!("xi_r must be <= 0, got {}", f.xi_r)));
        }
        if !f.delta.is_finite() {
            return Err(Error::InvalidSpec("delta must be finite".into()));
        }
        Ok(())
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|r| r.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sets one `key = value` entry, as used by config files and CLI flags.
    /// `range` entries append.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("{key}: '{value}' is not a number")))
        };
        match key {
            "target" | "figure" => self.target = value.trim().parse()?,
            "model" => self.model = value.trim().parse()?,
            "format" => self.format = value.trim().parse()?,
            "out" | "output" => self.output = Some(PathBuf::from(value.trim())),
            "timestamp" => {
                self.timestamp = match value.trim() {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    v => return Err(Error::InvalidSpec(format!("timestamp: '{v}' is not a boolean"))),
                }
            }
            "no_timestamp" | "no-timestamp" => self.timestamp = false,
            "range" => self.ranges.push(value.trim().parse()?),
            "omega" => self.fixed.omega = num()?,
            "Omega" => self.fixed.omega_big = Some(num()?),
            "g" => self.fixed.g = num()?,
            "kappa" => self.fixed.kappa = num()?,
            "eta" => self.fixed.eta = num()?,
            "delta" => self.fixed.delta = num()?,
            "t" => self.fixed.t = num()?,
            "alpha" => self.fixed.alpha = num()?,
            "xi_r" | "xi-r" => self.fixed.xi_r = num()?,
            "convention" => self.fixed.convention = value.trim().parse()?,
            other => return Err(Error::InvalidSpec(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidSpec(format!("config line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn range(s: &str) -> RangeSpec {
    s.parse().expect("preset ranges are valid")
}

/// Figure presets. Near-threshold axes are log-spaced in `1 - g/g_c`.
pub fn preset(target: Target) -> Result<SweepSpec> {
    let (model, ranges) = match target {
        // δ/κ ∈ [-2, 2] against 1 - g/g_c ∈ [1e-4, 1] (g/g_c from 0 to 0.9999)
        Target::Fig2 => (
            Model::Dicke,
            vec![range("delta_over_kappa:-2:2:41"), range("one_minus_g_over_gc:1e-4:1:41:log")],
        ),
        // amplitude, phase and combined information at g/g_c ∈ {0, 0.9, 0.99, 0.999}
        Target::FigS1 => (
            Model::Dicke,
            vec![range("one_minus_g_over_gc:1e-3:1:4:log"), range("delta_over_kappa:-2:2:81")],
        ),
        // Ω/ω ∈ {100, 1000, 10000} against g/g_c ∈ [0.9, 0.99]
        Target::FigS2 => (
            Model::Rabi,
            vec![range("Omega:100:10000:3:log"), range("one_minus_g_over_gc:1e-2:1e-1:10:log")],
        ),
        // panels at g/g_c = 0.9 and 0.99 over ωt ∈ [0, 4π]
        Target::FigS3 => (
            Model::Rabi,
            vec![
                range("g_over_gc:0.9:0.99:2"),
                RangeSpec::new("t", 0.0, 4.0 * std::f64::consts::PI, 400, Spacing::Linear)?,
            ],
        ),
        Target::Custom => return Err(Error::InvalidSpec("custom sweeps have no preset".into())),
    };
    let mut spec = SweepSpec::custom(model, ranges);
    spec.target = target;
    spec.validate()?;
    Ok(spec)
}
