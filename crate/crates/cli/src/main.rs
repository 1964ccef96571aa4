use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uscm_core::sweep::validate::{validate, ValidateOptions, CHECKS};
use uscm_core::sweep::{parse_config, preset, run_sweep, write_table, SweepSpec, Target};
use uscm_core::Error;

const EXIT_INVALID_SPEC: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "uscm", version, about = "Virtual-excitation metrology in ultrastrongly coupled light-matter models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every quantity at a single parameter point.
    Eval(Common),
    /// Sweep a custom grid of parameters.
    Sweep(Common),
    /// Regenerate figure data from a preset grid.
    Figure {
        /// fig2, figs1, figs2 or figs3
        figure: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run every analytic-vs-oracle check and print a report.
    Validate(ValidateArgs),
}

#[derive(Args, Default)]
struct Common {
    /// key = value file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long = "Omega")]
    omega_big: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "xi-r", allow_hyphen_values = true)]
    xi_r: Option<f64>,
    /// tracked or fixed
    #[arg(long)]
    convention: Option<String>,
    /// NAME:START:STOP:COUNT[:log]; repeatable, replaces preset/config ranges
    #[arg(long = "range", allow_hyphen_values = true)]
    ranges: Vec<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the generation-time header line
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Override a tolerance, NAME=VALUE; repeatable
    #[arg(long = "tol")]
    tolerances: Vec<String>,
    /// Vacuum quadrature variance used to build analytic states (¼ is correct)
    #[arg(long, default_value_t = uscm_core::gaussian::VACUUM_VARIANCE)]
    vacuum_variance: f64,
    /// Skip the Fock-space diagonalizations
    #[arg(long)]
    quick: bool,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
}

enum Failure {
    Spec(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => Failure::Io(m),
            other => Failure::Spec(other.to_string()),
        }
    }
}

impl Common {
    /// Applies config-file entries, then flags, on top of `spec`.
    fn apply(&self, spec: &mut SweepSpec) -> Result<(), Failure> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let entries = parse_config(&text)?;
            if entries.iter().any(|(k, _)| k == "range") {
                spec.ranges.clear();
            }
            for (k, v) in entries {
                spec.set(&k, &v)?;
            }
        }
        let mut flags: Vec<(&str, String)> = Vec::new();
        let mut num = |k: &'static str, v: Option<f64>| {
            if let Some(v) = v {
                flags.push((k, format!("{v:?}")));
            }
        };
        num("omega", self.omega);
        num("Omega", self.omega_big);
        num("g", self.g);
        num("kappa", self.kappa);
        num("eta", self.eta);
        num("delta", self.delta);
        num("t", self.t);
        num("alpha", self.alpha);
        num("xi_r", self.xi_r);
        for (k, v) in [("model", &self.model), ("convention", &self.convention), ("format", &self.format)] {
            if let Some(v) = v {
                flags.push((k, v.clone()));
            }
        }
        for (k, v) in flags {
            spec.set(k, &v)?;
        }
        if !self.ranges.is_empty() {
            spec.ranges.clear();
            for r in &self.ranges {
                spec.set("range", r)?;
            }
        }
        if let Some(out) = &self.out {
            spec.output = Some(out.clone());
        }
        if self.no_timestamp {
            spec.timestamp = false;
        }
        spec.validate()?;
        Ok(())
    }
}

fn write_output(spec: &SweepSpec) -> Result<(), Failure> {
    let table = run_sweep(spec)?;
    let failed = table.rows.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        log::warn!("{failed} of {} points could not be fully evaluated", table.rows.len());
    }
    match &spec.output {
        Some(path) => {
            let f = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            write_table(&mut w, &table, spec, spec.format, spec.timestamp)?;
            w.flush().map_err(|e| Failure::Io(e.to_string()))?;
        }
        None => {
            let mut buf = Vec::new();
            write_table(&mut buf, &table, spec, spec.format, spec.timestamp)?;
            match io::stdout().lock().write_all(&buf) {
                // reader went away (e.g. `| head`)
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                r => r.map_err(|e| Failure::Io(e.to_string()))?,
            }
        }
    }
    Ok(())
}

fn eval(common: &Common) -> Result<(), Failure> {
    if !common.ranges.is_empty() {
        return Err(Failure::Spec("eval takes no --range; use `sweep`".into()));
    }
    let mut spec = SweepSpec::custom(uscm_core::sweep::Model::Dicke, Vec::new());
    common.apply(&mut spec)?;
    if !spec.ranges.is_empty() {
        return Err(Failure::Spec("eval takes no ranges; use `sweep`".into()));
    }
    let table = run_sweep(&spec)?;
    let row = &table.rows[0];
    let mut out = io::stdout().lock();
    let io_err = |e: io::Error| Failure::Io(e.to_string());
    for (name, v) in table.columns.iter().zip(&row.values) {
        match v {
            Some(v) => writeln!(out, "{name} = {v:?}").map_err(io_err)?,
            None => writeln!(out, "{name} = -").map_err(io_err)?,
        }
    }
    writeln!(out, "status = {}", row.status).map_err(io_err)?;
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> Result<bool, Failure> {
    let mut opts = ValidateOptions {
        vacuum_variance: args.vacuum_variance,
        quick: args.quick,
        ..Default::default()
    };
    for t in &args.tolerances {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Failure::Spec(format!("--tol expects NAME=VALUE, got '{t}'")))?;
        let k = k.trim();
        if !CHECKS.iter().any(|(n, _)| *n == k) {
            return Err(Failure::Spec(format!("unknown check '{k}'")));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Spec(format!("--tol {k}: '{v}' is not a number")))?;
        opts.tolerances.insert(k.to_string(), v);
    }
    let report = validate(&opts);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?);
    } else {
        println!("{report}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID_SPEC)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Eval(c) => eval(c).map(|_| true),
        Command::Sweep(c) => {
            let mut spec = SweepSpec::custom(uscm_core::sweep::Model::Dicke, Vec::new());
            c.apply(&mut spec).and_then(|_| {
                if spec.ranges.is_empty() {
                    return Err(Failure::Spec("sweep needs at least one --range".into()));
                }
                write_output(&spec)
            })
        }
        .map(|_| true),
        Command::Figure { figure, common } => figure
            .parse::<Target>()
            .map_err(Failure::from)
            .and_then(|t| {
                if t == Target::Custom {
                    return Err(Failure::Spec("figure must be one of fig2, figs1, figs2, figs3".into()));
                }
                let mut spec = preset(t)?;
                common.apply(&mut spec)?;
                write_output(&spec)
            })
            .map(|_| true),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VALIDATION),
        Err(Failure::Spec(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INVALID_SPEC)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
