//! `optokerr` command-line front end.
//!
//! Exit codes: 0 success, 1 failed inequality under `--strict`,
//! 2 configuration error, 3 numerical failure.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use optokerr::effective::{
    kerr_coefficients, params_comment, sweep, validity_report, write_sweep_csv, SweepAxis,
    ValidityThresholds, COEFFICIENT_NAMES,
};
use optokerr::experiments::{
    convergence_scan_with_cap, csv_to_jsonlines, reference_file_params, run_evolve, run_experiment,
    to_internal, write_files, ExperimentConfig, ExperimentId, ExperimentOutput, OutputFile,
    DEFAULT_DIMENSION_CAP, FIG4_SMOKE_DIMS,
};
use optokerr::units::{
    from_pi_units, khz_linear_to_pi_units, pi_units_to_khz_linear, temperature_for_occupation,
    thermal_occupation, tidy, to_pi_units,
};
use optokerr::{Error, UNIT_CONVENTION};

/// Appended to every `--help`; must contain [`UNIT_CONVENTION`].
const UNITS_HELP: &str = "Units: angular, pi*krad/s. Every frequency in configuration files, flags and \
outputs is a multiple of pi krad/s (400 kHz linear = 800); times are in ms; N and n_th are plain numbers.";

#[derive(Parser, Debug)]
#[command(name = "optokerr", version, about = "Atom-enhanced Kerr coefficients and optomechanical dynamics", after_help = UNITS_HELP)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Output encoding; both carry the same numbers.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonlines,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the derived coefficients for one parameter point.
    #[command(after_help = UNITS_HELP)]
    Coeffs(Common),
    /// Sweep one parameter and tabulate the coefficients.
    #[command(after_help = UNITS_HELP)]
    Sweep(SweepArgs),
    /// Check the approximation inequalities.
    #[command(after_help = UNITS_HELP)]
    Validate(ValidateArgs),
    /// Run one evolution described by a configuration file.
    #[command(after_help = UNITS_HELP)]
    Evolve(RunArgs),
    /// Reproduce a figure: fig2a, fig2b, fig3a, fig3b, fig4a or fig4b.
    #[command(after_help = UNITS_HELP)]
    Reproduce(ReproduceArgs),
    /// Rerun a dynamics experiment at scaled truncations.
    #[command(after_help = UNITS_HELP)]
    Converge(ConvergeArgs),
    /// Convert frequencies, or thermal occupation and temperature.
    #[command(after_help = UNITS_HELP)]
    Units(UnitsArgs),
}

/// Configuration file, typed parameter flags and generic `--set` overrides,
/// applied in that order.
#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    g1: Option<f64>,
    #[arg(long)]
    g2: Option<f64>,
    #[arg(long = "Omega")]
    omega: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "Delta")]
    big_delta: Option<f64>,
    /// Number of atoms.
    #[arg(long = "N")]
    atoms: Option<u32>,
    #[arg(long = "G")]
    g_om: Option<f64>,
    #[arg(long = "omega_m")]
    omega_m: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    kappa1: Option<f64>,
    #[arg(long)]
    kappa2: Option<f64>,
    #[arg(long = "gamma_m")]
    gamma_m: Option<f64>,
    #[arg(long = "n_th")]
    n_th: Option<f64>,
    /// Any configuration key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let typed: [(&str, Option<f64>); 15] = [
            ("g1", self.g1),
            ("g2", self.g2),
            ("Omega", self.omega),
            ("delta", self.delta),
            ("Delta", self.big_delta),
            ("N", self.atoms.map(f64::from)),
            ("G", self.g_om),
            ("omega_m", self.omega_m),
            ("d", self.d),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("gamma_m", self.gamma_m),
            ("n_th", self.n_th),
        ];
        for (k, v) in typed {
            if let Some(v) = v {
                cfg.set(k, &v.to_string())?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
                key: kv.clone(),
                reason: "expected KEY=VALUE".into(),
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    fn params_only(&self) -> Result<optokerr::effective::SystemParams<f64>, Error> {
        let cfg = self.load()?;
        let rest = ExperimentConfig {
            params: Vec::new(),
            ..cfg.clone()
        };
        if let Some(line) = rest.to_text().lines().next() {
            let key = line.split('=').next().unwrap_or(line).trim().to_string();
            return Err(Error::Config {
                key,
                reason: "only physical parameters apply here".into(),
            });
        }
        Ok(to_internal(&cfg.file_params(&reference_file_params())?))
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Swept parameter: N, d, Omega, delta or Delta.
    #[arg(long)]
    axis: SweepAxis,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Exit with status 1 if any inequality fails.
    #[arg(long)]
    strict: bool,
    /// Ratio that "much greater than" demands.
    #[arg(long, default_value_t = 10.0)]
    ratio: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// fig2a, fig2b, fig3a, fig3b, fig4a or fig4b.
    experiment: String,
    #[command(flatten)]
    run: RunArgs,
    /// Fig. 4 at the reduced truncation (6, 4, 16) unless dims are given.
    #[arg(long)]
    smoke: bool,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Dynamics experiment to scan (or `convergence.base` in the config).
    #[arg(long)]
    base: Option<String>,
    /// Comma-separated dimension multipliers.
    #[arg(long)]
    multipliers: Option<String>,
    /// Comma-separated modes to scale (c1, c2, b); all if absent.
    #[arg(long)]
    modes: Option<String>,
    /// Largest total dimension allowed.
    #[arg(long, default_value_t = DEFAULT_DIMENSION_CAP)]
    cap: usize,
    /// Lift the dimension cap entirely.
    #[arg(long)]
    allow_large_dims: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FreqUnit {
    #[value(name = "pi-krad/s")]
    PiKrad,
    #[value(name = "krad/s")]
    Krad,
    #[value(name = "kHz-linear")]
    KhzLinear,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["from_pi_krad_s", "from_krad_s", "from_khz_linear", "temperature_uk", "n_th"])))]
struct UnitsArgs {
    #[arg(long = "from-pi-krad-s")]
    from_pi_krad_s: Option<f64>,
    #[arg(long = "from-krad-s")]
    from_krad_s: Option<f64>,
    #[arg(long = "from-kHz-linear")]
    from_khz_linear: Option<f64>,
    /// Target unit of a frequency conversion.
    #[arg(long, value_enum, default_value_t = FreqUnit::PiKrad)]
    to: FreqUnit,
    /// Bath temperature in microkelvin; prints n_th at --omega-m.
    #[arg(long = "temperature-uK")]
    temperature_uk: Option<f64>,
    /// Thermal occupation; prints the temperature in microkelvin at --omega-m.
    #[arg(long = "n-th")]
    n_th: Option<f64>,
    /// Mechanical frequency, multiples of pi krad/s.
    #[arg(long = "omega-m", default_value_t = 800.0)]
    omega_m: f64,
}

/// Failure carrying its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::SingularDetuning(_)
            | Error::UndefinedRotation
            | Error::ResonanceSingularity { .. }
            | Error::ThetaInconsistent { .. }
            | Error::TraceDrift { .. }
            | Error::Divergence { .. }
            | Error::StepUnderflow { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn emit(text: &str, format: Format) -> String {
    match format {
        Format::Csv => text.to_string(),
        Format::Jsonlines => csv_to_jsonlines(text),
    }
}

fn print(text: &str, format: Format) {
    print!("{}", emit(text, format));
}

fn encode_files(files: &[OutputFile], format: Format) -> Vec<OutputFile> {
    files
        .iter()
        .map(|f| match (format, f.name.strip_suffix(".csv")) {
            (Format::Jsonlines, Some(stem)) => {
                OutputFile::new(&format!("{stem}.jsonl"), csv_to_jsonlines(&f.contents))
            }
            _ => f.clone(),
        })
        .collect()
}

fn write_run(out: &ExperimentOutput, dir: &Path, format: Format) -> Result<(), Failure> {
    for path in write_files(dir, &encode_files(&out.files, format))? {
        println!("{}", path.display());
    }
    Ok(())
}

fn coeffs(args: &Common, format: Format) -> Result<(), Failure> {
    let p = args.params_only()?;
    let dc = kerr_coefficients(&p)?;
    let mut s = String::new();
    let _ = writeln!(s, "# params: {}", params_comment(&p));
    let _ = writeln!(
        s,
        "# units: {UNIT_CONVENTION}; theta in rad; Delta_tilde in (pi*krad/s)^2"
    );
    s.push_str("name,value\n");
    for (name, v) in COEFFICIENT_NAMES
        .iter()
        .zip(optokerr::effective::coefficients_in_file_units(&dc))
    {
        let _ = writeln!(s, "{name},{v}");
    }
    print(&s, format);
    Ok(())
}

fn run_sweep(args: &SweepArgs, format: Format) -> Result<(), Failure> {
    let p = args.common.params_only()?;
    if args.points < 1 {
        return Err(Error::EmptyGrid.into());
    }
    let key = args.axis.key();
    if args.axis == SweepAxis::Atoms && (args.from.fract() != 0.0 || args.to.fract() != 0.0) {
        return Err(Error::Config {
            key: key.into(),
            reason: "atom-number grid ends must be integers".into(),
        }
        .into());
    }
    let convert = |x: f64| {
        if args.axis.is_frequency() {
            from_pi_units(x)
        } else {
            x
        }
    };
    let grid: Vec<f64> = (0..args.points)
        .map(|k| {
            let t = if args.points == 1 {
                0.0
            } else {
                k as f64 / (args.points - 1) as f64
            };
            let x = args.from + (args.to - args.from) * t;
            convert(if args.axis == SweepAxis::Atoms {
                x.round()
            } else {
                x
            })
        })
        .collect();
    let rows = sweep(&p, args.axis, &grid)?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &p, args.axis, &rows)?;
    let text = emit(&String::from_utf8(buf).expect("utf-8"), format);
    match &args.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            println!("{}", path.display());
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn validate(args: &ValidateArgs, format: Format) -> Result<(), Failure> {
    if !(args.ratio > 0.0) {
        return Err(Error::Config {
            key: "ratio".into(),
            reason: "must be positive".into(),
        }
        .into());
    }
    let p = args.common.params_only()?;
    let report = validity_report(
        &p,
        &ValidityThresholds {
            much_greater: args.ratio,
        },
    );
    let mut s = String::new();
    let _ = writeln!(s, "# params: {}", params_comment(&p));
    let _ = writeln!(s, "# units: {UNIT_CONVENTION}");
    s.push_str("inequality,lhs,rhs,pass\n");
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            e.name,
            to_pi_units(e.lhs),
            to_pi_units(e.rhs),
            e.passes()
        );
    }
    print(&s, format);
    if args.strict && !report.all_pass() {
        let names: Vec<&str> = report.failures().map(|e| e.name.as_str()).collect();
        return Err(Failure {
            code: 1,
            message: format!("failed inequalities: {}", names.join("; ")),
        });
    }
    Ok(())
}

fn reproduce(args: &ReproduceArgs, format: Format) -> Result<(), Failure> {
    let id: ExperimentId = args.experiment.parse()?;
    if id == ExperimentId::Convergence {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: "use the converge subcommand".into(),
        }
        .into());
    }
    let mut cfg = args.run.common.load()?;
    if let Some(other) = cfg.experiment.filter(|&e| e != id) {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("config names {other}, requested {id}"),
        }
        .into());
    }
    cfg.experiment = Some(id);
    if args.smoke {
        if !matches!(id, ExperimentId::Fig4a | ExperimentId::Fig4b) {
            return Err(Error::Config {
                key: "smoke".into(),
                reason: format!("{id} has no smoke variant"),
            }
            .into());
        }
        for m in 0..3 {
            cfg.dims[m].get_or_insert(FIG4_SMOKE_DIMS[m]);
        }
    }
    let out = run_experiment(&cfg)?;
    write_run(&out, &args.run.out, format)
}

fn converge(args: &ConvergeArgs, format: Format) -> Result<(), Failure> {
    let mut cfg = args.run.common.load()?;
    if let Some(id) = cfg.experiment.filter(|&e| e != ExperimentId::Convergence) {
        return Err(Error::Config {
            key: "experiment".into(),
            reason: format!("config names {id}; use convergence.base"),
        }
        .into());
    }
    cfg.experiment = Some(ExperimentId::Convergence);
    if let Some(b) = &args.base {
        cfg.set("convergence.base", b)?;
    }
    if let Some(m) = &args.multipliers {
        cfg.set("convergence.multipliers", m)?;
    }
    if let Some(m) = &args.modes {
        cfg.set("convergence.modes", m)?;
    }
    let cap = if args.allow_large_dims {
        usize::MAX
    } else {
        args.cap
    };
    let out = convergence_scan_with_cap(&cfg, cap)?;
    write_run(&out, &args.run.out, format)
}

fn evolve(args: &RunArgs, format: Format) -> Result<(), Failure> {
    if args.common.config.is_none() {
        return Err(Error::Config {
            key: "config".into(),
            reason: "evolve needs --config".into(),
        }
        .into());
    }
    let out = run_evolve(&args.common.load()?)?;
    write_run(&out, &args.out, format)
}

fn units(args: &UnitsArgs) -> Result<(), Failure> {
    let omega_m = from_pi_units(args.omega_m);
    if let Some(t_uk) = args.temperature_uk {
        println!("{}", thermal_occupation(omega_m, t_uk * 1e-6));
        return Ok(());
    }
    if let Some(n) = args.n_th {
        println!("{}", temperature_for_occupation(omega_m, n) * 1e6);
        return Ok(());
    }
    let pi_units = match (args.from_pi_krad_s, args.from_krad_s, args.from_khz_linear) {
        (Some(x), None, None) => x,
        (None, Some(x), None) => to_pi_units(x),
        (None, None, Some(x)) => khz_linear_to_pi_units(x),
        _ => unreachable!("clap group admits one input"),
    };
    let value = match args.to {
        FreqUnit::PiKrad => pi_units,
        FreqUnit::Krad => from_pi_units(pi_units),
        FreqUnit::KhzLinear => pi_units_to_khz_linear(pi_units),
    };
    println!("{}", tidy(value));
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Coeffs(a) => coeffs(a, cli.format),
        Command::Sweep(a) => run_sweep(a, cli.format),
        Command::Validate(a) => validate(a, cli.format),
        Command::Evolve(a) => evolve(a, cli.format),
        Command::Reproduce(a) => reproduce(a, cli.format),
        Command::Converge(a) => converge(a, cli.format),
        Command::Units(a) => units(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
