//! Command-line front end. Exit codes: 0 success, 1 a check failed,
//! 2 configuration or usage error.

pub mod recipes;

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::dj::{function_by_name, run_dj, DjOptions};
use crate::error::{Error, Result};
use crate::gates::{run_gate, verify_all_gates, GateSpec, InitialState};
use crate::pulse::PHASE_Y;
use crate::spectrum::{self, read_spectrum, ExportFormat};
use crate::spin::{builtin_names, load_molecule, BasisState, DensityMatrix, SpinSystem};
use crate::state_prep::{ppure_sequence, PpureScheme};

pub use recipes::{recipe_names, run_recipe, RealizationMode, RecipeReport, RunOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spinsel", version, about = "Selective-pulse NMR quantum logic simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prepare a pseudo-pure state and read its spectrum.
    Ppure(PpureArgs),
    /// Compile and run a logic gate, or verify every gate.
    Gate(GateArgs),
    /// Run one Deutsch-Jozsa oracle.
    Dj(DjArgs),
    /// Run a named recipe and write its artifacts.
    Run(RunArgs),
    /// Run every recipe, each into its own subdirectory.
    VerifyAll(VerifyAllArgs),
    /// List recipes and built-in molecules.
    List,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RealizationArg {
    Ideal,
    Soft,
}

impl From<RealizationArg> for RealizationMode {
    fn from(r: RealizationArg) -> Self {
        match r {
            RealizationArg::Ideal => RealizationMode::Ideal,
            RealizationArg::Soft => RealizationMode::Soft,
        }
    }
}

#[derive(Debug, Args)]
pub struct PpureArgs {
    /// sq, dq-sq or sq-zq.
    #[arg(long, default_value = "sq")]
    pub method: String,
    /// Spin whose state labels the pseudo-pure blocks.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value = "benzofurazan-3spin")]
    pub molecule: String,
    /// Read pulse angle in degrees.
    #[arg(long, default_value_t = 10.0)]
    pub read_angle: f64,
    #[arg(long, value_enum, default_value = "ideal")]
    pub realization: RealizationArg,
    /// Soft-pulse rf amplitude in Hz.
    #[arg(long, default_value_t = 1.9)]
    pub b1: f64,
    /// Soft-pulse integration step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Spectrum file; format from the extension (.csv, .json, .svg).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GateArgs {
    /// Gate name or product such as `NOT1*SWAP`.
    #[arg(long, required_unless_present = "verify_all")]
    pub name: Option<String>,
    /// `thermal`, a basis state such as `01`, or `pops:a,b,c,d`.
    #[arg(long, default_value = "thermal")]
    pub input: String,
    #[arg(long, default_value = "coumarin-2spin")]
    pub molecule: String,
    #[arg(long, default_value_t = 10.0)]
    pub read_angle: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check every gate's pulse program against its truth table.
    #[arg(long)]
    pub verify_all: bool,
}

#[derive(Debug, Args)]
pub struct DjArgs {
    #[arg(long, default_value = "nitrofuraldehyde-2spin")]
    pub molecule: String,
    /// f1..f4 for two spins, f1..f8 for three.
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 0.0)]
    pub read_angle: f64,
    #[arg(long, overrides_with = "no_cycle")]
    pub cycle: bool,
    #[arg(long)]
    pub no_cycle: bool,
    /// Result file (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub recipe: String,
    #[command(flatten)]
    pub common: CommonRunArgs,
}

#[derive(Debug, Args, Default)]
pub struct CommonRunArgs {
    #[arg(long)]
    pub molecule: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Degrees; defaults to 10, or 0 for Deutsch-Jozsa recipes.
    #[arg(long)]
    pub read_angle: Option<f64>,
    #[arg(long, overrides_with = "no_cycle")]
    pub cycle: bool,
    #[arg(long)]
    pub no_cycle: bool,
    #[arg(long, value_enum)]
    pub realization: Option<RealizationArg>,
    #[arg(long)]
    pub b1: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Label spin for the pseudo-pure recipes.
    #[arg(long)]
    pub label: Option<String>,
    /// JSON file of option overrides; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyAllArgs {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub common: CommonRunArgs,
}

/// File form of the `run` options.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub molecule: Option<String>,
    pub out: Option<PathBuf>,
    pub read_angle: Option<f64>,
    pub cycle: Option<bool>,
    pub realization: Option<RealizationMode>,
    pub b1: Option<f64>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub label: Option<String>,
}

impl CommonRunArgs {
    pub fn options(&self, default_out: &Path) -> Result<RunOptions> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                serde_json::from_str::<ConfigFile>(&text)?
            }
            None => ConfigFile::default(),
        };
        let d = RunOptions::default();
        let cycle = if self.no_cycle {
            false
        } else if self.cycle {
            true
        } else {
            file.cycle.unwrap_or(d.cycle)
        };
        let opts = RunOptions {
            molecule: self.molecule.clone().or(file.molecule),
            out: self
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| default_out.to_path_buf()),
            read_angle: self.read_angle.or(file.read_angle),
            cycle,
            realization: self
                .realization
                .map(Into::into)
                .or(file.realization)
                .unwrap_or(d.realization),
            b1_hz: self.b1.or(file.b1).unwrap_or(d.b1_hz),
            dt_s: self.dt.or(file.dt),
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
            label: self.label.clone().or(file.label),
        };
        if opts.b1_hz <= 0.0 || !opts.b1_hz.is_finite() {
            return Err(Error::Config(format!("b1 must be positive, got {}", opts.b1_hz)));
        }
        Ok(opts)
    }
}

/// Parses the initial-state syntax accepted by `gate --input`.
pub fn parse_input(system: &SpinSystem, text: &str) -> Result<InitialState> {
    if text == "thermal" {
        return Ok(InitialState::Thermal);
    }
    if let Some(list) = text.strip_prefix("pops:") {
        let values = list
            .split(',')
            .map(|v| f64::from_str(v.trim()).map_err(|_| Error::Config(format!("bad population `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != system.dim() {
            return Err(Error::DimensionMismatch {
                expected: system.dim(),
                found: values.len(),
            });
        }
        return Ok(InitialState::Custom(DensityMatrix::from_populations(&values)));
    }
    let state = BasisState::parse(text)?;
    if state.n_spins != system.n_spins() {
        return Err(Error::InvalidBasisState(text.to_string()));
    }
    Ok(InitialState::PseudoPure(state.index))
}

fn load(spec: &str) -> Result<SpinSystem> {
    load_molecule(spec)?.build()
}

fn export_to(spectrum: &crate::spectrum::StickSpectrum, path: &Path) -> Result<()> {
    let fmt = ExportFormat::from_path(path)?;
    spectrum::export(spectrum, fmt, path)?;
    if fmt == ExportFormat::Svg {
        spectrum::export(spectrum, ExportFormat::Csv, &path.with_extension("csv"))?;
    }
    Ok(())
}

fn ppure(args: &PpureArgs) -> Result<i32> {
    let system = load(&args.molecule)?;
    let scheme: PpureScheme = args.method.parse()?;
    let label = match &args.label {
        Some(l) => system.spin_index(l)?,
        None => 0,
    };
    let mut seq = ppure_sequence(&system, scheme, label)?;
    if let RealizationArg::Soft = args.realization {
        seq = seq.realize_soft(&system, args.b1, args.dt)?;
    }
    let rho = crate::pulse::apply_sequence(&system, &crate::spin::thermal_deviation(&system), &seq)?;
    let pops = rho.populations();
    println!("{seq}");
    for (k, p) in pops.iter().enumerate() {
        println!("{}  {p:+.6}", BasisState::new(k, system.n_spins())?);
    }
    let spectrum = read_spectrum(&system, &rho, args.read_angle.to_radians(), PHASE_Y, None)?;
    if let Some(out) = &args.out {
        export_to(&spectrum, out)?;
    }
    Ok(EXIT_OK)
}

fn gate(args: &GateArgs) -> Result<i32> {
    let system = load(&args.molecule)?;
    if args.verify_all {
        let checks = verify_all_gates(&system)?;
        let mut ok = true;
        for c in &checks {
            ok &= c.passed();
            let status = if c.passed() { "PASS" } else { "FAIL" };
            match &c.error {
                Some(e) => println!("{status} {:<14} {e}", c.gate),
                None => println!(
                    "{status} {:<14} {} pulses, permutation {:?}",
                    c.gate, c.pulses, c.permutation
                ),
            }
        }
        return Ok(if ok { EXIT_OK } else { EXIT_FAILED });
    }
    let name = args
        .name
        .as_deref()
        .ok_or_else(|| Error::Config("--name is required".into()))?;
    let spec: GateSpec = name.parse()?;
    let initial = parse_input(&system, &args.input)?;
    let run = run_gate(&system, &spec, &initial, args.read_angle.to_radians(), None)?;
    println!("{}", run.sequence);
    for (k, p) in run.rho.populations().iter().enumerate() {
        println!("{}  {p:+.6}", BasisState::new(k, system.n_spins())?);
    }
    if let Some(out) = &args.out {
        export_to(&run.spectrum, out)?;
    }
    Ok(EXIT_OK)
}

fn dj(args: &DjArgs) -> Result<i32> {
    let system = load(&args.molecule)?;
    let n_inputs = system.n_spins() - 1;
    let f = function_by_name(n_inputs, &args.function)?;
    let opts = DjOptions {
        read_angle: args.read_angle.to_radians(),
        cycle: !args.no_cycle,
    };
    let result = run_dj(&system, &f, opts)?;
    println!(
        "{} {} -> {} (expected {}), margin {:.3e}",
        result.function, result.table, result.class, result.expected, result.margin
    );
    for (label, v, r) in &result.classification.integrals {
        println!("  {label}: {v:.3e} (reference {r:.3e})");
    }
    if let Some(out) = &args.out {
        recipes::write_text(out, &serde_json::to_string_pretty(&result)?)?;
    }
    Ok(if result.correct() { EXIT_OK } else { EXIT_FAILED })
}

fn run(args: &RunArgs) -> Result<i32> {
    let opts = args
        .common
        .options(&PathBuf::from(format!("spinsel-out/{}", args.recipe)))?;
    let report = run_recipe(&args.recipe, &opts)?;
    print!("{}", report.render());
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn verify_all(args: &VerifyAllArgs) -> Result<i32> {
    let base = args.common.options(Path::new("spinsel-out"))?;
    let names = recipe_names();
    let job = |name: &String| {
        let mut opts = base.clone();
        opts.out = base.out.join(name);
        run_recipe(name, &opts)
    };
    let reports = run_jobs(args.jobs, &names, job)?;
    let mut all = true;
    for r in &reports {
        print!("{}", r.render());
    }
    println!("\n{:<12} {:<26} {:>6} status", "recipe", "molecule", "checks");
    for r in &reports {
        all &= r.passed();
        println!(
            "{:<12} {:<26} {:>6} {}",
            r.recipe,
            r.molecule,
            r.checks.len(),
            if r.passed() { "PASS" } else { "FAIL" }
        );
    }
    Ok(if all { EXIT_OK } else { EXIT_FAILED })
}

#[cfg(feature = "parallel")]
fn run_jobs<F>(jobs: usize, names: &[String], job: F) -> Result<Vec<RecipeReport>>
where
    F: Fn(&String) -> Result<RecipeReport> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| crate::par::try_map(crate::par::Execution::Parallel, names, job))
}

#[cfg(not(feature = "parallel"))]
fn run_jobs<F>(_jobs: usize, names: &[String], job: F) -> Result<Vec<RecipeReport>>
where
    F: Fn(&String) -> Result<RecipeReport> + Sync + Send,
{
    crate::par::try_map(crate::par::Execution::Sequential, names, job)
}

fn list() -> i32 {
    println!("recipes:");
    for r in recipe_names() {
        println!("  {r}");
    }
    println!("molecules:");
    for m in builtin_names() {
        println!("  {m}");
    }
    EXIT_OK
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Ppure(a) => ppure(a),
        Command::Gate(a) => gate(a),
        Command::Dj(a) => dj(a),
        Command::Run(a) => run(a),
        Command::VerifyAll(a) => verify_all(a),
        Command::List => Ok(list()),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
