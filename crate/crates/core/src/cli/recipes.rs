//! One-command runs of the reference experiments. Each recipe
//! writes its artifacts into a directory and returns named checks.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dj::{function_by_name, oracle_permutations, run_dj, DjLayout, DjOptions, FunctionClass};
use crate::error::{Error, Result};
use crate::gates::{compile_gate, ideal_gate, phase_equivalence, Gate, GateSpec};
use crate::linalg;
use crate::pulse::{apply_sequence, sequence_propagator, PulseEvent, PulseSequence, PulseTarget, PHASE_Y};
use crate::spectrum::{self, multiplet_integrals, read_spectrum, ExportFormat, StickSpectrum};
use crate::spin::{
    list_transitions, load_molecule, product_operator_decompose, thermal_deviation, DensityMatrix, SpinSystem,
};
use crate::state_prep::{ppure_sequence, PpureScheme};

pub const EQ1: [f64; 8] = [1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, -1.5];
pub const EQ2: [f64; 8] = [1.5, 0.5, 0.5, 0.5, -1.5, -0.5, -0.5, -0.5];
pub const EQ3: [f64; 8] = [1.5, 0.5, 0.5, 0.5, -0.5, -0.5, -0.5, -1.5];

/// Tolerance on population checks when pulses are realized as soft pulses.
pub const SOFT_TOLERANCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationMode {
    #[default]
    Ideal,
    Soft,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub molecule: Option<String>,
    pub out: PathBuf,
    /// Degrees; `None` takes the recipe default (10°, or 0° for DJ).
    pub read_angle: Option<f64>,
    pub cycle: bool,
    pub realization: RealizationMode,
    pub b1_hz: f64,
    pub dt_s: Option<f64>,
    pub seed: u64,
    pub label: Option<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            molecule: None,
            out: PathBuf::from("spinsel-out"),
            read_angle: None,
            cycle: true,
            realization: RealizationMode::Ideal,
            b1_hz: 1.9,
            dt_s: None,
            seed: 1,
            label: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecipeReport {
    pub recipe: String,
    pub molecule: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl RecipeReport {
    fn new(recipe: &str, molecule: &str) -> Self {
        Self {
            recipe: recipe.to_string(),
            molecule: molecule.to_string(),
            checks: Vec::new(),
            notes: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn render(&self) -> String {
        let mut s = format!("== {} ({})\n", self.recipe, self.molecule);
        for n in &self.notes {
            let _ = writeln!(s, "   {n}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        s
    }
}

pub fn recipe_names() -> Vec<String> {
    let mut names: Vec<String> = ["eq1", "eq2", "eq3", "fig2", "fig3", "fig4", "fig6b", "fig6c", "fig6d"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend((1..=4).map(|k| format!("fig7-{k}")));
    names.extend((1..=8).map(|k| format!("fig8-{k}")));
    names.push("invariants".to_string());
    names
}

fn default_molecule(recipe: &str) -> &'static str {
    match recipe {
        "fig2" => "dibromopropionic-3spin",
        r if r.starts_with("fig8") => "dibromopropionic-3spin",
        r if r.starts_with("fig7") => "nitrofuraldehyde-2spin",
        "fig4" | "fig6b" | "fig6c" | "fig6d" => "coumarin-2spin",
        _ => "benzofurazan-3spin",
    }
}

struct Ctx<'a> {
    system: SpinSystem,
    opts: &'a RunOptions,
    dir: &'a Path,
    report: RecipeReport,
}

impl Ctx<'_> {
    fn read_angle(&self, default_deg: f64) -> f64 {
        self.opts.read_angle.unwrap_or(default_deg).to_radians()
    }

    fn realize(&self, seq: PulseSequence) -> Result<PulseSequence> {
        match self.opts.realization {
            RealizationMode::Ideal => Ok(seq),
            RealizationMode::Soft => seq.realize_soft(&self.system, self.opts.b1_hz, self.opts.dt_s),
        }
    }

    fn tolerance(&self) -> f64 {
        match self.opts.realization {
            RealizationMode::Ideal => 1e-12,
            RealizationMode::Soft => SOFT_TOLERANCE,
        }
    }

    fn write_spectrum(&mut self, stem: &str, s: &StickSpectrum) -> Result<()> {
        for fmt in [ExportFormat::Csv, ExportFormat::Json, ExportFormat::Svg] {
            let ext = match fmt {
                ExportFormat::Csv => "csv",
                ExportFormat::Json => "json",
                ExportFormat::Svg => "svg",
            };
            let file = format!("{stem}.{ext}");
            spectrum::export(s, fmt, &self.dir.join(&file))?;
            self.report.files.push(file);
        }
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        write_text(&self.dir.join(name), &serde_json::to_string_pretty(value)?)?;
        self.report.files.push(name.to_string());
        Ok(())
    }

    fn label_spin(&self) -> Result<usize> {
        match &self.opts.label {
            Some(l) => self.system.spin_index(l),
            None => Ok(0),
        }
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:+.4}")).collect();
    format!("({})", parts.join(", "))
}

/// Runs `name` and writes its artifacts into `opts.out`.
pub fn run_recipe(name: &str, opts: &RunOptions) -> Result<RecipeReport> {
    if !recipe_names().iter().any(|n| n == name) {
        return Err(Error::Config(format!("unknown recipe `{name}`; try `spinsel list`")));
    }
    let molecule = opts
        .molecule
        .clone()
        .unwrap_or_else(|| default_molecule(name).to_string());
    let system = load_molecule(&molecule)?.build()?;
    std::fs::create_dir_all(&opts.out).map_err(|source| Error::Io {
        path: opts.out.display().to_string(),
        source,
    })?;
    let mut ctx = Ctx {
        report: RecipeReport::new(name, system.name()),
        system,
        opts,
        dir: &opts.out,
    };
    match name {
        "eq1" => ppure(&mut ctx, PpureScheme::Sq, &EQ1)?,
        "eq2" => ppure(&mut ctx, PpureScheme::DqSq, &EQ2)?,
        "eq3" => ppure(&mut ctx, PpureScheme::SqZq, &EQ3)?,
        "fig2" => fig2(&mut ctx)?,
        "fig3" => fig3(&mut ctx)?,
        "fig4" => fig4(&mut ctx)?,
        "fig6b" => gate_recipe(&mut ctx, Gate::XorSwapNot)?,
        "fig6c" => gate_recipe(&mut ctx, Gate::XnorSwapNot)?,
        "fig6d" => gate_recipe(&mut ctx, Gate::NotSwap)?,
        "invariants" => invariants(&mut ctx)?,
        r if r.starts_with("fig7-") => dj_recipe(&mut ctx, 1, &r[5..])?,
        r if r.starts_with("fig8-") => dj_recipe(&mut ctx, 2, &r[5..])?,
        _ => unreachable!("checked above"),
    }
    ctx.report.files.push("report.json".to_string());
    let report = ctx.report.clone();
    write_text(&ctx.dir.join("report.json"), &serde_json::to_string_pretty(&report)?)?;
    Ok(ctx.report)
}

fn prepared(ctx: &Ctx, scheme: PpureScheme) -> Result<DensityMatrix> {
    let seq = ctx.realize(ppure_sequence(&ctx.system, scheme, ctx.label_spin()?)?)?;
    apply_sequence(&ctx.system, &thermal_deviation(&ctx.system), &seq)
}

fn ppure(ctx: &mut Ctx, scheme: PpureScheme, expected: &[f64; 8]) -> Result<()> {
    let rho = prepared(ctx, scheme)?;
    let pops = rho.populations();
    ctx.report.notes.push(format!("populations {}", fmt_vec(&pops)));
    let tol = ctx.tolerance();
    if ctx.label_spin()? == 0 {
        let d = max_diff(&pops, expected);
        ctx.report.check(
            "population table",
            d <= tol,
            format!("max deviation {d:.2e} (tol {tol:.0e})"),
        );
    } else {
        ctx.report
            .notes
            .push("non-default label spin: table comparison skipped".into());
    }
    if scheme == PpureScheme::Sq {
        let exp = product_operator_decompose(&ctx.system, rho.matrix())?;
        let sig = exp.significant(1e-9);
        let labels = ctx.system.labels();
        let want = [
            format!("{}z", labels[1]),
            format!("{}z", labels[2]),
            format!("4{}z{}z{}z", labels[0], labels[1], labels[2]),
        ];
        let mut worst: f64 = 0.0;
        for (label, c) in exp.coefficients() {
            let target = if want.contains(&label) { 1.0 } else { 0.0 };
            worst = worst.max((c - target).abs());
        }
        if ctx.label_spin()? == 0 {
            ctx.report.check(
                "product operators",
                worst <= tol,
                format!("{sig:?}, max deviation {worst:.2e}"),
            );
        }
        ctx.write_json("product_operators.json", &exp.coefficients())?;
    }
    ctx.write_json(
        "populations.json",
        &serde_json::json!({ "values": pops, "expected": expected }),
    )?;
    let s = read_spectrum(&ctx.system, &rho, ctx.read_angle(10.0), PHASE_Y, None)?;
    ctx.write_spectrum("spectrum", &s)
}

/// Magnitudes of `spin`'s multiplet in ascending frequency.
fn pattern(s: &StickSpectrum, spin: &str) -> Vec<f64> {
    multiplet_integrals(s, spin).magnitudes
}

fn fig2(ctx: &mut Ctx) -> Result<()> {
    ppure(ctx, PpureScheme::Sq, &EQ1)?;
    let rho = prepared(ctx, PpureScheme::Sq)?;
    let s = read_spectrum(&ctx.system, &rho, ctx.read_angle(10.0), PHASE_Y, None)?;
    let x = pattern(&s, &ctx.system.spin(2).label);
    let inner = x[1].min(x[2]);
    let outer = x[0].max(x[3]);
    ctx.report.check(
        "X multiplet (0,2,2,0)-type",
        outer < 0.05 * inner,
        format!("magnitudes {}", fmt_vec(&x)),
    );
    Ok(())
}

fn fig3(ctx: &mut Ctx) -> Result<()> {
    ppure(ctx, PpureScheme::Sq, &EQ1)?;
    let rho = prepared(ctx, PpureScheme::Sq)?;
    let x_spin = ctx.system.spin(2).clone();
    let s = read_spectrum(&ctx.system, &rho, ctx.read_angle(10.0), PHASE_Y, Some(&x_spin.channel))?;
    ctx.write_spectrum("x_channel", &s)?;
    let x = pattern(&s, &x_spin.label);
    let scale = x.iter().cloned().fold(0.0, f64::max);
    let tol = ctx.tolerance().max(1e-12) * scale.max(1.0);
    let ok = x[1] <= tol && x[2] <= tol && (x[0] - x[3]).abs() <= tol && x[0] > 0.0;
    ctx.report
        .check("X multiplet (2,0,0,2)-type", ok, format!("magnitudes {}", fmt_vec(&x)));
    Ok(())
}

fn fig4(ctx: &mut Ctx) -> Result<()> {
    let sys = ctx.system.clone();
    let angle = ctx.read_angle(10.0);
    let thermal = thermal_deviation(&sys);
    let eq = read_spectrum(&sys, &thermal, angle, PHASE_Y, None)?;
    let swap = ctx.realize(compile_gate(&sys, &Gate::Swap.into())?)?;
    let after_swap = read_spectrum(&sys, &apply_sequence(&sys, &thermal, &swap)?, angle, PHASE_Y, None)?;
    let d = eq
        .lines
        .iter()
        .zip(&after_swap.lines)
        .map(|(a, b)| (a.amplitude - b.amplitude).norm())
        .fold(0.0, f64::max);
    let tol = ctx.tolerance();
    ctx.report.check(
        "SWAP alone leaves the equilibrium spectrum",
        d <= tol,
        format!("max line change {d:.2e}"),
    );

    let demo = ctx.realize(compile_gate(&sys, &Gate::SwapDemo.into())?)?;
    let rho = apply_sequence(&sys, &thermal, &demo)?;
    let ideal = ideal_gate(&GateSpec::Named(Gate::SwapDemo));
    let want = DensityMatrix::from_populations(&thermal.populations())
        .evolve(&ideal)?
        .populations();
    let dp = max_diff(&rho.populations(), &want);
    ctx.report.check(
        "SWAP after A1 inversion permutes populations",
        dp <= tol,
        format!("populations {}", fmt_vec(&rho.populations())),
    );
    let s = read_spectrum(&sys, &rho, angle, PHASE_Y, None)?;
    let signs: Vec<String> = s
        .lines
        .iter()
        .map(|l| format!("{}{:+.3}", l.spin, l.amplitude.re))
        .collect();
    let changed = s
        .lines
        .iter()
        .zip(&eq.lines)
        .any(|(a, b)| (a.amplitude - b.amplitude).norm() > 1e-3);
    ctx.report
        .check("spectrum differs from equilibrium", changed, signs.join(" "));
    ctx.write_spectrum("equilibrium", &eq)?;
    ctx.write_spectrum("spectrum", &s)
}

fn gate_recipe(ctx: &mut Ctx, gate: Gate) -> Result<()> {
    let sys = ctx.system.clone();
    let spec = GateSpec::Named(gate);
    let ideal_seq = compile_gate(&sys, &spec)?;
    let seq = ctx.realize(ideal_seq.clone())?;
    let ideal = ideal_gate(&spec);
    match phase_equivalence(&sequence_propagator(&sys, &ideal_seq)?, &ideal) {
        Ok(eq) => {
            let phases: Vec<String> = eq.phases.iter().map(|d| format!("{:+.0}{:+.0}i", d.re, d.im)).collect();
            ctx.report
                .check("phase equivalence", true, format!("row phases [{}]", phases.join(", ")));
        }
        Err(e) => ctx.report.check("phase equivalence", false, e.to_string()),
    }
    let thermal = thermal_deviation(&sys);
    let rho = apply_sequence(&sys, &thermal, &seq)?;
    let want = thermal.evolve(&ideal)?.populations();
    let d = max_diff(&rho.populations(), &want);
    let tol = ctx.tolerance();
    ctx.report.check(
        "populations follow the gate",
        d <= tol,
        format!("populations {}", fmt_vec(&rho.populations())),
    );
    if gate == Gate::XnorSwapNot {
        let other = sequence_propagator(&sys, &compile_gate(&sys, &Gate::XorSwapNot.into())?)?;
        let mine = sequence_propagator(&sys, &ideal_seq)?;
        let differ = linalg::monomial_permutation(&other, 1e-10) != linalg::monomial_permutation(&mine, 1e-10);
        ctx.report.check(
            "reversed pulse order gives a different gate",
            differ,
            "XOR+SWAP+NOT vs XNOR+SWAP+NOT",
        );
    }
    let s = read_spectrum(&sys, &rho, ctx.read_angle(10.0), PHASE_Y, None)?;
    ctx.write_json(
        "sequence.json",
        &serde_json::from_str::<serde_json::Value>(&seq.to_json(&sys)?)?,
    )?;
    ctx.write_spectrum("spectrum", &s)
}

fn dj_recipe(ctx: &mut Ctx, n_inputs: usize, index: &str) -> Result<()> {
    let sys = ctx.system.clone();
    let f = function_by_name(n_inputs, &format!("f{index}"))?;
    let opts = DjOptions {
        read_angle: ctx.read_angle(0.0),
        cycle: ctx.opts.cycle,
    };
    let result = run_dj(&sys, &f, opts)?;
    let layout = DjLayout::for_inputs(n_inputs)?;
    ctx.report.check(
        "classification",
        result.correct(),
        format!("{} ({}), margin {:.3e}", result.class, f.table_string(), result.margin),
    );
    for (label, v, r) in &result.classification.integrals {
        ctx.report
            .notes
            .push(format!("target {label}: integral {v:.3e} (reference {r:.3e})"));
    }
    ctx.report.notes.push(format!(
        "{} phase-cycle steps, dispersive residual {:.3e}",
        result.cycle_steps, result.dispersive_residual
    ));
    let (pulses, ideal) = oracle_permutations(&sys, &f)?;
    ctx.report
        .check("oracle consistency", pulses == ideal, format!("permutation {pulses:?}"));
    if n_inputs == 1 && result.expected == FunctionClass::Balanced && opts.cycle {
        let target = &sys.spin(layout.targets[0]).label;
        let t = multiplet_integrals(&result.spectrum, target).total;
        ctx.report
            .check("target lines suppressed", t < 1e-10, format!("integral {t:.3e}"));
        let control = &sys.spin(layout.pulsed).label;
        let reference = run_dj(&sys, &function_by_name(1, "f1")?, opts)?;
        let full = multiplet_integrals(&reference.spectrum, control).magnitudes;
        let got = multiplet_integrals(&result.spectrum, control).magnitudes;
        let surviving = got.iter().filter(|m| **m > 1e-10).count();
        let full_size = got
            .iter()
            .zip(&full)
            .all(|(g, f)| *g <= 1e-10 || (g - f).abs() <= 1e-10);
        ctx.report.check(
            "one control line of full magnitude",
            surviving == 1 && full_size,
            format!("control magnitudes {}", fmt_vec(&got)),
        );
    }
    ctx.write_json("dj.json", &result)?;
    ctx.write_spectrum("spectrum", &result.spectrum)
}

fn random_event(rng: &mut ChaCha8Rng, system: &SpinSystem, lines: &[crate::spin::Transition]) -> PulseEvent {
    let angle = rng.random_range(1e-3..2.0 * PI);
    let phase = rng.random_range(0.0..2.0 * PI);
    let target = match rng.random_range(0..3) {
        0 => PulseTarget::Transition(lines[rng.random_range(0..lines.len())].clone()),
        1 => PulseTarget::Spin(rng.random_range(0..system.n_spins())),
        _ => PulseTarget::All,
    };
    PulseEvent::new(target, angle, phase).expect("angle in range")
}

fn invariants(ctx: &mut Ctx) -> Result<()> {
    let sys = ctx.system.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
    let lines: Vec<_> = list_transitions(&sys)
        .into_iter()
        .filter(|t| t.is_single_quantum())
        .collect();
    let mut rho = thermal_deviation(&sys);
    let (mut unitarity, mut herm, mut trace): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1000 {
        let u = random_event(&mut rng, &sys, &lines).propagator(&sys)?;
        unitarity = unitarity.max(linalg::unitarity_deviation(&u));
        rho = rho.evolve(&u)?;
        herm = herm.max(rho.hermiticity_deviation());
        trace = trace.max(rho.trace_deviation());
    }
    ctx.report
        .check("unitarity", unitarity < 1e-10, format!("max ‖U†U − 1‖ {unitarity:.2e}"));
    ctx.report.check(
        "hermiticity",
        herm < 1e-10,
        format!("max deviation {herm:.2e} after 1000 pulses"),
    );
    ctx.report.check(
        "trace",
        trace < 1e-10,
        format!("max |Tr ρ| {trace:.2e} after 1000 pulses"),
    );
    ctx.report.notes.push(format!("seed {}", ctx.opts.seed));
    Ok(())
}
