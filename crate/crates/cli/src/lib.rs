//! Command-line front end: configuration loading, commands, report files.
//!
//! Every command writes `report.json` into the output directory together
//! with its grids and CSV attachments. The report echoes the full effective
//! configuration, so a run can be reproduced from its report alone.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use majorant_core::dyadic::{audit_domination, build_dominating_measure, direct_density, DyadicData};
use majorant_core::envelope::{log_lipschitz_defect, log_lipschitz_envelope, DefectSampling};
use majorant_core::experiments::{run_anyrate, run_rnotlip, run_sharpmaxf, Attachment, ExperimentReport};
use majorant_core::grid::GridFunction;
use majorant_core::kernels::{build_harmonic_majorant, BoundaryDensity, CappedPotential, ZeroSet};
use majorant_core::reduction::{harmonic_majorant_test, reduce, ReductionReport, Verdict};
use majorant_core::Domain;
use serde_json::json;

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "majorant", version, about = "Harmonic and superharmonic majorants on the unit disk")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Override any configuration key, e.g. `--set grid.d_rho=0.02`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dominating boundary measure of dyadic demands, with its audit.
    DyadicBuild {
        /// Demands in the `depth N` / `n k p` text format.
        data: PathBuf,
    },
    /// Smallest `C`-log-Lipschitz majorant of a grid function.
    Envelope {
        grid: PathBuf,
        #[arg(long)]
        c: Option<f64>,
    },
    /// Iterated sup-means of a grid function.
    Reduce {
        grid: PathBuf,
        #[command(flatten)]
        reduce: ReduceFlags,
    },
    /// Harmonic-majorant test of a grid function or of a zero set.
    TestMajorant {
        #[arg(long, conflicts_with = "zeros", required_unless_present = "zeros")]
        grid: Option<PathBuf>,
        /// Zeros as `re im [mass]` lines; the capped potential is tested.
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long)]
        c: Option<f64>,
        /// Capping radius around the zeros.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        reduce: ReduceFlags,
        #[command(flatten)]
        grid_flags: GridFlags,
    },
    /// One of the half-plane experiments.
    Experiment {
        name: ExperimentName,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct ReduceFlags {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridFlags {
    #[arg(long)]
    pub d_rho: Option<f64>,
    #[arg(long)]
    pub n_rho: Option<usize>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Rnotlip,
    Sharpmaxf,
    Anyrate,
}

/// Result of a successful command.
#[derive(Debug)]
pub struct Outcome {
    /// 0, or 2 for a NO-EVIDENCE verdict.
    pub exit_code: i32,
    pub summary: String,
    pub report_path: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code, printing the summary or the diagnostic.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            println!("report: {}", outcome.report_path.display());
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

/// Effective configuration of a parsed command line.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(path) => Some(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?),
        None => None,
    };
    let mut overrides = Vec::new();
    for s in &cli.sets {
        overrides.push(config::split_assignment(s)?);
    }
    let mut flag = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            overrides.push((key.to_string(), v));
        }
    };
    let show = |v: Option<f64>| v.map(|x| format!("{x:?}"));
    match &cli.command {
        Command::DyadicBuild { .. } => {}
        Command::Envelope { c, .. } => flag("operator.c", show(*c)),
        Command::Reduce { reduce, .. } => reduce_overrides(reduce, &mut flag),
        Command::TestMajorant {
            c,
            delta,
            reduce,
            grid_flags,
            ..
        } => {
            flag("operator.c", show(*c));
            flag("operator.delta", show(*delta));
            reduce_overrides(reduce, &mut flag);
            flag("grid.d_rho", show(grid_flags.d_rho));
            flag("grid.n_rho", grid_flags.n_rho.map(|n| n.to_string()));
            flag("grid.n_theta", grid_flags.n_theta.map(|n| n.to_string()));
            flag("grid.r_max", show(grid_flags.r_max));
        }
        Command::Experiment {
            name,
            gamma,
            delta,
            eps,
        } => {
            if *name == ExperimentName::Rnotlip {
                flag("rnotlip.gamma", show(*gamma));
                flag("rnotlip.delta", show(*delta));
                flag("rnotlip.eps", show(*eps));
            } else if gamma.is_some() || delta.is_some() || eps.is_some() {
                bail!("--gamma, --delta and --eps apply to the rnotlip experiment only");
            }
        }
    }
    let mut config = config::resolve(text.as_deref(), &overrides)?;
    if let Some(out) = &cli.output {
        config.output = out.clone();
    }
    Ok(config)
}

fn reduce_overrides(flags: &ReduceFlags, flag: &mut impl FnMut(&str, Option<String>)) {
    flag("operator.reduce.tol", flags.tol.map(|v| format!("{v:?}")));
    flag("operator.reduce.max_iter", flags.max_iter.map(|v| v.to_string()));
    flag("operator.reduce.cap", flags.cap.map(|v| format!("{v:?}")));
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("MAJORANT_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .with_context(|| format!("MAJORANT_THREADS must be a positive integer, got `{raw}`"))?;
        if n == 0 {
            bail!("MAJORANT_THREADS must be positive");
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    let config = effective_config(cli)?;
    let out = config.output.clone();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let (report, exit_code) = match &cli.command {
        Command::DyadicBuild { data } => dyadic_build(data, &out)?,
        Command::Envelope { grid, .. } => envelope(grid, &config, &out)?,
        Command::Reduce { grid, .. } => reduce_command(grid, &config, &out)?,
        Command::TestMajorant { grid, zeros, .. } => test_majorant(grid.as_deref(), zeros.as_deref(), &config, &out)?,
        Command::Experiment { name, .. } => experiment(*name, &config)?,
    };
    for attachment in &report.attachments {
        write(&out.join(format!("{}.csv", attachment.name)), &attachment.to_csv())?;
    }
    let report_path = out.join("report.json");
    let body = json!({
        "command": report.experiment,
        "config": config,
        "inputs": report.parameters,
        "measurements": report.measurements,
        "checks": report.checks,
        "verdict": report.verdict,
        "attachments": report.attachments.iter().map(|a| format!("{}.csv", a.name)).collect::<Vec<_>>(),
    });
    write(&report_path, &serde_json::to_string_pretty(&body)?)?;
    Ok(Outcome {
        exit_code,
        summary: format!("{}: {}", report.experiment, report.verdict),
        report_path,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes a grid as `x,y,value` CSV with a parameter header.
pub fn emit_grid(gf: &GridFunction, path: &Path) -> Result<()> {
    write(path, &gf.to_csv())
}

pub fn load_grid(path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GridFunction::from_csv(&text).with_context(|| format!("parsing grid {}", path.display()))
}

fn inputs(paths: &[(&str, Option<&Path>)]) -> serde_json::Value {
    serde_json::Value::Object(
        paths
            .iter()
            .filter_map(|(k, p)| p.map(|p| (k.to_string(), json!(p.display().to_string()))))
            .collect(),
    )
}

fn dyadic_build(path: &Path, out: &Path) -> Result<(ExperimentReport, i32)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let data = DyadicData::<f64>::from_text(&text).with_context(|| format!("parsing {}", path.display()))?;
    let measure = build_dominating_measure(&data);
    let audit = audit_domination(&measure, &data)?;
    let density = direct_density(&data);
    write(&out.join("measure.csv"), &measure.to_csv())?;
    let mut density_rows = Attachment::new("density", &["start", "value"]);
    for (start, value) in density.breaks().iter().zip(density.values()) {
        density_rows.rows.push(vec![*start, *value]);
    }

    let mut report = ExperimentReport::new("dyadic-build", inputs(&[("data", Some(path))]));
    let scale = audit.packing.max(1.0);
    report.measure("packing", audit.packing, 1e-12 * scale);
    report.measure("total_mass", audit.total_mass, 1e-9 * scale);
    report.measure("min_margin", audit.min_margin, 1e-12 * scale);
    report.measure("density_integral", density.integral(), 1e-9 * scale);
    report.measure("nodes", audit.nodes as f64, 0.0);
    report.check(
        "domination",
        audit.passed(),
        format!("{} of {} nodes short of |I| p", audit.violations, audit.nodes),
    );
    report.check(
        "total_mass_is_packing",
        (audit.total_mass - audit.packing).abs() <= 1e-9 * scale,
        format!("μ(T) = {:?} against S = {:?}", audit.total_mass, audit.packing),
    );
    report.attachments.push(density_rows);
    report.verdict = if report.all_passed() { "audit PASS" } else { "audit FAIL" }.into();
    if !report.all_passed() {
        bail!("domination audit failed: {}", report.verdict);
    }
    Ok((report, 0))
}

fn envelope(path: &Path, config: &RunConfig, out: &Path) -> Result<(ExperimentReport, i32)> {
    let phi = load_grid(path)?;
    let c = config.operator.c;
    let env = log_lipschitz_envelope(&phi, c)?;
    emit_grid(&env, &out.join("envelope.csv"))?;
    let mut report = ExperimentReport::new("envelope", inputs(&[("grid", Some(path))]));
    if env.values().iter().any(|v| *v > 0.0 && v.is_finite()) {
        let defect = log_lipschitz_defect(&env, c, &DefectSampling::default())?;
        report.measure("log_lipschitz_defect", defect.value, 1e-12);
        report.measure("excluded_points", defect.excluded.len() as f64, 0.0);
        report.check(
            "log_lipschitz",
            defect.value <= 1e-12,
            format!("max |log F(z) - log F(w)| - Cρ = {:.3e} over {} pairs", defect.value, defect.pairs_checked),
        );
    }
    let growth = phi
        .values()
        .iter()
        .zip(env.values())
        .filter(|(a, _)| **a > 0.0 && a.is_finite())
        .map(|(a, b)| b / a)
        .fold(1.0f64, f64::max);
    report.measure("max_envelope_ratio", growth, 0.0);
    report.measure("value_at_origin", env.at_origin(), 0.0);
    report.verdict = if env.has_infinite() { "infinite envelope" } else { "finite envelope" }.into();
    Ok((report, 0))
}

fn reduction_measurements(report: &mut ExperimentReport, reduction: &ReductionReport, tol: f64) {
    report.measure("iterations", reduction.iterations as f64, 0.0);
    report.measure("last_change", reduction.last_change, tol);
    report.measure("value_at_origin", reduction.trace.last().copied().unwrap_or(f64::NAN), tol);
    report.measure("cap_value", reduction.cap_value, 0.0);
    let mut trace = Attachment::new("trace", &["iteration", "value_at_origin"]);
    trace.rows = reduction
        .trace
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i as f64, *v])
        .collect();
    report.attachments.push(trace);
}

fn reduce_command(path: &Path, config: &RunConfig, out: &Path) -> Result<(ExperimentReport, i32)> {
    let phi = load_grid(path)?;
    let options = &config.operator.reduce;
    let reduction = reduce(&phi, options)?;
    emit_grid(reduction.final_grid(), &out.join("reduced.csv"))?;
    let mut report = ExperimentReport::new("reduce", inputs(&[("grid", Some(path))]));
    reduction_measurements(&mut report, &reduction, options.tol);
    report.verdict = format!("{} after {} sweeps", reduction.status, reduction.iterations);
    Ok((report, 0))
}

fn test_majorant(
    grid_path: Option<&Path>,
    zeros_path: Option<&Path>,
    config: &RunConfig,
    out: &Path,
) -> Result<(ExperimentReport, i32)> {
    let mut report = ExperimentReport::new("test-majorant", inputs(&[("grid", grid_path), ("zeros", zeros_path)]));
    let (phi, zeros) = match (grid_path, zeros_path) {
        (Some(path), None) => (load_grid(path)?, None),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let zeros = ZeroSet::from_text(Domain::Disk, &text).with_context(|| format!("parsing {}", path.display()))?;
            let capped = CappedPotential::new(zeros.clone(), config.operator.delta, config.operator.cap_nodes)?;
            let grid = config.grid.build()?;
            let phi = GridFunction::from_fn(grid, |z| capped.value(z))?;
            emit_grid(&phi, &out.join("phi.csv"))?;
            (phi, Some(zeros))
        }
        _ => bail!("give exactly one of --grid and --zeros"),
    };
    let test = harmonic_majorant_test(&phi, config.operator.c, &config.operator.reduce)?;
    if let Some(env) = &test.envelope {
        emit_grid(env, &out.join("envelope.csv"))?;
    }
    reduction_measurements(&mut report, &test.reduction, config.operator.reduce.tol);
    if let Some(witness) = test.witness() {
        emit_grid(witness, &out.join("witness.csv"))?;
        let below = phi
            .values()
            .iter()
            .zip(witness.values())
            .filter(|(p, w)| w < p)
            .count();
        report.check("witness_above_phi", below == 0, format!("{below} grid points with witness < φ"));
        if let Some(zeros) = &zeros {
            let built = build_harmonic_majorant(zeros, &BoundaryDensity::zero_circle(), phi.grid(), &config.operator.majorant)?;
            write(&out.join("majorant.txt"), &built.descriptor.to_text())?;
            report.measure("majorant_min_relative_margin", built.audit.min_relative_margin, 0.0);
            report.measure("majorant_c_delta", built.constants.c_delta, 0.0);
            report.check(
                "harmonic_majorant_audit",
                built.audit.violations == 0,
                format!(
                    "{} violations over {} checked points",
                    built.audit.violations, built.audit.checked_points
                ),
            );
        }
    }
    report.verdict = test.verdict.to_string();
    let code = if test.verdict == Verdict::NoEvidence { 2 } else { 0 };
    Ok((report, code))
}

fn experiment(name: ExperimentName, config: &RunConfig) -> Result<(ExperimentReport, i32)> {
    let mut report = match name {
        ExperimentName::Rnotlip => {
            let c = &config.rnotlip;
            run_rnotlip(c.gamma, c.delta, c.eps, &c.options)?
        }
        ExperimentName::Sharpmaxf => {
            let c = &config.sharpmaxf;
            run_sharpmaxf(&c.s, &c.curve, &c.cutoffs, &c.options)?
        }
        ExperimentName::Anyrate => {
            let c = &config.anyrate;
            run_anyrate(&c.s, &c.options)?
        }
    };
    report.experiment = format!("experiment {}", report.experiment);
    Ok((report, 0))
}
