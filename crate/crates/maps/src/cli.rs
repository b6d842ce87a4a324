//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use grazing_core::dmaps::{
    delta_asymptotic, distance, pdm_analytic, pdm_numeric, zdm_analytic, zdm_numeric, DeltaBase, DmResult,
    GrazingContext, MapOptions,
};
use grazing_core::fit::{fit_power_law, log_space};
use grazing_core::flow::{IntegratorOptions, Tolerance};
use grazing_core::grazing::{classify, pi3_point, Classification, DEFAULT_ZERO_TOL};
use grazing_core::systems::{builtin, NAMES};
use serde::Serialize;

use crate::error::{exit, Error, Result};
use crate::load::{load, parse_assignment, parse_point, parse_range, LoadedSystem};
use crate::plot;
use crate::report::{default_window, sweep_fits, RunReport, TOOL_VERSION};
use crate::sweep::{self, MapKind};

#[derive(Debug, Parser)]
#[command(name = "grazing-maps", version, about = "Discontinuity mappings near order-4 grazing points")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a boundary point by grazing order.
    Classify(ClassifyArgs),
    /// Evaluate a map over a log-spaced range of depths and write CSV.
    Sweep(SweepArgs),
    /// Fit a power law to one column of a sweep CSV.
    Fit(FitArgs),
    /// Zero-time discontinuity mapping at one depth.
    Zdm(PointArgs),
    /// Poincaré discontinuity mapping at one depth.
    Pdm(PointArgs),
    /// Impact time and velocity at one depth.
    Delta(PointArgs),
    /// List the built-in systems.
    ListSystems {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Built-in name or path to a system file.
    #[arg(long)]
    pub system: String,
    /// Parameter override `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Grazing point x* (comma separated); defaults to the origin.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol_abs: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol_rel: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance> {
        if !(self.tol_abs > 0.0 && self.tol_rel >= 0.0) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        Ok(Tolerance { abs: self.tol_abs, rel: self.tol_rel })
    }

    fn map_options(&self) -> Result<MapOptions> {
        Ok(MapOptions { integrator: IntegratorOptions::with_tol(self.tolerance()?), ..MapOptions::default() })
    }
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long, value_enum)]
    pub map: MapKind,
    /// Depth range `a:b`, log-spaced.
    #[arg(long, default_value = "1e-8:1e-4")]
    pub eps: String,
    #[arg(long, default_value_t = 9)]
    pub n: usize,
    /// CSV destination; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the run report as JSON on standard output.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON run report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Sweep CSV.
    pub csv: PathBuf,
    #[arg(long)]
    pub column: String,
    /// Fit every row instead of dropping the largest depth.
    #[arg(long)]
    pub all_points: bool,
    #[arg(long)]
    pub json: bool,
    /// Write gnuplot two-column data here.
    #[arg(long)]
    pub dat: Option<PathBuf>,
    /// Write a log–log SVG chart here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub sys: SystemArgs,
    #[arg(long)]
    pub eps: f64,
    /// Start point on Π₃; computed from x* and eps if absent.
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<String>,
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub tol: TolArgs,
}

fn load_args(a: &SystemArgs) -> Result<LoadedSystem> {
    let overrides = a.params.iter().map(|p| parse_assignment(p)).collect::<Result<Vec<_>>>()?;
    let point = a.point.as_deref().map(parse_point).transpose()?;
    load(&a.system, &overrides, point.as_deref())
}

fn context(l: &LoadedSystem) -> Result<GrazingContext> {
    Ok(GrazingContext::new(l.system.clone(), &l.descriptor.grazing_point)?)
}

fn io(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.10e}")).collect();
    format!("({})", parts.join(", "))
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<i32> {
    let l = load_args(&a.sys)?;
    let r = classify(&l.system, &l.descriptor.grazing_point, a.zero_tol)?;
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&r)?).map_err(io)?;
    } else {
        match r.classification {
            Classification::Grazing { order } => {
                writeln!(out, "order {order}, L_X^{order} H = {:.6}", r.lie[order]).map_err(io)?
            }
            Classification::Transversal => writeln!(out, "transversal, L_X H = {:.6}", r.lie[1]).map_err(io)?,
            Classification::Unclassified => writeln!(out, "unclassified").map_err(io)?,
        }
        for (j, v) in r.lie.iter().enumerate().skip(1) {
            writeln!(out, "  L_X^{j} H = {v:.6e}").map_err(io)?;
        }
        writeln!(out, "  transversality (grad L_X^3 H . X = {:.6e}): {}", r.transversality_value, r.transversality_ok)
            .map_err(io)?;
    }
    Ok(if r.order() == Some(4) { exit::SUCCESS } else { exit::GATE })
}

fn cmd_sweep(a: &SweepArgs, argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let l = load_args(&a.sys)?;
    let (lo, hi) = parse_range(&a.eps)?;
    if a.n == 0 {
        return Err(Error::Usage("--n must be at least 1".into()));
    }
    let opts = a.tol.map_options()?;
    let ctx = context(&l).map_err(|e| match e {
        Error::Map(m) => Error::Gate(m.to_string()),
        e => e,
    })?;
    let grid = log_space(lo, hi, a.n);
    let rows = sweep::run(&ctx, a.map, &grid, &opts);
    let dim = l.system.dim();
    match &a.out {
        Some(path) => {
            let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
            sweep::write_csv(f, &rows, dim)?;
        }
        None if !a.json => sweep::write_csv(&mut *out, &rows, dim)?,
        None => {}
    }
    let fits = sweep_fits(&rows);
    let report = RunReport {
        tool_version: TOOL_VERSION.into(),
        command: argv.to_vec(),
        system: l.descriptor.clone(),
        map: a.map,
        tolerances: opts.integrator.tol,
        rows,
        fits,
    };
    let json = report.to_json()?;
    if let Some(path) = &a.report {
        std::fs::write(path, &json).map_err(|e| Error::io(path, e))?;
    }
    if a.json {
        writeln!(out, "{json}").map_err(io)?;
    }
    for f in &report.fits {
        writeln!(err, "fit {}: slope {:.4} (max residual {:.2e})", f.observable, f.slope, f.max_residual).map_err(io)?;
    }
    for r in report.rows.iter().filter(|r| r.failed()) {
        writeln!(err, "eps {:e}: {}", r.eps, r.error.as_deref().unwrap_or("")).map_err(io)?;
    }
    sweep::check_failures(&report.rows)?;
    Ok(exit::SUCCESS)
}

fn cmd_fit(a: &FitArgs, out: &mut dyn Write) -> Result<i32> {
    let pts = sweep::read_column(&a.csv, &a.column)?;
    let (eps, vals): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let window = if a.all_points { None } else { Some(default_window(eps.len())) };
    let fit = fit_power_law(&a.column, &eps, &vals, window)?;
    if let Some(p) = &a.dat {
        std::fs::write(p, plot::gnuplot_dat(&fit)).map_err(|e| Error::io(p, e))?;
    }
    if let Some(p) = &a.svg {
        std::fs::write(p, plot::svg(&fit)).map_err(|e| Error::io(p, e))?;
    }
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&fit)?).map_err(io)?;
    } else {
        writeln!(
            out,
            "{}: slope {:.4}, log-coefficient {:.4}, max residual {:.2e}, rows {}..{} of {}",
            fit.observable,
            fit.slope,
            fit.log_coefficient,
            fit.max_residual,
            fit.window.0,
            fit.window.1,
            eps.len()
        )
        .map_err(io)?;
    }
    Ok(exit::SUCCESS)
}

#[derive(Serialize)]
struct PointReport {
    eps: f64,
    x1: Vec<f64>,
    numeric: DmResult,
    analytic: DmResult,
    gap: Option<f64>,
    /// Impact-time leading term with `L_X⁴H` taken at `x₁` instead of `x*`.
    delta_asym_start: Option<f64>,
}

fn print_chain(out: &mut dyn Write, label: &str, r: &DmResult) -> std::io::Result<()> {
    writeln!(out, "{label}:")?;
    let scalar = |out: &mut dyn Write, name: &str, v: Option<f64>| match v {
        Some(v) => writeln!(out, "  {name:<7}{v:.10e}"),
        None => Ok(()),
    };
    let vector = |out: &mut dyn Write, name: &str, v: &Option<Vec<f64>>| match v {
        Some(v) => writeln!(out, "  {name:<7}{}", fmt_vec(v)),
        None => Ok(()),
    };
    scalar(out, "delta", r.delta)?;
    vector(out, "x2", &r.x2)?;
    scalar(out, "v", r.v)?;
    vector(out, "x3", &r.x3)?;
    vector(out, "x4", &r.x4)?;
    scalar(out, "delta0", r.delta0)?;
    vector(out, "x5", &r.x5)
}

fn cmd_point(kind: MapKind, a: &PointArgs, out: &mut dyn Write) -> Result<i32> {
    let l = load_args(&a.sys)?;
    if a.eps.is_nan() || a.eps < 0.0 {
        return Err(Error::Usage("--eps must be non-negative".into()));
    }
    let opts = a.tol.map_options()?;
    let ctx = context(&l).map_err(|e| match e {
        Error::Map(m) => Error::Gate(m.to_string()),
        e => e,
    })?;
    let x1 = match &a.x1 {
        Some(s) => parse_point(s)?,
        None => pi3_point(&l.system, &l.descriptor.grazing_point, a.eps, None)?.state,
    };
    if x1.len() != l.system.dim() {
        return Err(Error::Usage("--x1 has the wrong dimension".into()));
    }
    let (numeric, analytic) = match kind {
        MapKind::Pdm => (pdm_numeric(&l.system, &x1, a.eps, &opts)?, pdm_analytic(&ctx, &x1, a.eps)?),
        _ => (zdm_numeric(&l.system, &x1, a.eps, &opts)?, zdm_analytic(&ctx, &x1, a.eps)?),
    };
    let gap = match kind {
        MapKind::Zdm => Some(distance(numeric.x4.as_ref().unwrap(), analytic.x4.as_ref().unwrap())),
        MapKind::Pdm => Some(distance(numeric.x5.as_ref().unwrap(), analytic.x5.as_ref().unwrap())),
        MapKind::Delta => numeric.delta.zip(analytic.delta).map(|(n, a)| (n - a).abs()),
    };
    let delta_asym_start = delta_asymptotic(&ctx, &x1, a.eps, DeltaBase::Start).ok();
    if a.json {
        let r = PointReport { eps: a.eps, x1, numeric, analytic, gap, delta_asym_start };
        writeln!(out, "{}", serde_json::to_string_pretty(&r)?).map_err(io)?;
        return Ok(exit::SUCCESS);
    }
    writeln!(out, "eps = {:e}, x1 = {}", a.eps, fmt_vec(&x1)).map_err(io)?;
    if kind == MapKind::Delta {
        let line = |name: &str, v: Option<f64>| format!("{name:<18}{}", v.map(|v| format!("{v:.10e}")).unwrap_or("-".into()));
        writeln!(out, "{}", line("delta (numeric)", numeric.delta)).map_err(io)?;
        writeln!(out, "{}", line("delta (x* base)", analytic.delta)).map_err(io)?;
        writeln!(out, "{}", line("delta (x1 base)", delta_asym_start)).map_err(io)?;
        writeln!(out, "{}", line("v (numeric)", numeric.v)).map_err(io)?;
        writeln!(out, "{}", line("v (leading)", analytic.v)).map_err(io)?;
    } else {
        print_chain(out, "numeric", &numeric).map_err(io)?;
        print_chain(out, "analytic (order 4)", &analytic).map_err(io)?;
        if let Some(g) = gap {
            writeln!(out, "gap {g:.6e}").map_err(io)?;
        }
    }
    Ok(exit::SUCCESS)
}

#[derive(Serialize)]
struct SystemEntry {
    name: &'static str,
    summary: &'static str,
    params: Vec<(String, f64)>,
    source: &'static str,
}

fn cmd_list(json: bool, out: &mut dyn Write) -> Result<i32> {
    let entries: Vec<SystemEntry> = NAMES
        .iter()
        .map(|n| {
            let b = builtin(n).unwrap();
            SystemEntry {
                name: b.name,
                summary: b.summary,
                params: b.system.bindings().map(|(k, v)| (k.to_string(), v)).collect(),
                source: b.source,
            }
        })
        .collect();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&entries)?).map_err(io)?;
    } else {
        for e in &entries {
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "{:<18} {} [{}]", e.name, e.summary, params.join(", ")).map_err(io)?;
        }
    }
    Ok(exit::SUCCESS)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a, out),
        Command::Sweep(a) => cmd_sweep(a, &argv, out, err),
        Command::Fit(a) => cmd_fit(a, out),
        Command::Zdm(a) => cmd_point(MapKind::Zdm, a, out),
        Command::Pdm(a) => cmd_point(MapKind::Pdm, a, out),
        Command::Delta(a) => cmd_point(MapKind::Delta, a, out),
        Command::ListSystems { json } => cmd_list(*json, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
