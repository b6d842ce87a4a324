//! ε-sweeps: one row per depth, numeric and analytic maps side by side.

use std::io::Write;
use std::path::Path;

use grazing_core::dmaps::{distance, pdm_analytic, pdm_numeric, zdm_analytic, zdm_numeric, DmResult, GrazingContext, MapOptions};
use grazing_core::grazing::pi3_point;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "GRAZING_MAPS_THREADS";
/// A sweep fails as a whole when more than this fraction of rows fail.
pub const FAILURE_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Zdm,
    Pdm,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub x1: Option<Vec<f64>>,
    pub numeric: Option<DmResult>,
    pub analytic: Option<DmResult>,
    pub gap_zdm: Option<f64>,
    pub gap_pdm: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

fn trim(mut r: DmResult, kind: MapKind) -> DmResult {
    if kind == MapKind::Delta {
        r.x3 = None;
        r.x4 = None;
        r.return_time = None;
    }
    if kind != MapKind::Pdm {
        r.delta0 = None;
        r.x5 = None;
    }
    r
}

fn gap(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>) -> Option<f64> {
    Some(distance(a.as_ref()?, b.as_ref()?))
}

pub fn compute_row(ctx: &GrazingContext, kind: MapKind, eps: f64, opts: &MapOptions) -> SweepRow {
    let mut row = SweepRow { eps, x1: None, numeric: None, analytic: None, gap_zdm: None, gap_pdm: None, error: None };
    let sys = ctx.system();
    let x1 = match pi3_point(sys, ctx.grazing_point(), eps, None) {
        Ok(p) => p.state,
        Err(e) => {
            row.error = Some(format!("pi3_point: {e}"));
            return row;
        }
    };
    row.x1 = Some(x1.clone());
    let numeric = match kind {
        MapKind::Pdm => pdm_numeric(sys, &x1, eps, opts),
        _ => zdm_numeric(sys, &x1, eps, opts),
    };
    let analytic = match kind {
        MapKind::Pdm => pdm_analytic(ctx, &x1, eps),
        _ => zdm_analytic(ctx, &x1, eps),
    };
    match analytic {
        Ok(a) => row.analytic = Some(trim(a, kind)),
        Err(e) => row.error = Some(format!("analytic: {e}")),
    }
    match numeric {
        Ok(n) => row.numeric = Some(trim(n, kind)),
        Err(e) => row.error = Some(format!("numeric: {e}")),
    }
    if let (Some(n), Some(a)) = (&row.numeric, &row.analytic) {
        row.gap_zdm = gap(&n.x4, &a.x4);
        row.gap_pdm = gap(&n.x5, &a.x5);
    }
    row
}

/// Thread count from the environment, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Rows in the order of `grid`, whatever order they finish in.
pub fn run(ctx: &GrazingContext, kind: MapKind, grid: &[f64], opts: &MapOptions) -> Vec<SweepRow> {
    let work = || grid.par_iter().map(|&e| compute_row(ctx, kind, e, opts)).collect::<Vec<_>>();
    match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }
}

pub fn check_failures(rows: &[SweepRow]) -> Result<()> {
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed as f64 > FAILURE_FRACTION * rows.len() as f64 {
        return Err(Error::TooManyFailures { failed, total: rows.len() });
    }
    Ok(())
}

pub fn header(dim: usize) -> Vec<String> {
    let vec_cols = |name: &'static str| (1..=dim).map(move |i| format!("{name}_{i}"));
    let mut h = vec!["eps".to_string()];
    h.extend(vec_cols("x1"));
    h.extend(["delta_num", "delta_asym", "v_num", "v_asym"].map(String::from));
    h.extend(vec_cols("x4_num"));
    h.extend(vec_cols("x4_asym"));
    h.push("gap_zdm".into());
    h.extend(["delta0_num", "delta0_asym"].map(String::from));
    h.extend(vec_cols("x5_num"));
    h.extend(vec_cols("x5_asym"));
    h.push("gap_pdm".into());
    h.extend(["zdm_shift", "pdm_shift", "error"].map(String::from));
    h
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn nums(v: Option<&Vec<f64>>, dim: usize) -> Vec<String> {
    match v {
        Some(v) => v.iter().map(|x| format!("{x:e}")).collect(),
        None => vec![String::new(); dim],
    }
}

pub fn record(row: &SweepRow, dim: usize) -> Vec<String> {
    let n = row.numeric.as_ref();
    let a = row.analytic.as_ref();
    let mut r = vec![num(Some(row.eps))];
    r.extend(nums(row.x1.as_ref(), dim));
    r.push(num(n.and_then(|n| n.delta)));
    r.push(num(a.and_then(|a| a.delta)));
    r.push(num(n.and_then(|n| n.v)));
    r.push(num(a.and_then(|a| a.v)));
    r.extend(nums(n.and_then(|n| n.x4.as_ref()), dim));
    r.extend(nums(a.and_then(|a| a.x4.as_ref()), dim));
    r.push(num(row.gap_zdm));
    r.push(num(n.and_then(|n| n.delta0)));
    r.push(num(a.and_then(|a| a.delta0)));
    r.extend(nums(n.and_then(|n| n.x5.as_ref()), dim));
    r.extend(nums(a.and_then(|a| a.x5.as_ref()), dim));
    r.push(num(row.gap_pdm));
    let shift = |x: Option<&Vec<f64>>| x.zip(row.x1.as_ref()).map(|(x, x1)| distance(x, x1));
    r.push(num(shift(n.and_then(|n| n.x4.as_ref()))));
    r.push(num(shift(n.and_then(|n| n.x5.as_ref()))));
    r.push(row.error.clone().unwrap_or_default());
    r
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow], dim: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim))?;
    for row in rows {
        w.write_record(record(row, dim))?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

/// `(eps, value)` pairs of one column, skipping rows where it is empty,
/// sorted by ε.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Usage(format!("column `{name}` not found in {}", path.display())))
    };
    let (ie, ic) = (find("eps")?, find(column)?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let cell = rec.get(ic).unwrap_or("").trim();
        if cell.is_empty() {
            continue;
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad number `{s}` in {}", path.display())));
        out.push((parse(rec.get(ie).unwrap_or(""))?, parse(cell)?));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}
