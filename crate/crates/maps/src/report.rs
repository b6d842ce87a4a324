//! Run reports and the fits attached to them.

use grazing_core::fit::{fit_power_law, ScalingFit};
use grazing_core::flow::Tolerance;
use serde::{Deserialize, Serialize};

use crate::load::SystemDescriptor;
use crate::sweep::{MapKind, SweepRow};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub command: Vec<String>,
    pub system: SystemDescriptor,
    pub map: MapKind,
    pub tolerances: Tolerance,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<ScalingFit>,
}

impl RunReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Default fit window: every row except the one with the largest ε.
pub fn default_window(len: usize) -> (usize, usize) {
    (0, len.saturating_sub(1))
}

/// Fits every scalar observable the sweep produced, over rows without
/// errors. Observables with too few usable points are left out.
pub fn sweep_fits(rows: &[SweepRow]) -> Vec<ScalingFit> {
    type Getter = fn(&SweepRow) -> Option<f64>;
    let observables: [(&str, Getter); 7] = [
        ("delta_num", |r| r.numeric.as_ref()?.delta),
        ("v_num", |r| r.numeric.as_ref()?.v),
        ("zdm_shift", |r| {
            let n = r.numeric.as_ref()?;
            Some(grazing_core::dmaps::distance(n.x4.as_ref()?, r.x1.as_ref()?))
        }),
        ("gap_zdm", |r| r.gap_zdm),
        ("delta0_num", |r| r.numeric.as_ref()?.delta0),
        ("pdm_shift", |r| {
            let n = r.numeric.as_ref()?;
            Some(grazing_core::dmaps::distance(n.x5.as_ref()?, r.x1.as_ref()?))
        }),
        ("gap_pdm", |r| r.gap_pdm),
    ];
    let mut fits = Vec::new();
    for (name, get) in observables {
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| !r.failed())
            .filter_map(|r| Some((r.eps, get(r)?)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (eps, vals): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        if let Ok(f) = fit_power_law(name, &eps, &vals, Some(default_window(eps.len()))) {
            fits.push(f);
        }
    }
    fits
}
