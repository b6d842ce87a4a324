//! Resolving `--system` and `--param` arguments.

use std::path::Path;

use grazing_core::sysdsl::HybridSystem;
use grazing_core::systems::{builtin, NAMES};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a system came from, with the parameter values actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    /// Built-in name or file path as given.
    pub reference: String,
    pub builtin: bool,
    pub source: String,
    pub params: Vec<(String, f64)>,
    pub grazing_point: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub system: HybridSystem,
    pub descriptor: SystemDescriptor,
}

/// Parses `name=value`.
pub fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("expected name=value, got `{s}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("`{value}` is not a number")))?;
    Ok((name.trim().to_string(), value))
}

/// Parses a comma-separated point.
pub fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad coordinate `{c}` in `{s}`"))))
        .collect()
}

/// Parses `a:b` (or a single value).
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad eps bound `{t}`")));
    let (a, b) = match s.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if !(a >= 0.0 && b >= a) || !b.is_finite() {
        return Err(Error::Usage(format!("eps range `{s}` must satisfy 0 <= a <= b")));
    }
    Ok((a, b))
}

pub fn load(reference: &str, overrides: &[(String, f64)], point: Option<&[f64]>) -> Result<LoadedSystem> {
    let (mut system, source, is_builtin, default_point) = if NAMES.contains(&reference) {
        let b = builtin(reference)?;
        (b.system, b.source.to_string(), true, b.grazing_point)
    } else if Path::new(reference).exists() {
        let source = std::fs::read_to_string(reference).map_err(|e| Error::io(reference, e))?;
        let system = HybridSystem::parse(&source).map_err(|e| Error::Parse { path: reference.into(), source: e })?;
        let n = system.dim();
        (system, source, false, vec![0.0; n])
    } else {
        return Err(builtin(reference).unwrap_err().into());
    };
    for (name, value) in overrides {
        system.set_param(name, *value)?;
    }
    let grazing_point = match point {
        Some(p) => {
            if p.len() != system.dim() {
                return Err(Error::Usage(format!("point has {} coordinates, system has dimension {}", p.len(), system.dim())));
            }
            p.to_vec()
        }
        None => default_point,
    };
    let params = system.bindings().map(|(n, v)| (n.to_string(), v)).collect();
    Ok(LoadedSystem {
        descriptor: SystemDescriptor { reference: reference.into(), builtin: is_builtin, source, params, grazing_point },
        system,
    })
}
