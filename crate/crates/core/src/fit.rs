//! Power-law fits `|value| ≈ A ε^p` by least squares in log–log space.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// A value in the window is zero or not finite, or an ε is not positive.
    NonPositiveValues { index: usize },
    TooFewPoints { found: usize },
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::NonPositiveValues { index } => {
                write!(f, "value or eps at row {index} has no logarithm")
            }
            FitError::TooFewPoints { found } => {
                write!(f, "need at least {MIN_POINTS} points to fit, found {found}")
            }
        }
    }
}

impl core::error::Error for FitError {}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingFit {
    pub observable: String,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    /// `ln A`.
    pub log_coefficient: f64,
    /// Largest absolute residual in log space over the window.
    pub max_residual: f64,
    /// Half-open index range `[start, end)` used by the fit.
    pub window: (usize, usize),
}

/// Fits `ln|values|` against `ln eps` over `window` (all rows if `None`).
pub fn fit_power_law(
    observable: &str,
    eps: &[f64],
    values: &[f64],
    window: Option<(usize, usize)>,
) -> Result<ScalingFit, FitError> {
    let (start, end) = window.unwrap_or((0, eps.len()));
    let end = end.min(eps.len()).min(values.len());
    let start = start.min(end);
    if end - start < MIN_POINTS {
        return Err(FitError::TooFewPoints { found: end - start });
    }
    let mut xs = Vec::with_capacity(end - start);
    let mut ys = Vec::with_capacity(end - start);
    for i in start..end {
        let (e, v) = (eps[i], values[i].abs());
        if !(e > 0.0 && v > 0.0 && e.is_finite() && v.is_finite()) {
            return Err(FitError::NonPositiveValues { index: i });
        }
        xs.push(libm::log(e));
        ys.push(libm::log(v));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit {
        observable: observable.into(),
        eps: eps.to_vec(),
        values: values.to_vec(),
        slope,
        log_coefficient: intercept,
        max_residual,
        window: (start, end),
    })
}

/// `n` log-spaced points from `a` to `b` inclusive. `n = 1` gives `[a]`;
/// a zero endpoint gives a single zero.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 || a == b || a <= 0.0 || b <= 0.0 {
        return alloc::vec![a];
    }
    let (la, lb) = (libm::log10(a), libm::log10(b));
    (0..n)
        .map(|i| {
            if i == 0 {
                a
            } else if i == n - 1 {
                b
            } else {
                libm::pow(10.0, la + (lb - la) * i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn quarter_power() {
        let e = log_space(1e-8, 1e-4, 9);
        let v: Vec<f64> = e.iter().map(|x| -3.0 * libm::pow(*x, 0.25)).collect();
        let f = fit_power_law("delta", &e, &v, None).unwrap();
        assert!((f.slope - 0.25).abs() < 1e-12);
        assert!((f.log_coefficient - libm::log(3.0)).abs() < 1e-10);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn constant_has_zero_slope() {
        let e = log_space(1e-8, 1e-4, 9);
        let f = fit_power_law("c", &e, &[2.5; 9], Some((0, 8))).unwrap();
        assert!(f.slope.abs() < 1e-10);
        assert_eq!(f.window, (0, 8));
    }

    #[test]
    fn errors() {
        let e = [1e-3, 1e-2, 1e-1];
        assert_eq!(fit_power_law("x", &e, &[1.0, 2.0, 3.0], None).unwrap_err(), FitError::TooFewPoints { found: 3 });
        let e = [1e-4, 1e-3, 1e-2, 1e-1];
        assert_eq!(
            fit_power_law("x", &e, &[1.0, 0.0, 3.0, 4.0], None).unwrap_err(),
            FitError::NonPositiveValues { index: 1 }
        );
    }

    #[test]
    fn grid_endpoints() {
        let g = log_space(1e-8, 1e-4, 9);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], 1e-8);
        assert_eq!(g[8], 1e-4);
        assert!((g[4] - 1e-6).abs() < 1e-20);
        assert_eq!(log_space(0.0, 0.0, 1), vec![0.0]);
    }

    proptest! {
        #[test]
        fn recovers_any_power(p in -3.0f64..3.0, a in 0.01f64..100.0) {
            let e = log_space(1e-6, 1e-1, 7);
            let v: Vec<f64> = e.iter().map(|x| a * libm::pow(*x, p)).collect();
            let f = fit_power_law("v", &e, &v, None).unwrap();
            prop_assert!((f.slope - p).abs() < 1e-9);
        }
    }
}
