//! Zero-time (ZDM) and Poincaré (PDM) discontinuity mappings.
//!
//! The numeric maps compose flows literally:
//! `x₂ = φ(x₁, δ)` (first backward impact), `x₃ = x₂ + W(x₂)·v` with
//! `v = L_X H(x₂)`, `x₄ = φ(x₃, -δ)`, and `x₅ = φ(x₄, Δ₀)` on `Π₃`.
//! The analytic maps are the leading order-4 asymptotics, which need the
//! grazing point `x*` and are gated on its classification.

use alloc::vec::Vec;
use core::fmt;

use crate::flow::{first_crossing, flow_to, nearest_crossing, Direction, FlowError, Functional, IntegratorOptions};
use crate::grazing::{classify, Classification, GrazingError, GrazingReport, DEFAULT_ZERO_TOL};
use crate::jet::factorial;
use crate::lie::{lie_mixed, lie_value};
use crate::sysdsl::{EvalError, HybridSystem};

/// `(4!)^{3/4} / 3!`, the ε^{3/4} coefficient shared by the order-4 maps.
pub fn order4_coefficient() -> f64 {
    libm::pow(factorial(4), 0.75) / factorial(3)
}

#[derive(Debug, Clone, PartialEq)]
pub enum DmapError {
    Eval(EvalError),
    Flow(FlowError),
    Grazing(GrazingError),
    /// `L_X⁴H` at the base point is not positive, so no real fourth root.
    NonpositiveRadicand { value: f64 },
    NotOrder4 { classification: Classification },
}

impl From<EvalError> for DmapError {
    fn from(e: EvalError) -> Self {
        DmapError::Eval(e)
    }
}

impl From<FlowError> for DmapError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Eval(e) => DmapError::Eval(e),
            e => DmapError::Flow(e),
        }
    }
}

impl From<GrazingError> for DmapError {
    fn from(e: GrazingError) -> Self {
        match e {
            GrazingError::Eval(e) => DmapError::Eval(e),
            e => DmapError::Grazing(e),
        }
    }
}

impl fmt::Display for DmapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DmapError::Eval(e) => write!(f, "evaluation failed: {e}"),
            DmapError::Flow(e) => write!(f, "{e}"),
            DmapError::Grazing(e) => write!(f, "{e}"),
            DmapError::NonpositiveRadicand { value } => {
                write!(f, "L_X^4 H = {value} is not positive; the fourth root is not real")
            }
            DmapError::NotOrder4 { classification } => {
                write!(f, "grazing point is {classification}, the analytic maps need order 4")
            }
        }
    }
}

impl core::error::Error for DmapError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Numeric,
    AnalyticOrder4,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Numeric => "numeric",
            Method::AnalyticOrder4 => "analytic-order-4",
        })
    }
}

/// The chain `x₁ → x₂ → x₃ → x₄ → x₅`. Fields a method does not produce
/// are `None`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DmResult {
    pub method: Method,
    pub eps: f64,
    pub x1: Vec<f64>,
    /// Impact time, `δ <= 0`.
    pub delta: Option<f64>,
    pub x2: Option<Vec<f64>>,
    pub v: Option<f64>,
    pub x3: Option<Vec<f64>>,
    pub x4: Option<Vec<f64>>,
    /// Signed flow time from `x₃` to `x₄` as used; `delta + return_time == 0`.
    pub return_time: Option<f64>,
    pub delta0: Option<f64>,
    pub x5: Option<Vec<f64>>,
    /// Exponent `p` of the unmodelled `O(ε^p)` remainder of the analytic
    /// map; `None` for numeric results.
    pub remainder_order: Option<f64>,
}

impl DmResult {
    fn new(method: Method, eps: f64, x1: &[f64]) -> Self {
        Self {
            method,
            eps,
            x1: x1.to_vec(),
            delta: None,
            x2: None,
            v: None,
            x3: None,
            x4: None,
            return_time: None,
            delta0: None,
            x5: None,
            remainder_order: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MapOptions {
    pub integrator: IntegratorOptions,
    /// Overrides the backward impact search horizon.
    pub delta_horizon: Option<f64>,
    /// Overrides the `Π₃` projection search horizon.
    pub delta0_horizon: Option<f64>,
}

impl MapOptions {
    /// Backstop tolerance used for identity-type comparisons.
    pub fn tolerance_scale(&self) -> f64 {
        self.integrator.tol.abs.max(self.integrator.tol.rel)
    }
}

fn quarter_root(l4: f64) -> Result<f64, DmapError> {
    if l4 > 0.0 {
        Ok(libm::pow(l4, 0.25))
    } else {
        Err(DmapError::NonpositiveRadicand { value: l4 })
    }
}

/// Validated order-4 grazing point with `L_X⁴H(x*) > 0`.
#[derive(Debug, Clone)]
pub struct GrazingContext {
    sys: HybridSystem,
    x_star: Vec<f64>,
    report: GrazingReport,
}

impl GrazingContext {
    pub fn new(sys: HybridSystem, x_star: &[f64]) -> Result<Self, DmapError> {
        Self::with_tolerance(sys, x_star, DEFAULT_ZERO_TOL)
    }

    pub fn with_tolerance(sys: HybridSystem, x_star: &[f64], zero_tol: f64) -> Result<Self, DmapError> {
        let report = classify(&sys, x_star, zero_tol)?;
        if report.order() != Some(4) {
            return Err(DmapError::NotOrder4 { classification: report.classification });
        }
        quarter_root(report.lie[4])?;
        Ok(Self { sys, x_star: x_star.to_vec(), report })
    }

    pub fn system(&self) -> &HybridSystem {
        &self.sys
    }

    pub fn grazing_point(&self) -> &[f64] {
        &self.x_star
    }

    pub fn report(&self) -> &GrazingReport {
        &self.report
    }

    /// `L_X⁴H(x*)`.
    pub fn lie4(&self) -> f64 {
        self.report.lie[4]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaBase {
    /// `L_X⁴H(x*)`.
    #[default]
    GrazingPoint,
    /// `L_X⁴H(x₁)`.
    Start,
}

/// Leading term `-(4!/L_X⁴H)^{1/4} ε^{1/4}` of the impact time.
pub fn delta_asymptotic(ctx: &GrazingContext, x1: &[f64], eps: f64, base: DeltaBase) -> Result<f64, DmapError> {
    let l4 = match base {
        DeltaBase::GrazingPoint => ctx.lie4(),
        DeltaBase::Start => lie_value(&ctx.sys, x1, 4)?,
    };
    if l4 <= 0.0 {
        return Err(DmapError::NonpositiveRadicand { value: l4 });
    }
    Ok(-libm::pow(factorial(4) / l4 * eps, 0.25))
}

/// Leading term of the impact velocity `v = L_X H(x₂)`.
pub fn v_leading(ctx: &GrazingContext, eps: f64) -> Result<f64, DmapError> {
    let q = quarter_root(ctx.lie4())?;
    Ok(-order4_coefficient() * q * libm::pow(eps, 0.75))
}

/// Leading term of the projection time `Δ₀` back onto `Π₃`.
pub fn delta0_asymptotic(ctx: &GrazingContext, x1: &[f64], eps: f64) -> Result<f64, DmapError> {
    let l4 = ctx.lie4();
    let q = quarter_root(l4)?;
    let lw = lie_mixed(&ctx.sys, x1, 3)?;
    Ok(order4_coefficient() * (lw / l4) * q * libm::pow(eps, 0.75))
}

fn default_delta_horizon(sys: &HybridSystem, x1: &[f64], eps: f64) -> f64 {
    match lie_value(sys, x1, 4) {
        Ok(l4) if l4 > 0.0 && eps > 0.0 => 10.0 * libm::pow(factorial(4) / l4 * eps, 0.25),
        _ => 1.0,
    }
}

/// Numeric ZDM by literal flow composition.
pub fn zdm_numeric(sys: &HybridSystem, x1: &[f64], eps: f64, opts: &MapOptions) -> Result<DmResult, DmapError> {
    let mut r = DmResult::new(Method::Numeric, eps, x1);
    let horizon = opts.delta_horizon.unwrap_or_else(|| default_delta_horizon(sys, x1, eps));
    let hit = first_crossing(sys, x1, Functional::Boundary, Direction::Backward, horizon, &opts.integrator)?;
    let delta = hit.time;
    let x2 = hit.state;
    let v = lie_value(sys, &x2, 1)?;
    let w = sys.reset_direction(&x2)?;
    let x3: Vec<f64> = x2.iter().zip(&w).map(|(a, b)| a + b * v).collect();
    let back = -delta;
    let x4 = flow_to(sys, &x3, back, &opts.integrator)?;
    r.delta = Some(delta);
    r.x2 = Some(x2);
    r.v = Some(v);
    r.x3 = Some(x3);
    r.x4 = Some(x4);
    r.return_time = Some(back);
    Ok(r)
}

/// Numeric PDM: the numeric ZDM followed by the flow to the nearest
/// crossing of `Π₃` in either time direction.
pub fn pdm_numeric(sys: &HybridSystem, x1: &[f64], eps: f64, opts: &MapOptions) -> Result<DmResult, DmapError> {
    let mut r = zdm_numeric(sys, x1, eps, opts)?;
    let x4 = r.x4.clone().unwrap();
    let horizon = match opts.delta0_horizon {
        Some(h) => h,
        None => {
            let l4 = lie_value(sys, x1, 4)?;
            if l4 > 0.0 {
                let lw = lie_mixed(sys, x1, 3)?;
                let est = order4_coefficient() * (lw / l4) * libm::pow(l4, 0.25) * libm::pow(eps, 0.75);
                10.0 * est.abs() + 1e-6
            } else {
                1.0
            }
        }
    };
    let hit = nearest_crossing(sys, &x4, Functional::LieDerivative(3), horizon, &opts.integrator)?;
    r.delta0 = Some(hit.time);
    r.x5 = Some(hit.state);
    Ok(r)
}

/// Leading-order ZDM, `x₁ - C W(x₁) (L_X⁴H*)^{1/4} ε^{3/4}`.
pub fn zdm_analytic(ctx: &GrazingContext, x1: &[f64], eps: f64) -> Result<DmResult, DmapError> {
    let mut r = DmResult::new(Method::AnalyticOrder4, eps, x1);
    let scale = order4_coefficient() * quarter_root(ctx.lie4())? * libm::pow(eps, 0.75);
    let w = ctx.sys.reset_direction(x1)?;
    r.delta = Some(delta_asymptotic(ctx, x1, eps, DeltaBase::GrazingPoint)?);
    r.v = Some(v_leading(ctx, eps)?);
    r.x4 = Some(x1.iter().zip(&w).map(|(a, b)| a - b * scale).collect());
    r.remainder_order = Some(1.0);
    Ok(r)
}

/// Leading-order PDM,
/// `x₁ - [W(x₁) - (L_W L_X³H(x₁)/L_X⁴H*) X(x₁)] C (L_X⁴H*)^{1/4} ε^{3/4}`.
pub fn pdm_analytic(ctx: &GrazingContext, x1: &[f64], eps: f64) -> Result<DmResult, DmapError> {
    let mut r = zdm_analytic(ctx, x1, eps)?;
    let l4 = ctx.lie4();
    let scale = order4_coefficient() * quarter_root(l4)? * libm::pow(eps, 0.75);
    let w = ctx.sys.reset_direction(x1)?;
    let f = ctx.sys.field(x1)?;
    let ratio = lie_mixed(&ctx.sys, x1, 3)? / l4;
    r.delta0 = Some(delta0_asymptotic(ctx, x1, eps)?);
    r.x5 = Some((0..x1.len()).map(|i| x1[i] - (w[i] - ratio * f[i]) * scale).collect());
    Ok(r)
}

/// Euclidean distance.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}
