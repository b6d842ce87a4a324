//! Numerical flow `φ(x, t)` of `x' = X(x)` and first-crossing location.
//!
//! The integrator is the Dormand–Prince 5(4) pair with its fourth-order
//! continuous extension. Backward time is forward integration of `-X`, so
//! there is a single stepping code path. Event location scans the dense
//! output of every accepted step at eight sub-points before refining,
//! because near a quartic tangency the functional is too flat for
//! endpoint sign checks to be reliable.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lie;
use crate::sysdsl::{EvalError, HybridSystem};

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Sub-samples per accepted step when scanning for sign changes.
pub const EVENT_SUBSTEPS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    Eval(EvalError),
    StepSizeUnderflow { t: f64 },
    MaxStepsExceeded { t: f64 },
    NonFiniteState { t: f64 },
    /// No sign change of the functional within the horizon.
    NoCrossing { horizon: f64 },
    /// Several crossings remain inside one step after step-size refinement.
    AmbiguousBracket { t: f64 },
}

impl From<EvalError> for FlowError {
    fn from(e: EvalError) -> Self {
        FlowError::Eval(e)
    }
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::Eval(e) => write!(f, "evaluation failed: {e}"),
            FlowError::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            FlowError::MaxStepsExceeded { t } => write!(f, "maximum number of steps exceeded at t = {t}"),
            FlowError::NonFiniteState { t } => write!(f, "state became non-finite at t = {t}"),
            FlowError::NoCrossing { horizon } => {
                write!(f, "no crossing within time horizon {horizon}")
            }
            FlowError::AmbiguousBracket { t } => {
                write!(f, "several crossings share one step near t = {t}")
            }
        }
    }
}

impl core::error::Error for FlowError {}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub tol: Tolerance,
    pub max_steps: usize,
    /// Upper bound on the step size (in |t|).
    pub max_step: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { tol: Tolerance::default(), max_steps: 1_000_000, max_step: f64::INFINITY }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: Tolerance) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSegment {
    pub t0: f64,
    pub t1: f64,
    coeffs: [Vec<f64>; 5],
}

impl DenseSegment {
    /// State at `theta ∈ [0, 1]` of the step.
    pub fn eval_theta(&self, theta: f64) -> Vec<f64> {
        let th1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        (0..r1.len())
            .map(|i| r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i]))))
            .collect()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.eval_theta((t - self.t0) / (self.t1 - self.t0))
    }

    pub fn interpolation_coefficients(&self) -> &[Vec<f64>; 5] {
        &self.coeffs
    }
}

/// Accepted nodes with dense output between consecutive nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub segments: Vec<DenseSegment>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    /// Dense-output state at any time inside the span; `None` outside it.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let (lo, hi) = {
            let (a, b) = (self.t_start(), self.t_end());
            if a <= b { (a, b) } else { (b, a) }
        };
        if !(lo..=hi).contains(&t) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.states[0].clone());
        }
        let forward = self.t_end() >= self.t_start();
        let idx = self
            .segments
            .partition_point(|s| if forward { s.t1 < t } else { s.t1 > t })
            .min(self.segments.len() - 1);
        Some(self.segments[idx].eval(t))
    }
}

fn weighted_rms(v: &[f64], y0: &[f64], y1: &[f64], tol: Tolerance) -> f64 {
    let n = v.len() as f64;
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sk = tol.abs + tol.rel * a.abs().max(b.abs());
            (e / sk) * (e / sk)
        })
        .sum();
    libm::sqrt(s / n)
}

fn axpy(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c != 0.0 {
            for (o, ki) in out.iter_mut().zip(k.iter()) {
                *o += h * c * ki;
            }
        }
    }
    out
}

/// Time-direction-aware stepping over `±X` in a reversed-time variable
/// `τ = |t - t0|`.
struct Stepper<'a> {
    sys: &'a HybridSystem,
    sign: f64,
    t0: f64,
    tau: f64,
    y: Vec<f64>,
    k1: Vec<f64>,
    h: f64,
    opts: IntegratorOptions,
    stats: StepStats,
}

struct Accepted {
    tau0: f64,
    tau1: f64,
    y1: Vec<f64>,
    dense: [Vec<f64>; 5],
}

impl<'a> Stepper<'a> {
    fn new(sys: &'a HybridSystem, x0: &[f64], t0: f64, sign: f64, span: f64, opts: IntegratorOptions) -> Result<Self, FlowError> {
        let mut s = Self {
            sys,
            sign,
            t0,
            tau: 0.0,
            y: x0.to_vec(),
            k1: Vec::new(),
            h: 0.0,
            opts,
            stats: StepStats::default(),
        };
        s.k1 = s.rhs(x0)?;
        s.h = s.initial_step(span)?;
        Ok(s)
    }

    fn rhs(&mut self, y: &[f64]) -> Result<Vec<f64>, FlowError> {
        self.stats.evaluations += 1;
        let mut f = self.sys.field(y)?;
        if self.sign < 0.0 {
            for v in &mut f {
                *v = -*v;
            }
        }
        Ok(f)
    }

    fn time(&self, tau: f64) -> f64 {
        self.t0 + self.sign * tau
    }

    fn initial_step(&mut self, span: f64) -> Result<f64, FlowError> {
        let tol = self.opts.tol;
        let y0 = self.y.clone();
        let f0 = self.k1.clone();
        let d0 = weighted_rms(&y0, &y0, &y0, tol);
        let d1 = weighted_rms(&f0, &y0, &y0, tol);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1 = axpy(&y0, h0, &[(1.0, &f0)]);
        let f1 = self.rhs(&y1)?;
        let diff: Vec<f64> = f1.iter().zip(&f0).map(|(a, b)| a - b).collect();
        let d2 = weighted_rms(&diff, &y0, &y0, tol) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            libm::pow(0.01 / d1.max(d2), 1.0 / 5.0)
        };
        Ok((100.0 * h0).min(h1).min(span).min(self.opts.max_step))
    }

    /// Advances one accepted step without passing `tau_end`.
    fn step(&mut self, tau_end: f64) -> Result<Accepted, FlowError> {
        let tol = self.opts.tol;
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(FlowError::MaxStepsExceeded { t: self.time(self.tau) });
            }
            let remaining = tau_end - self.tau;
            let mut h = self.h.min(self.opts.max_step);
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h <= 16.0 * f64::EPSILON * self.tau.abs().max(1.0) && !last {
                return Err(FlowError::StepSizeUnderflow { t: self.time(self.tau) });
            }
            let y = self.y.clone();
            let k1 = self.k1.clone();
            let k2 = self.rhs(&axpy(&y, h, &[(A21, &k1)]))?;
            let k3 = self.rhs(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = self.rhs(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = self.rhs(&axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
            let k6 = self.rhs(&axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = self.rhs(&y1)?;
            let err_vec: Vec<f64> = (0..y.len())
                .map(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]))
                .collect();
            let err = weighted_rms(&err_vec, &y, &y1, tol);
            if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
                if h <= 16.0 * f64::EPSILON * self.tau.abs().max(1.0) {
                    return Err(FlowError::NonFiniteState { t: self.time(self.tau) });
                }
                self.h = h * 0.1;
                self.stats.rejected += 1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                let _ = C2 + C3 + C4 + C5; // nodes implied by the tableau rows
                let ydiff: Vec<f64> = y1.iter().zip(&y).map(|(a, b)| a - b).collect();
                let bspl: Vec<f64> = (0..y.len()).map(|i| h * k1[i] - ydiff[i]).collect();
                let r4: Vec<f64> = (0..y.len()).map(|i| ydiff[i] - h * k7[i] - bspl[i]).collect();
                let r5: Vec<f64> = (0..y.len())
                    .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                    .collect();
                let tau0 = self.tau;
                let tau1 = if last { tau_end } else { self.tau + h };
                self.tau = tau1;
                self.y = y1.clone();
                self.k1 = k7;
                self.h = h * factor.min(if last { 1.0 } else { 5.0 }).max(if last { 1.0 } else { 0.2 });
                if last {
                    // keep the pre-truncation estimate for any continuation
                    self.h = self.h.max(h);
                }
                self.stats.accepted += 1;
                return Ok(Accepted { tau0, tau1, y1, dense: [y, ydiff, bspl, r4, r5] });
            }
            self.stats.rejected += 1;
            self.h = h * factor.min(1.0);
        }
    }

    fn segment(&self, a: &Accepted) -> DenseSegment {
        DenseSegment { t0: self.time(a.tau0), t1: self.time(a.tau1), coeffs: a.dense.clone() }
    }
}

/// Integrates from `x0` at `t_span.0` to `t_span.1` (either direction).
pub fn integrate(
    sys: &HybridSystem,
    x0: &[f64],
    t_span: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<Trajectory, FlowError> {
    let (t0, t1) = t_span;
    let span = (t1 - t0).abs();
    let mut traj = Trajectory { times: vec![t0], states: vec![x0.to_vec()], segments: Vec::new(), stats: StepStats::default() };
    if span == 0.0 {
        return Ok(traj);
    }
    let sign = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut st = Stepper::new(sys, x0, t0, sign, span, *opts)?;
    while st.tau < span {
        let acc = st.step(span)?;
        let seg = st.segment(&acc);
        traj.times.push(seg.t1);
        traj.states.push(acc.y1.clone());
        traj.segments.push(seg);
    }
    // land exactly on the requested end time
    if let Some(t) = traj.times.last_mut() {
        *t = t1;
    }
    if let Some(s) = traj.segments.last_mut() {
        s.t1 = t1;
    }
    traj.stats = st.stats;
    Ok(traj)
}

/// `φ(x0, t)`.
pub fn flow_to(sys: &HybridSystem, x0: &[f64], t: f64, opts: &IntegratorOptions) -> Result<Vec<f64>, FlowError> {
    Ok(integrate(sys, x0, (0.0, t), opts)?.final_state().to_vec())
}

/// Fixed-step fifth-order integration with `steps` equal steps. The global
/// error of a fixed-step scheme is smooth in `t`, which finite-difference
/// stencils rely on.
pub fn integrate_fixed(sys: &HybridSystem, x0: &[f64], t: f64, steps: usize) -> Result<Vec<f64>, FlowError> {
    let mut y = x0.to_vec();
    if t == 0.0 || steps == 0 {
        return Ok(y);
    }
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = sys.field(&y)?;
        let k2 = sys.field(&axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = sys.field(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = sys.field(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = sys.field(&axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = sys.field(&axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        y = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
    }
    Ok(y)
}

/// Scalar functional whose zero set is located along trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Functional {
    /// `H`, i.e. the impact boundary Σ.
    Boundary,
    /// `L_X^k H`; `LieDerivative(3)` is the surface Π₃.
    LieDerivative(usize),
}

impl Functional {
    pub fn eval(self, sys: &HybridSystem, x: &[f64]) -> Result<f64, EvalError> {
        match self {
            Functional::Boundary => sys.boundary(x),
            Functional::LieDerivative(0) => sys.boundary(x),
            Functional::LieDerivative(k) => lie::lie_value(sys, x, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EventHit {
    /// Signed time of the crossing.
    pub time: f64,
    pub state: Vec<f64>,
    /// Functional value at `state`.
    pub residual: f64,
    /// Final width of the time bracket.
    pub bracket_width: f64,
}

/// Largest `|functional|` accepted at a located event.
pub const EVENT_RESIDUAL_TOL: f64 = 1e-11;

fn sign_changed(a: f64, b: f64) -> bool {
    b == 0.0 || (a < 0.0) != (b < 0.0)
}

/// Refines a sign change of `g` on `[ta, tb]` (with `g(ta) = ga`,
/// `g(tb) = gb`) by Illinois-modified secant steps safeguarded by
/// bisection.
fn refine<G>(mut g: G, mut ta: f64, mut ga: f64, mut tb: f64, mut gb: f64) -> Result<(f64, f64, f64), FlowError>
where
    G: FnMut(f64) -> Result<f64, FlowError>,
{
    if gb == 0.0 {
        return Ok((tb, 0.0, 0.0));
    }
    let mut side = 0i8;
    for iter in 0..200 {
        let width = (tb - ta).abs();
        let scale = ta.abs().max(tb.abs()).max(1.0);
        let (tbest, gbest) = if ga.abs() < gb.abs() { (ta, ga) } else { (tb, gb) };
        if width <= 1e-13 * scale && gbest.abs() <= EVENT_RESIDUAL_TOL {
            return Ok((tbest, gbest, width));
        }
        if width <= 4.0 * f64::EPSILON * scale {
            // bracket exhausted at floating-point resolution
            return Ok((tbest, gbest, width));
        }
        let secant = tb - gb * (tb - ta) / (gb - ga);
        let mid = 0.5 * (ta + tb);
        let inside = secant.is_finite() && (secant - ta) * (secant - tb) < 0.0;
        let t = if iter % 3 == 2 || !inside { mid } else { secant };
        let gt = g(t)?;
        if gt == 0.0 {
            return Ok((t, 0.0, 0.0));
        }
        if sign_changed(ga, gt) {
            tb = t;
            gb = gt;
            if side == -1 {
                ga *= 0.5;
            }
            side = -1;
        } else {
            ta = t;
            ga = gt;
            if side == 1 {
                gb *= 0.5;
            }
            side = 1;
        }
    }
    let (tbest, gbest) = if ga.abs() < gb.abs() { (ta, ga) } else { (tb, gb) };
    Ok((tbest, gbest, (tb - ta).abs()))
}

/// First zero of `functional` along the flow from `x0`, nearest to `t = 0`
/// in the requested direction, within `|t| <= horizon`.
pub fn first_crossing(
    sys: &HybridSystem,
    x0: &[f64],
    functional: Functional,
    direction: Direction,
    horizon: f64,
    opts: &IntegratorOptions,
) -> Result<EventHit, FlowError> {
    let g0 = functional.eval(sys, x0)?;
    if g0 == 0.0 {
        return Ok(EventHit { time: 0.0, state: x0.to_vec(), residual: 0.0, bracket_width: 0.0 });
    }
    if horizon <= 0.0 || !horizon.is_finite() {
        return Err(FlowError::NoCrossing { horizon });
    }
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    };
    let mut local = *opts;
    let mut st = Stepper::new(sys, x0, 0.0, sign, horizon, local)?;
    let mut g_prev = g0;
    while st.tau < horizon {
        let saved = (st.tau, st.y.clone(), st.k1.clone(), st.h);
        let acc = st.step(horizon)?;
        let seg = st.segment(&acc);
        let mut samples = Vec::with_capacity(EVENT_SUBSTEPS + 1);
        samples.push((0.0, g_prev));
        for i in 1..=EVENT_SUBSTEPS {
            let theta = i as f64 / EVENT_SUBSTEPS as f64;
            let y = if i == EVENT_SUBSTEPS { acc.y1.clone() } else { seg.eval_theta(theta) };
            samples.push((theta, functional.eval(sys, &y)?));
        }
        let changes = samples.windows(2).filter(|w| sign_changed(w[0].1, w[1].1)).count();
        if changes > 1 {
            let width = (acc.tau1 - acc.tau0).abs();
            if width <= 1e-10 * acc.tau1.abs().max(1.0) {
                return Err(FlowError::AmbiguousBracket { t: seg.t0 });
            }
            // redo the step with a smaller cap so the crossings separate
            st.tau = saved.0;
            st.y = saved.1;
            st.k1 = saved.2;
            st.h = saved.3;
            local.max_step = 0.5 * width;
            st.opts = local;
            st.stats.accepted -= 1;
            continue;
        }
        if changes == 1 {
            let w = samples.windows(2).position(|w| sign_changed(w[0].1, w[1].1)).unwrap();
            let (tha, ga) = samples[w];
            let (thb, gb) = samples[w + 1];
            let (theta, residual, width) = refine(
                |th| Ok(functional.eval(sys, &seg.eval_theta(th))?),
                tha,
                ga,
                thb,
                gb,
            )?;
            let dt = seg.t1 - seg.t0;
            let state = if theta == 1.0 { acc.y1.clone() } else { seg.eval_theta(theta) };
            return Ok(EventHit {
                time: seg.t0 + theta * dt,
                state,
                residual,
                bracket_width: width * dt.abs(),
            });
        }
        g_prev = samples[EVENT_SUBSTEPS].1;
        if local.max_step.is_finite() {
            local.max_step = opts.max_step;
            st.opts = local;
        }
    }
    Err(FlowError::NoCrossing { horizon })
}

/// Nearest crossing in either time direction; ties go to positive time.
pub fn nearest_crossing(
    sys: &HybridSystem,
    x0: &[f64],
    functional: Functional,
    horizon: f64,
    opts: &IntegratorOptions,
) -> Result<EventHit, FlowError> {
    let fwd = first_crossing(sys, x0, functional, Direction::Forward, horizon, opts);
    let bwd = first_crossing(sys, x0, functional, Direction::Backward, horizon, opts);
    match (fwd, bwd) {
        (Ok(f), Ok(b)) => Ok(if f.time.abs() <= b.time.abs() { f } else { b }),
        (Ok(f), Err(FlowError::NoCrossing { .. })) => Ok(f),
        (Err(FlowError::NoCrossing { .. }), Ok(b)) => Ok(b),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial(c: f64) -> HybridSystem {
        HybridSystem::parse("dim 2; param c = 6, k = 1; X = [1, c*x^3]; H = y; W = [k, 0]")
            .unwrap()
            .with_param("c", c)
            .unwrap()
    }

    #[test]
    fn monomial_forward_closed_form() {
        let sys = monomial(6.0);
        let eps = 1e-4;
        let y = flow_to(&sys, &[0.0, -eps], 0.1, &IntegratorOptions::default()).unwrap();
        // x(t) = t, y(t) = -eps + 1.5 t^4
        assert!((y[0] - 0.1).abs() < 1e-9);
        assert!((y[1] - (-eps + 1.5 * 1e-4)).abs() < 1e-9);
    }

    #[test]
    fn monomial_backward_closed_form() {
        let sys = monomial(6.0);
        let y = flow_to(&sys, &[0.0, -1e-4], -0.2, &IntegratorOptions::default()).unwrap();
        assert!((y[0] + 0.2).abs() < 1e-9);
        assert!((y[1] - 0.0023).abs() < 1e-9);
    }

    #[test]
    fn zero_field_is_constant() {
        let sys = HybridSystem::parse("dim 2; X=[0,0]; H=y").unwrap();
        let tr = integrate(&sys, &[0.3, -0.7], (0.0, 5.0), &IntegratorOptions::default()).unwrap();
        for s in &tr.states {
            assert_eq!(s, &[0.3, -0.7]);
        }
        assert_eq!(tr.t_end(), 5.0);
    }

    #[test]
    fn dense_output_reproduces_nodes() {
        let sys = HybridSystem::parse("dim 2; X=[-(y-1)^3, x^3 - 0.1*(x^4+(y-1)^4-1)]; H=y").unwrap();
        let tr = integrate(&sys, &[0.2, -0.1], (0.0, -3.0), &IntegratorOptions::default()).unwrap();
        for (i, seg) in tr.segments.iter().enumerate() {
            let a = seg.eval(seg.t0);
            let b = seg.eval(seg.t1);
            for j in 0..2 {
                assert!((a[j] - tr.states[i][j]).abs() <= 1e-12);
                assert!((b[j] - tr.states[i + 1][j]).abs() <= 1e-12);
            }
        }
        assert!(tr.times.windows(2).all(|w| w[1] < w[0]));
        let mid = tr.eval(-1.5).unwrap();
        let direct = flow_to(&sys, &[0.2, -0.1], -1.5, &IntegratorOptions::default()).unwrap();
        assert!((mid[0] - direct[0]).abs() < 1e-9 && (mid[1] - direct[1]).abs() < 1e-9);
        assert!(tr.eval(0.5).is_none());
    }

    #[test]
    fn time_reversal_returns_home() {
        let sys = HybridSystem::parse("dim 2; X=[-(y-1)^3, x^3 - 0.1*(x^4+(y-1)^4-1)]; H=y").unwrap();
        let x0 = [0.3, 0.2];
        let opts = IntegratorOptions::default();
        let there = flow_to(&sys, &x0, 2.0, &opts).unwrap();
        let back = flow_to(&sys, &there, -2.0, &opts).unwrap();
        for j in 0..2 {
            assert!((back[j] - x0[j]).abs() <= 10.0 * 1e-12 * 10.0, "{back:?}");
        }
    }

    #[test]
    fn impact_time_of_monomial() {
        let sys = monomial(6.0);
        let hit = first_crossing(&sys, &[0.0, -1e-4], Functional::Boundary, Direction::Backward, 1.0, &IntegratorOptions::default()).unwrap();
        let exact = -libm::pow(2.0 / 3.0 * 1e-4, 0.25);
        assert!((hit.time - exact).abs() < 1e-9, "{} vs {}", hit.time, exact);
        assert!((hit.time + 0.0903602).abs() < 1e-7);
        assert!((hit.state[0] - exact).abs() < 1e-9);
        assert!(hit.state[1].abs() < 1e-9);
        assert!(hit.residual.abs() <= EVENT_RESIDUAL_TOL);
    }

    #[test]
    fn no_crossing_when_parallel() {
        let sys = HybridSystem::parse("dim 2; X=[1,0]; H=y").unwrap();
        let r = first_crossing(&sys, &[0.0, 1.0], Functional::Boundary, Direction::Backward, 10.0, &IntegratorOptions::default());
        assert_eq!(r.unwrap_err(), FlowError::NoCrossing { horizon: 10.0 });
    }

    #[test]
    fn crossing_at_start_is_time_zero() {
        let sys = monomial(6.0);
        let hit = first_crossing(&sys, &[0.0, 0.0], Functional::Boundary, Direction::Backward, 1.0, &IntegratorOptions::default()).unwrap();
        assert_eq!(hit.time, 0.0);
    }

    #[test]
    fn two_crossings_in_one_step_take_the_nearest() {
        // y(t) = -1 + (t - 2)^2 has zeros at t = 1 and t = 3; the zero field
        // in x lets the integrator take one huge step across both.
        let sys = HybridSystem::parse("dim 2; X=[1, 2*(x-2)]; H=y").unwrap();
        let hit = first_crossing(&sys, &[0.0, 3.0], Functional::Boundary, Direction::Forward, 10.0, &IntegratorOptions::default()).unwrap();
        assert!((hit.time - 1.0).abs() < 1e-10, "{}", hit.time);
    }

    #[test]
    fn nearest_crossing_prefers_smaller_time() {
        let sys = HybridSystem::parse("dim 2; X=[1, 0]; H=x - 0.25").unwrap();
        let hit = nearest_crossing(&sys, &[0.0, 0.0], Functional::Boundary, 1.0, &IntegratorOptions::default()).unwrap();
        assert!((hit.time - 0.25).abs() < 1e-12);
        let hit = nearest_crossing(&sys, &[0.5, 0.0], Functional::Boundary, 1.0, &IntegratorOptions::default()).unwrap();
        assert!((hit.time + 0.25).abs() < 1e-12);
    }

    #[test]
    fn fixed_step_matches_adaptive() {
        let sys = HybridSystem::parse("dim 2; X=[-(y-1)^3, x^3 - 0.1*(x^4+(y-1)^4-1)]; H=y").unwrap();
        let a = integrate_fixed(&sys, &[0.1, 0.1], 0.5, 200).unwrap();
        let b = flow_to(&sys, &[0.1, 0.1], 0.5, &IntegratorOptions::default()).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-11 && (a[1] - b[1]).abs() < 1e-11);
    }
}
