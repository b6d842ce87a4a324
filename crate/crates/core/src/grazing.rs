//! Grazing-order classification and points on `Π₃ ∩ {H = -ε}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lie::{lie_derivatives, lie_gradients};
use crate::sysdsl::{EvalError, HybridSystem};

pub const DEFAULT_ZERO_TOL: f64 = 1e-8;
/// Largest tested order is `2 * MAX_HALF_ORDER`.
pub const MAX_HALF_ORDER: usize = 4;
const MAX_NEWTON: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum Classification {
    /// `L_X H ≠ 0`.
    Transversal,
    /// Regular grazing point of order `order` (even).
    Grazing { order: usize },
    /// Every tested derivative vanishes, or the first non-vanishing one has
    /// odd order.
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Transversal => f.write_str("transversal"),
            Classification::Grazing { order } => write!(f, "order {order}"),
            Classification::Unclassified => f.write_str("unclassified"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GrazingReport {
    pub point: Vec<f64>,
    /// `lie[j] = L_X^j H(point)` for `j = 0..=2 K_max`.
    pub lie: Vec<f64>,
    pub classification: Classification,
    /// `∇L_X³H · X ≠ 0`, evaluated through the gradient route.
    pub transversality_ok: bool,
    pub transversality_value: f64,
    pub zero_tolerance: f64,
    /// The scaled threshold actually applied to the Lie values.
    pub threshold: f64,
}

impl GrazingReport {
    pub fn order(&self) -> Option<usize> {
        match self.classification {
            Classification::Grazing { order } => Some(order),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GrazingError {
    Eval(EvalError),
    NotOnBoundary { h: f64, tolerance: f64 },
    NoConvergence { iterations: usize, residual: f64 },
    JacobianSingular,
}

impl From<EvalError> for GrazingError {
    fn from(e: EvalError) -> Self {
        GrazingError::Eval(e)
    }
}

impl fmt::Display for GrazingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrazingError::Eval(e) => write!(f, "evaluation failed: {e}"),
            GrazingError::NotOnBoundary { h, tolerance } => {
                write!(f, "point is not on the boundary: |H| = {} > {tolerance}", h.abs())
            }
            GrazingError::NoConvergence { iterations, residual } => {
                write!(f, "Newton did not converge in {iterations} iterations (residual {residual:e})")
            }
            GrazingError::JacobianSingular => f.write_str("singular Jacobian in Newton iteration"),
        }
    }
}

impl core::error::Error for GrazingError {}

/// Classifies `x` by the first non-vanishing Lie derivative of `H`.
pub fn classify(sys: &HybridSystem, x: &[f64], zero_tol: f64) -> Result<GrazingReport, GrazingError> {
    let h = sys.boundary(x)?;
    if h.abs() > zero_tol {
        return Err(GrazingError::NotOnBoundary { h, tolerance: zero_tol });
    }
    let top = 2 * MAX_HALF_ORDER;
    let table = lie_derivatives(sys, x, top)?;
    let scale = table.values[1..].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let threshold = zero_tol * scale;
    let first = (1..=top).find(|&j| table.values[j].abs() > threshold);
    let classification = match first {
        Some(1) => Classification::Transversal,
        Some(j) if j % 2 == 0 => Classification::Grazing { order: j },
        _ => Classification::Unclassified,
    };
    let grads = lie_gradients(sys, x, 3)?;
    let f = sys.field(x)?;
    let transversality_value: f64 = grads[3].iter().zip(&f).map(|(a, b)| a * b).sum();
    Ok(GrazingReport {
        point: x.to_vec(),
        lie: table.values,
        classification,
        transversality_ok: transversality_value.abs() > threshold,
        transversality_value,
        zero_tolerance: zero_tol,
        threshold,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pi3Point {
    pub eps: f64,
    pub state: Vec<f64>,
    /// `H(state) + ε`.
    pub boundary_residual: f64,
    /// `L_X³H(state)`.
    pub pi3_residual: f64,
    pub iterations: usize,
}

fn converged(r_h: f64, r_3: f64, eps: f64) -> bool {
    r_h.abs() <= 1e-12 * eps.max(1.0) && r_3.abs() <= 1e-11
}

/// Solves `L_X³H(p) = 0`, `H(p) = -ε` by Newton's method from `seed`
/// (default `x* - ε eₙ`).
///
/// In dimension two the full system is solved. Above that the unknowns are
/// restricted to the plane through the seed spanned by `eₙ` and
/// `∇L_X³H(x*)`.
pub fn pi3_point(sys: &HybridSystem, x_star: &[f64], eps: f64, seed: Option<&[f64]>) -> Result<Pi3Point, GrazingError> {
    let n = x_star.len();
    if eps == 0.0 && seed.is_none() {
        let t = lie_derivatives(sys, x_star, 3)?;
        return Ok(Pi3Point {
            eps,
            state: x_star.to_vec(),
            boundary_residual: t.values[0],
            pi3_residual: t.values[3],
            iterations: 0,
        });
    }
    let mut p: Vec<f64> = match seed {
        Some(s) => s.to_vec(),
        None => {
            let mut s = x_star.to_vec();
            s[n - 1] -= eps;
            s
        }
    };
    // columns of the search directions (in dimension 2, the unit vectors)
    let dirs: [Vec<f64>; 2] = if n == 2 {
        [vec![1.0, 0.0], vec![0.0, 1.0]]
    } else {
        let mut en = vec![0.0; n];
        en[n - 1] = 1.0;
        let g = lie_gradients(sys, x_star, 3)?.swap_remove(3);
        let norm = libm::sqrt(g.iter().map(|v| v * v).sum());
        if norm == 0.0 {
            return Err(GrazingError::JacobianSingular);
        }
        [g.iter().map(|v| v / norm).collect(), en]
    };
    let mut residual = f64::INFINITY;
    for it in 0..=MAX_NEWTON {
        let grads = lie_gradients(sys, &p, 3)?;
        let t = lie_derivatives(sys, &p, 3)?;
        let r3 = t.values[3];
        let rh = t.values[0] + eps;
        residual = r3.abs().max(rh.abs());
        if converged(rh, r3, eps) {
            return Ok(Pi3Point { eps, state: p, boundary_residual: rh, pi3_residual: r3, iterations: it });
        }
        if it == MAX_NEWTON {
            break;
        }
        let dot = |g: &[f64], d: &[f64]| -> f64 { g.iter().zip(d).map(|(a, b)| a * b).sum() };
        let (a, b) = (dot(&grads[3], &dirs[0]), dot(&grads[3], &dirs[1]));
        let (c, d) = (dot(&grads[0], &dirs[0]), dot(&grads[0], &dirs[1]));
        let det = a * d - b * c;
        let scale = (a.abs() + b.abs()) * (c.abs() + d.abs());
        if det == 0.0 || det.abs() <= 1e-14 * scale {
            return Err(GrazingError::JacobianSingular);
        }
        let s0 = (d * r3 - b * rh) / det;
        let s1 = (a * rh - c * r3) / det;
        for i in 0..n {
            p[i] -= s0 * dirs[0][i] + s1 * dirs[1][i];
        }
        if p.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    Err(GrazingError::NoConvergence { iterations: MAX_NEWTON, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamiltonian(xi: f64) -> HybridSystem {
        HybridSystem::parse("dim 2; param xi=0.1, k=1; X=[-(y-1)^3, x^3 - xi*(x^4+(y-1)^4-1)]; H=y; W=[k,0]")
            .unwrap()
            .with_param("xi", xi)
            .unwrap()
    }

    #[test]
    fn paper_point_is_order_four() {
        let r = classify(&hamiltonian(0.1), &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.classification, Classification::Grazing { order: 4 });
        assert!((r.lie[4] - 6.0).abs() < 1e-12);
        assert!(r.transversality_ok);
        assert!((r.transversality_value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn parabola_is_order_two() {
        let sys = HybridSystem::parse("dim 2; X=[1, 2*x]; H=y").unwrap();
        let r = classify(&sys, &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.order(), Some(2));
    }

    #[test]
    fn vertical_flow_is_transversal() {
        let sys = HybridSystem::parse("dim 2; X=[0, 1]; H=y").unwrap();
        let r = classify(&sys, &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.classification, Classification::Transversal);
    }

    #[test]
    fn flat_flow_is_unclassified() {
        let sys = HybridSystem::parse("dim 2; X=[1, 0]; H=y").unwrap();
        let r = classify(&sys, &[0.3, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.classification, Classification::Unclassified);
    }

    #[test]
    fn odd_first_nonzero_is_unclassified() {
        let sys = HybridSystem::parse("dim 2; X=[1, 3*x^2]; H=y").unwrap();
        let r = classify(&sys, &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(r.classification, Classification::Unclassified);
    }

    #[test]
    fn off_boundary_is_rejected() {
        let sys = HybridSystem::parse("dim 2; X=[1, 6*x^3]; H=y").unwrap();
        assert!(matches!(classify(&sys, &[0.0, 1.0], DEFAULT_ZERO_TOL), Err(GrazingError::NotOnBoundary { .. })));
    }

    #[test]
    fn classification_survives_boundary_scaling() {
        let sys = hamiltonian(0.1);
        let big = sys.with_scaled_boundary(1e3);
        let a = classify(&sys, &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        let b = classify(&big, &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert_eq!(a.classification, b.classification);
        assert!((b.lie[4] - 6e3).abs() < 1e-8);
    }

    #[test]
    fn monomial_pi3_is_on_the_axis() {
        let sys = HybridSystem::parse("dim 2; X=[1, 6*x^3]; H=y; W=[1,0]").unwrap();
        let p = pi3_point(&sys, &[0.0, 0.0], 1e-4, None).unwrap();
        assert_eq!(p.state, vec![0.0, -1e-4]);
    }

    #[test]
    fn paper_pi3_point() {
        // Π₃ ∩ {y = -ε} computed independently in high precision
        let p = pi3_point(&hamiltonian(0.1), &[0.0, 0.0], 1e-3, None).unwrap();
        assert!((p.state[0] - 1.0714645e-5).abs() < 1e-11, "{:?}", p.state);
        assert!((p.state[1] + 1e-3).abs() <= 1e-12);
        assert!(p.pi3_residual.abs() <= 1e-11);
        let p = pi3_point(&hamiltonian(0.1), &[0.0, 0.0], 1e-6, None).unwrap();
        assert!((p.state[0] - 1.06667147e-8).abs() < 1e-14);
    }

    #[test]
    fn zero_depth_returns_the_grazing_point() {
        let p = pi3_point(&hamiltonian(0.1), &[0.0, 0.0], 0.0, None).unwrap();
        assert_eq!(p.state, vec![0.0, 0.0]);
        assert_eq!(p.boundary_residual, 0.0);
        assert_eq!(p.pi3_residual, 0.0);
    }

    #[test]
    fn pi3_point_converges_linearly_to_grazing_point() {
        let sys = hamiltonian(0.1);
        let mut ratios = Vec::new();
        for e in [1e-5, 1e-4, 1e-3] {
            let p = pi3_point(&sys, &[0.0, 0.0], e, None).unwrap();
            let d = libm::sqrt(p.state[0] * p.state[0] + p.state[1] * p.state[1]);
            ratios.push(d / e);
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi / lo < 1.01);
    }

    #[test]
    fn three_dimensional_plane_restriction() {
        let sys = HybridSystem::parse("dim 3; X=[1, 0, 6*x1^3 + x2]; H=x3; W=[1,0,0]").unwrap();
        let p = pi3_point(&sys, &[0.0, 0.0, 0.0], 1e-4, None).unwrap();
        assert!(p.pi3_residual.abs() <= 1e-11);
        assert!(p.boundary_residual.abs() <= 1e-12);
        assert!(p.state[1].abs() < 1e-14);
    }
}
