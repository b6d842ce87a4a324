//! Iterated Lie derivatives `L_X^k H` by Taylor-series propagation.
//!
//! The solution jet `x(t) = Σ c_j t^j` of `x' = X(x)` is built by Picard
//! recursion, `c_{j+1} = [X(x(t))]_j / (j + 1)`. Composing `H` with it gives
//! `H(φ(x, t))`, whose `k`-th derivative at `t = 0` is `L_X^k H(x)`. Running
//! the same recursion over [`Dual`] coefficients seeded along one coordinate
//! gives the partial derivative of every `L_X^k H` with respect to that
//! coordinate in one pass.

use alloc::vec;
use alloc::vec::Vec;

use crate::flow::{integrate_fixed, FlowError};
use crate::jet::{factorial, Dual, Jet, Scalar};
use crate::sysdsl::{EvalError, HybridSystem};

/// `values[k] = L_X^k H(point)` for `k = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LieTable {
    pub point: Vec<f64>,
    pub values: Vec<f64>,
}

impl LieTable {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// Taylor coefficients of `φ(x, t)` in `t` up to `order`.
pub fn solution_jet<T: Scalar>(sys: &HybridSystem, x: &[T], order: usize) -> Result<Vec<Jet<T>>, EvalError> {
    let mut jets: Vec<Jet<T>> = x.iter().map(|&v| Jet::constant(v, order)).collect();
    for j in 0..order {
        let f = sys.field(&jets)?;
        for (xi, fi) in jets.iter_mut().zip(&f) {
            xi.set_coeff(j + 1, fi.coeff(j).scale(1.0 / (j + 1) as f64));
        }
    }
    Ok(jets)
}

fn boundary_jet<T: Scalar>(sys: &HybridSystem, x: &[T], order: usize) -> Result<Jet<T>, EvalError> {
    let jets = solution_jet(sys, x, order)?;
    sys.boundary(&jets)
}

pub fn lie_derivatives(sys: &HybridSystem, x: &[f64], order: usize) -> Result<LieTable, EvalError> {
    let h = boundary_jet(sys, x, order)?;
    Ok(LieTable { point: x.to_vec(), values: (0..=order).map(|k| h.derivative(k)).collect() })
}

/// `L_X^k H(x)` alone.
pub fn lie_value(sys: &HybridSystem, x: &[f64], k: usize) -> Result<f64, EvalError> {
    if k == 0 {
        return sys.boundary(x);
    }
    Ok(boundary_jet(sys, x, k)?.derivative(k))
}

/// `grads[k][i] = ∂/∂x_i L_X^k H(x)` for `k = 0..=order`.
pub fn lie_gradients(sys: &HybridSystem, x: &[f64], order: usize) -> Result<Vec<Vec<f64>>, EvalError> {
    let n = x.len();
    let mut grads = vec![vec![0.0; n]; order + 1];
    for i in 0..n {
        let seeded: Vec<Dual> = x
            .iter()
            .enumerate()
            .map(|(j, &v)| Dual::new(v, if i == j { 1.0 } else { 0.0 }))
            .collect();
        let h = boundary_jet(sys, &seeded, order)?;
        for (k, g) in grads.iter_mut().enumerate() {
            g[i] = h.coeff(k).eps * factorial(k);
        }
    }
    Ok(grads)
}

/// `∇ L_X^k H(x)`.
pub fn lie_gradient(sys: &HybridSystem, x: &[f64], k: usize) -> Result<Vec<f64>, EvalError> {
    Ok(lie_gradients(sys, x, k)?.swap_remove(k))
}

/// `L_V L_X^k H(x)` for a constant direction `V`, in one seeded pass.
pub fn lie_directional(sys: &HybridSystem, x: &[f64], k: usize, dir: &[f64]) -> Result<f64, EvalError> {
    let seeded: Vec<Dual> = x.iter().zip(dir).map(|(&v, &d)| Dual::new(v, d)).collect();
    let h = boundary_jet(sys, &seeded, k)?;
    Ok(h.coeff(k).eps * factorial(k))
}

/// `L_W L_X^k H(x)` with `W` the reset direction.
pub fn lie_mixed(sys: &HybridSystem, x: &[f64], k: usize) -> Result<f64, EvalError> {
    let w = sys.reset_direction(x)?;
    lie_directional(sys, x, k, &w)
}

/// Finite-difference weights for derivative `m` at `x0` on nodes `xs`.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Accuracy order of the central stencils used by [`lie_fd_check`].
pub const FD_ACCURACY: usize = 8;

/// Default stencil spacing for the `k`-th time derivative, balancing
/// rounding (`~ u/h^k`) against truncation (`~ h^FD_ACCURACY`).
pub fn default_fd_step(k: usize) -> f64 {
    libm::pow(f64::EPSILON, 1.0 / (k + FD_ACCURACY) as f64)
}

/// Independent check: `d^k/dt^k H(φ(x, t))` at `t = 0` from central finite
/// differences of order [`FD_ACCURACY`]. The flow samples come from
/// fixed-step integration so their error is smooth in `t`.
pub fn lie_fd_check(sys: &HybridSystem, x: &[f64], order: usize, step: Option<f64>) -> Result<LieTable, FlowError> {
    let mut values = vec![sys.boundary(x)?];
    // fast flows have short time scales; shrink the default step with speed
    let speed = libm::sqrt(sys.field(x)?.iter().map(|v| v * v).sum::<f64>()).max(1.0);
    for k in 1..=order {
        let h = step.unwrap_or_else(|| default_fd_step(k) / speed);
        // symmetric stencils gain one order when 2p + 1 - k is odd
        let p = (k + FD_ACCURACY - 1) / 2;
        let nodes: Vec<f64> = (-(p as i64)..=p as i64).map(|i| i as f64 * h).collect();
        let w = fornberg_weights(0.0, &nodes, k);
        let mut acc = 0.0;
        for (&t, &wi) in nodes.iter().zip(&w) {
            if wi == 0.0 {
                continue;
            }
            let steps = (libm::round(t.abs() / h) as usize).max(1) * 16;
            let y = integrate_fixed(sys, x, t, steps)?;
            acc += wi * sys.boundary(&y)?;
        }
        values.push(acc);
    }
    Ok(LieTable { point: x.to_vec(), values })
}
