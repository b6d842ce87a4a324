//! Roots of `g + ε f` near a root of `g` of multiplicity `m`:
//! `δ_k = δ̄ + (-ε m! f(δ̄) / g⁽ᵐ⁾(δ̄))^{1/m} e^{2kπi/m}`, `0 <= k < m`.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::jet::factorial;

/// Largest `|g⁽ʲ⁾(δ̄)|`, `j < m`, accepted as zero.
pub const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbError {
    NotAMultiplicityMRoot { order: usize, value: f64 },
    ZeroLeadingDerivative,
    NoSignChange { a: f64, b: f64 },
}

impl fmt::Display for PerturbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbError::NotAMultiplicityMRoot { order, value } => {
                write!(f, "derivative of order {order} is {value}, not zero")
            }
            PerturbError::ZeroLeadingDerivative => f.write_str("derivative of order m vanishes"),
            PerturbError::NoSignChange { a, b } => write!(f, "no sign change on [{a}, {b}]"),
        }
    }
}

impl core::error::Error for PerturbError {}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedRootFamily {
    pub base: f64,
    pub multiplicity: usize,
    pub eps: f64,
    /// `-ε m! f(δ̄) / g⁽ᵐ⁾(δ̄)`.
    pub radicand: Complex64,
    pub roots: Vec<Complex64>,
}

impl PerturbedRootFamily {
    /// Real roots only (imaginary part exactly zero).
    pub fn real_roots(&self) -> Vec<f64> {
        self.roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect()
    }
}

/// `e^{2kπi/m}`, exact at multiples of a quarter turn.
fn unit_root(k: usize, m: usize) -> Complex64 {
    let k = k % m;
    if (4 * k).is_multiple_of(m) {
        return match 4 * k / m {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * k as f64 / m as f64)
}

/// `g_derivs(j)` returns `g⁽ʲ⁾(δ̄)` for `j <= m`.
pub fn perturbed_roots<F, G>(f: F, g_derivs: G, base: f64, m: usize, eps: f64) -> Result<PerturbedRootFamily, PerturbError>
where
    F: Fn(f64) -> f64,
    G: Fn(usize) -> f64,
{
    assert!(m >= 1, "multiplicity is at least 1");
    for j in 0..m {
        let v = g_derivs(j);
        if v.abs() > ROOT_TOL {
            return Err(PerturbError::NotAMultiplicityMRoot { order: j, value: v });
        }
    }
    let gm = g_derivs(m);
    if gm == 0.0 {
        return Err(PerturbError::ZeroLeadingDerivative);
    }
    let r = -eps * factorial(m) * f(base) / gm;
    let radicand = Complex64::new(r, 0.0);
    let principal = if r >= 0.0 {
        Complex64::new(if m == 1 { r } else { libm::pow(r, 1.0 / m as f64) }, 0.0)
    } else if m == 1 {
        Complex64::new(r, 0.0)
    } else {
        // principal branch of a negative real
        Complex64::from_polar(libm::pow(-r, 1.0 / m as f64), core::f64::consts::PI / m as f64)
    };
    let roots = (0..m).map(|k| Complex64::new(base, 0.0) + principal * unit_root(k, m)).collect();
    Ok(PerturbedRootFamily { base, multiplicity: m, eps, radicand, roots })
}

/// Bisection to an interval of width `1e-14` (or floating resolution).
pub fn brute_root_oracle<H: Fn(f64) -> f64>(h: H, bracket: (f64, f64)) -> Result<f64, PerturbError> {
    let (mut a, mut b) = bracket;
    let (mut fa, fb) = (h(a), h(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(PerturbError::NoSignChange { a, b });
    }
    while (b - a).abs() > 1e-14 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = h(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Polynomial `Σ c_j δ^j / j!` from derivative values `c_j`, e.g. the
/// Taylor expansion of `H(φ(x, δ))` from a Lie table.
pub fn taylor_polynomial(derivs: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |d| {
        derivs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (j, c)| acc * d + c / factorial(j))
    }
}
