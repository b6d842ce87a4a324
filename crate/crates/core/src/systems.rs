//! Built-in systems with closed-form references.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::sysdsl::HybridSystem;

pub const PAPER_HAMILTONIAN: &str = include_str!("../systems/paper-hamiltonian.sys");
pub const MONOMIAL4: &str = include_str!("../systems/monomial4.sys");
pub const PARABOLA2: &str = include_str!("../systems/parabola2.sys");

/// Registered names, in listing order.
pub const NAMES: [&str; 3] = ["paper-hamiltonian", "monomial4", "parabola2"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSystem(pub alloc::string::String);

impl fmt::Display for UnknownSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown built-in system `{}` (known: {})", self.0, NAMES.join(", "))
    }
}

impl core::error::Error for UnknownSystem {}

#[derive(Debug, Clone)]
pub struct BuiltinSystem {
    pub name: &'static str,
    pub source: &'static str,
    pub summary: &'static str,
    pub system: HybridSystem,
    /// The grazing point the system is built around.
    pub grazing_point: Vec<f64>,
    /// Expected grazing order at `grazing_point`.
    pub order: usize,
}

pub fn builtin(name: &str) -> Result<BuiltinSystem, UnknownSystem> {
    let (name, source, summary, order) = match name {
        "paper-hamiltonian" => (
            "paper-hamiltonian",
            PAPER_HAMILTONIAN,
            "perturbed quartic Hamiltonian, order-4 grazing at the origin",
            4,
        ),
        "monomial4" => ("monomial4", MONOMIAL4, "X = (1, c x^3), exact order-4 reference", 4),
        "parabola2" => ("parabola2", PARABOLA2, "X = (1, 2x), order-2 negative control", 2),
        other => return Err(UnknownSystem(other.into())),
    };
    let system = HybridSystem::parse(source).expect("built-in sources parse");
    Ok(BuiltinSystem { name, source, summary, system, grazing_point: vec![0.0, 0.0], order })
}

/// Exact impact time of `monomial4` from `(0, -ε)`: `-(4ε/c)^{1/4}`.
pub fn monomial_delta(c: f64, eps: f64) -> f64 {
    -libm::pow(4.0 * eps / c, 0.25)
}

/// Exact flow of `monomial4`.
pub fn monomial_flow(c: f64, x0: &[f64], t: f64) -> [f64; 2] {
    let x = x0[0] + t;
    [x, x0[1] + c * (libm::pow(x, 4.0) - libm::pow(x0[0], 4.0)) / 4.0]
}

/// Exact `L_X^k H` of `monomial4` at `(x, y)` for `k = 0..=4`.
pub fn monomial_lie_table(c: f64, p: &[f64]) -> [f64; 5] {
    let x = p[0];
    [p[1], c * x * x * x, 3.0 * c * x * x, 6.0 * c * x, 6.0 * c]
}

/// `x⁴ + (y - 1)⁴`, whose level set 1 is a periodic orbit of the
/// Hamiltonian system for every ξ.
pub fn hamiltonian_level(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1] - 1.0);
    x * x * x * x + y * y * y * y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{first_crossing, flow_to, integrate, Direction, Functional, IntegratorOptions};
    use crate::grazing::{classify, DEFAULT_ZERO_TOL};
    use crate::lie::lie_derivatives;

    #[test]
    fn all_sources_parse_and_classify() {
        for name in NAMES {
            let b = builtin(name).unwrap();
            let r = classify(&b.system, &b.grazing_point, DEFAULT_ZERO_TOL).unwrap();
            assert_eq!(r.order(), Some(b.order), "{name}");
        }
        assert_eq!(builtin("nope").unwrap_err(), UnknownSystem("nope".into()));
    }

    #[test]
    fn paper_defaults() {
        let b = builtin("paper-hamiltonian").unwrap();
        let v: Vec<_> = b.system.bindings().collect();
        assert_eq!(v, vec![("xi", 0.1), ("k", 1.0), ("k1", 0.0), ("k2", 0.0)]);
        let r = classify(&b.system, &[0.0, 0.0], DEFAULT_ZERO_TOL).unwrap();
        assert!((r.lie[4] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_impact_time_is_exact() {
        let b = builtin("monomial4").unwrap();
        for e in [1e-8, 1e-6, 1e-4, 1e-2] {
            let hit = first_crossing(&b.system, &[0.0, -e], Functional::Boundary, Direction::Backward, 1.0, &IntegratorOptions::default()).unwrap();
            let d = monomial_delta(6.0, e);
            assert!((hit.time - d).abs() <= 1e-9 * d.abs(), "eps={e}: {} vs {d}", hit.time);
        }
    }

    #[test]
    fn monomial_closed_forms_agree_with_generic_paths() {
        let b = builtin("monomial4").unwrap().system.with_param("c", 2.5).unwrap();
        let p = [0.4, -0.3];
        let t = lie_derivatives(&b, &p, 4).unwrap();
        for (a, e) in t.values.iter().zip(monomial_lie_table(2.5, &p)) {
            assert!((a - e).abs() < 1e-12);
        }
        let y = flow_to(&b, &p, -0.7, &IntegratorOptions::default()).unwrap();
        let e = monomial_flow(2.5, &p, -0.7);
        assert!((y[0] - e[0]).abs() < 1e-12 && (y[1] - e[1]).abs() < 1e-11);
    }

    #[test]
    fn unperturbed_orbit_is_invariant() {
        let sys = builtin("paper-hamiltonian").unwrap().system.with_param("xi", 0.0).unwrap();
        let start = [0.0, 0.0];
        // one revolution of x^4 + (y-1)^4 = 1 takes a little under 7.5 time units
        let tr = integrate(&sys, &start, (0.0, 7.5), &IntegratorOptions::default()).unwrap();
        let drift = tr.states.iter().map(|s| (hamiltonian_level(s) - 1.0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-8, "{drift}");
        let xs: Vec<f64> = tr.states.iter().map(|s| s[0]).collect();
        assert!(xs.iter().any(|&x| x > 0.9) && xs.iter().any(|&x| x < -0.9));
    }
}
