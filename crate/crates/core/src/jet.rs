//! Truncated power-series ("jet") arithmetic.
//!
//! A [`Jet`] stores raw power-series coefficients `a[j]` of `Σ a[j] tʲ`,
//! truncated at order `K = a.len() - 1`. The derivative of order `j` at
//! `t = 0` is `j! · a[j]`. Coefficients are generic over [`Scalar`] so the
//! same recurrences run over plain `f64` and over first-order [`Dual`]
//! numbers (used to differentiate jets with respect to the base point).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

/// Coefficient field of a jet.
pub trait Scalar:
    Copy
    + PartialEq
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether values carry a derivative part.
    const TANGENT: bool;
    fn from_f64(v: f64) -> Self;
    /// Real part used for domain checks.
    fn re(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    const TANGENT: bool = false;
    fn from_f64(v: f64) -> Self {
        v
    }
    fn re(self) -> f64 {
        self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
}

/// First-order dual number `re + eps·η` with `η² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub const fn new(re: f64, eps: f64) -> Self {
        Self { re, eps }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl Scalar for Dual {
    const TANGENT: bool = true;
    fn from_f64(v: f64) -> Self {
        Dual::new(v, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn scale(self, s: f64) -> Self {
        Dual::new(self.re * s, self.eps * s)
    }
    fn sin(self) -> Self {
        Dual::new(libm::sin(self.re), self.eps * libm::cos(self.re))
    }
    fn cos(self) -> Self {
        Dual::new(libm::cos(self.re), -self.eps * libm::sin(self.re))
    }
    fn exp(self) -> Self {
        let e = libm::exp(self.re);
        Dual::new(e, self.eps * e)
    }
    fn ln(self) -> Self {
        Dual::new(libm::log(self.re), self.eps / self.re)
    }
    fn sqrt(self) -> Self {
        let s = libm::sqrt(self.re);
        Dual::new(s, self.eps / (2.0 * s))
    }
}

/// Truncated Taylor series with raw power-series coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T: Scalar = f64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    /// Constant jet of order `order`.
    pub fn constant(value: T, order: usize) -> Self {
        let mut coeffs = vec![T::from_f64(0.0); order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The jet of `value + t`.
    pub fn variable(value: T, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            j.coeffs[1] = T::from_f64(1.0);
        }
        j
    }

    /// Builds a jet from explicit coefficients; order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient list.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> T {
        self.coeffs[j]
    }

    pub fn set_coeff(&mut self, j: usize, v: T) {
        self.coeffs[j] = v;
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// `j! · a[j]`, the `j`-th derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> T {
        self.coeffs[j].scale(factorial(j))
    }

    fn zeros(order: usize) -> Vec<T> {
        vec![T::from_f64(0.0); order + 1]
    }

    fn check_order(&self, other: &Self) {
        debug_assert_eq!(self.order(), other.order(), "jet order mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_order(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| a + b).collect();
        Self { coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_order(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| a - b).collect();
        Self { coeffs }
    }

    pub fn neg(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&a| -a).collect() }
    }

    /// Cauchy product.
    pub fn mul(&self, o: &Self) -> Self {
        self.check_order(o);
        let k = self.order();
        let mut c = Self::zeros(k);
        for (n, cn) in c.iter_mut().enumerate() {
            let mut s = T::from_f64(0.0);
            for j in 0..=n {
                s = s + self.coeffs[j] * o.coeffs[n - j];
            }
            *cn = s;
        }
        Self { coeffs: c }
    }

    /// Series division; the caller checks `o.value() != 0`.
    pub fn div(&self, o: &Self) -> Self {
        self.check_order(o);
        let k = self.order();
        let b0 = o.coeffs[0];
        let mut c = Self::zeros(k);
        for n in 0..=k {
            let mut s = self.coeffs[n];
            for j in 1..=n {
                s = s - o.coeffs[j] * c[n - j];
            }
            c[n] = s / b0;
        }
        Self { coeffs: c }
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// [`Jet::div`].
    pub fn powi(&self, e: i32) -> Self {
        let k = self.order();
        let mut result = Self::constant(T::from_f64(1.0), k);
        let mut base = self.clone();
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        if e < 0 {
            Self::constant(T::from_f64(1.0), k).div(&result)
        } else {
            result
        }
    }

    pub fn exp(&self) -> Self {
        let k = self.order();
        let a = &self.coeffs;
        let mut e = Self::zeros(k);
        e[0] = a[0].exp();
        for n in 1..=k {
            let mut s = T::from_f64(0.0);
            for j in 1..=n {
                s = s + a[j].scale(j as f64) * e[n - j];
            }
            e[n] = s.scale(1.0 / n as f64);
        }
        Self { coeffs: e }
    }

    /// Natural log; the caller checks `value() > 0`.
    pub fn ln(&self) -> Self {
        let k = self.order();
        let a = &self.coeffs;
        let mut l = Self::zeros(k);
        l[0] = a[0].ln();
        for n in 1..=k {
            let mut s = T::from_f64(0.0);
            for j in 1..n {
                s = s + l[j].scale(j as f64) * a[n - j];
            }
            l[n] = (a[n] - s.scale(1.0 / n as f64)) / a[0];
        }
        Self { coeffs: l }
    }

    /// Square root; the caller checks `value() > 0` when `order() >= 1`.
    pub fn sqrt(&self) -> Self {
        let k = self.order();
        let a = &self.coeffs;
        let mut r = Self::zeros(k);
        r[0] = a[0].sqrt();
        let two_r0 = r[0].scale(2.0);
        for n in 1..=k {
            let mut s = a[n];
            for j in 1..n {
                s = s - r[j] * r[n - j];
            }
            r[n] = s / two_r0;
        }
        Self { coeffs: r }
    }

    /// Returns `(sin, cos)` from the coupled recurrence.
    pub fn sin_cos(&self) -> (Self, Self) {
        let k = self.order();
        let a = &self.coeffs;
        let mut s = Self::zeros(k);
        let mut c = Self::zeros(k);
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for n in 1..=k {
            let mut ss = T::from_f64(0.0);
            let mut cc = T::from_f64(0.0);
            for j in 1..=n {
                let ja = a[j].scale(j as f64);
                ss = ss + ja * c[n - j];
                cc = cc + ja * s[n - j];
            }
            s[n] = ss.scale(1.0 / n as f64);
            c[n] = -cc.scale(1.0 / n as f64);
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }
}

/// `n!` as `f64`.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(c: &[f64]) -> Jet {
        Jet::from_coeffs(c.to_vec())
    }

    #[test]
    fn product_rule_on_linear_jets() {
        let x = jet(&[1.0, 1.0, 0.0]);
        let y = jet(&[2.0, 0.0, 0.0]);
        assert_eq!(x.mul(&y).coeffs(), &[2.0, 2.0, 0.0]);
    }

    #[test]
    fn cube_of_shifted_variable() {
        // (y - 1)^3 with y = 1 + t
        let y = jet(&[1.0, 1.0, 0.0, 0.0]);
        let one = Jet::constant(1.0, 3);
        assert_eq!(y.sub(&one).powi(3).coeffs(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = jet(&[2.0, -1.0, 0.5, 3.0]);
        let b = jet(&[1.5, 0.25, -2.0, 1.0]);
        let q = a.mul(&b).div(&b);
        for (x, y) in q.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_power_matches_reciprocal() {
        let a = jet(&[2.0, 1.0, 0.0, 0.0]);
        let inv = a.powi(-2);
        // 1/(2+t)^2 = 1/4 - t/4 + 3t^2/16 - t^3/8
        let expect = [0.25, -0.25, 0.1875, -0.125];
        for (x, y) in inv.coeffs().iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn elementary_series_at_zero() {
        let t = Jet::variable(0.0, 5);
        let e = t.exp();
        let (s, c) = t.sin_cos();
        for j in 0..=5 {
            assert!((e.coeff(j) - 1.0 / factorial(j)).abs() < 1e-15);
        }
        let sin_ref = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0];
        let cos_ref = [1.0, 0.0, -0.5, 0.0, 1.0 / 24.0, 0.0];
        for j in 0..=5 {
            assert!((s.coeff(j) - sin_ref[j]).abs() < 1e-15);
            assert!((c.coeff(j) - cos_ref[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn ln_and_sqrt_series() {
        let x = Jet::variable(1.0, 4);
        let l = x.ln();
        let ln_ref = [0.0, 1.0, -0.5, 1.0 / 3.0, -0.25];
        let r = x.sqrt();
        let sqrt_ref = [1.0, 0.5, -0.125, 0.0625, -0.0390625];
        for j in 0..=4 {
            assert!((l.coeff(j) - ln_ref[j]).abs() < 1e-15);
            assert!((r.coeff(j) - sqrt_ref[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn dual_coefficients_carry_partials() {
        // d/dp of (p + t)^2 coefficients = (2p, 2, 0) -> partials (2, 0, 0)
        let x = Jet::from_coeffs(alloc::vec![Dual::new(3.0, 1.0), Dual::new(1.0, 0.0), Dual::new(0.0, 0.0)]);
        let sq = x.mul(&x);
        assert_eq!(sq.coeff(0), Dual::new(9.0, 6.0));
        assert_eq!(sq.coeff(1), Dual::new(6.0, 2.0));
        assert_eq!(sq.coeff(2), Dual::new(1.0, 0.0));
    }

    #[test]
    fn derivative_scales_by_factorial() {
        let j = jet(&[0.0, 0.0, 0.0, 0.0, 0.25]);
        assert_eq!(j.derivative(4), 6.0);
    }
}
