use alloc::string::String;
use core::fmt;

use super::ast::{BinOp, Expr, Func};
use crate::jet::{Jet, Scalar};

/// Value types the expression evaluator runs over: plain reals, duals,
/// and jets of either.
pub trait Arith: Clone {
    /// A constant with the same shape (jet order) as `self`.
    fn lift(&self, c: f64) -> Self;
    /// Real order-0 value, used for domain checks.
    fn base(&self) -> f64;
    /// Whether the value carries derivative information.
    fn differentiates(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn powi(&self, e: i32) -> Self;
    fn call(&self, f: Func) -> Self;
}

impl<T: Scalar> Arith for T {
    fn lift(&self, c: f64) -> Self {
        T::from_f64(c)
    }
    fn base(&self) -> f64 {
        self.re()
    }
    fn differentiates(&self) -> bool {
        T::TANGENT
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn div(&self, o: &Self) -> Self {
        *self / *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn powi(&self, e: i32) -> Self {
        let one = T::from_f64(1.0);
        let mut result = one;
        let mut base = *self;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                result = result * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        if e < 0 {
            one / result
        } else {
            result
        }
    }
    fn call(&self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sqrt => self.sqrt(),
        }
    }
}

impl<T: Scalar> Arith for Jet<T> {
    fn lift(&self, c: f64) -> Self {
        Jet::constant(T::from_f64(c), self.order())
    }
    fn base(&self) -> f64 {
        self.value().re()
    }
    fn differentiates(&self) -> bool {
        self.order() > 0 || self.value().differentiates()
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn powi(&self, e: i32) -> Self {
        Jet::powi(self, e)
    }
    fn call(&self, f: Func) -> Self {
        match f {
            Func::Sin => self.sin_cos().0,
            Func::Cos => self.sin_cos().1,
            Func::Exp => self.exp(),
            Func::Ln => self.ln(),
            Func::Sqrt => self.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainFault {
    DivisionByZero,
    LnNonPositive,
    SqrtNegative,
    /// `sqrt` at exactly zero has no derivative.
    SqrtNotDifferentiable,
}

impl fmt::Display for DomainFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainFault::DivisionByZero => "division by zero",
            DomainFault::LnNonPositive => "ln of a non-positive value",
            DomainFault::SqrtNegative => "sqrt of a negative value",
            DomainFault::SqrtNotDifferentiable => "sqrt is not differentiable at 0",
        })
    }
}

impl core::error::Error for DomainFault {}

/// Which expression of a system failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Component {
    Field(usize),
    Boundary,
    Reset(usize),
    /// A free-standing expression.
    Other,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Field(i) => write!(f, "X[{}]", i + 1),
            Component::Boundary => f.write_str("H"),
            Component::Reset(i) => write!(f, "W[{}]", i + 1),
            Component::Other => f.write_str("expression"),
        }
    }
}

/// Domain error with the failing component and the offending sub-expression.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub fault: DomainFault,
    pub component: Component,
    pub node: String,
    pub at: f64,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {} at `{}` (argument {})", self.fault, self.component, self.node, self.at)
    }
}

impl core::error::Error for EvalError {}

/// Evaluates `expr`; on failure returns the fault, the offending node and
/// the value that triggered it.
pub(crate) fn eval_expr<'e, A: Arith>(
    expr: &'e Expr,
    vars: &[A],
    params: &[f64],
) -> Result<A, (DomainFault, &'e Expr, f64)> {
    let proto = &vars[0];
    Ok(match expr {
        Expr::Const(c) => proto.lift(*c),
        Expr::Var(i) => vars[*i].clone(),
        Expr::Param(i) => proto.lift(params[*i]),
        Expr::Neg(a) => eval_expr(a, vars, params)?.neg(),
        Expr::Binary(op, l, r) => {
            let a = eval_expr(l, vars, params)?;
            let b = eval_expr(r, vars, params)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    if b.base() == 0.0 {
                        return Err((DomainFault::DivisionByZero, expr, b.base()));
                    }
                    a.div(&b)
                }
            }
        }
        Expr::Pow(b, e) => {
            let v = eval_expr(b, vars, params)?;
            if *e < 0 && v.base() == 0.0 {
                return Err((DomainFault::DivisionByZero, expr, 0.0));
            }
            v.powi(*e)
        }
        Expr::Call(f, a) => {
            let v = eval_expr(a, vars, params)?;
            let x = v.base();
            match f {
                Func::Ln if x <= 0.0 => return Err((DomainFault::LnNonPositive, expr, x)),
                Func::Sqrt if x < 0.0 => return Err((DomainFault::SqrtNegative, expr, x)),
                Func::Sqrt if x == 0.0 && v.differentiates() => {
                    return Err((DomainFault::SqrtNotDifferentiable, expr, x))
                }
                _ => v.call(*f),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Dual;

    #[test]
    fn dual_is_differentiating_and_f64_is_not() {
        assert!(!Arith::differentiates(&1.0_f64));
        assert!(Arith::differentiates(&Dual::new(1.0, 0.0)));
        assert!(!Arith::differentiates(&Jet::<f64>::constant(1.0, 0)));
        assert!(Arith::differentiates(&Jet::<f64>::constant(1.0, 2)));
    }
}
