use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use super::ast::{Expr, Names};
use super::eval::{eval_expr, Arith, Component, EvalError};
use super::parse::{parse_system, ParseError};
use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParamDecl {
    pub name: String,
    pub default: f64,
}

/// Parsed `(X, H, W)` triple. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionSystem {
    dim: usize,
    field: Vec<Expr>,
    boundary: Expr,
    reset: Vec<Expr>,
    params: Vec<ParamDecl>,
    names: Names,
}

impl ExpressionSystem {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        parse_system(source)
    }

    pub(crate) fn from_parts(
        dim: usize,
        field: Vec<Expr>,
        boundary: Expr,
        reset: Vec<Expr>,
        params: Vec<ParamDecl>,
    ) -> Self {
        let names = Names {
            vars: Names::variables(dim),
            params: params.iter().map(|p| p.name.clone()).collect(),
        };
        Self { dim, field, boundary, reset, params, names }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &[Expr] {
        &self.field
    }

    pub fn boundary(&self) -> &Expr {
        &self.boundary
    }

    pub fn reset(&self) -> &[Expr] {
        &self.reset
    }

    pub fn params(&self) -> &[ParamDecl] {
        &self.params
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn defaults(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.default).collect()
    }

    /// Canonical source text; parsing it yields an equal system.
    pub fn to_source(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dim {};", self.dim);
        if !self.params.is_empty() {
            s.push_str("param ");
            for (i, p) in self.params.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{} = {}", p.name, p.default);
            }
            s.push_str(";\n");
        }
        let list = |s: &mut String, name: &str, exprs: &[Expr]| {
            let _ = write!(s, "{name} = [");
            for (i, e) in exprs.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{}", e.display(&self.names));
            }
            s.push_str("];\n");
        };
        list(&mut s, "X", &self.field);
        let _ = writeln!(s, "H = {};", self.boundary.display(&self.names));
        list(&mut s, "W", &self.reset);
        s
    }

    fn error(&self, component: Component, fault: (super::eval::DomainFault, &Expr, f64)) -> EvalError {
        EvalError {
            fault: fault.0,
            component,
            node: fault.1.display(&self.names).to_string(),
            at: fault.2,
        }
    }

    /// Evaluates any expression over this system's names.
    pub fn eval_expr<A: Arith>(
        &self,
        expr: &Expr,
        component: Component,
        point: &[A],
        params: &[f64],
    ) -> Result<A, EvalError> {
        debug_assert_eq!(point.len(), self.dim);
        eval_expr(expr, point, params).map_err(|f| self.error(component, f))
    }

    /// `X(x)` in any arithmetic.
    pub fn eval_field<A: Arith>(&self, point: &[A], params: &[f64]) -> Result<Vec<A>, EvalError> {
        self.field
            .iter()
            .enumerate()
            .map(|(i, e)| self.eval_expr(e, Component::Field(i), point, params))
            .collect()
    }

    pub fn eval_boundary<A: Arith>(&self, point: &[A], params: &[f64]) -> Result<A, EvalError> {
        self.eval_expr(&self.boundary, Component::Boundary, point, params)
    }

    pub fn eval_reset<A: Arith>(&self, point: &[A], params: &[f64]) -> Result<Vec<A>, EvalError> {
        self.reset
            .iter()
            .enumerate()
            .map(|(i, e)| self.eval_expr(e, Component::Reset(i), point, params))
            .collect()
    }
}

impl fmt::Display for ExpressionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    Unknown(String),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::Unknown(n) => write!(f, "unknown parameter `{n}`"),
        }
    }
}

impl core::error::Error for ParamError {}

/// A shared parsed system bound to concrete parameter values.
///
/// Cloning is cheap; one parse serves any number of parameter bindings.
#[derive(Debug, Clone)]
pub struct HybridSystem {
    def: Arc<ExpressionSystem>,
    values: Vec<f64>,
}

impl HybridSystem {
    pub fn new(def: ExpressionSystem) -> Self {
        Self::from_shared(Arc::new(def))
    }

    pub fn from_shared(def: Arc<ExpressionSystem>) -> Self {
        let values = def.defaults();
        Self { def, values }
    }

    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Ok(Self::new(ExpressionSystem::parse(source)?))
    }

    pub fn definition(&self) -> &ExpressionSystem {
        &self.def
    }

    pub fn shared_definition(&self) -> Arc<ExpressionSystem> {
        Arc::clone(&self.def)
    }

    pub fn dim(&self) -> usize {
        self.def.dim
    }

    pub fn param_values(&self) -> &[f64] {
        &self.values
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.def.param_index(name).map(|i| self.values[i])
    }

    /// `(name, value)` pairs in declaration order.
    pub fn bindings(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.def.params.iter().map(|p| p.name.as_str()).zip(self.values.iter().copied())
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self, ParamError> {
        self.set_param(name, value)?;
        Ok(self)
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ParamError> {
        let i = self.def.param_index(name).ok_or_else(|| ParamError::Unknown(name.into()))?;
        self.values[i] = value;
        Ok(())
    }

    /// Same parameters, boundary function multiplied by `factor`.
    pub fn with_scaled_boundary(&self, factor: f64) -> Self {
        let mut def = (*self.def).clone();
        def.boundary = Expr::binary(super::ast::BinOp::Mul, Expr::Const(factor), def.boundary);
        Self { def: Arc::new(def), values: self.values.clone() }
    }

    /// Same parameters, reset direction replaced by zero.
    pub fn with_zero_reset(&self) -> Self {
        let mut def = (*self.def).clone();
        def.reset = alloc::vec![Expr::Const(0.0); def.dim];
        Self { def: Arc::new(def), values: self.values.clone() }
    }

    pub fn field<A: Arith>(&self, x: &[A]) -> Result<Vec<A>, EvalError> {
        self.def.eval_field(x, &self.values)
    }

    pub fn boundary<A: Arith>(&self, x: &[A]) -> Result<A, EvalError> {
        self.def.eval_boundary(x, &self.values)
    }

    pub fn reset_direction<A: Arith>(&self, x: &[A]) -> Result<Vec<A>, EvalError> {
        self.def.eval_reset(x, &self.values)
    }

    /// Evaluates a free-standing expression with this binding.
    pub fn eval(&self, expr: &Expr, x: &[f64]) -> Result<f64, EvalError> {
        self.def.eval_expr(expr, Component::Other, x, &self.values)
    }

    /// Jet evaluation of the field; all inputs share one order.
    pub fn field_jet(&self, x: &[Jet]) -> Result<Vec<Jet>, EvalError> {
        self.field(x)
    }

    /// True when every reset component is the literal constant 0.
    pub fn reset_is_zero(&self) -> bool {
        self.def.reset.iter().all(Expr::is_zero)
    }
}
