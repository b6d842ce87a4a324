//! System-definition language: vector field `X`, boundary `H`, reset
//! direction `W`, and named parameters.

mod ast;
mod eval;
mod parse;
mod system;

pub use ast::{BinOp, DisplayExpr, Expr, Func, Names};
pub use eval::{Arith, Component, DomainFault, EvalError};
pub use parse::{ParseError, ParseErrorKind};
pub use system::{ExpressionSystem, HybridSystem, ParamDecl, ParamError};
