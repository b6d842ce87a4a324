use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree. Variables and parameters are indices into the owning
/// system's name tables.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Param(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power only.
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::Param(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.max_var(),
            Expr::Binary(_, l, r) => match (l.max_var(), r.max_var()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Renders with the given variable and parameter names.
    pub fn display<'a>(&'a self, names: &'a Names) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 0,
            _ => 5,
        }
    }
}

/// Variable and parameter names used for printing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Names {
    pub vars: Vec<String>,
    pub params: Vec<String>,
}

impl Names {
    /// `x, y` in the plane, `x1..xn` otherwise.
    pub fn variables(dim: usize) -> Vec<String> {
        if dim == 2 {
            alloc::vec![String::from("x"), String::from("y")]
        } else {
            (1..=dim).map(|i| format!("x{i}")).collect()
        }
    }
}

pub struct DisplayExpr<'a> {
    expr: &'a Expr,
    names: &'a Names,
}

impl DisplayExpr<'_> {
    fn child<'b>(&'b self, e: &'b Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = DisplayExpr { expr: e, names: self.names };
        if e.precedence() < min_prec {
            write!(f, "({d})")
        } else {
            write!(f, "{d}")
        }
    }
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => match self.names.vars.get(*i) {
                Some(n) => f.write_str(n),
                None => write!(f, "x{}", i + 1),
            },
            Expr::Param(i) => match self.names.params.get(*i) {
                Some(n) => f.write_str(n),
                None => write!(f, "p{i}"),
            },
            Expr::Neg(e) => {
                f.write_str("-")?;
                self.child(e, 3, f)
            }
            Expr::Binary(op, l, r) => {
                let (p, sym) = match op {
                    BinOp::Add => (1, " + "),
                    BinOp::Sub => (1, " - "),
                    BinOp::Mul => (2, "*"),
                    BinOp::Div => (2, "/"),
                };
                self.child(l, p, f)?;
                f.write_str(sym)?;
                self.child(r, p + 1, f)
            }
            Expr::Pow(b, e) => {
                self.child(b, 5, f)?;
                write!(f, "^{e}")
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.child(a, 0, f)?;
                f.write_str(")")
            }
        }
    }
}
