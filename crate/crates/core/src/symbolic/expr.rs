use std::fmt;

use thiserror::Error;

/// Free variables of the prescribed data: base coordinates `x1`, `x2` and height `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// Zero-based coordinate index (`X(0)` is `x1`).
    X(usize),
    U,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::U => f.write_str("u"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

/// Expression tree over `(x1, …, xn, u)`.
///
/// The node set is closed under [`Expr::diff`]. Construction through the
/// helper constructors (`add`, `mul`, …) folds constants and drops neutral
/// elements; the enum variants themselves are left unsimplified.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("division by zero in `{node}`")]
    DivisionByZero { node: String },
    #[error("log of non-positive value {value} in `{node}`")]
    LogDomain { node: String, value: f64 },
    #[error("non-finite result in `{node}`")]
    NonFinite { node: String },
    #[error("`{var}` is not bound (only {dim} base coordinate(s) available)")]
    UnboundVariable { var: Var, dim: usize },
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c)
    }

    pub fn u() -> Self {
        Expr::Var(Var::U)
    }

    pub fn x(axis: usize) -> Self {
        Expr::Var(Var::X(axis))
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn neg(a: Expr) -> Self {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (Some(x), _) if x == 0.0 => Expr::Const(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, k: i32) -> Self {
        match (k, a.as_const()) {
            (0, _) => Expr::Const(1.0),
            (1, _) => a,
            (_, Some(c)) if k > 0 || c != 0.0 => Expr::Const(c.powi(k)),
            _ => Expr::Pow(Box::new(a), k),
        }
    }

    pub fn call(func: Func, a: Expr) -> Self {
        match a.as_const() {
            Some(c) if func != Func::Log || c > 0.0 => Expr::Const(apply(func, c)),
            _ => Expr::Call(func, Box::new(a)),
        }
    }

    /// Whether the expression mentions any base coordinate.
    pub fn depends_on_x(&self) -> bool {
        self.max_x_axis().is_some()
    }

    pub fn depends_on_u(&self) -> bool {
        self.any_var(&|v| v == Var::U)
    }

    /// Largest zero-based coordinate index mentioned, if any.
    pub fn max_x_axis(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(Var::X(i)) => Some(*i),
            Expr::Var(Var::U) => None,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.max_x_axis(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_x_axis(), b.max_x_axis()) {
                    (Some(p), Some(q)) => Some(p.max(q)),
                    (p, q) => p.or(q),
                }
            }
        }
    }

    fn any_var(&self, pred: &dyn Fn(Var) -> bool) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => pred(*v),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.any_var(pred),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.any_var(pred) || b.any_var(pred)
            }
        }
    }

    /// Evaluates at base point `x` (length = grid dimension) and height `u`.
    pub fn eval(&self, x: &[f64], u: f64) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::U) => u,
            Expr::Var(Var::X(i)) => *x.get(*i).ok_or(EvalError::UnboundVariable {
                var: Var::X(*i),
                dim: x.len(),
            })?,
            Expr::Neg(a) => -a.eval(x, u)?,
            Expr::Add(a, b) => a.eval(x, u)? + b.eval(x, u)?,
            Expr::Sub(a, b) => a.eval(x, u)? - b.eval(x, u)?,
            Expr::Mul(a, b) => a.eval(x, u)? * b.eval(x, u)?,
            Expr::Div(a, b) => {
                let num = a.eval(x, u)?;
                let den = b.eval(x, u)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        node: self.to_string(),
                    });
                }
                num / den
            }
            Expr::Pow(a, k) => {
                let base = a.eval(x, u)?;
                if base == 0.0 && *k < 0 {
                    return Err(EvalError::DivisionByZero {
                        node: self.to_string(),
                    });
                }
                base.powi(*k)
            }
            Expr::Call(func, a) => {
                let arg = a.eval(x, u)?;
                if *func == Func::Log && arg <= 0.0 {
                    return Err(EvalError::LogDomain {
                        node: self.to_string(),
                        value: arg,
                    });
                }
                apply(*func, arg)
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite {
                node: self.to_string(),
            })
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.diff(var)),
            Expr::Add(a, b) => Expr::add(a.diff(var), b.diff(var)),
            Expr::Sub(a, b) => Expr::sub(a.diff(var), b.diff(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(var), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(var)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff(var), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff(var)),
                ),
                Expr::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, k) => Expr::mul(
                Expr::mul(Expr::Const(f64::from(*k)), Expr::pow((**a).clone(), k - 1)),
                a.diff(var),
            ),
            Expr::Call(func, a) => {
                let inner = (**a).clone();
                let outer = match func {
                    Func::Sin => Expr::call(Func::Cos, inner),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, inner)),
                    Func::Sinh => Expr::call(Func::Cosh, inner),
                    Func::Cosh => Expr::call(Func::Sinh, inner),
                    Func::Tanh => {
                        Expr::sub(Expr::Const(1.0), Expr::pow(Expr::call(Func::Tanh, inner), 2))
                    }
                    Func::Exp => Expr::call(Func::Exp, inner),
                    Func::Log => Expr::div(Expr::Const(1.0), inner),
                };
                Expr::mul(outer, a.diff(var))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

fn apply(func: Func, x: f64) -> f64 {
    match func {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Sinh => x.sinh(),
        Func::Cosh => x.cosh(),
        Func::Tanh => x.tanh(),
        Func::Exp => x.exp(),
        Func::Log => x.ln(),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_child(f, 4)
            }
            Expr::Add(a, b) => {
                a.fmt_child(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_child(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_child(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_child(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_child(f, 2)?;
                f.write_str(" * ")?;
                b.fmt_child(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_child(f, 2)?;
                f.write_str(" / ")?;
                b.fmt_child(f, 4)
            }
            Expr::Pow(a, k) => {
                a.fmt_child(f, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
