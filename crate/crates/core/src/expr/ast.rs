use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree over a fixed list of variables.
///
/// `Var(k)` refers to the k-th declared variable (`u`, `v` for surfaces,
/// `t` for curves). Exponents of `Pow` are variable-free by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Evaluates a variable-free expression.
    pub fn eval_constant(&self) -> Result<f64> {
        Ok(self.eval_jet(&[])?.value())
    }

    pub fn eval_jet(&self, vars: &[Jet]) -> Result<Jet> {
        let out = match self {
            Expr::Const(c) => Jet::constant(*c),
            Expr::Var(k) => *vars
                .get(*k)
                .ok_or_else(|| Error::Eval(format!("variable #{k} not bound")))?,
            Expr::Neg(a) => -a.eval_jet(vars)?,
            Expr::Binary(op, a, b) => {
                let a = a.eval_jet(vars)?;
                let b = b.eval_jet(vars)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.value() == 0.0 {
                            return Err(Error::Eval("division by zero".into()));
                        }
                        a / b
                    }
                }
            }
            Expr::Call(f, a) => {
                let a = a.eval_jet(vars)?;
                let x = a.value();
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Tanh => a.tanh(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(Error::Eval(format!("log of non-positive value {x}")));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if x <= 0.0 {
                            return Err(Error::Eval(format!("sqrt of non-positive value {x}")));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Pow(base, exponent) => {
                let p = exponent.eval_constant()?;
                let b = base.eval_jet(vars)?;
                if p.fract() == 0.0 && p.abs() <= 64.0 {
                    if p < 0.0 && b.value() == 0.0 {
                        return Err(Error::Eval("zero raised to a negative power".into()));
                    }
                    b.powi(p as i32)
                } else {
                    if b.value() <= 0.0 {
                        return Err(Error::Eval(format!(
                            "non-integer power {p} of non-positive value {}",
                            b.value()
                        )));
                    }
                    b.powf(p)
                }
            }
        };
        if !out.is_finite() {
            return Err(Error::Eval("non-finite result".into()));
        }
        Ok(out)
    }

    /// Writes the tree fully parenthesized so that re-parsing reproduces it.
    pub fn write_with(&self, names: &[&str], out: &mut impl fmt::Write) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(out, "{c:?}"),
            Expr::Var(k) => write!(out, "{}", names.get(*k).copied().unwrap_or("?")),
            Expr::Neg(a) => {
                out.write_str("(-")?;
                a.write_with(names, out)?;
                out.write_char(')')
            }
            Expr::Call(f, a) => {
                write!(out, "{}(", f.name())?;
                a.write_with(names, out)?;
                out.write_char(')')
            }
            Expr::Binary(op, a, b) => {
                out.write_char('(')?;
                a.write_with(names, out)?;
                write!(out, " {} ", op.symbol())?;
                b.write_with(names, out)?;
                out.write_char(')')
            }
            Expr::Pow(a, b) => {
                out.write_char('(')?;
                a.write_with(names, out)?;
                out.write_str(")^(")?;
                b.write_with(names, out)?;
                out.write_char(')')
            }
        }
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        let mut s = String::new();
        self.write_with(names, &mut s).expect("writing to a String");
        s
    }
}
