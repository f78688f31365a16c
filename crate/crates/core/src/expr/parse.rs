//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! tuple    := expr ("," expr)*  |  "(" expr ("," expr)* ")"
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := ("-" | "+") unary | power
//! power    := primary ("^" exponent)*
//! exponent := ("-" | "+") exponent | primary          (no variables)
//! primary  := number | constant | variable | func "(" expr ")" | "(" expr ")"
//! ```
//!
//! Positions in errors are 0-based character offsets into the input.

use crate::error::{Error, Result};

use super::ast::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lexeme: String = chars[i..j].iter().collect();
                let value: f64 = lexeme.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("malformed number `{lexeme}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Syntax {
                        pos: start,
                        msg: format!("number `{lexeme}` out of range"),
                    });
                }
                i = j;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                i = j;
                out.push((Tok::Ident(name), start));
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let msg = if *self.peek() == Tok::End && wanted.contains(')') {
            format!("expected {wanted}, found end of input (unbalanced parenthesis)")
        } else {
            format!("expected {wanted}, found {}", self.peek().describe())
        };
        Error::Syntax { pos: self.pos(), msg }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn tuple(&mut self) -> Result<Vec<Expr>> {
        // A parenthesized list spanning the whole input is a tuple.
        if *self.peek() == Tok::LParen {
            let save = self.at;
            self.bump();
            let mut items = vec![self.expr()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                items.push(self.expr()?);
            }
            if items.len() > 1 {
                self.expect(Tok::RParen, "`,` or `)`")?;
                if *self.peek() != Tok::End {
                    return Err(self.unexpected("end of input"));
                }
                return Ok(items);
            }
            self.at = save;
        }
        let mut items = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            items.push(self.expr()?);
        }
        if *self.peek() != Tok::End {
            return Err(self.unexpected("an operator, `,` or end of input"));
        }
        Ok(items)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            let exponent = self.exponent()?;
            if !exponent.is_constant() {
                return Err(Error::Syntax {
                    pos,
                    msg: "exponent must be a constant expression".into(),
                });
            }
            base = Expr::Pow(Box::new(base), Box::new(exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.exponent()?)))
            }
            Tok::Plus => {
                self.bump();
                self.exponent()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(x) => Ok(Expr::Const(x)),
            Tok::LParen => {
                let inner = self.expr()?;
                if *self.peek() == Tok::Comma {
                    return Err(Error::Syntax {
                        pos: self.pos(),
                        msg: "tuple is only allowed as the whole definition".into(),
                    });
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(k) = self.vars.iter().position(|v| *v == name) {
                    if *self.peek() == Tok::LParen {
                        return Err(Error::Arity(format!(
                            "variable `{name}` at {pos} cannot be called"
                        )));
                    }
                    return Ok(Expr::Var(k));
                }
                match name.as_str() {
                    "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => return Ok(Expr::Const(std::f64::consts::E)),
                    _ => {}
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(Error::UnknownIdentifier { name, pos });
                };
                self.expect(Tok::LParen, "`(` after function name")?;
                let arg = self.expr()?;
                if *self.peek() == Tok::Comma {
                    let mut n = 1;
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        self.expr()?;
                        n += 1;
                    }
                    return Err(Error::Arity(format!(
                        "`{}` at {pos} takes 1 argument, got {n}",
                        func.name()
                    )));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            other => Err(Error::Syntax {
                pos,
                msg: format!("unexpected {}", other.describe()),
            }),
        }
    }
}

/// Parses a comma-separated list of component expressions over `vars`.
pub fn parse_components(text: &str, vars: &[&str]) -> Result<Vec<Expr>> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, vars };
    p.tuple()
}

/// Parses a single expression over `vars`.
pub fn parse_expr(text: &str, vars: &[&str]) -> Result<Expr> {
    let mut items = parse_components(text, vars)?;
    if items.len() != 1 {
        return Err(Error::Arity(format!(
            "expected a single expression, got {} components",
            items.len()
        )));
    }
    Ok(items.remove(0))
}
