//! Infix surface syntax for data expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! exponent:= ['-'] INT | '(' ['-'] INT ')'
//! atom    := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'
//! VAR     := 'x1' | 'x2' | 'u'
//! FUNC    := sin | cos | sinh | cosh | tanh | exp | log
//! ```
//!
//! `-u^2` parses as `-(u^2)`. Exponents must be integer literals.

use std::str::FromStr;

use thiserror::Error;

use super::expr::{Expr, Func, Var};

/// Parse failure with a 1-based column into the source text.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn run(src: &str) -> Result<Self, ParseError> {
        let chars: Vec<char> = src.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<f64>().map_err(|_| ParseError {
                    column: col,
                    message: format!("malformed number `{text}`"),
                })?;
                toks.push((Tok::Num(value), col));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
            } else if "+-*/^()".contains(c) {
                toks.push((Tok::Op(c), col));
                i += 1;
            } else {
                return Err(ParseError {
                    column: col,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        toks.push((Tok::End, chars.len() + 1));
        Ok(Self { toks })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expect(&mut self, op: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{op}`, found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let parenthesized = *self.peek() == Tok::Op('(');
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Op('-');
        if negative {
            self.bump();
        }
        let col = self.column();
        let k = match self.bump() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= f64::from(i32::MAX) => v as i32,
            other => {
                return Err(ParseError {
                    column: col,
                    message: format!("exponent must be an integer literal, found {}", describe(&other)),
                })
            }
        };
        if parenthesized {
            self.expect(')')?;
        }
        Ok(Expr::pow(base, if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::call(func, arg));
                }
                match name.as_str() {
                    "u" => Ok(Expr::Var(Var::U)),
                    "x1" => Ok(Expr::Var(Var::X(0))),
                    "x2" => Ok(Expr::Var(Var::X(1))),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    _ => Err(ParseError {
                        column: col,
                        message: format!("unknown identifier `{name}`"),
                    }),
                }
            }
            other => Err(ParseError {
                column: col,
                message: format!("expected a value, found {}", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let lexer = Lexer::run(src)?;
    let mut parser = Parser {
        toks: lexer.toks,
        pos: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return parser.error(format!("unexpected {}", describe(parser.peek())));
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: &[f64], u: f64) -> f64 {
        parse(src).unwrap().eval(x, u).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 - 2 - 3", &[], 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", &[], 0.0), 1.0);
        assert_eq!(ev("-u^2", &[], 3.0), -9.0);
        assert_eq!(ev("2 * u^(-1)", &[], 4.0), 0.5);
        assert_eq!(ev("u^-2", &[], 2.0), 0.25);
        assert_eq!(ev("(1 + u) * 2", &[], 1.0), 4.0);
        assert_eq!(ev("1e-2 * 100", &[], 0.0), 1.0);
        assert!((ev("cos(pi)", &[], 0.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn data_example_parses() {
        let e = parse("(0.2*sin(x1) - u)/cosh(u)").unwrap();
        let v = e.eval(&[1.0], 0.5).unwrap();
        assert!((v - (0.2 * 1f64.sin() - 0.5) / 0.5f64.cosh()).abs() < 1e-15);
        assert_eq!(ev("x1 * x2 + u", &[2.0, 3.0], 1.0), 7.0);
    }

    #[test]
    fn errors_report_columns() {
        let err = parse("sin(u + )").unwrap_err();
        assert_eq!(err.column, 9);
        let err = parse("u ** 2").unwrap_err();
        assert_eq!(err.column, 4);
        let err = parse("foo(u)").unwrap_err();
        assert_eq!(err.column, 1);
        let err = parse("u^1.5").unwrap_err();
        assert_eq!(err.column, 3);
        let err = parse("u $ 1").unwrap_err();
        assert_eq!(err.column, 3);
        let err = parse("(u").unwrap_err();
        assert_eq!(err.column, 3);
        assert!(parse("u u").is_err());
        assert!(parse("").is_err());
    }
}
