//! Infix parser.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
//! associative). A unary minus applied directly to a literal folds into a
//! negative literal, so `-2` parses to `Num(-2)` and `-x^2` to `-(x^2)`.

use std::sync::Arc;

use super::{Expr, Func, JacobiKind};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: format!("malformed number `{lit}`"),
            })?;
            out.push((start, Tok::Num(v)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(ParseError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((start, tok));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseError::Syntax {
                pos,
                msg: format!("expected {what}, found {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                pos,
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.bump();
                    let rhs = self.product()?;
                    lhs = Expr::Add(Arc::new(lhs), Arc::new(rhs));
                }
                Some(Tok::Op('-')) => {
                    self.bump();
                    let rhs = self.product()?;
                    lhs = Expr::Sub(Arc::new(lhs), Arc::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Arc::new(lhs), Arc::new(rhs));
                }
                Some(Tok::Op('/')) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Arc::new(lhs), Arc::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Num(v) => Expr::Num(-v),
                other => Expr::Neg(Arc::new(other)),
            });
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.bump();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Arc::new(base), Arc::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    self.bump();
                    let args = self.args()?;
                    return self.call(pos, &name, args);
                }
                if self.vars.contains(&name.as_str()) {
                    return Ok(Expr::Var(Arc::from(name.as_str())));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    _ => Err(ParseError::UnknownIdentifier { pos, name }),
                }
            }
            Some(t) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if let Some(Tok::RParen) = self.peek() {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.sum()?);
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => return Ok(args),
                _ => {
                    return Err(ParseError::Syntax {
                        pos,
                        msg: "expected `,` or `)` in argument list".into(),
                    })
                }
            }
        }
    }

    fn call(&self, pos: usize, name: &str, mut args: Vec<Expr>) -> Result<Expr, ParseError> {
        let arity = |expected: usize| -> Result<(), ParseError> {
            if args.len() == expected {
                Ok(())
            } else {
                Err(ParseError::Arity {
                    pos,
                    name: name.to_string(),
                    expected,
                    got: args.len(),
                })
            }
        };
        if let Some(f) = Func::from_name(name) {
            arity(1)?;
            return Ok(Expr::Func(f, Arc::new(args.pop().unwrap())));
        }
        let kind = match name {
            "sn" => JacobiKind::Sn,
            "cn" => JacobiKind::Cn,
            "dn" => JacobiKind::Dn,
            _ => {
                return Err(ParseError::UnknownIdentifier {
                    pos,
                    name: name.to_string(),
                })
            }
        };
        arity(2)?;
        let modulus = args.pop().unwrap();
        let k = modulus
            .eval(&[])
            .ok()
            .filter(|_| modulus.is_constant())
            .ok_or_else(|| ParseError::Syntax {
                pos,
                msg: format!("modulus of `{name}` must be a numeric constant"),
            })?;
        Ok(Expr::Jacobi(kind, k, Arc::new(args.pop().unwrap())))
    }
}

/// Parse `text` into an expression whose free variables are drawn from
/// `allowed_vars`.
pub fn parse(text: &str, allowed_vars: &[&str]) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        vars: allowed_vars,
    };
    let e = p.sum()?;
    if p.at < p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}
