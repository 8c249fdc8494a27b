//! Expression parser shared by the library and the CLI.
//!
//! Grammar:
//!   expr   := ['-'] term (('+'|'-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ('^' int)?
//!   atom   := rational | var | generator | '(' expr ')'
//!
//! Generators `e1..el` are only meaningful in enveloping-algebra element
//! arguments; `poly_parse` rejects them.

use std::sync::Arc;

use num::BigInt;

use crate::error::{LiraError, Result};
use crate::ring::{rat, BaseRing, Mono, Poly, Rat};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rat),
    Var(usize),
    Gen(usize),
    Pow(Box<Expr>, i64),
    Mul(Vec<Expr>),
    /// Signed sum; `true` means the summand is subtracted.
    Sum(Vec<(bool, Expr)>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().unwrap();
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => {
                return Err(LiraError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    ring: &'a Arc<BaseRing>,
    allow_generators: bool,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(LiraError::Syntax {
                pos,
                msg: format!("expected {t:?}, found {got:?}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = Vec::new();
        let neg = matches!(self.peek(), Some(Tok::Minus));
        if neg {
            self.bump();
        }
        parts.push((neg, self.term()?));
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    parts.push((false, self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    parts.push((true, self.term()?));
                }
                _ => break,
            }
        }
        Ok(Expr::Sum(parts))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            factors.push(self.factor()?);
        }
        Ok(Expr::Mul(factors))
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let pos = self.here();
            let neg = matches!(self.peek(), Some(Tok::Minus));
            if neg {
                self.bump();
            }
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let mut e: i64 = n.try_into().map_err(|_| LiraError::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    if neg {
                        e = -e;
                    }
                    Ok(Expr::Pow(Box::new(base), e))
                }
                got => Err(LiraError::Syntax {
                    pos,
                    msg: format!("expected integer exponent, found {got:?}"),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Int(n)) => {
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.bump();
                    let dpos = self.here();
                    match self.bump() {
                        Some(Tok::Int(d)) if d > BigInt::from(0) => {
                            Ok(Expr::Num(Rat::new(n, d)))
                        }
                        got => Err(LiraError::Syntax {
                            pos: dpos,
                            msg: format!("expected positive denominator, found {got:?}"),
                        }),
                    }
                } else {
                    Ok(Expr::Num(Rat::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => {
                if let Some(i) = self.ring.var_index(&name) {
                    return Ok(Expr::Var(i));
                }
                if self.allow_generators {
                    if let Some(num) = name.strip_prefix('e') {
                        if let Ok(k) = num.parse::<usize>() {
                            if k >= 1 {
                                return Ok(Expr::Gen(k - 1));
                            }
                        }
                    }
                }
                Err(LiraError::Domain(format!("unknown variable `{name}`")))
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            got => Err(LiraError::Syntax {
                pos,
                msg: format!("expected atom, found {got:?}"),
            }),
        }
    }
}

pub fn parse_expr(ring: &Arc<BaseRing>, text: &str, allow_generators: bool) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ring,
        allow_generators,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(LiraError::Syntax {
            pos: p.here(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Parses an expression into a normal-form ring element.
pub fn poly_parse(ring: &Arc<BaseRing>, text: &str) -> Result<Poly> {
    let e = parse_expr(ring, text, false)?;
    eval_poly(ring, &e)
}

pub fn eval_poly(ring: &Arc<BaseRing>, e: &Expr) -> Result<Poly> {
    match e {
        Expr::Num(r) => Ok(Poly::constant(ring, r.clone())),
        Expr::Var(i) => Ok(Poly::var(ring, *i)),
        Expr::Gen(_) => Err(LiraError::Domain(
            "generators are only valid in enveloping-algebra elements".into(),
        )),
        Expr::Pow(b, k) => {
            let base = eval_poly(ring, b)?;
            if *k >= 0 {
                Ok(base.pow(*k as u32))
            } else {
                // negative exponents only directly on Laurent variables
                if let Expr::Var(i) = **b {
                    if ring.is_laurent(i) {
                        let mut exp = vec![0; ring.nvars()];
                        exp[i] = *k;
                        return Poly::monomial(ring, Mono(exp), rat(1));
                    }
                }
                Err(LiraError::Domain(
                    "negative exponent on non-Laurent factor".into(),
                ))
            }
        }
        Expr::Mul(fs) => {
            let mut acc = Poly::one(ring);
            for f in fs {
                acc = acc.mul(&eval_poly(ring, f)?);
            }
            Ok(acc)
        }
        Expr::Sum(parts) => {
            let mut acc = Poly::zero(ring);
            for (neg, part) in parts {
                let p = eval_poly(ring, part)?;
                acc = if *neg { acc.sub(&p) } else { acc.add(&p) };
            }
            Ok(acc)
        }
    }
}
