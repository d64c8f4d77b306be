//! Precedence-climbing parser for polynomial expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" integer)?
//! atom   := integer | identifier | "(" expr ")"
//! ```
//!
//! Division is only by nonzero constants, which covers rationals `a/b`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Polynomial, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax {
                pos: i,
                msg: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let pos = self.pos();
                    let den = self.unary()?;
                    if !den.is_constant() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "division by a non-constant".into(),
                        });
                    }
                    let c = den.constant_term();
                    if c.is_zero() {
                        return Err(Error::Syntax {
                            pos,
                            msg: "division by zero".into(),
                        });
                    }
                    acc = acc.scale(&c.inverse()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() != &Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                let e: u32 = n.try_into().map_err(|_| Error::Syntax {
                    pos,
                    msg: "exponent too large".into(),
                })?;
                if self.peek() == &Tok::Op('^') {
                    return self.syntax("chained exponents need parentheses");
                }
                Ok(base.pow(e))
            }
            Tok::Op('-') => Err(Error::NegativeExponent(pos)),
            _ => Err(Error::Syntax {
                pos,
                msg: "expected a nonnegative integer exponent".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(self
                .ring
                .constant(self.ring.field().from_rational(BigRational::from_integer(n)))),
            Tok::Ident(name) => {
                if name == self.ring.root_symbol() {
                    Ok(self.ring.constant(self.ring.field().zeta()))
                } else {
                    self.ring.var(&name)
                }
            }
            Tok::Op('(') => {
                let inner = self.expr()?;
                if self.peek() != &Tok::Op(')') {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }
}

pub(super) fn parse(text: &str, ring: &Ring) -> Result<Polynomial> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        ring,
    };
    let out = p.expr()?;
    if p.peek() != &Tok::End {
        return p.syntax("trailing input");
    }
    Ok(out)
}
