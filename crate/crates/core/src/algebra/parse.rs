use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{Poly, Ring};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|x| x.1).collect();
            out.push((Tok::Num(s.parse().unwrap()), pos));
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].1.is_alphanumeric() || chars[j].1 == '_') {
                j += 1;
            }
            while j < chars.len() && chars[j].1 == '\'' {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|x| x.1).collect();
            out.push((Tok::Ident(s), pos));
            i = j;
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((t, pos));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    ring: &'a Ring,
}

impl Parser<'_> {
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

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = match self.bump() {
            Tok::Num(n) => n,
            _ => {
                self.at -= 1;
                return self.err("exponent must be a non-negative integer literal");
            }
        };
        let e: u32 = match u32::try_from(e) {
            Ok(v) if v <= 10_000 => v,
            _ => return self.err("exponent too large"),
        };
        if *self.peek() == Tok::Caret {
            return self.err("chained exponents need parentheses");
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<Poly> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(n) => {
                let r = if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.bump() {
                        Tok::Num(d) if !d.is_zero() => BigRational::new(n, d),
                        Tok::Num(_) => {
                            return Err(Error::Syntax {
                                pos,
                                msg: "zero denominator".into(),
                            })
                        }
                        _ => {
                            self.at -= 1;
                            return self.err("`/` is only allowed between integer literals");
                        }
                    }
                } else {
                    BigRational::from_integer(n)
                };
                let c = self.ring.field().from_rational(&r)?;
                self.check_no_implicit()?;
                Ok(self.ring.constant(c))
            }
            Tok::Ident(name) => {
                let i = self.ring.index_of(&name).ok_or(Error::UnknownVariable(name))?;
                self.check_no_implicit()?;
                Ok(self.ring.var(i))
            }
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.bump();
                self.check_no_implicit()?;
                Ok(e)
            }
            Tok::End => Err(Error::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            t => Err(Error::Syntax {
                pos,
                msg: format!("unexpected token {t:?}"),
            }),
        }
    }

    fn check_no_implicit(&self) -> Result<()> {
        match self.peek() {
            Tok::Num(_) | Tok::Ident(_) | Tok::LParen => self.err("implicit multiplication is not allowed; use `*`"),
            _ => Ok(()),
        }
    }
}

/// Parses an expression over the variables of `ring`.
pub fn parse_polynomial(text: &str, ring: &Ring) -> Result<Poly> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, ring };
    let r = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(r)
}
