//! Textual form of p-adic numbers: `p^v0*(c0 + c1*p + c2*p^2 + ...)`.
//!
//! Each coefficient is an integer (f = 1 polynomial labels), a
//! zeta-polynomial such as `1+z` or `2*z^2` (parenthesized when it is a
//! sum), or `1`/`z`/`z^k` for Teichmuller labels. `0` denotes zero. Plain
//! natural-number literals are also accepted on input and converted to
//! their base-p expansion.

use super::field::{Field, RepLabel, RepSystem, ResidueElement, DEFAULT_PRECISION};
use super::number::PAdicNumber;
use crate::error::{Error, Result};

fn format_label(field: &Field, label: &RepLabel) -> String {
    match label {
        RepLabel::Teich(None) => "0".to_string(),
        RepLabel::Teich(Some(0)) => "1".to_string(),
        RepLabel::Teich(Some(1)) => "z".to_string(),
        RepLabel::Teich(Some(k)) => format!("z^{k}"),
        RepLabel::Poly(r) => {
            if field.f() == 1 {
                return r.coeffs()[0].to_string();
            }
            let mut parts = Vec::new();
            for (deg, &c) in r.coeffs().iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let var = match deg {
                    0 => String::new(),
                    1 => "z".to_string(),
                    d => format!("z^{d}"),
                };
                let part = match (c, deg) {
                    (_, 0) => c.to_string(),
                    (1, _) => var,
                    (_, _) => format!("{c}*{var}"),
                };
                parts.push(part);
            }
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join("+")
            }
        }
    }
}

pub fn format_padic(x: &PAdicNumber) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let field = x.field();
    let terms = x.terms();
    let v0 = terms[0].0;
    let mut body = Vec::new();
    for (exp, label) in &terms {
        let offset = exp - v0;
        let mut c = format_label(field, label);
        if c.contains('+') {
            c = format!("({c})");
        }
        let term = match offset {
            0 => c,
            1 => format!("{c}*p"),
            k => format!("{c}*p^{k}"),
        };
        body.push(term);
    }
    format!("p^{}*({})", v0, body.join(" + "))
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    P,
    Z,
    Caret,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next(&mut self) -> Result<Tok> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos];
        self.pos += 1;
        Ok(match c {
            b'p' => Tok::P,
            b'z' => Tok::Z,
            b'^' => Tok::Caret,
            b'*' => Tok::Star,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Int(s.parse().map_err(|_| Error::Parse(format!("bad integer {s}")))?)
            }
            _ => return Err(Error::Parse(format!("unexpected character '{}'", c as char))),
        })
    }

    fn peek(&mut self) -> Result<Tok> {
        let save = self.pos;
        let t = self.next()?;
        self.pos = save;
        Ok(t)
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let got = self.next()?;
        if got != want {
            return Err(Error::Parse(format!("expected {want:?}, found {got:?}")));
        }
        Ok(())
    }
}

/// A coefficient: integer, zeta-polynomial, or Teichmuller power.
/// Monomial sums like `1+z` are only accepted when `allow_sum` is set,
/// i.e. inside parentheses; otherwise `+` separates expansion terms.
fn parse_label(lex: &mut Lexer, field: &Field, allow_sum: bool) -> Result<RepLabel> {
    match field.rep_system() {
        RepSystem::Teichmuller => match lex.next()? {
            Tok::Int(0) => Ok(RepLabel::Teich(None)),
            Tok::Int(1) => Ok(RepLabel::Teich(Some(0))),
            Tok::Z => {
                if lex.peek()? == Tok::Caret {
                    lex.next()?;
                    match lex.next()? {
                        Tok::Int(k) => {
                            let max = field.residue_size() - 2;
                            if k > max {
                                return Err(Error::Parse(format!(
                                    "Teichmuller exponent {k} exceeds p^f - 2 = {max}"
                                )));
                            }
                            Ok(RepLabel::Teich(Some(k)))
                        }
                        t => Err(Error::Parse(format!("expected exponent after z^, found {t:?}"))),
                    }
                } else {
                    Ok(RepLabel::Teich(Some(1)))
                }
            }
            t => Err(Error::Parse(format!(
                "expected Teichmuller label (0, 1, z, z^k), found {t:?}"
            ))),
        },
        RepSystem::Polynomial => {
            let mut coeffs = vec![0u64; field.f()];
            loop {
                // monomial: INT | z | z^k | INT*z | INT*z^k
                let mut scalar = 1u64;
                let mut deg: Option<usize> = None;
                match lex.next()? {
                    Tok::Int(n) => {
                        scalar = n;
                        if lex.peek()? == Tok::Star {
                            // could be c*z... but inside a coefficient the only
                            // '*' belongs to a zeta monomial; the outer caller
                            // never hands us a '*p' suffix unparenthesized
                            // unless f = 1, where deg stays None.
                            let save = lex.pos;
                            lex.next()?;
                            if lex.peek()? == Tok::Z {
                                lex.next()?;
                                deg = Some(1);
                            } else {
                                lex.pos = save;
                            }
                        }
                    }
                    Tok::Z => deg = Some(1),
                    t => return Err(Error::Parse(format!("expected coefficient, found {t:?}"))),
                }
                if deg == Some(1) && lex.peek()? == Tok::Caret {
                    lex.next()?;
                    match lex.next()? {
                        Tok::Int(k) => deg = Some(k as usize),
                        t => {
                            return Err(Error::Parse(format!(
                                "expected exponent after z^, found {t:?}"
                            )))
                        }
                    }
                }
                let d = deg.unwrap_or(0);
                if d >= field.f() {
                    return Err(Error::Parse(format!(
                        "zeta degree {d} out of range for f = {}",
                        field.f()
                    )));
                }
                if scalar >= field.p() {
                    return Err(Error::Parse(format!(
                        "coefficient {scalar} out of range for p = {}",
                        field.p()
                    )));
                }
                coeffs[d] = (coeffs[d] + scalar) % field.p();
                if allow_sum && lex.peek()? == Tok::Plus {
                    lex.next()?;
                } else {
                    break;
                }
            }
            Ok(RepLabel::Poly(ResidueElement::new(coeffs)))
        }
    }
}

/// Parses the canonical grammar, or a plain natural-number literal.
pub fn parse_padic(field: &Field, input: &str) -> Result<PAdicNumber> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Err(Error::Parse("empty p-adic literal".into()));
    }
    if trimmed == "0" {
        return Ok(PAdicNumber::zero(field.clone()));
    }
    if trimmed.bytes().all(|b| b.is_ascii_digit()) {
        let n: u64 = trimmed
            .parse()
            .map_err(|_| Error::Parse(format!("integer literal too large: {trimmed}")))?;
        return PAdicNumber::from_integer(field.clone(), n);
    }
    let mut lex = Lexer::new(trimmed);
    lex.expect(Tok::P)?;
    lex.expect(Tok::Caret)?;
    let neg = if lex.peek()? == Tok::Minus {
        lex.next()?;
        true
    } else {
        false
    };
    let v0 = match lex.next()? {
        Tok::Int(n) => {
            let v = n as i64;
            if neg {
                -v
            } else {
                v
            }
        }
        t => return Err(Error::Parse(format!("expected valuation offset, found {t:?}"))),
    };
    lex.expect(Tok::Star)?;
    lex.expect(Tok::LParen)?;
    let mut terms: Vec<(i64, RepLabel)> = Vec::new();
    let mut offset = 0i64;
    loop {
        let label = if lex.peek()? == Tok::LParen {
            lex.next()?;
            let l = parse_label(&mut lex, field, true)?;
            lex.expect(Tok::RParen)?;
            l
        } else {
            parse_label(&mut lex, field, false)?
        };
        // optional *p or *p^k
        let mut exp = offset;
        if lex.peek()? == Tok::Star {
            lex.next()?;
            lex.expect(Tok::P)?;
            if lex.peek()? == Tok::Caret {
                lex.next()?;
                match lex.next()? {
                    Tok::Int(k) => exp = k as i64,
                    t => return Err(Error::Parse(format!("expected exponent, found {t:?}"))),
                }
            } else {
                exp = 1;
            }
        }
        terms.push((v0 + exp, label));
        match lex.next()? {
            Tok::Plus => {
                offset = exp + 1;
            }
            Tok::RParen => break,
            t => return Err(Error::Parse(format!("expected '+' or ')', found {t:?}"))),
        }
    }
    if lex.next()? != Tok::End {
        return Err(Error::Parse("trailing input after p-adic literal".into()));
    }
    let top = terms.iter().map(|(e, _)| *e).max().unwrap_or(0);
    PAdicNumber::from_terms(field.clone(), &terms, DEFAULT_PRECISION.max(top + 1))
}
