//! Canonical text form of coefficients.
//!
//! Terms print in descending canonical order, e.g. `-1/2*b1*La2^-1`.
//! Rational functions print as `(num)/(den)`. `parse_coeff` inverts
//! `to_canonical` exactly.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AlgebraError, CoeffExpr, Monomial, Poly, Rat, RatFunc, Symbols};

impl CoeffExpr {
    pub fn to_canonical(&self, syms: &Symbols) -> String {
        match self {
            CoeffExpr::Rat(r) => fmt_rat(r),
            CoeffExpr::Poly(p) => fmt_poly(p, syms),
            CoeffExpr::Fun(f) => {
                if f.den().as_constant().map(|c| c.is_one()).unwrap_or(false) {
                    fmt_poly(f.num(), syms)
                } else {
                    format!("({})/({})", fmt_poly(f.num(), syms), fmt_poly(f.den(), syms))
                }
            }
        }
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_term(c: &Rat, m: &Monomial, syms: &Symbols) -> String {
    let mut factors: Vec<String> = Vec::new();
    let abs = c.abs();
    if m.is_one() || !abs.is_one() {
        factors.push(fmt_rat(&abs));
    }
    for &(s, e) in m.exps() {
        if e == 1 {
            factors.push(syms.name(s).to_string());
        } else {
            factors.push(format!("{}^{}", syms.name(s), e));
        }
    }
    factors.join("*")
}

fn fmt_poly(p: &Poly, syms: &Symbols) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
        if i == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&fmt_term(c, m, syms));
    }
    out
}

/// Parse a rational written as `p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, AlgebraError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        None => (s, "1"),
        Some((a, b)) => (a, b),
    };
    let n: BigInt = num
        .trim()
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("bad integer {num:?}")))?;
    let d: BigInt = den
        .trim()
        .parse()
        .map_err(|_| AlgebraError::Parse(format!("bad integer {den:?}")))?;
    if d.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    Ok(Rat::new(n, d))
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn next_tok(&mut self) -> Result<Tok, AlgebraError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos];
        self.pos += 1;
        Ok(match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Int(text.parse().unwrap())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos - 1;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Name(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
            }
            other => return Err(AlgebraError::Parse(format!("unexpected byte {:?}", other as char))),
        })
    }
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    syms: &'a Symbols,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        self.toks.get(self.pos).unwrap_or(&Tok::End)
    }

    fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        self.pos += 1;
        t
    }

    fn expect_int(&mut self) -> Result<BigInt, AlgebraError> {
        match self.bump() {
            Tok::Int(n) => Ok(n),
            Tok::Minus => match self.bump() {
                Tok::Int(n) => Ok(-n),
                t => Err(AlgebraError::Parse(format!("expected integer, got {t:?}"))),
            },
            t => Err(AlgebraError::Parse(format!("expected integer, got {t:?}"))),
        }
    }

    // term := factor (* factor)*
    // factor := int (/ int)? | name (^ int)?
    fn parse_term(&mut self) -> Result<(Rat, Monomial), AlgebraError> {
        let mut coeff = Rat::one();
        let mut mono = Monomial::one();
        loop {
            match self.bump() {
                Tok::Int(n) => {
                    let mut r = Rat::from_integer(n);
                    if *self.peek() == Tok::Slash {
                        // only a rational literal, not a ratfunc split: the
                        // ratfunc form is always parenthesized
                        self.bump();
                        let d = self.expect_int()?;
                        if d.is_zero() {
                            return Err(AlgebraError::DivisionByZero);
                        }
                        r /= Rat::from_integer(d);
                    }
                    coeff *= r;
                }
                Tok::Name(name) => {
                    let id = self
                        .syms
                        .id(&name)
                        .ok_or_else(|| AlgebraError::Parse(format!("unknown symbol {name}")))?;
                    let mut e = 1i32;
                    if *self.peek() == Tok::Caret {
                        self.bump();
                        let n = self.expect_int()?;
                        e = i32::try_from(n)
                            .map_err(|_| AlgebraError::Parse("exponent too large".into()))?;
                    }
                    if e < 0 && !self.syms.is_laurent(id) {
                        return Err(AlgebraError::NegativeExponent(name));
                    }
                    mono = mono.mul(&Monomial::var_pow(id, e));
                }
                t => return Err(AlgebraError::Parse(format!("unexpected token {t:?}"))),
            }
            if *self.peek() == Tok::Star {
                self.bump();
            } else {
                break;
            }
        }
        Ok((coeff, mono))
    }

    fn parse_poly(&mut self) -> Result<Poly, AlgebraError> {
        let mut out = Poly::zero();
        let mut sign = Rat::one();
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -sign;
        }
        loop {
            let (c, m) = self.parse_term()?;
            out.add_term(c * &sign, m);
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    sign = Rat::one();
                }
                Tok::Minus => {
                    self.bump();
                    sign = -Rat::one();
                }
                _ => break,
            }
        }
        Ok(out)
    }
}

/// Parse the canonical form produced by [`CoeffExpr::to_canonical`].
pub fn parse_coeff(src: &str, syms: &Symbols) -> Result<CoeffExpr, AlgebraError> {
    let mut lx = Lexer::new(src);
    let mut toks = Vec::new();
    loop {
        let t = lx.next_tok()?;
        let end = t == Tok::End;
        toks.push(t);
        if end {
            break;
        }
    }
    let mut p = Parser { toks, pos: 0, syms };
    // rational-function form: (num)/(den)
    if *p.peek() == Tok::LParen {
        p.bump();
        let num = p.parse_poly()?;
        if p.bump() != Tok::RParen {
            return Err(AlgebraError::Parse("expected )".into()));
        }
        if *p.peek() == Tok::Slash {
            p.bump();
            if p.bump() != Tok::LParen {
                return Err(AlgebraError::Parse("expected (".into()));
            }
            let den = p.parse_poly()?;
            if p.bump() != Tok::RParen {
                return Err(AlgebraError::Parse("expected )".into()));
            }
            if p.bump() != Tok::End {
                return Err(AlgebraError::Parse("trailing input".into()));
            }
            return Ok(CoeffExpr::Fun(RatFunc::new(num, den)?));
        }
        if p.bump() != Tok::End {
            return Err(AlgebraError::Parse("trailing input".into()));
        }
        return Ok(CoeffExpr::Poly(num));
    }
    let poly = p.parse_poly()?;
    if p.bump() != Tok::End {
        return Err(AlgebraError::Parse("trailing input".into()));
    }
    match poly.as_constant() {
        Some(c) => Ok(CoeffExpr::Rat(c)),
        None => Ok(CoeffExpr::Poly(poly)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_i, CoeffExpr};

    #[test]
    fn canonical_example_round_trips() {
        let mut b = Symbols::builder();
        let b1 = b.add("b1", false);
        let la2 = b.add("La2", true);
        let syms = b.finish();
        let x = CoeffExpr::Poly(Poly::term(
            rat(-1, 2),
            Monomial::from_pairs(vec![(b1, 1), (la2, -1)]),
        ));
        let s = x.to_canonical(&syms);
        assert_eq!(s, "-1/2*b1*La2^-1");
        assert_eq!(parse_coeff(&s, &syms).unwrap(), x);
    }

    #[test]
    fn ratfunc_round_trips() {
        let mut b = Symbols::builder();
        let x = b.add("x", false);
        let syms = b.finish();
        let num = Poly::var(x).add(&Poly::one());
        let den = Poly::var(x).scale(&rat_i(2)).sub(&Poly::one());
        let f = CoeffExpr::Fun(RatFunc::new(num, den).unwrap());
        let s = f.to_canonical(&syms);
        assert_eq!(parse_coeff(&s, &syms).unwrap(), f);
    }
}
