//! Recursive-descent parser for the Hamiltonian expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' '-'? INT)?
//! atom   := NUMBER 'i'? | 'i' | 'x' '[' INT ']' '[' INT ']'
//!         | 'det' '(' list ';' list ')' | '(' expr ')'
//! list   := INT (',' INT)*
//! ```
//!
//! Numbers are exact decimals (`3`, `0.25`). Division by a non-constant
//! yields a rational function.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::func::Func;
use super::gaussrat::GaussRat;
use super::poly::Poly;
use super::rational::RationalFn;
use super::shape::Shape;
use crate::error::{Error, Result};
use crate::poisson::ordered_minor;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Imag(BigRational),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let end = t.0 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || (c == b'.' && self.src.get(self.pos + 1).is_some_and(u8::is_ascii_digit)) {
            let value = self.number()?;
            let imag = self.src.get(self.pos) == Some(&b'i')
                && !self.src.get(self.pos + 1).is_some_and(|b| b.is_ascii_alphanumeric());
            if imag {
                self.pos += 1;
                return Ok((Tok::Imag(value), start));
            }
            return Ok((Tok::Num(value), start));
        }
        if c.is_ascii_alphabetic() {
            while self.src.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
            return Ok((Tok::Ident(word), start));
        }
        if b"+-*/^()[];,".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Sym(c as char), start));
        }
        Err(Error::Syntax { pos: start, msg: format!("unexpected character '{}'", c as char) })
    }

    fn number(&mut self) -> Result<BigRational> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        let int_part = &self.src[start..self.pos];
        let mut frac: &[u8] = &[];
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let f0 = self.pos;
            while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
            frac = &self.src[f0..self.pos];
        }
        let digits: String = int_part.iter().chain(frac).map(|&b| b as char).collect();
        let digits = if digits.is_empty() { "0".to_string() } else { digits };
        let numer: BigInt = digits.parse().map_err(|_| Error::Syntax { pos: start, msg: "malformed number".into() })?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        Ok(BigRational::new(numer, denom))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    shape: Shape,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let (t, pos) = self.bump();
        if t == Tok::Sym(c) {
            Ok(())
        } else {
            Err(Error::Syntax { pos, msg: format!("expected '{c}'") })
        }
    }

    fn constant(&self, c: GaussRat) -> RationalFn {
        RationalFn::from_poly(Poly::constant(self.shape, c))
    }

    fn expr(&mut self) -> Result<RationalFn> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFn> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Sym('/') => {
                    let pos = self.pos();
                    self.bump();
                    let rhs = self.unary()?;
                    acc = acc.div(&rhs).map_err(|_| Error::DivisionByZero { pos })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFn> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFn> {
        let base = self.atom()?;
        if self.peek() != &Tok::Sym('^') {
            return Ok(base);
        }
        let caret = self.pos();
        self.bump();
        let negative = if self.peek() == &Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        let e = self.index()?;
        if e > 64 {
            return Err(Error::Syntax { pos, msg: "exponent too large (max 64)".into() });
        }
        let e = if negative { -(e as i32) } else { e as i32 };
        base.powi(e).map_err(|_| Error::DivisionByZero { pos: caret })
    }

    fn index(&mut self) -> Result<usize> {
        let (t, pos) = self.bump();
        match t {
            Tok::Num(q) if q.is_integer() => {
                let v: Option<usize> = q.to_integer().try_into().ok();
                v.ok_or(Error::Syntax { pos, msg: "integer too large".into() })
            }
            _ => Err(Error::Syntax { pos, msg: "expected a non-negative integer".into() }),
        }
    }

    fn index_list(&mut self) -> Result<Vec<usize>> {
        let mut v = vec![self.index()?];
        while self.peek() == &Tok::Sym(',') {
            self.bump();
            v.push(self.index()?);
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<RationalFn> {
        let (t, pos) = self.bump();
        match t {
            Tok::Num(q) => Ok(self.constant(GaussRat::new(q, BigRational::zero()))),
            Tok::Imag(q) => Ok(self.constant(GaussRat::new(BigRational::zero(), q))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(w) if w == "i" => Ok(self.constant(GaussRat::new(BigRational::zero(), BigRational::one()))),
            Tok::Ident(w) if w == "x" => {
                self.expect('[')?;
                let i = self.index()?;
                self.expect(']')?;
                self.expect('[')?;
                let j = self.index()?;
                self.expect(']')?;
                Ok(RationalFn::from_poly(Poly::var(self.shape, i, j)?))
            }
            Tok::Ident(w) if w == "det" => {
                self.expect('(')?;
                let rows = self.index_list()?;
                self.expect(';')?;
                let cols = self.index_list()?;
                self.expect(')')?;
                if rows.len() != cols.len() {
                    return Err(Error::Syntax { pos, msg: "det needs as many rows as columns".into() });
                }
                Ok(RationalFn::from_poly(ordered_minor(self.shape, &rows, &cols)?))
            }
            Tok::Ident(w) => Err(Error::Syntax { pos, msg: format!("unknown identifier '{w}'") }),
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(Error::Syntax { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}

/// Parses an expression over `M_{m,n}` into a polynomial or rational function.
pub fn parse_expr(src: &str, shape: Shape) -> Result<Func> {
    let toks = Lexer::tokens(src)?;
    let mut p = Parser { toks, at: 0, shape };
    let value = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(Error::Syntax { pos: p.pos(), msg: "unexpected trailing input".into() });
    }
    Ok(Func::from_rational(value))
}

/// Parses a constant such as `-3/4+2i`.
pub fn parse_constant(src: &str) -> Result<GaussRat> {
    let f = parse_expr(src, Shape::new(1, 1))?;
    f.as_poly()
        .and_then(Poly::constant_value)
        .ok_or_else(|| Error::Syntax { pos: 0, msg: format!("'{src}' is not a constant") })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(s: Shape, i: usize, j: usize) -> Poly {
        Poly::var(s, i, j).unwrap()
    }

    #[test]
    fn determinant_literal() {
        let s = Shape::square(2);
        let f = parse_expr("det(1,2;1,2)", s).unwrap();
        assert_eq!(f, Func::Poly(&(&x(s, 1, 1) * &x(s, 2, 2)) - &(&x(s, 1, 2) * &x(s, 2, 1))));
    }

    #[test]
    fn quotient_becomes_rational() {
        let s = Shape::square(2);
        match parse_expr("x[1][2]/x[2][1]", s).unwrap() {
            Func::Rational(r) => {
                assert_eq!(r.num(), &x(s, 1, 2));
                assert_eq!(r.den(), &x(s, 2, 1));
            }
            other => panic!("expected rational, got {other}"),
        }
    }

    #[test]
    fn gz_hamiltonian_literal() {
        let s = Shape::square(3);
        let f = parse_expr("det(1;3)/det(2,3;1,2)", s).unwrap();
        let den = &(&x(s, 2, 1) * &x(s, 3, 2)) - &(&x(s, 2, 2) * &x(s, 3, 1));
        assert_eq!(f, Func::Rational(RationalFn::new(x(s, 1, 3), den).unwrap()));
    }

    #[test]
    fn constants_and_precedence() {
        let s = Shape::square(2);
        assert_eq!(parse_constant("-3/4+2i").unwrap(), GaussRat::from_parts((-3, 4), (2, 1)));
        assert_eq!(parse_constant("0.25").unwrap(), GaussRat::from_ratio(1, 4));
        assert_eq!(parse_constant("i*i").unwrap(), GaussRat::from_int(-1));
        assert_eq!(parse_constant("-2^2").unwrap(), GaussRat::from_int(-4));
        assert_eq!(parse_constant("2^-1").unwrap(), GaussRat::from_ratio(1, 2));
        let f = parse_expr("(x[1][1]+1)^2 - x[1][1]^2 - 2*x[1][1]", s).unwrap();
        assert_eq!(f, Func::Poly(Poly::one(s)));
    }

    #[test]
    fn error_positions() {
        let s = Shape::square(2);
        assert!(matches!(parse_expr("x[1][1] + * 2", s), Err(Error::Syntax { pos: 10, .. })));
        assert!(matches!(parse_expr("x[1][3]", s), Err(Error::CoordOutOfRange { .. })));
        assert!(matches!(parse_expr("x[1][1]/(x[1][2]-x[1][2])", s), Err(Error::DivisionByZero { pos: 7 })));
        assert!(matches!(parse_expr("x[1][1] $", s), Err(Error::Syntax { pos: 8, .. })));
        assert!(matches!(parse_expr("(x[1][1]", s), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("det(1,2;1)", s), Err(Error::Syntax { .. })));
    }

    #[test]
    fn ordered_det_rows_carry_sign() {
        let s = Shape::square(2);
        let a = parse_expr("det(2,1;1,2)", s).unwrap();
        let b = parse_expr("-det(1,2;1,2)", s).unwrap();
        assert_eq!(a, b);
        assert!(parse_expr("det(1,1;1,2)", s).unwrap().is_zero());
    }
}
