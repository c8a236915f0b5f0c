//! Canonical JSON form of polynomials:
//! `[{"exponents": [[i, j, e], ...], "coeff": [re_num, re_den, im_num, im_den]}, ...]`.
//! Integers that do not fit in an `i64` are written as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::func::Func;
use super::gaussrat::GaussRat;
use super::poly::Poly;
use super::rational::RationalFn;
use super::shape::{Monomial, Shape};
use crate::error::{Error, Result};

fn int_to_json(i: &BigInt) -> Value {
    match i.to_i64() {
        Some(v) => json!(v),
        None => Value::String(i.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Invalid(format!("non-integer {n}"))),
        Value::String(s) => s.parse().map_err(|_| Error::Invalid(format!("bad integer '{s}'"))),
        _ => Err(Error::Invalid(format!("expected integer, got {v}"))),
    }
}

fn ratio_from_json(num: &Value, den: &Value) -> Result<BigRational> {
    let d = int_from_json(den)?;
    if d == BigInt::from(0) {
        return Err(Error::Invalid("zero denominator in coefficient".into()));
    }
    Ok(BigRational::new(int_from_json(num)?, d))
}

pub fn poly_to_json(p: &Poly) -> Value {
    let shape = p.shape();
    Value::Array(
        p.terms()
            .rev()
            .map(|(m, c)| {
                let exps: Vec<Value> = m
                    .iter()
                    .map(|(v, e)| {
                        let (i, j) = shape.coord(v);
                        json!([i, j, e])
                    })
                    .collect();
                json!({
                    "exponents": exps,
                    "coeff": [int_to_json(c.re.numer()), int_to_json(c.re.denom()),
                              int_to_json(c.im.numer()), int_to_json(c.im.denom())],
                })
            })
            .collect(),
    )
}

pub fn poly_from_json(v: &Value, shape: Shape) -> Result<Poly> {
    let terms = v.as_array().ok_or_else(|| Error::Invalid("polynomial must be a JSON array".into()))?;
    let mut out = Poly::zero(shape);
    for t in terms {
        let exps = t["exponents"].as_array().ok_or_else(|| Error::Invalid("missing exponents".into()))?;
        let mut pairs = Vec::with_capacity(exps.len());
        for e in exps {
            let idx = |k: usize| e.get(k).and_then(Value::as_u64).map(|x| x as usize);
            match (idx(0), idx(1), idx(2)) {
                (Some(i), Some(j), Some(p)) => pairs.push((shape.index(i, j)?, p as u32)),
                _ => return Err(Error::Invalid(format!("bad exponent entry {e}"))),
            }
        }
        let c = t["coeff"]
            .as_array()
            .filter(|c| c.len() == 4)
            .ok_or_else(|| Error::Invalid("coeff needs 4 integers".into()))?;
        let coeff = GaussRat::new(ratio_from_json(&c[0], &c[1])?, ratio_from_json(&c[2], &c[3])?);
        out = &out + &Poly::monomial(shape, Monomial::from_pairs(pairs), coeff);
    }
    Ok(out)
}

/// Polynomials serialize as the bare term list; rational functions as
/// `{"num": [...], "den": [...]}`.
pub fn func_to_json(f: &Func) -> Value {
    match f {
        Func::Poly(p) => poly_to_json(p),
        Func::Rational(r) => json!({"num": poly_to_json(r.num()), "den": poly_to_json(r.den())}),
    }
}

pub fn func_from_json(v: &Value, shape: Shape) -> Result<Func> {
    if v.is_array() {
        return Ok(Func::Poly(poly_from_json(v, shape)?));
    }
    let num = poly_from_json(&v["num"], shape)?;
    let den = poly_from_json(&v["den"], shape)?;
    Ok(Func::from_rational(RationalFn::new(num, den)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::parse_expr;

    #[test]
    fn canonical_form() {
        let s = Shape::square(2);
        let p = parse_expr("3/4*x[1][1]^2 - 2i", s).unwrap();
        let v = func_to_json(&p);
        assert_eq!(
            v,
            json!([
                {"exponents": [[1, 1, 2]], "coeff": [3, 4, 0, 1]},
                {"exponents": [], "coeff": [0, 1, -2, 1]},
            ])
        );
        assert_eq!(func_from_json(&v, s).unwrap(), p);
    }

    #[test]
    fn rational_and_big_coefficients() {
        let s = Shape::square(2);
        let r = parse_expr("123456789012345678901234567890*x[1][2]/x[2][1]", s).unwrap();
        let v = func_to_json(&r);
        assert_eq!(func_from_json(&v, s).unwrap(), r);
        assert!(func_from_json(&json!([{"exponents": [[3, 1, 1]], "coeff": [1, 1, 0, 1]}]), s).is_err());
    }
}
