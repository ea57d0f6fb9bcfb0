//! Text and JSON forms.
//!
//! Rationals are strings `"p/q"` or `"p"` in lowest terms; matrices are
//! arrays of rows of rational strings; points are
//! `{"space": {"components": [{"tensor": 2}], "n": 3}, "coords": [...]}`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::partitions::Partition;
use crate::polyfun::PolynomialFunctor;
use crate::tensor::{Atom, SpaceDescriptor, TensorPoint};
use crate::{Rational, RationalMatrix, RationalPoint};

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<BigInt>().map_err(|_| bad())?,
            d.trim().parse::<BigInt>().map_err(|_| bad())?,
        ),
        None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::from(1)),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(q.to_string())
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => {
            Ok(Rational::from_integer(BigInt::from(n.as_i64().unwrap())))
        }
        other => Err(Error::Parse(format!(
            "expected a rational string, got {other}"
        ))),
    }
}

pub fn vector_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected an array of rationals".into()))?
        .iter()
        .map(rational_from_json)
        .collect()
}

pub fn matrix_to_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_to_json(m.row(i))).collect())
}

/// Parses an array of rows. An empty array is ambiguous, so `cols` may be
/// supplied for it.
pub fn matrix_from_json(v: &Value, cols_if_empty: usize) -> Result<RationalMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of rows".into()))?
        .iter()
        .map(vector_from_json)
        .collect::<Result<Vec<_>>>()?;
    let cols = rows.first().map_or(cols_if_empty, Vec::len);
    Matrix::from_rows(rows, cols)
}

pub fn atom_to_json(a: &Atom) -> Value {
    match *a {
        Atom::Tensor(d) => json!({ "tensor": d }),
        Atom::Sym(d) => json!({ "sym": d }),
        Atom::Ext(d) => json!({ "ext": d }),
        Atom::Const(k) => json!({ "const": k }),
    }
}

fn atom_from_json(v: &Value) -> Result<Atom> {
    let obj = v
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or_else(|| Error::Parse(format!("expected a one-key atom object, got {v}")))?;
    let (key, val) = obj.iter().next().unwrap();
    let d = val
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("atom degree must be a nonnegative integer in {v}")))?
        as usize;
    match key.as_str() {
        "tensor" => Ok(Atom::Tensor(d)),
        "sym" => Ok(Atom::Sym(d)),
        "ext" => Ok(Atom::Ext(d)),
        "const" => Ok(Atom::Const(d)),
        other => Err(Error::Parse(format!("unknown atom kind {other:?}"))),
    }
}

pub fn space_to_json(s: &SpaceDescriptor) -> Value {
    json!({
        "components": s.components().iter().map(atom_to_json).collect::<Vec<_>>(),
        "n": s.n(),
    })
}

pub fn space_from_json(v: &Value) -> Result<SpaceDescriptor> {
    let comps = v
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("space needs a components array".into()))?
        .iter()
        .map(atom_from_json)
        .collect::<Result<Vec<_>>>()?;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("space needs an integer n".into()))? as usize;
    SpaceDescriptor::new(comps, n)
}

pub fn point_to_json(p: &RationalPoint) -> Value {
    json!({
        "space": space_to_json(p.space()),
        "coords": vector_to_json(p.coords()),
    })
}

pub fn point_from_json(v: &Value) -> Result<RationalPoint> {
    let space = space_from_json(
        v.get("space")
            .ok_or_else(|| Error::Parse("point needs a space".into()))?,
    )?;
    let coords = vector_from_json(
        v.get("coords")
            .ok_or_else(|| Error::Parse("point needs coords".into()))?,
    )?;
    TensorPoint::new(space, coords)
}

pub fn functor_to_json(p: &PolynomialFunctor) -> Value {
    json!({
        "constant_dim": p.constant_dim() as u64,
        "summands": p.summands().iter().map(|(l, m)| json!({
            "partition": l.parts(),
            "multiplicity": *m as u64,
        })).collect::<Vec<_>>(),
    })
}

pub fn functor_from_json(v: &Value) -> Result<PolynomialFunctor> {
    let constant = v
        .get("constant_dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("functor needs an integer constant_dim".into()))?;
    let mut p = PolynomialFunctor::constant(u128::from(constant));
    let summands = v
        .get("summands")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("functor needs a summands array".into()))?;
    for s in summands {
        let parts = s
            .get("partition")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("summand needs a partition array".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::Parse("bad part".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let m = s
            .get("multiplicity")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("summand needs a multiplicity".into()))?;
        p.add(Partition::new(parts)?, u128::from(m));
    }
    Ok(p)
}

/// Functor from either the text syntax or its JSON form.
pub fn parse_functor(s: &str) -> Result<PolynomialFunctor> {
    let t = s.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| Error::Parse(e.to_string()))?;
        functor_from_json(&v)
    } else {
        t.parse()
    }
}

/// Keys sorted, for output that is stable byte for byte.
pub fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_syntax() {
        assert_eq!(parse_rational("6/4").unwrap().to_string(), "3/2");
        assert_eq!(parse_rational("-3").unwrap().to_string(), "-3");
        assert_eq!(parse_rational("2/-4").unwrap().to_string(), "-1/2");
        assert_eq!(parse_rational("0/5").unwrap().to_string(), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn point_json_round_trip() {
        let v: Value = serde_json::from_str(
            r#"{"space":{"components":[{"sym":2},{"const":1}],"n":2},"coords":["1","1/2","0","7"]}"#,
        )
        .unwrap();
        let p = point_from_json(&v).unwrap();
        assert_eq!(point_to_json(&p), v);
        let bad: Value =
            serde_json::from_str(r#"{"space":{"components":[{"sym":2}],"n":2},"coords":["1"]}"#)
                .unwrap();
        assert!(point_from_json(&bad).is_err());
    }

    #[test]
    fn functor_json_round_trip() {
        let p = parse_functor("9 + 6*[1] + 1*[2] + 1*[1,1]").unwrap();
        let j = functor_to_json(&p);
        assert_eq!(functor_from_json(&j).unwrap(), p);
        assert_eq!(parse_functor(&j.to_string()).unwrap(), p);
    }
}
