//! JSON wire formats.
//!
//! * scalar: `"p/q"` (exact) or a JSON number (floating)
//! * multivector: `{"dim": n, "degree": k, "terms": [{"idx": [i1,..,ik], "c": ..}]}`
//!   with 1-based indices
//! * floats are written with 17 significant digits

use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::exterior::MultiVector;
use crate::scalar::{parse_rational, Field, Rational, Scalar};

/// A float as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn num17(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{x:.16e}")).map(Value::Number).unwrap_or(Value::Null)
}

pub fn rational_value(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn scalar_value(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(r) => rational_value(r),
        Scalar::Float { value, .. } => num17(*value),
    }
}

pub fn scalar_from_value(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => Ok(Scalar::Exact(parse_rational(s)?)),
        Value::Number(n) if n.to_string().parse::<num_bigint::BigInt>().is_ok() => {
            Ok(Scalar::Exact(parse_rational(&n.to_string())?))
        }
        Value::Number(n) => n
            .as_f64()
            .map(Scalar::float)
            .ok_or_else(|| Error::Parse(format!("unrepresentable number {n}"))),
        other => Err(Error::Parse(format!("expected scalar, got {other}"))),
    }
}

pub fn rational_from_value(v: &Value) -> Result<Rational> {
    match scalar_from_value(v)? {
        Scalar::Exact(r) => Ok(r),
        Scalar::Float { .. } => Err(Error::Parse(format!("expected exact rational string, got {v}"))),
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        scalar_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        scalar_from_value(&v).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    idx: Vec<usize>,
    c: Scalar,
}

#[derive(Serialize, Deserialize)]
struct MultiVectorRepr {
    dim: usize,
    degree: usize,
    terms: Vec<TermRepr>,
}

pub fn multivector_to_value<T: Field + Into<Scalar>>(mv: &MultiVector<T>) -> Value {
    let repr = MultiVectorRepr {
        dim: mv.dim(),
        degree: mv.degree(),
        terms: mv
            .terms()
            .into_iter()
            .map(|(idx, c)| TermRepr { idx: idx.iter().map(|i| i + 1).collect(), c: c.into() })
            .collect(),
    };
    serde_json::to_value(repr).expect("serializable")
}

pub fn multivector_from_value(v: &Value) -> Result<MultiVector<Scalar>> {
    let repr: MultiVectorRepr =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let mut terms = Vec::with_capacity(repr.terms.len());
    for t in repr.terms {
        if t.idx.iter().any(|&i| i == 0 || i > repr.dim) {
            return Err(Error::BadIndex(t.idx));
        }
        if t.idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadIndex(t.idx));
        }
        terms.push((t.idx.iter().map(|i| i - 1).collect(), t.c));
    }
    MultiVector::from_terms(repr.dim, repr.degree, &terms)
}

impl Serialize for MultiVector<Scalar> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        multivector_to_value(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiVector<Scalar> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        multivector_from_value(&v).map_err(D::Error::custom)
    }
}

/// Exact view of a scalar form, if every coefficient is exact.
pub fn to_exact(mv: &MultiVector<Scalar>) -> Option<MultiVector<Rational>> {
    if mv.coefficients().iter().all(|c| c.is_exact()) {
        Some(mv.map(|c| c.as_rational().cloned().expect("checked exact")))
    } else {
        None
    }
}

pub fn to_scalar<T: Field + Into<Scalar>>(mv: &MultiVector<T>) -> MultiVector<Scalar> {
    mv.map(|c| c.clone().into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use serde_json::json;

    #[test]
    fn multivector_round_trip() {
        let v = json!({"dim": 4, "degree": 2, "terms": [
            {"idx": [1, 3], "c": "1"},
            {"idx": [2, 4], "c": "-3/2"},
            {"idx": [1, 4], "c": 0.5}
        ]});
        let mv = multivector_from_value(&v).unwrap();
        assert_eq!(mv.coeff(&[1, 3]), Scalar::Exact(rat(-3, 2)));
        assert!(to_exact(&mv).is_none());
        let back = multivector_from_value(&serde_json::to_value(&mv).unwrap()).unwrap();
        assert_eq!(back, mv);
    }

    #[test]
    fn rejects_bad_indices() {
        let zero_based = json!({"dim": 4, "degree": 1, "terms": [{"idx": [0], "c": "1"}]});
        assert!(multivector_from_value(&zero_based).is_err());
        let unsorted = json!({"dim": 4, "degree": 2, "terms": [{"idx": [3, 1], "c": "1"}]});
        assert!(multivector_from_value(&unsorted).is_err());
    }

    #[test]
    fn floats_have_17_digits() {
        assert_eq!(num17(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num17(f64::NAN), Value::Null);
        assert_eq!(num17(2.0).as_f64(), Some(2.0));
    }
}
