//! Exact rational parsing, formatting and integer scaling.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for an integral rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses a decimal integer or a `p/q` string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match t.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
    }
}

/// Integer when the denominator is 1, otherwise `p/q` in lowest terms.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("an integer or a \"p/q\" string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from_integer(BigInt::from(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        parse_rational(v).map_err(E::custom)
    }
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(
    d: D,
) -> std::result::Result<Rational, D::Error> {
    d.deserialize_any(RationalVisitor)
}

/// Serde adapter for `Vec<Vec<Rational>>`.
pub(crate) mod matrix {
    use super::*;
    use serde::de::SeqAccess;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    pub(super) struct Cell(pub(super) Rational);

    impl<'de> Deserialize<'de> for Cell {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            super::deserialize(d).map(Cell)
        }
    }

    pub fn serialize<S: Serializer>(
        m: &[Vec<Rational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            let cells: Vec<String> = row.iter().map(format_rational).collect();
            seq.serialize_element(&cells)?;
        }
        seq.end()
    }

    struct RowsVisitor;

    impl<'de> Visitor<'de> for RowsVisitor {
        type Value = Vec<Vec<Rational>>;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a matrix of rationals")
        }

        fn visit_seq<A: SeqAccess<'de>>(
            self,
            mut seq: A,
        ) -> std::result::Result<Self::Value, A::Error> {
            let mut out = Vec::new();
            while let Some(row) = seq.next_element::<Vec<Cell>>()? {
                out.push(row.into_iter().map(|c| c.0).collect());
            }
            Ok(out)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        d.deserialize_seq(RowsVisitor)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub(crate) mod vec {
    use super::*;
    use serde::{Deserialize, Serialize};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        Ok(Vec::<super::matrix::Cell>::deserialize(d)?
            .into_iter()
            .map(|c| c.0)
            .collect())
    }
}

/// Arithmetic needed by the exhaustive searches. Implemented by `i64`
/// (after scaling to a common denominator) and by `Rational`.
pub(crate) trait Scalar: Clone + Ord + Debug + Signed + FromPrimitive + Send + Sync {
    fn to_rational(&self, scale: &BigInt) -> Rational;
}

impl Scalar for i64 {
    fn to_rational(&self, scale: &BigInt) -> Rational {
        Rational::new(BigInt::from(*self), scale.clone())
    }
}

impl Scalar for Rational {
    fn to_rational(&self, scale: &BigInt) -> Rational {
        self / Rational::from_integer(scale.clone())
    }
}

/// Headroom so that sums of up to a few thousand scaled entries cannot overflow.
const SCALE_LIMIT: i64 = 1 << 40;

/// Multiplies every entry by the lcm of all denominators. Returns `None`
/// when the scaled magnitudes leave too little headroom for `i64` sums.
pub(crate) fn scale_rows(rows: &[Vec<Rational>]) -> Option<(Vec<Vec<i64>>, BigInt)> {
    let mut l = BigInt::one();
    for v in rows.iter().flatten() {
        l = l.lcm(v.denom());
    }
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut total: i64 = 0;
        let mut r = Vec::with_capacity(row.len());
        for v in row {
            let s = (v.numer() * (&l / v.denom())).to_i64()?;
            total = total.checked_add(s.checked_abs()?)?;
            if total > SCALE_LIMIT {
                return None;
            }
            r.push(s);
        }
        out.push(r);
    }
    Some((out, l))
}

pub(crate) fn scale_one(values: &[Rational]) -> Option<(Vec<i64>, BigInt)> {
    scale_rows(&[values.to_vec()]).map(|(mut r, l)| (r.pop().unwrap_or_default(), l))
}
