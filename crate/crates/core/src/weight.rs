//! Exact rational weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Weight = BigRational;

pub fn int(v: i64) -> Weight {
    Weight::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Weight {
    Weight::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_f64(w: &Weight) -> f64 {
    w.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.375`.
pub fn parse_weight(s: &str) -> Option<Weight> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Weight::new(p, q));
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let w = Weight::new(numer, denom);
    Some(if neg { -w } else { w })
}

/// `p/q` in lowest terms, or a bare integer when `q = 1`.
pub fn format_weight(w: &Weight) -> String {
    if w.denom().is_one() {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

pub fn abs(w: &Weight) -> Weight {
    w.abs()
}

/// Serde adapter storing a weight as its `p/q` string.
pub mod serde_weight {
    use super::{format_weight, parse_weight, Weight};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_weight(w))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Weight, D::Error> {
        let s = String::deserialize(d)?;
        parse_weight(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

pub mod serde_weight_vec {
    use super::{format_weight, parse_weight, Weight};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ws: &[Weight], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(ws.iter().map(format_weight))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Weight>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| {
                parse_weight(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
            })
            .collect()
    }
}

pub mod serde_weight_opt {
    use super::{format_weight, parse_weight, Weight};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(w: &Option<Weight>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(w) => s.serialize_some(&format_weight(w)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Weight>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| {
                parse_weight(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
            })
            .transpose()
    }
}
