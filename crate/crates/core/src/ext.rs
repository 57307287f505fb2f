//! Integers extended with `-inf` and `+inf`.

use std::fmt;
use std::ops::Neg;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{FlowError, Result};

/// An integer, `-inf` or `+inf`.
///
/// The derived order is the natural one: `NegInf < Fin(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Fin(i64),
    PosInf,
}

pub use ExtInt::{Fin, NegInf, PosInf};

impl ExtInt {
    pub const ZERO: ExtInt = Fin(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Fin(v) => Some(v),
            _ => None,
        }
    }

    /// Sum with the usual infinity rules. `-inf + +inf` is an error, as is
    /// overflow of the finite part.
    pub fn checked_add(self, rhs: ExtInt) -> Result<ExtInt> {
        match (self, rhs) {
            (NegInf, PosInf) | (PosInf, NegInf) => Err(FlowError::InfinityClash),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (Fin(a), Fin(b)) => a.checked_add(b).map(Fin).ok_or(FlowError::Overflow),
        }
    }

    pub fn checked_sub(self, rhs: ExtInt) -> Result<ExtInt> {
        self.checked_add(-rhs)
    }

    pub fn add_int(self, rhs: i64) -> Result<ExtInt> {
        self.checked_add(Fin(rhs))
    }
}

impl Neg for ExtInt {
    type Output = ExtInt;

    fn neg(self) -> ExtInt {
        match self {
            NegInf => PosInf,
            PosInf => NegInf,
            // i64::MIN has no negation; saturate rather than wrap.
            Fin(v) => Fin(v.checked_neg().unwrap_or(i64::MAX)),
        }
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        Fin(v)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => f.write_str("-inf"),
            PosInf => f.write_str("+inf"),
            Fin(v) => write!(f, "{v}"),
        }
    }
}

/// Checked sum of an iterator of extended integers.
pub fn ext_sum<I: IntoIterator<Item = ExtInt>>(items: I) -> Result<ExtInt> {
    let mut seen_neg = false;
    let mut seen_pos = false;
    let mut acc: i64 = 0;
    for item in items {
        match item {
            NegInf => seen_neg = true,
            PosInf => seen_pos = true,
            Fin(v) => acc = acc.checked_add(v).ok_or(FlowError::Overflow)?,
        }
    }
    match (seen_neg, seen_pos) {
        (true, true) => Err(FlowError::InfinityClash),
        (true, false) => Ok(NegInf),
        (false, true) => Ok(PosInf),
        (false, false) => Ok(Fin(acc)),
    }
}

impl Serialize for ExtInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Fin(v) => serializer.serialize_i64(*v),
            NegInf => serializer.serialize_str("-inf"),
            PosInf => serializer.serialize_str("+inf"),
        }
    }
}

struct ExtIntVisitor;

impl<'de> Visitor<'de> for ExtIntVisitor {
    type Value = ExtInt;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer, \"-inf\" or \"+inf\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtInt, E> {
        Ok(Fin(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtInt, E> {
        i64::try_from(v).map(Fin).map_err(|_| E::custom("integer out of range"))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtInt, E> {
        match v {
            "-inf" => Ok(NegInf),
            "+inf" | "inf" => Ok(PosInf),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for ExtInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(ExtIntVisitor)
    }
}
