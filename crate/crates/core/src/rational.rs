//! Exact rationals and the projective line over them.

use std::fmt;
use std::ops::Neg;

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// The coefficient field.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Formats as `p/q` in lowest terms with `q > 0`; integers keep the `/1`.
pub fn format_q(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::domain(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, d)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::domain(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(p, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// A point of the projective line over `Q`: a finite value or `∞`.
///
/// `-∞` and `∞` are the same point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    Finite(Q),
    Infinity,
}

impl ExtendedValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedValue::Infinity)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtendedValue::Finite(v) => Some(v),
            ExtendedValue::Infinity => None,
        }
    }

    /// `num / den` on the projective line. `0/0` has no value.
    pub fn ratio(num: &Q, den: &Q) -> Result<Self> {
        if den.is_zero() {
            if num.is_zero() {
                Err(Error::Defect("0/0 encountered in a period".into()))
            } else {
                Ok(ExtendedValue::Infinity)
            }
        } else {
            Ok(ExtendedValue::Finite(num / den))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedValue::Finite(v) if v.is_zero())
    }

    /// Adds a finite shift; `∞` absorbs it.
    pub fn shifted(&self, by: &Q) -> Self {
        match self {
            ExtendedValue::Finite(v) => ExtendedValue::Finite(v + by),
            ExtendedValue::Infinity => ExtendedValue::Infinity,
        }
    }

    pub fn to_json_string(&self) -> String {
        match self {
            ExtendedValue::Finite(v) => format_q(v),
            ExtendedValue::Infinity => "inf".to_string(),
        }
    }
}

impl Neg for ExtendedValue {
    type Output = ExtendedValue;

    fn neg(self) -> Self {
        match self {
            ExtendedValue::Finite(v) => ExtendedValue::Finite(-v),
            ExtendedValue::Infinity => ExtendedValue::Infinity,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(v) if v.denom().is_one() => write!(f, "{}", v.numer()),
            ExtendedValue::Finite(v) => write!(f, "{v}"),
            ExtendedValue::Infinity => write!(f, "∞"),
        }
    }
}
