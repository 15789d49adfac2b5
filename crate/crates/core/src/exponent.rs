use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An integrability exponent in `[1, ∞]` (or `(0, ∞]` where noted).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// Finite exponent, rejecting NaN and values `<= 0`.
    pub fn finite(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidExponent(format!("{p}")));
        }
        Ok(Exponent::Finite(p))
    }

    /// Like [`Exponent::finite`] but additionally requires `p >= 1`.
    pub fn at_least_one(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidExponent(format!("{p} (need p >= 1)")));
        }
        Self::finite(p)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// The value as `f64`, with `Infinity` mapped to `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    /// Hölder conjugate.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub(crate) fn require_at_least_one(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidExponent(format!("{p} (need p >= 1)")))
            }
            e => Ok(e),
        }
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "Inf" | "∞" => Ok(Exponent::Infinity),
            _ => {
                if let Some((a, b)) = s.split_once('/') {
                    let a: f64 = a.parse().map_err(|_| Error::InvalidExponent(s.into()))?;
                    let b: f64 = b.parse().map_err(|_| Error::InvalidExponent(s.into()))?;
                    return Exponent::finite(a / b);
                }
                let p: f64 = s.parse().map_err(|_| Error::InvalidExponent(s.into()))?;
                Exponent::finite(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::finite(p).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), Exponent::Finite(1.5));
        let e: Exponent = "4/3".parse().unwrap();
        assert!((e.value() - 4.0 / 3.0).abs() < 1e-15);
        assert!("-1".parse::<Exponent>().is_err());
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::Finite(2.0).conjugate(), Exponent::Finite(2.0));
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
    }

    #[test]
    fn serde_roundtrip() {
        let v = serde_json::to_string(&[Exponent::Finite(3.0), Exponent::Infinity]).unwrap();
        assert_eq!(v, "[3.0,\"inf\"]");
        let back: Vec<Exponent> = serde_json::from_str(&v).unwrap();
        assert_eq!(back, vec![Exponent::Finite(3.0), Exponent::Infinity]);
    }
}
