//! The affinely extended real line.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `[-inf, +inf]`. Finite values are never NaN or infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    /// Wraps a finite float; `f64::INFINITY` and `f64::NEG_INFINITY` map to the
    /// corresponding symbols, NaN is rejected.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            Err(Error::NonFinite(value))
        } else if value == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else if value == f64::NEG_INFINITY {
            Ok(ExtendedReal::NegInf)
        } else {
            Ok(ExtendedReal::Finite(value))
        }
    }

    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "finite extended real from {value}");
        ExtendedReal::Finite(value)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn as_finite(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// `-inf` and `+inf` become the float infinities.
    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn neg(&self) -> Self {
        match *self {
            ExtendedReal::NegInf => ExtendedReal::PosInf,
            ExtendedReal::Finite(v) => ExtendedReal::Finite(if v == 0.0 { 0.0 } else { -v }),
            ExtendedReal::PosInf => ExtendedReal::NegInf,
        }
    }
}

impl Eq for ExtendedReal {}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<f64> for ExtendedReal {
    fn from(value: f64) -> Self {
        ExtendedReal::new(value).expect("NaN is not an extended real")
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => write!(f, "inf"),
        }
    }
}

// JSON: a number, or one of the strings "inf" / "-inf".
impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            ExtendedReal::NegInf => serializer.serialize_str("-inf"),
            ExtendedReal::PosInf => serializer.serialize_str("inf"),
            ExtendedReal::Finite(v) => serializer.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = ExtendedReal;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a finite number, \"inf\" or \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedReal, E> {
                if v.is_finite() {
                    Ok(ExtendedReal::Finite(v))
                } else {
                    Err(E::custom("non-finite number"))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedReal, E> {
                Ok(ExtendedReal::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedReal, E> {
                match v {
                    "inf" | "+inf" => Ok(ExtendedReal::PosInf),
                    "-inf" => Ok(ExtendedReal::NegInf),
                    other => Err(E::custom(format!("unknown extended real {other:?}"))),
                }
            }
        }

        deserializer.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_total() {
        let mut pts = vec![
            ExtendedReal::PosInf,
            ExtendedReal::Finite(3.0),
            ExtendedReal::NegInf,
            ExtendedReal::Finite(-1e300),
        ];
        pts.sort();
        assert_eq!(
            pts,
            vec![
                ExtendedReal::NegInf,
                ExtendedReal::Finite(-1e300),
                ExtendedReal::Finite(3.0),
                ExtendedReal::PosInf
            ]
        );
    }

    #[test]
    fn rejects_nan() {
        assert!(ExtendedReal::new(f64::NAN).is_err());
        assert_eq!(ExtendedReal::new(f64::INFINITY).unwrap(), ExtendedReal::PosInf);
    }

    #[test]
    fn json_forms() {
        let v: Vec<ExtendedReal> = serde_json::from_str(r#"[1.5, "inf", "-inf", 2]"#).unwrap();
        assert_eq!(
            v,
            vec![
                ExtendedReal::Finite(1.5),
                ExtendedReal::PosInf,
                ExtendedReal::NegInf,
                ExtendedReal::Finite(2.0)
            ]
        );
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.5,"inf","-inf",2.0]"#);
    }
}
