use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{parse_rational, Rational};

/// A nonnegative time or `+inf`.
///
/// `+inf` is what an infimum over an empty set of times evaluates to, so a
/// project that never settles into a nonnegative balance has payback `inf`.
/// The derived order puts every finite value below `Infinite`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedTime {
    Finite(Rational),
    Infinite,
}

impl ExtendedTime {
    pub fn zero() -> Self {
        ExtendedTime::Finite(Rational::zero())
    }

    /// Panics on a negative value.
    pub fn finite(value: Rational) -> Self {
        assert!(!value.is_negative(), "ExtendedTime must be nonnegative, got {value}");
        ExtendedTime::Finite(value)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedTime::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtendedTime::Finite(v) => Some(v),
            ExtendedTime::Infinite => None,
        }
    }

    pub fn le_rational(&self, bound: &Rational) -> bool {
        matches!(self, ExtendedTime::Finite(v) if v <= bound)
    }
}

impl From<Rational> for ExtendedTime {
    fn from(value: Rational) -> Self {
        ExtendedTime::finite(value)
    }
}

impl fmt::Display for ExtendedTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedTime::Finite(v) => write!(f, "{v}"),
            ExtendedTime::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    finite: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

impl Serialize for ExtendedTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let wire = match self {
            ExtendedTime::Finite(v) => Wire { finite: true, value: Some(v.to_string()) },
            ExtendedTime::Infinite => Wire { finite: false, value: None },
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExtendedTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let wire = Wire::deserialize(deserializer)?;
        match (wire.finite, wire.value) {
            (false, _) => Ok(ExtendedTime::Infinite),
            (true, Some(s)) => {
                let v = parse_rational(&s).map_err(D::Error::custom)?;
                if v.is_negative() {
                    return Err(D::Error::custom(format!("negative time {v}")));
                }
                Ok(ExtendedTime::Finite(v))
            }
            (true, None) => Err(D::Error::custom("finite time without a value")),
        }
    }
}
