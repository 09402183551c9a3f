use std::fmt;
use std::ops::Add;

use num_traits::Zero;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Numeric type carried by a finite [`TimeValue`].
///
/// Any ordered additive type with a zero works. Integer carriers keep every
/// comparison exact.
pub trait Carrier: Copy + PartialOrd + Add<Output = Self> + Zero + fmt::Debug {}

impl<T> Carrier for T where T: Copy + PartialOrd + Add<Output = T> + Zero + fmt::Debug {}

/// An element of the max-plus semiring: a finite time or the bottom element ε.
///
/// The derived ordering places `Eps` below every finite value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeValue<T = i64> {
    #[default]
    Eps,
    Fin(T),
}

pub use TimeValue::{Eps, Fin};

impl<T: Carrier> TimeValue<T> {
    /// The multiplicative identity `e = 0`.
    pub fn e() -> Self {
        Fin(T::zero())
    }

    pub fn is_eps(self) -> bool {
        matches!(self, Eps)
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Eps => None,
            Fin(x) => Some(x),
        }
    }

    /// `x ⊕ y = max(x, y)`.
    pub fn oplus(self, other: Self) -> Self {
        match (self, other) {
            (Eps, y) => y,
            (x, Eps) => x,
            (Fin(x), Fin(y)) => {
                if x >= y {
                    Fin(x)
                } else {
                    Fin(y)
                }
            }
        }
    }

    /// `x ⊗ y = x + y`, with ε absorbing.
    pub fn otimes(self, other: Self) -> Self {
        match (self, other) {
            (Fin(x), Fin(y)) => Fin(x + y),
            _ => Eps,
        }
    }

    /// Strictly greater than `e`. The implicit solver requires this of every
    /// finite coefficient.
    pub fn is_positive(self) -> bool {
        match self {
            Eps => false,
            Fin(x) => x > T::zero(),
        }
    }
}

impl<T> From<T> for TimeValue<T> {
    fn from(x: T) -> Self {
        Fin(x)
    }
}

pub fn scalar_add<T: Carrier>(x: TimeValue<T>, y: TimeValue<T>) -> TimeValue<T> {
    x.oplus(y)
}

pub fn scalar_mul<T: Carrier>(x: TimeValue<T>, y: TimeValue<T>) -> TimeValue<T> {
    x.otimes(y)
}

impl<T: fmt::Display> fmt::Display for TimeValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eps => f.write_str("eps"),
            Fin(x) => x.fmt(f),
        }
    }
}

// Interchange formats render ε as the string "eps", never as a numeric sentinel.
impl<T: Serialize> Serialize for TimeValue<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Eps => serializer.serialize_str("eps"),
            Fin(x) => x.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for TimeValue<i64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TimeVisitor;

        impl Visitor<'_> for TimeVisitor {
            type Value = TimeValue<i64>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or the string \"eps\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Self::Value, E> {
                Ok(Fin(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Self::Value, E> {
                i64::try_from(v)
                    .map(Fin)
                    .map_err(|_| E::custom("time value out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                if v == "eps" {
                    Ok(Eps)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        deserializer.deserialize_any(TimeVisitor)
    }
}
