use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// ℕ ∪ {∞}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

pub use ExtNat::{Fin, Inf};

impl ExtNat {
    pub fn is_inf(self) -> bool {
        matches!(self, Inf)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fin(n) => Some(n),
            Inf => None,
        }
    }

    pub fn unwrap_fin(self) -> u64 {
        self.finite().expect("expected a finite value")
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Fin(a), Fin(b)) => a.cmp(b),
            (Fin(_), Inf) => Ordering::Less,
            (Inf, Fin(_)) => Ordering::Greater,
            (Inf, Inf) => Ordering::Equal,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, o: ExtNat) -> ExtNat {
        match (self, o) {
            (Fin(a), Fin(b)) => Fin(a + b),
            _ => Inf,
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        Fin(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Inf => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ExtNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Fin(n) => s.serialize_u64(*n),
            Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtNat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "inf" => Ok(Inf),
            serde_json::Value::Number(n) if n.is_u64() => Ok(Fin(n.as_u64().unwrap())),
            other => Err(serde::de::Error::custom(format!("expected natural or \"inf\", got {other}"))),
        }
    }
}

/// A length-r vector of extended naturals, the codomain of ν.
pub type ValueVec = Vec<ExtNat>;

/// Componentwise minimum.
pub fn vinf(a: &[ExtNat], b: &[ExtNat]) -> ValueVec {
    a.iter().zip(b).map(|(x, y)| (*x).min(*y)).collect()
}

/// Componentwise sum.
pub fn vadd(a: &[ExtNat], b: &[ExtNat]) -> ValueVec {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// Componentwise a ≥ b.
pub fn vge(a: &[ExtNat], b: &[ExtNat]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

pub fn fin_vec(v: &[u64]) -> ValueVec {
    v.iter().map(|&x| Fin(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_laws() {
        assert_eq!(Inf + Fin(3), Inf);
        assert_eq!(Fin(2) + Fin(3), Fin(5));
        assert_eq!(Inf.min(Fin(4)), Fin(4));
        assert!(Inf > Fin(u64::MAX));
    }

    #[test]
    fn json_encoding() {
        let v = vec![Fin(3), Inf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[3,\"inf\"]");
        let back: ValueVec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
