use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{CurvaError, Result};
use crate::kernel::{Scalar, Series, EXACT};

/// A parametrized branch t ↦ (x(t), y(t)).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Branch {
    pub x: Series,
    pub y: Series,
    /// Multiplicity min(ord x, ord y).
    pub n: usize,
}

/// Tangent slope in ℂ̄.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Slope {
    Finite(Scalar),
    Infinite,
}

impl Slope {
    pub fn to_json(&self) -> Value {
        match self {
            Slope::Finite(s) => Value::String(s.to_string()),
            Slope::Infinite => Value::String("inf".into()),
        }
    }

    /// Tangent direction (a, b) with slope b/a.
    pub fn direction(&self) -> (Scalar, Scalar) {
        match self {
            Slope::Finite(s) => (Scalar::int(1), s.clone()),
            Slope::Infinite => (Scalar::zero(), Scalar::int(1)),
        }
    }
}

impl Branch {
    /// Validates order, primitivity and the minimum truncation.
    pub fn new(x: Series, y: Series) -> Result<Branch> {
        if !x.coeff(0).is_zero() || !y.coeff(0).is_zero() {
            return Err(CurvaError::Validation("branch does not pass through the origin".into()));
        }
        let ox = x.ord();
        let oy = y.ord();
        let n = match (ox, oy) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(CurvaError::Validation("branch has no nonzero term below its truncation".into()))
            }
        };
        // An unknown coordinate could hide a smaller order.
        if n >= x.trunc() || n >= y.trunc() {
            return Err(CurvaError::Precision(format!("multiplicity {n} not determined by the given truncation")));
        }
        let b = Branch { x, y, n };
        if b.trunc() < n + 1 {
            return Err(CurvaError::Precision("trunc must exceed the multiplicity".into()));
        }
        let g = b.x.terms().chain(b.y.terms()).fold(0usize, |g, (e, _)| g.gcd(&e));
        if g != 1 {
            return Err(CurvaError::Validation(format!(
                "parametrization is not primitive (exponent gcd {g}) within the given truncation"
            )));
        }
        Ok(b)
    }

    pub fn from_ints(x: &[(usize, i64)], y: &[(usize, i64)], trunc: usize) -> Result<Branch> {
        Branch::new(
            Series::from_ints(x).truncate(trunc),
            Series::from_ints(y).truncate(trunc),
        )
    }

    /// Exact polynomial branch (trunc = ∞).
    pub fn exact_from_ints(x: &[(usize, i64)], y: &[(usize, i64)]) -> Result<Branch> {
        Branch::new(Series::from_ints(x), Series::from_ints(y))
    }

    pub fn trunc(&self) -> usize {
        self.x.trunc().min(self.y.trunc())
    }

    pub fn truncate(&self, t: usize) -> Branch {
        Branch { x: self.x.truncate(t), y: self.y.truncate(t), n: self.n }
    }

    /// The stored terms read as an exact polynomial parametrization.
    pub fn exact(&self) -> Branch {
        Branch { x: self.x.as_exact(), y: self.y.as_exact(), n: self.n }
    }

    pub fn tangent_slope(&self) -> Slope {
        let a = self.x.coeff(self.n);
        let b = self.y.coeff(self.n);
        if a.is_zero() {
            Slope::Infinite
        } else {
            Slope::Finite(&b / &a)
        }
    }

    /// JSON document {"x": [...], "y": [...], "trunc": T}.
    pub fn to_json(&self) -> Value {
        let t = self.trunc();
        let trunc = if t == EXACT {
            let d = self.x.degree().unwrap_or(0).max(self.y.degree().unwrap_or(0));
            d + 1
        } else {
            t
        };
        json!({"x": self.x.to_json(), "y": self.y.to_json(), "trunc": trunc})
    }

    pub fn from_json(v: &Value) -> Result<Branch> {
        let obj = v.as_object().ok_or_else(|| CurvaError::Validation("branch must be an object".into()))?;
        for key in obj.keys() {
            if key != "x" && key != "y" && key != "trunc" {
                return Err(CurvaError::Validation(format!("unknown branch field {key:?}")));
            }
        }
        let trunc = obj
            .get("trunc")
            .and_then(|t| t.as_u64())
            .ok_or_else(|| CurvaError::Validation("branch needs a natural \"trunc\"".into()))? as usize;
        let x = Series::from_json(obj.get("x").unwrap_or(&Value::Null), trunc)?;
        let y = Series::from_json(obj.get("y").unwrap_or(&Value::Null), trunc)?;
        Branch::new(x, y)
    }
}
