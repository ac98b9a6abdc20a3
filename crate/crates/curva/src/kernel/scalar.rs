use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A Gaussian rational `re + im*i`. Both parts are kept in lowest terms by
/// `BigRational`, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::new(BigRational::new(p.into(), q.into()), BigRational::zero())
    }

    pub fn complex(re: BigRational, im: BigRational) -> Self {
        Scalar::new(re, im)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus re² + im².
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar::new(self.re.recip(), BigRational::zero()));
        }
        let n = self.norm();
        Some(Scalar::new(&self.re / &n, -&self.im / &n))
    }

    /// Integer power; negative exponents invert. Panics on 0^negative.
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 {
            self.inv().expect("zero raised to a negative power")
        } else {
            self.clone()
        };
        let mut k = e.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    /// Exact n-th root inside ℚ(i), if one exists. Returns one root; the
    /// caller owns the choice among the n of them.
    pub fn nth_root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if n == 1 || self.is_zero() || self.is_one() {
            return Some(self.clone());
        }
        // Write self = A / q^n with A a Gaussian integer; then any root is w / q
        // for a Gaussian integer w with w^n = A.
        let q = self.re.denom().lcm(self.im.denom());
        let qn = num_traits::pow(q.clone(), n as usize);
        let a_re = (&self.re * BigRational::from_integer(qn.clone())).to_integer();
        let a_im = (&self.im * BigRational::from_integer(qn)).to_integer();
        let w = gaussian_int_root(&a_re, &a_im, n)?;
        let qq = BigRational::from_integer(q);
        Some(Scalar::new(
            BigRational::from_integer(w.0) / &qq,
            BigRational::from_integer(w.1) / &qq,
        ))
    }

    /// Approximate value, used only for seeding exact root searches and for
    /// human-readable diagnostics.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        (ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Total ordering key used for deterministic tie-breaking.
    pub fn cmp_key(&self, other: &Self) -> std::cmp::Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

fn gpow(z: &(BigInt, BigInt), n: u32) -> (BigInt, BigInt) {
    let mut acc = (BigInt::one(), BigInt::zero());
    for _ in 0..n {
        acc = (
            &acc.0 * &z.0 - &acc.1 * &z.1,
            &acc.0 * &z.1 + &acc.1 * &z.0,
        );
    }
    acc
}

/// Gaussian integer w with w^n = a, searched near the floating point roots
/// and refined by the exact norm condition.
fn gaussian_int_root(a_re: &BigInt, a_im: &BigInt, n: u32) -> Option<(BigInt, BigInt)> {
    let target = (a_re.clone(), a_im.clone());
    if a_im.is_zero() {
        // Real radicand: try the real root and the four unit multiples first.
        let abs = a_re.abs();
        let r = abs.nth_root(n);
        if num_traits::pow(r.clone(), n as usize) == abs {
            let units = [
                (BigInt::one(), BigInt::zero()),
                (-BigInt::one(), BigInt::zero()),
                (BigInt::zero(), BigInt::one()),
                (BigInt::zero(), -BigInt::one()),
            ];
            for u in units.iter() {
                let cand = (&r * &u.0, &r * &u.1);
                if gpow(&cand, n) == target {
                    return Some(cand);
                }
            }
        }
    }
    // |w|² must be an exact n-th root of |a|².
    let norm = a_re * a_re + a_im * a_im;
    let nw = norm.nth_root(n);
    if num_traits::pow(nw.clone(), n as usize) != norm {
        return None;
    }
    // Enumerate w = x + iy with x² + y² = nw. nw is usually small for the
    // inputs seen here; guard against pathological sizes.
    let bound = nw.sqrt();
    if bound.bits() > 40 {
        return None;
    }
    let b = bound.to_i64()?;
    let nw_i = nw.to_i128()?;
    for x in -b..=b {
        let rest = nw_i - (x as i128) * (x as i128);
        if rest < 0 {
            continue;
        }
        let y = (rest as f64).sqrt().round() as i128;
        for yy in [y, -y] {
            if (x as i128) * (x as i128) + yy * yy == nw_i {
                let cand = (BigInt::from(x), BigInt::from(yy));
                if gpow(&cand, n) == target {
                    return Some(cand);
                }
            }
        }
    }
    None
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::new(BigRational::one(), BigRational::zero())
    }
}

impl Scalar {
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::new(&self.re + &o.re, BigRational::zero());
        }
        Scalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::new(&self.re - &o.re, BigRational::zero());
        }
        Scalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::new(&self.re * &o.re, BigRational::zero());
        }
        Scalar::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        if o.im.is_zero() {
            return Scalar::new(&self.re / &o.re, &self.im / &o.re);
        }
        self * &o.inv().expect("division by zero scalar")
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::new(r, BigRational::zero())
    }
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// "p/q" (or "p") for real values, "p/q+r/s*i" otherwise; the imaginary sign is
    /// always explicit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", fmt_ratio(&self.re))
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{}{}{}*i", fmt_ratio(&self.re), sign, fmt_ratio(&self.im.abs()))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed scalar {0:?}")]
pub struct ParseScalarError(pub String);

fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for Scalar {
    type Err = ParseScalarError;

    /// Accepts "p", "p/q", "p/q+r/s*i", "p/q-r/s*i" and "r/s*i".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseScalarError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = t.strip_suffix("*i") {
            // find the sign separating the real part; skip a leading sign
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                if bytes[k] == b'+' || bytes[k] == b'-' {
                    split = Some(k);
                    break;
                }
            }
            let (re, im) = match split {
                Some(k) => {
                    let re = parse_ratio(&body[..k]).ok_or_else(err)?;
                    let sign = if bytes[k] == b'-' { -1 } else { 1 };
                    let im = parse_ratio(&body[k + 1..]).ok_or_else(err)?;
                    (re, im * BigRational::from_integer(sign.into()))
                }
                None => (BigRational::zero(), parse_ratio(body).ok_or_else(err)?),
            };
            Ok(Scalar::new(re, im))
        } else {
            Ok(Scalar::from(parse_ratio(&t).ok_or_else(err)?))
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) if n.is_i64() => Ok(Scalar::int(n.as_i64().unwrap())),
            other => Err(serde::de::Error::custom(format!("expected scalar, got {other}"))),
        }
    }
}

/// Parses a rational from a JSON string or integer; used by the series wire format.
pub fn rational_from_json(v: &serde_json::Value) -> Option<BigRational> {
    match v {
        serde_json::Value::String(s) => parse_ratio(s),
        serde_json::Value::Number(n) => n.as_i64().map(|k| BigRational::from_integer(k.into())),
        _ => None,
    }
}

pub fn rational_to_json(r: &BigRational) -> serde_json::Value {
    serde_json::Value::String(fmt_ratio(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(2, 3);
        assert_eq!(&a + &b, Scalar::one());
        let z: Scalar = "1/2+3/4*i".parse().unwrap();
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, Scalar::one());
    }

    #[test]
    fn string_round_trip() {
        for s in ["3", "-7/2", "1/2+3/4*i", "0-1*i", "-5/3-2/7*i"] {
            let z: Scalar = s.parse().unwrap();
            assert_eq!(z.to_string(), s);
        }
        assert_eq!("4".parse::<Scalar>().unwrap(), Scalar::int(4));
        assert_eq!("2*i".parse::<Scalar>().unwrap(), Scalar::i() * Scalar::int(2));
        assert!("1/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn roots_in_gaussian_rationals() {
        assert_eq!(Scalar::int(4).nth_root(2).unwrap().pow(2), Scalar::int(4));
        assert_eq!(Scalar::int(-1).nth_root(2).unwrap().pow(2), Scalar::int(-1));
        assert_eq!(Scalar::ratio(-8, 27).nth_root(3).unwrap(), Scalar::ratio(-2, 3));
        assert!(Scalar::int(2).nth_root(2).is_none());
        let z: Scalar = "3/1+4/1*i".parse().unwrap(); // (2+i)^2
        assert_eq!(z.nth_root(2).unwrap().pow(2), z);
        assert_eq!(Scalar::int(-4).nth_root(4).unwrap().pow(4), Scalar::int(-4));
    }
}
