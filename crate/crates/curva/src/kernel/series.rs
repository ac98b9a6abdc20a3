use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::Value;

use super::scalar::{rational_from_json, rational_to_json, Scalar};
use crate::error::{CurvaError, Result};

/// Truncation marker for series that are known exactly (polynomials).
pub const EXACT: usize = usize::MAX;

/// A truncated univariate power series: the stored coefficients are exact and
/// every exponent ≥ `trunc` is unknown. `trunc == EXACT` marks a polynomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    terms: BTreeMap<usize, Scalar>,
    trunc: usize,
}

fn sat_add(a: usize, b: usize) -> usize {
    a.saturating_add(b)
}

fn sat_mul(a: usize, b: usize) -> usize {
    if a == EXACT || b == EXACT {
        if a == 0 || b == 0 {
            0
        } else {
            EXACT
        }
    } else {
        a.saturating_mul(b)
    }
}

impl Series {
    pub fn new<I: IntoIterator<Item = (usize, Scalar)>>(terms: I, trunc: usize) -> Self {
        let mut map: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            if e >= trunc {
                continue;
            }
            let slot = map.entry(e).or_insert_with(Scalar::zero);
            *slot += &c;
        }
        map.retain(|_, c| !c.is_zero());
        Series { terms: map, trunc }
    }

    pub fn exact<I: IntoIterator<Item = (usize, Scalar)>>(terms: I) -> Self {
        Series::new(terms, EXACT)
    }

    pub fn zero(trunc: usize) -> Self {
        Series { terms: BTreeMap::new(), trunc }
    }

    pub fn one() -> Self {
        Series::monomial(Scalar::one(), 0)
    }

    /// The identity parameter `t`.
    pub fn t() -> Self {
        Series::monomial(Scalar::one(), 1)
    }

    pub fn monomial(c: Scalar, e: usize) -> Self {
        Series::exact([(e, c)])
    }

    /// Builds an exact polynomial from small integer coefficients `[(exp, coeff)]`.
    pub fn from_ints(terms: &[(usize, i64)]) -> Self {
        Series::exact(terms.iter().map(|&(e, c)| (e, Scalar::int(c))))
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc == EXACT
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest stored exponent; `None` when nothing below `trunc` is nonzero.
    pub fn ord(&self) -> Option<usize> {
        self.terms.keys().next().copied()
    }

    /// A guaranteed lower bound for the true order.
    pub fn ord_lower(&self) -> usize {
        self.ord().unwrap_or(self.trunc)
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of t^e. Exponents at or beyond `trunc` read as zero; use
    /// [`Series::coeff_checked`] when that distinction matters.
    pub fn coeff(&self, e: usize) -> Scalar {
        self.terms.get(&e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn coeff_ref(&self, e: usize) -> Option<&Scalar> {
        self.terms.get(&e)
    }

    pub fn coeff_checked(&self, e: usize) -> Option<Scalar> {
        if e >= self.trunc {
            None
        } else {
            Some(self.coeff(e))
        }
    }

    /// Drops everything at or above `t`; the result is known only below `t`.
    pub fn truncate(&self, t: usize) -> Series {
        let t = t.min(self.trunc);
        Series {
            terms: self.terms.range(..t).map(|(e, c)| (*e, c.clone())).collect(),
            trunc: t,
        }
    }

    /// The jet j^{k}: terms below `k + 1` kept, declared exact.
    pub fn jet_exact(&self, k: usize) -> Series {
        Series {
            terms: self.terms.range(..=k).map(|(e, c)| (*e, c.clone())).collect(),
            trunc: EXACT,
        }
    }

    /// Treats the stored terms as an exact polynomial.
    pub fn as_exact(&self) -> Series {
        Series { terms: self.terms.clone(), trunc: EXACT }
    }

    pub fn with_trunc(&self, t: usize) -> Series {
        Series::new(self.terms.iter().map(|(e, c)| (*e, c.clone())), t)
    }

    pub fn set_coeff(&mut self, e: usize, c: Scalar) {
        assert!(e < self.trunc, "coefficient beyond truncation");
        if c.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        let trunc = self.trunc.min(o.trunc);
        let mut terms = BTreeMap::new();
        for (e, c) in self.terms.range(..trunc) {
            terms.insert(*e, c.clone());
        }
        for (e, c) in o.terms.range(..trunc) {
            let slot = terms.entry(*e).or_insert_with(Scalar::zero);
            *slot += c;
        }
        terms.retain(|_, c: &mut Scalar| !c.is_zero());
        Series { terms, trunc }
    }

    pub fn neg(&self) -> Series {
        Series {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Scalar) -> Series {
        if k.is_zero() {
            return Series::zero(self.trunc);
        }
        Series {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
            trunc: self.trunc,
        }
    }

    /// Product with trunc = min(a.trunc + ord b, b.trunc + ord a).
    pub fn mul(&self, o: &Series) -> Series {
        let trunc = sat_add(self.trunc, o.ord_lower()).min(sat_add(o.trunc, self.ord_lower()));
        self.mul_to(o, trunc)
    }

    /// Product restricted to exponents below `cap` (intersected with the
    /// provable trunc).
    pub fn mul_to(&self, o: &Series, cap: usize) -> Series {
        let trunc = sat_add(self.trunc, o.ord_lower())
            .min(sat_add(o.trunc, self.ord_lower()))
            .min(cap);
        let mut terms: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (ea, ca) in self.terms.iter() {
            if *ea >= trunc {
                break;
            }
            for (eb, cb) in o.terms.iter() {
                let e = ea + eb;
                if e >= trunc {
                    break;
                }
                let slot = terms.entry(e).or_insert_with(Scalar::zero);
                *slot += &(ca * cb);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Series { terms, trunc }
    }

    pub fn pow(&self, n: usize, cap: usize) -> Series {
        let mut acc = Series::one().truncate(cap);
        for _ in 0..n {
            acc = acc.mul_to(self, cap);
        }
        acc
    }

    /// d/dt; unknown part moves down by one.
    pub fn derivative(&self) -> Series {
        let trunc = if self.trunc == EXACT { EXACT } else { self.trunc.saturating_sub(1) };
        Series::new(
            self.terms
                .iter()
                .filter(|(e, _)| **e > 0)
                .map(|(e, c)| (e - 1, c * &Scalar::int(*e as i64))),
            trunc,
        )
    }

    /// Multiplies by t^k.
    pub fn shift_up(&self, k: usize) -> Series {
        Series {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            trunc: sat_add(self.trunc, k),
        }
    }

    /// Divides by t^k; fails if a stored exponent is below k.
    pub fn shift_down(&self, k: usize) -> Result<Series> {
        if let Some(o) = self.ord() {
            if o < k {
                return Err(CurvaError::Internal(format!("cannot divide series of order {o} by t^{k}")));
            }
        }
        if self.trunc != EXACT && self.trunc < k {
            return Err(CurvaError::Precision(format!("series known below t^{} only", self.trunc)));
        }
        Ok(Series {
            terms: self.terms.iter().map(|(e, c)| (e - k, c.clone())).collect(),
            trunc: if self.trunc == EXACT { EXACT } else { self.trunc - k },
        })
    }

    /// Inverse of a unit series, to its own trunc (or `cap` when exact).
    pub fn inv_unit(&self, cap: usize) -> Result<Series> {
        let c0 = self.coeff(0);
        let c0i = c0.inv().ok_or_else(|| CurvaError::Internal("series is not a unit".into()))?;
        let prec = self.trunc.min(cap);
        if prec == EXACT {
            return Err(CurvaError::Internal("inverse of an exact series needs a cap".into()));
        }
        let mut out: Vec<Scalar> = vec![Scalar::zero(); prec];
        if prec > 0 {
            out[0] = c0i.clone();
        }
        for e in 1..prec {
            let mut acc = Scalar::zero();
            for (k, ck) in self.terms.range(1..=e) {
                let v = &out[e - k];
                if !v.is_zero() {
                    acc += &(ck * v);
                }
            }
            out[e] = -(&acc * &c0i);
        }
        Ok(Series::new(out.into_iter().enumerate(), prec))
    }

    /// f(g(t)). Requires ord g ≥ 1. The result trunc is the largest order
    /// provably determined by the known parts of f and g, capped at `cap`.
    pub fn compose_to(&self, g: &Series, cap: usize) -> Result<Series> {
        if !g.coeff(0).is_zero() {
            return Err(CurvaError::Validation("inner series of a composition has a constant term".into()));
        }
        let m = g.ord_lower().max(1);
        let mut trunc = sat_mul(self.trunc, m);
        if g.trunc != EXACT {
            if let Some((e_min, _)) = self.terms.range(1..).next() {
                trunc = trunc.min(sat_add(g.trunc, sat_mul(e_min - 1, m)));
            }
        }
        let trunc = trunc.min(cap);
        let gt = if trunc == EXACT { g.clone() } else { g.truncate(trunc).as_exact() };
        let mut acc = Series::zero(trunc);
        let mut power = Series::one();
        let mut last = 0usize;
        for (e, c) in self.terms.iter() {
            if trunc != EXACT && sat_mul(*e, m) >= trunc {
                break;
            }
            while last < *e {
                power = power.mul_to(&gt, trunc);
                last += 1;
            }
            acc = acc.add(&power.scale(c));
        }
        Ok(Series { terms: acc.terms, trunc })
    }

    pub fn compose(&self, g: &Series) -> Result<Series> {
        self.compose_to(g, EXACT)
    }

    /// ρ^{-1} for ord ρ = 1, known to min(ρ.trunc, prec), by Newton iteration
    /// g ← g − (ρ∘g − t)/(ρ′∘g).
    pub fn reversion(&self, prec: usize) -> Result<Series> {
        let c1 = self.coeff(1);
        if !self.coeff(0).is_zero() || c1.is_zero() {
            return Err(CurvaError::Validation("reparametrization must have order exactly 1".into()));
        }
        let target = self.trunc.min(prec);
        if target == EXACT {
            if self.degree() == Some(1) {
                return Ok(Series::monomial(c1.inv().unwrap(), 1));
            }
            return Err(CurvaError::Internal("reversion of a nonlinear polynomial needs a precision".into()));
        }
        let mut g = Series::monomial(c1.inv().unwrap(), 1).truncate(target);
        let mut p = 2usize.min(target);
        let rho_d = self.derivative();
        while p < target {
            p = (2 * p).min(target);
            let gp = g.as_exact().truncate(p).as_exact();
            let comp = self.compose_to(&gp, p)?.sub(&Series::t()).truncate(p);
            let denom = rho_d.compose_to(&gp, p)?.inv_unit(p)?;
            g = gp.sub(&comp.mul_to(&denom, p)).truncate(p);
        }
        Ok(g.truncate(target))
    }

    /// s^(1/n) for a unit s with constant term 1, to `prec` terms (Miller's
    /// recurrence for powers of a series).
    pub fn unit_root(&self, n: usize, prec: usize) -> Result<Series> {
        if !self.coeff(0).is_one() {
            return Err(CurvaError::Internal("unit_root needs constant term 1".into()));
        }
        let prec = self.trunc.min(prec);
        if prec == EXACT {
            return Err(CurvaError::Internal("unit_root of an exact series needs a precision".into()));
        }
        let alpha = Scalar::ratio(1, n as i64);
        let a1 = &alpha + &Scalar::one();
        let mut out: Vec<Scalar> = vec![Scalar::zero(); prec];
        if prec > 0 {
            out[0] = Scalar::one();
        }
        for k in 1..prec {
            let mut acc = Scalar::zero();
            for (j, sj) in self.terms.range(1..=k) {
                let w = &(&a1 * &Scalar::int(*j as i64)) - &Scalar::int(k as i64);
                if !w.is_zero() && !out[k - *j].is_zero() {
                    acc += &(&(&w * sj) * &out[k - *j]);
                }
            }
            out[k] = &acc * &Scalar::ratio(1, k as i64);
        }
        Ok(Series::new(out.into_iter().enumerate(), prec))
    }

    /// Time-one flow of the vector field ε(t)·d/dt applied to t, i.e.
    /// Σ_m D^m(t)/m! with D(f) = ε·f′. Requires ord ε ≥ 2.
    pub fn flow_of(eps: &Series, prec: usize) -> Result<Series> {
        if eps.ord_lower() < 2 {
            return Err(CurvaError::Internal("flow generator must lie in <t^2>".into()));
        }
        let mut acc = Series::t().truncate(prec);
        let mut term = Series::t().truncate(prec);
        let mut m = 0i64;
        loop {
            m += 1;
            term = eps.mul_to(&term.derivative(), prec).scale(&Scalar::ratio(1, m));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.truncate(prec.min(eps.trunc)))
    }

    /// Wire format: array of [exponent, re, im].
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    Value::Array(vec![
                        Value::from(*e as u64),
                        rational_to_json(&c.re),
                        rational_to_json(&c.im),
                    ])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value, trunc: usize) -> Result<Series> {
        let arr = v
            .as_array()
            .ok_or_else(|| CurvaError::Validation("series must be an array of [exponent, re, im]".into()))?;
        let mut terms = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for item in arr {
            let triple = item
                .as_array()
                .filter(|t| t.len() == 3 || t.len() == 2)
                .ok_or_else(|| CurvaError::Validation(format!("bad series term {item}")))?;
            let e = triple[0]
                .as_u64()
                .ok_or_else(|| CurvaError::Validation(format!("bad exponent in {item}")))? as usize;
            if !seen.insert(e) {
                return Err(CurvaError::Validation(format!("repeated exponent {e}")));
            }
            let re = rational_from_json(&triple[1])
                .ok_or_else(|| CurvaError::Validation(format!("bad real part in {item}")))?;
            let im = if triple.len() == 3 {
                rational_from_json(&triple[2])
                    .ok_or_else(|| CurvaError::Validation(format!("bad imaginary part in {item}")))?
            } else {
                num_rational::BigRational::zero()
            };
            if e >= trunc {
                return Err(CurvaError::Validation(format!("exponent {e} not below trunc {trunc}")));
            }
            terms.push((e, Scalar::new(re, im)));
        }
        Ok(Series::new(terms, trunc))
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})t^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.trunc != EXACT {
            write!(f, " + O(t^{})", self.trunc)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(terms: &[(usize, i64)], trunc: usize) -> Series {
        Series::new(terms.iter().map(|&(e, c)| (e, Scalar::int(c))), trunc)
    }

    #[test]
    fn add_mul_derivative() {
        let a = Series::from_ints(&[(2, 1)]);
        let b = Series::from_ints(&[(3, 1)]);
        assert_eq!(a.add(&b), Series::from_ints(&[(2, 1), (3, 1)]));
        assert_eq!(a.mul(&b), Series::from_ints(&[(5, 1)]));
        let d = Series::from_ints(&[(6, 1), (7, 1)]).derivative();
        assert_eq!(d, Series::from_ints(&[(5, 6), (6, 7)]));
    }

    #[test]
    fn truncation_propagation() {
        let a = s(&[(2, 1)], 5);
        let b = s(&[(3, 1)], 6);
        let p = a.mul(&b);
        assert_eq!(p.trunc(), 8);
        assert_eq!(a.add(&b).trunc(), 5);
    }

    #[test]
    fn composition_examples() {
        let f = Series::from_ints(&[(2, 1)]);
        let g = Series::from_ints(&[(1, 1), (2, 1)]);
        assert_eq!(f.compose(&g).unwrap(), Series::from_ints(&[(2, 1), (3, 2), (4, 1)]));
        assert_eq!(Series::t().compose(&g).unwrap(), g);
        let cube = Series::from_ints(&[(3, 1)]);
        assert_eq!(cube.compose(&Series::from_ints(&[(1, 2)])).unwrap(), Series::from_ints(&[(3, 8)]));
        assert!(f.compose(&Series::from_ints(&[(0, 1), (1, 1)])).is_err());
    }

    #[test]
    fn reversion_examples() {
        let half = Series::from_ints(&[(1, 2)]).reversion(EXACT).unwrap();
        assert_eq!(half, Series::monomial(Scalar::ratio(1, 2), 1));
        let rho = s(&[(1, 1), (2, 1)], 10);
        let inv = rho.reversion(10).unwrap();
        assert_eq!(inv.coeff(2), Scalar::int(-1));
        assert_eq!(inv.coeff(3), Scalar::int(2));
        assert_eq!(inv.coeff(4), Scalar::int(-5));
        let back = rho.compose(&inv).unwrap();
        assert_eq!(back.truncate(10), Series::t().truncate(10));
        assert_eq!(Series::t().reversion(EXACT).unwrap(), Series::t());
    }

    #[test]
    fn flow_of_monomial_field() {
        // ε = t^2: the flow of t^2 d/dt at time one is t/(1-t).
        let f = Series::flow_of(&Series::from_ints(&[(2, 1)]), 8).unwrap();
        assert_eq!(f, s(&[(1, 1), (2, 1), (3, 1), (4, 1), (5, 1), (6, 1), (7, 1)], 8));
    }

    #[test]
    fn unit_root_squares_back() {
        let u = Series::from_ints(&[(0, 1), (1, 3), (2, -1)]);
        let r = u.unit_root(2, 9).unwrap();
        assert_eq!(r.mul_to(&r, 9), u.truncate(9));
        let r3 = u.unit_root(3, 7).unwrap();
        assert_eq!(r3.pow(3, 7), u.truncate(7));
    }
}
