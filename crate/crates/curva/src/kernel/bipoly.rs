use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::Value;

use super::scalar::{rational_from_json, rational_to_json, Scalar};
use super::series::Series;
use crate::error::{CurvaError, Result};

/// An exact polynomial in X and Y, keyed by (degX, degY).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Scalar>,
}

impl BiPoly {
    pub fn new<I: IntoIterator<Item = ((usize, usize), Scalar)>>(terms: I) -> Self {
        let mut map: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for (k, c) in terms {
            let slot = map.entry(k).or_insert_with(Scalar::zero);
            *slot += &c;
        }
        map.retain(|_, c| !c.is_zero());
        BiPoly { terms: map }
    }

    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        BiPoly::new([((0, 0), c)])
    }

    pub fn monomial(a: usize, b: usize) -> Self {
        BiPoly::new([((a, b), Scalar::one())])
    }

    pub fn x() -> Self {
        BiPoly::monomial(1, 0)
    }

    pub fn y() -> Self {
        BiPoly::monomial(0, 1)
    }

    /// From small integer coefficients `[(a, b, c)]` meaning Σ c X^a Y^b.
    pub fn from_ints(terms: &[(usize, usize, i64)]) -> Self {
        BiPoly::new(terms.iter().map(|&(a, b, c)| ((a, b), Scalar::int(c))))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &Scalar)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, a: usize, b: usize) -> Scalar {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    /// Lowest total degree among the terms (the 𝓜-adic order).
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|(a, b)| a + b).min()
    }

    pub fn degree_in_y(&self) -> Option<usize> {
        self.terms.keys().map(|(_, b)| *b).max()
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let slot = terms.entry(*k).or_insert_with(Scalar::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        BiPoly { terms }
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Scalar) -> BiPoly {
        if k.is_zero() {
            return BiPoly::zero();
        }
        BiPoly { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        self.mul_below(o, usize::MAX)
    }

    /// Product keeping only monomials of total degree < `cap`.
    pub fn mul_below(&self, o: &BiPoly, cap: usize) -> BiPoly {
        let mut terms: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                if a1 + a2 + b1 + b2 >= cap {
                    continue;
                }
                let slot = terms.entry((a1 + a2, b1 + b2)).or_insert_with(Scalar::zero);
                *slot += &(c1 * c2);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        BiPoly { terms }
    }

    pub fn pow(&self, n: usize) -> BiPoly {
        let mut acc = BiPoly::constant(Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drops monomials of total degree ≥ `cap`.
    pub fn truncate_degree(&self, cap: usize) -> BiPoly {
        BiPoly {
            terms: self.terms.iter().filter(|((a, b), _)| a + b < cap).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    pub fn dx(&self) -> BiPoly {
        BiPoly::new(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|((a, b), c)| ((a - 1, *b), c * &Scalar::int(*a as i64))),
        )
    }

    pub fn dy(&self) -> BiPoly {
        BiPoly::new(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|((a, b), c)| ((*a, b - 1), c * &Scalar::int(*b as i64))),
        )
    }

    /// Swaps the roles of X and Y.
    pub fn swap_xy(&self) -> BiPoly {
        BiPoly { terms: self.terms.iter().map(|((a, b), c)| ((*b, *a), c.clone())).collect() }
    }

    /// h(x(t), y(t)) restricted to exponents below `cap`, with trunc propagated.
    pub fn pullback(&self, x: &Series, y: &Series, cap: usize) -> Series {
        let max_a = self.terms.keys().map(|(a, _)| *a).max().unwrap_or(0);
        let max_b = self.terms.keys().map(|(_, b)| *b).max().unwrap_or(0);
        let mut xp = vec![Series::one()];
        for _ in 0..max_a {
            let next = xp.last().unwrap().mul_to(x, cap);
            xp.push(next);
        }
        let mut yp = vec![Series::one()];
        for _ in 0..max_b {
            let next = yp.last().unwrap().mul_to(y, cap);
            yp.push(next);
        }
        let mut acc = Series::zero(cap);
        for ((a, b), c) in &self.terms {
            let term = xp[*a].mul_to(&yp[*b], cap).scale(c);
            acc = acc.add(&term);
        }
        acc
    }

    /// p(σ1, σ2), keeping monomials of total degree < `cap`.
    pub fn substitute(&self, s1: &BiPoly, s2: &BiPoly, cap: usize) -> BiPoly {
        let max_a = self.terms.keys().map(|(a, _)| *a).max().unwrap_or(0);
        let max_b = self.terms.keys().map(|(_, b)| *b).max().unwrap_or(0);
        let mut p1 = vec![BiPoly::constant(Scalar::one())];
        for _ in 0..max_a {
            let next = p1.last().unwrap().mul_below(s1, cap);
            p1.push(next);
        }
        let mut p2 = vec![BiPoly::constant(Scalar::one())];
        for _ in 0..max_b {
            let next = p2.last().unwrap().mul_below(s2, cap);
            p2.push(next);
        }
        let mut acc = BiPoly::zero();
        for ((a, b), c) in &self.terms {
            acc = acc.add(&p1[*a].mul_below(&p2[*b], cap).scale(c));
        }
        acc
    }

    /// Exact division in ℚ(i)[X,Y]; `None` when the divisor does not divide.
    pub fn div_exact(&self, d: &BiPoly) -> Option<BiPoly> {
        let (&(da, db), dc) = d.terms.iter().next_back()?;
        let dci = dc.inv()?;
        let mut rem = self.clone();
        let mut quo = BiPoly::zero();
        while let Some((&(a, b), c)) = rem.terms.iter().next_back() {
            if a < da || b < db {
                return None;
            }
            let q = BiPoly::new([((a - da, b - db), c * &dci)]);
            rem = rem.sub(&q.mul(d));
            quo = quo.add(&q);
        }
        Some(quo)
    }

    /// Divides by the coefficient of the lexicographically largest monomial.
    pub fn make_monic(&self) -> BiPoly {
        match self.terms.iter().next_back() {
            Some((_, c)) => self.scale(&c.inv().unwrap()),
            None => self.clone(),
        }
    }

    /// Wire format: array of [degX, degY, re, im].
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((a, b), c)| {
                    Value::Array(vec![
                        Value::from(*a as u64),
                        Value::from(*b as u64),
                        rational_to_json(&c.re),
                        rational_to_json(&c.im),
                    ])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<BiPoly> {
        let bad = || CurvaError::Validation(format!("bad polynomial {v}"));
        let arr = v.as_array().ok_or_else(bad)?;
        let mut terms = Vec::new();
        for item in arr {
            let q = item.as_array().filter(|q| q.len() == 4).ok_or_else(bad)?;
            let a = q[0].as_u64().ok_or_else(bad)? as usize;
            let b = q[1].as_u64().ok_or_else(bad)? as usize;
            let re = rational_from_json(&q[2]).ok_or_else(bad)?;
            let im = rational_from_json(&q[3]).ok_or_else(bad)?;
            terms.push(((a, b), Scalar::new(re, im)));
        }
        Ok(BiPoly::new(terms))
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|((a, b), c)| format!("({c})X^{a}Y^{b}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A polynomial in an auxiliary variable with BiPoly coefficients, lowest
/// degree first.
pub type VarPoly = Vec<BiPoly>;

fn var_degree(p: &VarPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Sylvester resultant eliminating the auxiliary variable, computed by
/// fraction-free (Bareiss) elimination.
pub fn resultant(p: &VarPoly, q: &VarPoly) -> Result<BiPoly> {
    let dp = var_degree(p);
    let dq = var_degree(q);
    let (Some(m), Some(n)) = (dp, dq) else {
        return Ok(BiPoly::zero());
    };
    if m == 0 && n == 0 {
        return Err(CurvaError::Validation("both polynomials have degree 0 in the eliminated variable".into()));
    }
    if m == 0 {
        return Ok(p[0].pow(n));
    }
    if n == 0 {
        return Ok(q[0].pow(m));
    }
    let size = m + n;
    let mut mat: Vec<Vec<BiPoly>> = vec![vec![BiPoly::zero(); size]; size];
    for i in 0..n {
        for k in 0..=m {
            mat[i][i + k] = p[m - k].clone();
        }
    }
    for i in 0..m {
        for k in 0..=n {
            mat[n + i][i + k] = q[n - k].clone();
        }
    }
    let mut sign = false;
    let mut prev = BiPoly::constant(Scalar::one());
    for k in 0..size {
        if mat[k][k].is_zero() {
            let Some(sw) = (k + 1..size).find(|&i| !mat[i][k].is_zero()) else {
                return Ok(BiPoly::zero());
            };
            mat.swap(k, sw);
            sign = !sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = mat[i][j].mul(&mat[k][k]).sub(&mat[i][k].mul(&mat[k][j]));
                mat[i][j] = num
                    .div_exact(&prev)
                    .ok_or_else(|| CurvaError::Internal("Bareiss division was not exact".into()))?;
            }
            mat[i][k] = BiPoly::zero();
        }
        prev = mat[k][k].clone();
    }
    let det = mat[size - 1][size - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

/// Res_t(X − x(t), Y − y(t)) for exact polynomial parametrizations.
pub fn implicit_resultant(x: &Series, y: &Series) -> Result<BiPoly> {
    let to_var = |s: &Series, var: BiPoly| -> VarPoly {
        let deg = s.degree().unwrap_or(0);
        let mut v = vec![BiPoly::zero(); deg + 1];
        v[0] = var;
        for (e, c) in s.terms() {
            v[e] = v[e].sub(&BiPoly::constant(c.clone()));
        }
        v
    };
    resultant(&to_var(x, BiPoly::x()), &to_var(y, BiPoly::y()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_examples() {
        let r = implicit_resultant(&Series::from_ints(&[(2, 1)]), &Series::from_ints(&[(3, 1)])).unwrap();
        let target = BiPoly::from_ints(&[(0, 2, 1), (3, 0, -1)]);
        assert!(r == target || r == target.neg(), "{r:?}");
        let r = implicit_resultant(&Series::t(), &Series::t()).unwrap();
        let target = BiPoly::from_ints(&[(0, 1, 1), (1, 0, -1)]);
        assert!(r == target || r == target.neg());
        let r = implicit_resultant(&Series::t(), &Series::zero(crate::kernel::series::EXACT)).unwrap();
        assert!(r == BiPoly::y() || r == BiPoly::y().neg());
        assert!(resultant(&vec![BiPoly::x()], &vec![BiPoly::y()]).is_err());
    }

    #[test]
    fn pullback_and_division() {
        let f = BiPoly::from_ints(&[(0, 2, 1), (3, 0, -1)]);
        let s = f.pullback(&Series::from_ints(&[(2, 1)]), &Series::from_ints(&[(3, 1)]), 20);
        assert!(s.is_zero());
        let g = BiPoly::from_ints(&[(1, 0, 1), (0, 1, 2)]);
        assert_eq!(f.mul(&g).div_exact(&g), Some(f.clone()));
        assert_eq!(f.div_exact(&g), None);
    }
}
