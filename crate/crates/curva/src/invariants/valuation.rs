use crate::curve::{Branch, Multigerm};
use crate::error::{CurvaError, Result};
use crate::kernel::{linalg, BiPoly, ExtNat, Scalar, Series, ValueVec, EXACT};

use super::implicit::{weierstrass, weierstrass_swapped, Implicit};

/// ν(h) along every branch. The stored terms of each branch are read as
/// an exact parametrization; ∞ means the exact pullback vanishes.
pub fn valuation(phi: &Multigerm, h: &BiPoly) -> Result<ValueVec> {
    phi.branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let e = b.exact();
            let pb = h.pullback(&e.x, &e.y, EXACT);
            match pb.ord() {
                None => Ok(ExtNat::Inf),
                Some(o) if o < b.trunc() => Ok(ExtNat::Fin(o as u64)),
                Some(o) => Err(CurvaError::Precision(format!(
                    "ν_{}(h) = {o} is not below the branch trunc {}",
                    i + 1,
                    b.trunc()
                ))),
            }
        })
        .collect()
}

/// ord of f_other along `b`, growing the Weierstrass truncation until the
/// value is certified. Fails when the branches coincide.
pub fn order_of_equation(b: &Branch, other: &Branch) -> Result<u64> {
    let e = b.exact();
    let swapped = weierstrass_swapped(other);
    let mut prec = 4 * (b.n + other.n);
    loop {
        let imp: Implicit = weierstrass(other, Implicit::terms_needed(swapped, &e, prec))?;
        let exact_lim = imp.exact_below_on(&e);
        let lim = if exact_lim == EXACT { EXACT } else { exact_lim.min(prec) };
        let pb = imp.poly.pullback(&e.x, &e.y, lim);
        if let Some(o) = pb.ord() {
            return Ok(o as u64);
        }
        if lim == EXACT {
            return Err(CurvaError::Validation("repeated branch: intersection multiplicity is infinite".into()));
        }
        prec *= 2;
        if prec > 1 << 12 {
            return Err(CurvaError::Validation(
                "repeated branch: intersection multiplicity exceeds any workable bound".into(),
            ));
        }
    }
}

/// ν_i(f_j), checked against ν_j(f_i).
pub fn intersection_mult(phi: &Multigerm, i: usize, j: usize) -> Result<u64> {
    if i == j || i >= phi.r() || j >= phi.r() {
        return Err(CurvaError::Validation("intersection multiplicity needs two distinct branches".into()));
    }
    let a = order_of_equation(&phi.branches[i], &phi.branches[j])?;
    let b = order_of_equation(&phi.branches[j], &phi.branches[i])?;
    if a != b {
        return Err(CurvaError::Oracle(format!("ν_{}(f_{}) = {a} but ν_{}(f_{}) = {b}", i + 1, j + 1, j + 1, i + 1)));
    }
    Ok(a)
}

/// Semigroup of a single branch: its elements below the conductor and the
/// conductor μ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchSemigroup {
    pub elements_below_conductor: Vec<u64>,
    pub conductor: u64,
    pub multiplicity: u64,
}

impl BranchSemigroup {
    pub fn contains(&self, v: u64) -> bool {
        v >= self.conductor || self.elements_below_conductor.contains(&v)
    }

    /// Minimal generators.
    pub fn generators(&self) -> Vec<u64> {
        let mut gens: Vec<u64> = Vec::new();
        let top = self.conductor + self.multiplicity;
        for v in 1..top {
            if !self.contains(v) {
                continue;
            }
            let decomposable = (1..v).any(|a| self.contains(a) && self.contains(v - a));
            if !decomposable {
                gens.push(v);
            }
        }
        gens
    }
}

/// Orders of all h(x, y) below t^prec: the pivot columns of the echelon
/// image of the monomials of degree < ⌈prec/n⌉.
fn branch_values_below(b: &Branch, prec: usize) -> Vec<u64> {
    let e = b.exact();
    let dmax = prec.div_ceil(b.n);
    let mut xp = vec![Series::one()];
    let mut yp = vec![Series::one()];
    for _ in 0..dmax {
        xp.push(xp.last().unwrap().mul_to(&e.x, prec));
        yp.push(yp.last().unwrap().mul_to(&e.y, prec));
    }
    let mut rows: linalg::Matrix = Vec::new();
    for deg in 0..dmax {
        for a in 0..=deg {
            let s = xp[a].mul_to(&yp[deg - a], prec);
            let mut row = vec![Scalar::from(0); prec];
            for (k, c) in s.terms() {
                row[k] = c.clone();
            }
            if row.iter().any(|c| !num_traits::Zero::is_zero(c)) {
                rows.push(row);
            }
        }
    }
    linalg::echelon_pivots(rows).into_iter().map(|p| p as u64).collect()
}

pub fn branch_semigroup(b: &Branch) -> Result<BranchSemigroup> {
    let n = b.n as u64;
    let mut prec = 4 * b.n + 4;
    loop {
        let vals = branch_values_below(b, prec);
        let contains = |v: u64| vals.contains(&v);
        // a run of n consecutive values closes the semigroup from there on
        let run_start = (0..prec as u64).find(|&c| c + n <= prec as u64 && (c..c + n).all(contains));
        if let Some(c0) = run_start {
            let mut c = c0;
            while c > 0 && contains(c - 1) {
                c -= 1;
            }
            let below: Vec<u64> = vals.iter().copied().filter(|&v| v < c).collect();
            return Ok(BranchSemigroup { elements_below_conductor: below, conductor: c, multiplicity: n });
        }
        prec *= 2;
        if prec > 1 << 12 {
            return Err(CurvaError::Internal("branch semigroup conductor not found".into()));
        }
    }
}

/// The conductor of Γ: κ_i = μ_i + Σ_{j≠i} ν_i(f_j).
pub fn kappa(phi: &Multigerm) -> Result<Vec<u64>> {
    let r = phi.r();
    let mut k: Vec<u64> = Vec::with_capacity(r);
    for b in &phi.branches {
        k.push(branch_semigroup(b)?.conductor);
    }
    for i in 0..r {
        for j in i + 1..r {
            let m = intersection_mult(phi, i, j)?;
            k[i] += m;
            k[j] += m;
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{fin_vec, ExtNat::Inf};

    fn germ(bs: Vec<Branch>) -> Multigerm {
        Multigerm::new(bs).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let cusp = germ(vec![Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap()]);
        assert_eq!(valuation(&cusp, &BiPoly::y()).unwrap(), fin_vec(&[3]));
        let f = BiPoly::from_ints(&[(0, 2, 1), (3, 0, -1)]);
        assert_eq!(valuation(&cusp, &f).unwrap(), vec![Inf]);
        let node = germ(vec![
            Branch::from_ints(&[(1, 1)], &[], 4).unwrap(),
            Branch::from_ints(&[], &[(1, 1)], 4).unwrap(),
        ]);
        let h = BiPoly::from_ints(&[(1, 0, 1), (0, 1, 1)]);
        assert_eq!(valuation(&node, &h).unwrap(), fin_vec(&[1, 1]));
    }

    #[test]
    fn intersection_examples() {
        let node = germ(vec![
            Branch::from_ints(&[(1, 1)], &[], 4).unwrap(),
            Branch::from_ints(&[], &[(1, 1)], 4).unwrap(),
        ]);
        assert_eq!(intersection_mult(&node, 0, 1).unwrap(), 1);
        let two_cusps = germ(vec![
            Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap(),
            Branch::from_ints(&[(3, 1)], &[(2, 1)], 8).unwrap(),
        ]);
        assert_eq!(intersection_mult(&two_cusps, 0, 1).unwrap(), 4);
        let tangent = germ(vec![
            Branch::from_ints(&[(1, 1)], &[], 4).unwrap(),
            Branch::from_ints(&[(1, 1)], &[(2, 1)], 4).unwrap(),
        ]);
        assert_eq!(intersection_mult(&tangent, 0, 1).unwrap(), 2);
        let repeated = germ(vec![
            Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap(),
            Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap(),
        ]);
        assert!(matches!(intersection_mult(&repeated, 0, 1), Err(CurvaError::Validation(_))));
    }

    #[test]
    fn kappa_examples() {
        let cusp = germ(vec![Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap()]);
        assert_eq!(kappa(&cusp).unwrap(), vec![2]);
        let ordinary3 = germ(vec![
            Branch::from_ints(&[(1, 1)], &[], 4).unwrap(),
            Branch::from_ints(&[], &[(1, 1)], 4).unwrap(),
            Branch::from_ints(&[(1, 1)], &[(1, 1)], 4).unwrap(),
        ]);
        assert_eq!(kappa(&ordinary3).unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn semigroup_of_zariski_example() {
        let b = Branch::from_ints(&[(4, 1)], &[(6, 1), (7, 1)], 20).unwrap();
        let s = branch_semigroup(&b).unwrap();
        assert_eq!(s.generators(), vec![4, 6, 13]);
        assert_eq!(s.conductor, 16);
    }
}
