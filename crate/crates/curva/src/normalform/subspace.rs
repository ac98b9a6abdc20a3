//! The achievable order-k jets U_k and the elimination sets L_k.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::curve::Multigerm;
use crate::error::{CurvaError, Result};
use crate::invariants::valueset::{jet_spec, query_space};
use crate::invariants::{exponent_ranks, Element, JetSpace, Kind};
use crate::kernel::{linalg, BiPoly, Scalar};

/// U_k = {(α_i) : some w ∈ 𝓘_𝒢 has j^k w_i = α_i t^k}, in reduced echelon
/// form, each row with a form ω realizing it.
#[derive(Clone, Debug)]
pub struct JetSubspace {
    pub k: usize,
    pub basis: Vec<Vec<Scalar>>,
    pub pivots: Vec<usize>,
    pub witnesses: Vec<Element>,
}

fn add_scaled(acc: &mut BTreeMap<usize, Scalar>, src: &BTreeMap<usize, Scalar>, f: &Scalar) {
    for (g, v) in src {
        let e = acc.entry(*g).or_insert_with(Scalar::zero);
        *e += &(f * v);
    }
    acc.retain(|_, c| !c.is_zero());
}

pub fn jet_subspace(phi: &Multigerm, k: usize) -> Result<JetSubspace> {
    let r = phi.r();
    let n = phi.multiplicities();
    let spec = jet_spec(phi, Kind::LambdaG, vec![k + 1; r])?;
    let space = JetSpace::build(phi, spec)?;
    let above = space.subspace_above(&vec![k; r])?;
    // echelon form of the order-k coefficient rows, carrying combinations
    let mut rows: Vec<(Vec<Scalar>, BTreeMap<usize, Scalar>)> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for (jet, combo) in above {
        let mut v: Vec<Scalar> =
            (0..r).map(|i| if k > n[i] { jet[space.column(i, k)].clone() } else { Scalar::zero() }).collect();
        let mut c = combo;
        for ((row, rc), &p) in rows.iter().zip(&pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = -v[p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                *x += &(&f * y);
            }
            add_scaled(&mut c, rc, &f);
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { continue };
        let inv = v[p].inv().unwrap();
        let v: Vec<Scalar> = v.iter().map(|x| x * &inv).collect();
        let c: BTreeMap<usize, Scalar> = c.into_iter().map(|(g, x)| (g, &x * &inv)).collect();
        for (row, rc) in rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = -row[p].clone();
            for (x, y) in row.iter_mut().zip(&v) {
                *x += &(&f * y);
            }
            add_scaled(rc, &c, &f);
        }
        let pos = pivots.iter().position(|&q| q > p).unwrap_or(pivots.len());
        pivots.insert(pos, p);
        rows.insert(pos, (v, c));
    }
    let witnesses = rows.iter().map(|(_, c)| space.element_of(c)).collect();
    Ok(JetSubspace { k, basis: rows.into_iter().map(|(v, _)| v).collect(), pivots, witnesses })
}

impl JetSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// L_k: columns taken left to right whenever they keep the selection
    /// independent. For a matrix in reduced echelon form these are the pivots.
    pub fn greedy_basis(&self) -> Vec<usize> {
        let r = self.basis.first().map(|b| b.len()).unwrap_or(0);
        let mut chosen: Vec<usize> = Vec::new();
        let mut rank = 0;
        for i in 0..r {
            let mut cols = chosen.clone();
            cols.push(i);
            let rk = linalg::rank_of_columns(&self.basis, &cols);
            if rk > rank {
                chosen.push(i);
                rank = rk;
            }
        }
        chosen
    }

    /// The unique element of U_k with the prescribed coordinates on L_k,
    /// together with a form realizing it.
    pub fn realize(&self, lk: &[usize], target: &[Scalar]) -> Result<(Vec<Scalar>, Element)> {
        let d = self.dim();
        let m: linalg::Matrix = lk.iter().map(|&l| (0..d).map(|j| self.basis[j][l].clone()).collect()).collect();
        let sol = linalg::solve(&m, target);
        let c = sol
            .vector()
            .ok_or_else(|| CurvaError::Internal(format!("order {}: targets on L_k are not reachable", self.k)))?
            .clone();
        let r = self.basis.first().map(|b| b.len()).unwrap_or(0);
        let mut alpha = vec![Scalar::zero(); r];
        let mut fa = BiPoly::zero();
        let mut fb = BiPoly::zero();
        for (j, cj) in c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            for (x, y) in alpha.iter_mut().zip(&self.basis[j]) {
                *x += &(cj * y);
            }
            match &self.witnesses[j] {
                Element::Form { a, b } => {
                    fa = fa.add(&a.scale(cj));
                    fb = fb.add(&b.scale(cj));
                }
                Element::Function(_) => return Err(CurvaError::Internal("U_k witness is not a form".into())),
            }
        }
        Ok((alpha, Element::Form { a: fa, b: fb }))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "dim": self.dim(),
            "basis": self.basis.iter().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "witnesses": self.witnesses.iter().map(|w| w.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// dim U_k for every k ≤ k_max from a single jet space: with jets taken
/// below t^{k+1}, dim U_k is the rank gained by the order-k columns.
/// Orders at or below a multiplicity go through [`jet_subspace`].
pub fn jet_dims(phi: &Multigerm, k_max: usize) -> Result<Vec<usize>> {
    let r = phi.r();
    let nmax = phi.multiplicities().into_iter().max().unwrap_or(0);
    let spec = jet_spec(phi, Kind::LambdaG, vec![k_max + 1; r])?;
    let ranks = exponent_ranks(phi, &spec)?;
    (0..=k_max)
        .map(|k| if k <= nmax { jet_subspace(phi, k).map(|j| j.dim()) } else { Ok(ranks[k + 1] - ranks[k]) })
        .collect()
}

pub fn compute_lk(phi: &Multigerm, k: usize) -> Result<Vec<usize>> {
    Ok(jet_subspace(phi, k)?.greedy_basis())
}

/// Nonempty subsets of 0..r as sorted index lists.
pub fn nonempty_subsets(r: usize) -> Vec<Vec<usize>> {
    (1..1usize << r).map(|m| (0..r).filter(|i| m >> i & 1 == 1).collect()).collect()
}

/// L_k from the fibers of Λ_G at k̲: the graded-lex largest L such that
/// every l ∈ L has a nonempty fiber F_J with J ∩ L = {l}.
pub fn compute_lk_by_fibers(phi: &Multigerm, k: usize) -> Result<Vec<usize>> {
    let r = phi.r();
    let gamma = vec![k as u64; r];
    let mut space = query_space(phi, Kind::LambdaG, &crate::kernel::fin_vec(&gamma))?;
    let mut nonempty: Vec<u64> = Vec::new();
    for j in nonempty_subsets(r) {
        if space.fiber_nonempty(&j, &gamma)? {
            nonempty.push(j.iter().map(|&i| 1u64 << i).sum());
        }
    }
    let mut candidates: Vec<u64> = (0..1u64 << r).collect();
    // graded lex: larger sets first, then the set containing the earlier index
    let key = |m: &u64| {
        let bits: Vec<bool> = (0..r).map(|i| m >> i & 1 == 1).collect();
        (std::cmp::Reverse(m.count_ones()), std::cmp::Reverse(bits))
    };
    candidates.sort_by_key(key);
    for l in candidates {
        let ok = (0..r).filter(|i| l >> i & 1 == 1).all(|i| nonempty.iter().any(|&j| j & l == 1 << i));
        if ok {
            return Ok((0..r).filter(|i| l >> i & 1 == 1).collect());
        }
    }
    Ok(Vec::new())
}

/// Whether the projection of U_k to the coordinates L is onto.
pub fn projection_onto(js: &JetSubspace, l: &[usize]) -> bool {
    linalg::rank_of_columns(&js.basis, l) == l.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{to_block_form, Branch};

    #[test]
    fn prefix_ranks_match_per_order_spaces() {
        let germs = vec![
            vec![Branch::from_ints(&[(2, 1)], &[(3, 1), (4, 3), (5, -2)], 12).unwrap(),
                 Branch::from_ints(&[(2, 1)], &[(3, 2), (4, -1), (7, 5)], 12).unwrap()],
            vec![Branch::from_ints(&[(1, 1)], &[(2, 3), (3, 1)], 8).unwrap(),
                 Branch::from_ints(&[(2, 1), (3, 1)], &[(1, 1)], 8).unwrap(),
                 Branch::from_ints(&[(1, 1)], &[(1, 1), (2, -2)], 8).unwrap(),
                 Branch::from_ints(&[(1, 1)], &[(1, 5), (2, 7), (3, 1)], 8).unwrap(),
                 Branch::from_ints(&[(1, 1)], &[(1, -3), (2, 2), (3, 4)], 8).unwrap()],
            vec![Branch::from_ints(&[(4, 1)], &[(6, 1), (7, 1)], 18).unwrap()],
        ];
        for bs in germs {
            let (bf, _, _) = to_block_form(&Multigerm::new(bs).unwrap()).unwrap();
            let k_max = 9;
            let fast = jet_dims(&bf, k_max).unwrap();
            let slow: Vec<usize> = (0..=k_max).map(|k| jet_subspace(&bf, k).unwrap().dim()).collect();
            assert_eq!(fast, slow);
        }
    }
}
