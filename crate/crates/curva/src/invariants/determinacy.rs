//! Finite determinacy bounds d_i.

use std::collections::BTreeSet;

use crate::curve::{puiseux_block_form_with, LogEntry, Multigerm};
use crate::error::{CurvaError, Result};
use crate::kernel::linalg;

use super::jets::{JetSpace, JetSpec, Kind};
use super::valuation::kappa;

/// Closed-form bounds: κ_i + 2 for one branch of multiplicity ≤ 2,
/// κ_i + 1 for a pair of smooth branches, κ_i otherwise.
///
/// Two smooth branches need κ_i + 1 whether or not they share a tangent:
/// (t, t²) & (t, −t²) has κ = (2, 2), yet its 1-jet is a doubled line.
pub fn determinacy_bounds(phi: &Multigerm) -> Result<Vec<usize>> {
    let k = kappa(phi)?;
    let r = phi.r();
    let n = phi.multiplicities();
    let extra = if r == 1 && n[0] <= 2 {
        2
    } else if r == 2 && n[0] == 1 && n[1] == 1 {
        1
    } else {
        0
    };
    Ok(k.iter().map(|&k| k as usize + extra).collect())
}

/// d_i computed from its definition: the conductor of ν_i over the
/// elements of 𝓜² in the conductor ideal that vanish on every other branch.
/// Vanishing is tested to order κ_j + 2n_j + 2, which suffices: anything
/// that deep on branch j is ℓ²·z with z in the conductor supported on j.
pub fn determinacy_definitional(phi: &Multigerm) -> Result<Vec<usize>> {
    let k = kappa(phi)?;
    let n = phi.multiplicities();
    let r = phi.r();
    let prec: Vec<usize> = (0..r).map(|i| k[i] as usize + 2 * n[i] + 2).collect();
    let mut spec = JetSpec::new(Kind::Gamma, prec.clone());
    spec.min_degree = 2;
    let space = JetSpace::build(phi, spec)?;
    let mut out = Vec::with_capacity(r);
    for i in 0..r {
        let mut lower = prec.clone();
        lower[i] = k[i] as usize;
        let sub = space.subspace_above(&lower)?;
        let cols: Vec<usize> = (0..prec[i]).map(|e| space.column(i, e)).collect();
        let rows: linalg::Matrix = sub.iter().map(|(jet, _)| cols.iter().map(|&c| jet[c].clone()).collect()).collect();
        let orders: BTreeSet<usize> = linalg::echelon_pivots(rows).into_iter().collect();
        let mut c = prec[i];
        while c > 0 && orders.contains(&(c - 1)) {
            c -= 1;
        }
        if c > k[i] as usize + 2 * n[i] {
            return Err(CurvaError::Internal(format!("no conductor visible on branch {} below t^{}", i + 1, prec[i])));
        }
        out.push(c);
    }
    Ok(out)
}

/// Puiseux block form truncated at the determinacy bounds.
pub fn puiseux_block_form(phi: &Multigerm) -> Result<(Multigerm, Vec<LogEntry>)> {
    let d = determinacy_bounds(phi)?;
    puiseux_block_form_with(phi, &d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Branch;

    fn germ(bs: Vec<Branch>) -> Multigerm {
        Multigerm::new(bs).unwrap()
    }

    #[test]
    fn closed_form_matches_definition() {
        let curves = vec![
            germ(vec![Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap()]),
            germ(vec![Branch::from_ints(&[(1, 1)], &[], 4).unwrap()]),
            germ(vec![Branch::from_ints(&[(1, 1)], &[], 4).unwrap(), Branch::from_ints(&[], &[(1, 1)], 4).unwrap()]),
            germ(vec![
                Branch::from_ints(&[(1, 1)], &[], 4).unwrap(),
                Branch::from_ints(&[], &[(1, 1)], 4).unwrap(),
                Branch::from_ints(&[(1, 1)], &[(1, 1)], 4).unwrap(),
            ]),
            germ(vec![Branch::from_ints(&[(1, 1)], &[(2, 1)], 6).unwrap(), Branch::from_ints(&[(1, 1)], &[(2, -1)], 6).unwrap()]),
            germ(vec![Branch::from_ints(&[(1, 1)], &[], 8).unwrap(), Branch::from_ints(&[(3, 1)], &[(2, 1)], 8).unwrap()]),
        ];
        let expected = [vec![4], vec![2], vec![2, 2], vec![2, 2, 2], vec![3, 3], vec![2, 4]];
        for (phi, e) in curves.iter().zip(expected) {
            assert_eq!(determinacy_bounds(phi).unwrap(), e);
            assert_eq!(determinacy_definitional(phi).unwrap(), e);
        }
    }
}
