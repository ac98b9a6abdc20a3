//! Solvability over ℂ* of monomial systems ∏_j z_j^{E_ij} = q_i with q_i in ℚ(i)*.
//!
//! Row-reduce E over ℤ while tracking a unimodular U with U·E = H in echelon
//! form. The system is equivalent to ∏ z^{H_i} = ∏ q^{U_i}. Rows of H with a
//! pivot can always be satisfied over the algebraically closed field, working
//! upwards from the last pivot, so solvability reduces to ∏ q^{U_i} = 1 on
//! the zero rows of H. Everything stays exact.

use num_traits::One;
use serde::Serialize;

use super::scalar::Scalar;
use crate::error::{CurvaError, Result};

/// One derived equation ∏ z^{lhs} = rhs of the triangularized system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedRelation {
    pub lhs: Vec<i64>,
    pub combination: Vec<i64>,
    pub rhs: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusVerdict {
    pub solvable: bool,
    /// Pivot rows: ∏ z^{lhs} = rhs, solvable by root extraction over ℂ.
    pub triangular: Vec<DerivedRelation>,
    /// Consistency conditions (lhs = 0) with their evaluated right-hand sides.
    pub conditions: Vec<DerivedRelation>,
}

fn checked(v: i128) -> Result<i128> {
    if v.unsigned_abs() > (1u128 << 40) {
        return Err(CurvaError::Internal("exponent growth in monomial system".into()));
    }
    Ok(v)
}

/// Decides whether the monomial system has a solution in (ℂ*)^n.
pub fn solve_monomial_system(exponents: &[Vec<i64>], rhs: &[Scalar]) -> Result<TorusVerdict> {
    let m = exponents.len();
    assert_eq!(m, rhs.len());
    let n = exponents.first().map(|r| r.len()).unwrap_or(0);
    let mut h: Vec<Vec<i128>> = exponents.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
    let mut pr = 0;
    for c in 0..n {
        if pr == m {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c among rows ≥ pr
            let best = (pr..m).filter(|&i| h[i][c] != 0).min_by_key(|&i| h[i][c].unsigned_abs());
            let Some(b) = best else { break };
            h.swap(pr, b);
            u.swap(pr, b);
            let mut done = true;
            for i in pr + 1..m {
                if h[i][c] == 0 {
                    continue;
                }
                let q = h[i][c].div_euclid(h[pr][c]);
                for j in 0..n {
                    h[i][j] = checked(h[i][j] - q * h[pr][j])?;
                }
                for j in 0..m {
                    u[i][j] = checked(u[i][j] - q * u[pr][j])?;
                }
                if h[i][c] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pr][c] != 0 {
            pr += 1;
        }
    }
    let eval = |comb: &[i128]| -> Scalar {
        let mut acc = Scalar::one();
        for (q, &e) in rhs.iter().zip(comb) {
            if e != 0 {
                acc = &acc * &q.pow(e as i64);
            }
        }
        acc
    };
    let mut triangular = Vec::new();
    let mut conditions = Vec::new();
    let mut solvable = true;
    for i in 0..m {
        let rel = DerivedRelation {
            lhs: h[i].iter().map(|&x| x as i64).collect(),
            combination: u[i].iter().map(|&x| x as i64).collect(),
            rhs: eval(&u[i]),
        };
        if i < pr {
            triangular.push(rel);
        } else {
            if !rel.rhs.is_one() {
                solvable = false;
            }
            conditions.push(rel);
        }
    }
    Ok(TorusVerdict { solvable, triangular, conditions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_always_exists_over_c() {
        let v = solve_monomial_system(&[vec![2]], &[Scalar::int(2)]).unwrap();
        assert!(v.solvable);
    }

    #[test]
    fn incompatible_powers() {
        // z^2 = 4 and z^3 = 8 force z = 2 (solvable); z^2 = 4, z^3 = -8 forces z = -2.
        assert!(solve_monomial_system(&[vec![2], vec![3]], &[Scalar::int(4), Scalar::int(8)]).unwrap().solvable);
        assert!(solve_monomial_system(&[vec![2], vec![3]], &[Scalar::int(4), Scalar::int(-8)]).unwrap().solvable);
        // z^2 = 4 and z^4 = 15 is impossible.
        assert!(!solve_monomial_system(&[vec![2], vec![4]], &[Scalar::int(4), Scalar::int(15)]).unwrap().solvable);
        // z^0 = 3 is impossible.
        assert!(!solve_monomial_system(&[vec![0]], &[Scalar::int(3)]).unwrap().solvable);
    }

    #[test]
    fn two_unknowns() {
        // a b = 6, a = 2, b = 3 consistent; b = 4 not.
        let e = vec![vec![1, 1], vec![1, 0], vec![0, 1]];
        assert!(solve_monomial_system(&e, &[Scalar::int(6), Scalar::int(2), Scalar::int(3)]).unwrap().solvable);
        assert!(!solve_monomial_system(&e, &[Scalar::int(6), Scalar::int(2), Scalar::int(4)]).unwrap().solvable);
    }
}
