//! Dense exact linear algebra over ℚ(i). Pivoting is deterministic: the pivot
//! of a column is the first row (in current order) with a nonzero entry.

use num_traits::{One, Zero};

use super::scalar::Scalar;

pub type Matrix = Vec<Vec<Scalar>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        if !inv.is_one() {
            for x in m[r][c..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(pivot_row[c..].iter()) {
                if !p.is_zero() {
                    *x -= &(&f * p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(rows);
    pivots
}

/// Forward elimination only (row echelon, not reduced); cheaper when only the
/// rank or pivot set is needed.
pub fn echelon_pivots(mut m: Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().unwrap();
        let (head, tail) = m.split_at_mut(r + 1);
        let prow = &head[r];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] * &inv;
            for (x, pv) in row[c..].iter_mut().zip(prow[c..].iter()) {
                if !pv.is_zero() {
                    *x -= &(&f * pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    echelon_pivots(m.clone()).len()
}

/// Rank of the submatrix formed by the given columns.
pub fn rank_of_columns(m: &Matrix, cols: &[usize]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let sub: Matrix = m
        .iter()
        .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
        .filter(|row: &Vec<Scalar>| row.iter().any(|x| !x.is_zero()))
        .collect();
    echelon_pivots(sub).len()
}

/// A subspace of K^n stored by a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub basis: Matrix,
    pub pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient_dim: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn span(n: usize, vectors: Matrix) -> Self {
        let mut m: Matrix = vectors.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        for v in &m {
            assert_eq!(v.len(), n, "vector length mismatch");
        }
        let pivots = rref(&mut m);
        m.truncate(pivots.len());
        Subspace { ambient_dim: n, basis: m, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Reduces v against the basis; zero result means membership.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, b) in w.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= &(&f * b);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds a vector, keeping the basis reduced. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().unwrap();
        let w: Vec<Scalar> = w.iter().map(|x| x * &inv).collect();
        for row in self.basis.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, b) in row.iter_mut().zip(&w) {
                if !b.is_zero() {
                    *x -= &(&f * b);
                }
            }
        }
        let pos = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.pivots.insert(pos, p);
        self.basis.insert(pos, w);
        true
    }

    /// Rank of the basis restricted to a set of coordinates.
    pub fn rank_on(&self, cols: &[usize]) -> usize {
        rank_of_columns(&self.basis, cols)
    }
}

/// Null space {x : M x = 0} with `ncols` unknowns.
pub fn kernel(m: &Matrix, ncols: usize) -> Subspace {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Scalar::zero(); ncols];
        v[f] = Scalar::one();
        for (row, &p) in a.iter().zip(&pivots) {
            if !row[f].is_zero() {
                v[p] = -&row[f];
            }
        }
        basis.push(v);
    }
    Subspace::span(ncols, basis)
}

/// Outcome of solving M x = b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Unique(Vec<Scalar>),
    /// A particular solution; the system is underdetermined.
    Particular(Vec<Scalar>),
    NoSolution,
}

impl Solution {
    pub fn vector(&self) -> Option<&Vec<Scalar>> {
        match self {
            Solution::Unique(v) | Solution::Particular(v) => Some(v),
            Solution::NoSolution => None,
        }
    }
}

/// Solves M x = b, setting free variables to zero.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Solution {
    let rows = m.len();
    let ncols = if rows == 0 { 0 } else { m[0].len() };
    assert_eq!(b.len(), rows);
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return Solution::NoSolution;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (row, &p) in aug.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    if pivots.len() == ncols {
        Solution::Unique(x)
    } else {
        Solution::Particular(x)
    }
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

pub fn mat_from_ints(rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(rank(&identity(3)), 3);
        let k = kernel(&mat_from_ints(&[&[1, 1]]), 2);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[Scalar::int(1), Scalar::int(-1)]));
        let s = solve(&identity(2), &[Scalar::int(2), Scalar::int(3)]);
        assert_eq!(s, Solution::Unique(vec![Scalar::int(2), Scalar::int(3)]));
    }

    #[test]
    fn inconsistent_system_reports_no_solution() {
        let m = mat_from_ints(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&m, &[Scalar::int(1), Scalar::int(3)]), Solution::NoSolution);
    }

    #[test]
    fn subspace_insert_matches_span() {
        let vs = mat_from_ints(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let s = Subspace::span(3, vs.clone());
        let mut t = Subspace::zero(3);
        for v in &vs {
            t.insert(v);
        }
        assert_eq!(s, t);
        assert_eq!(s.rank_on(&[0]), 1);
        assert_eq!(s.rank_on(&[1, 2]), 2);
    }
}
