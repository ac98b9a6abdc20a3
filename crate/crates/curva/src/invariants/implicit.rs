//! Local implicit equations of branches as Weierstrass polynomials.
//!
//! For a branch with u = aτⁿ (u the coordinate of smaller order) the other
//! coordinate becomes a series v(τ), and the equation is ∏_ζ (V − v(ζτ)) over
//! the n-th roots of unity. Its coefficients come from the power sums
//! p_m = n·Σ_j [τ^{nj}] v^m · (U/a)^j via Newton's identities, so nothing
//! outside ℚ(i) is needed. Coefficients in U are kept below U^N.

use num_traits::{One, Zero};

use crate::curve::Branch;
use crate::error::{CurvaError, Result};
use crate::kernel::{BiPoly, Scalar, Series, EXACT};

/// f ∈ ℚ(i)[[U]][V] modulo U^N, monic of degree n in V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implicit {
    pub poly: BiPoly,
    /// true when V = X (the branch has ord x > ord y).
    pub swapped: bool,
    /// Coefficients are exact below U^{coeff_trunc}.
    pub coeff_trunc: usize,
}

impl Implicit {
    /// Pullback exponents below this are exact along `b`.
    pub fn exact_below_on(&self, b: &Branch) -> usize {
        let u = if self.swapped { &b.y } else { &b.x };
        match u.ord() {
            None => EXACT,
            Some(o) => self.coeff_trunc.saturating_mul(o),
        }
    }

    /// Number of U-coefficients needed so the pullback along `b` is exact
    /// below t^prec.
    pub fn terms_needed(swapped: bool, b: &Branch, prec: usize) -> usize {
        let u = if swapped { &b.y } else { &b.x };
        match u.ord() {
            None => 1,
            Some(o) => prec.div_ceil(o.max(1)) + 1,
        }
    }
}

/// Whether the Weierstrass variable is X.
pub fn weierstrass_swapped(b: &Branch) -> bool {
    match (b.x.ord(), b.y.ord()) {
        (Some(ox), Some(oy)) => ox > oy,
        (None, _) => true,
        _ => false,
    }
}

/// Weierstrass equation of the (exact) branch with coefficients known
/// below U^n_terms.
pub fn weierstrass(b: &Branch, n_terms: usize) -> Result<Implicit> {
    let b = b.exact();
    let swapped = weierstrass_swapped(&b);
    let (u, v) = if swapped { (&b.y, &b.x) } else { (&b.x, &b.y) };
    let n = b.n;
    let a = u.coeff(n);
    let ainv = a.inv().ok_or_else(|| CurvaError::Internal("vanishing leading coefficient".into()))?;
    let prec = (n * n_terms).max(2);
    // u = a t^n w(t), τ = t w^{1/n}
    let w = u.shift_down(n)?.scale(&ainv);
    let tau = w.unit_root(n, prec)?.shift_up(1).truncate(prec);
    let t_of_tau = tau.reversion(prec)?;
    let v_tau = v.compose_to(&t_of_tau, prec)?;

    // power sums as series in U
    let ainv_pows: Vec<Scalar> = {
        let mut out = vec![Scalar::one()];
        for _ in 1..n_terms {
            let last = out.last().unwrap().clone();
            out.push(&last * &ainv);
        }
        out
    };
    let nn = Scalar::int(n as i64);
    let mut power = Series::one().truncate(prec);
    let mut p: Vec<Series> = vec![Series::zero(n_terms)];
    for _ in 1..=n {
        power = power.mul_to(&v_tau, prec);
        let terms = (0..n_terms).filter_map(|j| {
            let c = power.coeff(n * j);
            if c.is_zero() {
                None
            } else {
                Some((j, &(&c * &nn) * &ainv_pows[j]))
            }
        });
        p.push(Series::new(terms, n_terms));
    }
    // Newton identities: k e_k = Σ_{i=1}^{k} (−1)^{i−1} e_{k−i} p_i
    let mut e: Vec<Series> = vec![Series::one().truncate(n_terms)];
    for k in 1..=n {
        let mut acc = Series::zero(n_terms);
        for i in 1..=k {
            let term = e[k - i].mul_to(&p[i], n_terms);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        e.push(acc.scale(&Scalar::ratio(1, k as i64)));
    }
    let mut poly = BiPoly::zero();
    for (k, ek) in e.iter().enumerate() {
        let sign = if k % 2 == 0 { Scalar::one() } else { Scalar::int(-1) };
        for (j, c) in ek.terms() {
            let c = &sign * c;
            let (ex, ey) = if swapped { (n - k, j) } else { (j, n - k) };
            poly = poly.add(&BiPoly::new([((ex, ey), c)]));
        }
    }
    Ok(Implicit { poly, swapped, coeff_trunc: n_terms })
}

/// Equation whose pullback along every listed branch is exact below the
/// corresponding precision.
pub fn weierstrass_for(b: &Branch, targets: &[(&Branch, usize)]) -> Result<Implicit> {
    let swapped = weierstrass_swapped(b);
    let n_terms = targets
        .iter()
        .map(|(c, prec)| Implicit::terms_needed(swapped, c, *prec))
        .max()
        .unwrap_or(1)
        .max(2);
    weierstrass(b, n_terms)
}

/// Local equation of a branch. The result vanishes along the branch to at
/// least the branch trunc (or to a default order for exact branches).
pub fn implicitize(b: &Branch) -> Result<BiPoly> {
    let prec = if b.trunc() == EXACT {
        let d = b.x.degree().unwrap_or(0).max(b.y.degree().unwrap_or(0));
        (d + 1) * (b.n + 1)
    } else {
        b.trunc()
    };
    Ok(weierstrass_for(b, &[(b, prec)])?.poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::implicit_resultant;

    #[test]
    fn cusp() {
        let b = Branch::exact_from_ints(&[(2, 1)], &[(3, 1)]).unwrap();
        let f = weierstrass(&b, 6).unwrap().poly;
        assert_eq!(f, BiPoly::from_ints(&[(0, 2, 1), (3, 0, -1)]));
        let r = implicit_resultant(&b.x, &b.y).unwrap().make_monic();
        assert_eq!(r.make_monic(), f.make_monic());
    }

    #[test]
    fn smooth_and_graph() {
        let b = Branch::exact_from_ints(&[(1, 1)], &[]).unwrap();
        assert_eq!(implicitize(&b).unwrap(), BiPoly::y());
        let b = Branch::exact_from_ints(&[(1, 1)], &[(2, 1)]).unwrap();
        assert_eq!(implicitize(&b).unwrap(), BiPoly::from_ints(&[(0, 1, 1), (2, 0, -1)]));
        let b = Branch::exact_from_ints(&[(3, 1)], &[(2, 1)]).unwrap();
        assert_eq!(implicitize(&b).unwrap(), BiPoly::from_ints(&[(2, 0, 1), (0, 3, -1)]));
    }

    #[test]
    fn vanishes_along_a_non_monomial_branch() {
        let b = Branch::exact_from_ints(&[(2, 3), (3, 1)], &[(3, 2), (4, -1), (5, 1)]).unwrap();
        let imp = weierstrass(&b, 12).unwrap();
        let lim = imp.exact_below_on(&b);
        let pb = imp.poly.pullback(&b.x, &b.y, lim);
        assert!(pb.is_zero(), "{pb:?}");
    }
}
