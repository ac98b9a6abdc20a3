use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::{Branch, Multigerm};
use crate::error::{CurvaError, Result};
use crate::kernel::{BiPoly, Scalar, Series, EXACT};

/// Which subgroup of 𝒜 (or 𝒮×𝒜) an element is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    #[serde(rename = "A")]
    A,
    #[serde(rename = "H")]
    H,
    #[serde(rename = "H'")]
    HPrime,
    #[serde(rename = "A1")]
    A1,
    #[serde(rename = "A1~")]
    A1Tilde,
}

/// Source reparametrizations ρ_i and a polynomial target map σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub reparams: Vec<Series>,
    pub target: [BiPoly; 2],
    pub flavor: Flavor,
}

/// 2×2 matrix [[α, β], [γ, δ]] acting as (X, Y) ↦ (αX + βY, γX + δY).
pub type Linear = [[Scalar; 2]; 2];

pub fn linear_map(m: &Linear) -> [BiPoly; 2] {
    let row = |r: &[Scalar; 2]| BiPoly::new([((1, 0), r[0].clone()), ((0, 1), r[1].clone())]);
    [row(&m[0]), row(&m[1])]
}

impl GroupElement {
    pub fn identity(r: usize) -> Self {
        GroupElement { reparams: vec![Series::t(); r], target: [BiPoly::x(), BiPoly::y()], flavor: Flavor::A1 }
    }

    pub fn linear(r: usize, m: &Linear, flavor: Flavor) -> Self {
        GroupElement { reparams: vec![Series::t(); r], target: linear_map(m), flavor }
    }

    /// Linear part of σ as a matrix.
    pub fn jacobian_at_origin(&self) -> Linear {
        let [s1, s2] = &self.target;
        [[s1.coeff(1, 0), s1.coeff(0, 1)], [s2.coeff(1, 0), s2.coeff(0, 1)]]
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.target {
            if !s.coeff(0, 0).is_zero() {
                return Err(CurvaError::Validation("target map must fix the origin".into()));
            }
        }
        let j = self.jacobian_at_origin();
        let det = &(&j[0][0] * &j[1][1]) - &(&j[0][1] * &j[1][0]);
        if det.is_zero() {
            return Err(CurvaError::Validation("target map has singular linear part".into()));
        }
        for rho in &self.reparams {
            if !rho.coeff(0).is_zero() || rho.coeff(1).is_zero() {
                return Err(CurvaError::Validation("reparametrization must have order exactly 1".into()));
            }
        }
        Ok(())
    }

    /// Whether the element satisfies the defining constraints of its flavor.
    pub fn check_flavor(&self) -> bool {
        if self.validate().is_err() {
            return false;
        }
        let j = self.jacobian_at_origin();
        let one = Scalar::one();
        let unipotent_source = self.reparams.iter().all(|r| r.coeff(1).is_one());
        let linear_only = |s: &BiPoly| s.terms().all(|((a, b), _)| a + b == 1);
        let monomial_source = self.reparams.iter().all(|r| r.terms().all(|(e, _)| e == 1));
        match self.flavor {
            Flavor::A => true,
            Flavor::A1 => unipotent_source && j[0][0] == one && j[0][1].is_zero() && j[1][0].is_zero() && j[1][1] == one,
            Flavor::A1Tilde => unipotent_source && j[0][0] == one && j[1][0].is_zero() && j[1][1] == one,
            Flavor::H | Flavor::HPrime => {
                let diag = j[0][1].is_zero() && j[1][0].is_zero();
                let ok = monomial_source && diag && self.target.iter().all(linear_only);
                ok && (self.flavor == Flavor::H || j[0][0] == j[1][1])
            }
        }
    }

    /// self ∘ h: acting by h first, then self (branch indices unpermuted).
    /// Reparametrizations compose as ρ_self ∘ ρ_h; σ as σ_self ∘ σ_h,
    /// truncated below total degree `cap`.
    pub fn after(&self, h: &GroupElement, cap: usize) -> Result<GroupElement> {
        if self.reparams.len() != h.reparams.len() {
            return Err(CurvaError::Validation("group elements act on different numbers of branches".into()));
        }
        let reparams = self
            .reparams
            .iter()
            .zip(&h.reparams)
            .map(|(a, b)| a.compose_to(b, cap))
            .collect::<Result<Vec<_>>>()?;
        let [f1, f2] = &self.target;
        let [g1, g2] = &h.target;
        let target = [f1.substitute(g1, g2, cap), f2.substitute(g1, g2, cap)];
        let flavor = if self.flavor == h.flavor { self.flavor } else { Flavor::A };
        Ok(GroupElement { reparams, target, flavor })
    }

    pub fn to_json(&self) -> Value {
        let reparams: Vec<Value> = self
            .reparams
            .iter()
            .map(|r| {
                let trunc = if r.is_exact() { Value::Null } else { json!(r.trunc()) };
                json!({"terms": r.to_json(), "trunc": trunc})
            })
            .collect();
        json!({
            "flavor": serde_json::to_value(self.flavor).unwrap(),
            "reparams": reparams,
            "sigma": [self.target[0].to_json(), self.target[1].to_json()],
        })
    }
}

/// Checks that `pi` is a permutation of 0..r.
pub fn check_permutation(pi: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    if pi.len() != r {
        return Err(CurvaError::Validation("permutation has the wrong length".into()));
    }
    for &p in pi {
        if p >= r || seen[p] {
            return Err(CurvaError::Validation("not a permutation".into()));
        }
        seen[p] = true;
    }
    Ok(())
}

fn act_on_branch(b: &Branch, rho: &Series, sigma: &[BiPoly; 2]) -> Result<Branch> {
    let (x, y) = if rho.degree() == Some(1) && rho.coeff(1).is_one() {
        (b.x.clone(), b.y.clone())
    } else {
        let rinv = rho.reversion(b.trunc()).map_err(|e| match e {
            CurvaError::Internal(m) => CurvaError::Precision(m),
            other => other,
        })?;
        (b.x.compose_to(&rinv, EXACT)?, b.y.compose_to(&rinv, EXACT)?)
    };
    let is_id = sigma[0] == BiPoly::x() && sigma[1] == BiPoly::y();
    if is_id {
        return Branch::new(x, y);
    }
    Branch::new(sigma[0].pullback(&x, &y, EXACT), sigma[1].pullback(&x, &y, EXACT))
}

/// Branch i of the result is σ∘φ_{π(i)}∘ρ_{π(i)}^{-1}.
pub fn apply_group(phi: &Multigerm, g: &GroupElement, pi: &[usize]) -> Result<Multigerm> {
    let r = phi.r();
    if g.reparams.len() != r {
        return Err(CurvaError::Validation(format!(
            "group element has {} reparametrizations for {} branches",
            g.reparams.len(),
            r
        )));
    }
    check_permutation(pi, r)?;
    g.validate()?;
    let mut out = Vec::with_capacity(r);
    for &src in pi {
        out.push(act_on_branch(&phi.branches[src], &g.reparams[src], &g.target)?);
    }
    Multigerm::new(out)
}

pub fn identity_permutation(r: usize) -> Vec<usize> {
    (0..r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cusp() -> Multigerm {
        Multigerm::new(vec![Branch::from_ints(&[(2, 1)], &[(3, 1)], 10).unwrap()]).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let phi = cusp();
        let psi = apply_group(&phi, &GroupElement::identity(1), &[0]).unwrap();
        assert_eq!(psi, phi);
    }

    #[test]
    fn target_substitution() {
        let mut g = GroupElement::identity(1);
        g.target[1] = BiPoly::from_ints(&[(0, 1, 1), (2, 0, 1)]);
        let psi = apply_group(&cusp(), &g, &[0]).unwrap();
        assert_eq!(psi.branches[0].y, Series::from_ints(&[(3, 1), (4, 1)]).truncate(10));
    }

    #[test]
    fn linear_reparametrization() {
        let mut g = GroupElement::identity(1);
        g.reparams[0] = Series::from_ints(&[(1, 2)]);
        let psi = apply_group(&cusp(), &g, &[0]).unwrap();
        let b = &psi.branches[0];
        assert_eq!(b.x.coeff(2), Scalar::ratio(1, 4));
        assert_eq!(b.y.coeff(3), Scalar::ratio(1, 8));
        assert_eq!(b.x.num_terms() + b.y.num_terms(), 2);
    }

    #[test]
    fn flavors() {
        let g = GroupElement::identity(2);
        assert!(g.check_flavor());
        let m: Linear = [[Scalar::one(), Scalar::int(3)], [Scalar::zero(), Scalar::one()]];
        let mut h = GroupElement::linear(2, &m, Flavor::A1Tilde);
        assert!(h.check_flavor());
        h.flavor = Flavor::A1;
        assert!(!h.check_flavor());
        let d: Linear = [[Scalar::int(2), Scalar::zero()], [Scalar::zero(), Scalar::int(2)]];
        let mut k = GroupElement::linear(2, &d, Flavor::HPrime);
        k.reparams[1] = Series::from_ints(&[(1, 5)]);
        assert!(k.check_flavor());
    }
}
