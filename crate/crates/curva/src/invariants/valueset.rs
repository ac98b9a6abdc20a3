//! Value sets in a box, their conductors, fibers and maximal elements.
//!
//! Every set is read off a [`JetSpace`] whose jets reach one past the box.
//! Membership is clamped at an a priori conductor bound: once γ_i is at
//! least the conductor of a Γ-semimodule, raising γ_i never leaves the set,
//! so the box [0, bound] decides every finite vector.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::curve::Multigerm;
use crate::error::{CurvaError, Result};
use crate::kernel::{ExtNat, ValueVec};

use super::jets::{pullback_element, DegreeReport, Element, JetSpace, JetSpec, Kind};
use super::valuation::kappa;

#[derive(Clone, Debug)]
pub struct ValueSet {
    pub kind: Kind,
    pub r: usize,
    pub conductor: Vec<u64>,
    /// Inclusive upper corner of the box of finite coordinates.
    pub bound: Vec<u64>,
    /// Members of the box; ∞ coordinates appear for Gamma only.
    pub members: BTreeSet<ValueVec>,
    pub degree: Vec<DegreeReport>,
}

fn fin(v: &[u64]) -> ValueVec {
    v.iter().map(|&x| ExtNat::Fin(x)).collect()
}

impl ValueSet {
    /// Membership of an arbitrary vector, clamping finite coordinates into
    /// the box.
    pub fn contains(&self, gamma: &[ExtNat]) -> bool {
        let clamped: ValueVec = gamma
            .iter()
            .zip(&self.bound)
            .map(|(g, &b)| match g {
                ExtNat::Fin(x) => ExtNat::Fin((*x).min(b)),
                ExtNat::Inf => ExtNat::Inf,
            })
            .collect();
        self.members.contains(&clamped)
    }

    pub fn contains_fin(&self, gamma: &[u64]) -> bool {
        self.contains(&fin(gamma))
    }

    /// Members with every coordinate finite.
    pub fn finite_members(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        self.members.iter().filter_map(|v| v.iter().map(|x| x.finite()).collect::<Option<Vec<u64>>>())
    }

    pub fn to_json(&self) -> Value {
        let enc = |v: &ValueVec| -> Value {
            Value::Array(
                v.iter()
                    .map(|x| match x {
                        ExtNat::Fin(n) => json!(n),
                        ExtNat::Inf => json!("inf"),
                    })
                    .collect(),
            )
        };
        json!({
            "kind": self.kind,
            "r": self.r,
            "conductor": self.conductor,
            "bound": self.bound,
            "box": self.members.iter().map(enc).collect::<Vec<_>>(),
        })
    }

    /// The conductor laws: everything above the conductor is in, and
    /// conductor − e_i is not.
    pub fn check_conductor_laws(&self) -> Result<()> {
        let r = self.r;
        for_each_in_box(&self.conductor, &self.bound, |g| {
            if self.contains_fin(g) {
                Ok(())
            } else {
                Err(CurvaError::Oracle(format!("{g:?} lies above the conductor but is not a value")))
            }
        })?;
        for i in 0..r {
            if self.conductor[i] == 0 {
                continue;
            }
            let mut g = self.conductor.clone();
            g[i] -= 1;
            if self.contains_fin(&g) {
                return Err(CurvaError::Oracle(format!("conductor − e_{} = {g:?} is a value", i + 1)));
            }
        }
        Ok(())
    }
}

/// Calls `f` on every integer vector in [lo, hi].
fn for_each_in_box(lo: &[u64], hi: &[u64], mut f: impl FnMut(&[u64]) -> Result<()>) -> Result<()> {
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Ok(());
    }
    let mut g = lo.to_vec();
    loop {
        f(&g)?;
        let mut i = 0;
        loop {
            if i == g.len() {
                return Ok(());
            }
            if g[i] < hi[i] {
                g[i] += 1;
                break;
            }
            g[i] = lo[i];
            i += 1;
        }
    }
}

/// Smallest c with every box point ≥ c a member.
fn scan_conductor(members: &BTreeSet<Vec<u64>>, bound: &[u64]) -> Vec<u64> {
    let valid = |c: &[u64]| {
        let mut ok = true;
        let _ = for_each_in_box(c, bound, |g| {
            if !members.contains(g) {
                ok = false;
                return Err(CurvaError::Internal(String::new()));
            }
            Ok(())
        });
        ok
    };
    let mut c = bound.to_vec();
    loop {
        let mut moved = false;
        for i in 0..c.len() {
            while c[i] > 0 {
                c[i] -= 1;
                if valid(&c) {
                    moved = true;
                } else {
                    c[i] += 1;
                    break;
                }
            }
        }
        if !moved {
            return c;
        }
    }
}

/// A priori conductor bound for each kind.
fn conductor_bound(phi: &Multigerm, kind: Kind, k: &[u64]) -> Result<Vec<u64>> {
    let n = phi.multiplicities();
    Ok(match kind {
        Kind::Gamma | Kind::Lambda => k.to_vec(),
        Kind::LambdaG => k.iter().zip(&n).map(|(&k, &n)| k + 2 * n as u64).collect(),
        Kind::JacobianValues => k.iter().map(|&k| (2 * k).saturating_sub(1)).collect(),
        Kind::BranchSemigroup => {
            return Err(CurvaError::Validation("BranchSemigroup is a per-branch set; use branch_semigroup".into()))
        }
    })
}

/// Jet specification for a kind with jets below t^{prec_i}.
pub fn jet_spec(phi: &Multigerm, kind: Kind, prec: Vec<usize>) -> Result<JetSpec> {
    let mut spec = JetSpec::new(kind, prec);
    if kind == Kind::LambdaG {
        let bs = phi.block_structure().map_err(|e| {
            CurvaError::Validation(format!("Λ_G needs the multigerm in block form ({e})"))
        })?;
        spec.tilde = bs.s() == 1;
    }
    Ok(spec)
}

/// The value set of `kind` on the box [0, conductor bound + 1].
pub fn value_set(phi: &Multigerm, kind: Kind) -> Result<ValueSet> {
    let r = phi.r();
    let k = kappa(phi)?;
    let cb = conductor_bound(phi, kind, &k)?;
    let bound: Vec<u64> = cb.iter().map(|&c| c + 1).collect();
    let prec: Vec<usize> = bound.iter().map(|&b| b as usize + 1).collect();
    let mut members: BTreeSet<ValueVec> = BTreeSet::new();
    let mut finite: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut degree = Vec::new();

    let subsets: Vec<Vec<bool>> = if kind == Kind::Gamma {
        (0..1usize << r).map(|m| (0..r).map(|i| m >> i & 1 == 1).collect()).collect()
    } else {
        vec![vec![false; r]]
    };
    for inf in subsets {
        let mut spec = jet_spec(phi, kind, prec.clone())?;
        spec.infinite = inf.clone();
        let mut space = JetSpace::build(phi, spec)?;
        degree.push(space.degree.clone());
        let lo = vec![0u64; r];
        let hi: Vec<u64> = (0..r).map(|i| if inf[i] { 0 } else { bound[i] }).collect();
        for_each_in_box(&lo, &hi, |g| {
            if space.contains(g)? {
                let v: ValueVec =
                    (0..r).map(|i| if inf[i] { ExtNat::Inf } else { ExtNat::Fin(g[i]) }).collect();
                if inf.iter().all(|&b| !b) {
                    finite.insert(g.to_vec());
                }
                members.insert(v);
            }
            Ok(())
        })?;
    }
    let conductor = scan_conductor(&finite, &bound);
    if conductor.iter().zip(&cb).any(|(c, b)| c > b) {
        return Err(CurvaError::Oracle(format!("{kind:?} conductor {conductor:?} exceeds the bound {cb:?}")));
    }
    if kind == Kind::Gamma && conductor != k {
        return Err(CurvaError::Oracle(format!("Γ conductor {conductor:?} but κ = {k:?}")));
    }
    let set = ValueSet { kind, r, conductor, bound, members, degree };
    set.check_conductor_laws()?;
    Ok(set)
}

/// ν(⟨f, f_X, f_Y⟩) for the product f of the branch equations.
pub fn jacobian_value_set(phi: &Multigerm) -> Result<ValueSet> {
    value_set(phi, Kind::JacobianValues)
}

/// The answer to a membership or fiber query.
#[derive(Clone, Debug)]
pub struct FiberWitness {
    pub gamma: ValueVec,
    /// 0-based branch indices.
    pub j: Vec<usize>,
    pub witness: Option<Element>,
}

impl FiberWitness {
    pub fn to_json(&self) -> Value {
        json!({
            "gamma": self.gamma,
            "J": self.j.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "witness": self.witness.as_ref().map(|w| w.to_json()),
        })
    }
}

/// Jet space wide enough to test orders up to γ + 1 on every branch.
pub fn query_space(phi: &Multigerm, kind: Kind, gamma: &[ExtNat]) -> Result<JetSpace> {
    if gamma.len() != phi.r() {
        return Err(CurvaError::Validation(format!("value vector has {} entries for r = {}", gamma.len(), phi.r())));
    }
    let infinite: Vec<bool> = gamma.iter().map(|g| g.is_inf()).collect();
    if kind != Kind::Gamma && infinite.iter().any(|&b| b) {
        return Err(CurvaError::Validation("∞ coordinates are only supported for Gamma".into()));
    }
    let prec: Vec<usize> = gamma
        .iter()
        .zip(phi.multiplicities())
        .map(|(g, n)| match g {
            ExtNat::Fin(x) => (*x as usize + 2).max(n + 1),
            ExtNat::Inf => 0,
        })
        .collect();
    let mut spec = jet_spec(phi, kind, prec)?;
    spec.infinite = infinite;
    JetSpace::build(phi, spec)
}

/// Checks that the witness has the claimed orders, independently of the
/// rank computation.
fn verify_witness(phi: &Multigerm, w: &Element, lower: &[usize], exact: &[usize], kind: Kind) -> Result<()> {
    for (i, b) in phi.branches.iter().enumerate() {
        let cap = lower[i] + 1;
        let s = pullback_element(w, b, cap + if kind == Kind::LambdaG { b.n } else { 0 });
        let o = match kind {
            Kind::LambdaG => s.ord().map(|o| o.saturating_sub(b.n)),
            _ => s.ord(),
        };
        let ok = match o {
            Some(o) if exact.contains(&i) => o == lower[i],
            Some(o) => o >= lower[i],
            None => !exact.contains(&i),
        };
        if !ok {
            return Err(CurvaError::Oracle(format!(
                "witness has order {o:?} on branch {} but {} was required",
                i + 1,
                lower[i]
            )));
        }
    }
    Ok(())
}

/// Whether γ is a value of `kind`, with a witness when it is.
pub fn value_membership(phi: &Multigerm, kind: Kind, gamma: &[ExtNat]) -> Result<(bool, FiberWitness)> {
    let mut space = query_space(phi, kind, gamma)?;
    let lower: Vec<usize> = gamma.iter().map(|g| g.finite().unwrap_or(0) as usize).collect();
    let exact: Vec<usize> = (0..phi.r()).filter(|&i| !gamma[i].is_inf()).collect();
    let ok = space.attains(&lower, &exact)?;
    let witness = if ok { space.witness(&lower, &exact)? } else { None };
    if ok && witness.is_none() {
        return Err(CurvaError::Internal("member without a witness".into()));
    }
    if let Some(w) = &witness {
        if exact.len() == phi.r() {
            verify_witness(phi, w, &lower, &exact, kind)?;
        }
    }
    Ok((ok, FiberWitness { gamma: gamma.to_vec(), j: (0..phi.r()).collect(), witness }))
}

fn check_fiber_args(phi: &Multigerm, j_set: &[usize], gamma: &[u64]) -> Result<()> {
    if j_set.is_empty() || j_set.iter().any(|&j| j >= phi.r()) {
        return Err(CurvaError::Validation("J must be a nonempty subset of the branches".into()));
    }
    if gamma.len() != phi.r() {
        return Err(CurvaError::Validation(format!("value vector has {} entries for r = {}", gamma.len(), phi.r())));
    }
    Ok(())
}

/// F_J(γ) ≠ ∅: a value equal to γ on J and strictly above it elsewhere.
pub fn fiber_nonempty(phi: &Multigerm, kind: Kind, j_set: &[usize], gamma: &[u64]) -> Result<(bool, FiberWitness)> {
    check_fiber_args(phi, j_set, gamma)?;
    let mut space = query_space(phi, kind, &fin(gamma))?;
    fiber_in(phi, &mut space, j_set, gamma, true)
}

/// Fiber test on a prebuilt space (jets must reach γ + 2).
pub fn fiber_in(
    phi: &Multigerm,
    space: &mut JetSpace,
    j_set: &[usize],
    gamma: &[u64],
    with_witness: bool,
) -> Result<(bool, FiberWitness)> {
    let ok = space.fiber_nonempty(j_set, gamma)?;
    let mut witness = None;
    if ok && with_witness {
        let lower: Vec<usize> = gamma
            .iter()
            .enumerate()
            .map(|(i, &g)| if j_set.contains(&i) { g as usize } else { g as usize + 1 })
            .collect();
        let w = space
            .witness(&lower, j_set)?
            .ok_or_else(|| CurvaError::Internal("nonempty fiber without a witness".into()))?;
        verify_witness(phi, &w, &lower, j_set, space.spec.kind)?;
        witness = Some(w);
    }
    let mut j = j_set.to_vec();
    j.sort_unstable();
    Ok((ok, FiberWitness { gamma: fin(gamma), j, witness }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Maximality {
    NotMember,
    MemberNotMaximal,
    Maximal,
    RelativeMaximal,
    AbsoluteMaximal,
}

/// Classifies γ after Def. of maximal elements via fibers over all
/// nonempty J.
pub fn classify_maximal(phi: &Multigerm, kind: Kind, gamma: &[u64]) -> Result<Maximality> {
    let r = phi.r();
    let mut space = query_space(phi, kind, &fin(gamma))?;
    let all: Vec<usize> = (0..r).collect();
    if !space.fiber_nonempty(&all, gamma)? {
        return Ok(Maximality::NotMember);
    }
    let mut fibers = Vec::new();
    for m in 1..(1usize << r) - 1 {
        let j: Vec<usize> = (0..r).filter(|i| m >> i & 1 == 1).collect();
        fibers.push((j.len(), space.fiber_nonempty(&j, gamma)?));
    }
    if fibers.iter().any(|&(size, ne)| size == 1 && ne) || r == 1 {
        return Ok(Maximality::MemberNotMaximal);
    }
    if fibers.iter().all(|&(_, ne)| !ne) {
        return Ok(Maximality::AbsoluteMaximal);
    }
    if fibers.iter().all(|&(size, ne)| size < 2 || ne) {
        return Ok(Maximality::RelativeMaximal);
    }
    Ok(Maximality::Maximal)
}

/// Closure of the finite part of a Γ box under + and componentwise min.
pub fn check_semiring_laws(set: &ValueSet) -> Result<()> {
    let elems: Vec<&ValueVec> = set.members.iter().collect();
    for a in &elems {
        for b in &elems {
            let inf: ValueVec = a.iter().zip(b.iter()).map(|(x, y)| *x.min(y)).collect();
            if !set.contains(&inf) {
                return Err(CurvaError::Oracle(format!("inf of {a:?} and {b:?} is not a value")));
            }
            let sum: ValueVec = a.iter().zip(b.iter()).map(|(x, y)| *x + *y).collect();
            if !set.contains(&sum) {
                return Err(CurvaError::Oracle(format!("{a:?} + {b:?} is not a value")));
            }
        }
    }
    Ok(())
}

/// Γ + M ⊆ M for a value set M of a Γ-module.
pub fn check_module_law(gamma: &ValueSet, m: &ValueSet) -> Result<()> {
    for a in gamma.members.iter() {
        for b in m.finite_members() {
            let sum: ValueVec = a.iter().zip(&b).map(|(x, &y)| *x + ExtNat::Fin(y)).collect();
            if sum.iter().any(|x| x.is_inf()) {
                continue;
            }
            if !m.contains(&sum) {
                return Err(CurvaError::Oracle(format!("{a:?} + {b:?} is not in {:?}", m.kind)));
            }
        }
    }
    Ok(())
}
