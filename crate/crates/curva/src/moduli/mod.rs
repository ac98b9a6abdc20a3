//! Generic members of a topological class, their e-profiles and the
//! dimension of the generic component of the moduli space.
//!
//! e(k) is read as dim U_k on a seeded random member of the class. The
//! closed forms in [`closed`] are evaluated independently and compared.

pub mod closed;

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::curve::{to_block_form, Branch, Multigerm};
use crate::error::{CurvaError, Result};
use crate::invariants::{branch_semigroup, determinacy_bounds, intersection_mult};
use crate::kernel::{Scalar, Series};
use crate::normalform::jet_dims;

pub use closed::{
    in_semigroup, nm23_dimension, nm23_e, nm_dimension_from_profile, nm_e_low, nm_fiber_rule, ordinary_dimension,
    ordinary_e, ordinary_fiber_rule, ordinary_support, pre_normal_support,
};

/// Numerators and denominators of generic coefficients lie in [−H, H].
pub const HEIGHT: i64 = 10_000;
/// Draws allowed before a sample that keeps falling outside the class or
/// the generic locus is reported as an error.
pub const MAX_RESAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// r smooth branches with pairwise distinct tangents.
    OrdinaryPoint { r: usize },
    /// r branches with semigroup ⟨n,m⟩, one common tangent and pairwise
    /// intersection multiplicity nm.
    NMClass { n: u64, m: u64, r: usize },
    /// One branch with the given minimal semigroup generators.
    Irreducible { generators: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSpec {
    pub kind: ClassKind,
    pub seed: u64,
}

impl ClassSpec {
    pub fn ordinary(r: usize, seed: u64) -> Self {
        ClassSpec { kind: ClassKind::OrdinaryPoint { r }, seed }
    }

    pub fn nm(n: u64, m: u64, r: usize, seed: u64) -> Self {
        ClassSpec { kind: ClassKind::NMClass { n, m, r }, seed }
    }

    pub fn irreducible(generators: Vec<u64>, seed: u64) -> Self {
        ClassSpec { kind: ClassKind::Irreducible { generators }, seed }
    }

    pub fn r(&self) -> usize {
        match &self.kind {
            ClassKind::OrdinaryPoint { r } | ClassKind::NMClass { r, .. } => *r,
            ClassKind::Irreducible { .. } => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ClassKind::OrdinaryPoint { r } if *r == 0 => Err(CurvaError::Validation("an ordinary point needs r ≥ 1".into())),
            ClassKind::NMClass { n, m, r } => {
                if *r == 0 {
                    return Err(CurvaError::Validation("the class needs r ≥ 1".into()));
                }
                if !(1 < *n && n < m) || n.gcd(m) != 1 {
                    return Err(CurvaError::Validation(format!("need gcd(n,m) = 1 and 1 < n < m, got ({n},{m})")));
                }
                Ok(())
            }
            ClassKind::Irreducible { generators } => characteristic_exponents(generators).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// The class as seen by the closed forms: an irreducible class with two
    /// generators is the ⟨n,m⟩ class with r = 1.
    fn as_nm(&self) -> Option<(u64, u64, usize)> {
        match &self.kind {
            ClassKind::NMClass { n, m, r } => Some((*n, *m, *r)),
            ClassKind::Irreducible { generators } if generators.len() == 2 => Some((generators[0], generators[1], 1)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match &self.kind {
            ClassKind::OrdinaryPoint { r } => json!({"class": "ordinary", "r": r}),
            ClassKind::NMClass { n, m, r } => json!({"class": "nm", "n": n, "m": m, "r": r}),
            ClassKind::Irreducible { generators } => json!({"class": "irreducible", "generators": generators}),
        };
        json!({"kind": kind, "seed": self.seed})
    }
}

/// Characteristic exponents β₀, β₁, … of a plane branch with the given
/// minimal semigroup generators.
pub fn characteristic_exponents(gens: &[u64]) -> Result<Vec<u64>> {
    let bad = |why: &str| Err(CurvaError::Validation(format!("{gens:?} is not a plane branch semigroup: {why}")));
    if gens.len() < 2 {
        return bad("need at least two generators");
    }
    let mut e = vec![gens[0]];
    for &v in &gens[1..] {
        let g = e.last().unwrap().gcd(&v);
        if g >= *e.last().unwrap() {
            return bad("gcds must strictly decrease");
        }
        e.push(g);
    }
    if *e.last().unwrap() != 1 {
        return bad("generators are not coprime");
    }
    let mut beta = vec![gens[0], gens[1]];
    for i in 1..gens.len() - 1 {
        let ni = e[i - 1] / e[i];
        if ni * gens[i] >= gens[i + 1] {
            return bad("n_i v_i < v_{i+1} fails");
        }
        beta.push(gens[i + 1] + beta[i] - ni * gens[i]);
    }
    Ok(beta)
}

fn draw(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let p = rng.gen_range(-HEIGHT..=HEIGHT);
        let q = rng.gen_range(-HEIGHT..=HEIGHT);
        if p != 0 && q != 0 {
            return Scalar::ratio(p, q);
        }
    }
}

/// A series with random coefficients at the given exponents.
fn random_series(rng: &mut ChaCha8Rng, exps: impl IntoIterator<Item = usize>, trunc: usize) -> Series {
    Series::new(exps.into_iter().map(|e| (e, draw(rng))), trunc)
}

/// Truncation that covers the determinacy bound of every member.
fn sample_trunc(spec: &ClassSpec) -> usize {
    match &spec.kind {
        ClassKind::OrdinaryPoint { r } => r + 2,
        ClassKind::NMClass { n, m, r } => (*r as u64 * n * m) as usize + 2,
        ClassKind::Irreducible { generators } => {
            // conductor of a plane branch semigroup: Σ (n_i − 1) v_i − v_0 + 1
            let mut e = generators[0];
            let mut c = 0i64;
            for &v in &generators[1..] {
                let g = e.gcd(&v);
                c += ((e / g) as i64 - 1) * v as i64;
                e = g;
            }
            (c - generators[0] as i64 + 1) as usize + 2 * generators[0] as usize + 2
        }
    }
}

fn candidate(spec: &ClassSpec, rng: &mut ChaCha8Rng) -> Result<Multigerm> {
    let t = sample_trunc(spec);
    let branches = match &spec.kind {
        ClassKind::OrdinaryPoint { r } => {
            let mut out = Vec::with_capacity(*r);
            let mut slopes: Vec<Scalar> = Vec::new();
            for i in 0..*r {
                let higher = random_series(rng, 2..t, t);
                let b = match i {
                    0 => Branch::new(Series::t().truncate(t), higher)?,
                    1 => Branch::new(higher, Series::t().truncate(t))?,
                    _ => {
                        let theta = if i == 2 { Scalar::int(1) } else { draw(rng) };
                        if slopes.contains(&theta) || theta.is_zero() {
                            return Err(CurvaError::Validation("repeated slope".into()));
                        }
                        slopes.push(theta.clone());
                        let y = higher.add(&Series::monomial(theta, 1));
                        Branch::new(Series::t().truncate(t), y)?
                    }
                };
                out.push(b);
            }
            out
        }
        ClassKind::NMClass { n, m, r } => {
            let (n, m) = (*n as usize, *m as usize);
            let mut out: Vec<Branch> = Vec::with_capacity(*r);
            for _ in 0..*r {
                let y = random_series(rng, m..t, t);
                out.push(Branch::new(Series::monomial(Scalar::int(1), n).truncate(t), y)?);
            }
            out
        }
        ClassKind::Irreducible { generators } => {
            let beta = characteristic_exponents(generators)?;
            let mut e = generators[0];
            let mut exps = Vec::new();
            for j in beta[1] as usize..t {
                let j64 = j as u64;
                if let Some(k) = beta[1..].iter().position(|&b| b == j64) {
                    e = e.gcd(&generators[k + 1]);
                    exps.push(j);
                } else if j64 % e == 0 {
                    exps.push(j);
                }
            }
            let x = Series::monomial(Scalar::int(1), generators[0] as usize).truncate(t);
            vec![Branch::new(x, random_series(rng, exps, t))?]
        }
    };
    Multigerm::new(branches)
}

/// Whether φ has the topology of the class, read off its invariants.
pub fn in_class(spec: &ClassSpec, phi: &Multigerm) -> Result<bool> {
    match &spec.kind {
        ClassKind::OrdinaryPoint { r } => {
            let slopes = phi.slopes();
            let distinct = (0..*r).all(|i| (0..i).all(|j| slopes[i] != slopes[j]));
            Ok(phi.r() == *r && phi.multiplicities().iter().all(|&n| n == 1) && distinct)
        }
        ClassKind::NMClass { n, m, r } => {
            if phi.r() != *r {
                return Ok(false);
            }
            for b in &phi.branches {
                if branch_semigroup(b)?.generators() != vec![*n, *m] {
                    return Ok(false);
                }
            }
            for i in 0..*r {
                for j in i + 1..*r {
                    if intersection_mult(phi, i, j)? != n * m {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        ClassKind::Irreducible { generators } => {
            Ok(phi.r() == 1 && &branch_semigroup(&phi.branches[0])?.generators() == generators)
        }
    }
}

/// Seeded random member of the class, truncated past its determinacy
/// bounds. Draws falling outside the class are redrawn from the same
/// stream.
pub fn sample_generic(spec: &ClassSpec) -> Result<Multigerm> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    sample_from(spec, &mut rng)
}

fn sample_from(spec: &ClassSpec, rng: &mut ChaCha8Rng) -> Result<Multigerm> {
    for _ in 0..MAX_RESAMPLES {
        let phi = match candidate(spec, rng) {
            Ok(p) => p,
            Err(CurvaError::Validation(_)) => continue,
            Err(e) => return Err(e),
        };
        if !in_class(spec, &phi)? {
            continue;
        }
        let d = determinacy_bounds(&phi)?;
        if phi.truncs().iter().zip(&d).any(|(t, d)| t < d) {
            return Err(CurvaError::Internal("sample truncated below its determinacy bound".into()));
        }
        return Ok(phi);
    }
    Err(CurvaError::Validation(format!("no member of the class found in {MAX_RESAMPLES} draws")))
}

/// First order at which e(k) is read: above the slopes for an ordinary
/// point, above the first characteristic term otherwise.
fn first_order(spec: &ClassSpec) -> usize {
    match &spec.kind {
        ClassKind::OrdinaryPoint { .. } => 2,
        ClassKind::NMClass { m, .. } => *m as usize + 1,
        ClassKind::Irreducible { generators } => generators[1] as usize + 1,
    }
}

/// Orders k ≥ first_order at which the class allows a coefficient.
fn order_allowed(spec: &ClassSpec, k: usize) -> bool {
    match &spec.kind {
        ClassKind::Irreducible { generators } if generators.len() > 2 => {
            let beta = characteristic_exponents(generators).unwrap();
            let k = k as u64;
            let mut e = generators[0];
            for (i, &b) in beta.iter().enumerate().skip(1) {
                if k < b {
                    break;
                }
                e = e.gcd(&generators[i]);
            }
            k % e == 0 || beta.contains(&k)
        }
        _ => true,
    }
}

/// The closed-form e(k) where one is known.
pub fn closed_e(spec: &ClassSpec, k: usize) -> Option<usize> {
    match &spec.kind {
        ClassKind::OrdinaryPoint { r } if *r >= 4 => Some(ordinary_e(*r, k)),
        _ => match spec.as_nm()? {
            (2, 3, r) if r >= 2 && k >= 4 => Some(nm23_e(r, k)),
            (n, m, r) => nm_e_low(n, m, r, k as u64),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EEntry {
    pub k: usize,
    pub computed: usize,
    pub closed: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct EProfile {
    pub spec: ClassSpec,
    /// The sample in block form.
    pub sample: Multigerm,
    pub d: Vec<usize>,
    pub entries: Vec<EEntry>,
    /// Number of draws rejected as non-generic before this one.
    pub resampled: usize,
}

impl EProfile {
    /// e(k) from the sample; orders at or past every determinacy bound are
    /// fully eliminable.
    pub fn e(&self, k: usize) -> usize {
        self.entries.iter().find(|e| e.k == k).map(|e| e.computed).unwrap_or(self.sample.r())
    }

    pub fn agrees(&self) -> bool {
        self.entries.iter().all(|e| e.closed.is_none_or(|c| c == e.computed))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.entries.iter().map(|e| json!({"k": e.k, "computed": e.computed, "closed_form": e.closed})).collect(),
        )
    }
}

fn profile_of(spec: &ClassSpec, phi: &Multigerm, k_max: usize) -> Result<(Multigerm, Vec<usize>, Vec<EEntry>)> {
    let (bf, _, _) = to_block_form(phi)?;
    let d = determinacy_bounds(&bf)?;
    let top = k_max.min(d.iter().copied().max().unwrap_or(0).saturating_sub(1));
    let dims = jet_dims(&bf, top)?;
    let mut entries = Vec::new();
    for k in first_order(spec)..=top {
        entries.push(EEntry { k, computed: dims[k], closed: closed_e(spec, k) });
    }
    for k in (top + 1).max(first_order(spec))..=k_max {
        entries.push(EEntry { k, computed: bf.r(), closed: closed_e(spec, k) });
    }
    Ok((bf, d, entries))
}

/// e(k) for first_order ≤ k ≤ k_max on a generic sample. A sample with some
/// e(k) below its closed form lies on the non-generic locus and is redrawn
/// with a warning.
pub fn e_profile(spec: &ClassSpec, k_max: usize) -> Result<EProfile> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for attempt in 0..MAX_RESAMPLES {
        let phi = sample_from(spec, &mut rng)?;
        let (sample, d, entries) = profile_of(spec, &phi, k_max)?;
        let degenerate = entries.iter().any(|e| e.closed.is_some_and(|c| e.computed < c));
        if degenerate {
            eprintln!("warning: seed {} draw {attempt} is not generic, resampling", spec.seed);
            continue;
        }
        return Ok(EProfile { spec: spec.clone(), sample, d, entries, resampled: attempt });
    }
    Err(CurvaError::Oracle(format!("e-profile stays below the closed form after {MAX_RESAMPLES} draws")))
}

#[derive(Clone, Debug)]
pub struct ModuliReport {
    /// Count of free parameters in the generic normal form.
    pub from_profile: usize,
    /// The closed form, if the class has one.
    pub formula_value: Option<usize>,
    pub profile: EProfile,
}

impl ModuliReport {
    pub fn agreement(&self) -> bool {
        self.formula_value.is_none_or(|f| f == self.from_profile) && self.profile.agrees()
    }

    pub fn dimension(&self) -> usize {
        self.formula_value.unwrap_or(self.from_profile)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.profile.spec.to_json(),
            "dimension": self.dimension(),
            "from_profile": self.from_profile,
            "formula_value": self.formula_value,
            "agreement": self.agreement(),
            "e_profile": self.profile.to_json(),
            "d": self.profile.d,
            "resampled": self.profile.resampled,
            "sample": self.profile.sample.to_json(),
        })
    }
}

/// Free parameters: the coefficients no L_k removes, plus slopes or leading
/// terms, less what the homotheties normalize.
fn count_parameters(spec: &ClassSpec, p: &EProfile) -> usize {
    let r = p.sample.r();
    let free: usize = p.entries.iter().filter(|e| order_allowed(spec, e.k)).map(|e| r - e.computed).sum();
    let normalize = usize::from(free > 0);
    match &spec.kind {
        // the first three slopes are fixed by GL₂; one homothety remains
        ClassKind::OrdinaryPoint { r } => r.saturating_sub(3) + free - normalize,
        // r leading coefficients, one absorbed by the two-dimensional torus
        ClassKind::NMClass { r, .. } => r - 1 + free - normalize,
        ClassKind::Irreducible { .. } => free - normalize,
    }
}

pub fn moduli_report(spec: &ClassSpec) -> Result<ModuliReport> {
    let k_max = {
        let phi = sample_generic(spec)?;
        let (bf, _, _) = to_block_form(&phi)?;
        determinacy_bounds(&bf)?.into_iter().max().unwrap_or(1)
    };
    let profile = e_profile(spec, k_max)?;
    let from_profile = count_parameters(spec, &profile);
    let formula_value = match &spec.kind {
        ClassKind::OrdinaryPoint { r } => Some(ordinary_dimension(*r)),
        _ => match spec.as_nm() {
            Some((2, 3, r)) => Some(nm23_dimension(r)),
            Some((n, m, r)) => {
                let e: Vec<usize> = profile.entries.iter().map(|e| e.computed).collect();
                Some(nm_dimension_from_profile(n, m, r, &e))
            }
            None => None,
        },
    };
    Ok(ModuliReport { from_profile, formula_value, profile })
}

/// The closed-form dimension, checked against the parameter count of the
/// e-profile.
pub fn moduli_dimension(spec: &ClassSpec) -> Result<usize> {
    let rep = moduli_report(spec)?;
    if !rep.agreement() {
        return Err(CurvaError::Oracle(format!(
            "dimension {} from the e-profile, closed form {:?}; profile {}",
            rep.from_profile,
            rep.formula_value,
            rep.profile.to_json()
        )));
    }
    Ok(rep.dimension())
}

/// The pre-normal form with the given coefficients, listed branch by branch
/// in the order of [`pre_normal_support`].
pub fn pre_normal_form(n: u64, m: u64, coefficients: &[Vec<Scalar>]) -> Result<Multigerm> {
    let r = coefficients.len();
    let support = pre_normal_support(n, m, r);
    let t = (r as u64 * n * m) as usize;
    let mut branches = Vec::with_capacity(r);
    for (i, (exps, cs)) in support.iter().zip(coefficients).enumerate() {
        if exps.len() != cs.len() {
            return Err(CurvaError::Validation(format!(
                "branch {} takes {} coefficients, got {}",
                i + 1,
                exps.len(),
                cs.len()
            )));
        }
        let y = Series::new(exps.iter().map(|&e| e as usize).zip(cs.iter().cloned()), t);
        branches.push(Branch::new(Series::monomial(Scalar::int(1), n as usize).truncate(t), y)?);
    }
    Multigerm::new(branches)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristic_exponents_of_known_semigroups() {
        assert_eq!(characteristic_exponents(&[4, 6, 13]).unwrap(), vec![4, 6, 7]);
        assert_eq!(characteristic_exponents(&[2, 3]).unwrap(), vec![2, 3]);
        assert!(characteristic_exponents(&[4, 6]).is_err());
        assert!(characteristic_exponents(&[4, 6, 11]).is_err());
    }

    #[test]
    fn samples_are_in_their_class() {
        for spec in [ClassSpec::ordinary(3, 1), ClassSpec::nm(2, 3, 2, 1), ClassSpec::irreducible(vec![4, 6, 13], 1)] {
            let phi = sample_generic(&spec).unwrap();
            assert!(in_class(&spec, &phi).unwrap(), "{spec:?}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_generic(&ClassSpec::nm(2, 3, 2, 7)).unwrap();
        let b = sample_generic(&ClassSpec::nm(2, 3, 2, 7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zariski_classes_are_points() {
        for gens in [vec![2, 5], vec![3, 4], vec![3, 5]] {
            assert_eq!(moduli_dimension(&ClassSpec::irreducible(gens, 3)).unwrap(), 0);
        }
    }
}
