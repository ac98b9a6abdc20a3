//! Jet images of generating spaces and the rank tests built on them.
//!
//! A generating space V (functions or 1-forms) is pulled back along every
//! branch and truncated at t^{T_i}. Its image U is kept in reduced echelon
//! form together with, for each basis row, the combination of generators
//! producing it. With C(ℓ) = {(i, e) : e < ℓ_i}, the elements of V whose
//! orders are ≥ ℓ form a space of dimension dim U − rank(U on C(ℓ)), which
//! reduces every membership and fiber question to column ranks.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::curve::{Branch, Multigerm};
use crate::error::{CurvaError, Result};
use crate::kernel::{linalg, BiPoly, Scalar, Series};

use super::implicit::weierstrass_for;

/// Which value set a generating space realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    Gamma,
    Lambda,
    LambdaG,
    JacobianValues,
    BranchSemigroup,
}

impl Kind {
    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "Gamma" | "gamma" => Some(Kind::Gamma),
            "Lambda" | "lambda" => Some(Kind::Lambda),
            "LambdaG" | "lambda_g" => Some(Kind::LambdaG),
            "JacobianValues" | "jacobian" => Some(Kind::JacobianValues),
            "BranchSemigroup" => Some(Kind::BranchSemigroup),
            _ => None,
        }
    }
}

/// A generator: a monomial X^aY^b times a fixed factor, or a monomial
/// 1-form X^aY^b dX / X^aY^b dY.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Function { a: usize, b: usize, factor: usize },
    Form { a: usize, b: usize, dx: bool },
}

/// A polynomial function or 1-form a dX + b dY.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Function(BiPoly),
    Form { a: BiPoly, b: BiPoly },
}

impl Element {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Element::Function(h) => serde_json::json!({"function": h.to_json()}),
            Element::Form { a, b } => serde_json::json!({"dX": a.to_json(), "dY": b.to_json()}),
        }
    }
}

/// Evidence for the generating-space degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    /// Degree beyond which every generator has order ≥ T_i on each branch.
    pub d_star: usize,
    pub d_used: usize,
    /// (degree, dim U) after adding all generators up to that degree.
    pub dims: Vec<(usize, usize)>,
    pub certified: bool,
}

#[derive(Clone, Debug)]
pub struct JetSpec {
    pub kind: Kind,
    /// Columns per branch: jets are taken below t^{prec_i}.
    pub prec: Vec<usize>,
    /// Branches on which elements are required to vanish identically
    /// (Gamma only: generators are multiplied by their equations).
    pub infinite: Vec<bool>,
    /// Ω for the unipotent subgroup with a single block: η₁ ∈ ⟨X², Y⟩.
    pub tilde: bool,
    /// Drop function generators of smaller degree (2 gives 𝓜²).
    pub min_degree: usize,
}

impl JetSpec {
    pub fn new(kind: Kind, prec: Vec<usize>) -> Self {
        let r = prec.len();
        JetSpec { kind, prec, infinite: vec![false; r], tilde: false, min_degree: 0 }
    }
}

#[derive(Clone, Debug)]
struct Row {
    jet: Vec<Scalar>,
    combo: BTreeMap<usize, Scalar>,
}

pub struct JetSpace {
    pub spec: JetSpec,
    pub offsets: Vec<usize>,
    pub ncols: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
    pub generators: Vec<Generator>,
    /// Polynomial factors used by Function generators.
    factors: Vec<FactorSpec>,
    pub degree: DegreeReport,
    rank_cache: HashMap<Vec<usize>, usize>,
}

#[derive(Clone, Debug)]
enum FactorSpec {
    One,
    /// Product of the listed branch equations.
    Equations(Vec<BiPoly>),
    Poly(BiPoly),
}

impl FactorSpec {
    fn poly(&self) -> BiPoly {
        match self {
            FactorSpec::One => BiPoly::constant(Scalar::one()),
            FactorSpec::Equations(fs) => fs.iter().fold(BiPoly::constant(Scalar::one()), |acc, f| acc.mul(f)),
            FactorSpec::Poly(p) => p.clone(),
        }
    }
}

fn series_row(s: &Series, prec: usize) -> Vec<Scalar> {
    let mut row = vec![Scalar::zero(); prec];
    for (k, c) in s.terms() {
        if k < prec {
            row[k] = c.clone();
        }
    }
    row
}

/// Per-branch pullback data.
struct BranchJets {
    xp: Vec<Series>,
    yp: Vec<Series>,
    /// t·x′, t·y′
    tdx: Series,
    tdy: Series,
    prec: usize,
    /// Extra order consumed by a later division (n for LambdaG).
    shift: usize,
    factors: Vec<Series>,
}

impl BranchJets {
    fn new(b: &Branch, prec: usize, shift: usize, dmax: usize) -> Self {
        let cap = prec + shift;
        let mut xp = vec![Series::one().truncate(cap)];
        let mut yp = vec![Series::one().truncate(cap)];
        for _ in 0..dmax {
            xp.push(xp.last().unwrap().mul_to(&b.x, cap));
            yp.push(yp.last().unwrap().mul_to(&b.y, cap));
        }
        let tdx = b.x.derivative().shift_up(1).truncate(cap);
        let tdy = b.y.derivative().shift_up(1).truncate(cap);
        BranchJets { xp, yp, tdx, tdy, prec, shift, factors: Vec::new() }
    }

    fn ensure_degree(&mut self, b: &Branch, d: usize) {
        let cap = self.prec + self.shift;
        while self.xp.len() <= d {
            let nx = self.xp.last().unwrap().mul_to(&b.x, cap);
            let ny = self.yp.last().unwrap().mul_to(&b.y, cap);
            self.xp.push(nx);
            self.yp.push(ny);
        }
    }

    fn jet(&self, g: &Generator, n: usize) -> Result<Vec<Scalar>> {
        let cap = self.prec + self.shift;
        let s = match *g {
            Generator::Function { a, b, factor } => {
                self.xp[a].mul_to(&self.yp[b], cap).mul_to(&self.factors[factor], cap)
            }
            Generator::Form { a, b, dx } => {
                let d = if dx { &self.tdx } else { &self.tdy };
                self.xp[a].mul_to(&self.yp[b], cap).mul_to(d, cap)
            }
        };
        let s = if self.shift > 0 {
            s.shift_down(self.shift)?.scale(&Scalar::ratio(1, n as i64))
        } else {
            s
        };
        Ok(series_row(&s, self.prec))
    }
}

/// Generators of the given coefficient degree.
fn generators_of_degree(spec: &JetSpec, d: usize, nfactors: usize) -> Vec<Generator> {
    let mut out = Vec::new();
    match spec.kind {
        Kind::Gamma | Kind::BranchSemigroup | Kind::JacobianValues => {
            if d < spec.min_degree {
                return out;
            }
            for factor in 0..nfactors {
                for a in (0..=d).rev() {
                    out.push(Generator::Function { a, b: d - a, factor });
                }
            }
        }
        Kind::Lambda => {
            for dx in [true, false] {
                for a in (0..=d).rev() {
                    out.push(Generator::Form { a, b: d - a, dx });
                }
            }
        }
        Kind::LambdaG => {
            if d >= 2 {
                for dx in [true, false] {
                    for a in (0..=d).rev() {
                        out.push(Generator::Form { a, b: d - a, dx });
                    }
                }
            } else if d == 1 && spec.tilde {
                // η₁ = Y gives −Y dY
                out.push(Generator::Form { a: 0, b: 1, dx: false });
            }
        }
    }
    out
}

/// Generator jets of a spec, before any elimination.
struct Collected {
    offsets: Vec<usize>,
    ncols: usize,
    factors: Vec<FactorSpec>,
    d_star: usize,
    d_used: usize,
    d_top: usize,
    /// (degree, generator, jet)
    jets: Vec<(usize, Generator, Vec<Scalar>)>,
}

fn collect(phi: &Multigerm, spec: &JetSpec) -> Result<Collected> {
    let r = phi.r();
    if spec.prec.len() != r || spec.infinite.len() != r {
        return Err(CurvaError::Internal("jet spec has the wrong length".into()));
    }
    if spec.infinite.iter().any(|&b| b) && spec.kind != Kind::Gamma {
        return Err(CurvaError::Internal("infinite coordinates are only supported for Gamma".into()));
    }
    let exact: Vec<Branch> = phi.branches.iter().map(|b| b.exact()).collect();
    let prec: Vec<usize> = (0..r).map(|i| if spec.infinite[i] { 0 } else { spec.prec[i] }).collect();
    let mut offsets = Vec::with_capacity(r);
    let mut ncols = 0;
    for &p in &prec {
        offsets.push(ncols);
        ncols += p;
    }
    let shift_of = |i: usize| if spec.kind == Kind::LambdaG { exact[i].n } else { 0 };
    let d_star = (0..r)
        .filter(|&i| prec[i] > 0)
        .map(|i| prec[i].div_ceil(exact[i].n).saturating_sub(1))
        .max()
        .unwrap_or(0);
    let d_used = d_star.max(1);
    let d_top = d_used + 2;

    // factors
    let targets: Vec<(&Branch, usize)> =
        (0..r).filter(|&i| prec[i] > 0).map(|i| (&exact[i], prec[i] + shift_of(i) + 2)).collect();
    let factors: Vec<FactorSpec> = match spec.kind {
        Kind::Gamma if spec.infinite.iter().any(|&b| b) => {
            let mut eqs = Vec::new();
            for i in 0..r {
                if spec.infinite[i] {
                    eqs.push(weierstrass_for(&exact[i], &targets)?.poly);
                }
            }
            vec![FactorSpec::Equations(eqs)]
        }
        Kind::JacobianValues => {
            let mut f = BiPoly::constant(Scalar::one());
            for b in &exact {
                let t2: Vec<(&Branch, usize)> = targets.iter().map(|(b, p)| (*b, p + b.n)).collect();
                f = f.mul(&weierstrass_for(b, &t2)?.poly);
            }
            vec![FactorSpec::Poly(f.dx()), FactorSpec::Poly(f.dy())]
        }
        _ => vec![FactorSpec::One],
    };

    let mut bj: Vec<Option<BranchJets>> = Vec::with_capacity(r);
    for i in 0..r {
        if prec[i] == 0 {
            bj.push(None);
            continue;
        }
        let mut j = BranchJets::new(&exact[i], prec[i], shift_of(i), 2);
        let cap = prec[i] + shift_of(i);
        for f in &factors {
            let s = match f {
                FactorSpec::One => Series::one().truncate(cap),
                FactorSpec::Equations(eqs) => {
                    let mut acc = Series::one().truncate(cap);
                    for e in eqs {
                        acc = acc.mul_to(&e.pullback(&exact[i].x, &exact[i].y, cap), cap);
                    }
                    acc
                }
                FactorSpec::Poly(p) => p.pullback(&exact[i].x, &exact[i].y, cap),
            };
            j.factors.push(s.truncate(cap));
        }
        bj.push(Some(j));
    }

    let mut jets = Vec::new();
    for d in 0..=d_top {
        for (i, j) in bj.iter_mut().enumerate() {
            if let Some(j) = j {
                j.ensure_degree(&exact[i], d);
            }
        }
        for g in generators_of_degree(spec, d, factors.len()) {
            let mut jet = Vec::with_capacity(ncols);
            for i in 0..r {
                if let Some(j) = &bj[i] {
                    jet.extend(j.jet(&g, exact[i].n)?);
                }
            }
            jets.push((d, g, jet));
        }
    }
    Ok(Collected { offsets, ncols, factors, d_star, d_used, d_top, jets })
}

/// ranks[p] = rank of the jet image on the columns {(i, e) : e < p}, for
/// p up to the largest precision. One echelon pass with the columns ordered
/// by exponent gives every prefix rank at once; no combinations are kept.
pub fn exponent_ranks(phi: &Multigerm, spec: &JetSpec) -> Result<Vec<usize>> {
    let c = collect(phi, spec)?;
    let top = spec.prec.iter().copied().max().unwrap_or(0);
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(c.ncols);
    for e in 0..top {
        for (i, &p) in spec.prec.iter().enumerate() {
            if e < p && !spec.infinite[i] {
                order.push((e, c.offsets[i] + e));
            }
        }
    }
    let permute = |jet: &Vec<Scalar>| -> Vec<Scalar> { order.iter().map(|&(_, col)| jet[col].clone()).collect() };
    let used: linalg::Matrix = c.jets.iter().filter(|(d, _, _)| *d <= c.d_used).map(|(_, _, j)| permute(j)).collect();
    let all: linalg::Matrix = c.jets.iter().map(|(_, _, j)| permute(j)).collect();
    let rank_used = linalg::echelon_pivots(used).len();
    let pivots = linalg::echelon_pivots(all);
    if pivots.len() != rank_used {
        return Err(CurvaError::DegreeBound(format!(
            "jet image grew beyond the certified degree {} ({rank_used} → {})",
            c.d_used,
            pivots.len()
        )));
    }
    Ok((0..=top).map(|p| pivots.iter().filter(|&&q| order[q].0 < p).count()).collect())
}

impl JetSpace {
    /// Builds the jet image, adding generators degree by degree up to the
    /// certified bound plus two stabilization steps.
    pub fn build(phi: &Multigerm, spec: JetSpec) -> Result<JetSpace> {
        let c = collect(phi, &spec)?;
        let mut space = JetSpace {
            spec,
            offsets: c.offsets,
            ncols: c.ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            generators: Vec::new(),
            factors: c.factors,
            degree: DegreeReport { d_star: c.d_star, d_used: c.d_used, dims: Vec::new(), certified: true },
            rank_cache: HashMap::new(),
        };
        let mut jets = c.jets.into_iter().peekable();
        for d in 0..=c.d_top {
            while let Some((_, g, jet)) = jets.next_if(|(gd, _, _)| *gd == d) {
                let idx = space.generators.len();
                space.generators.push(g);
                space.insert(jet, idx);
            }
            space.degree.dims.push((d, space.rows.len()));
        }
        let (d_used, d_top) = (c.d_used, c.d_top);
        let dim_at = |d: usize| space.degree.dims[d].1;
        if dim_at(d_used) != dim_at(d_top) {
            space.degree.certified = false;
            return Err(CurvaError::DegreeBound(format!(
                "jet image grew beyond the certified degree {d_used} ({} → {})",
                dim_at(d_used),
                dim_at(d_top)
            )));
        }
        Ok(space)
    }

    fn insert(&mut self, mut jet: Vec<Scalar>, gen: usize) {
        let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
        combo.insert(gen, Scalar::one());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if jet[p].is_zero() {
                continue;
            }
            let f = jet[p].clone();
            for (x, b) in jet.iter_mut().zip(&row.jet) {
                if !b.is_zero() {
                    *x -= &(&f * b);
                }
            }
            for (k, c) in &row.combo {
                let e = combo.entry(*k).or_insert_with(Scalar::zero);
                *e -= &(&f * c);
            }
        }
        let Some(p) = jet.iter().position(|x| !x.is_zero()) else {
            return;
        };
        let inv = jet[p].inv().unwrap();
        let jet: Vec<Scalar> = jet.iter().map(|x| x * &inv).collect();
        let combo: BTreeMap<usize, Scalar> =
            combo.into_iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k, &c * &inv)).collect();
        for row in self.rows.iter_mut() {
            if row.jet[p].is_zero() {
                continue;
            }
            let f = row.jet[p].clone();
            for (x, b) in row.jet.iter_mut().zip(&jet) {
                if !b.is_zero() {
                    *x -= &(&f * b);
                }
            }
            for (k, c) in &combo {
                let e = row.combo.entry(*k).or_insert_with(Scalar::zero);
                *e -= &(&f * c);
            }
            row.combo.retain(|_, c| !c.is_zero());
        }
        let pos = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.pivots.insert(pos, p);
        self.rows.insert(pos, Row { jet, combo });
        self.rank_cache.clear();
    }

    pub fn r(&self) -> usize {
        self.spec.prec.len()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Columns {(i, e) : e < lower_i}.
    pub fn columns_below(&self, lower: &[usize]) -> Result<Vec<usize>> {
        let mut cols = Vec::new();
        for (i, &l) in lower.iter().enumerate() {
            if self.spec.infinite[i] {
                continue;
            }
            if l > self.spec.prec[i] {
                return Err(CurvaError::Internal(format!(
                    "query needs order {l} on branch {} but jets stop at {}",
                    i + 1,
                    self.spec.prec[i]
                )));
            }
            cols.extend(self.offsets[i]..self.offsets[i] + l);
        }
        Ok(cols)
    }

    /// rank of U on C(lower); cached.
    pub fn rank_below(&mut self, lower: &[usize]) -> Result<usize> {
        if let Some(&v) = self.rank_cache.get(lower) {
            return Ok(v);
        }
        let cols = self.columns_below(lower)?;
        let m: linalg::Matrix = self.rows.iter().map(|r| r.jet.clone()).collect();
        let v = linalg::rank_of_columns(&m, &cols);
        self.rank_cache.insert(lower.to_vec(), v);
        Ok(v)
    }

    /// Whether some element has order ≥ lower everywhere and exactly
    /// lower_j for every j in `exact`.
    pub fn attains(&mut self, lower: &[usize], exact: &[usize]) -> Result<bool> {
        let base = self.rank_below(lower)?;
        for &j in exact {
            let mut up = lower.to_vec();
            up[j] += 1;
            if self.rank_below(&up)? == base {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership of a finite value vector (coordinates on infinite
    /// branches are ignored).
    pub fn contains(&mut self, gamma: &[u64]) -> Result<bool> {
        let lower: Vec<usize> = gamma.iter().map(|&g| g as usize).collect();
        let exact: Vec<usize> = (0..self.r()).filter(|&i| !self.spec.infinite[i]).collect();
        self.attains(&lower, &exact)
    }

    /// F_J(γ) ≠ ∅.
    pub fn fiber_nonempty(&mut self, j_set: &[usize], gamma: &[u64]) -> Result<bool> {
        let lower: Vec<usize> = gamma
            .iter()
            .enumerate()
            .map(|(i, &g)| if j_set.contains(&i) { g as usize } else { g as usize + 1 })
            .collect();
        self.attains(&lower, j_set)
    }

    /// Basis of {v ∈ U : v vanishes on C(lower)} with generator combinations.
    pub fn subspace_above(&self, lower: &[usize]) -> Result<Vec<(Vec<Scalar>, BTreeMap<usize, Scalar>)>> {
        let cols = self.columns_below(lower)?;
        // left kernel of the restricted rows: c with Σ c_k row_k|C = 0
        let m = self.rows.len();
        let restricted: linalg::Matrix =
            cols.iter().map(|&c| self.rows.iter().map(|r| r.jet[c].clone()).collect()).collect();
        let ker = if restricted.is_empty() {
            linalg::Subspace::span(m, linalg::identity(m))
        } else {
            linalg::kernel(&restricted, m)
        };
        let mut out = Vec::new();
        for c in &ker.basis {
            let mut jet = vec![Scalar::zero(); self.ncols];
            let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, ck) in c.iter().enumerate() {
                if ck.is_zero() {
                    continue;
                }
                for (x, v) in jet.iter_mut().zip(&self.rows[k].jet) {
                    if !v.is_zero() {
                        *x += &(ck * v);
                    }
                }
                for (g, v) in &self.rows[k].combo {
                    let e = combo.entry(*g).or_insert_with(Scalar::zero);
                    *e += &(ck * v);
                }
            }
            combo.retain(|_, c| !c.is_zero());
            out.push((jet, combo));
        }
        Ok(out)
    }

    pub fn column(&self, i: usize, e: usize) -> usize {
        self.offsets[i] + e
    }

    /// An element of order ≥ lower with exact order lower_j for j in `exact`.
    pub fn witness(&self, lower: &[usize], exact: &[usize]) -> Result<Option<Element>> {
        let basis = self.subspace_above(lower)?;
        if basis.is_empty() {
            return Ok(None);
        }
        let targets: Vec<usize> = exact.iter().map(|&j| self.column(j, lower[j])).collect();
        // Σ s^k b_k for s = 1, 2, …: at most (#exact)·(dim − 1) bad values of s.
        let tries = exact.len() * basis.len() + 1;
        for s in 1..=tries as i64 {
            let mut jet = vec![Scalar::zero(); self.ncols];
            let mut combo: BTreeMap<usize, Scalar> = BTreeMap::new();
            let mut w = Scalar::one();
            for (bj, bc) in &basis {
                for (x, v) in jet.iter_mut().zip(bj) {
                    if !v.is_zero() {
                        *x += &(&w * v);
                    }
                }
                for (g, v) in bc {
                    let e = combo.entry(*g).or_insert_with(Scalar::zero);
                    *e += &(&w * v);
                }
                w = &w * &Scalar::int(s);
            }
            if targets.iter().all(|&c| !jet[c].is_zero()) {
                return Ok(Some(self.element_of(&combo)));
            }
        }
        Ok(None)
    }

    /// The polynomial function or form of a generator combination.
    pub fn element_of(&self, combo: &BTreeMap<usize, Scalar>) -> Element {
        let mut fun = BiPoly::zero();
        let mut fa = BiPoly::zero();
        let mut fb = BiPoly::zero();
        let mut by_factor: BTreeMap<usize, BiPoly> = BTreeMap::new();
        let mut is_form = false;
        for (g, c) in combo {
            match self.generators[*g] {
                Generator::Function { a, b, factor } => {
                    let e = by_factor.entry(factor).or_insert_with(BiPoly::zero);
                    *e = e.add(&BiPoly::new([((a, b), c.clone())]));
                }
                Generator::Form { a, b, dx } => {
                    is_form = true;
                    let m = BiPoly::new([((a, b), c.clone())]);
                    if dx {
                        fa = fa.add(&m);
                    } else {
                        fb = fb.add(&m);
                    }
                }
            }
        }
        if is_form || matches!(self.spec.kind, Kind::Lambda | Kind::LambdaG) {
            return Element::Form { a: fa, b: fb };
        }
        for (k, p) in by_factor {
            fun = fun.add(&p.mul(&self.factors[k].poly()));
        }
        Element::Function(fun)
    }

    /// Jet rows of U with their generator combinations.
    pub fn basis(&self) -> impl Iterator<Item = (&Vec<Scalar>, &BTreeMap<usize, Scalar>)> {
        self.rows.iter().map(|r| (&r.jet, &r.combo))
    }
}

/// Pulls back an element along a branch: h(φ) for functions, t(a x′ + b y′)
/// for forms, truncated below `cap`.
pub fn pullback_element(e: &Element, b: &Branch, cap: usize) -> Series {
    let b = b.exact();
    match e {
        Element::Function(h) => h.pullback(&b.x, &b.y, cap),
        Element::Form { a, b: bb } => {
            let tdx = b.x.derivative().shift_up(1);
            let tdy = b.y.derivative().shift_up(1);
            let pa = a.pullback(&b.x, &b.y, cap).mul_to(&tdx, cap);
            let pb = bb.pullback(&b.x, &b.y, cap).mul_to(&tdy, cap);
            pa.add(&pb).truncate(cap)
        }
    }
}
