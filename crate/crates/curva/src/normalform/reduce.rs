//! Reduction to the 𝒢-normal form.
//!
//! At order k the elimination set L_k and the target jet fix a unique
//! α ∈ U_k and a form ω = η₂dX − η₁dY realizing it. The step applies the
//! time-one flow σ of the field η₁∂_X + η₂∂_Y and then reparametrizes so
//! the monomial coordinate is again c·t^n. Along that path the velocity is
//! w(φ_s) = φ_s*(ω)/(n t^n), and w(φ_s) − w(φ) has order > k because φ_s
//! only moves at orders ≥ k. So the step changes order k by exactly α/c
//! and leaves every lower order untouched; this is asserted after each step.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::curve::{
    apply_group, identity_permutation, puiseux_block_form_with, subgroup_for, BlockStructure, GroupElement, LogEntry,
    Multigerm,
};
use crate::error::{CurvaError, Result};
use crate::invariants::{determinacy_bounds, value_set, Element, Kind};
use crate::kernel::{BiPoly, Scalar, Series};

use super::subspace::jet_subspace;

/// One coordinate a_{ij} of the parameter vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamEntry {
    pub branch: usize,
    pub order: usize,
    pub value: Scalar,
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub psi: Multigerm,
    pub blocks: BlockStructure,
    /// Determinacy bounds; ψ_i is truncated below t^{d_i}.
    pub d: Vec<usize>,
    pub lk_table: Vec<(usize, Vec<usize>)>,
    pub group_log: Vec<LogEntry>,
    /// max ϱ_i for the conductor ϱ of Λ_G.
    pub k0: usize,
    pub parameter_vector: Vec<ParamEntry>,
    pub normalized_index: Option<(usize, usize)>,
    /// Exponent data left when the homothety needs a root outside ℚ(i).
    pub scaling_certificate: Option<Value>,
}

/// Coefficient of the monomial coordinate and the other coordinate.
pub(crate) fn coords<'a>(phi: &'a Multigerm, bs: &BlockStructure, i: usize) -> (&'a Series, &'a Series) {
    let b = &phi.branches[i];
    if bs.in_b2(i) {
        (&b.y, &b.x)
    } else {
        (&b.x, &b.y)
    }
}

fn lead(phi: &Multigerm, bs: &BlockStructure, i: usize) -> Scalar {
    coords(phi, bs, i).0.coeff(phi.branches[i].n)
}

/// a_{ij}: coefficient of t^j in the non-monomial coordinate of branch i.
pub fn coefficient(phi: &Multigerm, bs: &BlockStructure, i: usize, j: usize) -> Scalar {
    coords(phi, bs, i).1.coeff(j)
}

/// exp(η₁∂_X + η₂∂_Y) applied to X and Y, dropping total degree ≥ cap.
pub fn exp_field(eta1: &BiPoly, eta2: &BiPoly, cap: usize) -> Result<[BiPoly; 2]> {
    let apply = |p: &BiPoly| eta1.mul_below(&p.dx(), cap).add(&eta2.mul_below(&p.dy(), cap));
    let guard = cap * (cap + 2) + 4;
    let mut out = [BiPoly::x(), BiPoly::y()];
    for (slot, start) in out.iter_mut().zip([BiPoly::x(), BiPoly::y()]) {
        let mut term = start;
        let mut m = 0;
        loop {
            m += 1;
            term = apply(&term).scale(&Scalar::ratio(1, m as i64));
            if term.is_zero() {
                break;
            }
            *slot = slot.add(&term);
            if m > guard {
                return Err(CurvaError::Internal("flow of the vector field does not terminate".into()));
            }
        }
    }
    Ok(out)
}

/// The group element realizing ω: the flow of (η₁, η₂) followed by the
/// reparametrizations restoring c·t^n.
fn flow_element(phi: &Multigerm, bs: &BlockStructure, omega: &Element, d: &[usize]) -> Result<GroupElement> {
    let Element::Form { a, b } = omega else {
        return Err(CurvaError::Internal("flow needs a differential form".into()));
    };
    let eta1 = b.neg();
    let eta2 = a.clone();
    let n = phi.multiplicities();
    let cap = (0..phi.r()).map(|i| d[i].div_ceil(n[i])).max().unwrap_or(1) + 1;
    let sigma = exp_field(&eta1, &eta2, cap)?;
    let mut reparams = Vec::with_capacity(phi.r());
    for (i, br) in phi.branches.iter().enumerate() {
        let s = if bs.in_b2(i) { &sigma[1] } else { &sigma[0] };
        let moved = s.pullback(&br.x, &br.y, d[i]);
        let c = lead(phi, bs, i);
        let w = moved.shift_down(br.n)?.scale(&c.inv().unwrap());
        let rho = w.unit_root(br.n, d[i])?.shift_up(1).as_exact();
        reparams.push(rho);
    }
    let flavor = subgroup_for(bs.s()).working;
    let g = GroupElement { reparams, target: sigma, flavor };
    if !g.check_flavor() {
        return Err(CurvaError::Internal("elimination step left its subgroup".into()));
    }
    Ok(g)
}

/// Parameter vector over orders n_i+1 ..= k0, branch by branch.
pub fn parameter_vector(psi: &Multigerm, bs: &BlockStructure, k0: usize) -> Vec<ParamEntry> {
    let mut out = Vec::new();
    for (i, b) in psi.branches.iter().enumerate() {
        for j in b.n + 1..=k0 {
            out.push(ParamEntry { branch: i, order: j, value: coefficient(psi, bs, i, j) });
        }
    }
    out
}

/// Options for the reduction.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReduceOptions {
    /// Skip the Λ_G box used for k0 (the parameter vector then runs to
    /// max d_i − 1).
    pub skip_k0: bool,
    /// Raise every determinacy bound to at least this order. Lower values
    /// than the computed bounds are ignored.
    pub degree_bound: Option<usize>,
}

pub fn g_normal_form(phi: &Multigerm) -> Result<NormalFormResult> {
    g_normal_form_with(phi, ReduceOptions::default())
}

pub fn g_normal_form_with(phi: &Multigerm, opts: ReduceOptions) -> Result<NormalFormResult> {
    let bs = phi.block_structure()?;
    let mut d = determinacy_bounds(phi)?;
    if let Some(b) = opts.degree_bound {
        d.iter_mut().for_each(|x| *x = (*x).max(b));
    }
    let (mut cur, mut log) = puiseux_block_form_with(phi, &d)?;
    cur.blocks = Some(bs.clone());
    let r = cur.r();
    let n = cur.multiplicities();
    let kmin = n.iter().copied().min().unwrap() + 1;
    let kmax = d.iter().copied().max().unwrap();
    let mut lk_table = Vec::new();
    for k in kmin..kmax {
        let js = jet_subspace(&cur, k)?;
        let lk = js.greedy_basis();
        let target: Vec<Scalar> = lk
            .iter()
            .map(|&l| {
                let v = &lead(&cur, &bs, l) * &coefficient(&cur, &bs, l, k);
                if bs.in_b2(l) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        lk_table.push((k, lk.clone()));
        if target.iter().all(|t| t.is_zero()) {
            continue;
        }
        let (alpha, omega) = js.realize(&lk, &target)?;
        let g = flow_element(&cur, &bs, &omega, &d)?;
        let mut next = apply_group(&cur, &g, &identity_permutation(r))?.truncate(&d);
        next.blocks = Some(bs.clone());
        check_step(&cur, &next, &bs, k, &alpha, &lk)?;
        log.push(LogEntry {
            step: "eliminate".into(),
            order: Some(k),
            element: Some(g),
            permutation: None,
            truncate_to: Some(d.clone()),
        });
        cur = next;
    }
    check_shape(&cur, &bs, &lk_table, &d)?;
    let k0 = if opts.skip_k0 {
        kmax.saturating_sub(1)
    } else {
        let rho = value_set(&cur, Kind::LambdaG)?.conductor;
        rho.iter().copied().max().unwrap_or(0) as usize
    };
    let parameter_vector = parameter_vector(&cur, &bs, k0);
    Ok(NormalFormResult {
        psi: cur,
        blocks: bs,
        d,
        lk_table,
        group_log: log,
        k0,
        parameter_vector,
        normalized_index: None,
        scaling_certificate: None,
    })
}

/// Lower orders untouched, order k moved by α/c (sign flipped on B₂),
/// L_k cleared, monomial coordinates still single terms.
fn check_step(
    old: &Multigerm,
    new: &Multigerm,
    bs: &BlockStructure,
    k: usize,
    alpha: &[Scalar],
    lk: &[usize],
) -> Result<()> {
    for i in 0..old.r() {
        let (m0, o0) = coords(old, bs, i);
        let (m1, o1) = coords(new, bs, i);
        let n = old.branches[i].n;
        if m1.num_terms() != 1 || m1.coeff(n) != m0.coeff(n) {
            return Err(CurvaError::Internal(format!("order {k}: branch {} lost its monomial coordinate", i + 1)));
        }
        for e in 0..k {
            if o0.coeff(e) != o1.coeff(e) {
                return Err(CurvaError::Internal(format!(
                    "order {k}: branch {} disturbed at t^{e}",
                    i + 1
                )));
            }
        }
        if k >= new.branches[i].trunc() {
            continue;
        }
        let c = m0.coeff(n);
        let mut delta = &alpha[i] * &c.inv().unwrap();
        if bs.in_b2(i) {
            delta = -delta;
        }
        if o1.coeff(k) != &o0.coeff(k) + &delta {
            return Err(CurvaError::Internal(format!("order {k}: branch {} moved by the wrong amount", i + 1)));
        }
        if lk.contains(&i) && !o1.coeff(k).is_zero() {
            return Err(CurvaError::Internal(format!("order {k}: branch {} was not cleared", i + 1)));
        }
    }
    Ok(())
}

/// a_{ij} = 0 whenever i ∈ L_j, and the block shape holds.
fn check_shape(psi: &Multigerm, bs: &BlockStructure, lk_table: &[(usize, Vec<usize>)], d: &[usize]) -> Result<()> {
    for (k, lk) in lk_table {
        for &i in lk {
            if *k < d[i] && *k > psi.branches[i].n && !coefficient(psi, bs, i, *k).is_zero() {
                return Err(CurvaError::Internal(format!("normal form keeps a_({},{k}) with branch in L_k", i + 1)));
            }
        }
    }
    for i in 0..psi.r() {
        let (m, _) = coords(psi, bs, i);
        if m.num_terms() != 1 {
            return Err(CurvaError::Internal(format!("branch {} is not in Puiseux block form", i + 1)));
        }
    }
    Ok(())
}

fn param_json(p: &[ParamEntry]) -> Value {
    Value::Array(
        p.iter()
            .map(|e| json!({"branch": e.branch + 1, "order": e.order, "value": e.value.to_string()}))
            .collect(),
    )
}

impl NormalFormResult {
    pub fn to_json(&self) -> Value {
        json!({
            "psi": self.psi.to_json(),
            "blocks": self.blocks.to_json(),
            "d": self.d,
            "Lk_table": self.lk_table.iter().map(|(k, l)| json!({"k": k, "L": l.iter().map(|i| i + 1).collect::<Vec<_>>()})).collect::<Vec<_>>(),
            "k0": self.k0,
            "parameter_vector": param_json(&self.parameter_vector),
            "normalized_index": self.normalized_index.map(|(i, j)| json!([i + 1, j])),
            "scaling_certificate": self.scaling_certificate,
            "group_log": self.group_log.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
        })
    }
}
