//! The homothety part: σ = (αX, γY), ρ_i = u_i·t.
//!
//! Keeping the monomial coordinate c_i·t^{n_i} forces u_i^{n_i} = α off B₂
//! and u_i^{n_i} = γ on B₂. A coefficient a_{ij} of the other coordinate
//! then becomes γ·u_i^{-j}·a_{ij} (α·u_i^{-j}·a_{ij} on B₂). With three or
//! more blocks α = γ.

use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::curve::{apply_group, identity_permutation, subgroup_for, GroupElement, LogEntry};
use crate::error::{CurvaError, Result};
use crate::kernel::torus::{solve_monomial_system, TorusVerdict};
use crate::kernel::{BiPoly, Scalar, Series};

use super::reduce::{coefficient, coords, parameter_vector, NormalFormResult, ParamEntry};

fn lcm_of(v: impl Iterator<Item = usize>) -> usize {
    v.fold(1, |a, b| a.lcm(&b))
}

fn homothety(alpha: &Scalar, gamma: &Scalar, u: &[Scalar], s: usize) -> GroupElement {
    GroupElement {
        reparams: u.iter().map(|ui| Series::monomial(ui.clone(), 1)).collect(),
        target: [BiPoly::x().scale(alpha), BiPoly::y().scale(gamma)],
        flavor: subgroup_for(s).homothety,
    }
}

/// Torus coordinates for the homothety part. With s ≥ 3 there is one
/// coordinate A: α = γ = A^M, u_i = A^{M/n_i}, M = lcm n_i. Otherwise there
/// are two, A and C: α = A^{M₁}, γ = C^{M₂}, and u_i = A^{M₁/n_i} off B₂,
/// C^{M₂/n_i} on B₂, with M₁, M₂ the lcm of n_i off and on B₂.
struct TorusChart {
    tied: bool,
    m1: usize,
    m2: usize,
    b2: Vec<bool>,
    n: Vec<usize>,
}

impl TorusChart {
    fn new(nf: &NormalFormResult) -> Self {
        let n = nf.psi.multiplicities();
        let r = n.len();
        let b2: Vec<bool> = (0..r).map(|i| nf.blocks.in_b2(i)).collect();
        let tied = nf.blocks.s() >= 3;
        let m1 = if tied {
            lcm_of(n.iter().copied())
        } else {
            lcm_of((0..r).filter(|&i| !b2[i]).map(|i| n[i]))
        };
        let m2 = lcm_of((0..r).filter(|&i| b2[i]).map(|i| n[i]));
        TorusChart { tied, m1, m2, b2, n }
    }

    fn dim(&self) -> usize {
        if self.tied {
            1
        } else {
            2
        }
    }

    /// Exponents of the character by which a_{ij} is multiplied.
    fn character(&self, i: usize, j: usize) -> Vec<i64> {
        let ni = self.n[i];
        if self.tied {
            vec![-((self.m1 * (j - ni) / ni) as i64)]
        } else if self.b2[i] {
            vec![self.m1 as i64, -((self.m2 * j / ni) as i64)]
        } else {
            vec![-((self.m1 * j / ni) as i64), self.m2 as i64]
        }
    }

    fn scaled(&self, p: &ParamEntry, t: &[Scalar]) -> Scalar {
        let mut v = p.value.clone();
        for (x, &k) in t.iter().zip(&self.character(p.branch, p.order)) {
            v = &v * &x.pow(k);
        }
        v
    }

    fn element(&self, t: &[Scalar], s: usize) -> GroupElement {
        let a = &t[0];
        let c = if self.tied { &t[0] } else { &t[1] };
        let alpha = a.pow(self.m1 as i64);
        let gamma = if self.tied { alpha.clone() } else { c.pow(self.m2 as i64) };
        let u: Vec<Scalar> = (0..self.n.len())
            .map(|i| if self.b2[i] { c.pow((self.m2 / self.n[i]) as i64) } else { a.pow((self.m1 / self.n[i]) as i64) })
            .collect();
        homothety(&alpha, &gamma, &u, s)
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves τ^e = q and returns the torus point τ^w, if the root is in ℚ(i).
fn along(w: &[i64], e: i64, q: &Scalar) -> Option<Vec<Scalar>> {
    let (e, q) = if e < 0 { (-e, q.inv()?) } else { (e, q.clone()) };
    let tau = q.nth_root(e as u32)?;
    Some(w.iter().map(|&k| tau.pow(k)).collect())
}

/// Scales the first nonzero parameter a_{i₀j₀} to 1. With at most two
/// blocks the torus is two-dimensional, and the next parameter moved by the
/// remaining one-parameter subgroup is scaled to 1 as well. A step whose
/// root is missing from ℚ(i) is skipped and recorded in the certificate.
pub fn a_normal_form(nf: &NormalFormResult) -> Result<NormalFormResult> {
    let mut out = nf.clone();
    let Some(first) = nf.parameter_vector.iter().find(|e| !e.value.is_zero()) else {
        return Ok(out);
    };
    let chart = TorusChart::new(nf);
    let (i0, j0) = (first.branch, first.order);
    let chi0 = chart.character(i0, j0);
    // a one-parameter subgroup τ ↦ τ^w with ⟨χ₀, w⟩ = g
    let (w0, g0) = if chart.dim() == 1 {
        (vec![1i64], chi0[0])
    } else {
        let ext = chi0[0].extended_gcd(&chi0[1]);
        (vec![ext.x, ext.y], ext.gcd)
    };
    let mut steps = vec![json!({
        "entry": [i0 + 1, j0],
        "character": chi0,
        "equation": format!("tau^{g0} = 1/a"),
        "a": first.value.to_string(),
    })];
    let Some(mut t) = along(&w0, g0, &first.value.inv().unwrap()) else {
        out.scaling_certificate = Some(json!({"normalized": false, "steps": steps}));
        return Ok(out);
    };
    let mut normalized = vec![(i0, j0)];
    if chart.dim() == 2 {
        // the identity component of ker χ₀
        let g = chi0[0].gcd(&chi0[1]);
        let w1 = vec![chi0[1] / g, -chi0[0] / g];
        let next = nf
            .parameter_vector
            .iter()
            .filter(|p| (p.branch, p.order) != (i0, j0) && !p.value.is_zero())
            .find(|p| dot(&chart.character(p.branch, p.order), &w1) != 0);
        if let Some(p) = next {
            let e = dot(&chart.character(p.branch, p.order), &w1);
            let b = chart.scaled(p, &t);
            steps.push(json!({
                "entry": [p.branch + 1, p.order],
                "character": chart.character(p.branch, p.order),
                "equation": format!("tau^{e} = 1/b"),
                "b": b.to_string(),
            }));
            if let Some(t2) = along(&w1, e, &b.inv().unwrap()) {
                t = t.iter().zip(&t2).map(|(x, y)| x * y).collect();
                normalized.push((p.branch, p.order));
            }
        }
    }
    let h = chart.element(&t, nf.blocks.s());
    if !h.check_flavor() {
        return Err(CurvaError::Internal("homothety left its subgroup".into()));
    }
    let bs = &nf.blocks;
    let n = &chart.n;
    let r = n.len();
    let mut psi = apply_group(&nf.psi, &h, &identity_permutation(r))?.truncate(&nf.d);
    psi.blocks = Some(bs.clone());
    for i in 0..r {
        let (m_old, _) = coords(&nf.psi, bs, i);
        let (m_new, _) = coords(&psi, bs, i);
        if m_new.num_terms() != 1 || m_new.coeff(n[i]) != m_old.coeff(n[i]) {
            return Err(CurvaError::Internal(format!("homothety moved the monomial coordinate of branch {}", i + 1)));
        }
    }
    for &(i, j) in &normalized {
        if !coefficient(&psi, bs, i, j).is_one() {
            return Err(CurvaError::Internal(format!("homothety did not normalize a_({},{j})", i + 1)));
        }
    }
    out.group_log.push(LogEntry {
        step: "homothety".into(),
        order: Some(j0),
        element: Some(h),
        permutation: None,
        truncate_to: Some(nf.d.clone()),
    });
    out.parameter_vector = parameter_vector(&psi, bs, nf.k0);
    out.psi = psi;
    out.normalized_index = Some((i0, j0));
    out.scaling_certificate = Some(json!({
        "normalized": true,
        "entries": normalized.iter().map(|(i, j)| json!([i + 1, j])).collect::<Vec<_>>(),
        "steps": steps,
    }));
    Ok(out)
}

/// Outcome of comparing two 𝒢-normal forms up to homothety.
#[derive(Clone, Debug)]
pub struct HomothetyVerdict {
    pub compatible: bool,
    pub reason: Option<String>,
    pub torus: Option<TorusVerdict>,
}

impl HomothetyVerdict {
    fn no(reason: String) -> Self {
        HomothetyVerdict { compatible: false, reason: Some(reason), torus: None }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "compatible": self.compatible,
            "reason": self.reason,
            "torus": self.torus.as_ref().map(|t| serde_json::to_value(t).unwrap()),
        })
    }
}

/// Whether some homothety carries ψ₁ to ψ₂ branch by branch. Works on the
/// raw coefficients, so leading coefficients and θ_j need no prior scaling
/// and no root is ever extracted.
pub fn homothety_compatible(nf1: &NormalFormResult, nf2: &NormalFormResult) -> Result<HomothetyVerdict> {
    let (p1, p2) = (&nf1.psi, &nf2.psi);
    if nf1.blocks.starts != nf2.blocks.starts {
        return Ok(HomothetyVerdict::no("block structures differ".into()));
    }
    if p1.multiplicities() != p2.multiplicities() || nf1.d != nf2.d {
        return Ok(HomothetyVerdict::no("multiplicities or determinacy bounds differ".into()));
    }
    let bs = &nf1.blocks;
    let r = p1.r();
    let tied = bs.s() >= 3;
    // unknowns: α, γ (absent when tied), u_1..u_r
    let off = if tied { 1 } else { 2 };
    let nvars = off + r;
    let gamma_col = if tied { 0 } else { 1 };
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for i in 0..r {
        let n = p1.branches[i].n;
        let (mono_col, other_col) = if bs.in_b2(i) { (gamma_col, 0) } else { (0, gamma_col) };
        let (m1, o1) = coords(p1, bs, i);
        let (m2, o2) = coords(p2, bs, i);
        let mut row = vec![0i64; nvars];
        row[mono_col] += 1;
        row[off + i] -= n as i64;
        rows.push(row);
        rhs.push(&m2.coeff(n) * &m1.coeff(n).inv().unwrap());
        for j in n..nf1.d[i] {
            let (a, b) = (o1.coeff(j), o2.coeff(j));
            match (a.is_zero(), b.is_zero()) {
                (true, true) => continue,
                (false, false) => {}
                _ => {
                    return Ok(HomothetyVerdict::no(format!(
                        "branch {} has a zero and a nonzero coefficient at t^{j}",
                        i + 1
                    )))
                }
            }
            let mut row = vec![0i64; nvars];
            row[other_col] += 1;
            row[off + i] -= j as i64;
            rows.push(row);
            rhs.push(&b * &a.inv().unwrap());
        }
    }
    let v = solve_monomial_system(&rows, &rhs)?;
    let reason = (!v.solvable).then(|| "the homothety system has no solution over ℂ*".to_string());
    Ok(HomothetyVerdict { compatible: v.solvable, reason, torus: Some(v) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{Branch, Multigerm};
    use crate::normalform::g_normal_form;

    fn nf(bs: Vec<Branch>) -> NormalFormResult {
        g_normal_form(&Multigerm::new(bs).unwrap()).unwrap()
    }

    #[test]
    fn irreducible_scales_two_coefficients() {
        let f = nf(vec![Branch::from_ints(&[(4, 1)], &[(6, 2), (7, 3)], 20).unwrap()]);
        let a = a_normal_form(&f).unwrap();
        assert_eq!(a.normalized_index, Some((0, 6)));
        assert!(coefficient(&a.psi, &a.blocks, 0, 6).is_one());
        assert!(coefficient(&a.psi, &a.blocks, 0, 7).is_one());
        let g = nf(vec![Branch::from_ints(&[(4, 1)], &[(6, 1), (7, 1)], 20).unwrap()]);
        assert_eq!(a.psi.branches, g.psi.branches);
        assert!(homothety_compatible(&f, &g).unwrap().compatible);
        assert!(homothety_compatible(&a, &g).unwrap().compatible);
    }

    #[test]
    fn missing_root_is_certified() {
        // two blocks: the torus character has gcd 1, so a root always exists
        let f = nf(vec![Branch::from_ints(&[(2, 1)], &[(3, 2)], 8).unwrap()]);
        assert!(coefficient(&a_normal_form(&f).unwrap().psi, &f.blocks, 0, 3).is_one());
        // a (2,5)-cusp and three lines: scaling a_{3,5} = 2 to 1 needs A³ = 2
        let f = nf(vec![
            Branch::from_ints(&[(1, 1)], &[], 16).unwrap(),
            Branch::from_ints(&[], &[(1, 1)], 16).unwrap(),
            Branch::from_ints(&[(2, 1)], &[(2, 1), (5, 2)], 16).unwrap(),
        ]);
        let a = a_normal_form(&f).unwrap();
        assert_eq!(a.psi, f.psi);
        assert_eq!(a.scaling_certificate.unwrap()["normalized"], json!(false));
    }

    #[test]
    fn zero_pattern_separates() {
        let f = nf(vec![Branch::from_ints(&[(4, 1)], &[(6, 1), (7, 1)], 20).unwrap()]);
        let mut g = f.clone();
        g.psi.branches[0].y.set_coeff(7, Scalar::zero());
        assert!(!homothety_compatible(&f, &g).unwrap().compatible);
        g.psi.branches[0].y.set_coeff(7, Scalar::int(-5));
        assert!(homothety_compatible(&f, &g).unwrap().compatible);
    }

    #[test]
    fn leading_coefficients_are_absorbed() {
        let f = nf(vec![Branch::from_ints(&[(2, 1)], &[(3, 1)], 8).unwrap()]);
        let g = nf(vec![Branch::from_ints(&[(2, 5)], &[(3, -2)], 8).unwrap()]);
        assert!(homothety_compatible(&f, &g).unwrap().compatible);
    }
}
