use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::group::{apply_group, identity_permutation, Flavor, GroupElement, Linear};
use super::{Multigerm, Slope};
use crate::error::{CurvaError, Result};
use crate::kernel::{BiPoly, Scalar, Series};

/// Partition of the branches into consecutive blocks of common tangent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockStructure {
    /// 0-based index of the first branch of each block.
    pub starts: Vec<usize>,
    pub slopes: Vec<Slope>,
    pub r: usize,
}

impl BlockStructure {
    pub fn s(&self) -> usize {
        self.starts.len()
    }

    pub fn range(&self, j: usize) -> std::ops::Range<usize> {
        let end = self.starts.get(j + 1).copied().unwrap_or(self.r);
        self.starts[j]..end
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.starts.iter().rposition(|&k| k <= i).unwrap()
    }

    /// Whether branch i lies in the block of vertical tangent.
    pub fn in_b2(&self, i: usize) -> bool {
        self.block_of(i) == 1
    }

    /// Reads off the blocks and checks every block-form condition.
    pub fn detect(phi: &Multigerm) -> Result<BlockStructure> {
        let slopes = phi.slopes();
        let mut starts = vec![0];
        let mut bslopes = vec![slopes[0].clone()];
        for i in 1..slopes.len() {
            if slopes[i] != slopes[i - 1] {
                if bslopes.contains(&slopes[i]) {
                    return Err(CurvaError::Validation("branches with a common tangent are not consecutive".into()));
                }
                starts.push(i);
                bslopes.push(slopes[i].clone());
            }
        }
        let expected = [Slope::Finite(Scalar::zero()), Slope::Infinite, Slope::Finite(Scalar::one())];
        for (j, e) in expected.iter().enumerate().take(bslopes.len()) {
            if &bslopes[j] != e {
                return Err(CurvaError::Validation(format!("block {} has slope {:?}, expected {:?}", j + 1, bslopes[j], e)));
            }
        }
        let bs = BlockStructure { starts, slopes: bslopes, r: phi.r() };
        let n = phi.multiplicities();
        for j in 0..bs.s() {
            let rg = bs.range(j);
            if n[rg.clone()].windows(2).any(|w| w[0] > w[1]) {
                return Err(CurvaError::Validation(format!("multiplicities decrease inside block {}", j + 1)));
            }
        }
        let leads: Vec<usize> = bs.starts.iter().map(|&k| n[k]).collect();
        if leads.windows(2).any(|w| w[0] > w[1]) {
            return Err(CurvaError::Validation("leading block multiplicities are not ordered".into()));
        }
        Ok(bs)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "starts": self.starts,
            "slopes": self.slopes.iter().map(|s| s.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// The subgroup preserving the block structure: a working unipotent part
/// and the homothety part composed with it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Subgroup {
    pub working: Flavor,
    pub homothety: Flavor,
}

pub fn subgroup_for(s: usize) -> Subgroup {
    match s {
        0 | 1 => Subgroup { working: Flavor::A1Tilde, homothety: Flavor::H },
        2 => Subgroup { working: Flavor::A1, homothety: Flavor::H },
        _ => Subgroup { working: Flavor::A1, homothety: Flavor::HPrime },
    }
}

fn slope_cmp(a: &Slope, b: &Slope) -> Ordering {
    match (a, b) {
        (Slope::Finite(x), Slope::Finite(y)) => x.cmp_key(y),
        (Slope::Finite(_), Slope::Infinite) => Ordering::Less,
        (Slope::Infinite, Slope::Finite(_)) => Ordering::Greater,
        (Slope::Infinite, Slope::Infinite) => Ordering::Equal,
    }
}

fn det(m: &Linear) -> Scalar {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

fn inverse(m: &Linear) -> Linear {
    let di = det(m).inv().expect("distinct tangent directions");
    [[&m[1][1] * &di, -&(&m[0][1] * &di)], [-&(&m[1][0] * &di), &m[0][0] * &di]]
}

/// Linear map sending the given slopes (at most three used) to 0, ∞, 1.
pub fn mobius_for(slopes: &[Slope]) -> Linear {
    let (a1, b1) = slopes[0].direction();
    if slopes.len() == 1 {
        return match slopes[0] {
            Slope::Finite(ref th) => [[Scalar::one(), Scalar::zero()], [-th, Scalar::one()]],
            Slope::Infinite => [[Scalar::zero(), Scalar::one()], [Scalar::one(), Scalar::zero()]],
        };
    }
    let (a2, b2) = slopes[1].direction();
    // columns are the tangent directions
    let p: Linear = [[a1, a2], [b1, b2]];
    let pinv = inverse(&p);
    if slopes.len() == 2 {
        return pinv;
    }
    let (a3, b3) = slopes[2].direction();
    let c1 = &(&pinv[0][0] * &a3) + &(&pinv[0][1] * &b3);
    let c2 = &(&pinv[1][0] * &a3) + &(&pinv[1][1] * &b3);
    [
        [&c2 * &pinv[0][0], &c2 * &pinv[0][1]],
        [&c1 * &pinv[1][0], &c1 * &pinv[1][1]],
    ]
}

fn apply_linear(m: &Linear, v: (&Scalar, &Scalar)) -> (Scalar, Scalar) {
    (&(&m[0][0] * v.0) + &(&m[0][1] * v.1), &(&m[1][0] * v.0) + &(&m[1][1] * v.1))
}

/// Lexicographic comparison of coefficient sequences, exponent by exponent.
fn series_cmp(a: &Series, b: &Series) -> Ordering {
    let top = a.degree().unwrap_or(0).max(b.degree().unwrap_or(0));
    for e in 0..=top {
        let o = a.coeff(e).cmp_key(&b.coeff(e));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Sends the first three group slopes to 0, ∞, 1 and scales leading
/// coefficients of the monomial coordinates to 1 where possible.
fn move_to_blocks(phi: &Multigerm, groups: &[(Slope, Vec<usize>)]) -> Result<(Multigerm, GroupElement)> {
    let r = phi.r();
    let chosen: Vec<Slope> = groups.iter().take(3).map(|(s, _)| s.clone()).collect();
    let mut m = mobius_for(&chosen);
    let mut block_of = vec![0usize; r];
    for (j, (_, v)) in groups.iter().enumerate() {
        for &i in v {
            block_of[i] = j;
        }
    }
    let lead_of = |m: &Linear, i: usize| {
        let b = &phi.branches[i];
        let (u, v) = apply_linear(m, (&b.x.coeff(b.n), &b.y.coeff(b.n)));
        if block_of[i] == 1 {
            v
        } else {
            u
        }
    };
    // Without a root in ℚ(i), the first branch of a block takes its leading
    // coefficient to 1 through the target instead. With three or more
    // blocks only a common scaling of X and Y keeps the slopes.
    for (j, (_, v)) in groups.iter().enumerate().take(2) {
        let i = v[0];
        let lead = lead_of(&m, i);
        if lead.nth_root(phi.branches[i].n as u32).is_some() {
            continue;
        }
        let k = lead.inv().unwrap();
        if groups.len() >= 3 {
            m = [[&k * &m[0][0], &k * &m[0][1]], [&k * &m[1][0], &k * &m[1][1]]];
            break;
        }
        m[j] = [&k * &m[j][0], &k * &m[j][1]];
    }
    let mut reparams = Vec::with_capacity(r);
    for (i, b) in phi.branches.iter().enumerate() {
        let lead = lead_of(&m, i);
        let rho = match lead.nth_root(b.n as u32) {
            Some(w) if !lead.is_one() => Series::monomial(w, 1),
            _ => Series::t(),
        };
        reparams.push(rho);
    }
    let g = GroupElement { reparams, target: super::group::linear_map(&m), flavor: Flavor::A };
    let moved = apply_group(phi, &g, &identity_permutation(r))?;
    Ok((moved, g))
}

/// Block form keeping the given branch order: blocks are the runs of equal
/// tangent in order of appearance. Fails if a tangent reappears after
/// another one or the multiplicity ordering of block form is violated.
pub fn to_block_form_ordered(phi: &Multigerm) -> Result<(Multigerm, GroupElement)> {
    let mut groups: Vec<(Slope, Vec<usize>)> = Vec::new();
    for (i, s) in phi.slopes().into_iter().enumerate() {
        match groups.last_mut() {
            Some((t, v)) if *t == s => v.push(i),
            _ => {
                if groups.iter().any(|(t, _)| *t == s) {
                    return Err(CurvaError::Validation("branches with a common tangent are not consecutive".into()));
                }
                groups.push((s, vec![i]));
            }
        }
    }
    let (moved, g) = move_to_blocks(phi, &groups)?;
    Ok((moved.with_detected_blocks()?, g))
}

/// Brings φ to block form. The leading coefficient of each branch's
/// monomial coordinate is scaled to 1 when the needed root lies in ℚ(i).
pub fn to_block_form(phi: &Multigerm) -> Result<(Multigerm, GroupElement, Vec<usize>)> {
    let r = phi.r();
    let slopes = phi.slopes();
    let n = phi.multiplicities();
    // groups of equal slope, in order of first appearance
    let mut groups: Vec<(Slope, Vec<usize>)> = Vec::new();
    for (i, s) in slopes.iter().enumerate() {
        match groups.iter_mut().find(|(t, _)| t == s) {
            Some((_, v)) => v.push(i),
            None => groups.push((s.clone(), vec![i])),
        }
    }
    groups.sort_by(|(sa, va), (sb, vb)| {
        let ma = va.iter().map(|&i| n[i]).min().unwrap();
        let mb = vb.iter().map(|&i| n[i]).min().unwrap();
        ma.cmp(&mb).then_with(|| slope_cmp(sa, sb))
    });
    let (moved, g) = move_to_blocks(phi, &groups)?;

    let mut pi = Vec::with_capacity(r);
    for (j, (_, v)) in groups.iter().enumerate() {
        let mut idx = v.clone();
        let other = |i: usize| if j == 1 { &moved.branches[i].x } else { &moved.branches[i].y };
        idx.sort_by(|&a, &b| n[a].cmp(&n[b]).then_with(|| series_cmp(other(a), other(b))).then(a.cmp(&b)));
        pi.extend(idx);
    }
    let psi = apply_group(phi, &g, &pi)?.with_detected_blocks()?;
    Ok((psi, g, pi))
}

/// One audited step of a reduction.
#[derive(Clone, Debug)]
pub struct LogEntry {
    pub step: String,
    pub order: Option<usize>,
    pub element: Option<GroupElement>,
    pub permutation: Option<Vec<usize>>,
    pub truncate_to: Option<Vec<usize>>,
}

impl LogEntry {
    pub fn truncation(step: &str, ts: Vec<usize>) -> Self {
        LogEntry { step: step.into(), order: None, element: None, permutation: None, truncate_to: Some(ts) }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "step": self.step,
            "order": self.order,
            "element": self.element.as_ref().map(|g| g.to_json()),
            "permutation": self.permutation,
            "truncate_to": self.truncate_to,
        })
    }

    /// Re-applies this step to φ.
    pub fn replay(&self, phi: &Multigerm) -> Result<Multigerm> {
        let mut out = phi.clone();
        if let Some(g) = &self.element {
            let pi = self.permutation.clone().unwrap_or_else(|| identity_permutation(phi.r()));
            out = apply_group(&out, g, &pi)?;
            out.blocks = phi.blocks.clone();
        }
        if let Some(ts) = &self.truncate_to {
            out = out.truncate(ts);
        }
        Ok(out)
    }
}

/// Replays a whole log.
pub fn replay_log(phi: &Multigerm, log: &[LogEntry]) -> Result<Multigerm> {
    let mut cur = phi.clone();
    for e in log {
        cur = e.replay(&cur)?;
    }
    Ok(cur)
}

/// Makes the monomial coordinate of every branch a single term, using
/// ρ^{-1}(t) = t + βt^{k-n+1} at each order k < d_i, then truncates at d_i.
pub fn puiseux_block_form_with(phi: &Multigerm, d: &[usize]) -> Result<(Multigerm, Vec<LogEntry>)> {
    let bs = phi.block_structure()?;
    for (i, b) in phi.branches.iter().enumerate() {
        if b.trunc() < d[i] {
            return Err(CurvaError::Precision(format!(
                "branch {} is known below t^{} but its determinacy bound needs trunc ≥ {}",
                i + 1,
                b.trunc(),
                d[i]
            )));
        }
    }
    let r = phi.r();
    let mut log = vec![LogEntry::truncation("truncate", d.to_vec())];
    let mut cur = phi.truncate(d);
    cur.blocks = Some(bs.clone());
    let top = d.iter().copied().max().unwrap_or(0);
    let nmin = cur.multiplicities().into_iter().min().unwrap();
    for k in nmin + 1..top {
        let mut reparams = vec![Series::t(); r];
        let mut any = false;
        for (i, b) in cur.branches.iter().enumerate() {
            if k <= b.n || k >= d[i] {
                continue;
            }
            let mono = if bs.in_b2(i) { &b.y } else { &b.x };
            let c = mono.coeff(k);
            if c.is_zero() {
                continue;
            }
            let a = mono.coeff(b.n);
            let beta = -(&c / &(&a * &Scalar::int(b.n as i64)));
            let rinv = Series::exact([(1, Scalar::one()), (k - b.n + 1, beta)]);
            reparams[i] = rinv.reversion(d[i])?;
            any = true;
        }
        if !any {
            continue;
        }
        let g = GroupElement { reparams, target: [BiPoly::x(), BiPoly::y()], flavor: Flavor::A1 };
        let entry = LogEntry {
            step: "monomialize".into(),
            order: Some(k),
            element: Some(g),
            permutation: None,
            truncate_to: Some(d.to_vec()),
        };
        cur = entry.replay(&cur)?;
        log.push(entry);
    }
    for (i, b) in cur.branches.iter().enumerate() {
        let mono = if bs.in_b2(i) { &b.y } else { &b.x };
        if mono.num_terms() != 1 {
            return Err(CurvaError::Internal(format!("branch {} not monomialized", i + 1)));
        }
    }
    Ok((cur, log))
}
