//! Analytic equivalence of two multigerms up to reordering of branches.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::curve::{apply_group, identity_permutation, replay_log, to_block_form, to_block_form_ordered, GroupElement, Multigerm};
use crate::error::{CurvaError, Result};
use crate::invariants::{value_set, Kind, ValueSet};
use crate::kernel::ValueVec;

use super::homothety::{homothety_compatible, HomothetyVerdict};
use super::reduce::{g_normal_form, g_normal_form_with, NormalFormResult, ReduceOptions};

/// Block form followed by the 𝒢-normal form.
pub fn normal_form_of(phi: &Multigerm) -> Result<NormalFormResult> {
    let (bf, _, _) = to_block_form(phi)?;
    g_normal_form(&bf)
}

/// Everything needed to re-check a positive verdict.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// Branch i of the reordered ψ is ψ_{π(i)}.
    pub permutation: Vec<usize>,
    pub phi_to_block: (GroupElement, Vec<usize>),
    pub psi_to_block: GroupElement,
    pub nf_phi: NormalFormResult,
    pub nf_psi: NormalFormResult,
    pub homothety: HomothetyVerdict,
}

#[derive(Clone, Debug)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub certificate: Option<Certificate>,
    pub distinguisher: Option<&'static str>,
    /// Orders that survived the Γ comparison.
    pub candidates: Vec<Vec<usize>>,
}

impl EquivalenceVerdict {
    pub fn to_json(&self) -> Value {
        let cert = self.certificate.as_ref().map(|c| {
            json!({
                "phi_block_form": {"element": c.phi_to_block.0.to_json(), "permutation": c.phi_to_block.1},
                "psi_block_form": {"element": c.psi_to_block.to_json()},
                "phi_log": c.nf_phi.group_log.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
                "psi_log": c.nf_psi.group_log.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
                "phi_normal_form": c.nf_phi.psi.to_json(),
                "psi_normal_form": c.nf_psi.psi.to_json(),
                "homothety": c.homothety.to_json(),
            })
        });
        json!({
            "equivalent": self.equivalent,
            "permutation": self.certificate.as_ref().map(|c| c.permutation.clone()),
            "certificate": cert,
            "distinguisher": self.distinguisher,
        })
    }
}

/// All permutations of 0..r in lexicographic order.
pub fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(r), &mut vec![false; r], &mut out);
    out
}

/// Value set members with coordinates reordered: entry i is γ_{π(i)}.
fn permuted(set: &ValueSet, pi: &[usize]) -> (BTreeSet<ValueVec>, Vec<u64>) {
    let members = set.members.iter().map(|v| pi.iter().map(|&k| v[k]).collect()).collect();
    (members, pi.iter().map(|&k| set.bound[k]).collect())
}

fn reorder(psi: &Multigerm, pi: &[usize]) -> Result<Multigerm> {
    let mut out = apply_group(psi, &GroupElement::identity(psi.r()), pi)?;
    out.blocks = None;
    Ok(out)
}

pub fn equivalent(phi: &Multigerm, psi: &Multigerm) -> Result<EquivalenceVerdict> {
    let r = phi.r();
    let no = |d: &'static str, candidates: Vec<Vec<usize>>| EquivalenceVerdict {
        equivalent: false,
        certificate: None,
        distinguisher: Some(d),
        candidates,
    };
    if psi.r() != r {
        return Ok(no("Gamma", Vec::new()));
    }
    let (bf, g_phi, pi0) = to_block_form(phi)?;
    let gamma_phi = permuted(&value_set(phi, Kind::Gamma)?, &pi0);
    let gamma_psi = value_set(psi, Kind::Gamma)?;
    let n_bf = bf.multiplicities();
    let n_psi = psi.multiplicities();
    let opts = ReduceOptions { skip_k0: true, ..Default::default() };
    let nf_phi = g_normal_form_with(&bf, opts)?;
    let starts = nf_phi.blocks.starts.clone();
    let mut candidates = Vec::new();
    let mut blocked = Vec::new();
    for pi in permutations(r) {
        if pi.iter().enumerate().any(|(i, &k)| n_psi[k] != n_bf[i]) {
            continue;
        }
        if permuted(&gamma_psi, &pi) != gamma_phi {
            continue;
        }
        candidates.push(pi.clone());
        let reordered = reorder(psi, &pi)?;
        let (bf_psi, g_psi) = match to_block_form_ordered(&reordered) {
            Ok(v) => v,
            Err(CurvaError::Validation(_)) => continue,
            Err(e) => return Err(e),
        };
        if bf_psi.block_structure()?.starts != starts {
            continue;
        }
        let nf_psi = g_normal_form_with(&bf_psi, opts)?;
        blocked.push(bf_psi);
        let verdict = homothety_compatible(&nf_phi, &nf_psi)?;
        if verdict.compatible {
            let certificate = Certificate {
                permutation: pi,
                phi_to_block: (g_phi, pi0),
                psi_to_block: g_psi,
                nf_phi,
                nf_psi,
                homothety: verdict,
            };
            return Ok(EquivalenceVerdict { equivalent: true, certificate: Some(certificate), distinguisher: None, candidates });
        }
    }
    if candidates.is_empty() {
        return Ok(no("Gamma", candidates));
    }
    let lg_phi = value_set(&bf, Kind::LambdaG)?.members;
    for b in &blocked {
        if value_set(b, Kind::LambdaG)?.members == lg_phi {
            return Ok(no("parameters", candidates));
        }
    }
    Ok(no("LambdaG", candidates))
}

/// Re-derives both normal forms from the inputs by replaying the recorded
/// elements and re-solves the homothety system.
pub fn verify_certificate(phi: &Multigerm, psi: &Multigerm, cert: &Certificate) -> Result<bool> {
    let (g, pi0) = &cert.phi_to_block;
    let mut bf = apply_group(phi, g, pi0)?.with_detected_blocks()?;
    bf.blocks = Some(cert.nf_phi.blocks.clone());
    let bf_psi = apply_group(&reorder(psi, &cert.permutation)?, &cert.psi_to_block, &identity_permutation(psi.r()))?
        .with_detected_blocks()?;
    let a = replay_log(&bf, &cert.nf_phi.group_log)?;
    let b = replay_log(&bf_psi, &cert.nf_psi.group_log)?;
    if a.branches != cert.nf_phi.psi.branches || b.branches != cert.nf_psi.psi.branches {
        return Ok(false);
    }
    for nf in [&cert.nf_phi, &cert.nf_psi] {
        if nf.group_log.iter().filter_map(|e| e.element.as_ref()).any(|g| !g.check_flavor()) {
            return Ok(false);
        }
    }
    Ok(homothety_compatible(&cert.nf_phi, &cert.nf_psi)?.compatible)
}
