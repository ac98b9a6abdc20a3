//! Properties of the elimination sets, the 𝒢-normal form, the 𝒜-normal form
//! and the equivalence test.

mod common;

use curva::curve::{apply_group, identity_permutation, to_block_form, Multigerm};
use curva::invariants::determinacy_bounds;
use curva::moduli::{sample_generic, ClassSpec};
use curva::normalform::subspace::projection_onto;
use curva::normalform::{a_normal_form, coefficient, compute_lk, equivalent, g_normal_form, jet_subspace};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{corpus, random_g};

fn block_form(phi: &Multigerm) -> Multigerm {
    to_block_form(phi).unwrap().0
}

/// Orders where elimination happens: above the smallest multiplicity and
/// below the largest determinacy bound.
fn orders(bf: &Multigerm) -> std::ops::Range<usize> {
    let n = bf.multiplicities().into_iter().min().unwrap();
    let d = determinacy_bounds(bf).unwrap().into_iter().max().unwrap();
    n + 1..d
}

/// Graded-lex comparison of index sets: bigger sets first, then the set
/// whose indicator vector is lexicographically larger.
fn graded_lex_greater(a: &[usize], b: &[usize], r: usize) -> bool {
    if a.len() != b.len() {
        return a.len() > b.len();
    }
    let bits = |s: &[usize]| (0..r).map(|i| s.contains(&i)).collect::<Vec<bool>>();
    bits(a) > bits(b)
}

#[test]
fn tangent_dimensions_are_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for name in ["zariski", "tacnode", "four_lines", "nm23_pair", "cusp_pair"] {
        let bf = block_form(&corpus(name));
        let s = bf.block_structure().unwrap().s();
        for _ in 0..3 {
            let g = random_g(&mut rng, bf.r(), s, 4);
            let mut moved = apply_group(&bf, &g, &identity_permutation(bf.r())).unwrap();
            moved.blocks = None;
            for k in orders(&bf) {
                let a = jet_subspace(&bf, k).unwrap().dim();
                let b = jet_subspace(&moved, k).unwrap().dim();
                assert_eq!(a, b, "{name} k={k}");
            }
        }
    }
}

#[test]
fn greedy_sets_are_graded_lex_maximal() {
    let mut germs: Vec<(String, Multigerm)> =
        ["four_lines", "nm23_pair", "cusp_pair", "line_and_cusp"].iter().map(|n| (n.to_string(), block_form(&corpus(n)))).collect();
    for r in [5, 6] {
        germs.push((format!("ordinary r={r}"), block_form(&sample_generic(&ClassSpec::ordinary(r, 1)).unwrap())));
    }
    for (name, bf) in &germs {
        let r = bf.r();
        for k in orders(bf) {
            let js = jet_subspace(bf, k).unwrap();
            let lk = compute_lk(bf, k).unwrap();
            assert!(projection_onto(&js, &lk), "{name} k={k}: L_k = {lk:?} does not project onto");
            assert_eq!(lk.len(), js.dim(), "{name} k={k}");
            for m in 1u32..1 << r {
                let l: Vec<usize> = (0..r).filter(|i| m >> i & 1 == 1).collect();
                if graded_lex_greater(&l, &lk, r) {
                    assert!(!projection_onto(&js, &l), "{name} k={k}: {l:?} beats {lk:?}");
                }
            }
        }
    }
}

#[test]
fn normal_form_is_idempotent_and_clears_lk() {
    for name in ["zariski", "cusp_pair", "four_lines", "nm23_pair", "tacnode", "line_and_cusp", "e8"] {
        let bf = block_form(&corpus(name));
        let nf = g_normal_form(&bf).unwrap();
        let again = g_normal_form(&nf.psi).unwrap();
        assert_eq!(again.psi.branches, nf.psi.branches, "{name}");
        let bs = &nf.blocks;
        for (k, lk) in &nf.lk_table {
            for i in 0..nf.psi.r() {
                if *k <= nf.psi.branches[i].n || *k >= nf.d[i] {
                    continue;
                }
                let a = coefficient(&nf.psi, bs, i, *k);
                if lk.contains(&i) {
                    assert!(a.is_zero(), "{name}: a_({},{k}) = {a} with branch in L_k", i + 1);
                }
            }
        }
    }
}

#[test]
fn equivalence_is_reflexive_and_symmetric() {
    let names = ["cusp", "cusp_pair", "e8", "line_and_cusp", "nm23_pair", "node", "tacnode", "zariski", "four_lines"];
    let germs: Vec<Multigerm> = names.iter().map(|n| corpus(n)).collect();
    for (i, a) in germs.iter().enumerate() {
        assert!(equivalent(a, a).unwrap().equivalent, "{} against itself", names[i]);
        for (j, b) in germs.iter().enumerate().skip(i + 1) {
            let ab = equivalent(a, b).unwrap();
            let ba = equivalent(b, a).unwrap();
            assert_eq!(ab.equivalent, ba.equivalent, "{} / {}", names[i], names[j]);
            assert!(!ab.equivalent, "{} ~ {}", names[i], names[j]);
        }
    }
}

#[test]
fn few_lines_are_rigid() {
    let want: [&[(&[(usize, i64)], &[(usize, i64)])]; 3] = [
        &[(&[(1, 1)], &[])],
        &[(&[(1, 1)], &[]), (&[], &[(1, 1)])],
        &[(&[(1, 1)], &[]), (&[], &[(1, 1)]), (&[(1, 1)], &[(1, 1)])],
    ];
    for r in 1..=3 {
        for seed in 0..3 {
            let phi = sample_generic(&ClassSpec::ordinary(r, seed)).unwrap();
            let anf = a_normal_form(&g_normal_form(&block_form(&phi)).unwrap()).unwrap();
            for (b, (x, y)) in anf.psi.branches.iter().zip(want[r - 1]) {
                let tx: Vec<(usize, i64)> = b.x.terms().map(|(e, c)| (e, c.to_string().parse().unwrap())).collect();
                let ty: Vec<(usize, i64)> = b.y.terms().map(|(e, c)| (e, c.to_string().parse().unwrap())).collect();
                assert_eq!((tx.as_slice(), ty.as_slice()), (*x, *y), "r={r} seed={seed}: {}", anf.psi.to_json());
            }
        }
    }
}
