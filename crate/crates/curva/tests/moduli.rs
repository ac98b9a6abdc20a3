use curva::curve::{to_block_form, Multigerm};
use curva::invariants::valueset::query_space;
use curva::invariants::Kind;
use curva::kernel::fin_vec;
use curva::moduli::*;
use curva::normalform::{coefficient, g_normal_form_with, jet_subspace, nonempty_subsets, ReduceOptions};
use num_traits::Zero;

const SKIP_K0: ReduceOptions = ReduceOptions { skip_k0: true, degree_bound: None };

fn block_form(spec: &ClassSpec) -> Multigerm {
    to_block_form(&sample_generic(spec).unwrap()).unwrap().0
}

/// Γ fibers at (k,…,k) against a closed rule, for every nonempty J.
fn check_gamma_fibers(phi: &Multigerm, ks: impl Iterator<Item = u64>, rule: impl Fn(usize, u64) -> bool) {
    let r = phi.r();
    for k in ks {
        let g = vec![k; r];
        let mut space = query_space(phi, Kind::Gamma, &fin_vec(&g)).unwrap();
        for j in nonempty_subsets(r) {
            assert_eq!(space.fiber_nonempty(&j, &g).unwrap(), rule(j.len(), k), "r={r} k={k} J={j:?}");
        }
    }
}

#[test]
fn ordinary_gamma_fibers_follow_the_closed_rule() {
    for r in 4..=7 {
        let phi = sample_generic(&ClassSpec::ordinary(r, 11)).unwrap();
        check_gamma_fibers(&phi, 0..=r as u64, |j, k| ordinary_fiber_rule(r, j, k));
    }
}

#[test]
fn nm_gamma_fibers_follow_the_closed_rule() {
    for (n, m, r) in [(2, 3, 2), (2, 3, 3), (3, 4, 2)] {
        let phi = sample_generic(&ClassSpec::nm(n, m, r, 5)).unwrap();
        check_gamma_fibers(&phi, 0..=(r as u64 * n * m + 1), |j, k| nm_fiber_rule(n, m, r, j, k));
    }
}

#[test]
fn ordinary_normal_forms_stay_inside_the_generic_pattern() {
    for r in 4..=6 {
        let bf = block_form(&ClassSpec::ordinary(r, 2));
        let bs = bf.block_structure().unwrap();
        let nf = g_normal_form_with(&bf, SKIP_K0).unwrap();
        let support = ordinary_support(r);
        for (i, allowed) in support.iter().enumerate() {
            for j in 2..nf.d[i] {
                if !coefficient(&nf.psi, &bs, i, j).is_zero() {
                    assert!(allowed.contains(&j), "r={r}: a_({},{j}) survives", i + 1);
                }
            }
        }
        // Granger: slopes past the third, plus the uneliminated orders, less one homothety
        let free: usize = nf.lk_table.iter().map(|(_, l)| r - l.len()).sum();
        let count = r - 3 + free - usize::from(free > 0);
        assert_eq!(count, ordinary_dimension(r), "r={r}");
    }
}

#[test]
fn nm_normal_forms_stay_inside_the_pre_normal_pattern() {
    for (n, m, r) in [(2, 3, 1), (2, 3, 2), (2, 3, 3), (2, 5, 2), (3, 4, 2)] {
        let bf = block_form(&ClassSpec::nm(n, m, r, 4));
        let bs = bf.block_structure().unwrap();
        let nf = g_normal_form_with(&bf, SKIP_K0).unwrap();
        let support = pre_normal_support(n, m, r);
        for (i, allowed) in support.iter().enumerate() {
            for j in m as usize..nf.d[i] {
                if !coefficient(&nf.psi, &bs, i, j).is_zero() {
                    assert!(allowed.contains(&(j as u64)), "({n},{m},{r}): a_({},{j}) survives", i + 1);
                }
            }
        }
    }
}

#[test]
fn pre_normal_form_realizes_the_pattern() {
    let c = |v: i64| curva::kernel::Scalar::int(v);
    let phi = pre_normal_form(2, 3, &[vec![c(1)], vec![c(2), c(5)]]).unwrap();
    assert!(in_class(&ClassSpec::nm(2, 3, 2, 0), &phi).unwrap());
    assert_eq!(phi.branches[1].y.coeff(5), c(5));
    assert!(pre_normal_form(2, 3, &[vec![c(1), c(1)]]).is_err());
}

#[test]
fn e_profile_matches_the_order_by_order_spaces() {
    let spec = ClassSpec::nm(2, 3, 2, 9);
    let p = e_profile(&spec, 8).unwrap();
    for e in p.entries.iter().filter(|e| e.k < 8) {
        assert_eq!(e.computed, jet_subspace(&p.sample, e.k).unwrap().dim(), "k={}", e.k);
    }
}

#[test]
fn dimensions_from_profiles_match_the_closed_forms() {
    for seed in 0..3 {
        for r in 5..=7 {
            assert_eq!(moduli_dimension(&ClassSpec::ordinary(r, seed)).unwrap(), ordinary_dimension(r));
        }
        for (r, dim) in [(2, 1), (3, 4)] {
            assert_eq!(moduli_dimension(&ClassSpec::nm(2, 3, r, seed)).unwrap(), dim);
        }
        for (n, m) in [(2, 5), (3, 4)] {
            let rep = moduli_report(&ClassSpec::nm(n, m, 2, seed)).unwrap();
            assert!(rep.agreement(), "{}", rep.to_json());
        }
    }
}

#[test]
fn low_orders_match_the_case_analysis() {
    for (n, m, r) in [(2, 5, 2), (3, 4, 2), (3, 5, 2), (2, 7, 1), (4, 5, 2), (3, 7, 2)] {
        let p = e_profile(&ClassSpec::nm(n, m, r, 1), m as usize + 2).unwrap();
        for e in &p.entries {
            if let Some(c) = e.closed {
                assert_eq!(e.computed, c, "({n},{m},{r}) k={}", e.k);
            }
        }
    }
}
