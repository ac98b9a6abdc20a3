//! Algebraic laws of the kernel, the group action and valuations.

mod common;

use curva::curve::{apply_group, identity_permutation, to_block_form, Multigerm};
use curva::invariants::{puiseux_block_form, valuation, value_set, Kind};
use curva::kernel::{implicit_resultant, rank, vadd, vge, vinf, BiPoly, ExtNat, Matrix, Scalar, Series, EXACT};
use curva::CurvaError;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{corpus, random_a, shuffled};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| &Scalar::ratio(a, b) + &(&Scalar::ratio(c, d) * &Scalar::i()))
}

fn nonzero_scalar() -> impl Strategy<Value = Scalar> {
    scalar().prop_filter("nonzero", |s| !s.is_zero())
}

fn series(trunc: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec((0..trunc, scalar()), 0..6).prop_map(move |ts| {
        let mut s = Series::zero(trunc);
        for (e, c) in ts {
            s = s.add(&Series::monomial(c, e));
        }
        s
    })
}

/// ρ = c·t + higher, known below t^trunc.
fn reparam(trunc: usize) -> impl Strategy<Value = Series> {
    (nonzero_scalar(), series(trunc)).prop_map(move |(c, s)| {
        let higher = s.truncate(trunc).terms().filter(|(e, _)| *e >= 2).map(|(e, c)| (e, c.clone())).collect::<Vec<_>>();
        Series::new(std::iter::once((1, c)).chain(higher), trunc)
    })
}

fn int_poly(max_deg: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(-3i64..=3, max_deg).prop_map(|cs| {
        let terms: Vec<(usize, i64)> = cs.into_iter().enumerate().map(|(e, c)| (e + 1, c)).collect();
        Series::from_ints(&terms)
    })
}

/// h ∈ 𝓜 with total degree below 4.
fn bipoly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(-3i64..=3, 9).prop_map(|cs| {
        let monos = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];
        let terms: Vec<(usize, usize, i64)> = monos.iter().zip(cs).map(|(&(a, b), c)| (a, b, c)).collect();
        BiPoly::from_ints(&terms)
    })
}

fn ext() -> impl Strategy<Value = ExtNat> {
    prop_oneof![4 => (0u64..50).prop_map(ExtNat::Fin), 1 => Just(ExtNat::Inf)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if let Some(ai) = a.inv() {
            prop_assert!((&a * &ai).is_one());
        } else {
            prop_assert!(a.is_zero());
        }
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn extended_naturals(x in ext(), y in ext(), n in 0u64..1000) {
        prop_assert_eq!(ExtNat::Inf + ExtNat::Fin(n), ExtNat::Inf);
        prop_assert_eq!(ExtNat::Inf.min(ExtNat::Fin(n)), ExtNat::Fin(n));
        prop_assert!(ExtNat::Inf > ExtNat::Fin(n));
        prop_assert_eq!(x + y, y + x);
        prop_assert!(x + y >= x.max(y));
    }

    #[test]
    fn order_is_additive(a in series(10), b in series(10)) {
        let p = a.mul(&b);
        if let (Some(oa), Some(ob)) = (a.ord(), b.ord()) {
            if oa + ob < p.trunc() {
                prop_assert_eq!(p.ord(), Some(oa + ob));
            }
        }
    }

    #[test]
    fn reversion_inverts(rho in reparam(9)) {
        let inv = rho.reversion(9).unwrap();
        let t = Series::t().truncate(9);
        prop_assert_eq!(inv.compose(&rho).unwrap().truncate(9), t.clone());
        prop_assert_eq!(rho.compose(&inv).unwrap().truncate(9), t);
    }

    #[test]
    fn rank_ignores_row_order(
        rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 4)
            .prop_flat_map(|m| (Just(m.clone()), Just(m).prop_shuffle()))
    ) {
        let to_matrix = |m: &Vec<Vec<i64>>| -> Matrix {
            m.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect()
        };
        prop_assert_eq!(rank(&to_matrix(&rows.0)), rank(&to_matrix(&rows.1)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resultant_vanishes_on_the_parametrization(x in int_poly(3), y in int_poly(3)) {
        prop_assume!(x.ord().is_some() && y.ord().is_some());
        let f = implicit_resultant(&x, &y).unwrap();
        prop_assert!(f.pullback(&x, &y, EXACT).is_zero());
    }

    #[test]
    fn valuations_multiply_and_are_ultrametric(
        name in prop::sample::select(vec!["cusp", "tacnode", "line_and_cusp", "nm23_pair"]),
        h1 in bipoly(),
        h2 in bipoly(),
    ) {
        let phi = corpus(name);
        let v = |h: &BiPoly| match valuation(&phi, h) {
            Ok(v) => Some(v),
            Err(CurvaError::Precision(_)) => None,
            Err(e) => panic!("{e}"),
        };
        if let (Some(a), Some(b), Some(ab)) = (v(&h1), v(&h2), v(&h1.mul(&h2))) {
            prop_assert_eq!(ab, vadd(&a, &b));
        }
        if let (Some(a), Some(b), Some(s)) = (v(&h1), v(&h2), v(&h1.add(&h2))) {
            prop_assert!(vge(&s, &vinf(&a, &b)));
            for i in 0..phi.r() {
                if a[i] != b[i] {
                    prop_assert_eq!(s[i], a[i].min(b[i]));
                }
            }
        }
    }
}

fn seeded_move(phi: &Multigerm, seed: u64) -> (Multigerm, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_a(&mut rng, phi.r(), 3);
    let pi = shuffled(&mut rng, phi.r());
    (apply_group(phi, &g, &pi).unwrap(), pi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn group_action_composes(name in prop::sample::select(vec!["cusp", "tacnode", "line_and_cusp", "four_lines"]), seed in any::<u64>()) {
        let phi = corpus(name);
        let r = phi.r();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_a(&mut rng, r, 3);
        let h = random_a(&mut rng, r, 3);
        let id = identity_permutation(r);
        let cap = phi.truncs().into_iter().max().unwrap() + 1;
        let twice = apply_group(&apply_group(&phi, &h, &id).unwrap(), &g, &id).unwrap();
        let once = apply_group(&phi, &g.after(&h, cap).unwrap(), &id).unwrap();
        for (a, b) in twice.branches.iter().zip(&once.branches) {
            let t = a.trunc().min(b.trunc());
            prop_assert_eq!(a.truncate(t), b.truncate(t));
        }
    }

    #[test]
    fn block_form_is_valid_and_keeps_gamma(name in prop::sample::select(vec!["tacnode", "line_and_cusp", "four_lines", "nm23_pair", "zariski"]), seed in any::<u64>()) {
        let phi = corpus(name);
        let (moved, _) = seeded_move(&phi, seed);
        let (bf, _, pi) = to_block_form(&moved).unwrap();
        let bs = bf.block_structure().unwrap();
        let n = bf.multiplicities();
        for j in 0..bs.s() {
            let range = bs.range(j);
            prop_assert!(n[range.clone()].windows(2).all(|w| w[0] <= w[1]));
        }
        let reordered = apply_group(&moved, &curva::curve::GroupElement::identity(moved.r()), &pi).unwrap();
        prop_assert_eq!(value_set(&bf, Kind::Gamma).unwrap().members, value_set(&reordered, Kind::Gamma).unwrap().members);

        // Puiseux block form: one monomial coordinate, same slopes and Γ
        let (pb, _) = puiseux_block_form(&bf).unwrap();
        prop_assert_eq!(pb.multiplicities(), n.clone());
        prop_assert_eq!(pb.slopes(), bf.slopes());
        for (i, b) in pb.branches.iter().enumerate() {
            let mono = if bs.in_b2(i) { &b.y } else { &b.x };
            prop_assert_eq!(mono.num_terms(), 1);
            prop_assert_eq!(mono.ord(), Some(n[i]));
        }
        prop_assert_eq!(value_set(&pb, Kind::Gamma).unwrap().members, value_set(&bf, Kind::Gamma).unwrap().members);
    }
}

#[test]
fn scalar_one_and_zero() {
    assert!(Scalar::one().is_one());
    assert!(Scalar::zero().inv().is_none());
}
