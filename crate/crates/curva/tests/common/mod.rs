//! Fixtures shared by the integration tests: corpus curves and seeded
//! random group elements.
#![allow(dead_code)]

use std::path::PathBuf;

use curva::curve::{Flavor, GroupElement, Multigerm};
use curva::kernel::{BiPoly, Scalar, Series};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> Multigerm {
    let path = corpus_dir().join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    Multigerm::parse(&text).unwrap()
}

fn small(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::int(rng.gen_range(-3..=3))
}

fn nonzero(rng: &mut ChaCha8Rng) -> i64 {
    loop {
        let u = rng.gen_range(-3..=3);
        if u != 0 {
            return u;
        }
    }
}

/// Linear part plus random terms of total degree 2..cap.
fn target_poly(rng: &mut ChaCha8Rng, linear: BiPoly, cap: usize) -> BiPoly {
    let mut p = linear;
    for i in 0..cap {
        for j in 0..cap - i {
            if i + j >= 2 {
                p = p.add(&BiPoly::monomial(i, j).scale(&small(rng)));
            }
        }
    }
    p
}

fn reparams(rng: &mut ChaCha8Rng, r: usize, cap: usize, unipotent: bool) -> Vec<Series> {
    (0..r)
        .map(|_| {
            let lead = if unipotent { 1 } else { nonzero(rng) };
            let mut s = Series::monomial(Scalar::int(lead), 1);
            for e in 2..cap {
                s = s.add(&Series::monomial(small(rng), e));
            }
            s
        })
        .collect()
}

/// A random element of 𝒜 with an invertible linear part.
pub fn random_a(rng: &mut ChaCha8Rng, r: usize, cap: usize) -> GroupElement {
    let (a, b, c, d) = loop {
        let v: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        if v[0] * v[3] - v[1] * v[2] != 0 {
            break (v[0], v[1], v[2], v[3]);
        }
    };
    let s1 = target_poly(rng, BiPoly::from_ints(&[(1, 0, a), (0, 1, b)]), cap);
    let s2 = target_poly(rng, BiPoly::from_ints(&[(1, 0, c), (0, 1, d)]), cap);
    GroupElement { reparams: reparams(rng, r, cap, false), target: [s1, s2], flavor: Flavor::A }
}

/// A random element of the working subgroup for a germ with s blocks:
/// unipotent reparametrizations, σ tangent to the identity, and for s ≤ 1
/// an extra X ↦ X + βY.
pub fn random_g(rng: &mut ChaCha8Rng, r: usize, s: usize, cap: usize) -> GroupElement {
    let beta = if s <= 1 { rng.gen_range(-3..=3) } else { 0 };
    let s1 = target_poly(rng, BiPoly::from_ints(&[(1, 0, 1), (0, 1, beta)]), cap);
    let s2 = target_poly(rng, BiPoly::y(), cap);
    let flavor = if s <= 1 { Flavor::A1Tilde } else { Flavor::A1 };
    GroupElement { reparams: reparams(rng, r, cap, true), target: [s1, s2], flavor }
}

pub fn shuffled(rng: &mut ChaCha8Rng, r: usize) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..r).collect();
    pi.shuffle(rng);
    pi
}
