#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use simtruss::engine::{decompose, DecomposeOptions, Trussness};
use simtruss::{Decomposition, SimplicialComplex};

pub const FIG1: &str = "0 1 2 3\n2 3 5\n2 3 4\n";

pub fn fig1() -> SimplicialComplex {
    SimplicialComplex::parse(FIG1).unwrap()
}

pub fn k5_edges() -> SimplicialComplex {
    let mut text = String::new();
    for a in 0..5 {
        for b in a + 1..5 {
            text.push_str(&format!("{a} {b}\n"));
        }
    }
    SimplicialComplex::parse(&text).unwrap()
}

/// Random complex over `0..vertices` with up to `max_simplices` maximal
/// simplices of size `1..=max_size`.
pub fn random_complex<R: Rng>(
    rng: &mut R,
    vertices: u64,
    max_simplices: usize,
    max_size: usize,
) -> SimplicialComplex {
    let count = rng.gen_range(1..=max_simplices);
    let sets = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=max_size.min(vertices as usize));
            let mut s = BTreeSet::new();
            while s.len() < size {
                s.insert(rng.gen_range(0..vertices));
            }
            s.into_iter().collect()
        })
        .collect();
    SimplicialComplex::from_labeled(sets)
}

pub fn complex_strategy(
    vertices: u64,
    max_simplices: usize,
    max_size: usize,
) -> impl Strategy<Value = SimplicialComplex> {
    prop::collection::vec(
        prop::collection::btree_set(0..vertices, 1..=max_size),
        1..=max_simplices,
    )
    .prop_map(|sets| SimplicialComplex::from_labeled(sets.into_iter().map(|s| s.into_iter().collect()).collect()))
}

pub fn full(complex: &SimplicialComplex) -> Decomposition {
    decompose(
        complex,
        &DecomposeOptions {
            retain_joists: true,
            ..DecomposeOptions::default()
        },
    )
    .unwrap()
}

/// Labeled view of a trussness map: `(labels, tr, lb)` rows in output order.
pub fn labeled_rows(complex: &SimplicialComplex, d: &Decomposition) -> Vec<(Vec<u64>, Trussness)> {
    d.trussness
        .iter()
        .map(|(s, t)| (complex.labeled(s), t))
        .collect()
}
