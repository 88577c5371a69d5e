mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use simtruss::analysis::{export_filtration, truss_sizes};
use simtruss::complex::extend_simplices;
use simtruss::engine::{decompose, trusses, DecomposeOptions};
use simtruss::joists::{find_joists, SpillConfig};
use simtruss::{Simplex, SimplicialComplex};

use common::*;

/// Every simplex of the complex up to `max` vertices, by brute enumeration
/// of subsets of each maximal simplex.
fn closure(k: &SimplicialComplex, max: usize) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    for m in k.maximal_simplices() {
        let v = m.vertices();
        for mask in 1u32..(1 << v.len()) {
            if mask.count_ones() as usize <= max {
                out.insert((0..v.len()).filter(|i| mask & (1 << i) != 0).map(|i| v[i]).collect());
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_serialize_is_idempotent(k in complex_strategy(15, 8, 5)) {
        let again = SimplicialComplex::parse(&k.to_text()).unwrap();
        prop_assert_eq!(again.to_text(), k.to_text());
        // no maximal simplex contains another
        let m = k.maximal_simplices();
        for a in m {
            for b in m {
                prop_assert!(a == b || !a.is_subset_of(b.vertices()));
            }
        }
    }

    #[test]
    fn membership_matches_enumeration(k in complex_strategy(8, 5, 5), probe in prop::collection::btree_set(0u32..8, 1..=4)) {
        let members = closure(&k, 5);
        let probe: Vec<u32> = probe.into_iter().filter(|&v| (v as usize) < k.num_vertices()).collect();
        prop_assume!(!probe.is_empty());
        let s = Simplex::new(probe.clone()).unwrap();
        prop_assert_eq!(k.contains(&s), members.contains(&probe));
    }

    #[test]
    fn extension_is_sound_and_complete(k in complex_strategy(10, 6, 5)) {
        let edges = extend_simplices(&[], &k, 2).unwrap();
        let expected: Vec<Vec<u32>> = closure(&k, 2).into_iter().filter(|s| s.len() == 2).collect();
        prop_assert_eq!(edges.iter().map(|e| e.vertices().to_vec()).collect::<Vec<_>>(), expected);
        let tris = extend_simplices(&edges, &k, 3).unwrap();
        for t in &tris {
            prop_assert!(k.contains(t));
        }
        prop_assert_eq!(tris.len(), closure(&k, 3).iter().filter(|s| s.len() == 3).count());
    }

    #[test]
    fn components_partition_the_complex(k in complex_strategy(14, 8, 4)) {
        let comps = k.connected_components();
        let total: usize = comps.iter().map(|c| c.maximal_simplices().len()).sum();
        prop_assert_eq!(total, k.maximal_simplices().len());
        let mut owner = BTreeMap::new();
        for (i, c) in comps.iter().enumerate() {
            for v in c.vertices() {
                prop_assert!(owner.insert(v, i).is_none(), "vertex in two components");
            }
        }
        for (a, b) in k.one_skeleton() {
            prop_assert_eq!(owner[&a], owner[&b]);
        }
    }

    #[test]
    fn apex_symmetry(k in complex_strategy(9, 6, 5), q in 2usize..=4) {
        let level = k.faces_of_size(q);
        let (j, _) = find_joists(level.clone(), SpillConfig::default()).unwrap();
        let members: BTreeSet<&Simplex> = level.iter().collect();
        for s in &level {
            for &w in j.apexes(s).unwrap() {
                prop_assert!(!s.contains_vertex(w));
                let full = s.with(w);
                for pos in 0..full.len() {
                    let tau = full.without(pos);
                    prop_assert!(members.contains(&tau));
                    prop_assert!(j.apexes(&tau).unwrap().contains(&full.vertices()[pos]));
                }
            }
        }
    }

    #[test]
    fn decomposition_properties(k in complex_strategy(10, 7, 5)) {
        let d = full(&k);
        let tr = &d.trussness;
        // containment of the truss sequence
        let seq = trusses(tr);
        for w in seq.windows(2) {
            prop_assert!(w[1].is_subset(&w[0]));
        }
        if let Some(last) = seq.last() {
            prop_assert!(!last.is_empty());
        }
        // a-priori: faces never have lower trussness
        for (s, t) in tr.iter() {
            if s.len() > 2 {
                for pos in 0..s.len() {
                    prop_assert!(tr.tr(&s.without(pos)).unwrap() >= t.tr);
                }
            }
        }
        // bound sandwich against the initial joist count
        for j in &d.joists {
            for s in j.simplices() {
                let t = tr.get(s).unwrap();
                prop_assert!(t.lb <= t.tr);
                prop_assert!(t.tr as usize <= j.apexes(s).unwrap().len());
            }
        }
        // truss sizes are non-increasing
        let sizes: Vec<usize> = truss_sizes(tr).into_values().collect();
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        // filtration respects faces
        prop_assert!(export_filtration(&k, &d).unwrap().faces_precede());
    }

    #[test]
    fn relabeling_permutes_the_output(k in complex_strategy(10, 6, 5), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<u64> = (0..10).map(|i| i * 7 + 3).collect();
        perm.shuffle(&mut rng);
        let relabeled = SimplicialComplex::from_labeled(
            k.maximal_simplices().iter().map(|s| k.labeled(s).iter().map(|&l| perm[l as usize]).collect()).collect(),
        );
        let a: BTreeMap<BTreeSet<u64>, (u32, u32)> = labeled_rows(&k, &full(&k))
            .into_iter()
            .map(|(l, t)| (l.into_iter().map(|x| perm[x as usize]).collect(), (t.tr, t.lb)))
            .collect();
        let b: BTreeMap<BTreeSet<u64>, (u32, u32)> = labeled_rows(&relabeled, &full(&relabeled))
            .into_iter()
            .map(|(l, t)| (l.into_iter().collect(), (t.tr, t.lb)))
            .collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn output_is_independent_of_budget_and_chunks(
        k in complex_strategy(12, 8, 5),
        budget in 1u64..64,
        chunks in 1usize..9,
        parallel in 1usize..4,
    ) {
        let base = decompose(&k, &DecomposeOptions::default()).unwrap();
        let other = decompose(&k, &DecomposeOptions {
            budget: simtruss::MemoryBudget::records(budget),
            chunks,
            parallel_components: parallel,
            ..DecomposeOptions::default()
        }).unwrap();
        prop_assert_eq!(base.trussness.to_tsv(&k, true), other.trussness.to_tsv(&k, true));
    }
}

/// With edge-only input every triangle is open, so the pruning of the next
/// level never matters; with filled simplices it does. Either way the
/// decomposition of an unpruned enumeration agrees with the pruned one.
#[test]
fn pruning_does_not_change_results() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let k = random_complex(&mut rng, 9, 6, 5);
        let d = decompose(&k, &DecomposeOptions::default()).unwrap();
        for q in 2..=k.max_size() {
            let level = k.faces_of_size(q);
            let (mut j, _) = find_joists(level, SpillConfig::default()).unwrap();
            let peeled = simtruss::engine::peel_level(&mut j);
            for (i, s) in j.simplices().iter().enumerate() {
                assert_eq!(d.trussness.tr(s), Some(peeled.trussness[i]), "{s:?}");
            }
        }
    }
}
