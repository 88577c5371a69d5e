mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use simtruss::engine::{decompose, top_n, DecomposeOptions};
use simtruss::joists::{find_joists, SpillConfig};
use simtruss::oracle::{brute_joists, brute_top_n, brute_trussness};
use simtruss::MemoryBudget;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decompose_matches_brute_force(k in complex_strategy(10, 6, 5)) {
        let d = decompose(&k, &DecomposeOptions::default()).unwrap();
        let brute = brute_trussness(&k, k.max_size().max(2)).unwrap();
        let engine: BTreeMap<_, _> = d.trussness.iter().map(|(s, t)| (s.clone(), (t.tr, t.lb))).collect();
        prop_assert_eq!(engine, brute.trussness);
    }

    #[test]
    fn find_joists_matches_brute_force(k in complex_strategy(9, 6, 5), q in 2usize..=4) {
        let level = k.faces_of_size(q);
        let (j, _) = find_joists(level.clone(), SpillConfig::default()).unwrap();
        prop_assert_eq!(j.to_sets(), brute_joists(&level).unwrap());
    }

    #[test]
    fn spilled_joists_match_in_memory(
        k in complex_strategy(9, 6, 5),
        q in 2usize..=3,
        budget in 1u64..40,
        chunks in 1usize..6,
    ) {
        let level = k.faces_of_size(q);
        let (mem, mem_stats) = find_joists(level.clone(), SpillConfig::default()).unwrap();
        let (disk, disk_stats) = find_joists(level, SpillConfig {
            budget: MemoryBudget::records(budget),
            chunks,
            ..SpillConfig::default()
        }).unwrap();
        prop_assert_eq!(mem.to_sets(), disk.to_sets());
        prop_assert_eq!(mem_stats.candidates, disk_stats.candidates);
        prop_assert_eq!(disk_stats.spilled, disk_stats.candidates >= budget);
    }

    #[test]
    fn top_n_matches_brute_force(k in complex_strategy(12, 6, 5), n in 1usize..6, q in 2usize..=3) {
        let fast = top_n(&k, n, q, &DecomposeOptions::default()).unwrap();
        prop_assert_eq!(fast.rows, brute_top_n(&k, n, q).unwrap());
    }
}

/// Each candidate pair is stored once: the record count equals the number
/// of same-size pairs sharing all but one vertex whose union's largest
/// vertex is missing from exactly one side.
#[test]
fn each_pair_is_stored_at_most_once() {
    let k = k5_edges();
    let level = k.faces_of_size(2);
    let mut expected = 0u64;
    for (i, a) in level.iter().enumerate() {
        for b in &level[i + 1..] {
            if let Some((x, y)) = a.single_difference(b) {
                if x > b.last() || y > a.last() {
                    expected += 1;
                }
            }
        }
    }
    let (_, stats) = find_joists(level, SpillConfig::default()).unwrap();
    assert_eq!(stats.candidates, expected);
}
