//! Brute-force references. Nothing here uses the inverted index, bounds,
//! pruning, or the spill store; only [`Simplex`] is shared with the rest of
//! the crate.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

pub type OracleJoists = BTreeMap<Simplex, BTreeSet<VertexId>>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleResult {
    /// Per level, only simplices with at least one joist.
    pub joists: OracleJoists,
    /// `(trussness, lower bound)` of every simplex of size `2..=d`.
    pub trussness: BTreeMap<Simplex, (u32, u32)>,
}

fn all_subsets(v: &[VertexId], k: usize) -> Vec<Vec<VertexId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if v.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mut rest in all_subsets(&v[1..], k - 1) {
        rest.insert(0, v[0]);
        out.push(rest);
    }
    out.extend(all_subsets(&v[1..], k));
    out
}

/// Every vertex set of the form `σ ∪ {w}` over the vertices of `level` whose
/// cofaces are all in `level` gives each member the complementary apex.
pub fn brute_joists(level: &[Simplex]) -> Result<OracleJoists> {
    let Some(first) = level.first() else {
        return Ok(BTreeMap::new());
    };
    if level.iter().any(|s| s.len() != first.len()) {
        return Err(Error::InvalidArgument("mixed simplex sizes".into()));
    }
    let members: HashSet<Vec<VertexId>> = level.iter().map(|s| s.vertices().to_vec()).collect();
    let vertices: BTreeSet<VertexId> = level.iter().flat_map(|s| s.vertices().iter().copied()).collect();
    let mut out: OracleJoists = BTreeMap::new();
    for s in level {
        for &w in &vertices {
            if s.vertices().contains(&w) {
                continue;
            }
            let mut set = s.vertices().to_vec();
            set.push(w);
            set.sort_unstable();
            if all_subsets(&set, s.len()).iter().all(|f| members.contains(f)) {
                out.entry(s.clone()).or_default().insert(w);
            }
        }
    }
    Ok(out)
}

/// Largest `k` for which the simplex survives repeated deletion of members
/// with fewer than `k` joists inside the surviving set, level by level.
pub fn brute_trussness(complex: &SimplicialComplex, d: usize) -> Result<OracleResult> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("max size must be at least 2, got {d}")));
    }
    let mut result = OracleResult::default();
    let maximal: Vec<Vec<VertexId>> = complex
        .maximal_simplices()
        .iter()
        .map(|s| s.vertices().to_vec())
        .collect();
    for q in 2..=d {
        let mut level: BTreeSet<Vec<VertexId>> = BTreeSet::new();
        for m in &maximal {
            level.extend(all_subsets(m, q));
        }
        if level.is_empty() {
            break;
        }
        let simplices: Vec<Simplex> = level.iter().map(|v| Simplex::from_sorted(v.clone())).collect();
        let joists = brute_joists(&simplices)?;
        for s in &simplices {
            let lb = maximal
                .iter()
                .filter(|m| s.vertices().iter().all(|v| m.contains(v)))
                .map(|m| m.len() - q)
                .max()
                .expect("level simplex lies in a maximal simplex") as u32;
            result.trussness.insert(s.clone(), (0, lb));
        }
        let mut k = 1;
        loop {
            let mut alive: BTreeSet<&Simplex> = simplices.iter().collect();
            loop {
                let dead: Vec<&Simplex> = alive
                    .iter()
                    .copied()
                    .filter(|s| {
                        let inside = joists.get(*s).map_or(0, |ws| {
                            ws.iter()
                                .filter(|&&w| {
                                    let set = s.with(w);
                                    (0..set.len()).all(|p| alive.contains(&set.without(p)))
                                })
                                .count()
                        });
                        inside < k
                    })
                    .collect();
                if dead.is_empty() {
                    break;
                }
                for s in dead {
                    alive.remove(s);
                }
            }
            if alive.is_empty() {
                break;
            }
            for s in alive {
                result.trussness.get_mut(s).unwrap().0 = k as u32;
            }
            k += 1;
        }
        result.joists.extend(joists);
    }
    Ok(result)
}

/// Brute trussness of the size-`q` simplices, ordered by trussness
/// descending then lexicographically, first `n`.
pub fn brute_top_n(complex: &SimplicialComplex, n: usize, q: usize) -> Result<Vec<(Simplex, u32)>> {
    let r = brute_trussness(complex, q)?;
    let mut rows: Vec<(Simplex, u32)> = r
        .trussness
        .into_iter()
        .filter(|(s, _)| s.len() == q)
        .map(|(s, (t, _))| (s, t))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(n);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex;

    fn fig1() -> SimplicialComplex {
        SimplicialComplex::parse("0 1 2 3\n2 3 5\n2 3 4").unwrap()
    }

    #[test]
    fn figure_one_joist_counts() {
        let edges = fig1().faces_of_size(2);
        let j = brute_joists(&edges).unwrap();
        let count = |s: Simplex| j.get(&s).map_or(0, BTreeSet::len);
        assert_eq!(count(simplex![2, 3]), 4);
        assert_eq!(j[&simplex![2, 3]], BTreeSet::from([0, 1, 4, 5]));
        assert_eq!(count(simplex![2, 4]), 1);
        assert_eq!(count(simplex![0, 1]), 2);
    }

    #[test]
    fn four_clique_minus_edge() {
        let level = vec![simplex![1, 2], simplex![1, 3], simplex![1, 4], simplex![2, 3], simplex![2, 4]];
        let j = brute_joists(&level).unwrap();
        assert_eq!(j[&simplex![1, 2]], BTreeSet::from([3, 4]));
        assert_eq!(j[&simplex![1, 3]], BTreeSet::from([2]));
        assert_eq!(j.len(), 5);
        assert!(brute_joists(&[simplex![1, 2]]).unwrap().is_empty());
        assert!(brute_joists(&[simplex![1, 2], simplex![1]]).is_err());
    }

    #[test]
    fn figure_one_trussness() {
        let r = brute_trussness(&fig1(), 4).unwrap();
        assert_eq!(r.trussness[&simplex![2, 3]], (2, 2));
        assert_eq!(r.trussness[&simplex![2, 5]], (1, 1));
        assert_eq!(r.trussness[&simplex![0, 1, 2]], (1, 1));
        assert_eq!(r.trussness[&simplex![2, 3, 4]], (0, 0));
        assert_eq!(r.trussness[&simplex![0, 1, 2, 3]], (0, 0));
        assert_eq!(r.trussness.len(), 17);
    }

    #[test]
    fn k5_and_path() {
        let mut text = String::new();
        for a in 0..5 {
            for b in a + 1..5 {
                text.push_str(&format!("{a} {b}\n"));
            }
        }
        let r = brute_trussness(&SimplicialComplex::parse(&text).unwrap(), 5).unwrap();
        assert!(r.trussness.values().all(|&t| t == (3, 0)));
        let path = SimplicialComplex::parse("0 1\n1 2").unwrap();
        let r = brute_trussness(&path, 3).unwrap();
        assert!(r.trussness.values().all(|&t| t.0 == 0));
    }

    #[test]
    fn top_n_examples() {
        assert_eq!(brute_top_n(&fig1(), 1, 2).unwrap(), vec![(simplex![0, 1], 2)]);
        let all = brute_top_n(&fig1(), 10, 3).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], (simplex![0, 1, 2], 1));
        assert_eq!(all[5], (simplex![2, 3, 5], 0));
        assert!(brute_top_n(&SimplicialComplex::empty(), 3, 2).unwrap().is_empty());
    }
}
