//! Post-processing of a decomposition: filtration export, joist statistics,
//! truss sizes, and the classic graph truss used as a baseline.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{self, Write};

use crate::complex::SimplicialComplex;
use crate::engine::Decomposition;
use crate::engine::TrussnessMap;
use crate::error::{Error, Result};
use crate::joists::JoistMap;
use crate::simplex::{Simplex, VertexId};

/// Simplices with their filtration values, in filtration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Filtration(pub Vec<(u32, Simplex)>);

impl Filtration {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn write<W: Write>(&self, complex: &SimplicialComplex, out: &mut W) -> io::Result<()> {
        for (value, s) in &self.0 {
            writeln!(out, "{value}\t{}", complex.format_simplex(s))?;
        }
        Ok(())
    }

    /// True when every proper face of each entry appears strictly earlier.
    pub fn faces_precede(&self) -> bool {
        let mut seen: HashSet<&Simplex> = HashSet::with_capacity(self.0.len());
        for (_, s) in &self.0 {
            if s.len() > 1 && !(0..s.len()).all(|pos| seen.contains(&s.without(pos))) {
                return false;
            }
            seen.insert(s);
        }
        true
    }
}

/// Reverses the decomposition into a filtration: vertices enter at 0 and a
/// simplex of trussness `t` at `K - t`, where `K` is the largest trussness.
/// Entries are ordered by (value, dimension, lexicographic).
pub fn export_filtration(complex: &SimplicialComplex, decomposition: &Decomposition) -> Result<Filtration> {
    filtration_from(complex, &decomposition.trussness, decomposition.max_size)
}

/// As [`export_filtration`], for simplices of size up to `max_size`.
pub fn filtration_from(
    complex: &SimplicialComplex,
    tr: &TrussnessMap,
    max_size: usize,
) -> Result<Filtration> {
    let top = tr.max_trussness();
    let mut entries = Vec::new();
    for v in complex.vertices() {
        entries.push((0, Simplex::from_sorted(vec![v])));
    }
    for q in 2..=max_size.min(complex.max_size()) {
        for s in complex.faces_of_size(q) {
            let t = tr.tr(&s).ok_or_else(|| {
                Error::MissingTrussness(format!("[{}]", complex.format_simplex(&s)))
            })?;
            entries.push((top - t, s));
        }
    }
    entries.sort_unstable_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    Ok(Filtration(entries))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ComplexStats {
    pub total_joists: usize,
    pub open_joists: usize,
    /// Open joists whose vertex set is a triangle.
    pub open_triangles: usize,
    pub non_trivial_count: usize,
    pub total_simplices: usize,
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

impl ComplexStats {
    pub fn open_joists_pct(&self) -> f64 {
        percent(self.open_joists, self.total_joists)
    }

    pub fn non_trivial_pct(&self) -> f64 {
        percent(self.non_trivial_count, self.total_simplices)
    }

    pub const TSV_HEADER: &'static str = "total_joists\topen_joists\topen_joists_pct\topen_triangles\tnon_trivial\tnon_trivial_pct\ttotal_simplices";

    /// Header line and one record.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", Self::TSV_HEADER).unwrap();
        writeln!(
            s,
            "{}\t{}\t{:.2}\t{}\t{}\t{:.2}\t{}",
            self.total_joists,
            self.open_joists,
            self.open_joists_pct(),
            self.open_triangles,
            self.non_trivial_count,
            self.non_trivial_pct(),
            self.total_simplices
        )
        .unwrap();
        s
    }
}

/// A joist is open when its full vertex set is not a simplex of `complex`.
pub fn joist_stats(complex: &SimplicialComplex, tr: &TrussnessMap, joists: &[JoistMap]) -> ComplexStats {
    let mut stats = ComplexStats::default();
    for level in joists {
        for w in level.joist_vertex_sets() {
            stats.total_joists += 1;
            if !complex.contains(&w) {
                stats.open_joists += 1;
                if w.len() == 3 {
                    stats.open_triangles += 1;
                }
            }
        }
    }
    stats.total_simplices = tr.len();
    stats.non_trivial_count = tr.iter().filter(|(_, t)| !t.is_trivial()).count();
    stats
}

/// `k -> |T_k|` for `k = 1..=K`.
pub fn truss_sizes(tr: &TrussnessMap) -> BTreeMap<u32, usize> {
    let mut hist: BTreeMap<u32, usize> = BTreeMap::new();
    for (_, t) in tr.iter() {
        *hist.entry(t.tr).or_default() += 1;
    }
    let top = tr.max_trussness();
    let mut out = BTreeMap::new();
    let mut acc = 0;
    for k in (1..=top).rev() {
        acc += hist.get(&k).copied().unwrap_or(0);
        out.insert(k, acc);
    }
    out
}

/// Classic edge trussness, counting `k` supporting triangles: each edge gets
/// the largest `k` such that it lies in a subgraph where every edge is in at
/// least `k` triangles.
pub fn graph_trussness(edges: &[(VertexId, VertexId)]) -> BTreeMap<(VertexId, VertexId), u32> {
    let norm = |a: VertexId, b: VertexId| if a < b { (a, b) } else { (b, a) };
    let mut adj: HashMap<VertexId, HashSet<VertexId>> = HashMap::new();
    for &(a, b) in edges {
        if a != b {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
    }
    let mut support: BTreeMap<(VertexId, VertexId), u32> = BTreeMap::new();
    for (&a, na) in &adj {
        for &b in na {
            if a < b {
                let common = na.intersection(&adj[&b]).count() as u32;
                support.insert((a, b), common);
            }
        }
    }
    let mut result = BTreeMap::new();
    let mut bins: BTreeMap<u32, std::collections::BTreeSet<(VertexId, VertexId)>> = BTreeMap::new();
    for (&e, &s) in &support {
        bins.entry(s).or_default().insert(e);
    }
    while let Some(mut entry) = bins.first_entry() {
        let k = *entry.key();
        let e = entry.get_mut().pop_first().expect("non-empty bin");
        if entry.get().is_empty() {
            entry.remove();
        }
        result.insert(e, k);
        support.remove(&e);
        let (a, b) = e;
        let common: Vec<VertexId> = adj[&a].intersection(&adj[&b]).copied().collect();
        for c in common {
            for f in [norm(a, c), norm(b, c)] {
                let s = support[&f];
                if s > k {
                    bins.get_mut(&s).unwrap().remove(&f);
                    if bins[&s].is_empty() {
                        bins.remove(&s);
                    }
                    support.insert(f, s - 1);
                    bins.entry(s - 1).or_default().insert(f);
                }
            }
        }
        adj.get_mut(&a).unwrap().remove(&b);
        adj.get_mut(&b).unwrap().remove(&a);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{decompose, DecomposeOptions};
    use crate::simplex;

    fn fig1() -> SimplicialComplex {
        SimplicialComplex::parse("0 1 2 3\n2 3 5\n2 3 4").unwrap()
    }

    fn k5() -> SimplicialComplex {
        let mut text = String::new();
        for a in 0..5 {
            for b in a + 1..5 {
                text.push_str(&format!("{a} {b}\n"));
            }
        }
        SimplicialComplex::parse(&text).unwrap()
    }

    fn run(k: &SimplicialComplex) -> Decomposition {
        decompose(
            k,
            &DecomposeOptions {
                retain_joists: true,
                ..DecomposeOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn figure_one_filtration() {
        let k = fig1();
        let f = export_filtration(&k, &run(&k)).unwrap();
        assert!(f.faces_precede());
        let value = |s: Simplex| f.0.iter().find(|(_, t)| *t == s).unwrap().0;
        assert_eq!(value(simplex![4]), 0);
        assert_eq!(value(simplex![0, 1]), 0);
        assert_eq!(value(simplex![2, 4]), 1);
        assert_eq!(value(simplex![0, 1, 2]), 1);
        assert_eq!(value(simplex![2, 3, 5]), 2);
        assert_eq!(value(simplex![0, 1, 2, 3]), 2);
        assert_eq!(f.len(), 6 + 10 + 6 + 1);
    }

    #[test]
    fn filled_triangle_filtration() {
        let k = SimplicialComplex::parse("0 1 2").unwrap();
        let f = export_filtration(&k, &run(&k)).unwrap();
        let mut text = Vec::new();
        f.write(&k, &mut text).unwrap();
        assert_eq!(
            String::from_utf8(text).unwrap(),
            "0\t0\n0\t1\n0\t2\n0\t0 1\n0\t0 2\n0\t1 2\n1\t0 1 2\n"
        );
        let empty = SimplicialComplex::empty();
        assert!(export_filtration(&empty, &run(&empty)).unwrap().is_empty());
    }

    #[test]
    fn missing_trussness_is_an_error() {
        let k = fig1();
        assert!(matches!(
            filtration_from(&k, &TrussnessMap::new(), 4),
            Err(Error::MissingTrussness(_))
        ));
    }

    #[test]
    fn faces_precede_detects_disorder() {
        let bad = Filtration(vec![(0, simplex![0]), (0, simplex![0, 1]), (0, simplex![1])]);
        assert!(!bad.faces_precede());
    }

    #[test]
    fn stats_examples() {
        let k = k5();
        let d = run(&k);
        let s = joist_stats(&k, &d.trussness, &d.joists);
        assert_eq!((s.total_joists, s.open_joists, s.open_triangles), (10, 10, 10));
        assert_eq!(s.open_joists_pct(), 100.0);
        assert_eq!(s.non_trivial_pct(), 100.0);

        let k = fig1();
        let d = run(&k);
        let s = joist_stats(&k, &d.trussness, &d.joists);
        assert_eq!((s.total_joists, s.open_joists), (7, 0));
        assert_eq!(s.non_trivial_count, 0);

        let k = SimplicialComplex::parse("0 1 2").unwrap();
        let d = run(&k);
        let s = joist_stats(&k, &d.trussness, &d.joists);
        assert_eq!((s.total_joists, s.open_joists, s.non_trivial_count), (1, 0, 0));
        assert!(s.to_tsv().starts_with(ComplexStats::TSV_HEADER));
    }

    #[test]
    fn sizes() {
        let d = run(&fig1());
        assert_eq!(truss_sizes(&d.trussness), BTreeMap::from([(1, 14), (2, 6)]));
        let d = run(&k5());
        assert_eq!(truss_sizes(&d.trussness), BTreeMap::from([(1, 10), (2, 10), (3, 10)]));
        assert!(truss_sizes(&TrussnessMap::new()).is_empty());
    }

    #[test]
    fn classic_truss() {
        let g = graph_trussness(&fig1().one_skeleton());
        for (e, t) in &g {
            let expected = if e.0 <= 3 && e.1 <= 3 { 2 } else { 1 };
            assert_eq!(*t, expected, "edge {e:?}");
        }
        assert_eq!(g.len(), 10);
        assert!(graph_trussness(&k5().one_skeleton()).values().all(|&t| t == 3));
        let tree = [(0, 1), (1, 2), (1, 3), (3, 4)];
        assert!(graph_trussness(&tree).values().all(|&t| t == 0));
    }
}
