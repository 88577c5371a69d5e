//! Complex representation: explicit maximal simplices plus a vertex index.
//!
//! Membership is implicit: a simplex belongs to the complex iff it is a
//! subset of some maximal simplex. External vertex labels are arbitrary
//! `u64`s; internally vertices are renumbered densely in ascending label
//! order, so the lexicographic order of simplices is the same in both
//! numberings.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    labels: Arc<[u64]>,
    maximal: Vec<Simplex>,
    /// vertex -> ascending ids of the maximal simplices containing it
    vertex_index: HashMap<VertexId, Vec<u32>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.maximal.len() == other.maximal.len()
            && self
                .maximal
                .iter()
                .zip(&other.maximal)
                .all(|(a, b)| self.labeled(a) == other.labeled(b))
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex {
            labels: Arc::from(Vec::new()),
            maximal: Vec::new(),
            vertex_index: HashMap::new(),
        }
    }

    /// Parses the text format: one maximal simplex per line as
    /// whitespace-separated decimal vertex labels, `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut vertices = Vec::new();
            for tok in line.split_whitespace() {
                let v: u64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("malformed vertex id {tok:?}"),
                })?;
                vertices.push(v);
            }
            let mut sorted = vertices.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("duplicate vertex {}", w[0]),
                });
            }
            lines.push(sorted);
        }
        Ok(Self::from_labeled(lines))
    }

    /// Builds a complex from labeled vertex sets (each must be duplicate
    /// free). Subsumed and repeated sets are dropped.
    pub fn from_labeled(sets: Vec<Vec<u64>>) -> Self {
        let mut labels: Vec<u64> = sets.iter().flatten().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        let simplices = sets
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| {
                let ids = s
                    .iter()
                    .map(|l| labels.binary_search(l).unwrap() as VertexId)
                    .collect();
                Simplex::new(ids).expect("duplicate-free input")
            })
            .collect();
        Self::build(Arc::from(labels), simplices)
    }

    /// Builds a complex whose labels equal the internal ids `0..n`, where
    /// `n` is one past the largest vertex used.
    pub fn from_simplices(simplices: impl IntoIterator<Item = Simplex>) -> Self {
        let simplices: Vec<Simplex> = simplices.into_iter().collect();
        let n = simplices
            .iter()
            .map(|s| s.last() as u64 + 1)
            .max()
            .unwrap_or(0);
        Self::build(Arc::from((0..n).collect::<Vec<_>>()), simplices)
    }

    fn build(labels: Arc<[u64]>, mut candidates: Vec<Simplex>) -> Self {
        candidates.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        candidates.dedup();
        let mut kept: Vec<Simplex> = Vec::new();
        let mut index: HashMap<VertexId, Vec<u32>> = HashMap::new();
        for s in candidates {
            if !containing_in(&index, &kept, &s).is_empty() {
                continue;
            }
            let id = kept.len() as u32;
            for &v in s.vertices() {
                index.entry(v).or_default().push(id);
            }
            kept.push(s);
        }
        kept.sort_unstable();
        let mut vertex_index: HashMap<VertexId, Vec<u32>> = HashMap::new();
        for (id, s) in kept.iter().enumerate() {
            for &v in s.vertices() {
                vertex_index.entry(v).or_default().push(id as u32);
            }
        }
        SimplicialComplex {
            labels,
            maximal: kept,
            vertex_index,
        }
    }

    fn with_maximal(&self, maximal: Vec<Simplex>) -> Self {
        Self::build(self.labels.clone(), maximal)
    }

    /// Maximal simplices in (size, lexicographic) order.
    pub fn maximal_simplices(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn is_empty(&self) -> bool {
        self.maximal.is_empty()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_index.len()
    }

    /// Ascending internal ids of the vertices present in this complex.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self.vertex_index.keys().copied().collect();
        v.sort_unstable();
        v
    }

    /// Size of the largest maximal simplex, 0 for the empty complex.
    pub fn max_size(&self) -> usize {
        self.maximal.iter().map(Simplex::len).max().unwrap_or(0)
    }

    /// External label of an internal vertex id.
    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v as usize]
    }

    /// Internal id of an external label, if the label is known.
    pub fn vertex_of(&self, label: u64) -> Option<VertexId> {
        self.labels.binary_search(&label).ok().map(|i| i as VertexId)
    }

    /// Maps a labeled vertex set to an internal simplex.
    pub fn simplex_of(&self, labels: &[u64]) -> Result<Simplex> {
        let ids = labels
            .iter()
            .map(|&l| {
                self.vertex_of(l)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown vertex label {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Simplex::new(ids)
    }

    /// Labels of a simplex's vertices, ascending.
    pub fn labeled(&self, s: &Simplex) -> Vec<u64> {
        s.vertices().iter().map(|&v| self.label(v)).collect()
    }

    /// Space-separated labels of a simplex.
    pub fn format_simplex(&self, s: &Simplex) -> String {
        let mut out = String::new();
        for (i, &v) in s.vertices().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{}", self.label(v)).unwrap();
        }
        out
    }

    /// Serializes the maximal simplices in the format read by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.maximal {
            out.push_str(&self.format_simplex(s));
            out.push('\n');
        }
        out
    }

    /// Ids of maximal simplices containing `s`, found by intersecting the
    /// vertex index entries of its vertices.
    pub fn containing_maximal(&self, s: &Simplex) -> Vec<u32> {
        containing_in(&self.vertex_index, &self.maximal, s)
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        !self.containing_maximal(s).is_empty()
    }

    /// Size of the largest maximal simplex containing `s`, minus `|s|`.
    pub fn lower_bound(&self, s: &Simplex) -> Result<u32> {
        self.containing_maximal(s)
            .iter()
            .map(|&id| self.maximal[id as usize].len())
            .max()
            .map(|h| (h - s.len()) as u32)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "simplex [{}] is not in the complex",
                    self.format_simplex(s)
                ))
            })
    }

    /// Splits the complex by connectivity of its 1-skeleton. Components are
    /// ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<SimplicialComplex> {
        let verts = self.vertices();
        if verts.is_empty() {
            return Vec::new();
        }
        let pos: HashMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for s in &self.maximal {
            for v in &s.vertices()[1..] {
                let first = find(&mut parent, pos[&s.vertices()[0]]);
                let r = find(&mut parent, pos[v]);
                if r != first {
                    let (lo, hi) = if r < first { (r, first) } else { (first, r) };
                    parent[hi] = lo;
                }
            }
        }
        // roots are the smallest member, so grouping by root orders
        // components by their smallest vertex
        let mut groups: std::collections::BTreeMap<usize, Vec<Simplex>> = Default::default();
        for s in &self.maximal {
            let root = find(&mut parent, pos[&s.vertices()[0]]);
            groups.entry(root).or_default().push(s.clone());
        }
        groups.into_values().map(|m| self.with_maximal(m)).collect()
    }

    /// All distinct size-`q` simplices of the complex, sorted.
    pub fn faces_of_size(&self, q: usize) -> Vec<Simplex> {
        let mut out = BTreeSet::new();
        let mut buf = Vec::with_capacity(q);
        for m in &self.maximal {
            if m.len() >= q {
                for_each_subset(m.vertices(), q, &mut buf, &mut |c| {
                    out.insert(Simplex::from_sorted(c.to_vec()));
                });
            }
        }
        out.into_iter().collect()
    }

    /// Edges of the 1-skeleton as ascending vertex pairs, sorted.
    pub fn one_skeleton(&self) -> Vec<(VertexId, VertexId)> {
        self.faces_of_size(2)
            .into_iter()
            .map(|e| (e.vertices()[0], e.vertices()[1]))
            .collect()
    }

    /// Vertices co-occurring with `s` in some maximal simplex.
    pub fn link_vertices(&self, s: &Simplex) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for id in self.containing_maximal(s) {
            for &v in self.maximal[id as usize].vertices() {
                if !s.contains_vertex(v) {
                    out.insert(v);
                }
            }
        }
        out
    }
}

fn containing_in(
    index: &HashMap<VertexId, Vec<u32>>,
    maximal: &[Simplex],
    s: &Simplex,
) -> Vec<u32> {
    let mut lists = Vec::with_capacity(s.len());
    for v in s.vertices() {
        match index.get(v) {
            Some(l) => lists.push(l.as_slice()),
            None => return Vec::new(),
        }
    }
    lists.sort_unstable_by_key(|l| l.len());
    let (first, rest) = lists.split_first().expect("non-empty simplex");
    first
        .iter()
        .copied()
        .filter(|id| rest.iter().all(|l| l.binary_search(id).is_ok()))
        .filter(|&id| s.is_subset_of(maximal[id as usize].vertices()))
        .collect()
}

/// Calls `f` with every `k`-subset of the ascending slice `items`, in
/// lexicographic order.
pub(crate) fn for_each_subset<T: Copy>(
    items: &[T],
    k: usize,
    buf: &mut Vec<T>,
    f: &mut dyn FnMut(&[T]),
) {
    fn rec<T: Copy>(items: &[T], start: usize, k: usize, buf: &mut Vec<T>, f: &mut dyn FnMut(&[T])) {
        if buf.len() == k {
            f(buf);
            return;
        }
        let need = k - buf.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            buf.push(items[i]);
            rec(items, i + 1, k, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    if k <= items.len() {
        rec(items, 0, k, buf, f);
    }
}

/// Parses the complex text format.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    SimplicialComplex::parse(text)
}

/// Extends each seed simplex by one vertex co-occurring with it in some
/// maximal simplex of `complex`. With `q == 2` the seeds are ignored and the
/// full edge set is returned. Output is sorted and deduplicated.
pub fn extend_simplices(
    seeds: &[Simplex],
    complex: &SimplicialComplex,
    q: usize,
) -> Result<Vec<Simplex>> {
    if q < 2 {
        return Err(Error::InvalidArgument(format!(
            "extension size must be at least 2, got {q}"
        )));
    }
    if q == 2 {
        return Ok(complex.faces_of_size(2));
    }
    let mut out = BTreeSet::new();
    for s in seeds {
        if s.len() != q - 1 {
            return Err(Error::InvalidArgument(format!(
                "seed {s:?} has size {}, expected {}",
                s.len(),
                q - 1
            )));
        }
        for v in complex.link_vertices(s) {
            out.insert(s.with(v));
        }
    }
    Ok(out.into_iter().collect())
}
