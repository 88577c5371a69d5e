use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Dense internal vertex id. External labels are remapped on load, see
/// [`crate::SimplicialComplex::label`].
pub type VertexId = u32;

/// A set of vertices stored in strictly ascending order.
///
/// Simplices order first by size and then lexicographically, so sorting a
/// mixed collection groups it by level.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Simplex(Box<[VertexId]>);

impl Simplex {
    /// Builds a simplex from vertices in any order. Duplicates are rejected.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidArgument("empty simplex".into()));
        }
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!(
                "duplicate vertex {} in simplex",
                w[0]
            )));
        }
        Ok(Simplex(vertices.into_boxed_slice()))
    }

    /// Wraps vertices that are already strictly ascending.
    pub fn from_sorted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices.into_boxed_slice())
    }

    #[inline]
    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Vertex count.
    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    #[inline]
    pub fn last(&self) -> VertexId {
        self.0[self.0.len() - 1]
    }

    #[inline]
    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// The face obtained by dropping the vertex at `pos`.
    pub fn without(&self, pos: usize) -> Simplex {
        let mut v = Vec::with_capacity(self.0.len() - 1);
        v.extend_from_slice(&self.0[..pos]);
        v.extend_from_slice(&self.0[pos + 1..]);
        Simplex(v.into_boxed_slice())
    }

    /// `self ∪ {v}`; `v` must not already be a vertex.
    pub fn with(&self, v: VertexId) -> Simplex {
        let at = self.0.partition_point(|&x| x < v);
        debug_assert!(at == self.0.len() || self.0[at] != v);
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.extend_from_slice(&self.0[..at]);
        out.push(v);
        out.extend_from_slice(&self.0[at..]);
        Simplex(out.into_boxed_slice())
    }

    /// `(self \ {self[pos]}) ∪ {v}` without an intermediate allocation.
    pub fn replace(&self, pos: usize, v: VertexId) -> Simplex {
        let mut out: Vec<VertexId> = Vec::with_capacity(self.0.len());
        let mut placed = false;
        for (i, &x) in self.0.iter().enumerate() {
            if i == pos {
                continue;
            }
            if !placed && v < x {
                out.push(v);
                placed = true;
            }
            out.push(x);
        }
        if !placed {
            out.push(v);
        }
        Simplex(out.into_boxed_slice())
    }

    /// True when every vertex of `self` is in the ascending slice `other`.
    pub fn is_subset_of(&self, other: &[VertexId]) -> bool {
        if self.0.len() > other.len() {
            return false;
        }
        let mut it = other.iter();
        'outer: for &v in self.0.iter() {
            for &w in it.by_ref() {
                match w.cmp(&v) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    /// For two simplices of equal size sharing all but one vertex, returns
    /// `(self \ other, other \ self)`. Returns `None` otherwise.
    pub fn single_difference(&self, other: &Simplex) -> Option<(VertexId, VertexId)> {
        if self.0.len() != other.0.len() {
            return None;
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        let mut only_self = None;
        let mut only_other = None;
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.cmp(y),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                Ordering::Less => {
                    if only_self.replace(a[i]).is_some() {
                        return None;
                    }
                    i += 1;
                }
                Ordering::Greater => {
                    if only_other.replace(b[j]).is_some() {
                        return None;
                    }
                    j += 1;
                }
            }
        }
        Some((only_self?, only_other?))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Shorthand for tests and examples.
#[macro_export]
macro_rules! simplex {
    ($($v:expr),+ $(,)?) => {
        $crate::Simplex::new(vec![$($v),+]).expect("valid simplex")
    };
}
