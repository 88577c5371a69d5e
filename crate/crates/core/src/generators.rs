//! Synthetic complexes: growing simplicial manifolds and random flag
//! complexes. Both are pure functions of their parameters and seed.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{for_each_subset, SimplicialComplex};
use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ManifoldParams {
    /// Manifold dimension.
    pub d: usize,
    /// Number of top-dimensional simplices.
    pub s: usize,
    pub seed: u64,
}

/// Grows a `d`-manifold one `d`-simplex at a time.
///
/// A face of dimension `d - 1` can receive a new simplex only while it lies
/// on the free boundary (it belongs to exactly one `d`-simplex), and all free
/// faces are equally likely. Each new simplex adds one fresh vertex, so the
/// result has `s + d` vertices.
pub fn gen_manifold(params: ManifoldParams) -> Result<SimplicialComplex> {
    let ManifoldParams { d, s, seed } = params;
    if d < 1 || s < 1 {
        return Err(Error::InvalidArgument(format!(
            "manifold needs d >= 1 and s >= 1, got d={d} s={s}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first: Vec<VertexId> = (0..=d as VertexId).collect();
    let mut simplices = vec![Simplex::from_sorted(first.clone())];
    let mut free: Vec<Simplex> = Vec::new();
    let mut buf = Vec::new();
    for_each_subset(&first, d, &mut buf, &mut |f| free.push(Simplex::from_sorted(f.to_vec())));
    let mut next = d as VertexId + 1;
    while simplices.len() < s {
        let face = free.swap_remove(rng.gen_range(0..free.len()));
        let fresh = next;
        next += 1;
        for pos in 0..face.len() {
            free.push(face.without(pos).with(fresh));
        }
        simplices.push(face.with(fresh));
    }
    Ok(SimplicialComplex::from_simplices(simplices))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlagParams {
    pub n: usize,
    pub p: f64,
    pub max_size: usize,
    pub seed: u64,
}

/// Samples `G(n, p)` with its adjacency lists.
pub fn sample_graph(n: usize, p: f64, seed: u64) -> Vec<BTreeSet<VertexId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = vec![BTreeSet::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                adj[a].insert(b as VertexId);
                adj[b].insert(a as VertexId);
            }
        }
    }
    adj
}

/// Maximal cliques of a graph by Bron–Kerbosch with pivoting, each sorted,
/// in lexicographic order. Isolated vertices are singleton cliques.
pub fn maximal_cliques(adj: &[BTreeSet<VertexId>]) -> Vec<Vec<VertexId>> {
    fn expand(
        adj: &[BTreeSet<VertexId>],
        r: &mut Vec<VertexId>,
        p: BTreeSet<VertexId>,
        mut x: BTreeSet<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = *p
            .union(&x)
            .max_by_key(|&&u| p.intersection(&adj[u as usize]).count())
            .expect("p is non-empty");
        let mut p = p;
        let candidates: Vec<VertexId> = p.difference(&adj[pivot as usize]).copied().collect();
        for v in candidates {
            let nv = &adj[v as usize];
            r.push(v);
            expand(
                adj,
                r,
                p.intersection(nv).copied().collect(),
                x.intersection(nv).copied().collect(),
                out,
            );
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    let all: BTreeSet<VertexId> = (0..adj.len() as VertexId).collect();
    expand(adj, &mut Vec::new(), all, BTreeSet::new(), &mut out);
    out.sort_unstable();
    out
}

/// Random flag complex: the cliques of a `G(n, p)` sample of size at most
/// `max_size`. Maximal cliques above the cap contribute all of their
/// `max_size`-subsets.
pub fn gen_flag_complex(params: FlagParams) -> Result<SimplicialComplex> {
    let FlagParams { n, p, max_size, seed } = params;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")));
    }
    if max_size < 2 {
        return Err(Error::InvalidArgument(format!(
            "max size must be at least 2, got {max_size}"
        )));
    }
    let adj = sample_graph(n, p, seed);
    let mut simplices = Vec::new();
    let mut buf = Vec::new();
    for clique in maximal_cliques(&adj) {
        if clique.len() <= max_size {
            simplices.push(Simplex::from_sorted(clique));
        } else {
            for_each_subset(&clique, max_size, &mut buf, &mut |c| {
                simplices.push(Simplex::from_sorted(c.to_vec()))
            });
        }
    }
    Ok(SimplicialComplex::from_simplices(simplices))
}
