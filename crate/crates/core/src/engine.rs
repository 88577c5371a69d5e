//! Level-wise truss decomposition and the top-n variant.
//!
//! Every connected component is processed on its own. At each size `q` the
//! surviving simplices of size `q - 1` are extended, lower bounds are read
//! from the largest containing maximal simplex, joists give the upper
//! bounds, and when the two disagree anywhere the level is peeled with a
//! bucket queue. Only simplices with positive trussness seed the next level.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;

use log::debug;
use rayon::prelude::*;

use crate::complex::{extend_simplices, SimplicialComplex};
use crate::error::{Error, Result};
use crate::joists::{find_joists, JoistMap, MemoryBudget, SpillConfig};
use crate::simplex::Simplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Trussness {
    pub tr: u32,
    pub lb: u32,
}

impl Trussness {
    pub fn is_trivial(self) -> bool {
        self.tr == self.lb
    }
}

/// Trussness and lower bound per simplex, iterated in (size, lexicographic)
/// order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrussnessMap(BTreeMap<Simplex, Trussness>);

impl TrussnessMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Simplex, t: Trussness) {
        self.0.insert(s, t);
    }

    pub fn get(&self, s: &Simplex) -> Option<Trussness> {
        self.0.get(s).copied()
    }

    pub fn tr(&self, s: &Simplex) -> Option<u32> {
        self.0.get(s).map(|t| t.tr)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, Trussness)> {
        self.0.iter().map(|(s, t)| (s, *t))
    }

    /// Largest trussness, 0 when empty.
    pub fn max_trussness(&self) -> u32 {
        self.0.values().map(|t| t.tr).max().unwrap_or(0)
    }

    /// Entries with `tr != lb`.
    pub fn non_trivial(&self) -> TrussnessMap {
        TrussnessMap(
            self.0
                .iter()
                .filter(|(_, t)| !t.is_trivial())
                .map(|(s, t)| (s.clone(), *t))
                .collect(),
        )
    }

    /// Writes `v1 v2 ...<TAB>tr<TAB>lb` lines using the complex's labels.
    pub fn write_tsv<W: Write>(
        &self,
        complex: &SimplicialComplex,
        include_trivial: bool,
        out: &mut W,
    ) -> io::Result<()> {
        for (s, t) in &self.0 {
            if include_trivial || !t.is_trivial() {
                writeln!(out, "{}\t{}\t{}", complex.format_simplex(s), t.tr, t.lb)?;
            }
        }
        Ok(())
    }

    pub fn to_tsv(&self, complex: &SimplicialComplex, include_trivial: bool) -> String {
        let mut buf = Vec::new();
        self.write_tsv(complex, include_trivial, &mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}

impl FromIterator<(Simplex, Trussness)> for TrussnessMap {
    fn from_iter<I: IntoIterator<Item = (Simplex, Trussness)>>(iter: I) -> Self {
        TrussnessMap(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    /// Largest simplex size (vertex count) to examine; unbounded when `None`.
    pub max_size: Option<usize>,
    pub budget: MemoryBudget,
    pub chunks: usize,
    pub workdir: Option<PathBuf>,
    pub keep_workdir: bool,
    /// Components decomposed concurrently; 1 runs sequentially.
    pub parallel_components: usize,
    /// Keep each level's joist map (before peeling) in the result.
    pub retain_joists: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            max_size: None,
            budget: MemoryBudget::UNLIMITED,
            chunks: 8,
            workdir: None,
            keep_workdir: false,
            parallel_components: 1,
            retain_joists: false,
        }
    }
}

impl DecomposeOptions {
    pub fn with_max_size(max_size: usize) -> Self {
        DecomposeOptions {
            max_size: Some(max_size),
            ..Self::default()
        }
    }

    fn spill_config(&self, component: usize, level: usize) -> SpillConfig {
        SpillConfig {
            budget: self.budget,
            chunks: self.chunks.max(1),
            workdir: self.workdir.clone(),
            keep_workdir: self.keep_workdir,
            component,
            level,
        }
    }
}

/// Per-level counters of one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelReport {
    pub component: usize,
    pub size: usize,
    pub simplices: usize,
    pub candidates: u64,
    pub joists: usize,
    pub batches: usize,
    pub short_circuit: bool,
    pub spilled: bool,
}

impl fmt::Display for LevelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "component={} size={} simplices={} candidates={} joists={} batches={} short_circuit={} spilled={}",
            self.component,
            self.size,
            self.simplices,
            self.candidates,
            self.joists,
            self.batches,
            self.short_circuit,
            self.spilled
        )
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub trussness: TrussnessMap,
    pub levels: Vec<LevelReport>,
    /// Joist maps as validated, by component then level; empty unless
    /// [`DecomposeOptions::retain_joists`] was set.
    pub joists: Vec<JoistMap>,
    /// Largest simplex size examined.
    pub max_size: usize,
}

struct ComponentResult {
    entries: Vec<(Simplex, Trussness)>,
    levels: Vec<LevelReport>,
    joists: Vec<JoistMap>,
}

/// Computes the trussness of every simplex of size `2..=max_size`.
pub fn decompose(complex: &SimplicialComplex, options: &DecomposeOptions) -> Result<Decomposition> {
    let d = options.max_size.unwrap_or(usize::MAX);
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "max size must be at least 2, got {d}"
        )));
    }
    let components = complex.connected_components();
    let run = |(i, c): (usize, &SimplicialComplex)| decompose_component(i, c, d, options);
    let results: Vec<ComponentResult> = if options.parallel_components > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.parallel_components)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| components.par_iter().enumerate().map(run).collect::<Result<_>>())?
    } else {
        components.iter().enumerate().map(run).collect::<Result<_>>()?
    };

    let mut out = Decomposition {
        trussness: TrussnessMap::new(),
        levels: Vec::new(),
        joists: Vec::new(),
        max_size: d.min(complex.max_size()),
    };
    for r in results {
        out.trussness.0.extend(r.entries);
        out.levels.extend(r.levels);
        out.joists.extend(r.joists);
    }
    Ok(out)
}

fn decompose_component(
    component: usize,
    c: &SimplicialComplex,
    max_size: usize,
    options: &DecomposeOptions,
) -> Result<ComponentResult> {
    let mut result = ComponentResult {
        entries: Vec::new(),
        levels: Vec::new(),
        joists: Vec::new(),
    };
    let d = max_size.min(c.max_size());
    let mut seeds: Vec<Simplex> = Vec::new();
    for q in 2..=d {
        if q > 2 && seeds.is_empty() {
            break;
        }
        let level = extend_simplices(&seeds, c, q)?;
        if level.is_empty() {
            break;
        }
        let lbs = level
            .iter()
            .map(|s| c.lower_bound(s))
            .collect::<Result<Vec<_>>>()?;
        let (mut joists, stats) = find_joists(level, options.spill_config(component, q))?;
        let ub: Vec<u32> = (0..joists.len() as u32)
            .map(|i| joists.apexes_of(i).len() as u32)
            .collect();
        let short_circuit = lbs.iter().zip(&ub).all(|(l, u)| l == u);
        if options.retain_joists {
            result.joists.push(joists.clone());
        }
        let (tr, batches) = if short_circuit {
            (ub, 0)
        } else {
            let peeled = peel_level(&mut joists);
            (peeled.trussness, peeled.batches)
        };
        for (i, s) in joists.simplices().iter().enumerate() {
            debug_assert!(lbs[i] <= tr[i], "lower bound above trussness for {s:?}");
            result.entries.push((s.clone(), Trussness { tr: tr[i], lb: lbs[i] }));
        }
        seeds = joists
            .simplices()
            .iter()
            .zip(&tr)
            .filter(|(_, &t)| t > 0)
            .map(|(s, _)| s.clone())
            .collect();
        let report = LevelReport {
            component,
            size: q,
            simplices: stats.simplices,
            candidates: stats.candidates,
            joists: stats.joists,
            batches,
            short_circuit,
            spilled: stats.spilled,
        };
        debug!("{report}");
        result.levels.push(report);
    }
    Ok(result)
}

/// Bucket queue over integer trussness estimates. Each bucket keeps its ids
/// ordered, so a batch of minima comes out in lexicographic order.
#[derive(Debug)]
pub struct PeelQueue {
    buckets: Vec<BTreeSet<u32>>,
    cursor: usize,
    len: usize,
}

impl PeelQueue {
    pub fn new(estimates: &[u32]) -> Self {
        let top = estimates.iter().copied().max().unwrap_or(0) as usize;
        let mut buckets = vec![BTreeSet::new(); top + 1];
        for (id, &e) in estimates.iter().enumerate() {
            buckets[e as usize].insert(id as u32);
        }
        PeelQueue {
            buckets,
            cursor: 0,
            len: estimates.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Removes and returns every id holding the minimum estimate.
    pub fn pop_min_batch(&mut self) -> Option<(u32, Vec<u32>)> {
        if self.len == 0 {
            return None;
        }
        while self.buckets[self.cursor].is_empty() {
            self.cursor += 1;
        }
        let batch: Vec<u32> = std::mem::take(&mut self.buckets[self.cursor])
            .into_iter()
            .collect();
        self.len -= batch.len();
        Some((self.cursor as u32, batch))
    }

    /// Moves `id` from bucket `old` to bucket `new`.
    pub fn update(&mut self, id: u32, old: u32, new: u32) {
        if old == new {
            return;
        }
        let removed = self.buckets[old as usize].remove(&id);
        debug_assert!(removed, "id {id} not queued at {old}");
        if new as usize >= self.buckets.len() {
            self.buckets.resize(new as usize + 1, BTreeSet::new());
        }
        self.buckets[new as usize].insert(id);
        self.cursor = self.cursor.min(new as usize);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelOutcome {
    /// Final trussness by simplex id.
    pub trussness: Vec<u32>,
    pub batches: usize,
}

/// Peels one level. Estimates start at the joist counts; each batch of
/// minima is finalized, and every joist of a finalized simplex is removed
/// from its mates whose estimate is still larger, lowering them by one but
/// never below the batch value. Consumes the apex sets in `joists`.
pub fn peel_level(joists: &mut JoistMap) -> PeelOutcome {
    let n = joists.len();
    let mut tr: Vec<u32> = (0..n as u32).map(|i| joists.apexes_of(i).len() as u32).collect();
    let mut queue = PeelQueue::new(&tr);
    let mut batches = 0;
    while let Some((k, batch)) = queue.pop_min_batch() {
        batches += 1;
        for sigma in batch {
            debug_assert_eq!(tr[sigma as usize], k);
            let s = joists.simplex(sigma).clone();
            let apexes: Vec<u32> = joists.apexes_of(sigma).iter().copied().collect();
            for v in apexes {
                for (pos, &gone) in s.vertices().iter().enumerate() {
                    let mate = s.replace(pos, v);
                    let t = joists.id_of(&mate).expect("joist member in level");
                    let cur = tr[t as usize];
                    if cur > k && joists.remove_apex(t, gone) {
                        let next = (cur - 1).max(k);
                        queue.update(t, cur, next);
                        tr[t as usize] = next;
                    }
                }
            }
        }
    }
    PeelOutcome {
        trussness: tr,
        batches,
    }
}

/// `T_k = {σ : tr(σ) ≥ k}` for `k = 1..=K`, with `K` the largest trussness.
pub fn trusses(tr: &TrussnessMap) -> Vec<BTreeSet<Simplex>> {
    let top = tr.max_trussness();
    (1..=top)
        .map(|k| {
            tr.iter()
                .filter(|(_, t)| t.tr >= k)
                .map(|(s, _)| s.clone())
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopN {
    /// `(simplex, trussness)` by trussness descending, then lexicographic.
    pub rows: Vec<(Simplex, u32)>,
    /// False when fewer than `n` simplices of the requested size exist.
    pub complete: bool,
}

/// The `n` size-`q` simplices of largest trussness.
///
/// Only size-`q` simplices are generated. Thresholds are examined in
/// descending order of upper bound: at threshold `k`, the simplices whose
/// bound reaches `k` are peeled down to the exact `k`-truss of the level;
/// survivors not yet ranked get trussness `k`, and the bound of every
/// peeled simplex drops to `k - 1`. The search stops as soon as `n`
/// simplices are ranked, since every simplex left has smaller trussness.
pub fn top_n(
    complex: &SimplicialComplex,
    n: usize,
    q: usize,
    options: &DecomposeOptions,
) -> Result<TopN> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("size must be at least 2, got {q}")));
    }
    let level = complex.faces_of_size(q);
    let (joists, _) = find_joists(level, options.spill_config(0, q))?;
    let total = joists.len();
    let mut ub: Vec<u32> = (0..total as u32)
        .map(|i| joists.apexes_of(i).len() as u32)
        .collect();
    let mut ranked: Vec<Option<u32>> = vec![None; total];
    let mut rows: Vec<(u32, u32)> = Vec::new();

    let members = |sigma: u32, w: u32| -> Vec<u32> {
        let s = joists.simplex(sigma);
        (0..s.len())
            .map(|pos| joists.id_of(&s.replace(pos, w)).expect("joist member in level"))
            .collect()
    };

    while rows.len() < n {
        let Some(k) = (0..total)
            .filter(|&i| ranked[i].is_none())
            .map(|i| ub[i])
            .max()
        else {
            break;
        };
        let mut in_set: Vec<bool> = (0..total).map(|i| ranked[i].is_some() || ub[i] >= k).collect();
        let mut support = vec![0u32; total];
        let mut work = Vec::new();
        for i in 0..total as u32 {
            if ranked[i as usize].is_some() || !in_set[i as usize] {
                continue;
            }
            support[i as usize] = joists
                .apexes_of(i)
                .iter()
                .filter(|&&w| members(i, w).iter().all(|&m| in_set[m as usize]))
                .count() as u32;
            if support[i as usize] < k {
                work.push(i);
            }
        }
        while let Some(sigma) = work.pop() {
            if !in_set[sigma as usize] {
                continue;
            }
            in_set[sigma as usize] = false;
            ub[sigma as usize] = ub[sigma as usize].min(k.saturating_sub(1));
            for &w in joists.apexes_of(sigma) {
                let mates = members(sigma, w);
                if mates.iter().all(|&m| in_set[m as usize]) {
                    for m in mates {
                        if ranked[m as usize].is_none() {
                            support[m as usize] -= 1;
                            if support[m as usize] < k {
                                work.push(m);
                            }
                        }
                    }
                }
            }
        }
        for i in 0..total {
            if ranked[i].is_none() && in_set[i] {
                ranked[i] = Some(k);
                rows.push((i as u32, k));
            }
        }
    }

    rows.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    rows.truncate(n);
    Ok(TopN {
        rows: rows
            .into_iter()
            .map(|(i, t)| (joists.simplex(i).clone(), t))
            .collect(),
        complete: total >= n,
    })
}
