//! Joist discovery for one level of same-size simplices.
//!
//! Simplices are visited in lexicographic order. Each one first looks up the
//! already indexed simplices sharing one of its codes (the faces obtained by
//! dropping a single vertex), then indexes its own codes, so every pair of
//! candidate mates is seen exactly once. A pair is stored only under the
//! member missing the largest vertex of the pair's union; that member is the
//! unique representative of every joist the pair can belong to. Validation
//! then counts, per representative and per extra vertex `w`, how many stored
//! mates contain `w`: a full count of `|σ|` means every coface of `σ ∪ {w}`
//! is present.

pub mod spill;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

use spill::{RecordReader, RecordWriter};

/// Logical memory limit for stored candidate pairs, in records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryBudget(u64);

impl MemoryBudget {
    pub const UNLIMITED: MemoryBudget = MemoryBudget(u64::MAX);

    /// At least one record.
    pub fn records(n: u64) -> Self {
        MemoryBudget(n.max(1))
    }

    /// Converts a byte limit at [`spill::RECORD_BYTES`] per record.
    pub fn bytes(n: u64) -> Self {
        Self::records(n / spill::RECORD_BYTES as u64)
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn is_unlimited(self) -> bool {
        self.0 == u64::MAX
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::UNLIMITED
    }
}

/// Where and how candidates spill once the budget is reached.
#[derive(Clone, Debug)]
pub struct SpillConfig {
    pub budget: MemoryBudget,
    /// Number of chunk files `M`.
    pub chunks: usize,
    /// Directory for chunk files; a fresh temporary directory when `None`.
    pub workdir: Option<PathBuf>,
    pub keep_workdir: bool,
    pub component: usize,
    pub level: usize,
}

impl Default for SpillConfig {
    fn default() -> Self {
        SpillConfig {
            budget: MemoryBudget::UNLIMITED,
            chunks: 8,
            workdir: None,
            keep_workdir: false,
            component: 0,
            level: 0,
        }
    }
}

/// Apex sets for one level. Simplex ids are ranks in the sorted level.
#[derive(Clone, Debug)]
pub struct JoistMap {
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, u32>,
    apexes: Vec<BTreeSet<VertexId>>,
    validated: Vec<bool>,
}

impl JoistMap {
    /// An empty map over `simplices`, which must be sorted, distinct, and of
    /// one size.
    pub fn new(simplices: Vec<Simplex>) -> Result<Self> {
        check_level(&simplices)?;
        let index = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let n = simplices.len();
        Ok(JoistMap {
            simplices,
            index,
            apexes: vec![BTreeSet::new(); n],
            validated: vec![false; n],
        })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Vertex count of the level's simplices (0 when empty).
    pub fn simplex_size(&self) -> usize {
        self.simplices.first().map_or(0, Simplex::len)
    }

    pub fn id_of(&self, s: &Simplex) -> Option<u32> {
        self.index.get(s).copied()
    }

    pub fn simplex(&self, id: u32) -> &Simplex {
        &self.simplices[id as usize]
    }

    pub fn apexes(&self, s: &Simplex) -> Option<&BTreeSet<VertexId>> {
        self.id_of(s).map(|id| &self.apexes[id as usize])
    }

    pub fn apexes_of(&self, id: u32) -> &BTreeSet<VertexId> {
        &self.apexes[id as usize]
    }

    /// Removes apex `v` from simplex `id`; true if it was present.
    pub fn remove_apex(&mut self, id: u32, v: VertexId) -> bool {
        self.apexes[id as usize].remove(&v)
    }

    /// Number of distinct joists in the level. Each joist is listed by all
    /// `|σ| + 1` of its members.
    pub fn total_joists(&self) -> usize {
        let per = self.simplex_size() + 1;
        self.apexes.iter().map(BTreeSet::len).sum::<usize>() / per.max(1)
    }

    /// The vertex set `σ ∪ {w}` of every joist, each listed once.
    pub fn joist_vertex_sets(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (s, apexes) in self.simplices.iter().zip(&self.apexes) {
            for &w in apexes.range(s.last() + 1..) {
                out.push(s.with(w));
            }
        }
        out.sort_unstable();
        out
    }

    /// Simplices with at least one apex, as an ordered map.
    pub fn to_sets(&self) -> BTreeMap<Simplex, BTreeSet<VertexId>> {
        self.simplices
            .iter()
            .zip(&self.apexes)
            .filter(|(_, a)| !a.is_empty())
            .map(|(s, a)| (s.clone(), a.clone()))
            .collect()
    }

    /// Records the joist `σ ∪ {w}` on all of its members.
    fn add_joist(&mut self, sigma: u32, w: VertexId) -> Result<()> {
        let s = self.simplices[sigma as usize].clone();
        self.apexes[sigma as usize].insert(w);
        for (pos, &v) in s.vertices().iter().enumerate() {
            let mate = s.replace(pos, w);
            let id = self.id_of(&mate).ok_or_else(|| {
                Error::Internal(format!("joist member {mate:?} missing from level"))
            })?;
            self.apexes[id as usize].insert(v);
        }
        Ok(())
    }
}

fn check_level(simplices: &[Simplex]) -> Result<()> {
    if let Some(first) = simplices.first() {
        if let Some(bad) = simplices.iter().find(|s| s.len() != first.len()) {
            return Err(Error::InvalidArgument(format!(
                "mixed simplex sizes in level: {} and {}",
                first.len(),
                bad.len()
            )));
        }
    }
    if simplices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "level simplices must be sorted and distinct".into(),
        ));
    }
    Ok(())
}

/// Inverted index from codes to the simplices containing them.
///
/// Codes are never materialized: a bucket is keyed by the hash of the
/// simplex's vertices with one position skipped, and entries remember which
/// position, so equality is checked against the stored simplex.
#[derive(Default, Debug)]
pub struct CandidateIndex {
    buckets: HashMap<u64, Vec<(u32, u16)>>,
}

fn code_hash(s: &[VertexId], skip: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (i, &v) in s.iter().enumerate() {
        if i != skip {
            h = (h ^ v as u64).wrapping_mul(0x0000_0100_0000_01b3);
            h = h.rotate_left(29) ^ (h >> 17);
        }
    }
    h
}

fn code_eq(a: &[VertexId], skip_a: usize, b: &[VertexId], skip_b: usize) -> bool {
    let ia = a.iter().enumerate().filter(|&(i, _)| i != skip_a).map(|(_, v)| v);
    let ib = b.iter().enumerate().filter(|&(i, _)| i != skip_b).map(|(_, v)| v);
    ia.eq(ib)
}

impl CandidateIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Indexes all codes of simplex `id`.
    pub fn insert(&mut self, id: u32, s: &Simplex) {
        for pos in 0..s.len() {
            self.buckets
                .entry(code_hash(s.vertices(), pos))
                .or_default()
                .push((id, pos as u16));
        }
    }

    /// Ids of indexed simplices sharing a code with `s`, ascending. `level`
    /// resolves ids to simplices.
    pub fn find_matches(&self, s: &Simplex, level: &[Simplex]) -> Vec<u32> {
        let mut out = Vec::new();
        for pos in 0..s.len() {
            if let Some(bucket) = self.buckets.get(&code_hash(s.vertices(), pos)) {
                for &(id, p) in bucket {
                    let other = &level[id as usize];
                    if other != s && code_eq(other.vertices(), p as usize, s.vertices(), pos) {
                        out.push(id);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Free-function form of [`CandidateIndex::find_matches`].
pub fn find_matches(s: &Simplex, index: &CandidateIndex, level: &[Simplex]) -> Vec<u32> {
    index.find_matches(s, level)
}

struct Chunks {
    dir: Option<tempfile::TempDir>,
    paths: Vec<PathBuf>,
    writers: Vec<Option<RecordWriter>>,
    counts: Vec<u64>,
}

/// Candidate mates awaiting validation, in memory until the budget is
/// reached and in `M` chunk files afterwards.
pub struct CandidateStore {
    config: SpillConfig,
    memory: BTreeMap<u32, Vec<u32>>,
    record_count: u64,
    chunks: Option<Chunks>,
}

impl CandidateStore {
    pub fn new(config: SpillConfig) -> Self {
        CandidateStore {
            config,
            memory: BTreeMap::new(),
            record_count: 0,
            chunks: None,
        }
    }

    pub fn in_memory() -> Self {
        Self::new(SpillConfig::default())
    }

    /// Total records stored, in memory or on disk.
    pub fn record_count(&self) -> u64 {
        self.record_count
    }

    pub fn is_spilled(&self) -> bool {
        self.chunks.is_some()
    }

    pub fn chunk_paths(&self) -> &[PathBuf] {
        self.chunks.as_ref().map_or(&[], |c| &c.paths)
    }

    /// Mates stored under `idx1`, when in memory.
    pub fn candidates(&self, idx1: u32) -> Option<&[u32]> {
        self.memory.get(&idx1).map(Vec::as_slice)
    }

    pub fn insert(&mut self, idx1: u32, idx2: u32) -> Result<()> {
        self.record_count += 1;
        if let Some(chunks) = &mut self.chunks {
            let i = idx1 as usize % chunks.paths.len();
            chunks.counts[i] += 1;
            return chunks.writers[i]
                .as_mut()
                .expect("chunk writer open")
                .write((idx1 as u64, idx2 as u64));
        }
        self.memory.entry(idx1).or_default().push(idx2);
        if self.record_count >= self.config.budget.get() {
            self.spill()?;
        }
        Ok(())
    }

    /// Moves every in-memory record to chunk `idx1 mod M` and routes later
    /// inserts straight to disk. Returns the chunk paths.
    pub fn spill(&mut self) -> Result<Vec<PathBuf>> {
        if self.chunks.is_none() {
            let m = self.config.chunks.max(1);
            let (dir, base) = match &self.config.workdir {
                Some(d) => {
                    fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
                    (None, d.clone())
                }
                None => {
                    let t = tempfile::Builder::new()
                        .prefix("simtruss-")
                        .tempdir()
                        .map_err(|e| Error::io(std::env::temp_dir(), e))?;
                    let p = t.path().to_path_buf();
                    (Some(t), p)
                }
            };
            let paths: Vec<PathBuf> = (0..m)
                .map(|i| base.join(spill::chunk_file_name(self.config.component, self.config.level, i)))
                .collect();
            // registered before any file exists so a failure is cleaned up on drop
            let chunks = self.chunks.insert(Chunks {
                dir,
                paths,
                writers: Vec::with_capacity(m),
                counts: vec![0; m],
            });
            for p in &chunks.paths {
                chunks.writers.push(Some(RecordWriter::create(p)?));
            }
            for (&idx1, mates) in &self.memory {
                let i = idx1 as usize % m;
                let w = chunks.writers[i].as_mut().expect("chunk writer open");
                for &idx2 in mates {
                    w.write((idx1 as u64, idx2 as u64))?;
                }
                chunks.counts[i] += mates.len() as u64;
            }
            self.memory.clear();
        }
        Ok(self.chunk_paths().to_vec())
    }

    fn flush(&mut self) -> Result<()> {
        if let Some(chunks) = &mut self.chunks {
            for w in &mut chunks.writers {
                if let Some(w) = w.take() {
                    w.finish()?;
                }
            }
        }
        Ok(())
    }

    /// All stored `(idx1, idx2)` records, sorted. Closes the chunk writers.
    pub fn records(&mut self) -> Result<Vec<(u64, u64)>> {
        self.flush()?;
        let mut out: Vec<(u64, u64)> = Vec::with_capacity(self.record_count as usize);
        for (&a, mates) in &self.memory {
            out.extend(mates.iter().map(|&b| (a as u64, b as u64)));
        }
        for p in self.chunk_paths() {
            out.extend(spill::read_records(p)?);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Validates every stored group into `joists`. Spilled chunks that fit
    /// the budget are grouped in memory; larger ones are externally sorted
    /// and streamed one `idx1` group at a time.
    fn validate_into(&mut self, joists: &mut JoistMap) -> Result<()> {
        for (&idx1, mates) in &self.memory {
            let mut counter = ApexCounter::begin(joists, idx1)?;
            for &m in mates {
                counter.push(joists, m)?;
            }
            counter.finish(joists)?;
        }
        self.flush()?;
        let budget = self.config.budget.get();
        let paths = self.chunk_paths().to_vec();
        let counts = self.chunks.as_ref().map(|c| c.counts.clone()).unwrap_or_default();
        for (path, count) in paths.iter().zip(counts) {
            if count <= budget {
                let mut recs = spill::read_records(path)?;
                recs.sort_unstable();
                validate_sorted(recs.into_iter().map(Ok), joists)?;
            } else {
                let mut sorted = path.clone().into_os_string();
                sorted.push(".sorted");
                let sorted = PathBuf::from(sorted);
                let res = spill::external_sort_chunk(path, &sorted, budget)
                    .and_then(|_| validate_sorted(RecordReader::open(&sorted)?, joists));
                let _ = fs::remove_file(&sorted);
                res?;
            }
        }
        Ok(())
    }

    fn cleanup(&mut self) {
        if let Some(mut chunks) = self.chunks.take() {
            for w in &mut chunks.writers {
                drop(w.take());
            }
            if !self.config.keep_workdir || chunks.dir.is_some() {
                for p in &chunks.paths {
                    let _ = fs::remove_file(p);
                }
            }
            drop(chunks.dir);
        }
    }
}

impl Drop for CandidateStore {
    fn drop(&mut self) {
        self.cleanup();
    }
}

fn validate_sorted(
    records: impl Iterator<Item = Result<(u64, u64)>>,
    joists: &mut JoistMap,
) -> Result<()> {
    let mut current: Option<ApexCounter> = None;
    for rec in records {
        let (a, b) = rec?;
        let (a, b) = (to_id(a)?, to_id(b)?);
        match &mut current {
            Some(c) if c.sigma == a => c.push(joists, b)?,
            _ => {
                if let Some(c) = current.take() {
                    c.finish(joists)?;
                }
                let mut c = ApexCounter::begin(joists, a)?;
                c.push(joists, b)?;
                current = Some(c);
            }
        }
    }
    if let Some(c) = current {
        c.finish(joists)?;
    }
    Ok(())
}

fn to_id(x: u64) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::Internal(format!("simplex id {x} out of range")))
}

/// Per-representative tally of mates by their extra vertex. Only the counts
/// are kept, so a group never has to be held in memory.
struct ApexCounter {
    sigma: u32,
    counts: BTreeMap<VertexId, u32>,
}

impl ApexCounter {
    fn begin(joists: &mut JoistMap, sigma: u32) -> Result<Self> {
        let slot = joists
            .validated
            .get_mut(sigma as usize)
            .ok_or_else(|| Error::Internal(format!("candidate id {sigma} outside level")))?;
        if std::mem::replace(slot, true) {
            return Err(Error::Internal(format!(
                "candidates of simplex {sigma} split across validation slices"
            )));
        }
        Ok(ApexCounter {
            sigma,
            counts: BTreeMap::new(),
        })
    }

    fn push(&mut self, joists: &JoistMap, mate: u32) -> Result<()> {
        let s = joists.simplex(self.sigma);
        let t = joists
            .simplices
            .get(mate as usize)
            .ok_or_else(|| Error::Internal(format!("candidate id {mate} outside level")))?;
        let (_, w) = s.single_difference(t).ok_or_else(|| {
            Error::Internal(format!("{t:?} is not a candidate mate of {s:?}"))
        })?;
        *self.counts.entry(w).or_default() += 1;
        Ok(())
    }

    fn finish(self, joists: &mut JoistMap) -> Result<()> {
        let need = joists.simplex(self.sigma).len() as u32;
        for (w, c) in self.counts {
            if c == need {
                joists.add_joist(self.sigma, w)?;
            } else if c > need {
                return Err(Error::Internal(format!(
                    "simplex {} has {c} candidates through vertex {w}",
                    self.sigma
                )));
            }
        }
        Ok(())
    }
}

/// Applies the order test to each match of simplex `s_id` and stores the
/// surviving pairs: `τ` under `σ` iff `τ \ σ` exceeds the last vertex of
/// `σ`, and `σ` under `τ` iff `σ \ τ` exceeds the last vertex of `τ`.
pub fn merge_candidates(
    store: &mut CandidateStore,
    matches: &[u32],
    s_id: u32,
    level: &[Simplex],
) -> Result<()> {
    let s = &level[s_id as usize];
    for &t_id in matches {
        let t = &level[t_id as usize];
        let (v, u) = s.single_difference(t).ok_or_else(|| {
            Error::Internal(format!("{t:?} does not share a code with {s:?}"))
        })?;
        if u > s.last() {
            store.insert(s_id, t_id)?;
        }
        if v > t.last() {
            store.insert(t_id, s_id)?;
        }
    }
    Ok(())
}

/// Validates a slice of candidate lists into `joists`. Every candidate list
/// of a representative must be complete within the slice.
pub fn validate_joists(slice: &[(u32, Vec<u32>)], joists: &mut JoistMap) -> Result<()> {
    for (sigma, mates) in slice {
        let mut counter = ApexCounter::begin(joists, *sigma)?;
        for &m in mates {
            counter.push(joists, m)?;
        }
        counter.finish(joists)?;
    }
    Ok(())
}

/// Counters from one [`find_joists`] run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FindStats {
    pub simplices: usize,
    pub candidates: u64,
    pub joists: usize,
    pub spilled: bool,
}

/// Finds every joist formed by the simplices of `level`, which must share
/// one size. The level is sorted and deduplicated first; ids in the result
/// are ranks in that order.
pub fn find_joists(mut level: Vec<Simplex>, config: SpillConfig) -> Result<(JoistMap, FindStats)> {
    level.sort_unstable();
    level.dedup();
    let mut joists = JoistMap::new(level)?;
    let mut store = CandidateStore::new(config);
    let mut index = CandidateIndex::new();
    for (id, s) in joists.simplices.iter().enumerate() {
        let matches = index.find_matches(s, &joists.simplices);
        merge_candidates(&mut store, &matches, id as u32, &joists.simplices)?;
        index.insert(id as u32, s);
    }
    drop(index);
    store.validate_into(&mut joists)?;
    let stats = FindStats {
        simplices: joists.len(),
        candidates: store.record_count(),
        joists: joists.total_joists(),
        spilled: store.is_spilled(),
    };
    Ok((joists, stats))
}
