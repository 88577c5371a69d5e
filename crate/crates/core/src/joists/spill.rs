//! On-disk candidate chunks and their external sort.
//!
//! A chunk file is a flat sequence of 16-byte records, each two
//! little-endian `u64`s `(idx1, idx2)`.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const RECORD_BYTES: usize = 16;

/// Upper bound on the number of runs merged at once.
const MAX_FAN_IN: usize = 64;

pub type Record = (u64, u64);

pub fn chunk_file_name(component: usize, level: usize, chunk: usize) -> String {
    format!("cand_{component}_{level}_{chunk}.bin")
}

#[inline]
pub fn encode(rec: Record) -> [u8; RECORD_BYTES] {
    let mut buf = [0u8; RECORD_BYTES];
    buf[..8].copy_from_slice(&rec.0.to_le_bytes());
    buf[8..].copy_from_slice(&rec.1.to_le_bytes());
    buf
}

#[inline]
pub fn decode(buf: &[u8; RECORD_BYTES]) -> Record {
    let a = u64::from_le_bytes(buf[..8].try_into().unwrap());
    let b = u64::from_le_bytes(buf[8..].try_into().unwrap());
    (a, b)
}

/// Streams records from a chunk file.
pub struct RecordReader {
    path: PathBuf,
    inner: BufReader<File>,
}

impl RecordReader {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(RecordReader {
            path: path.to_path_buf(),
            inner: BufReader::with_capacity(1 << 16, file),
        })
    }

    pub fn next_record(&mut self) -> Result<Option<Record>> {
        let mut buf = [0u8; RECORD_BYTES];
        let mut filled = 0;
        while filled < RECORD_BYTES {
            match self.inner.read(&mut buf[filled..]) {
                Ok(0) if filled == 0 => return Ok(None),
                Ok(0) => {
                    return Err(Error::io(
                        &self.path,
                        io::Error::new(io::ErrorKind::UnexpectedEof, "truncated record"),
                    ))
                }
                Ok(n) => filled += n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
                Err(e) => return Err(Error::io(&self.path, e)),
            }
        }
        Ok(Some(decode(&buf)))
    }
}

impl Iterator for RecordReader {
    type Item = Result<Record>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_record().transpose()
    }
}

pub struct RecordWriter {
    path: PathBuf,
    inner: BufWriter<File>,
}

impl RecordWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(RecordWriter {
            path: path.to_path_buf(),
            inner: BufWriter::with_capacity(1 << 16, file),
        })
    }

    pub fn append(path: &Path) -> Result<Self> {
        let file = fs::OpenOptions::new()
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(RecordWriter {
            path: path.to_path_buf(),
            inner: BufWriter::with_capacity(1 << 16, file),
        })
    }

    #[inline]
    pub fn write(&mut self, rec: Record) -> Result<()> {
        self.inner
            .write_all(&encode(rec))
            .map_err(|e| Error::io(&self.path, e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| Error::io(&self.path, e))
    }
}

pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    RecordReader::open(path)?.collect()
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    let mut w = RecordWriter::create(path)?;
    for &r in records {
        w.write(r)?;
    }
    w.finish()
}

/// Sorts the records of `input` by `(idx1, idx2)` into `output`, holding at
/// most `budget` records in memory per run. Sorted runs are merged k-way,
/// in several passes when there are more runs than the merge fan-in.
pub fn external_sort_chunk(input: &Path, output: &Path, budget: u64) -> Result<()> {
    let budget = budget.max(1) as usize;
    let mut runs = RunFiles::new(output);
    let mut pending = Vec::new();
    let mut reader = RecordReader::open(input)?;
    let mut buf: Vec<Record> = Vec::with_capacity(budget.min(1 << 20));
    loop {
        buf.clear();
        while buf.len() < budget {
            match reader.next_record()? {
                Some(r) => buf.push(r),
                None => break,
            }
        }
        if buf.is_empty() {
            break;
        }
        buf.sort_unstable();
        let path = runs.next_path();
        write_records(&path, &buf)?;
        pending.push(path);
        if buf.len() < budget {
            break;
        }
    }
    drop(buf);

    let fan_in = budget.clamp(2, MAX_FAN_IN);
    while pending.len() > 1 {
        let mut next = Vec::with_capacity(pending.len().div_ceil(fan_in));
        for group in pending.chunks(fan_in) {
            let path = runs.next_path();
            merge_runs(group, &path)?;
            for p in group {
                fs::remove_file(p).map_err(|e| Error::io(p, e))?;
            }
            next.push(path);
        }
        pending = next;
    }
    match pending.pop() {
        Some(last) => fs::rename(&last, output).map_err(|e| Error::io(output, e)),
        None => write_records(output, &[]),
    }
}

fn merge_runs(inputs: &[PathBuf], output: &Path) -> Result<()> {
    let mut readers = inputs
        .iter()
        .map(|p| RecordReader::open(p))
        .collect::<Result<Vec<_>>>()?;
    let mut heap = BinaryHeap::with_capacity(readers.len());
    for (i, r) in readers.iter_mut().enumerate() {
        if let Some(rec) = r.next_record()? {
            heap.push(Reverse((rec, i)));
        }
    }
    let mut out = RecordWriter::create(output)?;
    while let Some(Reverse((rec, i))) = heap.pop() {
        out.write(rec)?;
        if let Some(next) = readers[i].next_record()? {
            heap.push(Reverse((next, i)));
        }
    }
    out.finish()
}

/// Names and tracks the temporary run files of one sort; leftovers are
/// removed on drop so a failed sort does not leak files.
struct RunFiles {
    stem: PathBuf,
    counter: usize,
    all: Vec<PathBuf>,
}

impl RunFiles {
    fn new(output: &Path) -> Self {
        RunFiles {
            stem: output.to_path_buf(),
            counter: 0,
            all: Vec::new(),
        }
    }

    fn next_path(&mut self) -> PathBuf {
        let mut name = self.stem.clone().into_os_string();
        name.push(format!(".run{}", self.counter));
        self.counter += 1;
        let p = PathBuf::from(name);
        self.all.push(p.clone());
        p
    }
}

impl Drop for RunFiles {
    fn drop(&mut self) {
        for p in &self.all {
            let _ = fs::remove_file(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sort_via_disk(records: &[Record], budget: u64) -> Vec<Record> {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.bin");
        let output = dir.path().join("out.bin");
        write_records(&input, records).unwrap();
        external_sort_chunk(&input, &output, budget).unwrap();
        let sorted = read_records(&output).unwrap();
        // only the input and the output remain
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
        sorted
    }

    #[test]
    fn record_layout_is_little_endian() {
        let bytes = encode((1, 0x0203));
        assert_eq!(bytes[0], 1);
        assert_eq!(&bytes[1..8], &[0; 7]);
        assert_eq!(bytes[8], 3);
        assert_eq!(bytes[9], 2);
        assert_eq!(decode(&bytes), (1, 0x0203));
    }

    #[test]
    fn small_sort() {
        assert_eq!(
            sort_via_disk(&[(3, 1), (0, 2), (3, 0)], 2),
            vec![(0, 2), (3, 0), (3, 1)]
        );
    }

    #[test]
    fn sorted_input_unchanged() {
        let recs: Vec<Record> = (0..50).map(|i| (i / 3, i)).collect();
        assert_eq!(sort_via_disk(&recs, 7), recs);
    }

    #[test]
    fn empty_input() {
        assert!(sort_via_disk(&[], 4).is_empty());
    }

    #[test]
    fn large_random_matches_in_memory_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let recs: Vec<Record> = (0..100_000)
            .map(|_| (rng.gen_range(0..5000), rng.gen_range(0..5000)))
            .collect();
        let mut expected = recs.clone();
        expected.sort_unstable();
        assert_eq!(sort_via_disk(&recs, 1000), expected);
    }

    #[test]
    fn budget_of_one_needs_multiple_merge_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let recs: Vec<Record> = (0..300).map(|_| (rng.gen_range(0..20), rng.gen())).collect();
        let mut expected = recs.clone();
        expected.sort_unstable();
        assert_eq!(sort_via_disk(&recs, 1), expected);
    }
}
