//! Append-only checkpoint log enabling interrupted runs to resume.
//!
//! Each record keys on the canonical tree path of a leaf (run index,
//! then one symbol per step: `L`/`R` bisection child, `N` narrowing, `P`
//! repair), so a resumed traversal can replay recorded verdicts instead
//! of recomputing them. Certified records carry the refined box with
//! hex-exact endpoint encoding; everything round-trips bit for bit.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use super::ExclusionReason;
use crate::interval::Interval;
use crate::model::ReducedBox;

const HEADER_TAG: &str = "CENCON-CKPT v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordKind {
    Excluded(u8),
    Undecided,
    Certified,
}

#[derive(Clone, Debug)]
pub struct Record {
    pub kind: RecordKind,
    /// Bit patterns (lo, hi) of the refined free coordinates.
    pub free_bits: Option<Vec<(u64, u64)>>,
    pub perm: Option<Vec<usize>>,
}

pub(crate) fn encode_exclusion(reason: ExclusionReason) -> u8 {
    match reason {
        ExclusionReason::Symmetry => 0,
        ExclusionReason::Ordering => 1,
        ExclusionReason::Collision => 2,
        ExclusionReason::Residual => 3,
        ExclusionReason::KrawczykEmpty => 4,
        ExclusionReason::OutOfSymmetry => 5,
    }
}

pub(crate) fn decode_exclusion(code: u8) -> ExclusionReason {
    match code {
        0 => ExclusionReason::Symmetry,
        1 => ExclusionReason::Ordering,
        2 => ExclusionReason::Collision,
        3 => ExclusionReason::Residual,
        4 => ExclusionReason::KrawczykEmpty,
        _ => ExclusionReason::OutOfSymmetry,
    }
}

impl Record {
    pub fn excluded(reason: ExclusionReason) -> Record {
        Record { kind: RecordKind::Excluded(encode_exclusion(reason)), free_bits: None, perm: None }
    }

    pub fn undecided() -> Record {
        Record { kind: RecordKind::Undecided, free_bits: None, perm: None }
    }

    pub fn certified(bx: &ReducedBox) -> Record {
        Record {
            kind: RecordKind::Certified,
            free_bits: Some(bx.free().iter().map(|c| (c.lo().to_bits(), c.hi().to_bits())).collect()),
            perm: Some(bx.perm.clone()),
        }
    }

    pub fn free_intervals(&self) -> Option<Vec<Interval>> {
        self.free_bits.as_ref().map(|bits| {
            bits.iter()
                .map(|&(lo, hi)| Interval::new(f64::from_bits(lo), f64::from_bits(hi)))
                .collect()
        })
    }
}

/// Serializer guarded by a mutex; the search appends from worker threads.
pub struct CheckpointWriter {
    inner: Mutex<BufWriter<std::fs::File>>,
}

impl CheckpointWriter {
    /// Creates (or appends to) a checkpoint file. A fresh file gets the
    /// header with the job fingerprint; an existing one must match it.
    pub fn open(path: &Path, fingerprint: u64) -> std::io::Result<CheckpointWriter> {
        let existed = path.exists();
        if existed {
            validate_header(path, fingerprint)?;
        }
        let file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        let mut w = BufWriter::new(file);
        if !existed {
            writeln!(w, "{HEADER_TAG} {fingerprint:016x}")?;
            w.flush()?;
        }
        Ok(CheckpointWriter { inner: Mutex::new(w) })
    }

    pub fn append(&self, path: &str, rec: &Record) {
        let mut line = String::with_capacity(32);
        match rec.kind {
            RecordKind::Excluded(code) => {
                line.push('X');
                line.push(' ');
                line.push_str(path);
                line.push(' ');
                line.push_str(&code.to_string());
            }
            RecordKind::Undecided => {
                line.push('U');
                line.push(' ');
                line.push_str(path);
            }
            RecordKind::Certified => {
                line.push('C');
                line.push(' ');
                line.push_str(path);
                line.push(' ');
                let perm = rec.perm.as_ref().expect("certified record has perm");
                line.push_str(
                    &perm.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
                );
                for &(lo, hi) in rec.free_bits.as_ref().expect("certified record has coords") {
                    line.push_str(&format!(" {lo:016x}:{hi:016x}"));
                }
            }
        }
        let mut w = self.inner.lock().expect("checkpoint writer poisoned");
        let _ = writeln!(w, "{line}");
    }

    pub fn flush(&self) -> std::io::Result<()> {
        self.inner.lock().expect("checkpoint writer poisoned").flush()
    }
}

impl Drop for CheckpointWriter {
    fn drop(&mut self) {
        if let Ok(mut w) = self.inner.lock() {
            let _ = w.flush();
        }
    }
}

fn validate_header(path: &Path, fingerprint: u64) -> std::io::Result<()> {
    let file = std::fs::File::open(path)?;
    let mut first = String::new();
    BufReader::new(file).read_line(&mut first)?;
    let want = format!("{HEADER_TAG} {fingerprint:016x}");
    if first.trim_end() != want {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("checkpoint belongs to a different job (header {first:?})"),
        ));
    }
    Ok(())
}

/// Loads a checkpoint file into a path-keyed map for replay.
pub struct CheckpointReader;

impl CheckpointReader {
    pub fn load(path: &Path, fingerprint: u64) -> std::io::Result<HashMap<String, Record>> {
        validate_header(path, fingerprint)?;
        let file = std::fs::File::open(path)?;
        let mut map = HashMap::new();
        for line in BufReader::new(file).lines().skip(1) {
            let line = line?;
            let mut parts = line.split(' ');
            let tag = parts.next().unwrap_or("");
            let Some(key) = parts.next() else { continue };
            match tag {
                "X" => {
                    let code = parts.next().and_then(|s| s.parse::<u8>().ok()).unwrap_or(3);
                    map.insert(key.to_string(), Record {
                        kind: RecordKind::Excluded(code),
                        free_bits: None,
                        perm: None,
                    });
                }
                "U" => {
                    map.insert(key.to_string(), Record::undecided());
                }
                "C" => {
                    let Some(perm_str) = parts.next() else { continue };
                    let perm: Option<Vec<usize>> =
                        perm_str.split(',').map(|t| t.parse::<usize>().ok()).collect();
                    let mut bits = Vec::new();
                    let mut ok = true;
                    for tok in parts {
                        match tok.split_once(':').and_then(|(a, b)| {
                            Some((u64::from_str_radix(a, 16).ok()?, u64::from_str_radix(b, 16).ok()?))
                        }) {
                            Some(pair) => bits.push(pair),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok && perm.is_some() {
                        map.insert(key.to_string(), Record {
                            kind: RecordKind::Certified,
                            free_bits: Some(bits),
                            perm,
                        });
                    }
                }
                _ => {}
            }
        }
        Ok(map)
    }
}

/// FNV-1a over the run-defining parameters; resuming refuses mismatches.
pub fn job_fingerprint(
    masses: &crate::model::Masses,
    dim: crate::model::Dim,
    x_max: f64,
    min_box_width: f64,
    ordering: bool,
) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    for m in masses.as_slice() {
        eat(m.lo().to_bits());
        eat(m.hi().to_bits());
    }
    eat(dim.d() as u64);
    eat(x_max.to_bits());
    eat(min_box_width.to_bits());
    eat(ordering as u64);
    h
}
