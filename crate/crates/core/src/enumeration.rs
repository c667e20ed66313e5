//! Exhaustive enumeration of halting witnesses with snapshot files.
//!
//! Programs are visited in order of length (3, 6, 9, ... bits) and
//! lexicographically within a length. Each candidate is executed once with
//! the full step budget; execution of a shared opcode prefix is computed once
//! and cloned, which yields exactly the outcomes of running every candidate
//! from scratch. The search is split across the eight leading opcodes and
//! merged into the canonical order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};
use crate::machine::{Budget, MachineKind, MachineState, Opcode, Program, RunStatus, ISA_VERSION};
use crate::rational::{pow2, Rational};
use crate::strings;

/// Largest program length accepted by [`enumerate_witnesses`].
pub const HARD_CAP_LEN: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub program: Program,
    pub output: Vec<u8>,
    /// Condition symbols consumed.
    pub k: usize,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSet {
    pub kind: MachineKind,
    pub condition: Option<Vec<u8>>,
    pub max_len: usize,
    pub max_steps: u64,
    pub witnesses: Vec<Witness>,
}

impl WitnessSet {
    /// Exact `Σ 2^-ℓ(p)` over the witness programs.
    pub fn kraft_sum(&self) -> Rational {
        self.witnesses
            .iter()
            .map(|w| pow2(-(w.program.len() as i64)))
            .sum()
    }

    pub fn is_prefix_free(&self) -> bool {
        let programs: Vec<&[u8]> = self.witnesses.iter().map(|w| w.program.bits()).collect();
        strings::is_prefix_free(&programs)
    }

    /// Shortest witness with the given output.
    pub fn shortest_for(&self, output: &[u8]) -> Option<&Witness> {
        // Witnesses are sorted by length, so the first hit is minimal.
        self.witnesses.iter().find(|w| w.output == output)
    }

    fn canonical_sort(&mut self) {
        self.witnesses.sort_by(|a, b| {
            (a.program.len(), a.program.bits()).cmp(&(b.program.len(), b.program.bits()))
        });
    }
}

fn check_len(max_len: usize) -> Result<()> {
    if max_len > HARD_CAP_LEN {
        return Err(LabError::BudgetCap {
            what: "program length",
            value: max_len as u64,
            cap: HARD_CAP_LEN as u64,
        });
    }
    Ok(())
}

fn search(
    state: MachineState<'_>,
    prefix: &mut Vec<u8>,
    max_len: usize,
    found: &mut Vec<Witness>,
) {
    if prefix.len() + 3 > max_len {
        return;
    }
    for op in Opcode::ALL {
        let mut next = state.clone();
        let status = next.exec(op);
        prefix.extend(op.bits());
        match status {
            Some(RunStatus::Halted) => found.push(Witness {
                program: Program::new(prefix.clone()),
                output: next.output().to_vec(),
                k: next.consumed_condition(),
                steps: next.steps(),
            }),
            Some(_) => {}
            None => search(next, prefix, max_len, found),
        }
        prefix.truncate(prefix.len() - 3);
    }
}

/// All halting runs of `kind` on `condition` whose program is at most
/// `max_len` bits and which finish within `max_steps` steps.
pub fn enumerate_witnesses(
    kind: MachineKind,
    condition: Option<&[u8]>,
    max_len: usize,
    max_steps: u64,
) -> Result<WitnessSet> {
    check_len(max_len)?;
    let budget = Budget::new(max_steps, Budget::DEFAULT_MAX_OUTPUT)?;
    let root = MachineState::new(kind, condition, budget);
    let parts: Vec<Vec<Witness>> = Opcode::ALL
        .par_iter()
        .map(|&first| {
            let mut found = Vec::new();
            if max_len < 3 {
                return found;
            }
            let mut state = root.clone();
            let mut prefix = first.bits().to_vec();
            match state.exec(first) {
                Some(RunStatus::Halted) => found.push(Witness {
                    program: Program::new(prefix),
                    output: state.output().to_vec(),
                    k: state.consumed_condition(),
                    steps: state.steps(),
                }),
                Some(_) => {}
                None => search(state, &mut prefix, max_len, &mut found),
            }
            found
        })
        .collect();
    let mut set = WitnessSet {
        kind,
        condition: condition.map(<[u8]>::to_vec),
        max_len,
        max_steps,
        witnesses: parts.into_iter().flatten().collect(),
    };
    set.canonical_sort();
    Ok(set)
}

// ---------------------------------------------------------------------------
// Snapshot files

const MAGIC: &str = "kstar-lab-witnesses";

fn bits_field(bits: &[u8]) -> String {
    if bits.is_empty() {
        "-".into()
    } else {
        strings::show(bits)
    }
}

fn parse_bits_field(s: &str) -> Result<Vec<u8>> {
    if s == "-" {
        Ok(Vec::new())
    } else {
        strings::parse_bits(s)
    }
}

/// `<bit length>:<hex of the bits packed MSB first>`, or `-` when absent.
pub fn condition_hex(condition: Option<&[u8]>) -> String {
    let Some(c) = condition else {
        return "-".into();
    };
    let bytes: Vec<u8> = c
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)))
        })
        .collect();
    format!("{}:{}", c.len(), hex::encode(bytes))
}

fn parse_condition_hex(s: &str) -> Option<Option<Vec<u8>>> {
    if s == "-" {
        return Some(None);
    }
    let (len, hx) = s.split_once(':')?;
    let len: usize = len.parse().ok()?;
    let bytes = hex::decode(hx).ok()?;
    if bytes.len() != len.div_ceil(8) {
        return None;
    }
    Some(Some(
        (0..len).map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1).collect(),
    ))
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

fn render(set: &WitnessSet) -> String {
    let cond = condition_hex(set.condition.as_deref());
    let mut body = String::new();
    writeln!(
        body,
        "{MAGIC} isa={ISA_VERSION} kind={} condition={cond} L={} S={} count={}",
        set.kind.name(),
        set.max_len,
        set.max_steps,
        set.witnesses.len()
    )
    .unwrap();
    for w in &set.witnesses {
        writeln!(
            body,
            "{}\t{cond}\t{}\t{}\t{}\t{}",
            set.kind.name(),
            w.program,
            bits_field(&w.output),
            w.k,
            w.steps
        )
        .unwrap();
    }
    let d = digest(&body);
    body.push_str(&format!("digest sha256={d}\n"));
    body
}

pub fn store_snapshot(set: &WitnessSet, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    fs::write(path, render(set)).map_err(|e| LabError::io(path, e))
}

fn header_field<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    header
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
}

pub fn load_snapshot(path: &Path) -> Result<WitnessSet> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    parse_snapshot(&text, path)
}

fn parse_snapshot(text: &str, path: &Path) -> Result<WitnessSet> {
    let malformed = |line: usize, reason: &str| LabError::MalformedSnapshot {
        line,
        reason: reason.into(),
    };
    let lines: Vec<&str> = text.lines().collect();
    let header = *lines.first().ok_or_else(|| malformed(1, "empty file"))?;
    if !header.starts_with(MAGIC) {
        return Err(malformed(1, "missing header"));
    }
    let isa: u32 = header_field(header, "isa")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| malformed(1, "missing isa tag"))?;
    if isa != ISA_VERSION {
        return Err(LabError::IsaVersion {
            found: isa,
            expected: ISA_VERSION,
        });
    }
    let footer = lines
        .last()
        .and_then(|l| l.strip_prefix("digest sha256="))
        .ok_or_else(|| malformed(lines.len(), "missing digest footer"))?;
    let body_end = text.len() - lines.last().unwrap().len() - 1;
    if digest(&text[..body_end]) != footer {
        return Err(LabError::DigestMismatch {
            path: path.to_path_buf(),
        });
    }

    let kind: MachineKind = header_field(header, "kind")
        .ok_or_else(|| malformed(1, "missing kind"))?
        .parse()?;
    let cond_field = header_field(header, "condition").ok_or_else(|| malformed(1, "missing condition"))?;
    let condition = parse_condition_hex(cond_field).ok_or_else(|| malformed(1, "bad condition"))?;
    let max_len = header_field(header, "L")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| malformed(1, "missing L"))?;
    let max_steps = header_field(header, "S")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| malformed(1, "missing S"))?;
    let count: usize = header_field(header, "count")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| malformed(1, "missing count"))?;

    let mut witnesses = Vec::with_capacity(count);
    for (i, line) in lines[1..lines.len() - 1].iter().enumerate() {
        let lineno = i + 2;
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 6 {
            return Err(malformed(lineno, "expected 6 fields"));
        }
        if f[0] != kind.name() || f[1] != cond_field {
            return Err(malformed(lineno, "record disagrees with header"));
        }
        witnesses.push(Witness {
            program: Program::new(parse_bits_field(f[2])?),
            output: parse_bits_field(f[3])?,
            k: f[4].parse().map_err(|_| malformed(lineno, "bad k"))?,
            steps: f[5].parse().map_err(|_| malformed(lineno, "bad steps"))?,
        });
    }
    if witnesses.len() != count {
        return Err(malformed(lines.len(), "record count disagrees with header"));
    }
    Ok(WitnessSet {
        kind,
        condition,
        max_len,
        max_steps,
        witnesses,
    })
}

// ---------------------------------------------------------------------------
// Cache

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct CacheKey {
    kind: MachineKind,
    condition: Option<Vec<u8>>,
    max_len: usize,
    max_steps: u64,
}

/// In-memory witness-set cache, optionally backed by snapshot files.
#[derive(Debug, Default)]
pub struct WitnessCache {
    dir: Option<PathBuf>,
    sets: Mutex<HashMap<CacheKey, Arc<WitnessSet>>>,
}

impl WitnessCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        WitnessCache {
            dir: Some(dir.into()),
            sets: Mutex::default(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// File name for a cache entry; the key covers kind, condition, budgets and ISA version.
    pub fn file_name(kind: MachineKind, condition: Option<&[u8]>, max_len: usize, max_steps: u64) -> String {
        let cond = condition_hex(condition).replace(':', "_");
        format!("{}-c{cond}-L{max_len}-S{max_steps}-isa{ISA_VERSION}.wit", kind.name())
    }

    pub fn get(
        &self,
        kind: MachineKind,
        condition: Option<&[u8]>,
        max_len: usize,
        max_steps: u64,
    ) -> Result<Arc<WitnessSet>> {
        let key = CacheKey {
            kind,
            condition: condition.map(<[u8]>::to_vec),
            max_len,
            max_steps,
        };
        if let Some(set) = self.sets.lock().unwrap().get(&key) {
            return Ok(Arc::clone(set));
        }
        let set = match &self.dir {
            Some(dir) => {
                let path = dir.join(Self::file_name(kind, condition, max_len, max_steps));
                if path.exists() {
                    load_snapshot(&path)?
                } else {
                    let set = enumerate_witnesses(kind, condition, max_len, max_steps)?;
                    store_snapshot(&set, &path)?;
                    set
                }
            }
            None => enumerate_witnesses(kind, condition, max_len, max_steps)?,
        };
        let set = Arc::new(set);
        self.sets.lock().unwrap().insert(key, Arc::clone(&set));
        Ok(set)
    }
}
