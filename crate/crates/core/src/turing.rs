//! Enumeration and bounded simulation of the (n-state, 2-symbol) Turing
//! machine space, and construction of CTM frequency tables.
//!
//! The formalism is the Busy-Beaver one with halting folded into the
//! transition entries: each of the 2n (state, read) entries picks one of
//! 4n + 2 transitions, so the space holds (4n+2)^(2n) machines. A machine is
//! a mixed-radix numeral in base 4n+2 whose digit k (least significant first)
//! is the entry for (state k/2 + 1, read k%2). Within an entry the 4n moving
//! transitions come first, ordered lexicographically by (write, move L<R,
//! next state), followed by (write 0, HALT) and (write 1, HALT).
//!
//! Runs start in state 1 on an all-zero two-way tape with the head on cell 0.
//! Executing a HALT entry writes its bit and counts as the final step; the
//! output is the contents of every cell the head ever occupied, leftmost to
//! rightmost. Known Busy-Beaver step bounds certify exhaustive halting
//! classification for n <= 4; beyond that (or below the bound) tables are
//! marked censored in their protocol metadata because slow halters are
//! indistinguishable from non-halters.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::BitString;

pub const SCHEMA_VERSION: u32 = 1;

/// Tape cells allocated per side; keeps accidental huge cutoffs from
/// exhausting memory (the head moves at most one cell per step).
const MAX_CUTOFF: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("machine space (states={states}) exceeds the representable machine count")]
    Overflow { states: u32 },
    #[error("machine index {index} outside [0,{count})")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("invalid machine space: {0}")]
    InvalidSpace(String),
    #[error("invalid machine spec: {0}")]
    InvalidSpec(String),
    #[error("tables disagree on space or protocol: {0}")]
    SpaceMismatch(String),
    #[error("index ranges overlap at [{0},{1})")]
    OverlappingRanges(u64, u64),
}

/// The space of all (states, 2) machines run to a step cutoff.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TmSpace {
    pub states: u32,
    pub cutoff: u64,
}

impl TmSpace {
    pub fn new(states: u32, cutoff: u64) -> Result<Self, TmError> {
        if states == 0 {
            return Err(TmError::InvalidSpace("states must be >= 1".into()));
        }
        if cutoff == 0 || cutoff > MAX_CUTOFF {
            return Err(TmError::InvalidSpace(format!(
                "cutoff must be in [1,{MAX_CUTOFF}]"
            )));
        }
        Ok(TmSpace { states, cutoff })
    }

    pub const fn symbols(&self) -> u32 {
        2
    }

    /// True when the cutoff does not certify every halter was caught.
    pub fn censored(&self) -> bool {
        match certified_max_steps(self.states) {
            Some(bound) => self.cutoff < bound,
            None => true,
        }
    }

    /// Canonical free-text protocol descriptor stored in table metadata.
    pub fn protocol(&self) -> String {
        let mut p = String::from(
            "rado-(4n+2);blank=0;start=state1;halt-writes-no-move;output=visited-window",
        );
        if self.censored() {
            p.push_str(";censored");
        }
        p
    }
}

/// Known Busy-Beaver step records S(n): the longest any halting machine runs.
pub fn certified_max_steps(states: u32) -> Option<u64> {
    match states {
        1 => Some(1),
        2 => Some(6),
        3 => Some(21),
        4 => Some(107),
        _ => None,
    }
}

/// Smallest certified cutoff (bound + 1 margin) for spaces with a known
/// Busy-Beaver record.
pub fn default_cutoff(states: u32) -> Option<u64> {
    certified_max_steps(states).map(|s| s + 1)
}

pub fn machine_count(space: &TmSpace) -> Result<u64, TmError> {
    let base = 4 * u64::from(space.states) + 2;
    base.checked_pow(2 * space.states)
        .ok_or(TmError::Overflow { states: space.states })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dir {
    L,
    R,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Action {
    Move { dir: Dir, next: u32 },
    Halt,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Transition {
    pub write: u8,
    pub action: Action,
}

/// One machine: entries[2*(state-1) + read] gives the transition.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TmSpec {
    pub space: TmSpace,
    pub entries: Vec<Transition>,
}

fn decode_digit(digit: u64, states: u32) -> Transition {
    let n = u64::from(states);
    if digit < 4 * n {
        let write = (digit / (2 * n)) as u8;
        let rem = digit % (2 * n);
        let dir = if rem / n == 0 { Dir::L } else { Dir::R };
        let next = (rem % n) as u32 + 1;
        Transition { write, action: Action::Move { dir, next } }
    } else {
        Transition { write: (digit - 4 * n) as u8, action: Action::Halt }
    }
}

fn encode_digit(t: &Transition, states: u32) -> Result<u64, TmError> {
    let n = u64::from(states);
    match t.action {
        Action::Halt => Ok(4 * n + u64::from(t.write)),
        Action::Move { dir, next } => {
            if next == 0 || u64::from(next) > n {
                return Err(TmError::InvalidSpec(format!("next state {next} outside [1,{n}]")));
            }
            let dir_part = match dir {
                Dir::L => 0,
                Dir::R => 1,
            };
            Ok(u64::from(t.write) * 2 * n + dir_part * n + (u64::from(next) - 1))
        }
    }
}

fn decode_entries(space: &TmSpace, index: u64, out: &mut Vec<Transition>) {
    let base = 4 * u64::from(space.states) + 2;
    out.clear();
    let mut rem = index;
    for _ in 0..2 * space.states {
        out.push(decode_digit(rem % base, space.states));
        rem /= base;
    }
}

pub fn decode_machine(space: &TmSpace, index: u64) -> Result<TmSpec, TmError> {
    let count = machine_count(space)?;
    if index >= count {
        return Err(TmError::IndexOutOfRange { index, count });
    }
    let mut entries = Vec::with_capacity(2 * space.states as usize);
    decode_entries(space, index, &mut entries);
    Ok(TmSpec { space: *space, entries })
}

/// Inverse of decode_machine.
pub fn encode_machine(spec: &TmSpec) -> Result<u64, TmError> {
    let n = spec.space.states;
    if spec.entries.len() != 2 * n as usize {
        return Err(TmError::InvalidSpec(format!(
            "expected {} entries, got {}",
            2 * n,
            spec.entries.len()
        )));
    }
    let base = 4 * u64::from(n) + 2;
    let mut index = 0u64;
    for t in spec.entries.iter().rev() {
        index = index * base + encode_digit(t, n)?;
    }
    Ok(index)
}

#[derive(Clone, PartialEq, Debug)]
pub struct RunResult {
    pub halted: bool,
    pub steps: u64,
    pub output: Option<BitString>,
    pub visited_span: usize,
}

/// Reusable tape buffer; the head starts at the center and can move at most
/// cutoff cells either way.
struct Simulator {
    tape: Vec<u8>,
    cutoff: u64,
}

impl Simulator {
    fn new(cutoff: u64) -> Self {
        Simulator { tape: vec![0; 2 * cutoff as usize + 1], cutoff }
    }

    fn run(&mut self, entries: &[Transition]) -> RunResult {
        self.tape.fill(0);
        let mut pos = self.cutoff as usize;
        let mut lo = pos;
        let mut hi = pos;
        let mut state = 1u32;
        let mut steps = 0u64;
        while steps < self.cutoff {
            steps += 1;
            let t = entries[2 * (state as usize - 1) + self.tape[pos] as usize];
            self.tape[pos] = t.write;
            match t.action {
                Action::Halt => {
                    let output = BitString::from_bits(self.tape[lo..=hi].to_vec())
                        .expect("tape holds only 0/1");
                    return RunResult {
                        halted: true,
                        steps,
                        output: Some(output),
                        visited_span: hi - lo + 1,
                    };
                }
                Action::Move { dir, next } => {
                    match dir {
                        Dir::L => pos -= 1,
                        Dir::R => pos += 1,
                    }
                    lo = lo.min(pos);
                    hi = hi.max(pos);
                    state = next;
                }
            }
        }
        RunResult { halted: false, steps, output: None, visited_span: hi - lo + 1 }
    }
}

/// Simulates one machine for at most `cutoff` steps. Running out of steps is
/// a result (halted = false), not an error.
pub fn run_machine(spec: &TmSpec, cutoff: u64) -> RunResult {
    Simulator::new(cutoff).run(&spec.entries)
}

/// Halting-output frequency table over a machine space (or an index range of
/// it). Sealed after construction; mutate nothing, merge instead.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CtmTable {
    pub space: TmSpace,
    pub counts: BTreeMap<BitString, u64>,
    pub total_machines: u64,
    pub total_halting: u64,
    /// Half-open enumerated index ranges, sorted and disjoint; empty for
    /// sampled tables.
    pub ranges: Vec<(u64, u64)>,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub protocol: String,
    pub schema_version: u32,
}

/// Runs every machine in `range` (the whole space when absent) and tallies
/// halting outputs. The result depends only on the set of indices covered,
/// never on traversal order or partitioning.
pub fn build_ctm_table(space: &TmSpace, range: Option<(u64, u64)>) -> Result<CtmTable, TmError> {
    let count = machine_count(space)?;
    let (lo, hi) = range.unwrap_or((0, count));
    if lo > hi || hi > count {
        return Err(TmError::IndexOutOfRange { index: hi, count });
    }
    let mut raw: HashMap<BitString, u64> = HashMap::new();
    let mut entries = Vec::with_capacity(2 * space.states as usize);
    let mut sim = Simulator::new(space.cutoff);
    let mut total_halting = 0u64;
    for index in lo..hi {
        decode_entries(space, index, &mut entries);
        let res = sim.run(&entries);
        if res.halted {
            total_halting += 1;
            *raw.entry(res.output.expect("halted runs have output")).or_insert(0) += 1;
        }
    }
    Ok(CtmTable {
        space: *space,
        counts: raw.into_iter().collect(),
        total_machines: hi - lo,
        total_halting,
        ranges: if lo < hi { vec![(lo, hi)] } else { Vec::new() },
        exhaustive: true,
        seed: None,
        protocol: space.protocol(),
        schema_version: SCHEMA_VERSION,
    })
}

/// Splits the range into `threads` contiguous chunks built on scoped threads
/// and merged in index order; byte-identical to the single-threaded build.
pub fn build_ctm_table_parallel(
    space: &TmSpace,
    range: Option<(u64, u64)>,
    threads: usize,
) -> Result<CtmTable, TmError> {
    let count = machine_count(space)?;
    let (lo, hi) = range.unwrap_or((0, count));
    if lo > hi || hi > count {
        return Err(TmError::IndexOutOfRange { index: hi, count });
    }
    let threads = threads.max(1).min(((hi - lo).max(1)) as usize);
    if threads == 1 {
        return build_ctm_table(space, Some((lo, hi)));
    }
    let len = hi - lo;
    let chunk = len / threads as u64;
    let extra = len % threads as u64;
    let mut bounds = Vec::with_capacity(threads + 1);
    let mut at = lo;
    bounds.push(at);
    for i in 0..threads as u64 {
        at += chunk + u64::from(i < extra);
        bounds.push(at);
    }
    let shards: Vec<Result<CtmTable, TmError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = bounds
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                scope.spawn(move || build_ctm_table(space, Some((a, b))))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut merged: Option<CtmTable> = None;
    for shard in shards {
        let shard = shard?;
        merged = Some(match merged {
            None => shard,
            Some(t) => merge_ctm_tables(&t, &shard)?,
        });
    }
    Ok(merged.expect("at least one shard"))
}

/// Estimates the table from `samples` uniformly random machine indices drawn
/// from a seeded ChaCha8 stream. Sampled tables are flagged non-exhaustive,
/// carry their seed, and cannot be merged (no disjointness certificate).
pub fn sample_ctm_table(space: &TmSpace, samples: u64, seed: u64) -> Result<CtmTable, TmError> {
    let count = machine_count(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: HashMap<BitString, u64> = HashMap::new();
    let mut entries = Vec::with_capacity(2 * space.states as usize);
    let mut sim = Simulator::new(space.cutoff);
    let mut total_halting = 0u64;
    for _ in 0..samples {
        let index = rng.random_range(0..count);
        decode_entries(space, index, &mut entries);
        let res = sim.run(&entries);
        if res.halted {
            total_halting += 1;
            *raw.entry(res.output.expect("halted runs have output")).or_insert(0) += 1;
        }
    }
    Ok(CtmTable {
        space: *space,
        counts: raw.into_iter().collect(),
        total_machines: samples,
        total_halting,
        ranges: Vec::new(),
        exhaustive: false,
        seed: Some(seed),
        protocol: space.protocol(),
        schema_version: SCHEMA_VERSION,
    })
}

fn coalesce(mut ranges: Vec<(u64, u64)>) -> Result<Vec<(u64, u64)>, TmError> {
    ranges.sort_unstable();
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(ranges.len());
    for (lo, hi) in ranges {
        match out.last_mut() {
            Some(last) if lo < last.1 => return Err(TmError::OverlappingRanges(lo, last.1.min(hi))),
            Some(last) if lo == last.1 => last.1 = hi,
            _ => out.push((lo, hi)),
        }
    }
    Ok(out)
}

/// Pointwise count addition of two shards of the same enumeration;
/// associative and commutative.
pub fn merge_ctm_tables(a: &CtmTable, b: &CtmTable) -> Result<CtmTable, TmError> {
    if a.space != b.space {
        return Err(TmError::SpaceMismatch(format!(
            "({},{}) cutoff {} vs ({},{}) cutoff {}",
            a.space.states,
            a.space.symbols(),
            a.space.cutoff,
            b.space.states,
            b.space.symbols(),
            b.space.cutoff
        )));
    }
    if a.schema_version != b.schema_version {
        return Err(TmError::SpaceMismatch("schema versions differ".into()));
    }
    if a.protocol != b.protocol {
        return Err(TmError::SpaceMismatch("protocols differ".into()));
    }
    if !(a.exhaustive && b.exhaustive) {
        return Err(TmError::SpaceMismatch(
            "sampled tables carry no disjoint index ranges and cannot be merged".into(),
        ));
    }
    let ranges = coalesce(a.ranges.iter().chain(&b.ranges).copied().collect())?;
    let mut counts = a.counts.clone();
    for (key, add) in &b.counts {
        *counts.entry(key.clone()).or_insert(0) += add;
    }
    Ok(CtmTable {
        space: a.space,
        counts,
        total_machines: a.total_machines + b.total_machines,
        total_halting: a.total_halting + b.total_halting,
        ranges,
        exhaustive: true,
        seed: None,
        protocol: a.protocol.clone(),
        schema_version: a.schema_version,
    })
}
