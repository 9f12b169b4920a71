//! Complexity measures. A CtmEstimator wraps a sealed CTM frequency table
//! (1D for string blocks, or an ingested 2D block table for grids) and turns
//! counts into bits via the coding theorem: value(s) = -log2(count(s) /
//! total_halting). The additive constant of the coding theorem is set to 0;
//! every use here is comparative, where it cancels.
//!
//! BDM sums, over the distinct blocks of a non-overlapping tiling,
//! K_m(block) + log2(multiplicity). Trailing cells that do not fill a block
//! are dropped and reported. Blocks absent from the table follow the
//! estimator's fallback policy: error out, or charge one bit more than the
//! rarest block in the table (max_plus_one), flagged per report. When a grid
//! is decomposed against a 1D table the estimator runs in an explicitly
//! flagged "row-flatten" degraded mode: each d x d block costs the sum of its
//! rows' 1D values.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::bits::{BitGrid, BitString};
use crate::turing::CtmTable;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexityError {
    #[error("block {0} not in CTM table and fallback policy is error")]
    MissingString(String),
    #[error("CTM value of an empty string is undefined")]
    EmptyString,
    #[error("input of length {len} has no full block of length {block_len}")]
    AllDropped { len: usize, block_len: usize },
    #[error("grid {rows}x{cols} smaller than block size {d}")]
    GridTooSmall { rows: usize, cols: usize, d: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("maximum value is not positive; nothing to normalize by")]
    NonPositiveMax,
    #[error("CTM table holds no halting outputs")]
    EmptyTable,
}

/// What to do when a block is missing from the table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FallbackPolicy {
    Error,
    MaxPlusOne,
}

impl std::fmt::Display for FallbackPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FallbackPolicy::Error => "error",
            FallbackPolicy::MaxPlusOne => "max_plus_one",
        })
    }
}

/// An ingested 2D block frequency table (machines over a two-dimensional
/// tape). Never built locally; provenance arrives verbatim in `protocol`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridCtmTable {
    pub states: u32,
    pub symbols: u32,
    pub cutoff: u64,
    pub counts: BTreeMap<BitGrid, u64>,
    pub total_machines: u64,
    pub total_halting: u64,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub protocol: String,
    pub schema_version: u32,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BlockTable {
    OneD(CtmTable),
    TwoD(GridCtmTable),
}

/// A sealed table plus fallback policy; the unit every measure is computed
/// against.
#[derive(Clone, Debug)]
pub struct CtmEstimator {
    table: BlockTable,
    policy: FallbackPolicy,
    total_halting: u64,
    max_bits: f64,
}

impl CtmEstimator {
    pub fn new(table: BlockTable, policy: FallbackPolicy) -> Result<Self, ComplexityError> {
        let (total_halting, min_count) = match &table {
            BlockTable::OneD(t) => (t.total_halting, t.counts.values().min().copied()),
            BlockTable::TwoD(t) => (t.total_halting, t.counts.values().min().copied()),
        };
        let min_count = min_count.filter(|&c| c > 0).ok_or(ComplexityError::EmptyTable)?;
        if total_halting == 0 {
            return Err(ComplexityError::EmptyTable);
        }
        let max_bits = bits_of(min_count, total_halting);
        Ok(CtmEstimator { table, policy, total_halting, max_bits })
    }

    pub fn policy(&self) -> FallbackPolicy {
        self.policy
    }

    pub fn table(&self) -> &BlockTable {
        &self.table
    }

    /// Largest value any table entry can take; fallback charges one bit more.
    pub fn max_bits(&self) -> f64 {
        self.max_bits
    }

    /// True when grid blocks will be evaluated row by row against a 1D table.
    pub fn row_flatten(&self) -> bool {
        matches!(self.table, BlockTable::OneD(_))
    }

    /// Coding-theorem value of a string. Missing strings follow the fallback
    /// policy (a 2D table contains no strings, so everything falls back).
    pub fn ctm_value(&self, s: &BitString) -> Result<f64, ComplexityError> {
        if s.is_empty() {
            return Err(ComplexityError::EmptyString);
        }
        self.string_bits(s).map(|(v, _)| v)
    }

    fn fallback(&self, desc: impl Fn() -> String) -> Result<(f64, bool), ComplexityError> {
        match self.policy {
            FallbackPolicy::Error => Err(ComplexityError::MissingString(desc())),
            FallbackPolicy::MaxPlusOne => Ok((self.max_bits + 1.0, true)),
        }
    }

    fn string_bits(&self, s: &BitString) -> Result<(f64, bool), ComplexityError> {
        match &self.table {
            BlockTable::OneD(t) => match t.counts.get(s) {
                Some(&c) => Ok((bits_of(c, self.total_halting), false)),
                None => self.fallback(|| s.to_string()),
            },
            BlockTable::TwoD(_) => self.fallback(|| s.to_string()),
        }
    }

    /// Cost of one grid block: exact lookup against a 2D table, or the sum of
    /// per-row 1D values in row-flatten mode.
    fn grid_bits(&self, g: &BitGrid) -> Result<(f64, bool), ComplexityError> {
        match &self.table {
            BlockTable::TwoD(t) => match t.counts.get(g) {
                Some(&c) => Ok((bits_of(c, self.total_halting), false)),
                None => self.fallback(|| format!("{}x{}:{}", g.rows(), g.cols(), g.flatten())),
            },
            BlockTable::OneD(_) => {
                let mut total = 0.0;
                let mut fell_back = false;
                for r in 0..g.rows() {
                    let (v, fb) = self.string_bits(&g.row(r))?;
                    total += v;
                    fell_back |= fb;
                }
                Ok((total, fell_back))
            }
        }
    }
}

fn bits_of(count: u64, total: u64) -> f64 {
    (total as f64).log2() - (count as f64).log2()
}

/// The settings half of a BDM report; copied into perturbation reports.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct BdmSettings {
    pub block_size: usize,
    pub fallback_policy: FallbackPolicy,
    pub row_flatten: bool,
}

/// A block as it appears in a census: a string slice or a grid tile.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Block {
    Str(BitString),
    Grid(BitGrid),
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Block::Str(s) => write!(f, "{s}"),
            Block::Grid(g) => write!(f, "{}x{}:{}", g.rows(), g.cols(), g.flatten()),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct BdmReport {
    pub value: f64,
    pub block_size: usize,
    /// Distinct blocks with multiplicities, in canonical block order.
    pub block_census: Vec<(Block, u64)>,
    pub dropped_cells: usize,
    /// Distinct blocks whose value came from the fallback policy.
    pub fallback_blocks: usize,
    pub fallback_policy: FallbackPolicy,
    pub row_flatten: bool,
}

impl BdmReport {
    pub fn settings(&self) -> BdmSettings {
        BdmSettings {
            block_size: self.block_size,
            fallback_policy: self.fallback_policy,
            row_flatten: self.row_flatten,
        }
    }
}

/// BDM over consecutive non-overlapping blocks of `block_len` symbols; the
/// trailing remainder is dropped and reported.
pub fn bdm_string(
    est: &CtmEstimator,
    s: &BitString,
    block_len: usize,
) -> Result<BdmReport, ComplexityError> {
    assert!(block_len >= 1);
    if s.is_empty() {
        return Err(ComplexityError::EmptyString);
    }
    if s.len() < block_len {
        return Err(ComplexityError::AllDropped { len: s.len(), block_len });
    }
    let full = s.len() / block_len;
    let mut census: HashMap<BitString, u64> = HashMap::new();
    for i in 0..full {
        let bits = s.as_slice()[i * block_len..(i + 1) * block_len].to_vec();
        *census.entry(BitString::from_bits(bits).expect("bits are 0/1")).or_insert(0) += 1;
    }
    let census: BTreeMap<BitString, u64> = census.into_iter().collect();
    let mut value = 0.0;
    let mut fallback_blocks = 0;
    for (block, &mult) in &census {
        let (bits, fell_back) = est.string_bits(block)?;
        value += bits + (mult as f64).log2();
        fallback_blocks += usize::from(fell_back);
    }
    Ok(BdmReport {
        value,
        block_size: block_len,
        block_census: census.into_iter().map(|(b, m)| (Block::Str(b), m)).collect(),
        dropped_cells: s.len() % block_len,
        fallback_blocks,
        fallback_policy: est.policy(),
        row_flatten: false,
    })
}

/// BDM over the d x d tiling anchored at (0,0); trailing partial rows and
/// columns are dropped and reported as cells.
pub fn bdm_grid(est: &CtmEstimator, g: &BitGrid, d: usize) -> Result<BdmReport, ComplexityError> {
    assert!(d >= 1);
    if g.rows() < d || g.cols() < d {
        return Err(ComplexityError::GridTooSmall { rows: g.rows(), cols: g.cols(), d });
    }
    let block_rows = g.rows() / d;
    let block_cols = g.cols() / d;
    let mut census: HashMap<BitGrid, u64> = HashMap::new();
    for br in 0..block_rows {
        for bc in 0..block_cols {
            *census.entry(g.block(br * d, bc * d, d, d)).or_insert(0) += 1;
        }
    }
    let census: BTreeMap<BitGrid, u64> = census.into_iter().collect();
    let mut value = 0.0;
    let mut fallback_blocks = 0;
    for (block, &mult) in &census {
        let (bits, fell_back) = est.grid_bits(block)?;
        value += bits + (mult as f64).log2();
        fallback_blocks += usize::from(fell_back);
    }
    Ok(BdmReport {
        value,
        block_size: d,
        block_census: census.into_iter().map(|(b, m)| (Block::Grid(b), m)).collect(),
        dropped_cells: g.rows() * g.cols() - (block_rows * d) * (block_cols * d),
        fallback_blocks,
        fallback_policy: est.policy(),
        row_flatten: est.row_flatten(),
    })
}

/// Empirical entropy (bits per block) of the non-overlapping block
/// distribution.
pub fn shannon_block_entropy(s: &BitString, block_len: usize) -> Result<f64, ComplexityError> {
    assert!(block_len >= 1);
    if s.len() < block_len {
        return Err(ComplexityError::AllDropped { len: s.len(), block_len });
    }
    let full = s.len() / block_len;
    let mut census: HashMap<&[u8], u64> = HashMap::new();
    for i in 0..full {
        *census.entry(&s.as_slice()[i * block_len..(i + 1) * block_len]).or_insert(0) += 1;
    }
    let n = full as f64;
    let mut h = 0.0;
    for &count in census.values() {
        let p = count as f64 / n;
        h -= p * p.log2();
    }
    Ok(h)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LzwOutput {
    pub codes: Vec<u32>,
    pub bit_length: u64,
}

/// Classic LZW over the alphabet {0,1}, dictionary seeded with "0" -> 0 and
/// "1" -> 1. Emitted code width = ceil(log2(dictionary size before the
/// insertion this emission triggers)), minimum 1; the final code (which
/// triggers no insertion) uses the current dictionary size.
pub fn lzw_compress(s: &BitString) -> LzwOutput {
    let mut dict: HashMap<Vec<u8>, u32> = HashMap::new();
    dict.insert(vec![0], 0);
    dict.insert(vec![1], 1);
    let mut codes = Vec::new();
    let mut bit_length = 0u64;
    let mut w: Vec<u8> = Vec::new();
    for k in s.iter() {
        let mut candidate = w.clone();
        candidate.push(k);
        if dict.contains_key(&candidate) {
            w = candidate;
        } else {
            codes.push(dict[&w]);
            bit_length += code_width(dict.len());
            let next = dict.len() as u32;
            dict.insert(candidate, next);
            w.clear();
            w.push(k);
        }
    }
    if !w.is_empty() {
        codes.push(dict[&w]);
        bit_length += code_width(dict.len());
    }
    LzwOutput { codes, bit_length }
}

fn code_width(dict_size: usize) -> u64 {
    let width = usize::BITS - (dict_size - 1).leading_zeros();
    u64::from(width.max(1))
}

/// Divides every score by the maximum, which must be positive.
pub fn normalize_scores<K: Ord + Clone>(
    scores: &BTreeMap<K, f64>,
) -> Result<BTreeMap<K, f64>, ComplexityError> {
    if scores.is_empty() {
        return Err(ComplexityError::EmptyInput);
    }
    let max = scores.values().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if max.is_nan() || max <= 0.0 {
        return Err(ComplexityError::NonPositiveMax);
    }
    Ok(scores.iter().map(|(k, v)| (k.clone(), v / max)).collect())
}
