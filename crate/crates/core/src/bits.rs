//! Binary strings and dense row-major binary grids, plus the two text
//! serializations everything else relies on: plain 0/1 strings and ASCII PBM
//! (P1) images. Both types are immutable values for all practical purposes;
//! the few mutators exist so builders can assemble them in place.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid character at position {0}: expected '0' or '1'")]
    InvalidCharacter(usize),
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("rows have unequal lengths")]
    DimensionMismatch,
    #[error("cell count {got} does not match {rows}x{cols}")]
    SizeMismatch { rows: usize, cols: usize, got: usize },
    #[error("not a P1 PBM image")]
    BadMagic,
    #[error("malformed PBM header")]
    BadHeader,
}

/// An ordered sequence of 0/1 symbols. Ordering is by length first, then by
/// numeric value (most significant bit first), so "1" < "00" < "01".
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    pub fn new() -> Self {
        BitString { bits: Vec::new() }
    }

    /// Builds from raw symbols; every element must be 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, BitsError> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(BitsError::InvalidCharacter(pos));
        }
        Ok(BitString { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bits
            .len()
            .cmp(&other.bits.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl std::str::FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, BitsError> {
        parse_bits(s)
    }
}

/// Maps '0'/'1' text to a BitString; any other character is rejected with its
/// byte position.
pub fn parse_bits(text: &str) -> Result<BitString, BitsError> {
    let mut bits = Vec::with_capacity(text.len());
    for (pos, ch) in text.chars().enumerate() {
        match ch {
            '0' => bits.push(0),
            '1' => bits.push(1),
            _ => return Err(BitsError::InvalidCharacter(pos)),
        }
    }
    Ok(BitString { bits })
}

pub fn format_bits(s: &BitString) -> String {
    s.to_string()
}

/// A rows x cols binary matrix, row-major, with rows >= 1 and cols >= 1.
/// Ordering is (rows, cols, row-major cells), the canonical order used by
/// table serialization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitGrid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl BitGrid {
    /// All-zero grid.
    pub fn zero(rows: usize, cols: usize) -> Result<Self, BitsError> {
        if rows == 0 || cols == 0 {
            return Err(BitsError::EmptyGrid);
        }
        Ok(BitGrid { rows, cols, cells: vec![0; rows * cols] })
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<u8>) -> Result<Self, BitsError> {
        if rows == 0 || cols == 0 {
            return Err(BitsError::EmptyGrid);
        }
        if cells.len() != rows * cols {
            return Err(BitsError::SizeMismatch { rows, cols, got: cells.len() });
        }
        if let Some(pos) = cells.iter().position(|&b| b > 1) {
            return Err(BitsError::InvalidCharacter(pos));
        }
        Ok(BitGrid { rows, cols, cells })
    }

    pub fn from_rows(rows: &[BitString]) -> Result<Self, BitsError> {
        let Some(first) = rows.first() else {
            return Err(BitsError::EmptyGrid);
        };
        let cols = first.len();
        if cols == 0 {
            return Err(BitsError::EmptyGrid);
        }
        let mut cells = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(BitsError::DimensionMismatch);
            }
            cells.extend_from_slice(row.as_slice());
        }
        Ok(BitGrid { rows: rows.len(), cols, cells })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.rows && c < self.cols);
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        assert!(r < self.rows && c < self.cols);
        debug_assert!(bit <= 1);
        self.cells[r * self.cols + c] = bit;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row(&self, r: usize) -> BitString {
        assert!(r < self.rows);
        BitString { bits: self.cells[r * self.cols..(r + 1) * self.cols].to_vec() }
    }

    /// Row-major flattening into a single string.
    pub fn flatten(&self) -> BitString {
        BitString { bits: self.cells.clone() }
    }

    /// Copies the h x w sub-rectangle anchored at (r0, c0).
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> BitGrid {
        assert!(h >= 1 && w >= 1 && r0 + h <= self.rows && c0 + w <= self.cols);
        let mut cells = Vec::with_capacity(h * w);
        for r in r0..r0 + h {
            cells.extend_from_slice(&self.cells[r * self.cols + c0..r * self.cols + c0 + w]);
        }
        BitGrid { rows: h, cols: w, cells }
    }
}

impl fmt::Debug for BitGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGrid({}x{})[", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("/")?;
            }
            write!(f, "{}", self.row(r))?;
        }
        f.write_str("]")
    }
}

/// Serializes a grid as an ASCII PBM "P1" image, 1 = black. Header line, then
/// one line per row with space-separated bits. Canonical: equal grids always
/// produce identical bytes.
pub fn render_pbm(grid: &BitGrid) -> Vec<u8> {
    let mut out = String::with_capacity(grid.rows * (2 * grid.cols + 1) + 16);
    out.push_str("P1\n");
    out.push_str(&format!("{} {}\n", grid.cols, grid.rows));
    for r in 0..grid.rows {
        for c in 0..grid.cols {
            if c > 0 {
                out.push(' ');
            }
            out.push(if grid.get(r, c) == 0 { '0' } else { '1' });
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// Reads an ASCII PBM "P1" image. Accepts '#' comments, arbitrary whitespace,
/// and packed digits; the bit count must match the header dimensions exactly.
pub fn parse_pbm(bytes: &[u8]) -> Result<BitGrid, BitsError> {
    let mut tokens = PbmTokens::new(bytes);
    let magic = tokens.word().ok_or(BitsError::BadMagic)?;
    if magic != "P1" {
        return Err(BitsError::BadMagic);
    }
    let cols: usize = tokens
        .word()
        .and_then(|w| w.parse().ok())
        .filter(|&n| n > 0)
        .ok_or(BitsError::BadHeader)?;
    let rows: usize = tokens
        .word()
        .and_then(|w| w.parse().ok())
        .filter(|&n| n > 0)
        .ok_or(BitsError::BadHeader)?;
    let mut cells = Vec::with_capacity(rows * cols);
    while let Some((pos, ch)) = tokens.digit() {
        match ch {
            b'0' => cells.push(0),
            b'1' => cells.push(1),
            _ => return Err(BitsError::InvalidCharacter(pos)),
        }
        if cells.len() > rows * cols {
            return Err(BitsError::SizeMismatch { rows, cols, got: cells.len() });
        }
    }
    BitGrid::from_cells(rows, cols, cells)
}

/// Tokenizer over PBM text: skips whitespace and '#' comments; offers both
/// whole-word reads (header) and single-character reads (packed raster).
struct PbmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PbmTokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        PbmTokens { bytes, pos: 0 }
    }

    fn skip_filler(&mut self) {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.bytes[start..self.pos]).ok()
        }
    }

    fn digit(&mut self) -> Option<(usize, u8)> {
        self.skip_filler();
        if self.pos >= self.bytes.len() {
            return None;
        }
        let ch = self.bytes[self.pos];
        self.pos += 1;
        Some((self.pos - 1, ch))
    }
}
