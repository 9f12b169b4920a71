//! Persistence: the CTM table text format and CSV/JSON result export.
//!
//! A table file is UTF-8: "key=value" header lines, one blank line, then one
//! record per output object. 1D records are "<bits>,<count>" sorted by
//! (length, numeric value); 2D records are "RxC:<row-major bits>,<count>"
//! sorted by (rows, cols, value). The form is canonical: equal tables always
//! serialize to identical bytes, so files can be pinned by content hash.
//! Exhaustive 1D tables carry their enumerated index ranges ("ranges=lo..hi,
//! ..."), which is what makes shard merging safe; sampled tables carry their
//! seed instead. The loader validates the count-sum invariant, record
//! ordering, and range provenance, and never invents missing metadata.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::aid::PerturbationReport;
use crate::bench::BenchExportRow;
use crate::bits::{parse_bits, BitGrid};
use crate::complexity::{BdmReport, GridCtmTable};
use crate::turing::{CtmTable, TmSpace};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("sink failure: {0}")]
    SinkFailure(#[from] std::io::Error),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("body counts sum to {got}, header total_halting is {want}")]
    ChecksumMismatch { want: u64, got: u64 },
    #[error("bad record at line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("nothing to export")]
    EmptyInput,
}

fn bad(line: usize, message: impl Into<String>) -> IoError {
    IoError::BadRecord { line, message: message.into() }
}

#[derive(Clone, PartialEq, Debug)]
pub enum LoadedTable {
    OneD(CtmTable),
    TwoD(GridCtmTable),
}

fn ranges_text(ranges: &[(u64, u64)]) -> String {
    ranges
        .iter()
        .map(|(lo, hi)| format!("{lo}..{hi}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn save_ctm_table(t: &CtmTable, sink: &mut dyn Write) -> Result<(), IoError> {
    debug_assert!(!t.protocol.contains('\n'));
    writeln!(sink, "schema_version={}", t.schema_version)?;
    writeln!(sink, "dimensionality=1D")?;
    writeln!(sink, "states={}", t.space.states)?;
    writeln!(sink, "symbols={}", t.space.symbols())?;
    writeln!(sink, "cutoff={}", t.space.cutoff)?;
    writeln!(sink, "total_machines={}", t.total_machines)?;
    writeln!(sink, "total_halting={}", t.total_halting)?;
    writeln!(sink, "exhaustive={}", t.exhaustive)?;
    writeln!(sink, "protocol={}", t.protocol)?;
    if let Some(seed) = t.seed {
        writeln!(sink, "seed={seed}")?;
    }
    if !t.ranges.is_empty() {
        writeln!(sink, "ranges={}", ranges_text(&t.ranges))?;
    }
    writeln!(sink)?;
    for (bits, count) in &t.counts {
        writeln!(sink, "{bits},{count}")?;
    }
    Ok(())
}

pub fn save_grid_ctm_table(t: &GridCtmTable, sink: &mut dyn Write) -> Result<(), IoError> {
    debug_assert!(!t.protocol.contains('\n'));
    writeln!(sink, "schema_version={}", t.schema_version)?;
    writeln!(sink, "dimensionality=2D")?;
    writeln!(sink, "states={}", t.states)?;
    writeln!(sink, "symbols={}", t.symbols)?;
    writeln!(sink, "cutoff={}", t.cutoff)?;
    writeln!(sink, "total_machines={}", t.total_machines)?;
    writeln!(sink, "total_halting={}", t.total_halting)?;
    writeln!(sink, "exhaustive={}", t.exhaustive)?;
    writeln!(sink, "protocol={}", t.protocol)?;
    if let Some(seed) = t.seed {
        writeln!(sink, "seed={seed}")?;
    }
    writeln!(sink)?;
    for (grid, count) in &t.counts {
        writeln!(sink, "{}x{}:{},{}", grid.rows(), grid.cols(), grid.flatten(), count)?;
    }
    Ok(())
}

struct Header {
    schema_version: u32,
    two_d: bool,
    states: u32,
    symbols: u32,
    cutoff: u64,
    total_machines: u64,
    total_halting: u64,
    exhaustive: bool,
    protocol: String,
    seed: Option<u64>,
    ranges: Vec<(u64, u64)>,
}

fn parse_ranges(text: &str, line: usize) -> Result<Vec<(u64, u64)>, IoError> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for part in text.split(',') {
        let (lo, hi) = part
            .split_once("..")
            .ok_or_else(|| bad(line, format!("malformed range {part:?}")))?;
        let lo: u64 = lo.parse().map_err(|_| bad(line, format!("malformed range {part:?}")))?;
        let hi: u64 = hi.parse().map_err(|_| bad(line, format!("malformed range {part:?}")))?;
        if lo >= hi {
            return Err(bad(line, format!("empty or inverted range {part:?}")));
        }
        if let Some(&(_, prev_hi)) = out.last() {
            if lo <= prev_hi {
                return Err(bad(line, "ranges must be sorted, disjoint, and uncoalesced-free"));
            }
        }
        out.push((lo, hi));
    }
    Ok(out)
}

fn parse_header(
    lines: &mut impl Iterator<Item = Result<String, std::io::Error>>,
    line_no: &mut usize,
) -> Result<Header, IoError> {
    let mut fields: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for line in lines {
        *line_no += 1;
        let line = line?;
        if line.is_empty() {
            break;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(*line_no, "header line is not key=value"));
        };
        if fields.insert(key.to_string(), (value.to_string(), *line_no)).is_some() {
            return Err(bad(*line_no, format!("duplicate header key {key:?}")));
        }
    }
    let known = [
        "schema_version",
        "dimensionality",
        "states",
        "symbols",
        "cutoff",
        "total_machines",
        "total_halting",
        "exhaustive",
        "protocol",
        "seed",
        "ranges",
    ];
    for (key, (_, at)) in &fields {
        if !known.contains(&key.as_str()) {
            return Err(bad(*at, format!("unknown header key {key:?}")));
        }
    }
    let mut take = |key: &str| -> Result<(String, usize), IoError> {
        fields
            .remove(key)
            .ok_or_else(|| IoError::SchemaMismatch(format!("missing header key {key:?}")))
    };
    let (sv, sv_at) = take("schema_version")?;
    let schema_version: u32 =
        sv.parse().map_err(|_| bad(sv_at, "schema_version is not an integer"))?;
    if schema_version != crate::turing::SCHEMA_VERSION {
        return Err(IoError::SchemaMismatch(format!(
            "schema_version {schema_version} unsupported (expected {})",
            crate::turing::SCHEMA_VERSION
        )));
    }
    let (dim, _) = take("dimensionality")?;
    let two_d = match dim.as_str() {
        "1D" => false,
        "2D" => true,
        other => {
            return Err(IoError::SchemaMismatch(format!("unknown dimensionality {other:?}")))
        }
    };
    let parse_u64 = |pair: (String, usize), key: &str| -> Result<(u64, usize), IoError> {
        let (text, at) = pair;
        Ok((text.parse().map_err(|_| bad(at, format!("{key} is not an integer")))?, at))
    };
    let (states, states_at) = parse_u64(take("states")?, "states")?;
    let (symbols, symbols_at) = parse_u64(take("symbols")?, "symbols")?;
    let (cutoff, _) = parse_u64(take("cutoff")?, "cutoff")?;
    let (total_machines, _) = parse_u64(take("total_machines")?, "total_machines")?;
    let (total_halting, _) = parse_u64(take("total_halting")?, "total_halting")?;
    if symbols != 2 {
        return Err(bad(symbols_at, "only 2-symbol tables are supported"));
    }
    let states: u32 =
        u32::try_from(states).map_err(|_| bad(states_at, "states out of range"))?;
    let (exh_text, exh_at) = take("exhaustive")?;
    let exhaustive = match exh_text.as_str() {
        "true" => true,
        "false" => false,
        _ => return Err(bad(exh_at, "exhaustive must be true or false")),
    };
    let (protocol, _) = take("protocol")?;
    let seed = match fields.remove("seed") {
        Some((text, at)) => {
            Some(text.parse::<u64>().map_err(|_| bad(at, "seed is not an integer"))?)
        }
        None => None,
    };
    let ranges = match fields.remove("ranges") {
        Some((text, at)) => {
            if two_d {
                return Err(bad(at, "2D tables carry no index ranges"));
            }
            if !exhaustive {
                return Err(bad(at, "sampled tables carry no index ranges"));
            }
            parse_ranges(&text, at)?
        }
        None => Vec::new(),
    };
    Ok(Header {
        schema_version,
        two_d,
        states,
        symbols: symbols as u32,
        cutoff,
        total_machines,
        total_halting,
        exhaustive,
        protocol,
        seed,
        ranges,
    })
}

/// Loads either table shape, validating schema, record ordering, count sums,
/// and range provenance.
pub fn load_ctm_table(source: impl BufRead) -> Result<LoadedTable, IoError> {
    let mut lines = source.lines();
    let mut line_no = 0usize;
    let header = parse_header(&mut lines, &mut line_no)?;
    let mut sum = 0u64;
    if header.two_d {
        let mut counts: BTreeMap<BitGrid, u64> = BTreeMap::new();
        let mut prev: Option<BitGrid> = None;
        for line in lines {
            line_no += 1;
            let line = line?;
            if line.is_empty() {
                return Err(bad(line_no, "blank line inside body"));
            }
            let (dims_bits, count) =
                line.rsplit_once(',').ok_or_else(|| bad(line_no, "record is not object,count"))?;
            let (dims, bits) = dims_bits
                .split_once(':')
                .ok_or_else(|| bad(line_no, "2D record needs a RxC: prefix"))?;
            let (r, c) = dims
                .split_once('x')
                .ok_or_else(|| bad(line_no, "malformed dimensions"))?;
            let rows: usize =
                r.parse().map_err(|_| bad(line_no, "malformed dimensions"))?;
            let cols: usize =
                c.parse().map_err(|_| bad(line_no, "malformed dimensions"))?;
            let bits = parse_bits(bits)
                .map_err(|e| bad(line_no, e.to_string()))?;
            let grid = BitGrid::from_cells(rows, cols, bits.as_slice().to_vec())
                .map_err(|e| bad(line_no, e.to_string()))?;
            let count: u64 = count.parse().map_err(|_| bad(line_no, "malformed count"))?;
            if count == 0 {
                return Err(bad(line_no, "zero counts are not canonical"));
            }
            if let Some(prev) = &prev {
                if *prev >= grid {
                    return Err(bad(line_no, "records out of canonical order"));
                }
            }
            prev = Some(grid.clone());
            sum += count;
            counts.insert(grid, count);
        }
        if sum != header.total_halting {
            return Err(IoError::ChecksumMismatch { want: header.total_halting, got: sum });
        }
        Ok(LoadedTable::TwoD(GridCtmTable {
            states: header.states,
            symbols: header.symbols,
            cutoff: header.cutoff,
            counts,
            total_machines: header.total_machines,
            total_halting: header.total_halting,
            exhaustive: header.exhaustive,
            seed: header.seed,
            protocol: header.protocol,
            schema_version: header.schema_version,
        }))
    } else {
        let space = TmSpace::new(header.states, header.cutoff)
            .map_err(|e| IoError::SchemaMismatch(e.to_string()))?;
        if header.exhaustive {
            let covered: u64 = header.ranges.iter().map(|(lo, hi)| hi - lo).sum();
            if covered != header.total_machines {
                return Err(IoError::SchemaMismatch(format!(
                    "ranges cover {covered} machines, header total_machines is {}",
                    header.total_machines
                )));
            }
        }
        let mut counts = BTreeMap::new();
        let mut prev = None;
        for line in lines {
            line_no += 1;
            let line = line?;
            if line.is_empty() {
                return Err(bad(line_no, "blank line inside body"));
            }
            let (bits, count) =
                line.rsplit_once(',').ok_or_else(|| bad(line_no, "record is not bits,count"))?;
            let bits = parse_bits(bits).map_err(|e| bad(line_no, e.to_string()))?;
            if bits.is_empty() {
                return Err(bad(line_no, "empty output string"));
            }
            let count: u64 = count.parse().map_err(|_| bad(line_no, "malformed count"))?;
            if count == 0 {
                return Err(bad(line_no, "zero counts are not canonical"));
            }
            if let Some(prev) = &prev {
                if *prev >= bits {
                    return Err(bad(line_no, "records out of canonical order"));
                }
            }
            prev = Some(bits.clone());
            sum += count;
            counts.insert(bits, count);
        }
        if sum != header.total_halting {
            return Err(IoError::ChecksumMismatch { want: header.total_halting, got: sum });
        }
        Ok(LoadedTable::OneD(CtmTable {
            space,
            counts,
            total_machines: header.total_machines,
            total_halting: header.total_halting,
            ranges: header.ranges,
            exhaustive: header.exhaustive,
            seed: header.seed,
            protocol: header.protocol,
            schema_version: header.schema_version,
        }))
    }
}

/// Renders with 6 significant decimals, deterministically.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let decimals = (5 - x.abs().log10().floor() as i64).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

#[derive(Clone, PartialEq, Debug)]
pub enum Field {
    UInt(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

/// A flat record exportable as one CSV line or one JSON object.
pub trait ExportRecord {
    fn fields(&self) -> Vec<(&'static str, Field)>;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExportFormat {
    Csv,
    Json,
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn json_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn field_csv(f: &Field) -> String {
    match f {
        Field::UInt(v) => v.to_string(),
        Field::Float(v) => fmt_sig6(*v),
        Field::Text(v) => csv_escape(v),
        Field::Bool(v) => v.to_string(),
    }
}

fn field_json(f: &Field) -> String {
    match f {
        Field::UInt(v) => v.to_string(),
        Field::Float(v) => fmt_sig6(*v),
        Field::Text(v) => json_escape(v),
        Field::Bool(v) => v.to_string(),
    }
}

/// Writes records as CSV (header + one line per record) or a JSON array with
/// identical field names. Numbers render with 6 significant decimals.
pub fn export_results<R: ExportRecord>(
    rows: &[R],
    format: ExportFormat,
    sink: &mut dyn Write,
) -> Result<(), IoError> {
    if rows.is_empty() {
        return Err(IoError::EmptyInput);
    }
    let names: Vec<&'static str> = rows[0].fields().iter().map(|(n, _)| *n).collect();
    match format {
        ExportFormat::Csv => {
            writeln!(sink, "{}", names.join(","))?;
            for row in rows {
                let fields = row.fields();
                debug_assert!(fields.iter().map(|(n, _)| *n).eq(names.iter().copied()));
                let line: Vec<String> = fields.iter().map(|(_, f)| field_csv(f)).collect();
                writeln!(sink, "{}", line.join(","))?;
            }
        }
        ExportFormat::Json => {
            writeln!(sink, "[")?;
            for (i, row) in rows.iter().enumerate() {
                let fields = row.fields();
                debug_assert!(fields.iter().map(|(n, _)| *n).eq(names.iter().copied()));
                let body: Vec<String> = fields
                    .iter()
                    .map(|(n, f)| format!("{}:{}", json_escape(n), field_json(f)))
                    .collect();
                let comma = if i + 1 < rows.len() { "," } else { "" };
                writeln!(sink, "{{{}}}{}", body.join(","), comma)?;
            }
            writeln!(sink, "]")?;
        }
    }
    Ok(())
}

impl ExportRecord for BenchExportRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("rule", Field::UInt(u64::from(self.row.rule))),
            ("class", Field::UInt(u64::from(self.row.wolfram_class))),
            ("lambda", Field::Float(self.row.lambda)),
            ("simplified_icons", Field::UInt(self.row.simplified_icons as u64)),
            ("simplified_bits", Field::Float(self.row.simplified_bits)),
            ("lzw_bits", Field::UInt(self.row.lzw_bits)),
            ("entropy", Field::Float(self.row.entropy)),
            ("bdm", Field::Float(self.row.bdm)),
            ("lambda_norm", Field::Float(self.lambda_norm)),
            ("simplified_bits_norm", Field::Float(self.simplified_bits_norm)),
            ("lzw_bits_norm", Field::Float(self.lzw_bits_norm)),
            ("entropy_norm", Field::Float(self.entropy_norm)),
            ("bdm_norm", Field::Float(self.bdm_norm)),
        ]
    }
}

impl ExportRecord for PerturbationReport {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("delta", Field::Float(self.delta)),
            ("threshold", Field::Float(self.threshold)),
            ("classification", Field::Text(self.classification.to_string())),
            ("block_size", Field::UInt(self.estimator_metadata.block_size as u64)),
            (
                "fallback_policy",
                Field::Text(self.estimator_metadata.fallback_policy.to_string()),
            ),
            ("row_flatten", Field::Bool(self.estimator_metadata.row_flatten)),
        ]
    }
}

/// One row of a row-impact profile export.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ProfileRow {
    pub row: u64,
    pub impact: f64,
}

impl ExportRecord for ProfileRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![("row", Field::UInt(self.row)), ("impact", Field::Float(self.impact))]
    }
}

/// One row of a reconstructed time order export.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct OrderRow {
    pub position: u64,
    pub row: u64,
}

impl ExportRecord for OrderRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![("position", Field::UInt(self.position)), ("row", Field::UInt(self.row))]
    }
}

/// Flat summary of a BDM report for export.
#[derive(Clone, PartialEq, Debug)]
pub struct BdmSummaryRow {
    pub value: f64,
    pub block_size: u64,
    pub blocks: u64,
    pub distinct_blocks: u64,
    pub dropped_cells: u64,
    pub fallback_blocks: u64,
    pub fallback_policy: String,
    pub row_flatten: bool,
}

impl From<&BdmReport> for BdmSummaryRow {
    fn from(r: &BdmReport) -> Self {
        BdmSummaryRow {
            value: r.value,
            block_size: r.block_size as u64,
            blocks: r.block_census.iter().map(|(_, m)| m).sum(),
            distinct_blocks: r.block_census.len() as u64,
            dropped_cells: r.dropped_cells as u64,
            fallback_blocks: r.fallback_blocks as u64,
            fallback_policy: r.fallback_policy.to_string(),
            row_flatten: r.row_flatten,
        }
    }
}

impl ExportRecord for BdmSummaryRow {
    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("value", Field::Float(self.value)),
            ("block_size", Field::UInt(self.block_size)),
            ("blocks", Field::UInt(self.blocks)),
            ("distinct_blocks", Field::UInt(self.distinct_blocks)),
            ("dropped_cells", Field::UInt(self.dropped_cells)),
            ("fallback_blocks", Field::UInt(self.fallback_blocks)),
            ("fallback_policy", Field::Text(self.fallback_policy.clone())),
            ("row_flatten", Field::Bool(self.row_flatten)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turing::{build_ctm_table, sample_ctm_table, SCHEMA_VERSION};

    fn two_state_space() -> TmSpace {
        TmSpace::new(2, 7).unwrap()
    }

    fn save_to_string(t: &CtmTable) -> String {
        let mut buf = Vec::new();
        save_ctm_table(t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_table_serializes_header_only() {
        let t = build_ctm_table(&two_state_space(), Some((5, 5))).unwrap();
        let text = save_to_string(&t);
        assert!(text.contains("total_halting=0"));
        assert!(text.ends_with("\n\n"));
        match load_ctm_table(text.as_bytes()).unwrap() {
            LoadedTable::OneD(l) => assert_eq!(l, t),
            LoadedTable::TwoD(_) => panic!("expected 1D"),
        }
    }

    #[test]
    fn save_is_canonical() {
        let t = build_ctm_table(&two_state_space(), Some((0, 800))).unwrap();
        assert_eq!(save_to_string(&t), save_to_string(&t.clone()));
    }

    // Frozen after the first verified exhaustive (2,2) build: 17 distinct
    // outputs, 3044 halting machines.
    #[test]
    fn full_two_state_table_file_regression() {
        let t = build_ctm_table(&two_state_space(), None).unwrap();
        let text = save_to_string(&t);
        let body: Vec<&str> =
            text.split_once("\n\n").unwrap().1.lines().collect();
        assert_eq!(body.len(), 17);
        assert_eq!(t.total_halting, 3044);
        assert!(text.contains("total_halting=3044"));
        assert!(body.contains(&"0,1000"));
        assert!(body.contains(&"1111,2"));
    }

    #[test]
    fn roundtrip_partial_and_sampled_tables() {
        let partial = build_ctm_table(&two_state_space(), Some((123, 4567))).unwrap();
        match load_ctm_table(save_to_string(&partial).as_bytes()).unwrap() {
            LoadedTable::OneD(l) => assert_eq!(l, partial),
            LoadedTable::TwoD(_) => panic!("expected 1D"),
        }
        let sampled = sample_ctm_table(&two_state_space(), 500, 77).unwrap();
        match load_ctm_table(save_to_string(&sampled).as_bytes()).unwrap() {
            LoadedTable::OneD(l) => assert_eq!(l, sampled),
            LoadedTable::TwoD(_) => panic!("expected 1D"),
        }
    }

    #[test]
    fn grid_table_roundtrips() {
        let mut counts = BTreeMap::new();
        counts.insert(BitGrid::zero(2, 2).unwrap(), 5u64);
        counts.insert(BitGrid::from_cells(2, 2, vec![1, 0, 0, 1]).unwrap(), 2u64);
        let t = GridCtmTable {
            states: 4,
            symbols: 2,
            cutoff: 100,
            counts,
            total_machines: 777,
            total_halting: 7,
            exhaustive: false,
            seed: Some(3),
            protocol: "turmite;ingested=yes".into(),
            schema_version: SCHEMA_VERSION,
        };
        let mut buf = Vec::new();
        save_grid_ctm_table(&t, &mut buf).unwrap();
        match load_ctm_table(buf.as_slice()).unwrap() {
            LoadedTable::TwoD(l) => assert_eq!(l, t),
            LoadedTable::OneD(_) => panic!("expected 2D"),
        }
    }

    #[test]
    fn checksum_mismatch_is_detected() {
        let t = build_ctm_table(&two_state_space(), Some((0, 300))).unwrap();
        let text = save_to_string(&t).replace(
            &format!("total_halting={}", t.total_halting),
            &format!("total_halting={}", t.total_halting + 1),
        );
        assert!(matches!(
            load_ctm_table(text.as_bytes()),
            Err(IoError::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn malformed_record_is_rejected_with_line() {
        let t = build_ctm_table(&two_state_space(), Some((0, 300))).unwrap();
        let mut text = save_to_string(&t);
        text.push_str("01x,3\n");
        match load_ctm_table(text.as_bytes()) {
            Err(IoError::BadRecord { line, .. }) => {
                assert_eq!(line, text.lines().count());
            }
            other => panic!("expected BadRecord, got {other:?}"),
        }
    }

    #[test]
    fn out_of_order_records_are_rejected() {
        let header = "schema_version=1\ndimensionality=1D\nstates=2\nsymbols=2\ncutoff=7\n\
                      total_machines=100\ntotal_halting=5\nexhaustive=true\nprotocol=x\n\
                      ranges=0..100\n\n";
        let body = "1,2\n0,3\n";
        assert!(matches!(
            load_ctm_table(format!("{header}{body}").as_bytes()),
            Err(IoError::BadRecord { line: 13, .. })
        ));
    }

    #[test]
    fn unknown_schema_version_is_rejected() {
        let t = build_ctm_table(&two_state_space(), Some((0, 10))).unwrap();
        let text = save_to_string(&t).replace("schema_version=1", "schema_version=9");
        assert!(matches!(load_ctm_table(text.as_bytes()), Err(IoError::SchemaMismatch(_))));
    }

    #[test]
    fn range_total_consistency_is_enforced() {
        let t = build_ctm_table(&two_state_space(), Some((0, 100))).unwrap();
        let text = save_to_string(&t).replace("ranges=0..100", "ranges=0..99");
        assert!(matches!(load_ctm_table(text.as_bytes()), Err(IoError::SchemaMismatch(_))));
    }

    #[test]
    fn fmt_sig6_examples() {
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(0.625), "0.625000");
        assert_eq!(fmt_sig6(-0.5), "-0.500000");
        assert_eq!(fmt_sig6(46.0391), "46.0391");
        assert_eq!(fmt_sig6(12345.678), "12345.7");
        assert_eq!(fmt_sig6(1234567.0), "1234567");
    }

    #[test]
    fn export_rejects_empty_input() {
        let rows: Vec<ProfileRow> = Vec::new();
        let mut sink = Vec::new();
        assert!(matches!(
            export_results(&rows, ExportFormat::Csv, &mut sink),
            Err(IoError::EmptyInput)
        ));
    }

    #[test]
    fn csv_export_shape() {
        let rows =
            vec![ProfileRow { row: 0, impact: 1.5 }, ProfileRow { row: 1, impact: 0.25 }];
        let mut sink = Vec::new();
        export_results(&rows, ExportFormat::Csv, &mut sink).unwrap();
        assert_eq!(
            String::from_utf8(sink).unwrap(),
            "row,impact\n0,1.50000\n1,0.250000\n"
        );
    }

    #[test]
    fn json_export_shape() {
        let rows = vec![ProfileRow { row: 0, impact: 1.5 }];
        let mut sink = Vec::new();
        export_results(&rows, ExportFormat::Json, &mut sink).unwrap();
        assert_eq!(
            String::from_utf8(sink).unwrap(),
            "[\n{\"row\":0,\"impact\":1.50000}\n]\n"
        );
    }
}
