//! Shared plumbing: the usage/data failure split that drives exit codes,
//! atomic output writing, and input loading helpers.

use std::fs;
use std::io::Write;
use std::path::Path;

use aidlab_core::bits::{parse_bits, parse_pbm, BitGrid, BitString};
use aidlab_core::complexity::BlockTable;
use aidlab_core::io::{load_ctm_table, LoadedTable};

/// Usage failures exit 1, data/validation failures exit 2. Anything argv
/// shaped is usage; anything about file contents or computation is data.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn data(err: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(err.into())
}

pub trait IntoData<T> {
    fn or_data(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> IntoData<T> for Result<T, E> {
    fn or_data(self) -> Result<T, Failure> {
        self.map_err(data)
    }
}

/// Full output bytes to stdout, or to a file via write-then-rename so a
/// failed run never leaves a partial file behind.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    let Some(path) = path else {
        std::io::stdout().write_all(bytes).or_data()?;
        return Ok(());
    };
    let Some(name) = path.file_name() else {
        return Err(usage(format!("--output {} has no file name", path.display())));
    };
    let mut tmp_name = name.to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)
        .map_err(|e| data(anyhow::anyhow!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| data(anyhow::anyhow!("renaming onto {}: {e}", path.display())))?;
    Ok(())
}

/// One stderr line with the fully resolved run config.
pub fn echo_config(command: &str, fields: &[(&str, String)]) {
    let mut line = format!("# config: {command}");
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    eprintln!("{line}");
}

pub fn load_table(path: &Path) -> Result<LoadedTable, Failure> {
    let file = fs::File::open(path)
        .map_err(|e| data(anyhow::anyhow!("opening {}: {e}", path.display())))?;
    load_ctm_table(std::io::BufReader::new(file))
        .map_err(|e| data(anyhow::anyhow!("loading {}: {e}", path.display())))
}

pub fn load_block_table(path: &Path) -> Result<BlockTable, Failure> {
    Ok(match load_table(path)? {
        LoadedTable::OneD(t) => BlockTable::OneD(t),
        LoadedTable::TwoD(t) => BlockTable::TwoD(t),
    })
}

pub fn load_grid(path: &Path) -> Result<BitGrid, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| data(anyhow::anyhow!("reading {}: {e}", path.display())))?;
    parse_pbm(text.as_bytes())
        .map_err(|e| data(anyhow::anyhow!("parsing {}: {e}", path.display())))
}

/// A bdm input: a bit string or a PBM grid.
pub enum InputObject {
    Str(BitString),
    Grid(BitGrid),
}

/// Literal 0/1 text is taken as a string; anything else is a file path
/// holding either a PBM grid or whitespace-separated bits.
pub fn read_input(arg: &str) -> Result<InputObject, Failure> {
    if !arg.is_empty() && arg.bytes().all(|b| b == b'0' || b == b'1') {
        return Ok(InputObject::Str(parse_bits(arg).or_data()?));
    }
    let text = fs::read_to_string(arg)
        .map_err(|e| data(anyhow::anyhow!("reading {arg}: {e}")))?;
    if text.trim_start().starts_with("P1") {
        return Ok(InputObject::Grid(parse_pbm(text.as_bytes()).or_data()?));
    }
    let flat: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if flat.is_empty() {
        return Err(data(anyhow::anyhow!("{arg} holds no bits")));
    }
    Ok(InputObject::Str(parse_bits(&flat).or_data()?))
}
