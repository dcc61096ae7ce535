//! File helpers shared by the commands.

use std::fs;
use std::path::Path;

use apekit_core::triplet::{emit_corpus, parse_corpus};
use apekit_core::{Corpus, Format};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

/// Splits on `\n`; a final newline does not start another line.
pub fn split_lines(bytes: &[u8], path: &Path) -> CliResult<Vec<String>> {
    let text = std::str::from_utf8(bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() && text.len() <= 1 {
        return Ok(Vec::new());
    }
    Ok(body.split('\n').map(String::from).collect())
}

pub fn read_lines(path: &Path) -> CliResult<(Vec<String>, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    Ok((split_lines(&bytes, path)?, bytes))
}

pub fn lines_to_bytes<S: AsRef<str>>(lines: &[S]) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    for l in lines {
        let l = l.as_ref();
        if l.contains('\n') {
            return Err(CliError::data("a line of output contains a line break"));
        }
        out.extend_from_slice(l.as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

pub fn read_corpus_bytes(path: &Path, format: Format) -> CliResult<(Corpus, Vec<u8>)> {
    let bytes = read_bytes(path)?;
    let corpus = parse_corpus(bytes.as_slice(), format)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok((corpus, bytes))
}

pub fn corpus_bytes(corpus: &Corpus, format: Format) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    emit_corpus(corpus, &mut buf, format)?;
    Ok(buf)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(CliError::data)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes a report to `out`, or to stdout when no path is given.
pub fn emit_report<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let bytes = to_json(value)?;
    match out {
        Some(p) => write_bytes(p, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::data(format!("stdout: {e}")))
        }
    }
}

/// Loads a JSON configuration file; problems are configuration errors.
pub fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}
