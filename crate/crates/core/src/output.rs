//! Line-oriented output: a `#`-prefixed JSON metadata line followed by CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Wraps experiment-specific metadata with the crate name and version.
pub fn metadata<T: Serialize>(kind: &str, config: &T) -> Result<Value> {
    Ok(json!({
        "artifact": "modval",
        "version": VERSION,
        "kind": kind,
        "config": serde_json::to_value(config)?,
    }))
}

pub fn write_metadata_line<W: Write>(out: &mut W, meta: &Value) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(meta)?)?;
    Ok(())
}

/// Creates `path` and writes the metadata line; the caller appends CSV.
pub fn create_with_metadata(path: &Path, meta: &Value) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_metadata_line(&mut out, meta)?;
    Ok(out)
}

/// Splits a file written by [`create_with_metadata`] into its metadata and CSV body.
pub fn split_metadata(text: &str) -> Result<(Value, &str)> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    let meta = serde_json::from_str(first.trim_start_matches('#').trim())?;
    Ok((meta, rest))
}
