//! File helpers for JSON-lines datasets and JSON documents.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hawkes::{LabeledSample, Path as EventPath};

fn read_lines<T: DeserializeOwned>(path: &Path, dim: impl Fn(&T) -> usize) -> Result<Vec<T>> {
    let reader = BufReader::new(File::open(path)?);
    let mut items = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item: T = serde_json::from_str(&line)
            .map_err(|e| Error::InvalidArgument(format!("{}:{}: {e}", path.display(), i + 1)))?;
        items.push(item);
    }
    if items.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let first = dim(&items[0]);
    if let Some(other) = items.iter().map(&dim).find(|&d| d != first) {
        return Err(Error::DimensionMismatch {
            expected: first,
            got: other,
        });
    }
    Ok(items)
}

/// Reads one labelled path per non-empty line.
pub fn read_jsonl(path: &Path) -> Result<Vec<LabeledSample>> {
    read_lines(path, |s: &LabeledSample| s.path.dim())
}

/// Reads one path per non-empty line; a `label` field, if present, is ignored.
pub fn read_paths(path: &Path) -> Result<Vec<EventPath>> {
    read_lines(path, EventPath::dim)
}

pub fn write_jsonl(path: &Path, samples: &[LabeledSample]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for s in samples {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
