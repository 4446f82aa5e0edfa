//! Header-checked CSV files for results, samples and probe reports.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line 1: expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("{0}")]
    Write(String),
}

impl CsvError {
    /// 1-based line number of a parse failure, when known.
    pub fn line(&self) -> Option<u64> {
        match self {
            CsvError::Parse { line, .. } => Some(*line),
            CsvError::Header { .. } => Some(1),
            _ => None,
        }
    }
}

/// A row type with a fixed header.
pub trait CsvRecord: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

pub fn to_writer<T: CsvRecord, W: Write>(w: W, records: &[T]) -> Result<(), CsvError> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let werr = |e: csv::Error| CsvError::Write(e.to_string());
    wtr.write_record(T::HEADER).map_err(werr)?;
    for r in records {
        wtr.serialize(r).map_err(werr)?;
    }
    wtr.flush().map_err(|e| CsvError::Write(e.to_string()))
}

pub fn from_reader<T: CsvRecord, R: Read>(r: R) -> Result<Vec<T>, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers().map_err(|e| parse_error(&e, 1))?.clone();
    if headers.iter().ne(T::HEADER.iter().copied()) {
        return Err(CsvError::Header {
            expected: T::HEADER.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<T>().enumerate() {
        out.push(row.map_err(|e| parse_error(&e, i as u64 + 2))?);
    }
    Ok(out)
}

fn parse_error(e: &csv::Error, fallback_line: u64) -> CsvError {
    let line = e
        .position()
        .map(|p| p.line())
        .filter(|&l| l > 0)
        .unwrap_or(fallback_line);
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(f) => format!("field {}: {}", f + 1, err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    };
    CsvError::Parse { line, message }
}

pub fn write_records<T: CsvRecord>(path: &Path, records: &[T]) -> Result<(), CsvError> {
    let file = File::create(path).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })?;
    to_writer(std::io::BufWriter::new(file), records)
}

pub fn read_records<T: CsvRecord>(path: &Path) -> Result<Vec<T>, CsvError> {
    let file = File::open(path).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_reader(std::io::BufReader::new(file))
}

impl CsvRecord for crate::score::RoundResult {
    const HEADER: &'static [&'static str] = &[
        "round_id",
        "hp_self",
        "hp_opp",
        "elapsed_frames",
        "frames_sent",
        "frames_processed",
        "frames_skipped",
        "mean_overhead_us",
    ];
}

impl CsvRecord for crate::server::FrameSample {
    const HEADER: &'static [&'static str] = &[
        "round_id",
        "frame_id",
        "rtt_us",
        "reported_processing_us",
        "overhead_us",
    ];
}

impl CsvRecord for crate::probe::RoundLatency {
    const HEADER: &'static [&'static str] =
        &["round_id", "n", "mean_overhead_us", "p50_us", "p99_us"];
}
