use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contour::{Contour, ContourFrame};
use crate::error::{Error, Result};
use crate::evaluation::{ReferenceContour, ReferenceFrame};

pub const CONTOUR_CSV_HEADER: &str =
    "frame_index,time_s,f0_raw_hz,f0_smoothed_hz,peak_value,voiced,corrected";
pub const REFERENCE_CSV_HEADER: &str = "frame_index,time_s,f0_hz";

/// Rounds to six significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn fmt_sig6(x: f64) -> String {
    format!("{}", round_sig6(x))
}

/// One serialized frame, raw and smoothed F0 side by side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourRecord {
    pub frame_index: usize,
    pub time_s: f64,
    pub f0_raw_hz: f64,
    pub f0_smoothed_hz: f64,
    pub peak_value: f64,
    pub voiced: bool,
    pub corrected: bool,
}

impl ContourRecord {
    /// Pairs a raw contour with its smoothed version frame by frame.
    pub fn from_contours(raw: &Contour, smoothed: &Contour) -> Result<Vec<Self>> {
        if raw.len() != smoothed.len() {
            return Err(Error::InvalidArgument(format!(
                "raw contour has {} frames, smoothed has {}",
                raw.len(),
                smoothed.len()
            )));
        }
        Ok(raw
            .iter()
            .zip(smoothed)
            .map(|(r, s)| Self {
                frame_index: r.frame_index,
                time_s: r.time_s,
                f0_raw_hz: if r.voiced { r.f0_hz } else { 0.0 },
                f0_smoothed_hz: if s.voiced { s.f0_hz } else { 0.0 },
                peak_value: r.peak_value,
                voiced: r.voiced,
                corrected: s.corrected,
            })
            .collect())
    }

    /// Every real field rounded to six significant digits.
    pub fn rounded(&self) -> Self {
        Self {
            time_s: round_sig6(self.time_s),
            f0_raw_hz: round_sig6(self.f0_raw_hz),
            f0_smoothed_hz: round_sig6(self.f0_smoothed_hz),
            peak_value: round_sig6(self.peak_value),
            ..*self
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.frame_index,
            fmt_sig6(self.time_s),
            fmt_sig6(self.f0_raw_hz),
            fmt_sig6(self.f0_smoothed_hz),
            fmt_sig6(self.peak_value),
            self.voiced,
            self.corrected
        )
    }
}

/// Rebuilds a contour from records, taking either the smoothed or the raw F0.
pub fn records_to_contour(records: &[ContourRecord], smoothed: bool) -> Contour {
    Contour::new(
        records
            .iter()
            .map(|r| ContourFrame {
                frame_index: r.frame_index,
                time_s: r.time_s,
                f0_hz: if smoothed {
                    r.f0_smoothed_hz
                } else {
                    r.f0_raw_hz
                },
                peak_value: r.peak_value,
                voiced: r.voiced,
                corrected: r.corrected,
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourFormat {
    Csv,
    Json,
}

impl ContourFormat {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ContourFormat::Json,
            _ => ContourFormat::Csv,
        }
    }
}

pub fn write_contour_to<W: Write>(
    records: &[ContourRecord],
    mut out: W,
    format: ContourFormat,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument(
            "refusing to write an empty contour".into(),
        ));
    }
    match format {
        ContourFormat::Csv => {
            writeln!(out, "{CONTOUR_CSV_HEADER}")?;
            for r in records {
                writeln!(out, "{}", r.csv_row())?;
            }
        }
        ContourFormat::Json => {
            let rounded: Vec<ContourRecord> = records.iter().map(ContourRecord::rounded).collect();
            serde_json::to_writer_pretty(&mut out, &rounded)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_contour(
    records: &[ContourRecord],
    path: impl AsRef<Path>,
    format: ContourFormat,
) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidArgument(
            "refusing to write an empty contour".into(),
        ));
    }
    write_contour_to(records, BufWriter::new(File::create(path)?), format)
}

pub fn read_contour_from<R: Read>(input: R, format: ContourFormat) -> Result<Vec<ContourRecord>> {
    match format {
        ContourFormat::Csv => csv::Reader::from_reader(input)
            .deserialize()
            .map(|r| r.map_err(Error::from))
            .collect(),
        ContourFormat::Json => Ok(serde_json::from_reader(input)?),
    }
}

/// Reads a contour file, picking the format from the extension.
pub fn read_contour(path: impl AsRef<Path>) -> Result<Vec<ContourRecord>> {
    let path = path.as_ref();
    read_contour_from(
        BufReader::new(File::open(path)?),
        ContourFormat::from_path(path),
    )
}

pub fn write_reference_to<W: Write>(reference: &ReferenceContour, mut out: W) -> Result<()> {
    writeln!(out, "{REFERENCE_CSV_HEADER}")?;
    for (i, f) in reference.frames.iter().enumerate() {
        writeln!(out, "{i},{},{}", fmt_sig6(f.time_s), fmt_sig6(f.f0_hz))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_reference(reference: &ReferenceContour, path: impl AsRef<Path>) -> Result<()> {
    write_reference_to(reference, BufWriter::new(File::create(path)?))
}

/// Reads a reference CSV. Accepts the `f0_hz` column, or a contour file's
/// `f0_smoothed_hz` column.
pub fn read_reference_from<R: Read>(input: R) -> Result<ReferenceContour> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let time_col = column("time_s").ok_or_else(|| Error::Parse("missing time_s column".into()))?;
    let f0_col = column("f0_hz")
        .or_else(|| column("f0_smoothed_hz"))
        .ok_or_else(|| Error::Parse("missing f0_hz column".into()))?;
    let parse = |rec: &csv::StringRecord, col: usize| -> Result<f64> {
        let field = rec.get(col).unwrap_or("").trim();
        field
            .parse()
            .map_err(|_| Error::Parse(format!("invalid number {field:?}")))
    };
    let mut frames = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        frames.push(ReferenceFrame {
            time_s: parse(&rec, time_col)?,
            f0_hz: parse(&rec, f0_col)?,
        });
    }
    Ok(ReferenceContour::new(frames))
}

pub fn read_reference(path: impl AsRef<Path>) -> Result<ReferenceContour> {
    read_reference_from(BufReader::new(File::open(path)?))
}
