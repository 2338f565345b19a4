use std::path::Path;

use crate::error::{Error, Result};
use crate::smoothing::SmoothingConfig;
use crate::tracker::TrackerConfig;

const TRACKER_KEYS: &[&str] = &[
    "frame_ms",
    "hop_ms",
    "lpc_order",
    "f0_min_hz",
    "f0_max_hz",
    "trapezoid",
    "voiced_threshold",
    "borderline_threshold",
    "history_len",
    "subharmonic_ratio",
];
const SMOOTHING_KEYS: &[&str] = &["median_order", "harmonic_factors", "harmonic_rel_tol"];

/// Parses a flat TOML key/value file whose keys are the field names of
/// [`TrackerConfig`] and [`SmoothingConfig`]. Missing keys keep their defaults.
///
/// ```toml
/// frame_ms = 20
/// voiced_threshold = 0.45
/// trapezoid = { f1_hz = 150, f2_hz = 200, f3_hz = 2500, f4_hz = 3000 }
/// median_order = 4
/// ```
pub fn parse_analysis_config(text: &str) -> Result<(TrackerConfig, SmoothingConfig)> {
    let table: toml::Table = text.parse()?;
    if let Some(key) = table
        .keys()
        .find(|k| !TRACKER_KEYS.contains(&k.as_str()) && !SMOOTHING_KEYS.contains(&k.as_str()))
    {
        return Err(Error::Parse(format!("unknown configuration key {key:?}")));
    }
    let split = |keys: &[&str]| -> toml::Table {
        table
            .iter()
            .filter(|(k, _)| keys.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    };
    let tracker: TrackerConfig = toml::Value::Table(split(TRACKER_KEYS)).try_into()?;
    let smoothing: SmoothingConfig = toml::Value::Table(split(SMOOTHING_KEYS)).try_into()?;
    smoothing.validate()?;
    Ok((tracker, smoothing))
}

pub fn load_analysis_config(path: impl AsRef<Path>) -> Result<(TrackerConfig, SmoothingConfig)> {
    parse_analysis_config(&std::fs::read_to_string(path)?)
}
