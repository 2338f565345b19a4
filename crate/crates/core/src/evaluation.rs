//! Percentage F0 error against a reference contour, split by cry class.

use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::error::{Error, Result};

/// Lower edge of the phonated band (inclusive).
pub const PHONATED_MIN_HZ: f64 = 250.0;
/// Lower edge of the hyperphonated band (inclusive).
pub const HYPERPHONATED_MIN_HZ: f64 = 700.0;

/// Target per-class error rates (percent).
pub const REFERENCE_PHONATED_ERROR_PCT: f64 = 3.75;
pub const REFERENCE_HYPERPHONATED_ERROR_PCT: f64 = 6.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CryClass {
    Unvoiced,
    Phonated,
    Hyperphonated,
    OutOfBand,
}

/// `0` is unvoiced, `[250, 700)` phonated, `>= 700` hyperphonated and
/// `(0, 250)` out of band.
pub fn classify_frame(f0_hz: f64) -> Result<CryClass> {
    if f0_hz.is_nan() || f0_hz < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "F0 must be >= 0, got {f0_hz}"
        )));
    }
    Ok(if f0_hz == 0.0 {
        CryClass::Unvoiced
    } else if f0_hz < PHONATED_MIN_HZ {
        CryClass::OutOfBand
    } else if f0_hz < HYPERPHONATED_MIN_HZ {
        CryClass::Phonated
    } else {
        CryClass::Hyperphonated
    })
}

/// Largest frequency error caused by a half-sample error in the pitch
/// period: `Fs / (2 P^2)` with `P = Fs / f0`, i.e. `f0^2 / (2 Fs)`.
pub fn quantization_bound(f0_hz: f64, sample_rate_hz: f64) -> Result<f64> {
    if !(f0_hz > 0.0 && f0_hz < sample_rate_hz / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "F0 must lie in (0, {}), got {f0_hz}",
            sample_rate_hz / 2.0
        )));
    }
    let period = sample_rate_hz / f0_hz;
    Ok(sample_rate_hz / (2.0 * period * period))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFrame {
    pub time_s: f64,
    pub f0_hz: f64,
}

/// Ground-truth F0 per frame, aligned with the contour under test.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceContour {
    pub frames: Vec<ReferenceFrame>,
}

impl ReferenceContour {
    pub fn new(frames: Vec<ReferenceFrame>) -> Self {
        Self { frames }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn f0_values(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.f0_hz).collect()
    }
}

/// Mean percentage error over one class of frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassError {
    pub error_pct: f64,
    /// Frames voiced in both contours that entered the mean.
    pub frames: usize,
    /// Frames where exactly one of the two contours is voiced.
    pub voicing_disagreements: usize,
}

/// Mean of `100 |est - ref| / ref` over frames voiced in both contours whose
/// reference class matches `class_filter`. Voicing disagreements are counted
/// separately and do not enter the mean. With a filter, only disagreements
/// on frames whose reference lies in that class are counted.
pub fn contour_error_pct(
    estimated: &Contour,
    reference: &ReferenceContour,
    class_filter: Option<CryClass>,
) -> Result<ClassError> {
    if estimated.len() != reference.len() {
        return Err(Error::InvalidArgument(format!(
            "contour has {} frames, reference has {}",
            estimated.len(),
            reference.len()
        )));
    }
    let mut sum = 0.0;
    let mut frames = 0;
    let mut voicing_disagreements = 0;
    for (est, truth) in estimated.iter().zip(&reference.frames) {
        let class = classify_frame(truth.f0_hz)?;
        let ref_voiced = class != CryClass::Unvoiced;
        let est_voiced = est.voiced && est.f0_hz > 0.0;
        let in_filter = class_filter.is_none_or(|c| c == class);
        match (ref_voiced, est_voiced) {
            (true, true) if in_filter => {
                sum += 100.0 * (est.f0_hz - truth.f0_hz).abs() / truth.f0_hz;
                frames += 1;
            }
            (true, false) if in_filter => voicing_disagreements += 1,
            (false, true) if class_filter.is_none() => voicing_disagreements += 1,
            _ => {}
        }
    }
    if frames == 0 {
        return Err(Error::EmptyEvaluation);
    }
    Ok(ClassError {
        error_pct: sum / frames as f64,
        frames,
        voicing_disagreements,
    })
}

/// Per-class error summary. Absent classes serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub phonated_error_pct: Option<f64>,
    pub hyperphonated_error_pct: Option<f64>,
    pub overall_error_pct: Option<f64>,
    pub phonated_frames: usize,
    pub hyperphonated_frames: usize,
    /// Jointly voiced frames whose reference lies below the phonated band.
    pub out_of_band_frames: usize,
    pub voicing_disagreements: usize,
}

impl ErrorReport {
    /// Report filled with the target per-class error rates.
    pub fn reference_targets() -> Self {
        Self {
            phonated_error_pct: Some(REFERENCE_PHONATED_ERROR_PCT),
            hyperphonated_error_pct: Some(REFERENCE_HYPERPHONATED_ERROR_PCT),
            overall_error_pct: None,
            phonated_frames: 0,
            hyperphonated_frames: 0,
            out_of_band_frames: 0,
            voicing_disagreements: 0,
        }
    }
}

fn optional(result: Result<ClassError>) -> Result<Option<ClassError>> {
    match result {
        Ok(e) => Ok(Some(e)),
        Err(Error::EmptyEvaluation) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Builds the per-class report. Fails only when no frame at all is eligible.
pub fn build_report(estimated: &Contour, reference: &ReferenceContour) -> Result<ErrorReport> {
    let overall = contour_error_pct(estimated, reference, None)?;
    let phonated = optional(contour_error_pct(
        estimated,
        reference,
        Some(CryClass::Phonated),
    ))?;
    let hyper = optional(contour_error_pct(
        estimated,
        reference,
        Some(CryClass::Hyperphonated),
    ))?;
    let out_of_band = optional(contour_error_pct(
        estimated,
        reference,
        Some(CryClass::OutOfBand),
    ))?;
    Ok(ErrorReport {
        phonated_error_pct: phonated.map(|e| e.error_pct),
        hyperphonated_error_pct: hyper.map(|e| e.error_pct),
        overall_error_pct: Some(overall.error_pct),
        phonated_frames: phonated.map_or(0, |e| e.frames),
        hyperphonated_frames: hyper.map_or(0, |e| e.frames),
        out_of_band_frames: out_of_band.map_or(0, |e| e.frames),
        voicing_disagreements: overall.voicing_disagreements,
    })
}
