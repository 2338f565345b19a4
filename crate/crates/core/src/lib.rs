//! Fundamental-frequency tracking for infant cries.
//!
//! The tracker whitens each frame with a low-order LPC inverse filter and
//! reads the pitch period off the trapezoid-weighted autocorrelation of the
//! residual (simple inverse filtering tracking, SIFT). Voicing follows a
//! threshold rule with history and neighbour repair, and the contour is
//! cleaned up by a median filter plus octave-error correction against the
//! dominant F0.
//!
//! ```
//! use crysift::synthesis::{synth_cry, CrySpec};
//! use crysift::{analyze, SmoothingConfig, TrackerConfig};
//!
//! let (audio, _truth) = synth_cry(&CrySpec::constant(450.0, 0.3, 16000.0, 1)).unwrap();
//! let analysis = analyze(&audio, &TrackerConfig::default(), &SmoothingConfig::default()).unwrap();
//! assert!(analysis.smoothed.voiced_fraction() > 0.9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod dsp;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod smoothing;
pub mod spectrogram;
pub mod synthesis;
pub mod tracker;

pub use contour::{Contour, ContourFrame};
pub use dsp::AudioBuffer;
pub use error::{Error, Result};
pub use evaluation::{build_report, ErrorReport, ReferenceContour};
pub use smoothing::SmoothingConfig;
pub use tracker::{track_contour, TrackerConfig};

/// Raw and smoothed contours of one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub raw: Contour,
    pub smoothed: Contour,
}

impl Analysis {
    pub fn records(&self) -> Vec<io::ContourRecord> {
        io::ContourRecord::from_contours(&self.raw, &self.smoothed)
            .expect("raw and smoothed contours share framing")
    }
}

/// Tracks `audio` and smooths the resulting contour.
pub fn analyze(
    audio: &AudioBuffer,
    tracker: &TrackerConfig,
    smoothing: &SmoothingConfig,
) -> Result<Analysis> {
    let raw = track_contour(audio, tracker)?;
    let smoothed = smoothing::smooth_contour(&raw, smoothing)?;
    Ok(Analysis { raw, smoothed })
}
