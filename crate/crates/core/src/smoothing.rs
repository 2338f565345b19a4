//! Contour post-processing: a sliding median inside each voiced run, then
//! correction of values sitting near integer multiples or sub-multiples of
//! the utterance's dominant F0.

use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoothingConfig {
    /// Median order; the window spans `2 * (order / 2) + 1` frames.
    pub median_order: usize,
    pub harmonic_factors: Vec<u32>,
    pub harmonic_rel_tol: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            median_order: 4,
            harmonic_factors: vec![2, 3],
            harmonic_rel_tol: 0.10,
        }
    }
}

impl SmoothingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.median_order < 2 {
            return Err(Error::InvalidArgument(format!(
                "median order must be at least 2, got {}",
                self.median_order
            )));
        }
        if !(self.harmonic_rel_tol > 0.0 && self.harmonic_rel_tol < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "harmonic tolerance must lie in (0, 0.5), got {}",
                self.harmonic_rel_tol
            )));
        }
        if self.harmonic_factors.iter().any(|&k| k < 2) {
            return Err(Error::InvalidArgument(
                "harmonic factors must be >= 2".into(),
            ));
        }
        Ok(())
    }
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Sliding median over each maximal voiced run. The window shrinks
/// symmetrically near run edges so it always has odd length.
pub fn median_smooth(contour: &Contour, order: usize) -> Result<Contour> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "median order must be at least 2, got {order}"
        )));
    }
    let half = order / 2;
    let mut out = contour.clone();
    let mut window = Vec::with_capacity(2 * half + 1);
    for run in contour.voiced_runs() {
        for i in run.clone() {
            let reach = half.min(i - run.start).min(run.end - 1 - i);
            window.clear();
            window.extend(
                contour.frames[i - reach..=i + reach]
                    .iter()
                    .map(|f| f.f0_hz),
            );
            out.frames[i].f0_hz = median_of(&mut window);
        }
    }
    Ok(out)
}

/// Median of the voiced F0 values.
pub fn dominant_f0(contour: &Contour) -> Result<f64> {
    let mut voiced: Vec<f64> = contour
        .iter()
        .filter(|f| f.voiced)
        .map(|f| f.f0_hz)
        .collect();
    if voiced.is_empty() {
        return Err(Error::NoDominant);
    }
    Ok(median_of(&mut voiced))
}

/// Corrected value for `v`, or `None` when it is left alone.
pub fn harmonic_correction(v: f64, dominant: f64, factors: &[u32], rel_tol: f64) -> Option<f64> {
    if (v - dominant).abs() <= rel_tol * dominant {
        return None;
    }
    let mut sorted = factors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted.into_iter().map(f64::from).find_map(|k| {
        if (v - k * dominant).abs() <= rel_tol * k * dominant {
            Some(v / k)
        } else if (v - dominant / k).abs() <= rel_tol * dominant / k {
            Some(v * k)
        } else {
            None
        }
    })
}

/// Folds voiced values lying near `k * dominant` or `dominant / k` back to
/// the dominant band, smallest `k` first.
pub fn harmonic_correct(
    contour: &Contour,
    dominant: f64,
    factors: &[u32],
    rel_tol: f64,
) -> Result<Contour> {
    if !(dominant > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dominant F0 must be positive, got {dominant}"
        )));
    }
    if !(rel_tol > 0.0 && rel_tol < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "relative tolerance must lie in (0, 0.5), got {rel_tol}"
        )));
    }
    let mut out = contour.clone();
    for frame in out.frames.iter_mut().filter(|f| f.voiced) {
        if let Some(v) = harmonic_correction(frame.f0_hz, dominant, factors, rel_tol) {
            frame.f0_hz = v;
            frame.corrected = true;
        }
    }
    Ok(out)
}

/// Median smoothing, then harmonic correction against the dominant F0 of the
/// median-smoothed contour. Contours with no voiced frame only get the median.
pub fn smooth_contour(raw: &Contour, config: &SmoothingConfig) -> Result<Contour> {
    config.validate()?;
    let smoothed = median_smooth(raw, config.median_order)?;
    match dominant_f0(&smoothed) {
        Ok(dominant) => harmonic_correct(
            &smoothed,
            dominant,
            &config.harmonic_factors,
            config.harmonic_rel_tol,
        ),
        Err(Error::NoDominant) => Ok(smoothed),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::ContourFrame;

    fn contour(values: &[f64]) -> Contour {
        Contour::new(
            values
                .iter()
                .enumerate()
                .map(|(i, &f)| ContourFrame {
                    frame_index: i,
                    time_s: 0.008 * (i + 1) as f64,
                    f0_hz: f,
                    peak_value: if f > 0.0 { 0.8 } else { 0.1 },
                    voiced: f > 0.0,
                    corrected: false,
                })
                .collect(),
        )
    }

    #[test]
    fn median_keeps_constants() {
        let c = contour(&[380.0; 10]);
        assert_eq!(median_smooth(&c, 4).unwrap(), c);
    }

    #[test]
    fn median_removes_single_spike() {
        let c = contour(&[380.0, 380.0, 760.0, 380.0, 380.0]);
        assert_eq!(median_smooth(&c, 4).unwrap().f0_values(), vec![380.0; 5]);
    }

    #[test]
    fn median_stays_inside_voiced_runs() {
        let c = contour(&[400.0, 800.0, 0.0, 300.0, 310.0, 900.0, 305.0, 0.0]);
        let m = median_smooth(&c, 4).unwrap();
        // Run [400, 800]: edges shrink to single-frame windows.
        assert_eq!(
            m.f0_values(),
            vec![400.0, 800.0, 0.0, 300.0, 310.0, 310.0, 305.0, 0.0]
        );
        assert_eq!(
            m.iter().map(|f| f.voiced).collect::<Vec<_>>(),
            c.iter().map(|f| f.voiced).collect::<Vec<_>>()
        );
    }

    #[test]
    fn median_rejects_small_order() {
        assert!(median_smooth(&contour(&[1.0]), 1).is_err());
    }

    #[test]
    fn dominant_is_median_of_voiced() {
        assert_eq!(dominant_f0(&contour(&[450.0; 7])).unwrap(), 450.0);
        let mut v = vec![400.0; 8];
        v.extend([800.0, 800.0, 0.0, 0.0]);
        assert_eq!(dominant_f0(&contour(&v)).unwrap(), 400.0);
        assert!(matches!(
            dominant_f0(&contour(&[0.0; 4])),
            Err(Error::NoDominant)
        ));
    }

    #[test]
    fn harmonic_correction_cases() {
        let f = [2, 3];
        assert_eq!(harmonic_correction(805.0, 400.0, &f, 0.1), Some(402.5));
        assert_eq!(harmonic_correction(390.0, 400.0, &f, 0.1), None);
        assert_eq!(harmonic_correction(205.0, 400.0, &f, 0.1), Some(410.0));
        assert_eq!(
            harmonic_correction(1210.0, 400.0, &f, 0.1),
            Some(1210.0 / 3.0)
        );
        assert_eq!(harmonic_correction(140.0, 420.0, &f, 0.1), Some(420.0));
        assert_eq!(harmonic_correction(600.0, 400.0, &f, 0.1), None);
    }

    #[test]
    fn harmonic_correct_flags_frames() {
        let c = contour(&[400.0, 805.0, 0.0, 205.0, 390.0]);
        let h = harmonic_correct(&c, 400.0, &[2, 3], 0.1).unwrap();
        assert_eq!(h.f0_values(), vec![400.0, 402.5, 0.0, 410.0, 390.0]);
        assert_eq!(
            h.iter().map(|f| f.corrected).collect::<Vec<_>>(),
            vec![false, true, false, true, false]
        );
        assert!(harmonic_correct(&c, 0.0, &[2], 0.1).is_err());
        assert!(harmonic_correct(&c, 400.0, &[2], 0.5).is_err());
    }

    #[test]
    fn smooth_contour_handles_unvoiced_only() {
        let c = contour(&[0.0; 5]);
        assert_eq!(smooth_contour(&c, &SmoothingConfig::default()).unwrap(), c);
    }
}
