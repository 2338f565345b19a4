use serde::{Deserialize, Serialize};

/// One frame of an F0 track. Unvoiced frames carry `f0_hz == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourFrame {
    pub frame_index: usize,
    /// Frame center in seconds.
    pub time_s: f64,
    pub f0_hz: f64,
    pub peak_value: f64,
    pub voiced: bool,
    /// Set when harmonic correction changed this frame's F0.
    pub corrected: bool,
}

impl ContourFrame {
    pub fn unvoiced(frame_index: usize, time_s: f64, peak_value: f64) -> Self {
        Self {
            frame_index,
            time_s,
            f0_hz: 0.0,
            peak_value,
            voiced: false,
            corrected: false,
        }
    }
}

/// Per-frame F0 sequence, before or after smoothing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Contour {
    pub frames: Vec<ContourFrame>,
}

impl Contour {
    pub fn new(frames: Vec<ContourFrame>) -> Self {
        Self { frames }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ContourFrame> {
        self.frames.iter()
    }

    /// F0 per frame, 0 where unvoiced.
    pub fn f0_values(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.f0_hz).collect()
    }

    pub fn voiced_count(&self) -> usize {
        self.frames.iter().filter(|f| f.voiced).count()
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.frames.is_empty() {
            0.0
        } else {
            self.voiced_count() as f64 / self.frames.len() as f64
        }
    }

    /// Half-open index ranges of maximal runs of voiced frames.
    pub fn voiced_runs(&self) -> Vec<std::ops::Range<usize>> {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, f) in self.frames.iter().enumerate() {
            match (f.voiced, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push(s..i);
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push(s..self.frames.len());
        }
        runs
    }
}

impl<'a> IntoIterator for &'a Contour {
    type Item = &'a ContourFrame;
    type IntoIter = std::slice::Iter<'a, ContourFrame>;

    fn into_iter(self) -> Self::IntoIter {
        self.frames.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(i: usize, f0: f64) -> ContourFrame {
        ContourFrame {
            frame_index: i,
            time_s: i as f64 * 0.01,
            f0_hz: f0,
            peak_value: if f0 > 0.0 { 0.8 } else { 0.0 },
            voiced: f0 > 0.0,
            corrected: false,
        }
    }

    #[test]
    fn runs() {
        let c = Contour::new(
            [0.0, 300.0, 310.0, 0.0, 0.0, 400.0, 0.0, 500.0, 510.0]
                .iter()
                .enumerate()
                .map(|(i, &f)| frame(i, f))
                .collect(),
        );
        assert_eq!(c.voiced_runs(), vec![1..3, 5..6, 7..9]);
        assert_eq!(c.voiced_count(), 5);
        assert!(Contour::default().voiced_runs().is_empty());
    }
}
