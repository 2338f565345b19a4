//! Source-filter synthetic cries with exact F0 ground truth.
//!
//! Voiced segments are band-limited pulse trains placed by integrating the
//! instantaneous F0, plus white noise, passed through a cascade of
//! second-order formant resonators. Unvoiced segments are filtered noise and
//! silence segments are exact zeros.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dsp::{self, AudioBuffer};
use crate::error::{Error, Result};
use crate::evaluation::{ReferenceContour, ReferenceFrame};
use crate::tracker::TrackerConfig;

/// Output peak amplitude after normalization.
pub const PEAK_AMPLITUDE: f64 = 0.9;

/// Standard deviation of the excitation noise in unvoiced segments.
pub const UNVOICED_EXCITATION_STD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentMode {
    Voiced,
    Unvoiced,
    Silence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration_s: f64,
    pub mode: SegmentMode,
    #[serde(default)]
    pub f0_start_hz: f64,
    #[serde(default)]
    pub f0_end_hz: f64,
}

impl Segment {
    pub fn voiced(duration_s: f64, f0_start_hz: f64, f0_end_hz: f64) -> Self {
        Self {
            duration_s,
            mode: SegmentMode::Voiced,
            f0_start_hz,
            f0_end_hz,
        }
    }

    pub fn unvoiced(duration_s: f64) -> Self {
        Self {
            duration_s,
            mode: SegmentMode::Unvoiced,
            f0_start_hz: 0.0,
            f0_end_hz: 0.0,
        }
    }

    pub fn silence(duration_s: f64) -> Self {
        Self {
            duration_s,
            mode: SegmentMode::Silence,
            f0_start_hz: 0.0,
            f0_end_hz: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
}

pub fn default_formants() -> Vec<Formant> {
    [(1000.0, 150.0), (3000.0, 250.0), (4500.0, 300.0)]
        .into_iter()
        .map(|(center_hz, bandwidth_hz)| Formant {
            center_hz,
            bandwidth_hz,
        })
        .collect()
}

fn default_sample_rate() -> f64 {
    16000.0
}

fn default_noise_level() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrySpec {
    #[serde(rename = "segment", default)]
    pub segments: Vec<Segment>,
    #[serde(default = "default_formants")]
    pub formants: Vec<Formant>,
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: f64,
    /// Excitation noise std in voiced segments, relative to unit pulses.
    #[serde(default = "default_noise_level")]
    pub noise_level: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CrySpec {
    pub fn new(segments: Vec<Segment>, sample_rate_hz: f64, seed: u64) -> Self {
        Self {
            segments,
            formants: default_formants(),
            sample_rate_hz,
            noise_level: default_noise_level(),
            seed,
        }
    }

    /// A single voiced segment at constant F0.
    pub fn constant(f0_hz: f64, duration_s: f64, sample_rate_hz: f64, seed: u64) -> Self {
        Self::new(
            vec![Segment::voiced(duration_s, f0_hz, f0_hz)],
            sample_rate_hz,
            seed,
        )
    }

    pub fn with_noise_level(mut self, noise_level: f64) -> Self {
        self.noise_level = noise_level;
        self
    }

    pub fn with_formants(mut self, formants: Vec<Formant>) -> Self {
        self.formants = formants;
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fs = self.sample_rate_hz;
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(fs > 0.0 && fs.is_finite()) {
            return bad(format!("sample rate must be positive, got {fs}"));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad(format!(
                "noise level must be >= 0, got {}",
                self.noise_level
            ));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration_s > 0.0 && s.duration_s.is_finite()) {
                return bad(format!("segment {i}: duration must be positive"));
            }
            if s.mode == SegmentMode::Voiced {
                for f in [s.f0_start_hz, s.f0_end_hz] {
                    if !(f > 0.0 && f < fs / 2.0) {
                        return bad(format!(
                            "segment {i}: voiced F0 {f} outside (0, {})",
                            fs / 2.0
                        ));
                    }
                }
            }
        }
        for (i, f) in self.formants.iter().enumerate() {
            if !(f.center_hz > 0.0 && f.center_hz < fs / 2.0) {
                return bad(format!(
                    "formant {i}: center {} outside (0, {})",
                    f.center_hz,
                    fs / 2.0
                ));
            }
            if !(f.bandwidth_hz > 0.0) {
                return bad(format!("formant {i}: bandwidth must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct SegmentSpan {
    start: usize,
    len: usize,
    segment: Segment,
}

/// Exact F0 trajectory of a synthesized cry.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    spans: Vec<SegmentSpan>,
    sample_rate_hz: f64,
    total_samples: usize,
}

impl GroundTruth {
    fn new(segments: &[Segment], sample_rate_hz: f64) -> Self {
        let mut start = 0;
        let spans = segments
            .iter()
            .map(|&segment| {
                let len = (segment.duration_s * sample_rate_hz).round() as usize;
                let span = SegmentSpan {
                    start,
                    len,
                    segment,
                };
                start += len;
                span
            })
            .collect();
        Self {
            spans,
            sample_rate_hz,
            total_samples: start,
        }
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.total_samples
    }

    pub fn is_empty(&self) -> bool {
        self.total_samples == 0
    }

    /// F0 at a (possibly fractional) sample position; 0 outside voiced segments.
    pub fn f0_at_sample_pos(&self, pos: f64) -> f64 {
        self.spans
            .iter()
            .find(|s| pos >= s.start as f64 && pos < (s.start + s.len) as f64)
            .filter(|s| s.segment.mode == SegmentMode::Voiced)
            .map_or(0.0, |s| {
                let frac = (pos - s.start as f64) / s.len as f64;
                s.segment.f0_start_hz + (s.segment.f0_end_hz - s.segment.f0_start_hz) * frac
            })
    }

    pub fn f0_at_time(&self, time_s: f64) -> f64 {
        self.f0_at_sample_pos(time_s * self.sample_rate_hz)
    }

    /// Per-sample F0, 0 where unvoiced.
    pub fn trajectory(&self) -> Vec<f64> {
        (0..self.total_samples)
            .map(|n| self.f0_at_sample_pos(n as f64))
            .collect()
    }

    /// Reference value at the center of every complete frame.
    pub fn reference_contour(&self, frame_len: usize, hop: usize) -> ReferenceContour {
        let n = dsp::frame_count(self.total_samples, frame_len, hop);
        ReferenceContour::new(
            (0..n)
                .map(|i| {
                    let center = (i * hop) as f64 + frame_len as f64 / 2.0;
                    ReferenceFrame {
                        time_s: center / self.sample_rate_hz,
                        f0_hz: self.f0_at_sample_pos(center),
                    }
                })
                .collect(),
        )
    }

    /// Reference contour for the framing used by `config`.
    pub fn reference_for(&self, config: &TrackerConfig) -> ReferenceContour {
        self.reference_contour(
            config.frame_len_samples(self.sample_rate_hz),
            config.hop_samples(self.sample_rate_hz),
        )
    }
}

/// Unit impulses placed where the integrated phase `sum f0[n] / Fs` crosses
/// an integer.
pub fn pulse_train(f0_trajectory: &[f64], sample_rate_hz: f64) -> Result<Vec<f64>> {
    if let Some(f) = f0_trajectory
        .iter()
        .find(|&&f| !(f > 0.0 && f < sample_rate_hz / 2.0))
    {
        return Err(Error::InvalidArgument(format!(
            "F0 {f} outside (0, {})",
            sample_rate_hz / 2.0
        )));
    }
    // Accumulate in Hz * samples so integer frequencies give exact periods.
    let mut acc = 0.0;
    Ok(f0_trajectory
        .iter()
        .map(|&f| {
            let before = (acc / sample_rate_hz).floor();
            acc += f;
            if (acc / sample_rate_hz).floor() > before {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

/// Half-width in samples of the band-limited pulse kernel.
const PULSE_KERNEL_HALF_WIDTH: usize = 16;

/// Band-limited pulses at the exact (fractional) instants where the
/// integrated phase crosses an integer. Each pulse is a Hann-windowed sinc
/// centred on its crossing time, so the train is periodic with the true,
/// generally non-integer, period.
pub fn band_limited_pulse_train(f0_trajectory: &[f64], sample_rate_hz: f64) -> Result<Vec<f64>> {
    if let Some(f) = f0_trajectory
        .iter()
        .find(|&&f| !(f > 0.0 && f < sample_rate_hz / 2.0))
    {
        return Err(Error::InvalidArgument(format!(
            "F0 {f} outside (0, {})",
            sample_rate_hz / 2.0
        )));
    }
    let n = f0_trajectory.len();
    let mut out = vec![0.0; n];
    let half = PULSE_KERNEL_HALF_WIDTH as f64;
    let mut acc = 0.0;
    for (i, &f) in f0_trajectory.iter().enumerate() {
        let before = acc;
        acc += f;
        let crossing = (acc / sample_rate_hz).floor();
        if crossing > (before / sample_rate_hz).floor() {
            // Phase hits the integer `crossing` between samples i-1 and i.
            let frac = (acc - crossing * sample_rate_hz) / f;
            let t = i as f64 - frac;
            let lo = (t - half).ceil().max(0.0) as usize;
            let hi = ((t + half).floor() as usize).min(n.saturating_sub(1));
            for (m, slot) in out.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let x = m as f64 - t;
                let sinc = if x == 0.0 {
                    1.0
                } else {
                    (PI * x).sin() / (PI * x)
                };
                let window = 0.5 + 0.5 * (PI * x / (half + 1.0)).cos();
                *slot += sinc * window;
            }
        }
    }
    Ok(out)
}

/// Second-order resonator with unit gain at DC.
#[derive(Debug, Clone, Copy)]
struct Resonator {
    a: f64,
    b: f64,
    c: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(formant: Formant, sample_rate_hz: f64) -> Self {
        let r = (-PI * formant.bandwidth_hz / sample_rate_hz).exp();
        let c = -r * r;
        let b = 2.0 * r * (2.0 * PI * formant.center_hz / sample_rate_hz).cos();
        Self {
            a: 1.0 - b - c,
            b,
            c,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn process(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Pole radius of a resonator with the given bandwidth.
pub fn pole_radius(bandwidth_hz: f64, sample_rate_hz: f64) -> f64 {
    (-PI * bandwidth_hz / sample_rate_hz).exp()
}

/// Renders the cry described by `spec` along with its ground truth.
pub fn synth_cry(spec: &CrySpec) -> Result<(AudioBuffer, GroundTruth)> {
    spec.validate()?;
    let fs = spec.sample_rate_hz;
    let truth = GroundTruth::new(&spec.segments, fs);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut excitation = Vec::with_capacity(truth.len());
    for span in &truth.spans {
        match span.segment.mode {
            SegmentMode::Voiced => {
                let trajectory: Vec<f64> = (span.start..span.start + span.len)
                    .map(|n| truth.f0_at_sample_pos(n as f64))
                    .collect();
                for p in band_limited_pulse_train(&trajectory, fs)? {
                    let noise: f64 = rng.sample(StandardNormal);
                    excitation.push(p + spec.noise_level * noise);
                }
            }
            SegmentMode::Unvoiced => {
                for _ in 0..span.len {
                    let noise: f64 = rng.sample(StandardNormal);
                    excitation.push(UNVOICED_EXCITATION_STD * noise);
                }
            }
            SegmentMode::Silence => excitation.resize(excitation.len() + span.len, 0.0),
        }
    }

    let mut resonators: Vec<Resonator> = spec
        .formants
        .iter()
        .map(|&f| Resonator::new(f, fs))
        .collect();
    let mut samples: Vec<f64> = excitation
        .into_iter()
        .map(|x| resonators.iter_mut().fold(x, |acc, r| r.process(acc)))
        .collect();
    for span in truth
        .spans
        .iter()
        .filter(|s| s.segment.mode == SegmentMode::Silence)
    {
        samples[span.start..span.start + span.len].fill(0.0);
    }

    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        let gain = PEAK_AMPLITUDE / peak;
        samples.iter_mut().for_each(|s| *s *= gain);
    }
    Ok((AudioBuffer::new(samples, fs)?, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_pulse_train_has_exact_period() {
        let p = pulse_train(&vec![400.0; 16000], 16000.0).unwrap();
        let idx: Vec<usize> = p
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1.0)
            .map(|(i, _)| i)
            .collect();
        assert!((399..=401).contains(&idx.len()), "{} pulses", idx.len());
        assert!(idx.windows(2).all(|w| w[1] - w[0] == 40));
        assert_eq!(p.iter().filter(|&&v| v != 0.0 && v != 1.0).count(), 0);
    }

    #[test]
    fn empty_trajectory() {
        assert!(pulse_train(&[], 16000.0).unwrap().is_empty());
    }

    #[test]
    fn pulse_train_rejects_bad_f0() {
        assert!(pulse_train(&[400.0, 0.0], 16000.0).is_err());
        assert!(pulse_train(&[9000.0], 16000.0).is_err());
    }

    #[test]
    fn band_limited_train_matches_impulses_on_integer_periods() {
        let a = pulse_train(&vec![400.0; 4000], 16000.0).unwrap();
        let b = band_limited_pulse_train(&vec![400.0; 4000], 16000.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn band_limited_train_keeps_fractional_period() {
        // Period 10.5 samples: the train repeats every 21 samples.
        let fs = 16000.0;
        let b = band_limited_pulse_train(&vec![fs / 10.5; 2000], fs).unwrap();
        for n in 100..1800 {
            assert!((b[n + 21] - b[n]).abs() < 1e-9, "n = {n}");
        }
        let mean: f64 = b[100..100 + 21 * 60].iter().sum::<f64>() / (21.0 * 60.0);
        assert!((mean - 1.0 / 10.5).abs() < 1e-3, "{mean}");
        assert!(band_limited_pulse_train(&[0.0], fs).is_err());
    }

    #[test]
    fn glide_pulse_count_matches_integrated_f0() {
        // Mean F0 1050 Hz over 1 s -> about 1050 pulses.
        let traj: Vec<f64> = (0..16000)
            .map(|n| 700.0 + 700.0 * n as f64 / 16000.0)
            .collect();
        let count = pulse_train(&traj, 16000.0)
            .unwrap()
            .iter()
            .filter(|&&v| v > 0.0)
            .count();
        assert!((1049..=1051).contains(&count), "{count}");
    }

    #[test]
    fn silence_only_spec() {
        let spec = CrySpec::new(vec![Segment::silence(0.5)], 16000.0, 1);
        let (audio, truth) = synth_cry(&spec).unwrap();
        assert_eq!(audio.len(), 8000);
        assert!(audio.samples().iter().all(|&s| s == 0.0));
        assert!(truth.trajectory().iter().all(|&f| f == 0.0));
        let r = truth.reference_for(&TrackerConfig::default());
        assert!(r.frames.iter().all(|f| f.f0_hz == 0.0));
    }

    #[test]
    fn output_is_peak_normalized_and_deterministic() {
        let spec = CrySpec::new(
            vec![
                Segment::voiced(0.2, 500.0, 600.0),
                Segment::unvoiced(0.1),
                Segment::silence(0.05),
            ],
            16000.0,
            9,
        );
        let (a, _) = synth_cry(&spec).unwrap();
        let (b, _) = synth_cry(&spec).unwrap();
        assert_eq!(a, b);
        let peak = a.samples().iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!((peak - PEAK_AMPLITUDE).abs() < 1e-12);
        assert!(a.samples()[4800..].iter().all(|&s| s == 0.0));
        let (c, _) = synth_cry(&CrySpec { seed: 10, ..spec }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn glide_reference_follows_frame_centers() {
        let spec = CrySpec::new(vec![Segment::voiced(1.0, 700.0, 1400.0)], 16000.0, 3);
        let (_, truth) = synth_cry(&spec).unwrap();
        let r = truth.reference_contour(256, 128);
        assert_eq!(r.len(), 124);
        for f in &r.frames {
            let expected = 700.0 + 700.0 * f.time_s / 1.0;
            assert!(
                (f.f0_hz - expected).abs() < 1e-9,
                "{} vs {expected}",
                f.f0_hz
            );
        }
    }

    #[test]
    fn reference_switches_at_segment_boundaries() {
        let spec = CrySpec::new(
            vec![Segment::voiced(0.1, 400.0, 400.0), Segment::unvoiced(0.1)],
            16000.0,
            0,
        );
        let (_, truth) = synth_cry(&spec).unwrap();
        assert_eq!(truth.f0_at_time(0.0999), 400.0);
        assert_eq!(truth.f0_at_time(0.1), 0.0);
        assert_eq!(truth.f0_at_time(0.25), 0.0);
    }

    #[test]
    fn validation() {
        let ok = CrySpec::constant(400.0, 0.1, 16000.0, 0);
        assert!(ok.validate().is_ok());
        assert!(CrySpec::constant(9000.0, 0.1, 16000.0, 0)
            .validate()
            .is_err());
        assert!(CrySpec::constant(400.0, 0.0, 16000.0, 0)
            .validate()
            .is_err());
        assert!(ok.clone().with_noise_level(-1.0).validate().is_err());
        let bad_formant = ok.with_formants(vec![Formant {
            center_hz: 1000.0,
            bandwidth_hz: 0.0,
        }]);
        assert!(bad_formant.validate().is_err());
    }

    #[test]
    fn default_formants_are_stable() {
        for f in default_formants() {
            let r = pole_radius(f.bandwidth_hz, 16000.0);
            assert!(r > 0.0 && r < 1.0);
        }
    }

    #[test]
    fn parses_toml_spec() {
        let text = r#"
            sample_rate_hz = 16000
            noise_level = 0.02
            seed = 5
            formants = [[1000, 150], [3000, 250]]

            [[segment]]
            duration_s = 0.3
            mode = "voiced"
            f0_start_hz = 380
            f0_end_hz = 420

            [[segment]]
            duration_s = 0.1
            mode = "silence"
        "#;
        let spec = CrySpec::from_toml(text).unwrap();
        assert_eq!(spec.segments.len(), 2);
        assert_eq!(spec.segments[1].mode, SegmentMode::Silence);
        assert_eq!(spec.formants.len(), 2);
        assert_eq!(spec.noise_level, 0.02);
        assert!(CrySpec::from_toml("bogus = 1").is_err());
    }
}
