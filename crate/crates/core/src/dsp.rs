//! Signal primitives shared by the tracker, the cepstral baseline and the
//! spectrogram: framing, windowing, normalized autocorrelation, LPC via the
//! Levinson-Durbin recursion, inverse filtering and the real cepstrum.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Numerical slack allowed on normalized autocorrelation values.
pub const AUTOCORR_SLACK: f64 = 1e-9;

/// Magnitude floor applied before taking logarithms of spectra.
pub const LOG_MAGNITUDE_FLOOR: f64 = 1e-10;

/// Mono audio with its sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    /// Sample period in seconds.
    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(
            self.samples.iter().map(|s| s * gain).collect(),
            self.sample_rate_hz,
        )
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Converts a duration in milliseconds to a whole number of samples.
pub fn ms_to_samples(ms: f64, sample_rate_hz: f64) -> usize {
    (ms * sample_rate_hz / 1000.0).round() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    Rectangular,
    #[default]
    Hamming,
}

impl WindowKind {
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            WindowKind::Rectangular => vec![1.0; len],
            WindowKind::Hamming => hamming(len),
        }
    }
}

/// Symmetric Hamming window, `0.54 - 0.46 cos(2 pi n / (len - 1))`.
pub fn hamming(len: usize) -> Vec<f64> {
    match len {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => {
            let denom = (len - 1) as f64;
            (0..len)
                .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / denom).cos())
                .collect()
        }
    }
}

/// One windowed analysis block.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub samples: Vec<f64>,
    pub start_sample: usize,
    pub frame_index: usize,
}

impl Frame {
    /// Center of the frame in seconds.
    pub fn center_time_s(&self, sample_rate_hz: f64) -> f64 {
        frame_center_s(self.start_sample, self.samples.len(), sample_rate_hz)
    }

    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }
}

pub(crate) fn frame_center_s(start_sample: usize, frame_len: usize, sample_rate_hz: f64) -> f64 {
    (start_sample as f64 + frame_len as f64 / 2.0) / sample_rate_hz
}

/// Number of complete frames that fit in `signal_len` samples.
pub fn frame_count(signal_len: usize, frame_len: usize, hop: usize) -> usize {
    if signal_len < frame_len || hop == 0 {
        0
    } else {
        (signal_len - frame_len) / hop + 1
    }
}

/// Splits `audio` into overlapping windowed frames. A trailing partial
/// frame is dropped, never zero-padded.
pub fn frame_signal(
    audio: &AudioBuffer,
    frame_len_samples: usize,
    hop_samples: usize,
    window: WindowKind,
) -> Result<Vec<Frame>> {
    if frame_len_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "frame length must be at least 2 samples, got {frame_len_samples}"
        )));
    }
    if hop_samples == 0 || hop_samples > frame_len_samples {
        return Err(Error::InvalidArgument(format!(
            "hop must be in [1, {frame_len_samples}], got {hop_samples}"
        )));
    }
    let coeffs = window.coefficients(frame_len_samples);
    let samples = audio.samples();
    let n = frame_count(samples.len(), frame_len_samples, hop_samples);
    Ok((0..n)
        .map(|frame_index| {
            let start_sample = frame_index * hop_samples;
            let block = &samples[start_sample..start_sample + frame_len_samples];
            Frame {
                samples: block.iter().zip(&coeffs).map(|(x, w)| x * w).collect(),
                start_sample,
                frame_index,
            }
        })
        .collect())
}

pub fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Autocorrelation indexed by lag, `values[0]` being lag zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrSeq {
    pub values: Vec<f64>,
}

impl AutocorrSeq {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn max_lag(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Biased autocorrelation for lags `0..=max_lag`, divided by the lag-0 value.
pub fn normalized_autocorrelation(frame: &[f64], max_lag: usize) -> Result<AutocorrSeq> {
    if frame.is_empty() {
        return Err(Error::InvalidArgument("empty frame".into()));
    }
    if max_lag == 0 || max_lag >= frame.len() {
        return Err(Error::InvalidArgument(format!(
            "max_lag must be in [1, {}), got {max_lag}",
            frame.len()
        )));
    }
    let r0 = energy(frame);
    if !(r0 > 0.0) {
        return Err(Error::DegenerateInput("zero-energy frame"));
    }
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(1.0);
    for lag in 1..=max_lag {
        let r: f64 = frame.iter().zip(&frame[lag..]).map(|(a, b)| a * b).sum();
        values.push(r / r0);
    }
    Ok(AutocorrSeq { values })
}

/// All-pole predictor `x[n] ~ sum_k coefficients[k-1] * x[n-k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpcModel {
    pub coefficients: Vec<f64>,
    pub order: usize,
    pub prediction_error: f64,
    pub reflection_coefficients: Vec<f64>,
}

impl LpcModel {
    /// Identity whitening filter (all predictor coefficients zero).
    pub fn identity(order: usize) -> Self {
        Self {
            coefficients: vec![0.0; order],
            order,
            prediction_error: 0.0,
            reflection_coefficients: vec![0.0; order],
        }
    }
}

/// Solves the autocorrelation-method normal equations by the Levinson-Durbin
/// recursion.
pub fn levinson_durbin(autocorr: &AutocorrSeq, order: usize) -> Result<LpcModel> {
    let r = &autocorr.values;
    if order == 0 {
        return Err(Error::InvalidArgument(
            "LPC order must be at least 1".into(),
        ));
    }
    if r.len() <= order {
        return Err(Error::InvalidArgument(format!(
            "autocorrelation has {} lags, order {order} needs {}",
            r.len(),
            order + 1
        )));
    }
    if !(r[0] > 0.0) {
        return Err(Error::DegenerateInput(
            "autocorrelation at lag 0 is not positive",
        ));
    }

    let mut a = vec![0.0; order];
    let mut prev = vec![0.0; order];
    let mut reflections = Vec::with_capacity(order);
    let mut err = r[0];
    for i in 0..order {
        let acc = r[i + 1] - (0..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = acc / err;
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(Error::Unstable {
                order: i + 1,
                reflection: k,
            });
        }
        prev[..i].copy_from_slice(&a[..i]);
        for j in 0..i {
            a[j] = prev[j] - k * prev[i - 1 - j];
        }
        a[i] = k;
        reflections.push(k);
        err *= 1.0 - k * k;
    }
    Ok(LpcModel {
        coefficients: a,
        order,
        prediction_error: err,
        reflection_coefficients: reflections,
    })
}

/// Applies the FIR whitening filter `A(z) = 1 - sum_k a_k z^-k` with zero
/// initial history. Output has the same length as the input.
pub fn inverse_filter(frame: &[f64], model: &LpcModel) -> Result<Vec<f64>> {
    if frame.len() <= model.order {
        return Err(Error::InvalidArgument(format!(
            "frame of {} samples is too short for order {}",
            frame.len(),
            model.order
        )));
    }
    Ok((0..frame.len())
        .map(|n| {
            let predicted: f64 = model
                .coefficients
                .iter()
                .enumerate()
                .take_while(|(k, _)| *k < n)
                .map(|(k, a)| a * frame[n - k - 1])
                .sum();
            frame[n] - predicted
        })
        .collect())
}

/// Real cepstrum indexed by quefrency bin; bin `q` sits at `q / sample_rate` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct CepstrumSeq {
    pub values: Vec<f64>,
}

impl CepstrumSeq {
    pub fn quefrency_s(index: usize, sample_rate_hz: f64) -> f64 {
        index as f64 / sample_rate_hz
    }
}

/// Inverse FFT of the log magnitude spectrum of the zero-padded frame.
pub fn real_cepstrum(frame: &[f64], fft_size: usize) -> Result<CepstrumSeq> {
    if !fft_size.is_power_of_two() || fft_size < frame.len() {
        return Err(Error::InvalidArgument(format!(
            "fft size must be a power of two >= {}, got {fft_size}",
            frame.len()
        )));
    }
    if !(energy(frame) > 0.0) {
        return Err(Error::DegenerateInput("zero-energy frame"));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf = zero_padded(frame, fft_size);
    planner.plan_fft_forward(fft_size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm().max(LOG_MAGNITUDE_FLOOR).ln(), 0.0);
    }
    planner.plan_fft_inverse(fft_size).process(&mut buf);
    let scale = 1.0 / fft_size as f64;
    Ok(CepstrumSeq {
        values: buf.iter().map(|c| c.re * scale).collect(),
    })
}

/// Squared FFT magnitudes for bins `0..=fft_size/2` of the zero-padded input.
pub fn power_spectrum(x: &[f64], fft_size: usize) -> Vec<f64> {
    let mut buf = zero_padded(x, fft_size);
    FftPlanner::<f64>::new()
        .plan_fft_forward(fft_size)
        .process(&mut buf);
    buf[..=fft_size / 2].iter().map(|c| c.norm_sqr()).collect()
}

/// Ratio of geometric to arithmetic mean of the power spectrum; 1 for white
/// spectra, towards 0 for peaky ones. DC and Nyquist bins are excluded.
pub fn spectral_flatness(x: &[f64]) -> f64 {
    let fft_size = x.len().max(2).next_power_of_two();
    let spectrum = power_spectrum(x, fft_size);
    let bins = &spectrum[1..spectrum.len() - 1];
    if bins.is_empty() {
        return 0.0;
    }
    let n = bins.len() as f64;
    let log_mean = bins.iter().map(|p| p.max(1e-300).ln()).sum::<f64>() / n;
    let mean = bins.iter().sum::<f64>() / n;
    if mean > 0.0 {
        log_mean.exp() / mean
    } else {
        0.0
    }
}

fn zero_padded(x: &[f64], len: usize) -> Vec<Complex<f64>> {
    let mut buf = vec![Complex::new(0.0, 0.0); len];
    for (dst, &src) in buf.iter_mut().zip(x) {
        dst.re = src;
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    fn audio(samples: Vec<f64>) -> AudioBuffer {
        AudioBuffer::new(samples, 16000.0).unwrap()
    }

    #[test]
    fn audio_buffer_rejects_bad_input() {
        assert!(AudioBuffer::new(vec![0.0], 0.0).is_err());
        assert!(AudioBuffer::new(vec![f64::NAN], 16000.0).is_err());
        assert!(AudioBuffer::new(vec![f64::INFINITY], 16000.0).is_err());
    }

    #[test]
    fn sixteen_ms_at_16k_is_256_samples() {
        assert_eq!(ms_to_samples(16.0, 16000.0), 256);
    }

    #[test]
    fn frame_counts() {
        assert!(
            frame_signal(&audio(vec![0.1; 100]), 256, 128, WindowKind::Hamming)
                .unwrap()
                .is_empty()
        );
        assert!(frame_signal(&audio(vec![]), 256, 128, WindowKind::Hamming)
            .unwrap()
            .is_empty());
        let frames = frame_signal(&audio(vec![0.1; 16000]), 256, 128, WindowKind::Hamming).unwrap();
        // floor((16000 - 256) / 128) + 1
        assert_eq!(frames.len(), 124);
        for (i, f) in frames.iter().enumerate() {
            assert_eq!(f.frame_index, i);
            assert_eq!(f.start_sample, i * 128);
            assert_eq!(f.samples.len(), 256);
        }
    }

    #[test]
    fn frame_signal_rejects_bad_hop() {
        let a = audio(vec![0.0; 1000]);
        assert!(matches!(
            frame_signal(&a, 256, 0, WindowKind::Hamming),
            Err(Error::InvalidArgument(_))
        ));
        assert!(frame_signal(&a, 256, 257, WindowKind::Hamming).is_err());
        assert!(frame_signal(&a, 1, 1, WindowKind::Hamming).is_err());
    }

    #[test]
    fn frames_are_windowed_blocks() {
        let raw: Vec<f64> = (0..600)
            .map(|n| ((n * 37 % 101) as f64 - 50.0) / 50.0)
            .collect();
        let frames = frame_signal(&audio(raw.clone()), 200, 80, WindowKind::Hamming).unwrap();
        for f in &frames {
            for (n, &v) in f.samples.iter().enumerate() {
                let w = 0.54 - 0.46 * (2.0 * PI * n as f64 / 199.0).cos();
                assert!((v - raw[f.start_sample + n] * w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hamming_endpoints_and_symmetry() {
        let w = hamming(256);
        assert!((w[0] - 0.08).abs() < 1e-12);
        assert!((w[255] - 0.08).abs() < 1e-12);
        for n in 0..128 {
            assert!((w[n] - w[255 - n]).abs() < 1e-12);
        }
    }

    #[test]
    fn autocorrelation_lag_zero_is_one() {
        let x: Vec<f64> = (0..64).map(|n| (n as f64 * 0.3).sin() + 0.2).collect();
        let r = normalized_autocorrelation(&x, 20).unwrap();
        assert_eq!(r.values[0], 1.0);
        assert_eq!(r.len(), 21);
    }

    #[test]
    fn autocorrelation_of_cosine_peaks_at_period() {
        // Oracle: direct double-sum over the definition.
        let x: Vec<f64> = (0..1024)
            .map(|n| (2.0 * PI * n as f64 / 64.0).cos())
            .collect();
        let r = normalized_autocorrelation(&x, 128).unwrap();
        let r0: f64 = x.iter().map(|v| v * v).sum();
        for lag in [1usize, 32, 64, 100] {
            let mut s = 0.0;
            for n in 0..x.len() - lag {
                s += x[n] * x[n + lag];
            }
            assert!((r.values[lag] - s / r0).abs() < 1e-12);
        }
        // Search past the lag-0 lobe (first negative value).
        let first_negative = r.values.iter().position(|&v| v < 0.0).unwrap();
        let (best, value) = (first_negative..r.len())
            .map(|lag| (lag, r.values[lag]))
            .fold(
                (0, f64::MIN),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        assert_eq!(best, 64);
        assert!(value >= 0.9, "value {value}");
    }

    #[test]
    fn autocorrelation_errors() {
        assert!(matches!(
            normalized_autocorrelation(&[0.0; 32], 4),
            Err(Error::DegenerateInput(_))
        ));
        assert!(normalized_autocorrelation(&[], 1).is_err());
        assert!(normalized_autocorrelation(&[1.0; 4], 4).is_err());
        assert!(normalized_autocorrelation(&[1.0; 4], 0).is_err());
    }

    #[test]
    fn levinson_on_white_input() {
        let mut values = vec![0.0; 6];
        values[0] = 2.5;
        let m = levinson_durbin(&AutocorrSeq::from_values(values), 4).unwrap();
        assert_eq!(m.coefficients, vec![0.0; 4]);
        assert_eq!(m.prediction_error, 2.5);
        assert_eq!(m.order, 4);
    }

    #[test]
    fn levinson_recovers_ar2() {
        // Exact AR(2) autocorrelation: r1 = a1 / (1 - a2) r0, then the
        // Yule-Walker recursion r_k = a1 r_{k-1} + a2 r_{k-2}.
        let (a1, a2) = (0.9, -0.2);
        let mut r = vec![1.0, a1 / (1.0 - a2)];
        for k in 2..6 {
            let next = a1 * r[k - 1] + a2 * r[k - 2];
            r.push(next);
        }
        let m = levinson_durbin(&AutocorrSeq::from_values(r.clone()), 2).unwrap();
        assert!((m.coefficients[0] - a1).abs() < 1e-6);
        assert!((m.coefficients[1] - a2).abs() < 1e-6);
        // Higher orders add zero coefficients.
        let m4 = levinson_durbin(&AutocorrSeq::from_values(r), 4).unwrap();
        assert!(m4.coefficients[2].abs() < 1e-9 && m4.coefficients[3].abs() < 1e-9);
    }

    #[test]
    fn levinson_errors() {
        let r = AutocorrSeq::from_values(vec![1.0, 0.5, 0.2]);
        assert!(levinson_durbin(&r, 0).is_err());
        assert!(levinson_durbin(&r, 3).is_err());
        assert!(matches!(
            levinson_durbin(&AutocorrSeq::from_values(vec![0.0, 0.0, 0.0]), 2),
            Err(Error::DegenerateInput(_))
        ));
        // Not positive definite: |r1| > r0.
        assert!(matches!(
            levinson_durbin(&AutocorrSeq::from_values(vec![1.0, 1.5, 0.2]), 2),
            Err(Error::Unstable { order: 1, .. })
        ));
    }

    #[test]
    fn identity_inverse_filter() {
        let x = vec![0.3, -0.1, 0.7, 0.2, -0.5, 0.0];
        let y = inverse_filter(&x, &LpcModel::identity(4)).unwrap();
        assert_eq!(x, y);
        assert!(inverse_filter(&x[..4], &LpcModel::identity(4)).is_err());
    }

    #[test]
    fn inverse_filter_uses_zero_history() {
        let model = LpcModel {
            coefficients: vec![0.5, 0.25],
            order: 2,
            prediction_error: 1.0,
            reflection_coefficients: vec![0.0, 0.0],
        };
        let y = inverse_filter(&[1.0, 2.0, 3.0, 4.0], &model).unwrap();
        assert_eq!(y, vec![1.0, 2.0 - 0.5, 3.0 - 1.0 - 0.25, 4.0 - 1.5 - 0.5]);
    }

    #[test]
    fn cepstrum_of_scaled_impulse_is_concentrated_at_zero() {
        let mut x = vec![0.0; 256];
        x[0] = 0.5;
        let c = real_cepstrum(&x, 256).unwrap();
        assert!((c.values[0] - 0.5f64.ln()).abs() < 1e-12);
        assert!(c.values[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn cepstrum_of_dc_frame_is_dominated_by_quefrency_zero() {
        let c = real_cepstrum(&[0.3; 256], 256).unwrap();
        assert_eq!(c.values.len(), 256);
        let c0 = c.values[0].abs();
        assert!(c.values[1..].iter().all(|v| v.abs() < c0 / 10.0));
    }

    #[test]
    fn cepstrum_errors() {
        assert!(real_cepstrum(&[0.0; 64], 64).is_err());
        assert!(real_cepstrum(&[1.0; 64], 100).is_err());
        assert!(real_cepstrum(&[1.0; 64], 32).is_err());
    }

    #[test]
    fn flatness_orders_white_above_tonal() {
        let tone: Vec<f64> = (0..512).map(|n| (0.2 * n as f64).sin()).collect();
        let mut impulse = vec![0.0; 512];
        impulse[3] = 1.0;
        assert!((spectral_flatness(&impulse) - 1.0).abs() < 1e-9);
        assert!(spectral_flatness(&tone) < 0.1);
    }
}
