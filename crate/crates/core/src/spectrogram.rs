//! Hamming-windowed short-time magnitude spectra in dB.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::dsp::{self, AudioBuffer, WindowKind};
use crate::error::{Error, Result};

pub const DEFAULT_FRAME_MS: f64 = 20.0;
pub const DEFAULT_HOP_MS: f64 = 10.0;
pub const DB_FLOOR: f64 = -120.0;

/// `values[bin][frame]` in dB; rows follow `freqs_hz`, columns `times_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramMatrix {
    pub freqs_hz: Vec<f64>,
    pub times_s: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub frame_len: usize,
    pub fft_size: usize,
}

impl SpectrogramMatrix {
    pub fn is_empty(&self) -> bool {
        self.times_s.is_empty()
    }

    /// Magnitudes of one frame, one value per frequency bin.
    pub fn column(&self, frame: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[frame]).collect()
    }

    /// Writes CSV with frequencies across the first row and frame times down
    /// the first column.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = std::iter::once("time_s".to_string())
            .chain(self.freqs_hz.iter().map(|f| format!("{f}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (j, t) in self.times_s.iter().enumerate() {
            let row: Vec<String> = std::iter::once(format!("{t}"))
                .chain(self.values.iter().map(|bin| format!("{:.3}", bin[j])))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Short-time spectrum magnitudes, 20·log10|X| floored at -120 dB. The FFT
/// size is the next power of two at or above the frame length.
pub fn spectrogram(audio: &AudioBuffer, frame_ms: f64, hop_ms: f64) -> Result<SpectrogramMatrix> {
    if !(hop_ms > 0.0 && frame_ms > hop_ms) {
        return Err(Error::InvalidArgument(format!(
            "need frame_ms > hop_ms > 0, got {frame_ms} / {hop_ms}"
        )));
    }
    let fs = audio.sample_rate_hz();
    let frame_len = dsp::ms_to_samples(frame_ms, fs);
    let hop = dsp::ms_to_samples(hop_ms, fs).max(1);
    let fft_size = frame_len.max(2).next_power_of_two();
    let frames = dsp::frame_signal(audio, frame_len, hop.min(frame_len), WindowKind::Hamming)?;
    let bins = fft_size / 2 + 1;
    let freqs_hz = (0..bins).map(|k| k as f64 * fs / fft_size as f64).collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(fft_size);
    let mut values = vec![Vec::with_capacity(frames.len()); bins];
    let mut times_s = Vec::with_capacity(frames.len());
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    for frame in &frames {
        buf.fill(Complex::new(0.0, 0.0));
        for (dst, &x) in buf.iter_mut().zip(&frame.samples) {
            dst.re = x;
        }
        fft.process(&mut buf);
        for (row, c) in values.iter_mut().zip(&buf[..bins]) {
            let mag = c.norm();
            row.push(if mag > 0.0 {
                (20.0 * mag.log10()).max(DB_FLOOR)
            } else {
                DB_FLOOR
            });
        }
        times_s.push(frame.center_time_s(fs));
    }
    Ok(SpectrogramMatrix {
        freqs_hz,
        times_s,
        values,
        frame_len,
        fft_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_ms_frames_at_16k() {
        let audio = AudioBuffer::new(vec![0.1; 16000], 16000.0).unwrap();
        let s = spectrogram(&audio, DEFAULT_FRAME_MS, DEFAULT_HOP_MS).unwrap();
        assert_eq!(s.frame_len, 320);
        assert_eq!(s.fft_size, 512);
        assert_eq!(s.freqs_hz.len(), 257);
        assert_eq!(s.times_s.len(), (16000 - 320) / 160 + 1);
        assert!(s.values.iter().all(|row| row.len() == s.times_s.len()));
    }

    #[test]
    fn tone_peaks_at_nearest_bin() {
        let fs = 16000.0;
        let x: Vec<f64> = (0..8000)
            .map(|n| (2.0 * std::f64::consts::PI * 1000.0 * n as f64 / fs).sin())
            .collect();
        let s = spectrogram(&AudioBuffer::new(x, fs).unwrap(), 20.0, 10.0).unwrap();
        let nearest = (1000.0 / (fs / s.fft_size as f64)).round() as usize;
        for j in 0..s.times_s.len() {
            let col = s.column(j);
            let argmax = (0..col.len())
                .max_by(|&a, &b| col[a].total_cmp(&col[b]))
                .unwrap();
            assert_eq!(argmax, nearest);
        }
    }

    #[test]
    fn silence_hits_the_floor_and_short_audio_is_empty() {
        let s = spectrogram(
            &AudioBuffer::new(vec![0.0; 1000], 16000.0).unwrap(),
            20.0,
            10.0,
        )
        .unwrap();
        assert!(s.values.iter().flatten().all(|&v| v == DB_FLOOR));
        let short = spectrogram(
            &AudioBuffer::new(vec![0.0; 100], 16000.0).unwrap(),
            20.0,
            10.0,
        )
        .unwrap();
        assert!(short.is_empty());
        assert!(spectrogram(
            &AudioBuffer::new(vec![0.0; 100], 16000.0).unwrap(),
            10.0,
            10.0
        )
        .is_err());
    }

    #[test]
    fn csv_layout() {
        let s = spectrogram(
            &AudioBuffer::new(vec![0.1; 640], 16000.0).unwrap(),
            20.0,
            10.0,
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + s.times_s.len());
        assert!(lines[0].starts_with("time_s,0,31.25,"));
        assert_eq!(lines[1].split(',').count(), 1 + s.freqs_hz.len());
        assert!(lines[1].starts_with("0.01,"));
    }
}
