//! Inverse-filtered autocorrelation pitch tracking.
//!
//! Each frame is Hamming-windowed, whitened with an order-M LPC inverse
//! filter, and the normalized autocorrelation of the residual is weighted by
//! a lag-domain trapezoid before the arg-max lag is taken as the pitch
//! period. A causal threshold/history rule followed by a one-frame neighbour
//! repair pass decides voicing.

use serde::{Deserialize, Serialize};

use crate::contour::{Contour, ContourFrame};
use crate::dsp::{self, AudioBuffer, AutocorrSeq, LpcModel, WindowKind};
use crate::error::{Error, Result};

/// Frames whose mean-square amplitude falls below this are treated as silence.
pub const SILENCE_MEAN_SQUARE: f64 = 1e-12;

/// Corner frequencies of the lag-domain trapezoid weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapezoidSpec {
    pub f1_hz: f64,
    pub f2_hz: f64,
    pub f3_hz: f64,
    pub f4_hz: f64,
}

impl Default for TrapezoidSpec {
    fn default() -> Self {
        Self {
            f1_hz: 150.0,
            f2_hz: 200.0,
            f3_hz: 2500.0,
            f4_hz: 3000.0,
        }
    }
}

impl TrapezoidSpec {
    pub fn new(f1_hz: f64, f2_hz: f64, f3_hz: f64, f4_hz: f64) -> Result<Self> {
        let spec = Self {
            f1_hz,
            f2_hz,
            f3_hz,
            f4_hz,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.f1_hz > 0.0
            && self.f1_hz < self.f2_hz
            && self.f2_hz < self.f3_hz
            && self.f3_hz < self.f4_hz
            && self.f4_hz.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "trapezoid corners must satisfy 0 < f1 < f2 < f3 < f4, got {self:?}"
            )))
        }
    }

    /// Weight at frequency `f_hz`: 0 outside (f1, f4), 1 on [f2, f3], linear ramps between.
    pub fn weight(&self, f_hz: f64) -> f64 {
        if f_hz <= self.f1_hz || f_hz >= self.f4_hz {
            0.0
        } else if f_hz < self.f2_hz {
            (f_hz - self.f1_hz) / (self.f2_hz - self.f1_hz)
        } else if f_hz <= self.f3_hz {
            1.0
        } else {
            (self.f4_hz - f_hz) / (self.f4_hz - self.f3_hz)
        }
    }

    /// Whether `f_hz` lies strictly inside the support (f1, f4).
    pub fn contains(&self, f_hz: f64) -> bool {
        f_hz > self.f1_hz && f_hz < self.f4_hz
    }

    /// Inclusive lag range whose mapped frequency lies in (f1, f4).
    pub fn lag_range(&self, sample_rate_hz: f64) -> Option<(usize, usize)> {
        let mut lo = (sample_rate_hz / self.f4_hz).floor().max(1.0) as usize;
        while sample_rate_hz / (lo as f64) >= self.f4_hz {
            lo += 1;
        }
        let mut hi = (sample_rate_hz / self.f1_hz).ceil() as usize;
        while hi >= 1 && sample_rate_hz / (hi as f64) <= self.f1_hz {
            hi -= 1;
        }
        (hi >= lo && hi >= 1).then_some((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub lpc_order: usize,
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
    pub trapezoid: TrapezoidSpec,
    pub voiced_threshold: f64,
    pub borderline_threshold: f64,
    /// Number of preceding voiced frames that admit a borderline peak.
    pub history_len: usize,
    /// A peak near `lag / k` replaces the arg-max lag when it reaches this
    /// fraction of the maximum. Values above 1 disable the check.
    pub subharmonic_ratio: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            frame_ms: 16.0,
            hop_ms: 8.0,
            lpc_order: 4,
            f0_min_hz: 200.0,
            f0_max_hz: 2500.0,
            trapezoid: TrapezoidSpec::default(),
            voiced_threshold: 0.4,
            borderline_threshold: 0.3,
            history_len: 2,
            subharmonic_ratio: 0.7,
        }
    }
}

impl TrackerConfig {
    pub fn frame_len_samples(&self, sample_rate_hz: f64) -> usize {
        dsp::ms_to_samples(self.frame_ms, sample_rate_hz)
    }

    pub fn hop_samples(&self, sample_rate_hz: f64) -> usize {
        dsp::ms_to_samples(self.hop_ms, sample_rate_hz)
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(5.0..=25.0).contains(&self.frame_ms) {
            return bad(format!(
                "frame_ms must lie in [5, 25], got {}",
                self.frame_ms
            ));
        }
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.frame_ms) {
            return bad(format!(
                "hop_ms must lie in (0, frame_ms], got {}",
                self.hop_ms
            ));
        }
        if self.lpc_order == 0 {
            return bad("lpc_order must be at least 1".into());
        }
        if !(self.borderline_threshold > 0.0
            && self.borderline_threshold < self.voiced_threshold
            && self.voiced_threshold < 1.0)
        {
            return bad(format!(
                "thresholds must satisfy 0 < borderline < voiced < 1, got {} / {}",
                self.borderline_threshold, self.voiced_threshold
            ));
        }
        if !(self.f0_min_hz > 0.0
            && self.f0_min_hz < self.f0_max_hz
            && self.f0_max_hz < sample_rate_hz / 2.0)
        {
            return bad(format!(
                "F0 range must satisfy 0 < min < max < {}, got [{}, {}]",
                sample_rate_hz / 2.0,
                self.f0_min_hz,
                self.f0_max_hz
            ));
        }
        if !(self.subharmonic_ratio > 0.0) {
            return bad(format!(
                "subharmonic_ratio must be positive, got {}",
                self.subharmonic_ratio
            ));
        }
        self.trapezoid.validate()?;
        let frame_len = self.frame_len_samples(sample_rate_hz);
        if frame_len <= self.lpc_order + 1 {
            return bad(format!(
                "{frame_len}-sample frames are too short for order {}",
                self.lpc_order
            ));
        }
        match self.trapezoid.lag_range(sample_rate_hz) {
            Some((lo, _)) if lo < frame_len => Ok(()),
            _ => bad("trapezoid admits no lag shorter than the frame".into()),
        }
    }
}

/// Pitch proposal from one frame: `f0_hz == sample_rate / lag_samples`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchCandidate {
    pub lag_samples: usize,
    pub f0_hz: f64,
    pub peak_value: f64,
}

impl PitchCandidate {
    pub fn from_lag(lag_samples: usize, peak_value: f64, sample_rate_hz: f64) -> Self {
        Self {
            lag_samples,
            f0_hz: sample_rate_hz / lag_samples as f64,
            peak_value,
        }
    }
}

/// Candidate for one frame. `candidate` is `None` for silent frames, which
/// are never voiced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCandidate {
    pub frame_index: usize,
    pub time_s: f64,
    pub candidate: Option<PitchCandidate>,
}

/// Multiplies each lag by the trapezoid weight of its frequency `Fs / lag`.
/// Lag 0 gets weight 0.
pub fn trapezoid_weight(
    autocorr: &AutocorrSeq,
    sample_rate_hz: f64,
    spec: &TrapezoidSpec,
) -> AutocorrSeq {
    let values = autocorr
        .values
        .iter()
        .enumerate()
        .map(|(lag, &r)| {
            if lag == 0 {
                0.0
            } else {
                r * spec.weight(sample_rate_hz / lag as f64)
            }
        })
        .collect();
    AutocorrSeq::from_values(values)
}

/// Arg-max over the admissible lags. Ties go to the smaller lag; a band with
/// no positive value yields its smallest lag with peak 0.
pub fn pick_candidate(
    weighted: &AutocorrSeq,
    sample_rate_hz: f64,
    spec: &TrapezoidSpec,
) -> Result<PitchCandidate> {
    let (lo, hi) = spec
        .lag_range(sample_rate_hz)
        .ok_or(Error::EmptySearchBand)?;
    let hi = hi.min(weighted.max_lag());
    if lo > hi {
        return Err(Error::EmptySearchBand);
    }
    let mut best = (lo, 0.0);
    for lag in lo..=hi {
        if weighted.values[lag] > best.1 {
            best = (lag, weighted.values[lag]);
        }
    }
    Ok(PitchCandidate::from_lag(best.0, best.1, sample_rate_hz))
}

/// Replaces an arg-max lag `L` by the shortest lag near `L / k` (k >= 2)
/// whose weighted value reaches `ratio` times the arg-max value. Non-integer
/// periods spread the autocorrelation over two neighbouring lags while a
/// multiple of the period can land on an exact integer lag. The returned
/// candidate keeps the arg-max value as its peak.
pub fn refine_subharmonic(
    weighted: &AutocorrSeq,
    candidate: PitchCandidate,
    sample_rate_hz: f64,
    spec: &TrapezoidSpec,
    ratio: f64,
) -> PitchCandidate {
    if !(candidate.peak_value > 0.0) || ratio > 1.0 {
        return candidate;
    }
    let Some((lo, hi)) = spec.lag_range(sample_rate_hz) else {
        return candidate;
    };
    let hi = hi.min(weighted.max_lag());
    let threshold = ratio * candidate.peak_value;
    let lag = candidate.lag_samples;
    for k in (2..=lag / lo).rev() {
        let center = (lag as f64 / k as f64).round() as usize;
        let mut best: Option<(usize, f64)> = None;
        for l in center.saturating_sub(1).max(lo)..=(center + 1).min(hi) {
            if best.is_none_or(|(_, v)| weighted.values[l] > v) {
                best = Some((l, weighted.values[l]));
            }
        }
        if let Some((l, v)) = best {
            if v >= threshold {
                return PitchCandidate::from_lag(l, candidate.peak_value, sample_rate_hz);
            }
        }
    }
    candidate
}

/// Whitening model for one windowed frame. Falls back to the identity filter
/// when the recursion is unstable.
pub fn frame_lpc(frame: &[f64], order: usize) -> Result<LpcModel> {
    let r = dsp::normalized_autocorrelation(frame, order)?;
    match dsp::levinson_durbin(&r, order) {
        Ok(model) => Ok(model),
        Err(Error::Unstable { .. }) => Ok(LpcModel::identity(order)),
        Err(e) => Err(e),
    }
}

/// Candidate for one windowed frame, or `None` if the frame is silent.
pub fn analyze_frame(
    frame: &[f64],
    sample_rate_hz: f64,
    config: &TrackerConfig,
) -> Result<Option<PitchCandidate>> {
    if frame.is_empty() || dsp::energy(frame) / (frame.len() as f64) < SILENCE_MEAN_SQUARE {
        return Ok(None);
    }
    let model = frame_lpc(frame, config.lpc_order)?;
    let residual = dsp::inverse_filter(frame, &model)?;
    let (_, hi) = config
        .trapezoid
        .lag_range(sample_rate_hz)
        .ok_or(Error::EmptySearchBand)?;
    let max_lag = hi.min(frame.len() - 1);
    let r = match dsp::normalized_autocorrelation(&residual, max_lag) {
        Ok(r) => r,
        Err(Error::DegenerateInput(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let weighted = trapezoid_weight(&r, sample_rate_hz, &config.trapezoid);
    let candidate = pick_candidate(&weighted, sample_rate_hz, &config.trapezoid)?;
    Ok(Some(refine_subharmonic(
        &weighted,
        candidate,
        sample_rate_hz,
        &config.trapezoid,
        config.subharmonic_ratio,
    )))
}

/// Runs framing and per-frame candidate extraction over the whole signal.
pub fn frame_candidates(
    audio: &AudioBuffer,
    config: &TrackerConfig,
) -> Result<Vec<FrameCandidate>> {
    let fs = audio.sample_rate_hz();
    config.validate(fs)?;
    let frames = dsp::frame_signal(
        audio,
        config.frame_len_samples(fs),
        config.hop_samples(fs),
        WindowKind::Hamming,
    )?;
    frames
        .iter()
        .map(|frame| {
            Ok(FrameCandidate {
                frame_index: frame.frame_index,
                time_s: frame.center_time_s(fs),
                candidate: analyze_frame(&frame.samples, fs, config)?,
            })
        })
        .collect()
}

/// Causal threshold rule: voiced above `voiced_threshold`, or in the
/// borderline band when the previous `history_len` frames were voiced.
pub fn causal_voicing(peaks: &[Option<f64>], config: &TrackerConfig) -> Vec<bool> {
    let mut labels: Vec<bool> = Vec::with_capacity(peaks.len());
    for (i, peak) in peaks.iter().enumerate() {
        let voiced = match *peak {
            None => false,
            Some(p) if p > config.voiced_threshold => true,
            Some(p) if p >= config.borderline_threshold => {
                i >= config.history_len && labels[i - config.history_len..i].iter().all(|&v| v)
            }
            Some(_) => false,
        };
        labels.push(voiced);
    }
    labels
}

/// Marks voiced every eligible frame whose immediate predecessor and
/// successor are voiced in `labels`.
pub fn neighbour_repair(labels: &[bool], eligible: &[bool]) -> Vec<bool> {
    (0..labels.len())
        .map(|i| {
            labels[i]
                || (eligible[i] && i > 0 && i + 1 < labels.len() && labels[i - 1] && labels[i + 1])
        })
        .collect()
}

/// Turns per-frame candidates into a raw contour using the two voicing passes.
pub fn voicing_pass(candidates: &[FrameCandidate], config: &TrackerConfig) -> Contour {
    let peaks: Vec<Option<f64>> = candidates
        .iter()
        .map(|c| c.candidate.map(|p| p.peak_value))
        .collect();
    let eligible: Vec<bool> = peaks.iter().map(Option::is_some).collect();
    let labels = neighbour_repair(&causal_voicing(&peaks, config), &eligible);
    Contour::new(
        candidates
            .iter()
            .zip(labels)
            .map(|(c, voiced)| match c.candidate {
                Some(p) if voiced => ContourFrame {
                    frame_index: c.frame_index,
                    time_s: c.time_s,
                    f0_hz: p.f0_hz,
                    peak_value: p.peak_value,
                    voiced: true,
                    corrected: false,
                },
                Some(p) => ContourFrame::unvoiced(c.frame_index, c.time_s, p.peak_value),
                None => ContourFrame::unvoiced(c.frame_index, c.time_s, 0.0),
            })
            .collect(),
    )
}

/// Full raw-contour pipeline. Audio shorter than one frame gives an empty contour.
pub fn track_contour(audio: &AudioBuffer, config: &TrackerConfig) -> Result<Contour> {
    let candidates = frame_candidates(audio, config)?;
    Ok(voicing_pass(&candidates, config))
}

/// Cepstral pitch baseline: the largest real-cepstrum value with quefrency in
/// `[1/f0_max, 1/f0_min]`. The peak value is scaled by `|c[0]|`.
pub fn cepstral_pitch(
    frame: &[f64],
    sample_rate_hz: f64,
    f0_min_hz: f64,
    f0_max_hz: f64,
) -> Result<PitchCandidate> {
    if !(f0_min_hz > 0.0 && f0_min_hz < f0_max_hz) {
        return Err(Error::InvalidArgument(format!(
            "invalid F0 range [{f0_min_hz}, {f0_max_hz}]"
        )));
    }
    let fft_size = (2 * frame.len()).next_power_of_two();
    let cep = dsp::real_cepstrum(frame, fft_size)?;
    let lo = (sample_rate_hz / f0_max_hz).ceil().max(1.0) as usize;
    let hi = ((sample_rate_hz / f0_min_hz).floor() as usize).min(fft_size / 2);
    if lo > hi {
        return Err(Error::EmptySearchBand);
    }
    let (lag, value) =
        (lo..=hi)
            .map(|q| (q, cep.values[q]))
            .fold((lo, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    let c0 = cep.values[0].abs();
    let peak_value = if c0 > 0.0 { value / c0 } else { value };
    Ok(PitchCandidate::from_lag(lag, peak_value, sample_rate_hz))
}
