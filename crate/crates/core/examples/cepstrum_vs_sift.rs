//! Cepstral pitch against the inverse-filtered autocorrelation tracker on a
//! phonated and a hyperphonated frame. At high F0 only a few harmonics fit
//! below Nyquist and the cepstral peak stops marking the period.

use crysift::dsp::{self, WindowKind};
use crysift::synthesis::{synth_cry, CrySpec};
use crysift::tracker::{analyze_frame, cepstral_pitch};
use crysift::TrackerConfig;

pub fn main() {
    let fs = 16000.0;
    let tracker = TrackerConfig::default();
    for f0 in [380.0, 1250.0, 2000.0] {
        let (audio, _) = synth_cry(&CrySpec::constant(f0, 0.2, fs, 3)).unwrap();
        let frames = dsp::frame_signal(
            &audio,
            tracker.frame_len_samples(fs),
            tracker.hop_samples(fs),
            WindowKind::Hamming,
        )
        .unwrap();
        let frame = &frames[frames.len() / 2].samples;
        let cep = cepstral_pitch(frame, fs, tracker.f0_min_hz, tracker.f0_max_hz).unwrap();
        let sift = analyze_frame(frame, fs, &tracker).unwrap().unwrap();
        println!(
            "F0 {f0:>6.1} Hz | cepstrum: quefrency {:.3} ms -> {:>7.1} Hz | SIFT: lag {:>3} -> {:>7.1} Hz (peak {:.2})",
            1e3 * cep.lag_samples as f64 / fs,
            cep.f0_hz,
            sift.lag_samples,
            sift.f0_hz,
            sift.peak_value
        );
    }
}
