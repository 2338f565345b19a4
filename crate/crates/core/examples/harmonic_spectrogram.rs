//! Spectrogram of a hyperphonated cry. Harmonics sit 1250 Hz apart; the
//! matrix is written as CSV into the system temp dir for plotting.

use crysift::spectrogram::{spectrogram, DEFAULT_FRAME_MS, DEFAULT_HOP_MS};
use crysift::synthesis::{synth_cry, CrySpec};

pub fn main() {
    let (audio, _) = synth_cry(&CrySpec::constant(1250.0, 0.5, 16000.0, 5)).unwrap();
    let s = spectrogram(&audio, DEFAULT_FRAME_MS, DEFAULT_HOP_MS).unwrap();
    println!(
        "{} bins x {} frames, FFT size {}",
        s.freqs_hz.len(),
        s.times_s.len(),
        s.fft_size
    );

    let column = s.column(s.times_s.len() / 2);
    let top = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let peaks: Vec<f64> = (1..column.len() - 1)
        .filter(|&k| {
            column[k] > column[k - 1] && column[k] >= column[k + 1] && column[k] > top - 30.0
        })
        .map(|k| s.freqs_hz[k])
        .collect();
    let spacing: Vec<f64> = peaks.windows(2).map(|p| p[1] - p[0]).collect();
    println!("harmonic peaks (Hz): {peaks:?}");
    println!("spacing (Hz):        {spacing:?}");

    let path = std::env::temp_dir().join("crysift_spectrogram.csv");
    s.write_csv(std::io::BufWriter::new(
        std::fs::File::create(&path).unwrap(),
    ))
    .unwrap();
    println!("wrote {}", path.display());
}
