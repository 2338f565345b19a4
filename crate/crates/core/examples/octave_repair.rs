//! Median smoothing and octave-error correction on a contour where a tenth
//! of the frames jumped to twice the true F0 and a short run dropped to half.

use crysift::contour::{Contour, ContourFrame};
use crysift::smoothing::{dominant_f0, smooth_contour};
use crysift::SmoothingConfig;

pub fn main() {
    let f0 = 480.0;
    let mut values = vec![f0; 60];
    for i in (3..60).step_by(10) {
        values[i] = 2.0 * f0;
    }
    for v in &mut values[30..34] {
        *v = f0 / 2.0;
    }
    let raw = Contour::new(
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| ContourFrame {
                frame_index: i,
                time_s: 0.008 * (i + 1) as f64,
                f0_hz: v,
                peak_value: 0.7,
                voiced: true,
                corrected: false,
            })
            .collect(),
    );
    let smoothed = smooth_contour(&raw, &SmoothingConfig::default()).unwrap();
    println!("dominant F0 {:.1} Hz", dominant_f0(&raw).unwrap());
    for (r, s) in raw.iter().zip(&smoothed) {
        if r.f0_hz != s.f0_hz {
            let how = if s.corrected {
                "harmonic correction"
            } else {
                "median"
            };
            println!(
                "frame {:>2}: {:>6.1} -> {:>6.1} Hz ({how})",
                r.frame_index, r.f0_hz, s.f0_hz
            );
        }
    }
    let within = smoothed
        .iter()
        .filter(|f| (f.f0_hz - f0).abs() <= 0.02 * f0)
        .count();
    println!("{within}/{} frames within 2% of {f0} Hz", smoothed.len());
}
