//! Synthesizes a cry with a rising glide, a noisy pause and a falling glide,
//! tracks it, and scores the contour against the exact ground truth.

use crysift::synthesis::{synth_cry, CrySpec, Segment};
use crysift::{analyze, build_report, SmoothingConfig, TrackerConfig};

pub fn main() {
    let spec = CrySpec::new(
        vec![
            Segment::voiced(0.4, 420.0, 560.0),
            Segment::unvoiced(0.1),
            Segment::silence(0.05),
            Segment::voiced(0.3, 640.0, 520.0),
        ],
        16000.0,
        11,
    );
    let (audio, truth) = synth_cry(&spec).expect("valid cry spec");
    let tracker = TrackerConfig::default();
    let analysis = analyze(&audio, &tracker, &SmoothingConfig::default()).expect("tracking");

    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>6}",
        "time", "truth", "raw", "smoothed", "peak"
    );
    let reference = truth.reference_for(&tracker);
    for ((raw, smooth), r) in analysis
        .raw
        .iter()
        .zip(&analysis.smoothed)
        .zip(&reference.frames)
        .step_by(6)
    {
        println!(
            "{:>6.3} {:>9.1} {:>9.1} {:>9.1} {:>6.2}",
            raw.time_s, r.f0_hz, raw.f0_hz, smooth.f0_hz, raw.peak_value
        );
    }

    let report = build_report(&analysis.smoothed, &reference).expect("voiced frames to score");
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
