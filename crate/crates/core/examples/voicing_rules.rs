//! The voicing decision on hand-made peak sequences: a strong peak, a
//! borderline peak with and without voiced history, a weak peak between
//! voiced neighbours, and a silent frame.

use crysift::tracker::{voicing_pass, FrameCandidate, PitchCandidate};
use crysift::TrackerConfig;

fn show(label: &str, peaks: &[Option<f64>]) {
    let candidates: Vec<FrameCandidate> = peaks
        .iter()
        .enumerate()
        .map(|(i, p)| FrameCandidate {
            frame_index: i,
            time_s: 0.008 * (i + 1) as f64,
            candidate: p.map(|v| PitchCandidate::from_lag(40, v, 16000.0)),
        })
        .collect();
    let contour = voicing_pass(&candidates, &TrackerConfig::default());
    let marks: String = contour
        .iter()
        .map(|f| if f.voiced { 'V' } else { '.' })
        .collect();
    let shown: Vec<String> = peaks
        .iter()
        .map(|p| p.map_or("silent".into(), |v| format!("{v:.2}")))
        .collect();
    println!("{label:<28} [{}] -> {marks}", shown.join(", "));
}

pub fn main() {
    show("strong peak", &[Some(0.1), Some(0.45), Some(0.1)]);
    show(
        "borderline after history",
        &[Some(0.5), Some(0.5), Some(0.35)],
    );
    show(
        "borderline without history",
        &[Some(0.1), Some(0.5), Some(0.35)],
    );
    show(
        "weak between voiced",
        &[Some(0.5), Some(0.5), Some(0.2), Some(0.5)],
    );
    show(
        "weak at the end of a run",
        &[Some(0.5), Some(0.5), Some(0.2), Some(0.1)],
    );
    show("silence is never voiced", &[Some(0.5), None, Some(0.5)]);
}
