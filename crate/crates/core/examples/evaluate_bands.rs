//! Per-class error table over random constant-F0 cries in the phonated and
//! hyperphonated bands, next to the target rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crysift::evaluation::{contour_error_pct, ErrorReport};
use crysift::synthesis::{synth_cry, CrySpec};
use crysift::{analyze, SmoothingConfig, TrackerConfig};

fn band(rng: &mut ChaCha8Rng, lo: f64, hi: f64, cries: u64) -> (f64, f64) {
    let tracker = TrackerConfig::default();
    let (mut smoothed, mut raw, mut frames) = (0.0, 0.0, 0.0);
    for seed in 0..cries {
        let f0 = rng.random_range(lo..=hi);
        let (audio, truth) = synth_cry(&CrySpec::constant(f0, 0.5, 16000.0, seed)).unwrap();
        let a = analyze(&audio, &tracker, &SmoothingConfig::default()).unwrap();
        let reference = truth.reference_for(&tracker);
        let s = contour_error_pct(&a.smoothed, &reference, None).unwrap();
        let r = contour_error_pct(&a.raw, &reference, None).unwrap();
        smoothed += s.error_pct * s.frames as f64;
        raw += r.error_pct * r.frames as f64;
        frames += s.frames as f64;
    }
    (raw / frames, smoothed / frames)
}

pub fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let targets = ErrorReport::reference_targets();
    println!(
        "{:<14} {:>8} {:>10} {:>10}",
        "class", "raw %", "smoothed %", "reference %"
    );
    for (name, lo, hi, target) in [
        ("phonated", 250.0, 700.0, targets.phonated_error_pct),
        (
            "hyperphonated",
            700.0,
            2000.0,
            targets.hyperphonated_error_pct,
        ),
    ] {
        let (raw, smoothed) = band(&mut rng, lo, hi, 12);
        println!(
            "{name:<14} {raw:>8.2} {smoothed:>10.2} {:>10.2}",
            target.unwrap()
        );
    }
}
