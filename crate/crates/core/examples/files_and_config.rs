//! File round trips: a synthesis spec and an analysis config in TOML, the
//! cry as 16-bit WAV, and the tracked contour as CSV and JSON.

use crysift::analyze;
use crysift::io::{self, ContourFormat, WavEncoding};
use crysift::synthesis::{synth_cry, CrySpec};

const SPEC: &str = r#"
sample_rate_hz = 16000
noise_level = 0.01
seed = 21

[[segment]]
duration_s = 0.3
mode = "voiced"
f0_start_hz = 380
f0_end_hz = 450

[[segment]]
duration_s = 0.1
mode = "unvoiced"
"#;

const CONFIG: &str = r#"
hop_ms = 8
lpc_order = 4
voiced_threshold = 0.4
median_order = 4
"#;

pub fn main() {
    let dir = std::env::temp_dir().join("crysift_files_example");
    std::fs::create_dir_all(&dir).unwrap();

    let (audio, truth) = synth_cry(&CrySpec::from_toml(SPEC).unwrap()).unwrap();
    let wav = dir.join("cry.wav");
    io::write_audio(&audio, &wav, WavEncoding::Pcm16).unwrap();
    let loaded = io::read_audio(&wav).unwrap();
    let max_diff = audio
        .samples()
        .iter()
        .zip(loaded.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "WAV round trip: {} samples, max quantization error {max_diff:.2e}",
        loaded.len()
    );

    let (tracker, smoothing) = io::parse_analysis_config(CONFIG).unwrap();
    let records = analyze(&loaded, &tracker, &smoothing).unwrap().records();
    for (name, format) in [
        ("contour.csv", ContourFormat::Csv),
        ("contour.json", ContourFormat::Json),
    ] {
        let path = dir.join(name);
        io::write_contour(&records, &path, format).unwrap();
        let back = io::read_contour(&path).unwrap();
        println!(
            "{name}: {} records, first voiced {:?}",
            back.len(),
            back.iter().find(|r| r.voiced)
        );
    }
    io::write_reference(&truth.reference_for(&tracker), dir.join("truth.csv")).unwrap();
    println!("files in {}", dir.display());
}
