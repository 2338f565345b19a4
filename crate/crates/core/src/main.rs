use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crysift::dsp::{self, CepstrumSeq, WindowKind};
use crysift::io::{self, ContourFormat};
use crysift::synthesis::{synth_cry, CrySpec};
use crysift::{analyze, build_report, spectrogram, Error, SmoothingConfig, TrackerConfig};

#[derive(Parser)]
#[command(name = "crysift", version, about = "F0 tracking for infant cries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track F0 in a WAV file and write the contour.
    Track {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to the output extension, or CSV.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Flat key = value analysis configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the raw contour in both F0 columns.
        #[arg(long)]
        no_smooth: bool,
        #[arg(long)]
        frame_ms: Option<f64>,
        #[arg(long)]
        hop_ms: Option<f64>,
        #[arg(long)]
        lpc_order: Option<usize>,
    },
    /// Compare an estimated contour with a reference and print the error report.
    Eval {
        #[arg(long)]
        est: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Score the raw F0 column instead of the smoothed one.
        #[arg(long)]
        raw: bool,
    },
    /// Render a synthetic cry and its ground-truth contour.
    Synth {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Framing of the ground-truth contour.
        #[arg(long, default_value_t = 16.0)]
        frame_ms: f64,
        #[arg(long, default_value_t = 8.0)]
        hop_ms: f64,
    },
    /// Write a dB spectrogram matrix as CSV.
    Spectrogram {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = spectrogram::DEFAULT_FRAME_MS)]
        frame_ms: f64,
        #[arg(long, default_value_t = spectrogram::DEFAULT_HOP_MS)]
        hop_ms: f64,
    },
    /// Write the real cepstrum of one analysis frame as CSV.
    Cepstrum {
        input: PathBuf,
        #[arg(long)]
        frame_index: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 16.0)]
        frame_ms: f64,
        #[arg(long, default_value_t = 8.0)]
        hop_ms: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

struct Failure {
    code: u8,
    error: Error,
}

const USAGE: u8 = 2;
const INPUT_FORMAT: u8 = 3;
const EVALUATION: u8 = 4;

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::InvalidArgument(_) => USAGE,
            Error::MalformedWav(_)
            | Error::UnsupportedFormat(_)
            | Error::EmptyAudio
            | Error::Parse(_) => INPUT_FORMAT,
            Error::EmptyEvaluation | Error::NoDominant => EVALUATION,
            _ => 1,
        };
        Self { code, error }
    }
}

fn evaluation_failure(error: Error) -> Failure {
    match error {
        Error::Io(_) | Error::Parse(_) => error.into(),
        error => Failure {
            code: EVALUATION,
            error,
        },
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(Error::from)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Track {
            input,
            out,
            format,
            config,
            no_smooth,
            frame_ms,
            hop_ms,
            lpc_order,
        } => {
            let (mut tracker, smoothing) = match config {
                Some(path) => io::load_analysis_config(path)?,
                None => (TrackerConfig::default(), SmoothingConfig::default()),
            };
            tracker.frame_ms = frame_ms.unwrap_or(tracker.frame_ms);
            tracker.hop_ms = hop_ms.unwrap_or(tracker.hop_ms);
            tracker.lpc_order = lpc_order.unwrap_or(tracker.lpc_order);
            smoothing.validate()?;
            let audio = io::read_audio(&input)?;
            let analysis = analyze(&audio, &tracker, &smoothing)?;
            let records = if no_smooth {
                io::ContourRecord::from_contours(&analysis.raw, &analysis.raw)?
            } else {
                analysis.records()
            };
            let format = match (format, &out) {
                (Some(FormatArg::Csv), _) | (None, None) => ContourFormat::Csv,
                (Some(FormatArg::Json), _) => ContourFormat::Json,
                (None, Some(p)) => ContourFormat::from_path(p),
            };
            io::write_contour_to(&records, output(out.as_deref())?, format)?;
        }
        Command::Eval {
            est,
            reference,
            out,
            raw,
        } => {
            let records = io::read_contour(&est)?;
            let estimated = io::records_to_contour(&records, !raw);
            let reference = io::read_reference(&reference)?;
            let report = build_report(&estimated, &reference).map_err(evaluation_failure)?;
            let mut w = output(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Error::Io(e.into()))?;
            writeln!(w).and_then(|_| w.flush()).map_err(Error::from)?;
        }
        Command::Synth {
            spec,
            out,
            truth,
            frame_ms,
            hop_ms,
        } => {
            let text = std::fs::read_to_string(&spec).map_err(Error::from)?;
            let spec = CrySpec::from_toml(&text)?;
            let (audio, ground_truth) = synth_cry(&spec)?;
            io::write_audio(&audio, &out, io::WavEncoding::Pcm16)?;
            if let Some(path) = truth {
                let fs = audio.sample_rate_hz();
                let (frame_len, hop) = (
                    dsp::ms_to_samples(frame_ms, fs),
                    dsp::ms_to_samples(hop_ms, fs),
                );
                if frame_len == 0 || hop == 0 {
                    return Err(Error::InvalidArgument(
                        "frame and hop must cover at least one sample".into(),
                    )
                    .into());
                }
                io::write_reference(&ground_truth.reference_contour(frame_len, hop), path)?;
            }
        }
        Command::Spectrogram {
            input,
            out,
            frame_ms,
            hop_ms,
        } => {
            let audio = io::read_audio(&input)?;
            let matrix = spectrogram::spectrogram(&audio, frame_ms, hop_ms)?;
            matrix.write_csv(output(out.as_deref())?)?;
        }
        Command::Cepstrum {
            input,
            frame_index,
            out,
            frame_ms,
            hop_ms,
        } => {
            let audio = io::read_audio(&input)?;
            let fs = audio.sample_rate_hz();
            let frames = dsp::frame_signal(
                &audio,
                dsp::ms_to_samples(frame_ms, fs),
                dsp::ms_to_samples(hop_ms, fs),
                WindowKind::Hamming,
            )?;
            let frame = frames.get(frame_index).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "frame index {frame_index} out of range ({} frames)",
                    frames.len()
                ))
            })?;
            let fft_size = (2 * frame.samples.len()).next_power_of_two();
            let cep = dsp::real_cepstrum(&frame.samples, fft_size)?;
            let mut w = output(out.as_deref())?;
            let write = |w: &mut dyn Write| -> std::io::Result<()> {
                writeln!(w, "quefrency_s,value")?;
                for (i, v) in cep.values.iter().enumerate().take(fft_size / 2 + 1) {
                    writeln!(w, "{},{v}", CepstrumSeq::quefrency_s(i, fs))?;
                }
                w.flush()
            };
            write(&mut w).map_err(Error::from)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("crysift: {error}");
            ExitCode::from(code)
        }
    }
}
