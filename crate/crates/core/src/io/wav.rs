use std::io::{Read, Seek};
use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::dsp::AudioBuffer;
use crate::error::{Error, Result};

fn map_hound(e: hound::Error) -> Error {
    match e {
        // hound reports short reads as `Other`.
        hound::Error::IoError(io)
            if matches!(
                io.kind(),
                std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::Other
            ) =>
        {
            Error::MalformedWav(format!("truncated file: {io}"))
        }
        hound::Error::IoError(io) => Error::Io(io),
        hound::Error::FormatError(msg) => Error::MalformedWav(msg.into()),
        hound::Error::UnfinishedSample => Error::MalformedWav("incomplete sample".into()),
        hound::Error::TooWide => Error::UnsupportedFormat("sample width".into()),
        hound::Error::Unsupported => Error::UnsupportedFormat("codec".into()),
        hound::Error::InvalidSampleFormat => Error::UnsupportedFormat("sample format".into()),
    }
}

/// Reads a RIFF/WAVE file into mono audio. Integer PCM is scaled by
/// `2^(bits-1)`, float data is taken as is, and channels are averaged.
pub fn read_audio(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let file = std::fs::File::open(path)?;
    read_audio_from(std::io::BufReader::new(file))
}

pub fn read_audio_from<R: Read>(reader: R) -> Result<AudioBuffer> {
    let reader = WavReader::new(reader).map_err(map_hound)?;
    let spec = reader.spec();
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, bits @ (8 | 16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(map_hound)?
        }
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(map_hound)?,
        (format, bits) => {
            return Err(Error::UnsupportedFormat(format!("{bits}-bit {format:?}")));
        }
    };
    let channels = spec.channels.max(1) as usize;
    if interleaved.len() < channels {
        return Err(Error::EmptyAudio);
    }
    let mono = interleaved
        .chunks_exact(channels)
        .map(|frame| frame.iter().sum::<f64>() / channels as f64)
        .collect();
    AudioBuffer::new(mono, f64::from(spec.sample_rate))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavEncoding {
    #[default]
    Pcm16,
    Float32,
}

/// Writes mono audio. PCM output is clipped to [-1, 1).
pub fn write_audio(
    audio: &AudioBuffer,
    path: impl AsRef<Path>,
    encoding: WavEncoding,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_audio_to(audio, std::io::BufWriter::new(file), encoding)
}

pub fn write_audio_to<W: std::io::Write + Seek>(
    audio: &AudioBuffer,
    writer: W,
    encoding: WavEncoding,
) -> Result<()> {
    let sample_rate = audio.sample_rate_hz().round();
    if !(sample_rate >= 1.0 && sample_rate <= f64::from(u32::MAX)) {
        return Err(Error::InvalidArgument(format!(
            "sample rate {} cannot be stored in a WAV header",
            audio.sample_rate_hz()
        )));
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: sample_rate as u32,
        bits_per_sample: match encoding {
            WavEncoding::Pcm16 => 16,
            WavEncoding::Float32 => 32,
        },
        sample_format: match encoding {
            WavEncoding::Pcm16 => SampleFormat::Int,
            WavEncoding::Float32 => SampleFormat::Float,
        },
    };
    let mut w = WavWriter::new(writer, spec).map_err(map_hound)?;
    for &s in audio.samples() {
        match encoding {
            WavEncoding::Pcm16 => {
                let v = (s * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                w.write_sample(v).map_err(map_hound)?;
            }
            WavEncoding::Float32 => w.write_sample(s as f32).map_err(map_hound)?,
        }
    }
    w.finalize().map_err(map_hound)
}
