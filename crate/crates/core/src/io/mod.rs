//! File formats: WAV audio, contour and reference CSV/JSON, and analysis
//! configuration files.

pub mod config;
pub mod records;
pub mod wav;

pub use config::{load_analysis_config, parse_analysis_config};
pub use records::{
    read_contour, read_contour_from, read_reference, records_to_contour, write_contour,
    write_contour_to, write_reference, ContourFormat, ContourRecord,
};
pub use wav::{read_audio, write_audio, WavEncoding};
