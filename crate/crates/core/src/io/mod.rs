//! File formats: instance documents, timetable/sample/fit/event tables.

mod instance_file;
mod tables;

pub use instance_file::{read_instance, write_instance};
pub use tables::{
    read_events, read_fits, read_samples, read_timetable, write_events, write_fits, write_samples,
    write_timetable, CROSSOVER_SAMPLES_FILE, REGEN_SAMPLES_FILE, TRACK_SAMPLES_FILE,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("toml parse error: {0}")]
    TomlDe(#[from] toml::de::Error),
    #[error("toml write error: {0}")]
    TomlSer(#[from] toml::ser::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unsupported schema_version {0} (expected 1)")]
    SchemaVersion(i64),
    #[error("unknown {kind} id {id:?}")]
    UnknownId { kind: &'static str, id: String },
    #[error("malformed {kind}: {msg}")]
    Malformed { kind: &'static str, msg: String },
}
