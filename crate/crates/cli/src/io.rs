//! File formats and deterministic JSON output.
//!
//! States and channels travel as one JSON shape:
//!
//! ```json
//! {"kind": "density", "dim": 2, "data": [[re, im], ...]}
//! ```
//!
//! `data` is row-major: `dim²` entries for a density matrix, `dim` for a
//! pure state, and `r·dim²` for a channel of `r` stacked Kraus operators.
//! All JSON this crate emits goes through a serializer that prints every
//! float with a fixed 18-significant-digit exponent format, so equal values
//! always serialize to equal bytes and every value round-trips exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use uhlmann_core::{
    tol, validate_density, C64, ComplexMatrix, DensityMatrix, Error as CoreError, KrausChannel,
    PureState,
};

/// Everything that can end a command with a usage-style failure (exit 2).
#[derive(Debug, Error)]
pub enum CliError {
    /// File could not be read or written.
    #[error("{path}: {source}")]
    Io {
        /// Offending path.
        path: String,
        /// Underlying I/O error.
        #[source]
        source: std::io::Error,
    },
    /// File held malformed JSON.
    #[error("{path}: invalid JSON: {detail}")]
    Parse {
        /// Offending path.
        path: String,
        /// Parser diagnostic.
        detail: String,
    },
    /// File parsed but its shape disagrees with its declaration.
    #[error("{path}: {detail}")]
    Schema {
        /// Offending path.
        path: String,
        /// What disagreed.
        detail: String,
    },
    /// File contents failed numerical validation.
    #[error("{path}: {source}")]
    Content {
        /// Offending path.
        path: String,
        /// Validation failure.
        #[source]
        source: CoreError,
    },
    /// A computation on valid inputs was rejected.
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// On-disk shape shared by states and channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilePayload {
    /// `"density"`, `"pure"`, or `"channel"`.
    pub kind: String,
    /// System dimension.
    pub dim: usize,
    /// Row-major complex entries as `[re, im]` pairs.
    pub data: Vec<[f64; 2]>,
}

fn read_payload(path: &Path) -> Result<FilePayload, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

fn schema_error(path: &Path, detail: impl Into<String>) -> CliError {
    CliError::Schema { path: path.display().to_string(), detail: detail.into() }
}

fn content_error(path: &Path) -> impl FnOnce(CoreError) -> CliError + '_ {
    move |source| CliError::Content { path: path.display().to_string(), source }
}

fn check_kind(payload: &FilePayload, expected: &str, path: &Path) -> Result<(), CliError> {
    if payload.kind != expected {
        return Err(schema_error(
            path,
            format!("kind is `{}`, expected `{expected}`", payload.kind),
        ));
    }
    if payload.dim == 0 {
        return Err(schema_error(path, "dim must be positive"));
    }
    Ok(())
}

fn entries(payload: &FilePayload) -> Vec<C64> {
    payload.data.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

/// Load and validate a density-matrix file.
pub fn load_density(path: &Path) -> Result<DensityMatrix, CliError> {
    let payload = read_payload(path)?;
    check_kind(&payload, "density", path)?;
    let d = payload.dim;
    if payload.data.len() != d * d {
        return Err(schema_error(
            path,
            format!("density needs {} entries, found {}", d * d, payload.data.len()),
        ));
    }
    let matrix = ComplexMatrix::from_row_major(d, d, entries(&payload))
        .map_err(content_error(path))?;
    validate_density(&matrix, tol::DENSITY_VALIDATION).map_err(content_error(path))
}

/// Load and validate a pure-state file.
pub fn load_pure(path: &Path) -> Result<PureState, CliError> {
    let payload = read_payload(path)?;
    check_kind(&payload, "pure", path)?;
    if payload.data.len() != payload.dim {
        return Err(schema_error(
            path,
            format!("pure state needs {} entries, found {}", payload.dim, payload.data.len()),
        ));
    }
    PureState::new(entries(&payload)).map_err(content_error(path))
}

/// Load and validate a channel file (`r` stacked Kraus operators).
pub fn load_channel(path: &Path) -> Result<KrausChannel, CliError> {
    let payload = read_payload(path)?;
    check_kind(&payload, "channel", path)?;
    let d = payload.dim;
    let block = d * d;
    if payload.data.is_empty() || payload.data.len() % block != 0 {
        return Err(schema_error(
            path,
            format!(
                "channel data length {} is not a positive multiple of dim² = {block}",
                payload.data.len()
            ),
        ));
    }
    let all = entries(&payload);
    let kraus: Result<Vec<ComplexMatrix>, CoreError> = all
        .chunks(block)
        .map(|chunk| ComplexMatrix::from_row_major(d, d, chunk.to_vec()))
        .collect();
    KrausChannel::new(kraus.map_err(content_error(path))?).map_err(content_error(path))
}

fn complex_rows(data: &[C64]) -> Vec<[f64; 2]> {
    data.iter().map(|z| [z.re, z.im]).collect()
}

/// Payload for a density matrix.
pub fn density_payload(state: &DensityMatrix) -> FilePayload {
    FilePayload {
        kind: "density".to_string(),
        dim: state.dim(),
        data: complex_rows(state.matrix().data()),
    }
}

/// Payload for a pure state.
pub fn pure_payload(state: &PureState) -> FilePayload {
    FilePayload {
        kind: "pure".to_string(),
        dim: state.dim(),
        data: complex_rows(state.amplitudes()),
    }
}

/// Payload for a channel: Kraus operators stacked in order.
pub fn channel_payload(channel: &KrausChannel) -> FilePayload {
    let mut data = Vec::new();
    for k in channel.kraus() {
        data.extend(complex_rows(k.data()));
    }
    FilePayload { kind: "channel".to_string(), dim: channel.dim(), data }
}

/// Payload presenting one unitary as a single-Kraus channel.
pub fn unitary_payload(u: &ComplexMatrix) -> FilePayload {
    FilePayload {
        kind: "channel".to_string(),
        dim: u.rows(),
        data: complex_rows(u.data()),
    }
}

/// JSON formatter that prints every float as `{:.17e}`: 18 significant
/// digits, enough to reproduce any `f64` bit pattern exactly, and a fixed
/// width so equal numbers are equal bytes.
struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.17e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.8e}")
    }
}

/// Serialize any value to deterministic JSON (no trailing newline).
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

/// Write a payload to a file as deterministic JSON with a trailing newline.
pub fn save_payload(path: &Path, payload: &FilePayload) -> Result<(), CliError> {
    let mut text = to_json(payload);
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
