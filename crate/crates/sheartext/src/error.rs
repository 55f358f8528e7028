use std::path::PathBuf;

/// Failures reading or writing raster files.
#[derive(Debug, thiserror::Error)]
pub enum FrameError {
    #[error("{0}: no such file")]
    Missing(PathBuf),
    #[error("{path}: unsupported image format{}", detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default())]
    Unsupported { path: PathBuf, detail: Option<String> },
    #[error("{path}: cannot decode: {reason}")]
    Decode { path: PathBuf, reason: String },
    #[error("{path}: cannot write: {reason}")]
    Write { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Malformed rectangle list.
#[derive(Debug, thiserror::Error)]
#[error("{path}:{line}: {reason}")]
pub struct RectFileError {
    pub path: PathBuf,
    pub line: usize,
    pub reason: String,
}

/// Bad configuration file or flag value.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {reason}")]
    Syntax {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error(transparent)]
    Invalid(#[from] sheartext_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
