use loopcut::basis::BasisError;
use loopcut::detach::DetachError;
use loopcut::mesh::MeshError;
use loopcut::metrics::MetricsError;
use loopcut::schema::SchemaError;
use loopcut::synth::SynthError;
use serde::Serialize;
use thiserror::Error;

/// Exit codes. Kept in sync with the `--help` footer.
pub mod code {
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const INPUT: i32 = 4;
    pub const INVARIANT: i32 = 5;
    pub const RESOURCE: i32 = 6;
}

pub const EXIT_CODES_HELP: &str = "\
Exit codes:
  0  success
  2  usage error (unknown flag, bad value)
  3  file could not be read or written
  4  malformed or unsupported input (parse error, non-manifold mesh, bad loop file)
  5  invariant violation or geometric failure (loops not a cut graph, placement failed, ...)
  6  resource cap hit (memory cap, operation limit, vertex cap of the global search)

On failure a single JSON object {\"error\", \"message\", \"exit_code\"} is written to stderr.";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Detach(#[from] DetachError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn mesh_code(e: &MeshError) -> i32 {
    match e {
        MeshError::Io(_) => code::IO,
        _ => code::INPUT,
    }
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Synth(_) => code::USAGE,
            CliError::Io { .. } => code::IO,
            CliError::Input(_) | CliError::Json(_) => code::INPUT,
            CliError::Mesh(e) => mesh_code(e),
            CliError::Basis(e) => match e {
                BasisError::Mesh(m) => mesh_code(m),
                BasisError::VertexCapExceeded { .. } => code::RESOURCE,
                BasisError::RootOutOfRange { .. } | BasisError::Parse { .. } => code::INPUT,
                BasisError::InvalidSystem(_) => code::INVARIANT,
            },
            CliError::Detach(e) => match e {
                DetachError::Mesh(m) => mesh_code(m),
                DetachError::MemoryCap { .. } | DetachError::OperationLimit(_) => code::RESOURCE,
                DetachError::Config(_) => code::USAGE,
                _ => code::INVARIANT,
            },
            CliError::Schema(e) => match e {
                SchemaError::Mesh(m) => mesh_code(m),
                SchemaError::Io(_) => code::IO,
                SchemaError::Format(_) | SchemaError::Json(_) | SchemaError::TriangleOutOfRange(_) => code::INPUT,
                _ => code::INVARIANT,
            },
            CliError::Metrics(e) => match e {
                MetricsError::BadDensity(_) => code::USAGE,
                _ => code::INPUT,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            code::USAGE => "usage",
            code::IO => "io",
            code::INPUT => "input",
            code::INVARIANT => "invariant",
            code::RESOURCE => "resource",
            _ => "internal",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        let out = Out { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&out).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.kind()))
    }
}
