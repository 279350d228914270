//! Experiment driver behind the `mtsim` binary: configuration, experiments
//! and file output.

pub mod config;
pub mod experiments;
pub mod output;
pub mod verify;

use quasicharge::dynamics::DynamicsError;
use quasicharge::hilbert::HilbertError;
use quasicharge::leakage::LeakageError;
use quasicharge::linalg::LinalgError;
use quasicharge::model::ModelError;

pub use config::RunConfig;
pub use experiments::{run, Outcome};
pub use output::{write_outputs, Cell, CsvTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error{}: {key}: {msg}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        key: String,
        msg: String,
    },
    #[error("physics guard `{guard}`: {msg}")]
    Guard { guard: &'static str, msg: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 2,
            Self::Guard { .. } => 3,
            Self::Numerical(_) | Self::Io(_) => 4,
        }
    }
}

impl From<HilbertError> for CliError {
    fn from(e: HilbertError) -> Self {
        match e {
            HilbertError::BadCutoff(_) => Self::Config {
                line: None,
                key: "cutoff".into(),
                msg: e.to_string(),
            },
            other => Self::Numerical(other.to_string()),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParameter { name, .. } => Self::Config {
                line: None,
                key: name.into(),
                msg: e.to_string(),
            },
            ModelError::TooLarge { .. } => Self::Guard {
                guard: "dimension",
                msg: e.to_string(),
            },
            ModelError::Unsupported(_) => Self::Guard {
                guard: "unsupported",
                msg: e.to_string(),
            },
            ModelError::Hilbert(h) => h.into(),
            ModelError::Linalg(l) => l.into(),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Model(m) => m.into(),
            DynamicsError::Hilbert(h) => h.into(),
            DynamicsError::Unsupported(_) => Self::Guard {
                guard: "unsupported",
                msg: e.to_string(),
            },
            other => Self::Numerical(other.to_string()),
        }
    }
}

impl From<LeakageError> for CliError {
    fn from(e: LeakageError) -> Self {
        match e {
            LeakageError::TrivialPhase { .. } => Self::Guard {
                guard: "trivial-phase",
                msg: e.to_string(),
            },
            LeakageError::Model(m) => m.into(),
            LeakageError::InvalidSpectrum(_) => Self::Config {
                line: None,
                key: "noise".into(),
                msg: e.to_string(),
            },
            other => Self::Numerical(other.to_string()),
        }
    }
}
