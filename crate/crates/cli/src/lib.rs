//! Experiment harness: configuration, multi-realization studies, CSV and
//! SVG reporting. The `hgf` binary is a thin wrapper over this crate.

pub mod config;
pub mod experiment;
pub mod report;
pub mod svg;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("unknown filter `{0}`")]
    UnknownFilter(String),
    #[error("report is empty")]
    EmptyReport,
    #[error("malformed report csv: {0}")]
    ReportFormat(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Filter(#[from] hgf_core::filters::FilterError),
    #[error(transparent)]
    Model(#[from] hgf_core::models::ModelError),
    #[error(transparent)]
    Pfaffian(#[from] hgf_core::pfaffian::PfaffianError),
    #[error(transparent)]
    Hgm(#[from] hgf_core::hgm::HgmError),
    #[error(transparent)]
    Oracle(#[from] hgf_core::oracle::OracleError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
