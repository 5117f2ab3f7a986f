//! File formats, parallel evaluation and the command-line front end for
//! [`mnl_match_core`].

pub mod bench;
pub mod cli;
pub mod io;
pub mod parallel;

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] mnl_match_core::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
