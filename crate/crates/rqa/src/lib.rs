//! File formats, corruption runs, scoring, evaluation and reports on top of
//! `rqa-core`. The `rqa` binary wraps these as subcommands.

pub mod cli;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod imageio;
pub mod manifest;
pub mod measure;
pub mod records;
pub mod report;
pub mod scoring;
pub mod trajectory;

pub use error::{Error, Result};
