//! Dataset ingestion, normalization, feature export and the command-line
//! front end for [`sigpipe_core`].

pub mod cli;
pub mod config;
pub mod csv_long;
pub mod dataset;
pub mod error;
pub mod features;
pub mod selftest;
pub mod ts_format;

pub use dataset::{fit_normalizer, LabeledDataset, NormalizationStats, Split};
pub use error::{Error, Result};
pub use features::{FeatureRow, FeatureTable, OutputFormat};
