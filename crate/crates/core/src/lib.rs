//! Truncated path signatures and logsignatures of multivariate time series,
//! and the generalised signature feature pipeline built on top of them:
//! augmentations, windows, rescalings and the signature transform, composed
//! in a fixed order.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! dataset handling live in the `sigpipe` crate.
//!
//! ```
//! use sigpipe_core::pipeline::run_pipeline;
//! use sigpipe_core::{PipelineConfig, TimeSeries};
//!
//! let ts = TimeSeries::from_rows(&[[0.0, 1.0], [1.0, 3.0], [2.0, 2.0], [3.0, 0.5]])?;
//! let config = PipelineConfig::canonical(3, 2, false, false);
//! let features = run_pipeline(&config, &ts)?;
//! assert_eq!(features.flat().len(), config.predict_feature_count(2, 4)?);
//! assert_eq!(features.column_names()[0], "a1|w1|sig(1)");
//! # Ok::<(), sigpipe_core::Error>(())
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod augment;
pub mod error;
pub mod lyndon;
pub mod oracle;
pub mod pipeline;
pub mod rescale;
pub mod series;
pub mod signature;
pub mod tensor;
pub mod window;

pub use augment::{AffineSource, AugmentStep, AugmentationSpec};
pub use error::{Error, Result};
pub use lyndon::LyndonBasis;
pub use pipeline::{Extractor, FeatureSet, FeatureShape, Layout, PipelineConfig, Transform};
pub use rescale::RescaleSpec;
pub use series::TimeSeries;
pub use signature::{LogSignatureFeatures, SignatureFeatures};
pub use tensor::TruncatedTensor;
pub use window::WindowSpec;
