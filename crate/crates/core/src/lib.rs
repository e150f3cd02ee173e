//! Training binary MLP classifiers on heart-rate-variability features with
//! cluster-based opposition differential evolution (CODEL) followed by
//! gradient-based local search.
//!
//! The pieces can be used separately:
//!
//! * [`signal`] cleans a raw ECG trace and turns R peaks into RR intervals;
//! * [`hrv`] computes the thirteen HRV features of an RR series;
//! * [`mlp`] holds the network, its objectives and datasets;
//! * [`optimizer`] is the population-based global search, built on [`kmeans`];
//! * [`local_search`] provides six gradient refiners (RP, OSS, GD, GDM, GDA, CG-PR);
//! * [`training`] chains global search and refinement;
//! * [`evaluation`] and [`report`] run cross-validation and build
//!   comparison tables;
//! * [`pipeline`] exposes the file-based commands used by the `codel` binary.
//!
//! ```
//! use codel::optimizer::{run_codel, CodelConfig};
//!
//! let sphere = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
//! let config = CodelConfig { nfe_max: 2_000, seed: 1, ..CodelConfig::default() };
//! let result = run_codel(&sphere, 3, &config).unwrap();
//! assert!(result.best_fitness() < 1.0);
//! ```

pub mod config;
pub mod error;
pub mod evaluation;
pub mod hrv;
pub mod io;
pub mod kmeans;
pub mod local_search;
pub mod mlp;
pub mod optimizer;
pub mod pipeline;
pub mod published;
pub mod report;
pub mod rng;
pub mod signal;
pub mod synthetic;
pub mod training;

pub use error::{Error, Result};
pub use evaluation::{ConfusionMatrix, Metric, MetricReport};
pub use hrv::{extract_features, FeatureRecord};
pub use local_search::{LocalSearchConfig, Method};
pub use mlp::{Dataset, MlpTopology};
pub use optimizer::{run_codel, CodelConfig, CodelResult};
pub use signal::{RrSeries, Signal};
