//! # oexnrule
//!
//! Binary classification with an ensemble of extended-neighbourhood-rule
//! learners, plus the kNN and weighted kNN baselines it is compared against.
//!
//! The extended neighbourhood rule (ExNRule) finds `k` neighbours in `k`
//! steps: the first is the training point nearest to the query, each next one
//! is the unvisited point nearest to the previous neighbour. The class is the
//! majority label along that chain.
//!
//! The ensemble ([`ensemble::fit`]) builds many ExNRule learners, each on a
//! bootstrap sample restricted to a random subset of `floor(sqrt(p))`
//! features, ranks them by out-of-bag error and keeps the best quarter.
//! Predictions are a majority vote of the kept learners.
//!
//! ```
//! use oexnrule::data::Dataset;
//! use oexnrule::ensemble::{fit, EnsembleConfig};
//!
//! let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 4) as f64]).collect();
//! let labels = (0..20).map(|i| u8::from(i >= 10)).collect();
//! let train = Dataset::from_rows(&rows, labels).unwrap();
//!
//! let config = EnsembleConfig { n_models: 40, seed: 7, ..Default::default() };
//! let model = fit(&train, &config).unwrap();
//! assert_eq!(model.n_selected(), 10);
//! assert_eq!(model.predict(&[18.5, 1.0]).unwrap(), 1);
//! ```

pub mod data;
pub mod ensemble;
pub mod error;
pub mod metrics;
pub mod model_file;
pub mod neighbors;
pub mod rng;

pub use data::{BootstrapSample, Dataset, LabelColumn, SplitPair};
pub use ensemble::{fit, EnsembleConfig, OExNRuleModel, SubspaceSize};
pub use error::{Error, Result};
pub use metrics::{Metric, MetricRecord};
pub use neighbors::{DistanceSpec, NeighborChain, Vote};
