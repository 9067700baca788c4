//! Instance selection via outlier detection, filter feature selection and
//! time-series classification, plus the experiment grid that ties them
//! together.

pub mod classifiers;
pub mod dataset;
pub mod feature_selection;
pub mod instance_selection;
pub mod neighbors;
pub mod pipeline;

pub use dataset::{DatasetDescriptor, Split, TimeSeriesDataset};
pub use neighbors::DistanceKind;
