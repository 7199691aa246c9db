pub mod constructions;
pub mod convergence;
pub mod error;
pub mod index_sets;
pub mod metric_spaces;
pub mod sequences;
pub mod verdict;

pub use convergence::StatReport;
pub use error::{Error, Result};
pub use index_sets::{DensityBounds, DensityProfile, IndexSet, Polynomial, Rational};
pub use metric_spaces::{MetricPair, MetricSpace, Point};
pub use sequences::{LazySequence, SubsequenceSpec};
pub use verdict::{Evidence, Verdict};

/// Library version recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
